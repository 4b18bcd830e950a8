import numpy as np
import pytest
from hypothesis import given, settings

from lifelong_skill_policy.core import ops
from lifelong_skill_policy.core.errors import ShapeError
from lifelong_skill_policy.core.tensor import Graph, Parameter
from tests.unit.ops_test_examples import gradient_cases
from tests.unit.strategies import random_seed
from tests.unit.util import numerical_gradient, relative_error


def weighted_sum(out, weight):
    return float(np.sum(out.data * weight))


def assert_gradients_match(build, values, seed):
    """Reverse-mode gradients of sum(w * build(...)) against central differences."""
    params = [Parameter(v) for v in values]
    with Graph() as graph:
        out = build(*params)
        weight = np.random.default_rng(seed).normal(size=out.shape)
        graph.backward(ops.sum(ops.mul(out, weight)))

    for p in params:
        numeric = numerical_gradient(
            lambda: weighted_sum(build(*params), weight), p.data, h=1e-5
        )
        assert relative_error(p.grad, numeric) <= 1e-4


@pytest.mark.parametrize('name', sorted(gradient_cases))
@given(seed=random_seed())
@settings(deadline=None, max_examples=50)
def test_gradient_matches_finite_differences(name, seed):
    make_inputs, build = gradient_cases[name]
    rng = np.random.default_rng(seed)
    assert_gradients_match(build, make_inputs(rng), seed)


def test_matmul_identity_and_zero():
    b = np.arange(6.0).reshape(3, 2)
    assert np.array_equal(ops.matmul(np.eye(3), b).data, b)
    assert np.array_equal(ops.matmul(np.zeros((2, 4)), np.ones((4, 3))).data, np.zeros((2, 3)))


@given(seed=random_seed())
@settings(deadline=None)
def test_matmul_matches_triple_loop(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=(5, 7)), rng.normal(size=(7, 4))
    expected = np.zeros((5, 4))
    for i in range(5):
        for j in range(4):
            for k in range(7):
                expected[i, j] += a[i, k] * b[k, j]
    assert np.max(np.abs(ops.matmul(a, b).data - expected)) <= 1e-12


def test_matmul_shape_error_names_both_shapes():
    with pytest.raises(ShapeError) as error:
        ops.matmul(np.zeros((2, 3)), np.zeros((4, 5)))
    assert error.value.shapes == ((2, 3), (4, 5))
    assert '(2, 3)' in str(error.value) and '(4, 5)' in str(error.value)


def test_softmax_examples():
    assert np.allclose(ops.softmax(np.zeros(2)).data, [0.5, 0.5], rtol=0, atol=1e-15)

    x = np.array([1.0, 2.0, 3.0])
    e = np.exp(x.astype(np.longdouble))
    expected = e / e.sum()
    assert np.max(np.abs(ops.softmax(x).data - expected)) <= 1e-15


@given(seed=random_seed())
@settings(deadline=None)
def test_softmax_is_shift_invariant_simplex(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(0.0, 10.0, size=(4, 6))
    y = ops.softmax(x, axis=-1).data
    assert np.all(y >= 0)
    assert np.max(np.abs(y.sum(axis=-1) - 1.0)) <= 1e-12
    shifted = ops.softmax(x + rng.normal(0.0, 100.0), axis=-1).data
    assert np.max(np.abs(shifted - y)) <= 1e-12


@given(seed=random_seed())
@settings(deadline=None)
def test_log_sum_exp_is_shift_exact(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=5)
    c = float(rng.normal(0.0, 10.0))
    assert abs(ops.log_sum_exp(x + c).item() - (ops.log_sum_exp(x).item() + c)) <= 1e-12


def test_log_sum_exp_of_single_element():
    assert ops.log_sum_exp(np.array([3.25])).item() == 3.25


def test_cosine_similarity_examples():
    a = np.array([1.0, 2.0, -0.5])
    assert abs(ops.cosine_similarity(a, a).item() - 1.0) <= 1e-15
    assert ops.cosine_similarity(np.array([1.0, 0.0]), np.array([0.0, 3.0])).item() == 0.0
    assert ops.cosine_similarity(np.zeros(3), a).item() == 0.0


@given(seed=random_seed())
@settings(deadline=None)
def test_cosine_similarity_matches_direct_formula(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=6), rng.normal(size=6)
    expected = a @ b / (np.linalg.norm(a) * np.linalg.norm(b))
    value = ops.cosine_similarity(a, b).item()
    assert -1.0 <= value <= 1.0
    assert abs(value - expected) <= 1e-12


def test_ops_outside_a_graph_are_not_recorded():
    p = Parameter(np.ones(3))
    out = ops.mul(p, p)
    with Graph() as graph:
        ops.mul(out, 2.0)
    assert len(graph) == 0


def test_untracked_inputs_are_not_recorded():
    p = Parameter(np.ones(3))
    with Graph() as graph:
        ops.exp(np.ones(3))
        ops.exp(p)
    assert graph.ops == ['exp']
