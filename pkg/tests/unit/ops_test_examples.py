import numpy as np

from lifelong_skill_policy.core import ops


def _normal(*shapes):
    return lambda rng: [rng.normal(size=shape) for shape in shapes]


def _positive(*shapes):
    return lambda rng: [rng.uniform(0.5, 2.0, size=shape) for shape in shapes]


def _away_from(values, kinks, margin=1e-3):
    """Move values off the points where a function is not differentiable."""
    for kink in kinks:
        values = np.where(np.abs(values - kink) < margin, kink + 2 * margin, values)
    return values


# name -> (input generator, differentiable function of the inputs)
gradient_cases = {
    'add_broadcast': (_normal((3, 1), (1, 4)), ops.add),
    'sub_broadcast': (_normal((2, 3), (3,)), ops.sub),
    'mul_hadamard': (_normal((2, 3), (2, 3)), ops.mul),
    'neg': (_normal((4,)), ops.neg),
    'scale': (_normal((3, 2)), lambda a: ops.scale(a, -1.5)),
    'exp': (_normal((2, 3)), ops.exp),
    'log': (_positive((2, 3)), ops.log),
    'gelu': (_normal((5,)), ops.gelu),
    'clip': (
        lambda rng: [_away_from(rng.uniform(-2.0, 2.0, size=(6,)), (-0.5, 0.5))],
        lambda a: ops.clip(a, -0.5, 0.5)
    ),
    'matmul': (_normal((3, 4), (4, 2)), ops.matmul),
    'matmul_batched': (_normal((2, 3, 4), (4, 5)), ops.matmul),
    'einsum_cp': (
        _normal((3, 2), (3, 2), (4, 2), (2,)),
        lambda u, v, q, lam: ops.einsum('ir,jr,nr,r->ijn', u, v, q, lam)
    ),
    'outer': (_normal((3,), (4,)), ops.outer),
    'sum_axis': (_normal((2, 3, 4)), lambda a: ops.sum(a, axis=1)),
    'mean_axis': (_normal((2, 3, 4)), lambda a: ops.mean(a, axis=(0, 2), keepdims=True)),
    'softmax': (_normal((3, 5)), lambda a: ops.softmax(a, axis=-1)),
    'log_sum_exp': (_normal((3, 4)), lambda a: ops.log_sum_exp(a, axis=-1)),
    'layer_norm': (_normal((2, 6)), ops.layer_norm),
    'cosine_similarity': (
        _normal((2, 5, 4), (1, 5, 4)),
        lambda a, b: ops.cosine_similarity(a, b, axis=-1)
    ),
    'reshape': (_normal((2, 6)), lambda a: ops.reshape(a, (3, 4))),
    'transpose': (_normal((2, 3, 4)), lambda a: ops.transpose(a, (2, 0, 1))),
    'broadcast_to': (_normal((1, 3)), lambda a: ops.broadcast_to(a, (4, 3))),
    'concat': (_normal((2, 3), (1, 3)), lambda a, b: ops.concat([a, b], axis=0)),
    'slice': (_normal((4, 5)), lambda a: ops.getitem(a, (slice(1, 3), slice(None)))),
    'take_repeated': (_normal((4, 3)), lambda a: ops.take(a, np.array([[0, 2], [2, 3]]))),
    'take_along_axis': (
        _normal((3, 5)),
        lambda a: ops.take_along_axis(a, np.array([[4, 0], [1, 1], [2, 3]]), axis=1)
    ),
}
