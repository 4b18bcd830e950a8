"""Differentiable primitive operations on `Tensor`s.

Each primitive computes its output with numpy and, when recording, registers
a closure mapping the output gradient to one gradient per input (None for
inputs that need none).
"""
from math import pi, sqrt

import numpy as np

from .config import Config
from .errors import ShapeError
from .tensor import Tensor, current_graph

GELU_C = sqrt(2.0 / pi)
GELU_A = 0.044715


def as_tensor(x):
    if isinstance(x, Tensor):
        return x
    return Tensor(x)


def _make(data, inputs, backward_fn, op):
    out = Tensor(data)
    assert np.all(np.isfinite(out.data)), f"{op} produced non-finite values"
    graph = current_graph()
    if graph is not None and any(graph.tracks(t) for t in inputs):
        graph.record(out, inputs, backward_fn, op)
    return out


def _unbroadcast(grad, shape):
    """Sum `grad` over the axes that broadcasting added or stretched."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _normalize_axes(axis, ndim):
    if axis is None:
        return tuple(range(ndim))
    if isinstance(axis, int):
        axis = (axis,)
    return tuple(sorted(a % ndim for a in axis))


def _check_broadcast(op, a, b):
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(op, a.shape, b.shape)


# Elementwise arithmetic.

def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast('add', a, b)

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _make(a.data + b.data, (a, b), backward, 'add')


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast('sub', a, b)

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return _make(a.data - b.data, (a, b), backward, 'sub')


def mul(a, b):
    """Elementwise (Hadamard) product with broadcasting."""
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast('mul', a, b)

    def backward(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return _make(a.data * b.data, (a, b), backward, 'mul')


def neg(a):
    a = as_tensor(a)
    return _make(-a.data, (a,), lambda g: (-g,), 'neg')


def scale(a, factor):
    a = as_tensor(a)
    factor = float(factor)
    return _make(a.data * factor, (a,), lambda g: (g * factor,), 'scale')


def exp(a):
    a = as_tensor(a)
    y = np.exp(a.data)
    return _make(y, (a,), lambda g: (g * y,), 'exp')


def log(a):
    a = as_tensor(a)
    return _make(np.log(a.data), (a,), lambda g: (g / a.data,), 'log')


def gelu(a):
    """GELU, tanh approximation."""
    a = as_tensor(a)
    x = a.data
    t = np.tanh(GELU_C * (x + GELU_A * x ** 3))

    def backward(g):
        dt = (1.0 - t * t) * GELU_C * (1.0 + 3.0 * GELU_A * x * x)
        return (g * (0.5 * (1.0 + t) + 0.5 * x * dt),)

    return _make(0.5 * x * (1.0 + t), (a,), backward, 'gelu')


def clip(a, low, high):
    a = as_tensor(a)
    inside = (a.data > low) & (a.data < high)
    return _make(
        np.clip(a.data, low, high), (a,), lambda g: (np.where(inside, g, 0.0),), 'clip'
    )


# Products.

def matmul(a, b):
    """Matrix product; leading (batch) dimensions broadcast."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeError('matmul', a.shape, b.shape)
    try:
        np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    except ValueError:
        raise ShapeError('matmul', a.shape, b.shape)

    def backward(g):
        ga = np.matmul(g, np.swapaxes(b.data, -1, -2))
        gb = np.matmul(np.swapaxes(a.data, -1, -2), g)
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return _make(np.matmul(a.data, b.data), (a, b), backward, 'matmul')


def einsum(subscripts, *operands):
    """Explicit-output einsum (`'ij,jk->ik'`); no repeated index within an operand."""
    operands = tuple(as_tensor(op) for op in operands)
    inputs, output = subscripts.replace(' ', '').split('->')
    inputs = inputs.split(',')
    assert len(inputs) == len(operands), subscripts
    for sub, operand in zip(inputs, operands):
        if len(sub) != operand.ndim or len(set(sub)) != len(sub):
            raise ShapeError(f'einsum {subscripts}', *(op.shape for op in operands))
    try:
        data = np.einsum(subscripts, *(op.data for op in operands))
    except ValueError:
        raise ShapeError(f'einsum {subscripts}', *(op.shape for op in operands))

    def backward(g):
        grads = []
        for k, sub in enumerate(inputs):
            others = [i for i in range(len(inputs)) if i != k]
            available = set(output).union(*(inputs[i] for i in others))
            assert set(sub) <= available, f"cannot differentiate {subscripts}"
            expr = ','.join([output] + [inputs[i] for i in others]) + '->' + sub
            grads.append(np.einsum(expr, g, *(operands[i].data for i in others)))
        return tuple(grads)

    return _make(data, operands, backward, 'einsum')


def outer(a, b):
    """Outer product of two vectors."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 1 or b.ndim != 1:
        raise ShapeError('outer', a.shape, b.shape)

    def backward(g):
        return g @ b.data, a.data @ g

    return _make(np.outer(a.data, b.data), (a, b), backward, 'outer')


# Reductions and normalizations.

def sum(a, axis=None, keepdims=False):
    a = as_tensor(a)
    axes = _normalize_axes(axis, a.ndim)

    def backward(g):
        if not keepdims:
            g = np.expand_dims(g, axes)
        return (np.broadcast_to(g, a.shape).copy(),)

    return _make(a.data.sum(axis=axes, keepdims=keepdims), (a,), backward, 'sum')


def mean(a, axis=None, keepdims=False):
    a = as_tensor(a)
    axes = _normalize_axes(axis, a.ndim)
    count = int(np.prod([a.shape[ax] for ax in axes]))

    def backward(g):
        if not keepdims:
            g = np.expand_dims(g, axes)
        return (np.broadcast_to(g / count, a.shape).copy(),)

    return _make(a.data.mean(axis=axes, keepdims=keepdims), (a,), backward, 'mean')


def softmax(a, axis=-1):
    """Numerically stable softmax (max subtraction) along `axis`."""
    a = as_tensor(a)
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        return (y * (g - (g * y).sum(axis=axis, keepdims=True)),)

    return _make(y, (a,), backward, 'softmax')


def log_sum_exp(a, axis=-1, keepdims=False):
    a = as_tensor(a)
    m = a.data.max(axis=axis, keepdims=True)
    e = np.exp(a.data - m)
    s = e.sum(axis=axis, keepdims=True)
    out = m + np.log(s)
    weights = e / s

    def backward(g):
        if not keepdims:
            g = np.expand_dims(g, axis)
        return (g * weights,)

    if not keepdims:
        out = np.squeeze(out, axis=axis)
    return _make(out, (a,), backward, 'log_sum_exp')


def layer_norm(a, eps=None):
    """Normalize over the last axis (no affine part)."""
    if eps is None:
        eps = Config.LAYER_NORM_EPS
    a = as_tensor(a)
    centered = a.data - a.data.mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt((centered ** 2).mean(axis=-1, keepdims=True) + eps)
    xhat = centered * inv

    def backward(g):
        return (inv * (
            g
            - g.mean(axis=-1, keepdims=True)
            - xhat * (g * xhat).mean(axis=-1, keepdims=True)
        ),)

    return _make(xhat, (a,), backward, 'layer_norm')


def cosine_similarity(a, b, axis=-1):
    """Cosine similarity along `axis`; 0 where either norm is below Config.COSINE_EPS."""
    a, b = as_tensor(a), as_tensor(b)
    if a.shape[axis] != b.shape[axis]:
        raise ShapeError('cosine_similarity', a.shape, b.shape)
    _check_broadcast('cosine_similarity', a, b)

    na = np.sqrt((a.data ** 2).sum(axis=axis, keepdims=True))
    nb = np.sqrt((b.data ** 2).sum(axis=axis, keepdims=True))
    valid = (na >= Config.COSINE_EPS) & (nb >= Config.COSINE_EPS)
    safe_na = np.where(valid, na, 1.0)
    safe_nb = np.where(valid, nb, 1.0)
    dot = (a.data * b.data).sum(axis=axis, keepdims=True)
    cos = np.where(valid, dot / (safe_na * safe_nb), 0.0)

    def backward(g):
        g = np.expand_dims(g, axis)
        ga = np.where(valid, g * (b.data / (safe_na * safe_nb) - cos * a.data / safe_na ** 2), 0.0)
        gb = np.where(valid, g * (a.data / (safe_na * safe_nb) - cos * b.data / safe_nb ** 2), 0.0)
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return _make(np.clip(np.squeeze(cos, axis=axis), -1.0, 1.0), (a, b), backward, 'cosine')


# Shape manipulation and indexing.

def reshape(a, shape):
    a = as_tensor(a)
    return _make(
        a.data.reshape(shape), (a,), lambda g: (g.reshape(a.shape),), 'reshape'
    )


def transpose(a, axes):
    a = as_tensor(a)
    inverse = np.argsort(axes)
    return _make(
        np.transpose(a.data, axes), (a,), lambda g: (np.transpose(g, inverse),), 'transpose'
    )


def broadcast_to(a, shape):
    a = as_tensor(a)
    try:
        data = np.broadcast_to(a.data, shape).copy()
    except ValueError:
        raise ShapeError('broadcast_to', a.shape, shape)
    return _make(data, (a,), lambda g: (_unbroadcast(g, a.shape),), 'broadcast_to')


def concat(tensors, axis=0):
    tensors = tuple(as_tensor(t) for t in tensors)
    try:
        data = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError:
        raise ShapeError('concat', *(t.shape for t in tensors))
    offsets = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g):
        return tuple(np.split(g, offsets, axis=axis))

    return _make(data, tensors, backward, 'concat')


def getitem(a, index):
    """Slice / index a tensor (basic or advanced numpy indexing)."""
    a = as_tensor(a)

    def backward(g):
        grad = np.zeros_like(a.data)
        np.add.at(grad, index, g)
        return (grad,)

    return _make(a.data[index], (a,), backward, 'slice')


def take(a, indices, axis=0):
    """Gather along the first axis: output shape is indices.shape + a.shape[1:]."""
    assert axis == 0
    a = as_tensor(a)
    indices = np.asarray(indices, dtype=np.int64)

    def backward(g):
        grad = np.zeros_like(a.data)
        np.add.at(grad, indices, g)
        return (grad,)

    return _make(np.take(a.data, indices, axis=0), (a,), backward, 'take')


def _along_axis_index(indices, axis):
    grids = list(np.indices(indices.shape, sparse=True))
    grids[axis] = indices
    return tuple(grids)


def take_along_axis(a, indices, axis):
    a = as_tensor(a)
    indices = np.asarray(indices, dtype=np.int64)
    if indices.ndim != a.ndim:
        raise ShapeError('take_along_axis', a.shape, indices.shape)
    index = _along_axis_index(indices, axis)

    def backward(g):
        grad = np.zeros_like(a.data)
        np.add.at(grad, index, g)
        return (grad,)

    return _make(a.data[index], (a,), backward, 'take_along_axis')
