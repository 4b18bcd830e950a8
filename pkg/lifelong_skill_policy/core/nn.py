"""Parameter containers: modules, linear maps, layer normalization, MLPs."""
import numpy as np

from . import ops
from .tensor import Parameter


class Module:
    """Base class for anything owning parameters.

    Parameters and sub-modules are plain attributes; lists and dicts of them
    are traversed too, in insertion order, so parameter names are stable.
    """

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def forward(self, *args, **kwargs):
        raise NotImplementedError

    def named_parameters(self, prefix=''):
        for name, value in vars(self).items():
            yield from _named_parameters(value, prefix + name)

    def parameters(self):
        return [p for _, p in self.named_parameters()]

    def zero_grad(self):
        for p in self.parameters():
            p.zero_grad()

    def state_dict(self):
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state):
        params = dict(self.named_parameters())
        assert set(params.keys()) == set(state.keys()), \
            sorted(set(params.keys()) ^ set(state.keys()))
        for name, p in params.items():
            value = np.asarray(state[name], dtype=np.float64)
            assert value.shape == p.shape, (name, value.shape, p.shape)
            p.data = value.copy()


def _named_parameters(value, name):
    if isinstance(value, Parameter):
        yield name, value
    elif isinstance(value, Module):
        yield from value.named_parameters(name + '.')
    elif isinstance(value, (list, tuple)):
        for index, item in enumerate(value):
            yield from _named_parameters(item, f'{name}.{index}')
    elif isinstance(value, dict):
        for key, item in value.items():
            yield from _named_parameters(item, f'{name}.{key}')


class Linear(Module):
    """y = x W + b, with W of shape (in_dim, out_dim)."""

    def __init__(self, in_dim, out_dim, rng, bias=True, zero_init=False):
        if zero_init:
            weight = np.zeros((in_dim, out_dim))
        else:
            limit = np.sqrt(6.0 / (in_dim + out_dim))
            weight = rng.uniform(-limit, limit, size=(in_dim, out_dim))
        self.weight = Parameter(weight)
        self.bias = Parameter(np.zeros(out_dim)) if bias else None

    def forward(self, x, weight_delta=None):
        weight = self.weight
        if weight_delta is not None:
            weight = ops.add(weight, weight_delta)
        y = ops.matmul(x, weight)
        if self.bias is not None:
            y = ops.add(y, self.bias)
        return y


class LayerNorm(Module):
    def __init__(self, dim):
        self.gain = Parameter(np.ones(dim))
        self.bias = Parameter(np.zeros(dim))

    def forward(self, x):
        return ops.add(ops.mul(ops.layer_norm(x), self.gain), self.bias)


class MLP(Module):
    """Stack of linear maps with GELU between consecutive layers."""

    def __init__(self, sizes, rng):
        assert len(sizes) >= 2
        self.layers = [
            Linear(in_dim, out_dim, rng)
            for in_dim, out_dim in zip(sizes[:-1], sizes[1:])
        ]

    def forward(self, x):
        for index, layer in enumerate(self.layers):
            if index > 0:
                x = ops.gelu(x)
            x = layer(x)
        return x
