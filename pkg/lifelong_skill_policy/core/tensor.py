"""Dense float64 tensors, learnable parameters and the recorded computation graph.

Operations executed while a `Graph` is active (see `with Graph() as graph:`)
are recorded whenever one of their inputs is tracked, i.e. it is a trainable,
non-frozen `Parameter` or the output of an already recorded operation.
Outside of a graph nothing is recorded, which makes forward passes pure
functions of the parameter values (safe for concurrent evaluation).
"""
import logging
import threading

import networkx as nx
import numpy as np

from .errors import ContractError

logger = logging.getLogger(__name__)

_local = threading.local()


def current_graph():
    """Return the innermost active graph of the calling thread (or None)."""
    stack = getattr(_local, 'graphs', None)
    if not stack:
        return None
    return stack[-1]


class Tensor:
    """A dense real-valued array (row-major, double precision)."""

    def __init__(self, data, name=None):
        self.data = np.array(data, dtype=np.float64)
        self.name = name

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def requires_grad(self):
        return False

    def numpy(self):
        return self.data.copy()

    def item(self):
        return float(self.data.reshape(-1)[0])

    def __repr__(self):
        name = f" '{self.name}'" if self.name else ''
        return f"Tensor{name}(shape={self.shape})"

    def __add__(self, other):
        return ops.add(self, other)

    def __radd__(self, other):
        return ops.add(other, self)

    def __sub__(self, other):
        return ops.sub(self, other)

    def __rsub__(self, other):
        return ops.sub(other, self)

    def __mul__(self, other):
        return ops.mul(self, other)

    def __rmul__(self, other):
        return ops.mul(other, self)

    def __neg__(self):
        return ops.neg(self)

    def __matmul__(self, other):
        return ops.matmul(self, other)

    def __getitem__(self, index):
        return ops.getitem(self, index)


class Parameter(Tensor):
    """A learnable tensor with a gradient slot.

    `trainable_mask` (optional, same shape) restricts training to a subset of
    the elements; masked-out elements receive zero gradient and are left
    bit-identical by the optimizer, as are all elements of a frozen parameter.
    """

    def __init__(self, data, name=None, trainable=True, frozen=False):
        super().__init__(data, name=name)
        self.grad = np.zeros_like(self.data)
        self.trainable = trainable
        self.frozen = frozen
        self.trainable_mask = None

    @property
    def requires_grad(self):
        if not self.trainable or self.frozen:
            return False
        return self.trainable_mask is None or bool(self.trainable_mask.any())

    def zero_grad(self):
        self.grad = np.zeros_like(self.data)

    def accumulate(self, grad):
        assert grad.shape == self.data.shape, (grad.shape, self.data.shape)
        if self.trainable_mask is not None:
            grad = np.where(self.trainable_mask, grad, 0.0)
        self.grad = self.grad + grad

    def __repr__(self):
        flags = 'frozen' if self.frozen else ('trainable' if self.trainable else 'fixed')
        return f"Parameter('{self.name}', shape={self.shape}, {flags})"


class Graph:
    """Define-by-run record of executed primitive operations.

    Nodes are tensors; an edge points from an operation input to its output.
    Operations are appended in execution order, so insertion order is already
    topological.
    """

    def __init__(self):
        self._dag = nx.DiGraph()
        self._ops = []

    def __enter__(self):
        stack = getattr(_local, 'graphs', None)
        if stack is None:
            stack = _local.graphs = []
        stack.append(self)
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        popped = _local.graphs.pop()
        assert popped is self

    def __len__(self):
        return len(self._ops)

    @property
    def ops(self):
        """Names of the recorded operations, in execution order."""
        return [self._dag.nodes[node]['op'] for node in self._ops]

    def tracks(self, tensor):
        if isinstance(tensor, Parameter):
            return tensor.requires_grad
        return tensor in self._dag

    def record(self, output, inputs, backward_fn, op):
        self._dag.add_node(output, op=op, backward=backward_fn, inputs=inputs)
        for tensor in inputs:
            if self.tracks(tensor):
                self._dag.add_edge(tensor, output)
        self._ops.append(output)

    def clear(self):
        """Forget all recorded operations; parameter values are untouched."""
        self._dag.clear()
        self._ops = []

    def backward(self, loss):
        """Accumulate d(loss)/d(parameter) into every tracked parameter's grad."""
        if not isinstance(loss, Tensor) or loss.size != 1:
            raise ContractError(
                f"backward needs a scalar loss, got shape {getattr(loss, 'shape', None)}"
            )
        if loss not in self._dag:
            logger.debug("Loss does not depend on any trainable parameter.")
            return

        reachable = nx.ancestors(self._dag, loss) | {loss}
        order = list(nx.topological_sort(self._dag.subgraph(reachable)))

        grads = {loss: np.ones_like(loss.data)}
        for node in reversed(order):
            grad = grads.pop(node, None)
            if grad is None:
                continue
            if isinstance(node, Parameter):
                node.accumulate(grad)
                continue
            attributes = self._dag.nodes[node]
            input_grads = attributes['backward'](grad)
            for tensor, input_grad in zip(attributes['inputs'], input_grads):
                if input_grad is None or tensor not in reachable:
                    continue
                if tensor in grads:
                    grads[tensor] = grads[tensor] + input_grad
                else:
                    grads[tensor] = input_grad


def backward(loss):
    """Run reverse-mode accumulation on the active graph of this thread."""
    graph = current_graph()
    if graph is None:
        raise ContractError("backward called outside of an active Graph")
    graph.backward(loss)


from . import ops  # noqa: E402
