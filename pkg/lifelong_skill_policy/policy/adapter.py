"""Mode approximation: CP-decomposed low-rank deltas of stacked attention weights.

The delta of slot n is W[:, :, n] = sum_r lambda_r * outer(U[:, r], V[:, r]) * Q[n, r].
U and V are shared by all tasks; (Q, lambda) are task specific in `per_task`
mode and shared by every task in `shared` mode.
"""
import logging

import numpy as np

from ..core import ops
from ..core.errors import ContractError
from ..core.nn import Module
from ..core.tensor import Parameter

logger = logging.getLogger(__name__)

ADAPTER_MODES = ('per_task', 'shared')

"""Stacked projections per block: q, k, v, o of self- and cross-attention."""
NR_ATTENTION_SLOTS = 8

SHARED_KEY = 'shared'


class TaskFactors(Module):
    def __init__(self, n_slots, rank, rng):
        self.Q = Parameter(rng.standard_normal((n_slots, rank)))
        self.lam = Parameter(rng.standard_normal(rank) / np.sqrt(rank))

    def freeze(self):
        self.Q.frozen = True
        self.lam.frozen = True


class CPAdapter(Module):
    def __init__(self, d, rank, rng, mode='per_task', n_slots=NR_ATTENTION_SLOTS):
        assert mode in ADAPTER_MODES, mode
        self.d = d
        self.rank = rank
        self.n_slots = n_slots
        self.mode = mode
        self.U = Parameter(rng.standard_normal((d, rank)) / np.sqrt(d))
        self.V = Parameter(np.zeros((d, rank)))
        self.factors = {}
        self.registry = []

    def _key(self, task_id):
        return SHARED_KEY if self.mode == 'shared' else str(task_id)

    def add_task(self, task_id, rng):
        """Register a task; in per_task mode earlier factors are frozen."""
        if task_id in self.registry:
            raise ContractError(f"adapter already registered task {task_id}")
        key = self._key(task_id)
        if key not in self.factors:
            for factors in self.factors.values():
                factors.freeze()
            self.factors[key] = TaskFactors(self.n_slots, self.rank, rng)
        self.registry.append(task_id)
        logger.debug("Adapter registered task %s (%s mode).", task_id, self.mode)

    def task_factors(self, task_id):
        if task_id not in self.registry:
            raise ContractError(f"adapter has no factors for task {task_id}")
        return self.factors[self._key(task_id)]

    def delta(self, task_id):
        """Materialized delta tensor of shape (d, d, n_slots)."""
        factors = self.task_factors(task_id)
        return ops.einsum('ir,jr,nr,r->ijn', self.U, self.V, factors.Q, factors.lam)

    def parameter_count(self):
        return sum(p.size for p in self.parameters())


def slot_delta(delta, slot):
    return ops.getitem(delta, (slice(None), slice(None), slot))


def adapted_matvec(x, linear, delta=None, slot=None):
    """Projection through `linear` with its weight augmented by `delta[:, :, slot]`."""
    if delta is None:
        return linear(x)
    return linear(x, weight_delta=slot_delta(delta, slot))
