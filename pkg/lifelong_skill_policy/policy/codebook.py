"""Expandable skill codebook, attention-driven top-C skill selection and synthesis.

The codebook grows by M rows per task. Each task's rows (skill vectors P,
keys K and attention vectors A) form a subset that is frozen once the next
task is allocated; new rows are orthogonalized against all existing ones.
"""
import logging

import attr
import numpy as np

from ..core import ops
from ..core.config import Config
from ..core.errors import ContractError
from ..core.nn import Module
from ..core.tensor import Parameter

logger = logging.getLogger(__name__)


def _orthonormal_basis(rows):
    """Orthonormal basis (as rows) of the span of `rows`."""
    if rows.shape[0] == 0:
        return np.zeros((0, rows.shape[1]))
    _, singular_values, vt = np.linalg.svd(rows, full_matrices=False)
    tolerance = Config.ORTHOGONALIZATION_TOL * max(1.0, singular_values[0])
    rank = int(np.sum(singular_values > tolerance))
    return vt[:rank]


def gram_schmidt(new_rows, existing_rows):
    """Orthogonalize each new row against the existing rows and the new rows
    before it, then normalize to unit norm.

    Returns (rows, collapsed) where `collapsed` counts rows whose residual
    vanished (the span was exhausted); those are only normalized.
    """
    basis = list(_orthonormal_basis(existing_rows))
    result = np.empty_like(new_rows)
    collapsed = 0
    for index, row in enumerate(new_rows):
        residual = row.copy()
        # Two passes for numerical orthogonality.
        for _ in range(2):
            for b in basis:
                residual = residual - np.dot(residual, b) * b
        norm = np.linalg.norm(residual)
        if norm < Config.ORTHOGONALIZATION_TOL * max(1.0, np.linalg.norm(row)):
            collapsed += 1
            residual = row
            norm = np.linalg.norm(row)
        else:
            basis.append(residual / norm)
        result[index] = residual / norm
    return result, collapsed


class CodebookSubset(Module):
    def __init__(self, task_id, P, K, A):
        self.task_id = task_id
        self.P = Parameter(P)
        self.K = Parameter(K)
        self.A = Parameter(A)

    def freeze(self, frozen=True):
        for p in (self.P, self.K, self.A):
            p.frozen = frozen


@attr.s(frozen=True, eq=False)
class SkillSelection:
    """Top-C selection per batch element: row ids (B, C), weights (B, C) and
    the similarities of all m rows (B, m)."""
    indices = attr.ib()
    weights = attr.ib()
    similarities = attr.ib()


class SkillCodebook(Module):
    def __init__(self, d, rows_per_task):
        self.d = d
        self.rows_per_task = rows_per_task
        self.subsets = []
        self.frozen_upto = 0

    @property
    def size(self):
        return len(self.subsets) * self.rows_per_task

    @property
    def subset_bounds(self):
        return [
            (subset.task_id, i * self.rows_per_task, (i + 1) * self.rows_per_task)
            for i, subset in enumerate(self.subsets)
        ]

    @property
    def task_ids(self):
        return [subset.task_id for subset in self.subsets]

    def source_task(self, row):
        return self.subsets[row // self.rows_per_task].task_id

    def _stacked(self, name):
        arrays = [getattr(s, name).data for s in self.subsets]
        if not arrays:
            return np.zeros((0, 2, self.d) if name == 'P' else (0, self.d))
        return np.concatenate(arrays, axis=0)

    def expand_for_task(self, task_id, rng):
        """Allocate M orthonormalized rows for a new task and freeze older subsets."""
        if task_id in self.task_ids:
            raise ContractError(f"codebook already holds a subset for task {task_id}")
        M, d = self.rows_per_task, self.d

        K, collapsed_k = gram_schmidt(rng.standard_normal((M, d)), self._stacked('K'))
        A, collapsed_a = gram_schmidt(rng.standard_normal((M, d)), self._stacked('A'))
        P_raw = rng.standard_normal((M, 2, d))
        P = np.empty_like(P_raw)
        collapsed_p = 0
        existing_P = self._stacked('P')
        for half in range(2):
            P[:, half, :], collapsed = gram_schmidt(
                P_raw[:, half, :], existing_P[:, half, :]
            )
            collapsed_p += collapsed

        if collapsed_k or collapsed_a or collapsed_p:
            logger.warning(
                "Codebook span exhausted at task %s (m = %s, d = %s): "
                "%s key, %s attention and %s skill rows are not orthogonal.",
                task_id, self.size + M, d, collapsed_k, collapsed_a, collapsed_p
            )

        for subset in self.subsets:
            subset.freeze()
        self.frozen_upto = self.size
        self.subsets.append(CodebookSubset(task_id, P, K, A))
        logger.debug("Codebook expanded for task %s: m = %s.", task_id, self.size)

    def thaw(self):
        """Make every subset trainable (joint training on all tasks)."""
        for subset in self.subsets:
            subset.freeze(False)
        self.frozen_upto = 0

    def matrices(self):
        """(P, K, A) tensors over all m rows."""
        if not self.subsets:
            raise ContractError("the skill codebook is empty")
        return tuple(
            ops.concat([getattr(s, name) for s in self.subsets], axis=0)
            for name in ('P', 'K', 'A')
        )


def top_c(similarities, C):
    """Indices of the C largest values per row; lower index wins ties."""
    order = np.argsort(-similarities, axis=-1, kind='stable')
    return order[..., :C]


def select_skills(state_embedding, codebook, C):
    """Score every codebook row against the window embedding and keep the top C."""
    _, K, A = codebook.matrices()
    m = K.shape[0]
    if not 1 <= C <= m:
        raise ContractError(f"cannot select {C} skills from a codebook of {m} rows")

    pooled = ops.mean(state_embedding, axis=1)
    B, d = pooled.shape
    queries = ops.mul(ops.reshape(pooled, (B, 1, d)), ops.reshape(A, (1, m, d)))
    similarities = ops.cosine_similarity(queries, ops.reshape(K, (1, m, d)), axis=-1)

    indices = top_c(similarities.data, C)
    selected = ops.take_along_axis(similarities, indices, axis=1)
    weights = ops.softmax(selected, axis=-1)
    return SkillSelection(indices=indices, weights=weights, similarities=similarities)


def synthesize(selection, codebook):
    """Weighted sum of the selected skill vectors, split into (p_K, p_V)."""
    P, _, _ = codebook.matrices()
    B, C = selection.indices.shape
    gathered = ops.take(P, selection.indices)
    weighted = ops.mul(gathered, ops.reshape(selection.weights, (B, C, 1, 1)))
    combined = ops.sum(weighted, axis=1)
    p_key = ops.getitem(combined, (slice(None), slice(0, 1), slice(None)))
    p_value = ops.getitem(combined, (slice(None), slice(1, 2), slice(None)))
    return p_key, p_value
