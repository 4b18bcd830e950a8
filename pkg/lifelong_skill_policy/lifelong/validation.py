"""Parameter-isolation checks run around every lifelong step."""
import logging

import numpy as np

logger = logging.getLogger(__name__)


def _copy(module):
    return {name: p.data.copy() for name, p in module.named_parameters()}


"""Largest |dot| tolerated between rows of different codebook subsets."""
KEY_ORTHOGONALITY_TOL = 1e-8


def max_cross_dot(codebook, task_id):
    """Largest |dot| between the rows of `task_id`'s subset and all earlier rows,
    over K, A and both slices of P."""
    index = codebook.task_ids.index(task_id)
    newest, older = codebook.subsets[index], codebook.subsets[:index]
    if not older:
        return 0.0
    pairs = [
        (newest.K.data, np.concatenate([s.K.data for s in older])),
        (newest.A.data, np.concatenate([s.A.data for s in older])),
    ]
    for half in range(2):
        pairs.append((
            newest.P.data[:, half, :],
            np.concatenate([s.P.data[:, half, :] for s in older])
        ))
    return max(float(np.max(np.abs(new @ old.T))) for new, old in pairs)


def validate_expansion(policy, task_id):
    """Assert that the rows just allocated for `task_id` are orthogonal to all
    earlier rows; only possible while the codebook fits in d dimensions."""
    codebook = policy.codebook
    if codebook is None or codebook.size > codebook.d:
        return
    drift = max_cross_dot(codebook, task_id)
    assert drift <= KEY_ORTHOGONALITY_TOL, (task_id, drift)


class IsolationAudit:
    """Snapshots of everything a finished task must never see change again.

    For each finished task: its codebook rows, its per-task adapter factors and
    (under PackNet) the values of the weight elements it owns.
    """

    def __init__(self):
        self.codebook = {}
        self.adapters = {}
        self.packnet = {}

    def record(self, task_id, policy, packnet=None):
        if policy.codebook is not None:
            for subset in policy.codebook.subsets:
                if subset.task_id == task_id:
                    self.codebook[task_id] = _copy(subset)
        self.adapters[task_id] = [
            _copy(adapter.factors[str(task_id)])
            for adapter in policy.adapters if adapter.mode == 'per_task'
        ]
        if packnet is not None:
            self.packnet[task_id] = {
                name: p.data[packnet.owners[name] == task_id].copy()
                for name, p in packnet.parameters.items()
            }


def validate_isolation(audit, policy, packnet=None):
    """Assert that no finished task's frozen parameters have changed.

    Rows keep training after expansion, so orthogonality is checked by
    `validate_expansion` and not here.
    """
    if policy.codebook is not None:
        subsets = {s.task_id: s for s in policy.codebook.subsets}
        for task_id, snapshot in audit.codebook.items():
            current = dict(subsets[task_id].named_parameters())
            for name, data in snapshot.items():
                assert np.array_equal(current[name].data, data), (task_id, name)

    per_task = [a for a in policy.adapters if a.mode == 'per_task']
    for task_id, snapshots in audit.adapters.items():
        for adapter, snapshot in zip(per_task, snapshots):
            current = dict(adapter.factors[str(task_id)].named_parameters())
            for name, data in snapshot.items():
                assert np.array_equal(current[name].data, data), (task_id, name)

    if packnet is not None:
        for task_id, snapshot in audit.packnet.items():
            for name, values in snapshot.items():
                p = packnet.parameters[name]
                assert np.array_equal(p.data[packnet.owners[name] == task_id], values), \
                    (task_id, name)

    logger.debug("Isolation holds for %s finished tasks.", len(audit.adapters))
