"""Forward transfer, negative backward transfer and area under the success curve.

All three are computed on the clamped record: after a task's best eval point
its own success curve stays at the best value.
"""
import attr
import numpy as np


def fwt_per_task(record):
    """FWT_k: the mean of task k's (clamped) success curve over all eval points."""
    record.require_complete(diagonal_only=True)
    c = record.clamped().c
    return np.array([np.mean(c[k, k]) for k in range(record.K)])


def fwt(record):
    return float(np.mean(fwt_per_task(record)))


def nbt(record):
    """Average drop of every task's best success over the following stages.

    The last task has no following stage and contributes 0.
    """
    record.require_complete()
    final = record.clamped().final()
    K = record.K
    total = 0.0
    for k in range(K - 1):
        drops = final[k, k] - final[k + 1:, k]
        total += np.sum(drops) / (K * (K - k - 1))
    return float(total)


def auc(record):
    record.require_complete()
    final = record.clamped().final()
    forward = fwt_per_task(record)
    K = record.K
    total = 0.0
    for k in range(K):
        total += (forward[k] + np.sum(final[k + 1:, k])) / (K * (K - k))
    return float(total)


@attr.s(frozen=True)
class MetricsReport:
    fwt = attr.ib()
    nbt = attr.ib()
    auc = attr.ib()
    fwt_per_task = attr.ib(converter=tuple)

    @classmethod
    def from_record(cls, record):
        return cls(
            fwt=fwt(record),
            nbt=nbt(record),
            auc=auc(record),
            fwt_per_task=[float(v) for v in fwt_per_task(record)]
        )
