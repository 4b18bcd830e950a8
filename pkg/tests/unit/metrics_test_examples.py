import numpy as np

from lifelong_skill_policy.metrics.record import SuccessRecord


def record(curves, eval_points=None):
    """SuccessRecord from {(stage, task): curve} entries."""
    K = 1 + max(i for i, _ in curves)
    E = len(next(iter(curves.values())))
    c = np.full((K, K, E), np.nan)
    for (i, j), curve in curves.items():
        c[i, j] = curve
    return SuccessRecord(list(range(K)), eval_points or [5 * e for e in range(E)], c)


# name -> (record, expected fwt, nbt, auc)
metric_examples = {
    'two_tasks_with_forgetting': (
        record({
            (0, 0): [0.0, 0.5, 1.0],
            (1, 0): [1.0, 0.8, 0.7],
            (1, 1): [0.0, 0.0, 0.6],
        }),
        0.35, 0.15, 0.4
    ),
    'peak_before_the_last_eval_point': (
        record({
            (0, 0): [0.2, 0.9, 0.4],
            (1, 0): [0.9, 0.6, 0.3],
            (1, 1): [0.1, 0.3, 0.2],
        }),
        # Clamped curves: (0.2, 0.9, 0.9) and (0.1, 0.3, 0.3); c_10 is read at e = 1.
        (2.0 / 3 + 0.7 / 3) / 2, (0.9 - 0.6) / 2, (2.0 / 3 + 0.6) / 4 + (0.7 / 3) / 2
    ),
    'single_task': (
        record({(0, 0): [0.0, 0.25, 0.5, 0.75]}),
        0.375, 0.0, 0.375
    ),
    'three_tasks_no_forgetting': (
        record({
            (0, 0): [0.0, 1.0],
            (1, 0): [1.0, 1.0],
            (1, 1): [0.5, 0.5],
            (2, 0): [1.0, 1.0],
            (2, 1): [0.5, 0.5],
            (2, 2): [0.0, 0.0],
        }),
        (0.5 + 0.5 + 0.0) / 3, 0.0, (0.5 + 2.0) / 9 + (0.5 + 0.5) / 6 + 0.0
    ),
}
