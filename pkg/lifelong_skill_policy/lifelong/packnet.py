"""PackNet: magnitude pruning with per-element task ownership.

Every element of a maskable parameter is either FREE or owned by exactly one
task. Training a task may only change FREE elements; after training, the
largest free weights become owned by that task and the rest are reset to 0.
The skill codebook, the adapters and the language table are exempt: they
isolate tasks through their own freezing rules.
"""
import logging
from contextlib import contextmanager

import numpy as np

logger = logging.getLogger(__name__)

FREE = -1

EXEMPT_PREFIXES = ('codebook.', 'perception.language_table')
EXEMPT_PARTS = ('.adapter.',)


def is_exempt(name):
    return name.startswith(EXEMPT_PREFIXES) or any(p in name for p in EXEMPT_PARTS)


def is_prunable(name, parameter):
    """Weight matrices are pruned; vectors and embeddings are kept whole."""
    return parameter.ndim >= 2 and name.endswith('.weight')


class PackNetState:
    def __init__(self, policy, keep_ratio):
        self.keep_ratio = keep_ratio
        self.parameters = {
            name: p for name, p in policy.named_parameters() if not is_exempt(name)
        }
        self.owners = {
            name: np.full(p.shape, FREE, dtype=np.int64)
            for name, p in self.parameters.items()
        }
        # (task_id, assigned element count, pruned element count) per task
        self.history = []

    def free_count(self):
        return sum(int(np.sum(o == FREE)) for o in self.owners.values())

    def begin_task(self, task_id):
        """Only FREE elements are trainable while task `task_id` trains."""
        for name, p in self.parameters.items():
            p.trainable_mask = self.owners[name] == FREE
        logger.debug(
            "PackNet: %s free elements available to task %s.", self.free_count(), task_id
        )

    def train_owned(self, task_id):
        """Only the elements owned by `task_id` are trainable (fine-tuning)."""
        for name, p in self.parameters.items():
            p.trainable_mask = self.owners[name] == task_id

    def prune_and_freeze(self, task_id):
        """Assign the top keep_ratio free elements (by magnitude) to `task_id`."""
        assigned = pruned = 0
        for name, p in self.parameters.items():
            owners = self.owners[name].reshape(-1)
            data = p.data.reshape(-1).copy()
            free = np.flatnonzero(owners == FREE)
            if free.size == 0:
                continue
            if is_prunable(name, p):
                keep = int(round(self.keep_ratio * free.size))
            else:
                keep = free.size
            order = np.argsort(-np.abs(data[free]), kind='stable')
            kept, dropped = free[order[:keep]], free[order[keep:]]
            owners[kept] = task_id
            data[dropped] = 0.0
            p.data = data.reshape(p.shape)
            self.owners[name] = owners.reshape(p.shape)
            assigned += kept.size
            pruned += dropped.size
        self.history.append((task_id, assigned, pruned))
        logger.info(
            "PackNet: task %s owns %s elements, %s pruned.", task_id, assigned, pruned
        )

    def finish_task(self, task_id):
        """Freeze the elements owned by `task_id` for all later tasks."""
        self.begin_task(task_id + 1)

    @contextmanager
    def masked_forward(self, task_id, include_free=False):
        """Temporarily zero every element not owned by a task <= `task_id`.

        FREE elements are kept when `include_free` is set (the task that is
        currently training owns them implicitly).
        """
        saved = {name: p.data for name, p in self.parameters.items()}
        try:
            for name, p in self.parameters.items():
                owners = self.owners[name]
                visible = (owners != FREE) & (owners <= task_id)
                if include_free:
                    visible |= owners == FREE
                p.data = np.where(visible, p.data, 0.0)
            yield
        finally:
            for name, p in self.parameters.items():
                p.data = saved[name]

    def state(self):
        return {
            'keep_ratio': self.keep_ratio,
            'history': [list(h) for h in self.history]
        }

    def arrays(self):
        return {f'packnet.owners.{name}': o for name, o in self.owners.items()}

    def restore(self, state, arrays):
        self.history = [tuple(h) for h in state['history']]
        for name in self.owners:
            self.owners[name] = arrays[f'packnet.owners.{name}'].astype(np.int64)
