"""Windowed behavior-cloning samples built from demonstrations."""
import attr
import numpy as np

from ..policy.perception import WindowBatch, window_indices


@attr.s(frozen=True, eq=False)
class DemoDataset:
    """One sample per demonstration step: the window around it and its action."""
    windows = attr.ib()
    actions = attr.ib()
    task_ids = attr.ib()

    def __len__(self):
        return len(self.actions)

    @classmethod
    def from_demos(cls, demos, window):
        assert demos, "no demonstrations"
        parts = []
        for demo in demos:
            length = len(demo)
            indices = np.stack([window_indices(t, length, window) for t in range(length)])
            views = WindowBatch.from_windows([list(demo.observations)])
            parts.append((
                WindowBatch(
                    views.workspace[0][indices],
                    views.wrist[0][indices],
                    views.proprio[0][indices],
                    np.full(length, views.language_id[0], dtype=np.int64)
                ),
                demo.action_array(),
                np.full(length, demo.task_id, dtype=np.int64)
            ))
        return cls(
            windows=WindowBatch.concat([p[0] for p in parts]),
            actions=np.concatenate([p[1] for p in parts]),
            task_ids=np.concatenate([p[2] for p in parts])
        )

    def take(self, indices):
        return self.windows.take(indices), self.actions[indices]

    def batches(self, batch_size, rng):
        """One shuffled epoch of (WindowBatch, actions) pairs."""
        order = rng.permutation(len(self))
        for start in range(0, len(self), batch_size):
            yield self.take(order[start:start + batch_size])

    def sample(self, n, rng):
        return self.take(rng.integers(len(self), size=n))
