"""Fixed-capacity experience-replay buffer of past demonstrations."""
import logging
from collections import Counter

logger = logging.getLogger(__name__)


class ReplayBuffer:
    """Stores demonstrations of finished tasks.

    On overflow a uniformly random item of the most represented task is
    evicted (the lowest task id on ties), which keeps per-task counts within
    one of each other.
    """

    def __init__(self, capacity, rng):
        assert capacity >= 0
        self.capacity = capacity
        self.rng = rng
        # (task_id, index of the demo within its task's demos, demo)
        self.items = []

    def __len__(self):
        return len(self.items)

    def counts(self):
        return Counter(task_id for task_id, _, _ in self.items)

    def add(self, task_id, demos):
        self.items.extend((task_id, index, demo) for index, demo in enumerate(demos))
        evicted = Counter()
        while len(self.items) > self.capacity:
            counts = self.counts()
            most = max(counts.values())
            victim = min(t for t, c in counts.items() if c == most)
            positions = [i for i, item in enumerate(self.items) if item[0] == victim]
            del self.items[positions[int(self.rng.integers(len(positions)))]]
            evicted[victim] += 1
        if evicted:
            logger.debug("Replay buffer evicted %s.", dict(evicted))
        return evicted

    def demos(self):
        return [demo for _, _, demo in self.items]

    def state(self):
        return {
            'items': [[task_id, index] for task_id, index, _ in self.items],
            'rng': self.rng.bit_generator.state
        }

    def restore(self, state, demos_by_task):
        self.items = [
            (task_id, index, demos_by_task[task_id][index])
            for task_id, index in state['items']
        ]
        self.rng.bit_generator.state = state['rng']


def er_update(buffer, task_id, demos):
    """Add the demonstrations of a finished task to the buffer."""
    evicted = buffer.add(task_id, demos)
    if evicted and buffer.capacity < 2 * len(buffer.counts()):
        logger.warning(
            "Replay capacity %s holds fewer than two demos per task.", buffer.capacity
        )
    return buffer
