import logging
from itertools import count

import attr
import numpy as np

from ..core.errors import ContractError
from .expert import expert_action
from .world import observe, sample_initial_state, step

logger = logging.getLogger(__name__)

"""Failed attempts tolerated per requested demonstration."""
MAX_ATTEMPTS_PER_DEMO = 10


@attr.s(frozen=True, eq=False)
class Demonstration:
    task_id = attr.ib(converter=int)
    initial_state = attr.ib()
    observations = attr.ib(converter=tuple)
    actions = attr.ib(converter=tuple)
    success = attr.ib(converter=bool)

    @property
    def steps(self):
        return list(zip(self.observations, self.actions))

    def __len__(self):
        return len(self.actions)

    def action_array(self):
        return np.stack([a.to_vector() for a in self.actions])


def rollout_expert(task, initial_state, rng):
    """Run the scripted expert from `initial_state` until the episode ends."""
    state = initial_state
    observations, actions = [], []
    done = success = False
    while not done:
        action = expert_action(task, state, rng)
        observations.append(observe(state, task))
        actions.append(action)
        state, done, success = step(state, action, task)
    return Demonstration(task.task_id, initial_state, observations, actions, success)


def demo_seed_sequence(task, seed):
    return np.random.SeedSequence([seed, task.task_id, task.init_dist.seed_offset])


def collect_demos(task, n, seed):
    """Collect `n` successful expert demonstrations; failed episodes are retried."""
    seed_sequence = demo_seed_sequence(task, seed)
    demos = []
    for attempt in count():
        if len(demos) == n:
            break
        if attempt >= MAX_ATTEMPTS_PER_DEMO * max(n, 1):
            raise ContractError(
                f"expert failed too often on task {task.task_id} "
                f"({len(demos)}/{n} demos after {attempt} attempts)"
            )
        init_seed, noise_seed = seed_sequence.spawn(2)
        initial_state = sample_initial_state(task, np.random.default_rng(init_seed))
        demo = rollout_expert(task, initial_state, np.random.default_rng(noise_seed))
        if demo.success:
            demos.append(demo)
        else:
            logger.warning(
                "Expert episode %s on task %s failed; retrying.", attempt, task.task_id
            )
    logger.debug(
        "Collected %s demos for task %s (mean length %s).",
        n, task.task_id, np.mean([len(d) for d in demos]) if demos else 0.0
    )
    return demos


def replay(demo, task):
    """Re-simulate a demonstration's actions; return (observations, final state)."""
    state = demo.initial_state
    observations = []
    for action in demo.actions:
        observations.append(observe(state, task))
        state, _, _ = step(state, action, task)
    return observations, state
