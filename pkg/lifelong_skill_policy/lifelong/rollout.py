"""Evaluation rollouts of agents on tasks."""
import logging
from collections import Counter, namedtuple

import numpy as np

from ..core.config import Config
from ..core.errors import ContractError
from ..envs.expert import expert_action
from ..envs.world import Action, observe, sample_initial_state, step
from ..policy.perception import WindowBatch, window_indices

logger = logging.getLogger(__name__)

EvalOutcome = namedtuple('EvalOutcome', ['success_rate', 'skill_counts'])


class ExpertAgent:
    """The scripted expert, wrapped as an agent."""

    def act(self, task, states, histories, rngs):
        return [expert_action(task, s, rng) for s, rng in zip(states, rngs)], None


class RandomAgent:
    """Uniformly random displacements and gripper commands."""

    def act(self, task, states, histories, rngs):
        actions = [
            Action(
                rng.uniform(-Config.MAX_STEP, Config.MAX_STEP, size=2),
                1.0 if rng.random() < 0.5 else -1.0
            )
            for rng in rngs
        ]
        return actions, None


def online_window(history, window):
    """Window around the latest observation of `history`.

    Future steps are not observed yet; the latest observation stands in for
    them.
    """
    t = len(history) - 1
    return [history[i] for i in window_indices(t, len(history), window)]


class PolicyAgent:
    def __init__(self, policy, task_id, deterministic=False):
        self.policy = policy
        self.task_id = task_id
        self.deterministic = deterministic

    def act(self, task, states, histories, rngs):
        window = self.policy.config.window
        batch = WindowBatch.from_windows([online_window(h, window) for h in histories])
        actions, indices = self.policy.act(
            batch, self.task_id, list(rngs), deterministic=self.deterministic
        )
        return [Action.from_vector(a) for a in actions], indices


def episode_rngs(task, n_episodes, seed):
    """(initial-state rng, action rng) per episode, independent of batching."""
    root = np.random.SeedSequence([seed, task.task_id, task.init_dist.seed_offset])
    return [
        tuple(np.random.default_rng(s) for s in child.spawn(2))
        for child in root.spawn(n_episodes)
    ]


def evaluate(agent, task, n_episodes, seed):
    """Success rate of `agent` over `n_episodes` fresh episodes of `task`.

    Episodes advance in lockstep so a policy agent sees one batch per step;
    each episode draws from its own generators, so results do not depend on
    which episodes share a batch.
    """
    if n_episodes < 1:
        raise ContractError(f"evaluate needs at least one episode, got {n_episodes}")

    rngs = episode_rngs(task, n_episodes, seed)
    states = [sample_initial_state(task, init_rng) for init_rng, _ in rngs]
    histories = [[observe(s, task)] for s in states]
    successes = np.zeros(n_episodes, dtype=bool)
    active = list(range(n_episodes))
    skill_counts = Counter()

    while active:
        actions, indices = agent.act(
            task,
            [states[i] for i in active],
            [histories[i] for i in active],
            [rngs[i][1] for i in active]
        )
        if indices is not None:
            skill_counts.update(int(row) for row in np.asarray(indices).reshape(-1))

        still_active = []
        for i, action in zip(active, actions):
            states[i], done, success = step(states[i], action, task)
            if done:
                successes[i] = success
            else:
                histories[i].append(observe(states[i], task))
                still_active.append(i)
        active = still_active

    rate = float(np.mean(successes))
    logger.debug(
        "Task %s: %s/%s episodes succeeded.", task.task_id, int(successes.sum()), n_episodes
    )
    return EvalOutcome(success_rate=rate, skill_counts=skill_counts)
