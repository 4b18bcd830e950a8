import numpy as np
import pytest

from lifelong_skill_policy.envs.demos import collect_demos, replay
from lifelong_skill_policy.envs.expert import expert_action
from lifelong_skill_policy.envs.task import SuiteKind, make_suite, max_tasks
from lifelong_skill_policy.envs.world import EnvState, ObjectState
from lifelong_skill_policy.lifelong.rollout import ExpertAgent, evaluate

PLACE_TASK = make_suite(SuiteKind.OBJECT, 1, seed=0)[0]


def place_state(effector, held=False, closed=False):
    slot = PLACE_TASK.goal[0].target_slot
    objects = [ObjectState(c, (0.3 + 0.2 * i, 0.5))
               for i, c in enumerate(PLACE_TASK.init_dist.object_classes)]
    xy = effector if held else objects[slot].xy
    objects[slot] = ObjectState(objects[slot].object_id, xy, held=held)
    return EnvState(effector, closed or held, objects)


def test_closes_the_gripper_at_the_object():
    slot = PLACE_TASK.goal[0].target_slot
    state = place_state((0.3 + 0.2 * slot, 0.5))
    action = expert_action(PLACE_TASK, state, np.random.default_rng(0))
    assert action.gripper_cmd > 0


def test_releases_the_object_at_the_goal_region():
    state = place_state(PLACE_TASK.goal[0].region, held=True)
    action = expert_action(PLACE_TASK, state, np.random.default_rng(0))
    assert action.gripper_cmd < 0


def test_noise_is_bounded():
    state = place_state((0.5, 0.2))
    deltas = [
        expert_action(PLACE_TASK, state, np.random.default_rng(seed)).delta_xy
        for seed in range(20)
    ]
    spread = np.max(deltas, axis=0) - np.min(deltas, axis=0)
    assert np.all(spread > 0) and np.all(spread <= 0.01)


@pytest.mark.parametrize('kind', list(SuiteKind))
def test_expert_success_rate(kind):
    for task in make_suite(kind, 3, seed=0):
        assert evaluate(ExpertAgent(), task, 100, seed=0).success_rate >= 0.95


@pytest.mark.slow
@pytest.mark.parametrize('kind', list(SuiteKind))
def test_expert_solves_every_task_of_the_suite(kind):
    for task in make_suite(kind, max_tasks(kind), seed=0):
        assert evaluate(ExpertAgent(), task, 100, seed=0).success_rate >= 0.95, task.task_id


def test_demos_are_seed_determined_successes():
    task = make_suite(SuiteKind.GOAL, 2, seed=0)[1]
    demos = collect_demos(task, 5, seed=11)
    again = collect_demos(task, 5, seed=11)
    assert len(demos) == 5
    assert all(d.success and d.task_id == task.task_id for d in demos)
    for a, b in zip(demos, again):
        assert a.initial_state == b.initial_state
        assert np.array_equal(a.action_array(), b.action_array())


def test_replaying_a_demo_reproduces_its_observations():
    task = make_suite(SuiteKind.LONG, 1, seed=2)[0]
    demo = collect_demos(task, 1, seed=0)[0]
    observations, final_state = replay(demo, task)
    assert len(observations) == len(demo)
    for a, b in zip(observations, demo.observations):
        assert np.array_equal(a.workspace_view, b.workspace_view)
        assert np.array_equal(a.wrist_view, b.wrist_view)
        assert np.array_equal(a.proprio, b.proprio)
    assert final_state.stage == len(task.goal)


def test_mean_demo_length_matches_expert_rollouts():
    task = make_suite(SuiteKind.GOAL, 1, seed=4)[0]
    demos = collect_demos(task, 100, seed=0)
    lengths = [len(d) for d in demos]
    reference = [len(d) for d in collect_demos(task, 100, seed=1)]
    assert abs(np.mean(lengths) - np.mean(reference)) <= 0.2 * np.mean(reference)
