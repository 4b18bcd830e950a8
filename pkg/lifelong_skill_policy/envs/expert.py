"""Scripted expert: a waypoint proportional controller over the ordered sub-goals."""
import numpy as np

from ..core.config import Config
from .world import Action, current_subgoal

"""Close the gripper once the effector is this close to the grasp point."""
GRASP_TOLERANCE = 0.01

"""Release a carried object once it is this close to the region center."""
RELEASE_TOLERANCE = 0.02

"""Distance behind the object the effector starts pushing from."""
PUSH_OFFSET = 0.04

"""Pushing continues while the effector stays this close to the push point."""
PUSH_TRACKING_TOLERANCE = 0.02

OPEN = -1.0
CLOSE = 1.0


def _toward(target, effector):
    """Displacement toward `target`, scaled (not clipped) to the step limit."""
    delta = np.asarray(target, dtype=float) - effector
    largest = np.max(np.abs(delta))
    if largest > Config.MAX_STEP:
        delta = delta * (Config.MAX_STEP / largest)
    return delta


def _place(state, subgoal, effector):
    target = state.objects[subgoal.target_slot]
    center = np.array(subgoal.region)
    if target.held:
        if np.linalg.norm(center - effector) < RELEASE_TOLERANCE:
            return np.zeros(2), OPEN
        return _toward(center, effector), CLOSE

    position = np.array(target.xy)
    if state.gripper_closed:
        # Empty-handed or holding the wrong object: open up first.
        return _toward(position, effector), OPEN
    if np.linalg.norm(position - effector) < GRASP_TOLERANCE:
        return np.zeros(2), CLOSE
    return _toward(position, effector), OPEN


def _push(state, subgoal, effector):
    target = state.objects[subgoal.target_slot]
    if target.held:
        return np.zeros(2), OPEN

    position = np.array(target.xy)
    center = np.array(subgoal.region)
    remaining = center - position
    distance = np.linalg.norm(remaining)
    if distance == 0.0:
        return np.zeros(2), OPEN
    push_point = position - remaining / distance * PUSH_OFFSET

    if state.gripper_closed:
        holding = any(o.held for o in state.objects)
        if not holding and \
                np.linalg.norm(push_point - effector) < PUSH_TRACKING_TOLERANCE:
            return _toward(effector + remaining, effector), CLOSE
        return _toward(push_point, effector), OPEN
    if np.linalg.norm(push_point - effector) < GRASP_TOLERANCE:
        return np.zeros(2), CLOSE
    return _toward(push_point, effector), OPEN


PHASES = {
    'place': _place,
    'push': _push
}


def expert_action(task, state, rng):
    """Expert action for `state`, with uniform noise on the displacement.

    A pure function of (task, state) apart from the noise drawn from `rng`.
    """
    subgoal = current_subgoal(state, task)
    effector = np.array(state.effector_xy)
    delta, gripper_cmd = PHASES[subgoal.kind](state, subgoal, effector)
    noise = rng.uniform(-Config.EXPERT_NOISE, Config.EXPERT_NOISE, size=2)
    return Action(delta + noise, gripper_cmd)
