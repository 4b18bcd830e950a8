"""Deterministic 2D manipulation world.

States are immutable; `step` is a pure function of (state, action, task).
"""
import logging

import attr
import numpy as np

from ..core.config import Config
from ..core.errors import ContractError

logger = logging.getLogger(__name__)

"""Attempts to place non-overlapping objects before giving up."""
MAX_PLACEMENT_ATTEMPTS = 1000


def _xy(value):
    return tuple(float(v) for v in value)


@attr.s(frozen=True)
class ObjectState:
    object_id = attr.ib(converter=int)
    xy = attr.ib(converter=_xy)
    held = attr.ib(converter=bool, default=False)


@attr.s(frozen=True)
class EnvState:
    effector_xy = attr.ib(converter=_xy)
    gripper_closed = attr.ib(converter=bool)
    objects = attr.ib(converter=tuple)
    step_count = attr.ib(converter=int, default=0)
    # Number of ordered sub-goals completed so far.
    stage = attr.ib(converter=int, default=0)

    @objects.validator
    def _check_objects(self, attribute, value):
        assert sum(o.held for o in value) <= 1
        for o in value:
            assert all(
                Config.WORKSPACE_LOW <= v <= Config.WORKSPACE_HIGH for v in o.xy
            ), o


@attr.s(frozen=True)
class Action:
    delta_xy = attr.ib(converter=_xy)
    gripper_cmd = attr.ib(converter=float)

    def clipped(self):
        if not (np.all(np.isfinite(self.delta_xy)) and np.isfinite(self.gripper_cmd)):
            raise ContractError(f"non-finite action {self}")
        return Action(
            np.clip(self.delta_xy, -Config.MAX_STEP, Config.MAX_STEP),
            np.clip(self.gripper_cmd, -1.0, 1.0)
        )

    def to_vector(self):
        return np.array([*self.delta_xy, self.gripper_cmd])

    @classmethod
    def from_vector(cls, vector):
        return cls(vector[:2], vector[2])


@attr.s(frozen=True, eq=False)
class Observation:
    workspace_view = attr.ib()
    wrist_view = attr.ib()
    proprio = attr.ib()
    language_id = attr.ib(converter=int)


def region_reached(xy, region):
    return float(np.hypot(xy[0] - region[0], xy[1] - region[1])) <= Config.REGION_RADIUS


def subgoal_satisfied(state, subgoal):
    target = state.objects[subgoal.target_slot]
    return not target.held and region_reached(target.xy, subgoal.region)


def goal_reached(state, task):
    """The sparse goal predicate g: every ordered sub-goal completed and holding."""
    return state.stage == len(task.goal) and all(
        subgoal_satisfied(state, subgoal) for subgoal in task.goal
    )


def is_done(state, task):
    return goal_reached(state, task) or state.step_count >= task.horizon


def sample_initial_state(task, rng):
    """Draw a state from the task's initial-state distribution."""
    dist = task.init_dist
    effector = [rng.uniform(*bounds) for bounds in dist.effector_range]
    for _ in range(MAX_PLACEMENT_ATTEMPTS):
        positions = [
            (rng.uniform(*x_range), rng.uniform(*y_range))
            for x_range, y_range in dist.position_ranges
        ]
        separated = all(
            np.hypot(a[0] - b[0], a[1] - b[1]) >= Config.MIN_OBJECT_SEPARATION
            for i, a in enumerate(positions) for b in positions[i + 1:]
        )
        if separated:
            break
    else:
        raise ContractError(f"cannot place objects of task {task.task_id}")
    return EnvState(
        effector_xy=effector,
        gripper_closed=False,
        objects=[
            ObjectState(object_id, xy)
            for object_id, xy in zip(dist.object_classes, positions)
        ]
    )


def _clip_to_workspace(xy):
    return np.clip(xy, Config.WORKSPACE_LOW, Config.WORKSPACE_HIGH)


def _pushed_object(effector, move, objects):
    """Index of the free object a closed, empty gripper pushes with `move`."""
    norm = np.linalg.norm(move)
    if norm == 0.0:
        return None
    best = None
    best_distance = None
    for index, o in enumerate(objects):
        offset = np.array(o.xy) - effector
        distance = np.linalg.norm(offset)
        if o.held or distance > Config.PUSH_RADIUS or distance == 0.0:
            continue
        if np.dot(move, offset) / (norm * distance) <= Config.PUSH_ALIGNMENT:
            continue
        if best is None or distance < best_distance:
            best, best_distance = index, distance
    return best


def step(state, action, task):
    """Advance the world by one step; return (state, done, success)."""
    if is_done(state, task):
        raise ContractError(
            f"step on a finished episode (step {state.step_count}, "
            f"horizon {task.horizon})"
        )
    action = action.clipped()
    close = action.gripper_cmd > 0
    objects = list(state.objects)

    # Gripper transitions.
    if close and not state.gripper_closed:
        effector = np.array(state.effector_xy)
        candidates = [
            (np.linalg.norm(np.array(o.xy) - effector), index)
            for index, o in enumerate(objects)
            if not o.held
        ]
        candidates = [c for c in candidates if c[0] <= Config.GRASP_RADIUS]
        if candidates:
            _, index = min(candidates)
            objects[index] = attr.evolve(objects[index], held=True)
    elif not close and state.gripper_closed:
        objects = [attr.evolve(o, held=False) for o in objects]

    # Effector motion.
    old_effector = np.array(state.effector_xy)
    effector = _clip_to_workspace(old_effector + np.array(action.delta_xy))
    move = effector - old_effector

    holding = any(o.held for o in objects)
    if holding:
        objects = [
            attr.evolve(o, xy=effector) if o.held else o for o in objects
        ]
    elif close:
        index = _pushed_object(old_effector, move, objects)
        if index is not None:
            pushed = objects[index]
            objects[index] = attr.evolve(
                pushed, xy=_clip_to_workspace(np.array(pushed.xy) + move)
            )

    next_state = EnvState(
        effector_xy=effector,
        gripper_closed=close,
        objects=objects,
        step_count=state.step_count + 1,
        stage=state.stage
    )

    stage = next_state.stage
    while stage < len(task.goal) and subgoal_satisfied(next_state, task.goal[stage]):
        stage += 1
    if stage != next_state.stage:
        logger.debug("Task %s: completed sub-goal %s.", task.task_id, stage)
        next_state = attr.evolve(next_state, stage=stage)

    success = goal_reached(next_state, task)
    done = success or next_state.step_count >= task.horizon
    return next_state, done, success


def current_subgoal(state, task):
    return task.goal[min(state.stage, len(task.goal) - 1)]


def _object_features(state, origin, scale):
    features = []
    for o in state.objects:
        one_hot = np.zeros(Config.NR_OBJECT_CLASSES)
        one_hot[o.object_id] = 1.0
        features.append(scale * (np.array(o.xy) - origin))
        features.append(one_hot)
        features.append([1.0 if o.held else 0.0])
    return features


OBJECT_FEATURES = 2 + Config.NR_OBJECT_CLASSES + 1
VIEW_DIM = Config.NR_OBJECT_SLOTS * OBJECT_FEATURES + 2
PROPRIO_DIM = 3


def observe(state, task):
    """Feature-vector observation of `state` (views, proprioception, language)."""
    region = np.array(current_subgoal(state, task).region)
    center = np.full(2, 0.5)
    effector = np.array(state.effector_xy)

    # Workspace coordinates are mapped to [-1, 1]; the wrist view is relative.
    workspace = _object_features(state, center, 2.0) + [2.0 * (region - center)]
    wrist = _object_features(state, effector, 1.0) + [region - effector]
    proprio = np.concatenate([
        2.0 * (effector - center), [1.0 if state.gripper_closed else -1.0]
    ])
    return Observation(
        workspace_view=np.concatenate(workspace),
        wrist_view=np.concatenate(wrist),
        proprio=proprio,
        language_id=task.language_id
    )
