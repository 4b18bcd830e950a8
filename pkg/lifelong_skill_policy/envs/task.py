"""Task specifications and the four task suites of the synthetic world.

All suites share the same primitives (directional moves, grasp, release and
push) and the same four goal regions, so skills learned on one task can
transfer to others.
"""
import logging
from enum import Enum
from itertools import permutations

import attr
import numpy as np

from ..core.config import Config
from ..core.errors import ConfigError

logger = logging.getLogger(__name__)


class SuiteKind(Enum):
    OBJECT = 'Object'
    GOAL = 'Goal'
    SPATIAL = 'Spatial'
    LONG = 'Long'


"""Goal region centers, one near each workspace corner."""
REGIONS = (
    (0.15, 0.15),
    (0.85, 0.15),
    (0.15, 0.85),
    (0.85, 0.85)
)
REGION_NAMES = ('bottom-left', 'bottom-right', 'top-left', 'top-right')

OBJECT_NAMES = ('bowl', 'mug', 'plate', 'cube', 'can', 'box')

SUBGOAL_KINDS = ('place', 'push')

# Object position ranges ((x_low, x_high), (y_low, y_high)) per slot.
CENTER_RANGE = ((0.3, 0.7), (0.3, 0.7))
GOAL_SCENE_RANGES = (
    ((0.3, 0.4), (0.35, 0.65)),
    ((0.45, 0.55), (0.35, 0.65)),
    ((0.6, 0.7), (0.35, 0.65))
)
SPATIAL_RANGES = (
    ((0.3, 0.4), (0.3, 0.7)),
    ((0.6, 0.7), (0.3, 0.7)),
    ((0.45, 0.55), (0.3, 0.7))
)


def _in_workspace(xy):
    return all(Config.WORKSPACE_LOW <= v <= Config.WORKSPACE_HIGH for v in xy)


@attr.s(frozen=True)
class SubGoal:
    """Bring the object in `target_slot` into `region` and let go of it.

    `kind` only selects how the scripted expert gets there (carry or push);
    the predicate is the same.
    """
    kind = attr.ib(validator=attr.validators.in_(SUBGOAL_KINDS))
    target_slot = attr.ib(converter=int)
    region = attr.ib(converter=tuple)

    @region.validator
    def _check_region(self, attribute, value):
        assert _in_workspace(value), value


@attr.s(frozen=True)
class InitDist:
    """Initial-state distribution: object classes and per-slot position ranges."""
    object_classes = attr.ib(converter=tuple)
    position_ranges = attr.ib(converter=tuple)
    effector_range = attr.ib(converter=tuple, default=((0.4, 0.6), (0.4, 0.6)))
    seed_offset = attr.ib(converter=int, default=0)

    @property
    def nr_objects(self):
        return len(self.object_classes)


@attr.s(frozen=True)
class TaskSpec:
    task_id = attr.ib(converter=int)
    suite_kind = attr.ib(converter=SuiteKind)
    language = attr.ib(converter=str)
    init_dist = attr.ib()
    goal = attr.ib(converter=tuple)
    horizon = attr.ib(converter=int)

    @horizon.validator
    def _check_horizon(self, attribute, value):
        assert value >= 1, value

    @goal.validator
    def _check_goal(self, attribute, value):
        assert len(value) >= 1
        if self.suite_kind == SuiteKind.LONG:
            assert len(value) == 2, value

    @property
    def language_id(self):
        return self.task_id


def _describe(subgoal, object_class, qualifier=''):
    verb = 'put' if subgoal.kind == 'place' else 'push'
    region = REGION_NAMES[REGIONS.index(subgoal.region)]
    return f"{verb} the {qualifier}{OBJECT_NAMES[object_class]} " \
        f"in the {region} region"


def _object_suite(n_tasks, rng):
    region = REGIONS[3]
    targets = rng.permutation(Config.NR_OBJECT_CLASSES)[:n_tasks]
    tasks = []
    for task_id, target in enumerate(targets):
        others = [c for c in range(Config.NR_OBJECT_CLASSES) if c != target]
        classes = list(rng.choice(others, size=Config.NR_OBJECT_SLOTS - 1, replace=False))
        slot = int(rng.integers(Config.NR_OBJECT_SLOTS))
        classes.insert(slot, target)
        subgoal = SubGoal('place', slot, region)
        tasks.append(TaskSpec(
            task_id=task_id,
            suite_kind=SuiteKind.OBJECT,
            language=_describe(subgoal, int(target)),
            init_dist=InitDist(
                object_classes=tuple(int(c) for c in classes),
                position_ranges=(CENTER_RANGE,) * Config.NR_OBJECT_SLOTS,
                seed_offset=task_id
            ),
            goal=(subgoal,),
            horizon=Config.SHORT_HORIZON
        ))
    return tasks


def _goal_pool(rng):
    """Every (slot, region) pair of the fixed goal scene, each with a kind."""
    pool = [
        SubGoal(SUBGOAL_KINDS[int(rng.integers(len(SUBGOAL_KINDS)))], slot, region)
        for slot in range(Config.NR_OBJECT_SLOTS)
        for region in REGIONS
    ]
    return [pool[i] for i in rng.permutation(len(pool))]


GOAL_SCENE_CLASSES = (0, 1, 2)


def _goal_scene(seed_offset):
    return InitDist(
        object_classes=GOAL_SCENE_CLASSES,
        position_ranges=GOAL_SCENE_RANGES,
        seed_offset=seed_offset
    )


def _goal_suite(n_tasks, rng):
    pool = _goal_pool(rng)
    return [
        TaskSpec(
            task_id=task_id,
            suite_kind=SuiteKind.GOAL,
            language=_describe(subgoal, GOAL_SCENE_CLASSES[subgoal.target_slot]),
            init_dist=_goal_scene(task_id),
            goal=(subgoal,),
            horizon=Config.SHORT_HORIZON
        )
        for task_id, subgoal in enumerate(pool[:n_tasks])
    ]


def _spatial_suite(n_tasks, rng):
    candidates = [(slot, region) for slot in (0, 1) for region in REGIONS]
    order = rng.permutation(len(candidates))[:n_tasks]
    tasks = []
    for task_id, index in enumerate(order):
        slot, region = candidates[index]
        twin, distractor = rng.choice(Config.NR_OBJECT_CLASSES, size=2, replace=False)
        subgoal = SubGoal('place', slot, region)
        tasks.append(TaskSpec(
            task_id=task_id,
            suite_kind=SuiteKind.SPATIAL,
            language=_describe(subgoal, int(twin), 'left ' if slot == 0 else 'right '),
            init_dist=InitDist(
                object_classes=(int(twin), int(twin), int(distractor)),
                position_ranges=SPATIAL_RANGES,
                seed_offset=task_id
            ),
            goal=(subgoal,),
            horizon=Config.SHORT_HORIZON
        ))
    return tasks


def _long_suite(n_tasks, rng):
    pool = _goal_pool(rng)
    pairs = [
        (first, second) for first, second in permutations(pool, 2)
        if first.target_slot != second.target_slot and first.region != second.region
    ]
    order = rng.permutation(len(pairs))[:n_tasks]
    tasks = []
    for task_id, index in enumerate(order):
        first, second = pairs[index]
        language = _describe(first, GOAL_SCENE_CLASSES[first.target_slot]) \
            + " and then " + _describe(second, GOAL_SCENE_CLASSES[second.target_slot])
        tasks.append(TaskSpec(
            task_id=task_id,
            suite_kind=SuiteKind.LONG,
            language=language,
            init_dist=_goal_scene(task_id),
            goal=(first, second),
            horizon=Config.LONG_HORIZON
        ))
    return tasks


SUITE_BUILDERS = {
    SuiteKind.OBJECT: (_object_suite, Config.NR_OBJECT_CLASSES),
    SuiteKind.GOAL: (_goal_suite, Config.NR_OBJECT_SLOTS * len(REGIONS)),
    SuiteKind.SPATIAL: (_spatial_suite, 2 * len(REGIONS)),
    SuiteKind.LONG: (_long_suite, 64),
}


def max_tasks(kind):
    return SUITE_BUILDERS[SuiteKind(kind)][1]


def make_suite(kind, n_tasks, seed):
    """Return `n_tasks` distinct tasks of the given suite kind."""
    try:
        kind = SuiteKind(kind)
    except ValueError:
        raise ConfigError(
            f"unknown suite kind '{kind}' "
            f"(expected one of {[k.value for k in SuiteKind]})"
        )
    builder, max_tasks = SUITE_BUILDERS[kind]
    if not 1 <= n_tasks <= max_tasks:
        raise ConfigError(
            f"suite {kind.value} supports 1 to {max_tasks} tasks, got {n_tasks}"
        )

    # Kind-specific stream, so suites with the same seed differ.
    rng = np.random.default_rng([seed, list(SuiteKind).index(kind)])
    tasks = builder(n_tasks, rng)
    logger.debug("Built %s suite with %s tasks.", kind.value, len(tasks))
    return tasks
