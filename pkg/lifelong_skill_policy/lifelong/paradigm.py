"""Lifelong-learning paradigms and training schedules."""
from enum import Enum

import attr


class ParadigmKind(Enum):
    SEQUENTIAL = 'Sequential'
    ER = 'ER'
    PACKNET = 'PackNet'
    MULTITASK = 'Multitask'


# Paradigms whose batches mix tasks need task-shared adapter factors.
DEFAULT_ADAPTER_MODE = {
    ParadigmKind.SEQUENTIAL: 'shared',
    ParadigmKind.ER: 'shared',
    ParadigmKind.PACKNET: 'per_task',
    ParadigmKind.MULTITASK: 'shared',
}


def _non_negative_int(instance, attribute, value):
    if not isinstance(value, int) or value < 0:
        raise ValueError(f"{attribute.name} must be a non-negative integer, got {value!r}")


def _positive_int(instance, attribute, value):
    if not isinstance(value, int) or value < 1:
        raise ValueError(f"{attribute.name} must be a positive integer, got {value!r}")


def _positive_number(instance, attribute, value):
    if not isinstance(value, (int, float)) or value <= 0:
        raise ValueError(f"{attribute.name} must be positive, got {value!r}")


@attr.s(frozen=True)
class ParadigmConfig:
    kind = attr.ib(converter=ParadigmKind)
    er_capacity = attr.ib(default=100, validator=_non_negative_int)
    packnet_keep_ratio = attr.ib(default=0.5)
    packnet_finetune_epochs = attr.ib(default=5, validator=_non_negative_int)
    adapter_mode = attr.ib(default=None)

    @packnet_keep_ratio.validator
    def _check_keep_ratio(self, attribute, value):
        if not isinstance(value, (int, float)) or not 0 < value < 1:
            raise ValueError(f"packnet_keep_ratio must lie in (0, 1), got {value!r}")

    @adapter_mode.validator
    def _check_adapter_mode(self, attribute, value):
        if value not in (None, 'shared', 'per_task'):
            raise ValueError(f"adapter_mode must be 'shared' or 'per_task', got {value!r}")
        mixes_tasks = self.kind in (ParadigmKind.ER, ParadigmKind.MULTITASK)
        if value == 'per_task' and mixes_tasks:
            raise ValueError(f"{self.kind.value} trains on mixed-task batches; "
                             "adapter_mode must be 'shared'")

    @property
    def name(self):
        return self.kind.value

    @property
    def resolved_adapter_mode(self):
        return self.adapter_mode or DEFAULT_ADAPTER_MODE[self.kind]


@attr.s(frozen=True)
class TrainConfig:
    epochs = attr.ib(default=50, validator=_positive_int)
    lr = attr.ib(default=1e-4, validator=_positive_number)
    weight_decay = attr.ib(default=1e-4)
    batch_size = attr.ib(default=32, validator=_positive_int)
    eval_every = attr.ib(default=5, validator=_positive_int)
    eval_episodes = attr.ib(default=20, validator=_positive_int)
    demos_per_task = attr.ib(default=10, validator=_positive_int)

    @weight_decay.validator
    def _check_weight_decay(self, attribute, value):
        if not isinstance(value, (int, float)) or value < 0:
            raise ValueError(f"weight_decay must be non-negative, got {value!r}")

    @eval_every.validator
    def _check_eval_every(self, attribute, value):
        if self.epochs % value != 0:
            raise ValueError(
                f"epochs ({self.epochs}) must be a multiple of eval_every ({value})"
            )

    @property
    def eval_points(self):
        """Epochs at which success rates are recorded: 0, eval_every, ..., epochs."""
        return tuple(range(0, self.epochs + 1, self.eval_every))
