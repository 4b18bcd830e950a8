"""Lifelong training: tasks are learned one after the other.

One `LifelongRun` trains a policy on a task sequence under one paradigm,
evaluating every task seen so far at fixed epochs, and writes a checkpoint
after every task so an interrupted run can be resumed.
"""
import logging
import os

import numpy as np

from ..core.checkpoint import has_checkpoint, load_checkpoint, save_checkpoint
from ..core.config import Config
from ..core.errors import ContractError
from ..core.optim import AdamW, optimizer_step
from ..core.tensor import Graph
from ..envs.demos import collect_demos
from ..metrics.record import MultitaskRecord, SuccessRecord
from ..metrics.usage import SkillUsageLog
from ..policy.model import SkillPolicy
from ..policy.perception import WindowBatch
from .dataset import DemoDataset
from .packnet import PackNetState
from .paradigm import ParadigmKind
from .replay import ReplayBuffer, er_update
from .rollout import PolicyAgent, evaluate
from .validation import IsolationAudit, validate_expansion, validate_isolation

logger = logging.getLogger(__name__)

CHECKPOINT_PREFIX = 'task-'
STREAMS = ('hooks', 'batches', 'replay', 'buffer')


def checkpoint_dir(directory, index):
    return os.path.join(directory, f'{CHECKPOINT_PREFIX}{index:02d}')


def latest_checkpoint(directory):
    """Index and path of the last complete per-task checkpoint, or None."""
    if directory is None or not os.path.isdir(directory):
        return None
    indices = sorted(
        int(name[len(CHECKPOINT_PREFIX):]) for name in os.listdir(directory)
        if name.startswith(CHECKPOINT_PREFIX)
        and has_checkpoint(os.path.join(directory, name))
    )
    if not indices:
        return None
    return indices[-1], checkpoint_dir(directory, indices[-1])


def should_stop_early(curve):
    """Stop once success declined twice in a row after first reaching the target."""
    reached = [i for i, v in enumerate(curve) if v >= Config.EARLY_STOP_SUCCESS]
    if not reached:
        return False
    after = curve[reached[0]:]
    return len(after) >= 3 and after[-3] > after[-2] > after[-1]


def _rng_state(rng):
    return rng.bit_generator.state


class LifelongRun:
    def __init__(self, tasks, paradigm, model_config, train_config, seed,
                 checkpoints=None):
        self.tasks = list(tasks)
        self.paradigm = paradigm
        self.model_config = model_config
        self.train_config = train_config
        self.seed = seed
        self.checkpoints = checkpoints

        self.policy = SkillPolicy(
            model_config, len(self.tasks), seed, paradigm.resolved_adapter_mode
        )
        streams = np.random.SeedSequence([seed, len(self.tasks)]).spawn(len(STREAMS))
        self.rngs = {
            name: np.random.default_rng(s) for name, s in zip(STREAMS, streams)
        }
        task_ids = [t.task_id for t in self.tasks]
        eval_points = train_config.eval_points
        self.record = SuccessRecord.empty(task_ids, eval_points)
        self.multitask = None
        if paradigm.kind == ParadigmKind.MULTITASK:
            self.multitask = MultitaskRecord.empty(task_ids, eval_points)
        self.usage = SkillUsageLog(model_config.rows_per_task)

        self.buffer = None
        if paradigm.kind == ParadigmKind.ER:
            self.buffer = ReplayBuffer(paradigm.er_capacity, self.rngs['buffer'])
        self.packnet = None
        if paradigm.kind == ParadigmKind.PACKNET:
            self.packnet = PackNetState(self.policy, paradigm.packnet_keep_ratio)
        self.audit = IsolationAudit()
        self.demos = {}
        self.finished = 0

    @property
    def complete(self):
        if self.multitask is not None:
            return self.finished == 1
        return self.finished == len(self.tasks)

    def task_demos(self, task):
        if task.task_id not in self.demos:
            self.demos[task.task_id] = collect_demos(
                task, self.train_config.demos_per_task, self.seed
            )
        return self.demos[task.task_id]

    def run(self):
        """Train every remaining task; returns (record, multitask record, usage)."""
        if self.multitask is not None:
            if not self.complete:
                self.train_jointly()
                self.finished = 1
                self.save()
            return self.record, self.multitask, self.usage

        while not self.complete:
            task = self.tasks[self.finished]
            self.train_task(task, self.task_demos(task))
            self.finished += 1
            self.save()
        return self.record, None, self.usage

    # Evaluation

    def evaluate_task(self, task, stage):
        """Success rate on `task` with the parameters visible to it at `stage`."""
        agent = PolicyAgent(self.policy, task.task_id)
        n = self.train_config.eval_episodes
        j = self.tasks.index(task)
        if self.packnet is not None and j < stage:
            with self.packnet.masked_forward(task.task_id):
                return evaluate(agent, task, n, self.seed)
        return evaluate(agent, task, n, self.seed)

    def evaluate_seen(self, k, e):
        """Fill c[k, j, e] for every task j <= k; returns the skill counts per task."""
        counts = {}
        for j, task in enumerate(self.tasks[:k + 1]):
            outcome = self.evaluate_task(task, k)
            self.record.set(k, j, e, outcome.success_rate)
            counts[task.task_id] = outcome.skill_counts
        logger.info(
            "Task %s, epoch %s: success %s.", self.tasks[k].task_id,
            self.train_config.eval_points[e], self.record.c[k, :k + 1, e]
        )
        return counts

    # Training

    def _optimizer(self):
        return AdamW(
            self.policy.named_parameters(),
            lr=self.train_config.lr,
            weight_decay=self.train_config.weight_decay
        )

    def _train_epoch(self, optimizer, dataset, task_id, replay=None):
        losses = []
        for windows, actions in dataset.batches(
                self.train_config.batch_size, self.rngs['batches']):
            if replay is not None:
                replay_windows, replay_actions = replay.sample(
                    actions.shape[0], self.rngs['replay']
                )
                windows = WindowBatch.concat([windows, replay_windows])
                actions = np.concatenate([actions, replay_actions])
            with Graph() as graph:
                loss = self.policy.bc_loss(windows, actions, task_id)
                graph.backward(loss)
            optimizer_step(optimizer)
            losses.append(loss.item())
            logger.debug("Task %s: batch loss %s.", task_id, losses[-1])
        return float(np.mean(losses))

    def train_task(self, task, demos):
        """One lifelong step on `task`; returns its success curve c[k, k, :]."""
        k = self.finished
        if k >= len(self.tasks) or self.tasks[k] != task:
            raise ContractError(
                f"task {task.task_id} trained out of order "
                f"(expected {self.tasks[k].task_id if k < len(self.tasks) else None})"
            )
        config = self.train_config
        task_id = task.task_id

        self.policy.begin_task(task_id, self.rngs['hooks'])
        validate_expansion(self.policy, task_id)
        if self.packnet is not None:
            self.packnet.begin_task(task_id)
        if self.policy.codebook is not None:
            self.usage.subset_tasks = self.policy.codebook.task_ids

        dataset = DemoDataset.from_demos(demos, self.model_config.window)
        replay = None
        if self.buffer is not None and len(self.buffer):
            replay = DemoDataset.from_demos(self.buffer.demos(), self.model_config.window)
        optimizer = self._optimizer()

        counts = [self.evaluate_seen(k, 0)]
        best_e, best_state = 0, self.policy.state_dict()
        stopped_at = None
        for e, epoch in enumerate(config.eval_points[1:], start=1):
            for _ in range(config.eval_every):
                loss = self._train_epoch(optimizer, dataset, task_id, replay)
            logger.info("Task %s, epoch %s: loss %s.", task_id, epoch, loss)
            counts.append(self.evaluate_seen(k, e))
            if self.record.c[k, k, e] > self.record.c[k, k, best_e]:
                best_e, best_state = e, self.policy.state_dict()
            if should_stop_early(list(self.record.c[k, k, :e + 1])):
                stopped_at = e
                logger.warning(
                    "Task %s: early stop at epoch %s (best %s at epoch %s).",
                    task_id, epoch, self.record.c[k, k, best_e], config.eval_points[best_e]
                )
                break

        if stopped_at is not None:
            # The remaining eval points report the restored best parameters.
            self.record.c[k, :k + 1, stopped_at + 1:] = \
                self.record.c[k, :k + 1, best_e:best_e + 1]
        self.policy.load_state_dict(best_state)
        for task_j, task_counts in counts[best_e].items():
            self.usage.add(k, task_j, task_counts)

        if self.packnet is not None:
            self.packnet.prune_and_freeze(task_id)
            self.finetune(task_id, dataset)
            self.packnet.finish_task(task_id)
        if self.buffer is not None:
            er_update(self.buffer, task_id, demos)

        self.audit.record(task_id, self.policy, self.packnet)
        validate_isolation(self.audit, self.policy, self.packnet)
        return self.record.c[k, k].copy()

    def finetune(self, task_id, dataset):
        """Train only the elements PackNet just assigned to `task_id`."""
        epochs = self.paradigm.packnet_finetune_epochs
        if epochs == 0:
            return
        self.packnet.train_owned(task_id)
        optimizer = self._optimizer()
        for _ in range(epochs):
            loss = self._train_epoch(optimizer, dataset, task_id)
        logger.info("Task %s: PackNet fine-tune loss %s.", task_id, loss)

    def train_jointly(self):
        """Multitask upper bound: one policy trained on the union of all demos."""
        config = self.train_config
        task_ids = [t.task_id for t in self.tasks]
        self.policy.begin_joint_training(task_ids, self.rngs['hooks'])
        for task_id in task_ids:
            validate_expansion(self.policy, task_id)
        if self.policy.codebook is not None:
            self.usage.subset_tasks = self.policy.codebook.task_ids
        demos = [d for task in self.tasks for d in self.task_demos(task)]
        dataset = DemoDataset.from_demos(demos, self.model_config.window)
        optimizer = self._optimizer()
        # Adapter factors are shared, so any registered id selects them.
        task_id = task_ids[0]

        def evaluate_all(e):
            counts = {}
            for j, task in enumerate(self.tasks):
                outcome = evaluate(
                    PolicyAgent(self.policy, task.task_id), task,
                    config.eval_episodes, self.seed
                )
                self.multitask.curves[j, e] = outcome.success_rate
                counts[task.task_id] = outcome.skill_counts
            logger.info(
                "Multitask, epoch %s: success %s.",
                config.eval_points[e], self.multitask.curves[:, e]
            )
            return counts

        counts = [evaluate_all(0)]
        best_e, best_state = 0, self.policy.state_dict()
        for e, epoch in enumerate(config.eval_points[1:], start=1):
            for _ in range(config.eval_every):
                loss = self._train_epoch(optimizer, dataset, task_id)
            logger.info("Multitask, epoch %s: loss %s.", epoch, loss)
            counts.append(evaluate_all(e))
            if self.multitask.curves[:, e].mean() > self.multitask.curves[:, best_e].mean():
                best_e, best_state = e, self.policy.state_dict()
        self.policy.load_state_dict(best_state)
        for task_j, task_counts in counts[best_e].items():
            self.usage.add(0, task_j, task_counts)

    # Checkpoints

    def save(self):
        if self.checkpoints is None:
            return
        arrays = self.policy.state_dict()
        flags = {
            name: {'frozen': p.frozen, 'trainable': p.trainable}
            for name, p in self.policy.named_parameters()
        }
        metadata = {
            'finished': self.finished,
            'structure': self.policy.structure(),
            'rngs': {name: _rng_state(rng) for name, rng in self.rngs.items()},
            'record': self.record.to_dict(),
            'multitask': None if self.multitask is None else self.multitask.to_dict(),
            'usage': self.usage.to_dict()
        }
        if self.buffer is not None:
            metadata['buffer'] = self.buffer.state()
        if self.packnet is not None:
            metadata['packnet'] = self.packnet.state()
            arrays.update(self.packnet.arrays())
        directory = checkpoint_dir(self.checkpoints, self.finished - 1)
        save_checkpoint(directory, arrays, flags=flags, metadata=metadata)
        logger.info("Checkpoint written to '%s'.", directory)

    def restore(self, directory):
        """Continue from the checkpoint in `directory` (on a fresh run)."""
        assert self.finished == 0 and not self.policy.tasks
        arrays, _, metadata = load_checkpoint(directory)
        self.policy.rebuild(metadata['structure'])
        self.policy.load_state_dict({
            name: array for name, array in arrays.items()
            if not name.startswith('packnet.')
        })
        for name, state in metadata['rngs'].items():
            self.rngs[name].bit_generator.state = state
        self.record = SuccessRecord.from_dict(metadata['record'])
        if metadata['multitask'] is not None:
            self.multitask = MultitaskRecord.from_dict(metadata['multitask'])
        self.usage = SkillUsageLog.from_dict(metadata['usage'])
        self.finished = metadata['finished']

        finished_tasks = self.tasks[:self.finished]
        if self.buffer is not None:
            demos = {t.task_id: self.task_demos(t) for t in finished_tasks}
            self.buffer.restore(metadata['buffer'], demos)
        if self.packnet is not None:
            self.packnet.restore(metadata['packnet'], arrays)
            self.packnet.finish_task(finished_tasks[-1].task_id)
        if self.multitask is None:
            for task in finished_tasks:
                self.audit.record(task.task_id, self.policy, self.packnet)
        logger.info("Resumed after %s finished steps from '%s'.", self.finished, directory)

    def resume(self):
        """Restore from the latest checkpoint, if any; returns whether it did."""
        latest = latest_checkpoint(self.checkpoints)
        if latest is None:
            return False
        self.restore(latest[1])
        return True
