"""The hierarchical skill policy: perception, skill inference, action execution.

    window -> tokens s_e -> [codebook prefix] -> skill transformer -> z
           -> [action transformer] -> center-step feature -> GMM head
"""
import logging

import attr
import numpy as np

from ..core import ops
from ..core.config import Config
from ..core.errors import ContractError
from ..core.nn import Module
from .codebook import SkillCodebook, select_skills, synthesize
from .gmm import GMMHead, gmm_nll, sample_action
from .perception import MODALITIES, EncoderBank, center_index
from .transformer import TemporalTransformer

logger = logging.getLogger(__name__)

ACTION_DIM = 3

ABLATION_COMPONENTS = ('codebook', 'adapters', 'hierarchy')


def _positive(instance, attribute, value):
    if not isinstance(value, int) or value < 1:
        raise ValueError(f"{attribute.name} must be a positive integer, got {value!r}")


@attr.s(frozen=True)
class ModelConfig:
    d = attr.ib(default=64, validator=_positive)
    heads = attr.ib(default=4, validator=_positive)
    blocks = attr.ib(default=2, validator=_positive)
    rows_per_task = attr.ib(default=10, validator=_positive)
    top_c = attr.ib(default=10, validator=_positive)
    adapter_rank = attr.ib(default=8, validator=_positive)
    mixtures = attr.ib(default=5, validator=_positive)
    window = attr.ib(default=10, validator=_positive)
    use_codebook = attr.ib(default=True, validator=attr.validators.instance_of(bool))
    use_adapters = attr.ib(default=True, validator=attr.validators.instance_of(bool))
    use_hierarchy = attr.ib(default=True, validator=attr.validators.instance_of(bool))

    @top_c.validator
    def _check_top_c(self, attribute, value):
        if value > self.rows_per_task:
            raise ValueError(
                f"top_c ({value}) exceeds rows_per_task ({self.rows_per_task})"
            )

    @heads.validator
    def _check_heads(self, attribute, value):
        if self.d % value != 0:
            raise ValueError(f"d ({self.d}) is not divisible by heads ({value})")

    def ablate(self, components):
        """Copy with the named components disabled."""
        unknown = set(components) - set(ABLATION_COMPONENTS)
        assert not unknown, unknown
        return attr.evolve(self, **{f'use_{c}': False for c in components})


def normalize_actions(actions):
    """Displacements in units of the step limit; the gripper command is kept."""
    actions = np.array(actions, dtype=np.float64)
    actions[..., :2] /= Config.MAX_STEP
    return actions


def denormalize_actions(actions):
    actions = np.array(actions, dtype=np.float64)
    actions[..., :2] *= Config.MAX_STEP
    return actions


class SkillPolicy(Module):
    def __init__(self, config, n_languages, seed, adapter_mode='per_task'):
        rng = np.random.default_rng(seed)
        self.config = config
        self.adapter_mode = adapter_mode
        self.perception = EncoderBank(config.d, config.window, n_languages, rng)
        self.codebook = None
        if config.use_codebook:
            self.codebook = SkillCodebook(config.d, config.rows_per_task)
        rank = config.adapter_rank if config.use_adapters else None
        self.skill_transformer = TemporalTransformer(
            config.d, config.heads, config.blocks, rng, rank, adapter_mode
        )
        self.action_transformer = None
        if config.use_hierarchy:
            self.action_transformer = TemporalTransformer(
                config.d, config.heads, config.blocks, rng, rank, adapter_mode
            )
        self.head = GMMHead(config.d, config.mixtures, ACTION_DIM, rng)
        self.tasks = []

    @property
    def adapters(self):
        adapters = list(self.skill_transformer.adapters)
        if self.action_transformer is not None:
            adapters += self.action_transformer.adapters
        return adapters

    def begin_task(self, task_id, rng):
        """Per-task hooks: codebook growth, adapter registration, language rows."""
        if task_id in self.tasks:
            raise ContractError(f"policy already started task {task_id}")
        if self.codebook is not None:
            self.codebook.expand_for_task(task_id, rng)
        for adapter in self.adapters:
            adapter.add_task(task_id, rng)
        self.perception.train_languages([task_id])
        self.tasks.append(task_id)
        logger.debug("Policy hooks ran for task %s.", task_id)

    def begin_joint_training(self, task_ids, rng):
        """Allocate every task at once and keep everything trainable."""
        for task_id in task_ids:
            self.begin_task(task_id, rng)
        if self.codebook is not None:
            self.codebook.thaw()
        self.perception.train_languages(task_ids)

    def skill_prefix(self, state_embedding):
        if self.codebook is None:
            return None, None
        selection = select_skills(state_embedding, self.codebook, self.config.top_c)
        return selection, synthesize(selection, self.codebook)

    def decode(self, z, task_id, prefix=None):
        """Center-step feature (B, d) of the latent skill sequence z."""
        B, L, d = z.shape
        W = self.config.window
        if L != W * MODALITIES:
            raise ContractError(f"expected {W * MODALITIES} latent tokens, got {L}")
        if self.action_transformer is not None:
            z = self.action_transformer(z, prefix=prefix, task_id=task_id)
        center = ops.getitem(
            ops.reshape(z, (B, W, MODALITIES, d)),
            (slice(None), center_index(W))
        )
        return ops.mean(center, axis=1)

    def forward(self, batch, task_id):
        """Return (GMMParams, SkillSelection or None) for a WindowBatch."""
        state_embedding = self.perception.encode_window(batch)
        selection, prefix = self.skill_prefix(state_embedding)
        z = self.skill_transformer(state_embedding, prefix=prefix, task_id=task_id)
        feature = self.decode(z, task_id, prefix=prefix)
        return self.head(feature), selection

    def bc_loss(self, batch, actions, task_id):
        """Mean negative log-likelihood of the (raw) expert actions."""
        params, _ = self.forward(batch, task_id)
        return ops.mean(gmm_nll(params, normalize_actions(actions)))

    def act(self, batch, task_id, rng, deterministic=False):
        """Sample actions (B, ACTION_DIM); also returns the selected skill rows."""
        params, selection = self.forward(batch, task_id)
        actions = denormalize_actions(sample_action(params, rng, deterministic))
        indices = None if selection is None else selection.indices
        return actions, indices

    def structure(self):
        """Metadata needed to rebuild the parameter layout of this policy."""
        structure = {'tasks': list(self.tasks)}
        if self.codebook is not None:
            structure['codebook_frozen_upto'] = self.codebook.frozen_upto
            structure['codebook_subsets'] = self.codebook.subset_bounds
        return structure

    def rebuild(self, structure):
        """Replay the task hooks of `structure` on a freshly created policy."""
        assert not self.tasks
        rng = np.random.default_rng(0)
        for task_id in structure['tasks']:
            self.begin_task(task_id, rng)
        if self.codebook is not None:
            self.codebook.frozen_upto = structure['codebook_frozen_upto']
