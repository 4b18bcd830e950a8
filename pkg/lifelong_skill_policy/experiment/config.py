"""Experiment configuration: a versioned JSON document loaded into attrs records.

    {
        "version": 1,
        "name": "goal-suite",
        "suite": {"kind": "Goal", "n_tasks": 5, "seed": 0},
        "paradigms": [{"kind": "ER", "er_capacity": 100}, {"kind": "PackNet"}],
        "model": {"preset": "full", "d": 64},
        "train": {"epochs": 50, "eval_every": 5},
        "seeds": [0, 1, 2]
    }

Every field is optional; missing fields take the desk-scale defaults.
"""
import hashlib
import json
import logging
import os

import attr

from ..core.errors import ConfigError
from ..envs.task import SuiteKind, max_tasks
from ..lifelong.paradigm import ParadigmConfig, ParadigmKind, TrainConfig
from ..policy.model import ABLATION_COMPONENTS, ModelConfig

logger = logging.getLogger(__name__)

CONFIG_VERSION = 1

OUTPUT_ROOT_VARIABLE = 'LSP_OUTPUT_ROOT'
DEFAULT_OUTPUT_ROOT = './runs'

"""Components each named ablation preset disables."""
ABLATION_PRESETS = {
    'flat': ('codebook', 'adapters', 'hierarchy'),
    'with-adapters': ('codebook', 'hierarchy'),
    'with-codebook': ('hierarchy',),
    'with-hierarchy': ('codebook', 'adapters'),
    'full': (),
}

PAPER_SCALE = {
    'suite': {'n_tasks': 10},
    'paradigm': {'er_capacity': 1000},
    'model': {'d': 384, 'heads': 6, 'rows_per_task': 10, 'top_c': 10, 'adapter_rank': 64},
    'train': {'demos_per_task': 50},
}


def output_root():
    return os.environ.get(OUTPUT_ROOT_VARIABLE, DEFAULT_OUTPUT_ROOT)


@attr.s(frozen=True)
class SuiteConfig:
    kind = attr.ib(default=SuiteKind.GOAL, converter=SuiteKind)
    n_tasks = attr.ib(default=5)
    seed = attr.ib(default=0)

    @n_tasks.validator
    def _check_n_tasks(self, attribute, value):
        limit = max_tasks(self.kind)
        if not isinstance(value, int) or not 1 <= value <= limit:
            raise ValueError(
                f"n_tasks must be an integer in [1, {limit}] for the "
                f"{self.kind.value} suite, got {value!r}"
            )

    @seed.validator
    def _check_seed(self, attribute, value):
        if not isinstance(value, int) or value < 0:
            raise ValueError(f"seed must be a non-negative integer, got {value!r}")


def _seeds(instance, attribute, value):
    if not value or not all(isinstance(s, int) and s >= 0 for s in value):
        raise ValueError(f"seeds must be a non-empty list of non-negative integers, "
                         f"got {list(value)!r}")
    if len(set(value)) != len(value):
        raise ValueError(f"seeds must be distinct, got {list(value)!r}")


@attr.s(frozen=True)
class ExperimentConfig:
    name = attr.ib(default='experiment')
    suite = attr.ib(factory=SuiteConfig)
    paradigms = attr.ib(
        factory=lambda: (ParadigmConfig(ParadigmKind.SEQUENTIAL),), converter=tuple
    )
    model = attr.ib(factory=ModelConfig)
    train = attr.ib(factory=TrainConfig)
    seeds = attr.ib(default=(0, 1, 2), converter=tuple, validator=_seeds)
    preset = attr.ib(default='full')

    @preset.validator
    def _check_preset(self, attribute, value):
        if value not in ABLATION_PRESETS:
            raise ValueError(
                f"unknown ablation preset {value!r} "
                f"(expected one of {sorted(ABLATION_PRESETS)})"
            )

    @paradigms.validator
    def _check_paradigms(self, attribute, value):
        names = [p.name for p in value]
        if not names:
            raise ValueError("at least one paradigm is needed")
        if len(set(names)) != len(names):
            raise ValueError(f"paradigms must be distinct, got {names}")

    def runs(self):
        """(paradigm, seed) pairs in execution order."""
        return [(p, seed) for p in self.paradigms for seed in self.seeds]

    def to_dict(self):
        def serialize(instance, field, value):
            if isinstance(value, (SuiteKind, ParadigmKind)):
                return value.value
            return value
        d = attr.asdict(self, value_serializer=serialize, retain_collection_types=False)
        d['seeds'] = list(self.seeds)
        return {'version': CONFIG_VERSION, **d}

    def digest(self):
        """Hash of the canonical JSON form; identifies the experiment."""
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(text.encode('utf-8')).hexdigest()


def _section(cls, values, section, diagnostics):
    """Build `cls` from `values`; record every problem in `diagnostics`."""
    if values is None:
        values = {}
    if not isinstance(values, dict):
        diagnostics.append(f"{section}: expected an object, got {type(values).__name__}")
        return None
    known = {a.name for a in attr.fields(cls)}
    unknown = sorted(set(values) - known)
    for key in unknown:
        diagnostics.append(f"{section}.{key}: unknown field")
    try:
        return cls(**{k: v for k, v in values.items() if k in known})
    except (ValueError, TypeError) as e:
        diagnostics.append(f"{section}: {e}")
        return None


def _model_section(values, diagnostics):
    values = dict(values or {})
    preset = values.pop('preset', 'full')
    if preset not in ABLATION_PRESETS:
        diagnostics.append(
            f"model.preset: unknown ablation preset {preset!r} "
            f"(expected one of {sorted(ABLATION_PRESETS)})"
        )
        return None, preset
    for component in ABLATION_PRESETS[preset]:
        values.setdefault(f'use_{component}', False)
    return _section(ModelConfig, values, 'model', diagnostics), preset


def _object(document, key, diagnostics):
    values = document.get(key) or {}
    if not isinstance(values, dict):
        diagnostics.append(f"{key}: expected an object, got {type(values).__name__}")
        return {}
    return dict(values)


def parse_config(document, paper_scale=False):
    """ExperimentConfig of a parsed JSON document; raises ConfigError."""
    if not isinstance(document, dict):
        raise ConfigError("the configuration must be a JSON object")
    diagnostics = []
    version = document.get('version')
    if version != CONFIG_VERSION:
        diagnostics.append(f"version: expected {CONFIG_VERSION}, got {version!r}")
    known = {'version', 'name', 'suite', 'paradigms', 'model', 'train', 'seeds', 'preset'}
    for key in sorted(set(document) - known):
        diagnostics.append(f"{key}: unknown field")

    suite_values = _object(document, 'suite', diagnostics)
    paradigm_values = document.get('paradigms') or [{'kind': ParadigmKind.SEQUENTIAL.value}]
    if not isinstance(paradigm_values, list):
        diagnostics.append("paradigms: expected a list")
        paradigm_values = []
    model_values = _object(document, 'model', diagnostics)
    train_values = _object(document, 'train', diagnostics)
    if 'preset' in document:
        model_values.setdefault('preset', document['preset'])
    if paper_scale:
        for key, value in PAPER_SCALE['suite'].items():
            suite_values.setdefault(key, value)
        kind = suite_values.get('kind', SuiteKind.GOAL.value)
        try:
            suite_values['n_tasks'] = min(suite_values['n_tasks'], max_tasks(kind))
        except (KeyError, TypeError, ValueError):
            pass
        for key, value in PAPER_SCALE['model'].items():
            model_values.setdefault(key, value)
        for key, value in PAPER_SCALE['train'].items():
            train_values.setdefault(key, value)
        paradigm_values = [
            {**PAPER_SCALE['paradigm'], **p} if isinstance(p, dict) else p
            for p in paradigm_values
        ]

    suite = _section(SuiteConfig, suite_values, 'suite', diagnostics)
    paradigms = [
        _section(ParadigmConfig, p, f'paradigms[{i}]', diagnostics)
        for i, p in enumerate(paradigm_values)
    ]
    model, preset = _model_section(model_values, diagnostics)
    train = _section(TrainConfig, train_values, 'train', diagnostics)

    if diagnostics:
        raise ConfigError(diagnostics)
    try:
        return ExperimentConfig(
            name=document.get('name', 'experiment'),
            suite=suite,
            paradigms=paradigms,
            model=model,
            train=train,
            seeds=document.get('seeds', (0, 1, 2)),
            preset=preset
        )
    except (ValueError, TypeError) as e:
        raise ConfigError([str(e)])


def load_config(filename, paper_scale=False):
    """Read and validate a configuration file; raises ConfigError."""
    try:
        with open(filename, 'r') as fd:
            document = json.load(fd)
    except FileNotFoundError:
        raise ConfigError(f"configuration file '{filename}' does not exist")
    except json.JSONDecodeError as e:
        raise ConfigError(f"'{filename}' is not valid JSON: {e}")
    return parse_config(document, paper_scale=paper_scale)


def override(config, seeds=None, ablate=()):
    """Copy of `config` with command-line overrides applied."""
    if seeds:
        config = attr.evolve(config, seeds=tuple(seeds))
    if ablate:
        unknown = sorted(set(ablate) - set(ABLATION_COMPONENTS))
        if unknown:
            raise ConfigError([
                f"--ablate: unknown component '{c}' (expected one of {list(ABLATION_COMPONENTS)})"
                for c in unknown
            ])
        config = attr.evolve(config, model=config.model.ablate(ablate))
    return config
