import numpy as np
import pytest

from lifelong_skill_policy.lifelong.validation import (
    KEY_ORTHOGONALITY_TOL, IsolationAudit, max_cross_dot, validate_expansion,
    validate_isolation
)
from lifelong_skill_policy.policy.model import ModelConfig, SkillPolicy

TINY = ModelConfig(d=8, heads=2, blocks=1, rows_per_task=2, top_c=2, adapter_rank=2,
                   mixtures=2, window=4)


def started_policy(tasks):
    policy = SkillPolicy(TINY, n_languages=3, seed=0, adapter_mode='per_task')
    rng = np.random.default_rng(0)
    for task_id in tasks:
        policy.begin_task(task_id, rng)
        validate_expansion(policy, task_id)
    return policy


def test_new_rows_are_orthogonal_to_trained_rows():
    policy = started_policy([0])
    rng = np.random.default_rng(1)
    policy.codebook.subsets[0].K.data += rng.normal(0.0, 0.1, size=(2, 8))
    policy.codebook.subsets[0].P.data += rng.normal(0.0, 0.1, size=(2, 2, 8))

    policy.begin_task(1, rng)
    validate_expansion(policy, 1)
    assert max_cross_dot(policy.codebook, 1) <= KEY_ORTHOGONALITY_TOL


def test_training_the_current_subset_passes_the_audit():
    policy = started_policy([0, 1])
    audit = IsolationAudit()
    audit.record(0, policy)

    # Keys of the task in training drift away from the older ones.
    policy.codebook.subsets[1].K.data += 0.05
    assert max_cross_dot(policy.codebook, 1) > KEY_ORTHOGONALITY_TOL
    validate_isolation(audit, policy)
    with pytest.raises(AssertionError):
        validate_expansion(policy, 1)

    policy.begin_task(2, np.random.default_rng(2))
    validate_expansion(policy, 2)


def test_expansion_beyond_the_dimension_is_not_checked():
    policy = started_policy([0, 1, 2, 3])
    policy.begin_task(4, np.random.default_rng(3))
    assert policy.codebook.size > policy.codebook.d
    validate_expansion(policy, 4)


def test_first_subset_has_nothing_to_be_orthogonal_to():
    policy = started_policy([0])
    assert max_cross_dot(policy.codebook, 0) == 0.0
