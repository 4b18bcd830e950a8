import numpy as np
import pytest
from hypothesis import given, settings

from lifelong_skill_policy.core.errors import DataError
from lifelong_skill_policy.metrics.record import MultitaskRecord, SuccessRecord
from lifelong_skill_policy.metrics.transfer import MetricsReport, auc, fwt, fwt_per_task, nbt
from tests.unit.metrics_test_examples import metric_examples, record
from tests.unit.strategies import random_success_record


def direct_metrics(c):
    """FWT, NBT and AUC summed term by term from the raw success tensor."""
    K, _, E = c.shape
    c = c.astype(np.longdouble)
    best = [int(np.argmax(c[k, k])) for k in range(K)]
    curve = [
        [c[k, k, e] if e <= best[k] else c[k, k, best[k]] for e in range(E)]
        for k in range(K)
    ]
    fwt_k = [sum(curve[k]) / E for k in range(K)]
    final = [[c[q, k, best[q]] for k in range(q + 1)] for q in range(K)]

    total_fwt = sum(fwt_k) / K
    total_nbt = 0
    total_auc = 0
    for k in range(K):
        later = [final[q][k] for q in range(k + 1, K)]
        if later:
            total_nbt += sum(final[k][k] - v for v in later) / (K * (K - k - 1))
        total_auc += (fwt_k[k] + sum(later)) / (K * (K - k))
    return float(total_fwt), float(total_nbt), float(total_auc)


@pytest.mark.parametrize('name', sorted(metric_examples))
def test_metric_examples(name):
    example, expected_fwt, expected_nbt, expected_auc = metric_examples[name]
    assert abs(fwt(example) - expected_fwt) <= 1e-12
    assert abs(nbt(example) - expected_nbt) <= 1e-12
    assert abs(auc(example) - expected_auc) <= 1e-12


@given(example=random_success_record())
@settings(deadline=None, max_examples=100)
def test_metrics_match_direct_summation(example):
    report = MetricsReport.from_record(example)
    expected = direct_metrics(example.c)
    assert abs(report.fwt - expected[0]) <= 1e-12
    assert abs(report.nbt - expected[1]) <= 1e-12
    assert abs(report.auc - expected[2]) <= 1e-12
    assert 0.0 <= report.fwt <= 1.0
    assert 0.0 <= report.auc <= 1.0
    assert -1.0 <= report.nbt <= 1.0


@given(example=random_success_record())
@settings(deadline=None)
def test_saturated_records(example):
    defined = ~np.isnan(example.c)
    for value in (0.0, 1.0):
        c = np.where(defined, value, np.nan)
        saturated = SuccessRecord(example.task_ids, example.eval_points, c)
        assert fwt(saturated) == value
        assert auc(saturated) == pytest.approx(value, abs=1e-12)
        assert nbt(saturated) == 0.0


@given(example=random_success_record())
@settings(deadline=None)
def test_metrics_are_linear_in_the_success_rates(example):
    s = 0.3
    scaled = example.scaled(s)
    assert abs(fwt(scaled) - s * fwt(example)) <= 1e-12
    assert abs(nbt(scaled) - s * nbt(example)) <= 1e-12
    assert abs(auc(scaled) - s * auc(example)) <= 1e-12


@given(example=random_success_record(max_tasks=1))
@settings(deadline=None)
def test_single_task_auc_is_fwt(example):
    assert auc(example) == pytest.approx(fwt(example), abs=1e-12)


@given(example=random_success_record(min_tasks=2))
@settings(deadline=None)
def test_no_forgetting_gives_zero_nbt(example):
    c = example.c.copy()
    final = example.final()
    for k in range(example.K):
        for q in range(k + 1, example.K):
            c[q, k, :] = final[k, k]
    unforgetting = SuccessRecord(example.task_ids, example.eval_points, c)
    assert nbt(unforgetting) == pytest.approx(0.0, abs=1e-12)


def test_backward_improvement_gives_negative_nbt():
    improving = record({
        (0, 0): [0.0, 0.4],
        (1, 0): [0.6, 0.8],
        (1, 1): [0.0, 0.5],
    })
    assert nbt(improving) < 0


def test_clamping_keeps_monotone_curves():
    monotone = record({(0, 0): [0.1, 0.3, 0.3, 0.8]})
    assert np.array_equal(monotone.clamped().c, monotone.c)
    assert fwt_per_task(monotone)[0] == pytest.approx(np.mean([0.1, 0.3, 0.3, 0.8]))


def test_best_index_is_the_earliest_maximum():
    example = record({(0, 0): [0.2, 0.7, 0.5, 0.7]})
    assert example.best_index(0) == 1
    assert np.array_equal(example.clamped().c[0, 0], [0.2, 0.7, 0.7, 0.7])


def test_missing_entries_are_reported():
    example = record({
        (0, 0): [0.0, 0.5],
        (1, 0): [0.5, 0.5],
        (1, 1): [0.0, 0.5],
    })
    example.c[1, 0, 1] = np.nan
    assert fwt(example) == pytest.approx(0.25)
    with pytest.raises(DataError) as error:
        nbt(example)
    assert error.value.missing == [(1, 0, 1)]
    with pytest.raises(DataError):
        auc(example)


def test_record_round_trip(tmp_path):
    example = record({
        (0, 0): [0.0, 0.5],
        (1, 0): [0.5, 0.25],
        (1, 1): [0.0, 1.0],
    })
    filename = str(tmp_path / 'record.json')
    example.save(filename)
    loaded = SuccessRecord.load(filename)
    assert loaded.task_ids == example.task_ids
    assert loaded.eval_points == example.eval_points
    assert np.array_equal(loaded.c, example.c, equal_nan=True)


def test_record_rejects_entries_above_the_diagonal():
    c = np.zeros((2, 2, 1))
    with pytest.raises(AssertionError):
        SuccessRecord([0, 1], [0], c)


def test_multitask_success_is_read_at_the_best_average():
    multitask = MultitaskRecord([0, 1], [0, 5, 10], [[0.0, 0.9, 0.5], [0.0, 0.3, 0.9]])
    assert multitask.best_index() == 2
    assert multitask.success() == pytest.approx(0.7)
    multitask.curves[1, 0] = np.nan
    with pytest.raises(DataError):
        multitask.success()
