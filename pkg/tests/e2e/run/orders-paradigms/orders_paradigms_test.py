"""Assert the transfer ordering of the paradigms on a 5-task Goal suite.

Replay beats sequential fine-tuning in AUC, PackNet does not forget, and the
skill codebook does not hurt forward transfer.
"""
import os
from argparse import Namespace

from lifelong_skill_policy.experiment.config import OUTPUT_ROOT_VARIABLE, load_config
from lifelong_skill_policy.experiment.run import EXIT_OK, completed_runs, main
from lifelong_skill_policy.metrics.report import summary_rows


def run_summary(local_instance, root, monkeypatch, ablate=()):
    monkeypatch.setenv(OUTPUT_ROOT_VARIABLE, root)
    args = Namespace(
        config=local_instance,
        seed=None,
        ablate=list(ablate),
        paper_scale=False,
        jobs=3
    )
    assert main(args) == EXIT_OK
    run_dir = os.path.join(root, load_config(local_instance).name)
    config = load_config(local_instance)
    return {row['paradigm']: row for row in summary_rows(completed_runs(run_dir, config))}


def test_transfer_ordering(local_instance, tmp_path, monkeypatch):
    full = run_summary(local_instance, str(tmp_path / 'full'), monkeypatch)
    assert full['ER']['auc_mean'] >= full['Sequential']['auc_mean'] + 0.10
    assert full['PackNet']['nbt_mean'] <= 0.05
    assert full['Sequential']['nbt_mean'] >= full['PackNet']['nbt_mean'] + 0.10

    ablated = run_summary(local_instance, str(tmp_path / 'ablated'), monkeypatch,
                          ablate=['codebook'])
    for paradigm, row in full.items():
        assert row['fwt_mean'] >= ablated[paradigm]['fwt_mean'], paradigm
