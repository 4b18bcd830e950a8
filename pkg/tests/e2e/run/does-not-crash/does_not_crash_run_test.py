"""Assert that an experiment configuration runs to completion."""
import os
from argparse import Namespace

from lifelong_skill_policy.experiment.config import OUTPUT_ROOT_VARIABLE, load_config
from lifelong_skill_policy.experiment.rundir import (
    REPORT_DIRNAME, SUMMARY_FILENAME, is_completed, run_path
)
from lifelong_skill_policy.experiment.run import EXIT_OK, main


def test_should_not_crash(local_instance, tmp_path, monkeypatch):
    """Every (paradigm, seed) run completes and the report is written."""
    monkeypatch.setenv(OUTPUT_ROOT_VARIABLE, str(tmp_path))
    args = Namespace(
        config=local_instance,
        seed=None,
        ablate=[],
        paper_scale=False,
        jobs=1
    )
    assert main(args) == EXIT_OK

    config = load_config(local_instance)
    run_dir = os.path.join(str(tmp_path), config.name)
    for paradigm, seed in config.runs():
        assert is_completed(run_dir, paradigm, seed)
        assert os.path.isfile(os.path.join(run_path(run_dir, paradigm, seed), SUMMARY_FILENAME))
    assert os.path.isfile(os.path.join(run_dir, REPORT_DIRNAME, 'metrics.csv'))
