"""Assert that rerunning a configuration reproduces its metrics bit for bit."""
import os
from argparse import Namespace

from lifelong_skill_policy.experiment.config import OUTPUT_ROOT_VARIABLE, load_config
from lifelong_skill_policy.experiment.rundir import REPORT_DIRNAME
from lifelong_skill_policy.experiment.run import EXIT_OK, main

REPORT_FILES = ('metrics.csv', 'success_curves.csv', 'skill_usage.csv')


def run_into(root, local_instance, monkeypatch, seed=None, jobs=1):
    monkeypatch.setenv(OUTPUT_ROOT_VARIABLE, root)
    args = Namespace(
        config=local_instance,
        seed=seed,
        ablate=[],
        paper_scale=False,
        jobs=jobs
    )
    assert main(args) == EXIT_OK
    return os.path.join(root, load_config(local_instance).name, REPORT_DIRNAME)


def read(directory, filename):
    with open(os.path.join(directory, filename), 'rb') as fd:
        return fd.read()


def test_reruns_are_identical(local_instance, tmp_path, monkeypatch):
    """Two runs of the same configuration write identical report files."""
    first = run_into(str(tmp_path / 'first'), local_instance, monkeypatch)
    second = run_into(str(tmp_path / 'second'), local_instance, monkeypatch)
    for filename in REPORT_FILES:
        assert read(first, filename) == read(second, filename), filename


def test_parallel_runs_match_serial_runs(local_instance, tmp_path, monkeypatch):
    """Running seeds in worker processes does not change the results."""
    serial = run_into(str(tmp_path / 'serial'), local_instance, monkeypatch, seed=[0, 1])
    parallel = run_into(
        str(tmp_path / 'parallel'), local_instance, monkeypatch, seed=[0, 1], jobs=2
    )
    for filename in REPORT_FILES:
        assert read(serial, filename) == read(parallel, filename), filename
