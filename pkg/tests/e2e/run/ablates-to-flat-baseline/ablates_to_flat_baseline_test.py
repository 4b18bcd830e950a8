"""Assert that ablating every component runs the flat baseline policy."""
import json
import os
from argparse import Namespace

from lifelong_skill_policy.experiment.config import OUTPUT_ROOT_VARIABLE, load_config
from lifelong_skill_policy.experiment.rundir import (
    CONFIG_FILENAME, REPORT_DIRNAME, load_config_snapshot
)
from lifelong_skill_policy.experiment.run import EXIT_OK, main


def test_flat_baseline(local_instance, tmp_path, monkeypatch):
    """The snapshot records the ablation and no skill rows are ever selected."""
    monkeypatch.setenv(OUTPUT_ROOT_VARIABLE, str(tmp_path))
    args = Namespace(
        config=local_instance,
        seed=None,
        ablate=['codebook', 'adapters', 'hierarchy'],
        paper_scale=False,
        jobs=1
    )
    assert main(args) == EXIT_OK

    run_dir = os.path.join(str(tmp_path), load_config(local_instance).name)
    config, digest = load_config_snapshot(run_dir)
    assert not (config.model.use_codebook or config.model.use_adapters
                or config.model.use_hierarchy)
    with open(os.path.join(run_dir, CONFIG_FILENAME)) as fd:
        assert json.load(fd)['digest'] == digest == config.digest()
    with open(os.path.join(run_dir, REPORT_DIRNAME, 'skill_usage.csv')) as fd:
        assert len(fd.read().splitlines()) == 1
