"""Run directory layout.

    <run dir>/
        config.json                  config snapshot, its digest and the seeds
        <paradigm>-seed<seed>/
            checkpoints/task-NN/     per-task checkpoints
            record.json              success record (and Multitask curves)
            usage.json               skill-usage log
            summary.json             metrics plus the 'runner' block
        report/                      delimited-text reports
"""
import json
import logging
import os
import sys
from collections import namedtuple

import attr

from ..core.util import jsonify_numeric
from ..metrics.record import MultitaskRecord, SuccessRecord
from ..metrics.report import RunSummary
from ..metrics.transfer import MetricsReport
from ..metrics.usage import SkillUsageLog
from .config import parse_config

logger = logging.getLogger(__name__)

Stats = namedtuple('Stats', ['runtime', 'exit_status'])

CONFIG_FILENAME = 'config.json'
RECORD_FILENAME = 'record.json'
USAGE_FILENAME = 'usage.json'
SUMMARY_FILENAME = 'summary.json'
CHECKPOINTS_DIRNAME = 'checkpoints'
REPORT_DIRNAME = 'report'

COMPLETED = 'completed'


def run_name(paradigm, seed):
    return f'{paradigm.name}-seed{seed}'


def run_path(run_dir, paradigm, seed):
    return os.path.join(run_dir, run_name(paradigm, seed))


def checkpoints_path(run_dir, paradigm, seed):
    return os.path.join(run_path(run_dir, paradigm, seed), CHECKPOINTS_DIRNAME)


def report_path(run_dir):
    return os.path.join(run_dir, REPORT_DIRNAME)


def _dump_json(obj, filename):
    with open(filename, 'w') as fd:
        json.dump(jsonify_numeric(obj), fd, indent=4)


def write_config_snapshot(run_dir, config):
    os.makedirs(run_dir, exist_ok=False)
    snapshot = {'config': config.to_dict(), 'digest': config.digest()}
    _dump_json(snapshot, os.path.join(run_dir, CONFIG_FILENAME))
    logger.info("Run directory is '%s'.", run_dir)


def load_config_snapshot(run_dir):
    """Return (config, stored digest) of a run directory."""
    with open(os.path.join(run_dir, CONFIG_FILENAME), 'r') as fd:
        snapshot = json.load(fd)
    return parse_config(snapshot['config']), snapshot['digest']


def dump_run(run_dir, config, paradigm, seed, record, multitask, usage, stats):
    """Write the results of one (paradigm, seed) run next to its checkpoints."""
    directory = run_path(run_dir, paradigm, seed)
    os.makedirs(directory, exist_ok=True)

    _dump_json({
        'record': record.to_dict(),
        'multitask': None if multitask is None else multitask.to_dict()
    }, os.path.join(directory, RECORD_FILENAME))
    _dump_json(usage.to_dict(), os.path.join(directory, USAGE_FILENAME))

    summary = {
        'paradigm': paradigm.name,
        'suite': config.suite.kind.value,
        'seed': seed
    }
    if multitask is None:
        summary['metrics'] = attr.asdict(MetricsReport.from_record(record))
    else:
        summary['multitask_success'] = multitask.success()

    # Add runner key.
    runner = dict()
    runner['name'] = 'lsp'
    runner['args'] = sys.argv
    runner['runtime'] = stats.runtime
    runner['exit_status'] = stats.exit_status
    summary['runner'] = runner

    _dump_json(summary, os.path.join(directory, SUMMARY_FILENAME))
    logger.info("Results of %s written to '%s'.", run_name(paradigm, seed), directory)


def is_completed(run_dir, paradigm, seed):
    filename = os.path.join(run_path(run_dir, paradigm, seed), SUMMARY_FILENAME)
    if not os.path.isfile(filename):
        return False
    with open(filename, 'r') as fd:
        return json.load(fd)['runner']['exit_status'] == COMPLETED


def load_run(run_dir, config, paradigm, seed):
    """RunSummary of a completed (paradigm, seed) run."""
    directory = run_path(run_dir, paradigm, seed)
    with open(os.path.join(directory, RECORD_FILENAME), 'r') as fd:
        records = json.load(fd)
    with open(os.path.join(directory, USAGE_FILENAME), 'r') as fd:
        usage = SkillUsageLog.from_dict(json.load(fd))
    multitask = None
    if records['multitask'] is not None:
        multitask = MultitaskRecord.from_dict(records['multitask'])
    record = SuccessRecord.from_dict(records['record'])
    return RunSummary(
        paradigm=paradigm.name,
        suite=config.suite.kind.value,
        seed=seed,
        metrics=MetricsReport.from_record(record) if multitask is None else None,
        record=record if multitask is None else None,
        multitask=multitask,
        usage=usage
    )
