"""Delimited-text reports over finished runs.

Every file has a header row; the field order is fixed:

    metrics.csv          paradigm, suite, seed, fwt, nbt, auc, multitask_success
    metrics_summary.csv  paradigm, suite, seeds, fwt_mean, fwt_std, nbt_mean,
                         nbt_std, auc_mean, auc_std
    success_curves.csv   paradigm, suite, seed, stage, task, epoch, success
    success_matrix.csv   paradigm, suite, seed, stage, task, success
    skill_usage.csv      paradigm, suite, seed, stage, task, rank, row,
                         source_task, count
    upper_bound_gap.csv  paradigm, suite, fwt_gap, auc_gap   (Multitask runs only)

Standard deviations are population deviations over seeds. Missing values
(e.g. FWT of a Multitask run) are empty fields.
"""
import csv
import logging
import os
from collections import OrderedDict

import attr
import numpy as np

from .usage import skill_usage

logger = logging.getLogger(__name__)

METRICS_FIELDS = ['paradigm', 'suite', 'seed', 'fwt', 'nbt', 'auc', 'multitask_success']
SUMMARY_FIELDS = [
    'paradigm', 'suite', 'seeds',
    'fwt_mean', 'fwt_std', 'nbt_mean', 'nbt_std', 'auc_mean', 'auc_std'
]
CURVE_FIELDS = ['paradigm', 'suite', 'seed', 'stage', 'task', 'epoch', 'success']
MATRIX_FIELDS = ['paradigm', 'suite', 'seed', 'stage', 'task', 'success']
USAGE_FIELDS = [
    'paradigm', 'suite', 'seed', 'stage', 'task', 'rank', 'row', 'source_task', 'count'
]
GAP_FIELDS = ['paradigm', 'suite', 'fwt_gap', 'auc_gap']

TOP_SKILLS = 10


@attr.s(frozen=True, eq=False)
class RunSummary:
    """Results of one (paradigm, suite, seed) run."""
    paradigm = attr.ib()
    suite = attr.ib()
    seed = attr.ib()
    metrics = attr.ib(default=None)
    record = attr.ib(default=None)
    multitask = attr.ib(default=None)
    usage = attr.ib(default=None)

    @property
    def multitask_success(self):
        return None if self.multitask is None else self.multitask.success()

    def values(self):
        row = {'fwt': None, 'nbt': None, 'auc': None}
        if self.metrics is not None:
            row = {'fwt': self.metrics.fwt, 'nbt': self.metrics.nbt, 'auc': self.metrics.auc}
        return {**row, 'multitask_success': self.multitask_success}


def _field(value):
    if value is None:
        return ''
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def _write_csv(filename, fieldnames, rows):
    with open(filename, 'w', newline='') as fd:
        writer = csv.DictWriter(fd, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _field(v) for k, v in row.items()})


def metrics_rows(summaries):
    for s in summaries:
        yield {'paradigm': s.paradigm, 'suite': s.suite, 'seed': s.seed, **s.values()}


def _mean_std(values):
    values = [v for v in values if v is not None]
    if not values:
        return None, None
    return float(np.mean(values)), float(np.std(values))


def summary_rows(summaries):
    groups = OrderedDict()
    for s in summaries:
        groups.setdefault((s.paradigm, s.suite), []).append(s)
    for (paradigm, suite), runs in groups.items():
        row = {'paradigm': paradigm, 'suite': suite, 'seeds': len(runs)}
        for metric in ('fwt', 'nbt', 'auc'):
            values = [r.values()[metric] for r in runs]
            if metric == 'auc' and all(r.metrics is None for r in runs):
                values = [r.multitask_success for r in runs]
            row[f'{metric}_mean'], row[f'{metric}_std'] = _mean_std(values)
        yield row


def curve_rows(summaries):
    for s in summaries:
        key = {'paradigm': s.paradigm, 'suite': s.suite, 'seed': s.seed}
        if s.record is not None:
            c = s.record.clamped().c
            for stage, task, e in np.ndindex(c.shape):
                if task <= stage:
                    yield {
                        **key, 'stage': stage, 'task': s.record.task_ids[task],
                        'epoch': s.record.eval_points[e], 'success': c[stage, task, e]
                    }
        if s.multitask is not None:
            curves = s.multitask.curves
            for task, e in np.ndindex(curves.shape):
                yield {
                    **key, 'stage': 0, 'task': s.multitask.task_ids[task],
                    'epoch': s.multitask.eval_points[e], 'success': curves[task, e]
                }


def matrix_rows(summaries):
    for s in summaries:
        if s.record is None:
            continue
        final = s.record.clamped().final()
        for stage in range(s.record.K):
            for task in range(stage + 1):
                yield {
                    'paradigm': s.paradigm, 'suite': s.suite, 'seed': s.seed,
                    'stage': stage, 'task': s.record.task_ids[task],
                    'success': final[stage, task]
                }


def usage_rows(summaries, top_n=TOP_SKILLS):
    for s in summaries:
        if s.usage is None:
            continue
        keys = sorted({(e['stage'], e['task']) for e in s.usage.entries})
        for stage, task in keys:
            ranked = skill_usage(s.usage, task_id=task, stage=stage, top_n=top_n)
            for rank, usage in enumerate(ranked, start=1):
                yield {
                    'paradigm': s.paradigm, 'suite': s.suite, 'seed': s.seed,
                    'stage': stage, 'task': task, 'rank': rank, 'row': usage.row,
                    'source_task': usage.source_task, 'count': usage.count
                }


def gap_rows(summaries):
    """FWT and AUC distance of every lifelong paradigm to the Multitask bound."""
    summary = list(summary_rows(summaries))
    bounds = {
        row['suite']: row['auc_mean'] for row in summary
        if row['paradigm'] == 'Multitask'
    }
    for row in summary:
        bound = bounds.get(row['suite'])
        if bound is None or row['paradigm'] == 'Multitask':
            continue
        yield {
            'paradigm': row['paradigm'], 'suite': row['suite'],
            'fwt_gap': bound - row['fwt_mean'], 'auc_gap': bound - row['auc_mean']
        }


def emit_report(summaries, directory):
    """Write every report file for `summaries` into `directory`."""
    summaries = list(summaries)
    os.makedirs(directory, exist_ok=True)
    files = [
        ('metrics.csv', METRICS_FIELDS, metrics_rows(summaries)),
        ('metrics_summary.csv', SUMMARY_FIELDS, summary_rows(summaries)),
        ('success_curves.csv', CURVE_FIELDS, curve_rows(summaries)),
        ('success_matrix.csv', MATRIX_FIELDS, matrix_rows(summaries)),
        ('skill_usage.csv', USAGE_FIELDS, usage_rows(summaries)),
    ]
    if any(s.multitask is not None for s in summaries):
        files.append(('upper_bound_gap.csv', GAP_FIELDS, gap_rows(summaries)))
    for filename, fields, rows in files:
        _write_csv(os.path.join(directory, filename), fields, rows)
    logger.info("Report written to '%s'.", directory)
    return [os.path.join(directory, f[0]) for f in files]
