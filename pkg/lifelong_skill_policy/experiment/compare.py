"""`compare` sub-command: join the metrics of several run directories."""
import csv
import logging
import os

from ..core.errors import DataError
from .run import EXIT_FAILED, EXIT_OK, format_table
from .rundir import report_path

logger = logging.getLogger(__name__)

METRICS = ('fwt', 'nbt', 'auc')
COMPARE_FIELDS = (
    'run', 'suite', 'paradigm', 'fwt', 'nbt', 'auc', 'd_fwt', 'd_nbt', 'd_auc', 'auc_gap'
)


def _float(value):
    return None if value in (None, '') else float(value)


def _read_csv(filename):
    if not os.path.isfile(filename):
        return []
    with open(filename, 'r', newline='') as fd:
        return list(csv.DictReader(fd))


def load_metrics(run_dir):
    """Summary rows of a run directory, keyed by (suite, paradigm)."""
    directory = report_path(run_dir)
    summary = _read_csv(os.path.join(directory, 'metrics_summary.csv'))
    if not summary:
        raise DataError(f"'{run_dir}' has no metrics report")
    gaps = {
        (row['suite'], row['paradigm']): _float(row['auc_gap'])
        for row in _read_csv(os.path.join(directory, 'upper_bound_gap.csv'))
    }
    metrics = {}
    for row in summary:
        key = (row['suite'], row['paradigm'])
        metrics[key] = {m: _float(row[f'{m}_mean']) for m in METRICS}
        metrics[key]['auc_gap'] = gaps.get(key)
    return metrics


def compare(run_dirs):
    """Rows of every (run, suite, paradigm), with deltas to the first run.

    Deltas are taken against the same (suite, paradigm) of the first run
    directory; rows without a counterpart there have no deltas.
    """
    assert run_dirs
    tables = [(run_dir, load_metrics(run_dir)) for run_dir in run_dirs]
    baseline = tables[0][1]
    baseline_suites = {suite for suite, _ in baseline}
    for run_dir, metrics in tables[1:]:
        if not baseline_suites & {suite for suite, _ in metrics}:
            raise DataError(
                f"'{run_dir}' shares no suite with '{run_dirs[0]}' "
                f"({sorted(baseline_suites)})"
            )

    rows = []
    for run_dir, metrics in tables:
        for (suite, paradigm), values in sorted(metrics.items()):
            reference = baseline.get((suite, paradigm))
            row = {'run': os.path.basename(os.path.normpath(run_dir)),
                   'suite': suite, 'paradigm': paradigm, **values}
            for m in METRICS:
                if reference is None or values[m] is None or reference[m] is None:
                    row[f'd_{m}'] = None
                else:
                    row[f'd_{m}'] = values[m] - reference[m]
            rows.append(row)
    return rows


def main(args):
    try:
        rows = compare(args.run_dirs)
    except DataError as e:
        logger.error("%s", e)
        return EXIT_FAILED
    print(format_table(rows, COMPARE_FIELDS))
    return EXIT_OK


def setup_arg_parser(subparsers):
    parser = subparsers.add_parser(
        'compare', help="Compare the metrics of finished experiments."
    )
    parser.add_argument(
        'run_dirs',
        type=str,
        nargs='+',
        help="Run directories; deltas are relative to the first one."
    )

    parser.set_defaults(exec_subcommand=main)
