"""`run` sub-command: execute every (paradigm, seed) run of an experiment."""
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor

from ..core.errors import ConfigError
from ..envs.task import make_suite
from ..lifelong.harness import LifelongRun
from ..metrics.report import emit_report, summary_rows
from .config import load_config, output_root, override
from .rundir import (COMPLETED, Stats, checkpoints_path, dump_run, is_completed,
                     load_run, report_path, run_name, write_config_snapshot)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

TABLE_FIELDS = ('suite', 'paradigm', 'seeds', 'fwt_mean', 'nbt_mean', 'auc_mean')


def execute_run(run_dir, config, paradigm, seed, resume=False):
    """Train one paradigm with one seed and write its results."""
    start_time = time.time()
    tasks = make_suite(config.suite.kind, config.suite.n_tasks, config.suite.seed)
    run = LifelongRun(
        tasks, paradigm, config.model, config.train, seed,
        checkpoints=checkpoints_path(run_dir, paradigm, seed)
    )
    if resume and run.resume():
        logger.info("%s continues after %s finished steps.",
                    run_name(paradigm, seed), run.finished)
    record, multitask, usage = run.run()

    runtime = time.time() - start_time
    stats = Stats(runtime=runtime, exit_status=COMPLETED)
    dump_run(run_dir, config, paradigm, seed, record, multitask, usage, stats)
    return run_name(paradigm, seed)


def _execute(job):
    return execute_run(*job)


def run_experiment(run_dir, config, jobs=1, resume=False):
    """Execute the pending runs of `config`; returns the names of failed runs."""
    pending = [
        (run_dir, config, paradigm, seed, resume)
        for paradigm, seed in config.runs()
        if not is_completed(run_dir, paradigm, seed)
    ]
    failures = []
    if jobs == 1:
        for job in pending:
            try:
                _execute(job)
            except Exception:
                logger.exception("Run %s failed.", run_name(job[2], job[3]))
                failures.append(run_name(job[2], job[3]))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_execute, job) for job in pending]
            # Results are collected in submission order.
            for job, future in zip(pending, futures):
                try:
                    future.result()
                except Exception:
                    logger.exception("Run %s failed.", run_name(job[2], job[3]))
                    failures.append(run_name(job[2], job[3]))
    return failures


def completed_runs(run_dir, config):
    return [
        load_run(run_dir, config, paradigm, seed)
        for paradigm, seed in config.runs()
        if is_completed(run_dir, paradigm, seed)
    ]


def write_report(run_dir, config):
    """Emit the report over every completed run; returns its summary rows."""
    summaries = completed_runs(run_dir, config)
    emit_report(summaries, report_path(run_dir))
    return list(summary_rows(summaries))


def format_table(rows, fields=TABLE_FIELDS):
    def cell(value):
        if value is None:
            return '-'
        if isinstance(value, float):
            return f'{value:.3f}'
        return str(value)
    lines = [[str(f) for f in fields]] + [[cell(row.get(f)) for f in fields] for row in rows]
    widths = [max(len(line[i]) for line in lines) for i in range(len(fields))]
    return '\n'.join(
        '  '.join(value.ljust(width) for value, width in zip(line, widths))
        for line in lines
    )


def report_diagnostics(error):
    for diagnostic in error.diagnostics:
        logger.error("Configuration: %s", diagnostic)


def main(args):
    try:
        config = load_config(args.config, paper_scale=args.paper_scale)
        config = override(config, seeds=args.seed, ablate=args.ablate)
    except ConfigError as e:
        report_diagnostics(e)
        return EXIT_CONFIG

    run_dir = os.path.join(output_root(), config.name)
    if os.path.exists(run_dir):
        logger.error("Run directory '%s' already exists; use `resume` to continue it.",
                     run_dir)
        return EXIT_CONFIG
    write_config_snapshot(run_dir, config)

    failures = run_experiment(run_dir, config, jobs=args.jobs)
    rows = write_report(run_dir, config)
    print(format_table(rows))
    if failures:
        logger.error("%s run(s) failed: %s.", len(failures), ', '.join(failures))
        return EXIT_FAILED
    return EXIT_OK


def setup_arg_parser(subparsers):
    parser = subparsers.add_parser(
        'run', help="Run a lifelong-learning experiment."
    )
    parser.add_argument(
        'config',
        type=str,
        help="Experiment configuration file (JSON)."
    )
    parser.add_argument(
        '--seed',
        type=int,
        action='append',
        default=None,
        help="Seed to run (repeatable); replaces the seeds of the configuration."
    )
    parser.add_argument(
        '--ablate',
        type=str,
        action='append',
        default=[],
        help="Disable a component: codebook, adapters or hierarchy (repeatable)."
    )
    parser.add_argument(
        '--paper-scale',
        action='store_true',
        help="Use the paper-scale preset for every field the configuration omits."
    )
    parser.add_argument(
        '--jobs',
        type=int,
        default=1,
        help="Number of runs executed in parallel processes."
    )

    parser.set_defaults(exec_subcommand=main)
