"""`resume` sub-command: finish an interrupted experiment."""
import logging
import os

from ..core.errors import ConfigError
from ..metrics.report import summary_rows
from .run import (EXIT_CONFIG, EXIT_FAILED, EXIT_OK, completed_runs,
                  format_table, report_diagnostics, run_experiment,
                  write_report)
from .rundir import CONFIG_FILENAME, is_completed, load_config_snapshot

logger = logging.getLogger(__name__)


def resume(run_dir, jobs=1):
    """Continue every unfinished run of `run_dir` from its latest checkpoint."""
    if not os.path.isfile(os.path.join(run_dir, CONFIG_FILENAME)):
        raise ConfigError(f"'{run_dir}' is not a run directory")
    config, digest = load_config_snapshot(run_dir)
    if config.digest() != digest:
        raise ConfigError(
            f"configuration of '{run_dir}' does not match its recorded digest"
        )

    pending = [
        (paradigm, seed) for paradigm, seed in config.runs()
        if not is_completed(run_dir, paradigm, seed)
    ]
    if not pending:
        logger.info("Every run of '%s' is complete; nothing to do.", run_dir)
        return config, []
    logger.info("Resuming %s unfinished run(s) of '%s'.", len(pending), run_dir)
    failures = run_experiment(run_dir, config, jobs=jobs, resume=True)
    write_report(run_dir, config)
    return config, failures


def main(args):
    try:
        config, failures = resume(args.run_dir, jobs=args.jobs)
    except ConfigError as e:
        report_diagnostics(e)
        return EXIT_CONFIG
    print(format_table(summary_rows(completed_runs(args.run_dir, config))))
    if failures:
        logger.error("%s run(s) failed: %s.", len(failures), ', '.join(failures))
        return EXIT_FAILED
    return EXIT_OK


def setup_arg_parser(subparsers):
    parser = subparsers.add_parser(
        'resume', help="Continue an interrupted experiment from its checkpoints."
    )
    parser.add_argument(
        'run_dir',
        type=str,
        help="Run directory created by `run`."
    )
    parser.add_argument(
        '--jobs',
        type=int,
        default=1,
        help="Number of runs executed in parallel processes."
    )

    parser.set_defaults(exec_subcommand=main)
