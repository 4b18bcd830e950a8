import argparse
import logging
import sys

from .core.util import LoggerFormatter
from .experiment.compare import setup_arg_parser as setup_compare_parser
from .experiment.resume import setup_arg_parser as setup_resume_parser
from .experiment.run import setup_arg_parser as setup_run_parser

logger = logging.getLogger(__name__)


def create_parser():
    parser = argparse.ArgumentParser(
        description="Lifelong imitation learning with an expandable skill codebook."
    )
    parser.add_argument(
        '--logging',
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
        default='INFO',
        type=str,
        help="Logging level."
    )
    parser.add_argument(
        '--log-precise',
        action='store_true',
        help="Log numeric quantities with full precision."
    )

    subparsers = parser.add_subparsers(
        title='subcommand',
        description="valid subcommands",
        help="run `subcommand --help` for help on a subcommand"
    )
    subparsers.required = True
    subparsers.dest = 'subcommand'

    setup_run_parser(subparsers)

    setup_resume_parser(subparsers)

    setup_compare_parser(subparsers)

    return parser


def main(argv=None):
    args = create_parser().parse_args(argv)
    log_level = getattr(logging, args.logging)

    handler = logging.StreamHandler()
    formatter = LoggerFormatter(precise=args.log_precise)
    handler.setFormatter(formatter)
    logging.basicConfig(level=log_level, handlers=[handler])
    logger.setLevel(log_level)

    return args.exec_subcommand(args)


if __name__ == '__main__':
    sys.exit(main())
