"""
isogrowth: growth and vertex isoperimetry of graphs
Main entry point for the command-line tool
"""
import os
import sys
import logging
import argparse

from config import load_config
from modules.errors import IsoGrowthError
from utils.performance_monitoring import log_memory_usage, log_performance_summary

from commands import graph_commands, growth_commands, bound_commands, search_commands, plot_commands

config = load_config()

log_formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')

COMMAND_MODULES = (graph_commands, growth_commands, bound_commands, search_commands, plot_commands)

_installed_handlers = []


def setup_logging(level=None, log_file=None):
    """
    Console handler on stderr plus an optional file handler.
    Safe to call more than once; handlers from an earlier call are replaced.
    """
    root_logger = logging.getLogger()
    for handler in _installed_handlers:
        root_logger.removeHandler(handler)
        handler.close()
    _installed_handlers.clear()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(log_formatter)
    _installed_handlers.append(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding='utf-8', mode='a')
        file_handler.setFormatter(log_formatter)
        _installed_handlers.append(file_handler)

    for handler in _installed_handlers:
        root_logger.addHandler(handler)
    root_logger.setLevel((level or config["LOGGING"]["LEVEL"]).upper())


def build_parser():
    parser = argparse.ArgumentParser(
        prog="isogrowth",
        description="Ball growth, pinch constants and isoperimetric certificates of graphs",
    )
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR (default from ISOGROWTH_LOG_LEVEL)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMAND_MODULES:
        module.setup(subparsers)
    return parser


def resolve_output(args):
    output_dir = config["PATHS"]["OUTPUT_DIR"]
    if getattr(args, "out", None) and output_dir and not os.path.isabs(args.out):
        args.out = os.path.join(output_dir, args.out)


def main(argv=None) -> int:
    """
    Run one subcommand

    Returns 0 on success, 2 on invalid input or a failed precondition (also for
    argparse usage errors), 1 on unexpected errors.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    setup_logging(args.log_level, config["LOGGING"]["FILE"])
    resolve_output(args)
    if getattr(args, "jobs", 1) < 1:
        print("isogrowth: error: --jobs must be >= 1", file=sys.stderr)
        return 2

    try:
        args.handler(args)
    except IsoGrowthError as e:
        logging.error(f"{args.command} failed: {e}")
        print(f"isogrowth {args.command}: error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        logging.critical(f"Unexpected error in {args.command}: {e}", exc_info=True)
        return 1

    log_memory_usage(args.command)
    log_performance_summary()
    return 0


if __name__ == "__main__":
    sys.exit(main())
