#!/usr/bin/env python3
"""
Syncshape - Bounded-Delay Network Analyzer
Main entry point: loads a scenario, dispatches one command, maps the outcome
to an exit code (0 success, 1 reported violations, 2 errors)
"""

import argparse
import logging
import sys
from typing import List, Optional

from commands import CommandCoordinator
from commands.base import EXIT_ERROR
from config import AnalyzerConfig
from core.errors import SyncshapeError, ValidationError
from utils.analysis_logger import debug_dump, get_analysis_logger, init_analysis_logger, log_error
from utils.scenario_loader import load_scenario

logger = logging.getLogger(__name__)

FORMULA_HELP = (
    "formula syntax: occ(e) | K[i] f | C{i,j} f | !f | f & g | (f); "
    "agents by index or name; !, K and C bind tighter than &"
)


def build_parser(coordinator: CommandCoordinator) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="analyzer",
        description="Simulate and analyse synchronous networks with bounded message delays.",
        epilog=FORMULA_HELP,
    )
    parser.add_argument("command", choices=coordinator.command_names)
    parser.add_argument("--scenario", required=True, help="scenario JSON file")
    parser.add_argument("--seed", type=int, default=None, help="seed for sampled runs")
    parser.add_argument("--env-index", type=int, default=None,
                        help="index of a run in canonical environment order")
    parser.add_argument("--count", type=int, default=None, help="sample this many runs instead of enumerating")
    parser.add_argument("--ceiling", type=int, default=None, help="explosion ceiling for exhaustive bundles")
    parser.add_argument("--out", nargs="?", const=AnalyzerConfig.OUTPUT_DIR, default=None,
                        help=f"write artifacts to DIR (default {AnalyzerConfig.OUTPUT_DIR})")
    parser.add_argument("--format", choices=("text", "dot"), default="text")
    parser.add_argument("--formula", action="append", default=None, help="formula for eval (repeatable)")
    parser.add_argument("--time", type=int, default=None, help="evaluation time for eval")
    parser.add_argument("--run", type=int, default=None, help="run index inside the bundle")
    parser.add_argument("--object", choices=("run", "witness", "cro"), default=None, help="what dot exports")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    init_analysis_logger(
        "syncshape",
        AnalyzerConfig.LOG_LEVEL,
        AnalyzerConfig.LOG_DIR if AnalyzerConfig.ENABLE_FILE_LOGGING else None,
        AnalyzerConfig.ENABLE_MEMORY_MONITORING,
    )
    logging.basicConfig(level=AnalyzerConfig.LOG_LEVEL,
                        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')

    coordinator = CommandCoordinator(AnalyzerConfig)
    args = build_parser(coordinator).parse_args(argv)
    logger.debug(f"Enabled modules: {', '.join(coordinator.enabled_modules())}")
    debug_dump(vars(args), "Command arguments")

    try:
        scenario = load_scenario(args.scenario)
        if args.ceiling is not None:
            scenario.with_ceiling(args.ceiling)
        elif scenario.context.ceiling > AnalyzerConfig.EXPLOSION_CEILING:
            scenario.with_ceiling(AnalyzerConfig.EXPLOSION_CEILING)
        result = coordinator.dispatch(args.command, scenario, args)
    except ValidationError as e:
        log_error(e, f"validating {args.scenario}")
        print(str(e), file=sys.stderr)
        return EXIT_ERROR
    except SyncshapeError as e:
        log_error(e, f"{args.command} on {args.scenario}")
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        log_error(e, f"unexpected failure in {args.command}")
        logger.exception("💥 Unexpected error")
        print(f"💥 {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    finally:
        session = get_analysis_logger()
        if session:
            session.log_session_stats()

    sys.stdout.write(result.text)
    for path in result.artifacts:
        logger.info(f"📄 Artifact: {path}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
