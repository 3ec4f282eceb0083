"""
Command-line entry point.

    python -m app.cli bounds --preset bridge
    python -m app.cli profile --mode nt --games 1000000 --seed 7 --workers 8 --format csv
    python -m app.cli frank --deal hand.txt
    python -m app.cli oracle leaves --preset tiny --seed 3
    python -m app.cli verify --preset tiny --games 100000

Results go to stdout, diagnostics and throughput to stderr. Exit codes: 0 success,
2 invalid input, 3 enumeration guard exceeded.
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, TextIO

from pydantic import ValidationError

from core.errors import LimitError, TrickspaceError
from services.experiment_runner import ExperimentRunner
from services.report_formatter import render
from services.settings import DEFAULT_PRESET, PRESETS, RunConfig, load_guard_settings
from storage.deal_files import parse_deal_file, write_json_atomic

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_GUARD = 3

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# Commands that shard playouts over worker processes
SAMPLING_COMMANDS = ("profile", "estimate")

__all__ = ["build_parser", "config_from_args", "main", "parse_deal_file", "run"]


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    game = common.add_argument_group("game")
    game.add_argument("--preset", choices=sorted(PRESETS), help="named parametrization (default: bridge)")
    game.add_argument("--hands", type=int, help="number of hands R")
    game.add_argument("--cards", type=int, help="cards per hand K")
    game.add_argument("--suits", type=int, help="number of suits NS")
    game.add_argument("--ranks", type=int, help="ranks per suit NR")
    game.add_argument("--trump", type=int, help="trump suit index (trump mode defaults to suit 0)")
    game.add_argument("--leader", type=int, default=0, help="hand leading the first trick")

    run = common.add_argument_group("run")
    run.add_argument("--mode", choices=["nt", "trump", "both"])
    run.add_argument("--games", type=int, help="random deals (verify: playouts)")
    run.add_argument("--playouts-per-deal", type=int, default=1)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--deal", help="deal file (PBN-style text or JSON document)")
    run.add_argument("--max-leaves", type=int, help="leaf guard for exhaustive counting")
    run.add_argument("--max-states", type=int, help="state guard for exhaustive counting")

    out = common.add_argument_group("output")
    out.add_argument("--format", choices=["text", "csv", "json"], default="text")
    out.add_argument("--output", help="also write the JSON document to this path")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="trickspace",
        description="State-space and game-tree complexity of double-dummy trick-taking games.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("bounds", parents=[common], help="closed-form state and tree bounds")
    commands.add_parser("frank", parents=[common], help="Frank lower bound of a deal or its expectation")
    commands.add_parser("profile", parents=[common], help="per-trick branching profile")
    commands.add_parser("estimate", parents=[common], help="Monte Carlo game-tree size")
    oracle = commands.add_parser("oracle", parents=[common], help="exhaustive counts on tiny games")
    oracle.add_argument("target", choices=["leaves", "states"])
    commands.add_parser("verify", parents=[common], help="check the tree-size estimator is unbiased")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """
    Merge preset, explicit flags and guard settings into a validated RunConfig.

    Raises:
        pydantic.ValidationError: If a value is out of range.
    """
    hands, cards, suits, ranks = PRESETS[args.preset or DEFAULT_PRESET]
    guards = load_guard_settings()
    overrides = {name: value for name, value in (("max_leaves", args.max_leaves),
                                                 ("max_states", args.max_states)) if value is not None}
    values: Dict[str, Any] = {
        "command": args.command,
        "target": getattr(args, "target", None),
        "hands": args.hands if args.hands is not None else hands,
        "cards": args.cards if args.cards is not None else cards,
        "suits": args.suits if args.suits is not None else suits,
        "ranks": args.ranks if args.ranks is not None else ranks,
        "trump": args.trump,
        "mode": args.mode,
        "games": args.games,
        "playouts_per_deal": args.playouts_per_deal,
        "seed": args.seed,
        "workers": args.workers,
        "format": args.format,
        "deal": args.deal,
        "leader": args.leader,
        "output": args.output,
        "guards": guards.model_copy(update=overrides).model_dump(),
    }
    return RunConfig(**values)


def run(argv: Optional[List[str]] = None, stdout: Optional[TextIO] = None) -> int:
    """
    Parse argv, run the command and write the rendered result.

    Returns:
        The process exit code.
    """
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID

    try:
        config = config_from_args(args)
        document = ExperimentRunner(config).run()
        workers = config.workers if config.command in SAMPLING_COMMANDS else None
        text = render(document, config.format, workers)
        if config.output:
            write_json_atomic(config.output, document)
    except LimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (TrickspaceError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INVALID

    stdout.write(text)
    stdout.flush()
    return EXIT_OK


def main() -> None:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format=LOG_FORMAT)
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
