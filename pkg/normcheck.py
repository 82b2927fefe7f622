#!/usr/bin/env python3
"""normcheck: decide whether a sequential transducer preserves normality."""
import argparse
import asyncio
import logging
import os
import sys
import time
from logging.handlers import RotatingFileHandler
from typing import Callable, Dict, List, Optional

from rich.console import Console
from rich.logging import RichHandler

from decision import ComponentStatus, analyzed_components, explain, preserves_normality_async
from documents import load_transducer, render_matrices, serialize_weighted_automaton
from errors import AllOutputsEmpty, DivergentStar, NonUniqueStationary, NormcheckError
from frequency import build_frequency_automaton
from settings import LOGS_DIR, load_settings
from simulation import compare_empirical, compare_state_frequencies, open_source
from transducer import Transducer, require_valid, restrict, run, size
from version import VERSION
from weighted import word_weight

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2

console = Console(highlight=False)
err_console = Console(stderr=True, highlight=False)

logger = logging.getLogger("Normcheck")
cli_logger = logging.getLogger("Normcheck.CLI")
cli_logger.propagate = True


def setup_logging(level_name: str) -> None:
    level = getattr(logging, level_name.upper(), logging.INFO)
    logger.setLevel(level)
    if logger.handlers:
        return
    os.makedirs(LOGS_DIR, exist_ok=True)
    file_handler = RotatingFileHandler(
        os.path.join(LOGS_DIR, "normcheck.log"), maxBytes=5 * 1024 * 1024, backupCount=3
    )
    file_handler.setFormatter(logging.Formatter("%(asctime)s - [%(name)s] - %(levelname)s - %(message)s"))
    logger.addHandler(file_handler)

    console_handler = RichHandler(console=err_console, show_path=False, markup=False)
    console_handler.setLevel(logging.WARNING)
    # errors reach stderr through the command's own "Error:" line
    console_handler.addFilter(lambda record: record.levelno < logging.ERROR)
    logger.addHandler(console_handler)


def _load(path: str) -> Transducer:
    transducer, error = load_transducer(path)
    if error:
        raise NormcheckError(error)
    require_valid(transducer)
    return transducer


def _print(text: str) -> None:
    console.out(text, end="" if text.endswith("\n") else "\n")


def cmd_check(args: argparse.Namespace, settings: Dict) -> int:
    transducer = _load(args.path)
    verdict = asyncio.run(preserves_normality_async(transducer, max_workers=args.workers))
    _print(explain(verdict))
    return EXIT_OK if verdict.preserves else EXIT_FAILED


def cmd_freq(args: argparse.Namespace, settings: Dict) -> int:
    transducer = _load(args.path)
    components = analyzed_components(transducer)
    for component in components:
        prefix = "" if len(components) == 1 else f"component {' '.join(str(q) for q in sorted(component))}: "
        try:
            built = build_frequency_automaton(restrict(transducer, component))
        except AllOutputsEmpty:
            _print(f"{prefix}undefined ({ComponentStatus.ALL_EMPTY_OUTPUT.value})")
            continue
        except (DivergentStar, NonUniqueStationary) as e:
            _print(f"{prefix}undefined ({ComponentStatus.DEGENERATE.value}: {e})")
            continue
        _print(f"{prefix}{word_weight(built.automaton, args.word)}")
    return EXIT_OK


def cmd_build(args: argparse.Namespace, settings: Dict) -> int:
    transducer = _load(args.path)
    components = analyzed_components(transducer)
    for number, component in enumerate(components, start=1):
        if len(components) > 1:
            _print(f"# component {number}: states {' '.join(str(q) for q in sorted(component))}")
        built = build_frequency_automaton(restrict(transducer, component))
        _print(serialize_weighted_automaton(built.automaton))
        if not args.no_matrices:
            _print(render_matrices(built))
    return EXIT_OK


def cmd_run(args: argparse.Namespace, settings: Dict) -> int:
    transducer = _load(args.path)
    n = args.n if args.n is not None else settings["run_length"]
    source = open_source(args.source, transducer.input_alphabet)
    _print(run(transducer, source, n))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, settings: Dict) -> int:
    transducer = _load(args.path)
    n = args.n if args.n is not None else settings["sim_length"]
    max_len = args.max_len if args.max_len is not None else settings["max_len"]
    tolerance = args.tolerance if args.tolerance is not None else settings["tolerance"]
    source = open_source(args.source, transducer.input_alphabet)
    with err_console.status(f"Simulating {n} input symbols..."):
        report = compare_empirical(transducer, n, max_len, source)
    if args.csv:
        _print(report.to_csv())
    else:
        console.print(report.to_table())
    return EXIT_OK if report.max_gap < tolerance else EXIT_FAILED


def cmd_states(args: argparse.Namespace, settings: Dict) -> int:
    transducer = _load(args.path)
    n = args.n if args.n is not None else settings["sim_length"]
    tolerance = args.tolerance if args.tolerance is not None else settings["tolerance"]
    source = open_source(args.source, transducer.input_alphabet)
    with err_console.status(f"Tracing {n} input symbols..."):
        report = compare_state_frequencies(transducer, n, source)
    if args.csv:
        _print(report.to_csv())
    else:
        console.print(report.to_table())
    return EXIT_OK if report.max_gap < tolerance else EXIT_FAILED


COMMANDS: Dict[str, Callable[[argparse.Namespace, Dict], int]] = {
    "check": cmd_check,
    "freq": cmd_freq,
    "build": cmd_build,
    "run": cmd_run,
    "simulate": cmd_simulate,
    "states": cmd_states,
}


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="normcheck", description=__doc__)
    parser.add_argument("--version", action="version", version=f"normcheck {VERSION}")
    parser.add_argument("--log-level", help="override log_level from settings.json")
    parser.add_argument("--timing", action="store_true", help="print transducer size and wall time")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="decide preservation of normality")
    check.add_argument("path")
    check.add_argument("--workers", type=positive_int, default=4, help="components analysed concurrently")

    freq = sub.add_parser("freq", help="predicted frequency of an output word")
    freq.add_argument("path")
    freq.add_argument("word")

    build = sub.add_parser("build", help="emit the frequency automaton and its matrices")
    build.add_argument("path")
    build.add_argument("--no-matrices", action="store_true", help="skip the matrix dump")

    for name, help_text in (
        ("run", "print the output on a prefix of an input source"),
        ("simulate", "compare empirical block frequencies with predictions"),
        ("states", "compare empirical state frequencies with the stationary distribution"),
    ):
        command = sub.add_parser(name, help=help_text)
        command.add_argument("path")
        command.add_argument("--source", default="champernowne", help="champernowne:<k>, random:<seed> or file:<path>")
        command.add_argument("-n", type=int, help="number of input symbols")
        if name == "simulate":
            command.add_argument("--max-len", type=int, help="longest output block compared")
        if name != "run":
            command.add_argument("--tolerance", type=float, help="largest acceptable gap")
            command.add_argument("--csv", action="store_true", help="comma-separated output")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = load_settings()
    setup_logging(args.log_level or settings.get("log_level", "INFO"))
    cli_logger.debug(f"main: {args}")

    started = time.perf_counter()
    try:
        status = COMMANDS[args.command](args, settings)
    except (NormcheckError, OSError, ValueError) as e:
        cli_logger.error(f"{args.command} failed: {e}")
        err_console.print(f"[bold red]Error:[/] {e}", markup=True, soft_wrap=True)
        return EXIT_INVALID
    except Exception as e:
        cli_logger.exception(f"{args.command} crashed: {e}")
        err_console.print(f"[bold red]Internal error:[/] {e}", markup=True, soft_wrap=True)
        return EXIT_INVALID

    if args.timing:
        transducer, _ = load_transducer(args.path)
        elapsed = time.perf_counter() - started
        measure = size(transducer) if transducer else "?"
        err_console.print(f"size {measure}, wall time {elapsed:.3f}s")
    return status


if __name__ == "__main__":
    sys.exit(main())
