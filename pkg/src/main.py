import argparse
import io
import logging
import os
import sys

from dotenv import load_dotenv

from cube_core.cube_config import N_CAP_ENV_VAR, default_tolerance, n_cap
from function_sources.generator_source import GeneratorSource
from function_sources.poly_source import PolySource
from function_sources.product_source import ProductSource
from function_sources.truth_table_source import TruthTableSource
from report_writers.csv_writer import CsvReportWriter
from report_writers.json_writer import JsonReportWriter
from verification_core.converters import parse_assignments, parse_sweep
from verification_core.interfaces import AbstractFunctionSource, AbstractReportWriter
from verification_core.manager import VerificationManager
from verification_core.models import CSV, JSON, OUTPUT_FORMATS, RunConfig
from verification_core.registry import COMMANDS

logger = logging.getLogger(__name__)

# flag -> (source kind, help)
SOURCE_FLAGS = {
    "fn": ("generator", "Generator spec, e.g. 'antitribes:s=2,w=3'. See the zoo command."),
    "table": ("truth_table", "Truth-table file: 'n p' header, then 2^n values in index order."),
    "product": ("product", "Product-space file: n, one 'arity p_1 ... p_arity' line per factor, then the values."),
    "poly": ("poly", "Polynomial file: one 'mask value' line per monomial."),
}

# Shorthand flags that become checker parameters.
PARAM_FLAGS = ("rho", "grid", "x", "y", "phi", "samples")

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

WRITERS: dict[str, type[AbstractReportWriter]] = {JSON: JsonReportWriter, CSV: CsvReportWriter}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    sources = common.add_mutually_exclusive_group()
    for flag, (_, text) in SOURCE_FLAGS.items():
        sources.add_argument(f"--{flag}", type=str, help=text)
    common.add_argument("--n", type=int, help="Dimension for generator specs and polynomial files.")
    common.add_argument("--p", type=float, help="Bias; for truth tables it replaces the header value.")
    common.add_argument("--theorem", type=str, help="Which check of the command to run. Defaults to the first.")
    common.add_argument(
        "--param", action="append", default=[], metavar="KEY=VALUE", help="Checker parameter; may be repeated."
    )
    for flag in PARAM_FLAGS:
        common.add_argument(f"--{flag}", type=str, help=f"Shorthand for --param {flag}=VALUE.")
    common.add_argument("--sweep", type=str, help="Parameter sweep, e.g. 'p=0.1,0.2;s=2,3'.")
    common.add_argument("--format", type=str, default=JSON, choices=OUTPUT_FORMATS, help="Report format.")
    common.add_argument("--output", type=str, help="Report file. Defaults to stdout.")
    common.add_argument("--seed", type=int, default=0, help="Seed for the Monte Carlo checks.")
    common.add_argument("--n-cap", type=int, help=f"Dimension cap; overrides {N_CAP_ENV_VAR}.")
    common.add_argument("--tolerance", type=float, help="Relative tolerance shared by every checker.")
    common.add_argument("--timings", action="store_true", help="Add runtime_ms to every verdict.")
    common.add_argument(
        "--log-level", type=str.upper, default="WARNING", choices=LOG_LEVELS, help="Diagnostics threshold on stderr."
    )

    parser = argparse.ArgumentParser(
        description="Exact computation and property checks for p-biased Fourier analysis on the hypercube."
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name, command in COMMANDS.items():
        theorems = ", ".join(ch.theorem for ch in command.checkers)
        epilog = f"Theorems: {theorems}." if theorems else None
        commands.add_parser(name, parents=[common], help=command.description, epilog=epilog)
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    if args.n_cap is not None:
        os.environ[N_CAP_ENV_VAR] = str(args.n_cap)
    n_cap()  # rejects a malformed cap from the environment before anything is built

    source_kind = source = None
    for flag, (kind, _) in SOURCE_FLAGS.items():
        if getattr(args, flag) is not None:
            source_kind, source = kind, getattr(args, flag)

    params = parse_assignments(args.param)
    for flag in PARAM_FLAGS:
        value = getattr(args, flag)
        if value is not None:
            params.update(parse_assignments([f"{flag}={value}"]))

    return RunConfig(
        command=args.command,
        theorem=args.theorem,
        source_kind=source_kind,
        source=source,
        params=params,
        sweep=parse_sweep(args.sweep),
        output_format=args.format,
        output=args.output,
        seed=args.seed,
        n_cap=args.n_cap,
        tolerance=args.tolerance if args.tolerance is not None else default_tolerance(),
        timings=args.timings,
    )


def build_source(config: RunConfig, args: argparse.Namespace) -> AbstractFunctionSource | None:
    if config.source is None:
        return None
    if config.source_kind == "generator":
        return GeneratorSource(config.source, n=args.n, p=args.p)
    if config.source_kind == "truth_table":
        return TruthTableSource(config.source, p=args.p)
    if config.source_kind == "product":
        return ProductSource(config.source)
    return PolySource(config.source, n=args.n)


def main(argv: list[str] | None = None) -> int:
    """Runs one command; returns 0 when every asserted check passes, 1 on a failure, 2 on a bad configuration."""
    load_dotenv()
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(levelname)s: %(message)s", stream=sys.stderr)

    try:
        config = build_config(args)
        manager = VerificationManager(build_source(config, args), WRITERS[config.output_format]())
        buffer = io.StringIO()
        status = manager.run_and_write(config, buffer)
    except (ValueError, FileNotFoundError) as e:
        logger.error("%s", e)
        return 2

    if config.output is None:
        sys.stdout.write(buffer.getvalue())
    else:
        with open(config.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(buffer.getvalue())
        logger.info("Report written to %s", config.output)
    return status


if __name__ == "__main__":
    sys.exit(main())
