"""Argument parser module."""
from __future__ import annotations

import argparse
import logging
from typing import Optional, Sequence

from colorama import Fore, Style

from igacontact.config.defs import BenchmarkKind, ConfigError, Discretization

_LOGGER = logging.getLogger(__name__)


def get_default_descript_txt() -> str:
    return (
        f"{Fore.GREEN}IGA Contact Command Line Interface\n{Style.RESET_ALL}This"
        " application runs large deformation frictional contact problems discretized with\n"
        "varying-order NURBS and evaluates the contact benchmarks.\n"
    )


def create_default_args_parser(
    parent_parser: argparse.ArgumentParser,
    descript_txt: Optional[str] = None,
) -> argparse.ArgumentParser:
    if descript_txt is None:
        descript_txt = get_default_descript_txt()
    return argparse.ArgumentParser(
        description=descript_txt,
        formatter_class=argparse.RawTextHelpFormatter,
        parents=[parent_parser],
    )


def _discretization(value: str) -> Discretization:
    try:
        return Discretization.parse(value)
    except ConfigError as e:
        raise argparse.ArgumentTypeError(e.reason)


def _positive_int(value: str) -> int:
    out = int(value)
    if out < 1:
        raise argparse.ArgumentTypeError(f"{value} is not a positive integer")
    return out


def _positive_float(value: str) -> float:
    out = float(value)
    if out <= 0.0:
        raise argparse.ArgumentTypeError(f"{value} is not positive")
    return out


def add_default_args(parser: argparse.ArgumentParser):
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Debug output on the console"
    )
    parser.add_argument(
        "--no-color", action="store_true", help="Disable colored console output"
    )


def add_case_override_arguments(parser: argparse.ArgumentParser):
    """Overrides shared by ``run``, ``sweep`` and ``setup``."""
    parser.add_argument(
        "--ngp",
        type=_positive_int,
        default=None,
        help="Slave Gauss points per direction and element, default 4 (p_c + 1)",
    )
    parser.add_argument(
        "--step-scale",
        type=_positive_float,
        default=None,
        help="Scale factor applied to all stage step counts",
    )


def add_run_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("config", help="Problem configuration file (JSON)")
    parser.add_argument(
        "--mesh-level",
        type=_positive_int,
        default=None,
        help="Rebuild a benchmark configuration at this mesh level",
    )
    parser.add_argument(
        "--disc",
        type=_discretization,
        default=None,
        help="Discretization tag, for example N2, N2-N2.1, N2-N2.2, N4, N5",
    )
    add_case_override_arguments(parser)
    parser.add_argument("-o", "--out", default="runs", help="Output directory")
    parser.add_argument(
        "--serial",
        action="store_true",
        help="Evaluate elements serially (bitwise reproducible)",
    )


def add_sweep_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("config", help="Problem configuration file (JSON)")
    parser.add_argument(
        "--disc",
        type=_discretization,
        nargs="+",
        required=True,
        help="Discretization tags to compare",
    )
    parser.add_argument(
        "--mesh-levels", type=_positive_int, nargs="+", default=None, help="Mesh levels"
    )
    parser.add_argument(
        "--reference",
        default=None,
        help=(
            "Case name used as reference for torque deviations,\n"
            "default is the finest mesh with the highest elevation"
        ),
    )
    add_case_override_arguments(parser)
    parser.add_argument("-o", "--out", default="runs", help="Output directory")
    parser.add_argument(
        "--serial", action="store_true", help="Run the cases one after another"
    )
    parser.add_argument(
        "-j", "--jobs", type=_positive_int, default=None, help="Worker processes"
    )


def add_setup_arguments(parser: argparse.ArgumentParser):
    choices = [b.value for b in BenchmarkKind if b != BenchmarkKind.CUSTOM]
    parser.add_argument("benchmark", choices=choices, help="Benchmark to configure")
    parser.add_argument("--mesh-level", type=_positive_int, default=1, help="Mesh level")
    parser.add_argument(
        "--disc",
        type=_discretization,
        default=None,
        help="Discretization tag, the patch test uses N<p> only",
    )
    parser.add_argument(
        "--friction", action="store_true", help="Frictional variant (twisting)"
    )
    add_case_override_arguments(parser)
    parser.add_argument("-o", "--output", required=True, help="Configuration file to write")


def add_metrics_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("run_dir", help="Run directory written by the run command")


def add_dofs_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("config", help="Problem configuration file (JSON)")
    parser.add_argument(
        "--disc",
        type=_discretization,
        nargs="+",
        default=None,
        help="Discretizations listed in the table, default the configured one",
    )
    parser.add_argument(
        "--mesh-level", type=_positive_int, default=None, help="Benchmark mesh level"
    )


def create_cli_parser(descript_txt: Optional[str] = None) -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    add_default_args(parent)
    parser = create_default_args_parser(parent, descript_txt)
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    for name, help_txt, add in (
        ("run", "Run one problem", add_run_arguments),
        ("metrics", "Recompute the metrics of a run directory", add_metrics_arguments),
        ("sweep", "Run a set of discretizations and mesh levels", add_sweep_arguments),
        ("setup", "Write a benchmark configuration", add_setup_arguments),
        ("dofs", "Print the DOF table of a configuration", add_dofs_arguments),
    ):
        cmd = sub.add_parser(
            name,
            help=help_txt,
            description=help_txt,
            formatter_class=argparse.RawTextHelpFormatter,
        )
        add(cmd)
    return parser


def parse_cli_arguments(
    parser: argparse.ArgumentParser, argv: Optional[Sequence[str]] = None
) -> argparse.Namespace:
    args, unknown = parser.parse_known_args(argv)
    if unknown:
        _LOGGER.warning(f"Unknown arguments ignored: {unknown}")
    return args
