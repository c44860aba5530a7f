"""Command line entry point ``igacontact``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import colorama

from igacontact import init_logger
from igacontact.bench import (
    OutputError,
    amplitude_reduction,
    apply_overrides,
    build_body,
    case_name,
    compute_metrics,
    run_case,
    setup_benchmark,
    torque_deviation,
)
from igacontact.config import (
    BenchmarkKind,
    ConfigError,
    Discretization,
    ProblemConfig,
    create_cli_parser,
    load_config,
    parse_cli_arguments,
    save_config,
)
from igacontact.nurbs import dof_summary, format_dof_table

_LOGGER = logging.getLogger(__name__)

SWEEP_FILE_NAME = "sweep.json"


def _log_metrics(metrics):
    if metrics is None:
        return
    _LOGGER.info(
        f"{metrics.case}: {metrics.n_steps}/{metrics.expected_steps} steps, "
        f"window steps {metrics.window[0]}-{metrics.window[1]}"
    )
    for key, value in metrics.amplitudes.items():
        _LOGGER.info(f"  amplitude {key:<8} {value:.6g}  mean {metrics.means[key]:.6g}")
    for key, value in metrics.values.items():
        _LOGGER.info(f"  {key:<24} {value:.6g}")


def cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    cfg = apply_overrides(
        cfg, args.mesh_level, args.disc, args.ngp, args.step_scale, serial=args.serial
    )
    result = run_case(cfg, args.out)
    _log_metrics(result.metrics)
    _LOGGER.info(f"Results written to {result.run_dir}")
    return 1 if result.history.aborted else 0


def cmd_metrics(args: argparse.Namespace) -> int:
    metrics = compute_metrics(args.run_dir)
    _log_metrics(metrics)
    print(json.dumps(metrics.to_dict()["amplitudes"], indent=2))
    return 0


def _sweep_case(cfg: ProblemConfig, out_dir: str) -> Tuple[str, Optional[dict], bool]:
    result = run_case(cfg, out_dir)
    metrics = None if result.metrics is None else result.metrics.to_dict()
    return case_name(cfg), metrics, result.history.aborted


def default_reference(cases: Sequence[ProblemConfig]) -> str:
    """Finest mesh level, then highest elevation, then highest degree."""
    best = max(
        cases,
        key=lambda c: (
            c.meta.mesh_level,
            c.bodies[0].discretization.steps,
            c.bodies[0].discretization.degree,
        ),
    )
    return case_name(best)


def sweep_table(
    cases: Sequence[ProblemConfig], results: Dict[str, Optional[dict]], reference: str
) -> List[dict]:
    """Amplitudes per case, in percent of the first discretization at the same mesh level, and
    the deviation of the windowed mean torque from the reference case."""
    rows = []
    baselines: Dict[int, dict] = {}
    ref = results.get(reference)
    for cfg in cases:
        name = case_name(cfg)
        m = results.get(name)
        if m is None:
            rows.append({"case": name, "failed": True})
            continue
        base = baselines.setdefault(cfg.meta.mesh_level, m)
        row = {"case": name, "failed": False}
        for key in ("P_z", "P_x", "torque"):
            row[f"d{key}"] = m["amplitudes"][key]
            row[f"d{key}_percent"] = amplitude_reduction(
                m["amplitudes"][key], base["amplitudes"][key]
            )
        if ref is not None:
            row["torque_deviation"] = torque_deviation(
                [m["means"]["torque"]], [ref["means"]["torque"]]
            )
        rows.append(row)
    return rows


def _format_sweep(rows: Sequence[dict]) -> str:
    header = ["Case", "dP_z", "%", "dP_x", "%", "dTorque", "%", "Torque dev."]
    table = [header]
    for r in rows:
        if r["failed"]:
            table.append([r["case"]] + ["-"] * (len(header) - 1))
            continue
        table.append(
            [
                r["case"],
                f"{r['dP_z']:.4g}",
                f"{r['dP_z_percent']:.2f}",
                f"{r['dP_x']:.4g}",
                f"{r['dP_x_percent']:.2f}",
                f"{r['dtorque']:.4g}",
                f"{r['dtorque_percent']:.2f}",
                f"{r.get('torque_deviation', float('nan')):.4g}",
            ]
        )
    widths = [max(len(line[c]) for line in table) for c in range(len(header))]
    return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(line, widths)) for line in table)


def cmd_sweep(args: argparse.Namespace) -> int:
    base = load_config(args.config)
    levels = args.mesh_levels or [None]
    cases = [
        apply_overrides(base, level, disc, args.ngp, args.step_scale, serial=True)
        for level in levels
        for disc in args.disc
    ]
    names = [case_name(c) for c in cases]
    if len(set(names)) != len(names):
        raise ConfigError("sweep", f"duplicate cases {names}")
    results: Dict[str, Optional[dict]] = {}
    aborted = 0
    if args.serial or len(cases) == 1:
        outcomes = [_sweep_case(c, args.out) for c in cases]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_sweep_case, cases, [args.out] * len(cases)))
    for name, metrics, failed in outcomes:
        results[name] = metrics
        aborted += int(failed)
    reference = args.reference or default_reference(cases)
    if reference not in results:
        raise ConfigError("reference", f"unknown case {reference!r}, cases are {names}")
    rows = sweep_table(cases, results, reference)
    print(_format_sweep(rows))
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, SWEEP_FILE_NAME), "w") as f:
        json.dump({"reference": reference, "rows": rows}, f, indent=2)
        f.write("\n")
    return 1 if aborted else 0


def cmd_setup(args: argparse.Namespace) -> int:
    cfg = setup_benchmark(
        BenchmarkKind(args.benchmark),
        args.mesh_level,
        args.disc,
        args.friction,
        args.ngp,
        args.step_scale,
    )
    save_config(cfg, args.output)
    _LOGGER.info(f"Wrote {args.benchmark} configuration to {args.output}")
    return 0


def dof_table(cfg: ProblemConfig, discs: Sequence[Optional[Discretization]], mesh_level=None) -> str:
    rows = []
    labels = []
    for disc in discs:
        case = apply_overrides(cfg, mesh_level, disc)
        rows.append([dof_summary(build_body(spec)) for spec in case.bodies])
        labels.append(case.bodies[0].discretization.tag)
    return format_dof_table(rows, labels)


def cmd_dofs(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    print(dof_table(cfg, args.disc or [None], args.mesh_level))
    return 0


_COMMANDS = {
    "run": cmd_run,
    "metrics": cmd_metrics,
    "sweep": cmd_sweep,
    "setup": cmd_setup,
    "dofs": cmd_dofs,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    if os.name == "nt":
        colorama.init()
    parser = create_cli_parser()
    args = parse_cli_arguments(parser, argv)
    init_logger(
        propagate=False,
        log_level=logging.DEBUG if args.verbose else logging.INFO,
        no_color=args.no_color,
    )
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, OutputError) as e:
        _LOGGER.error(str(e))
        return 2
    except KeyboardInterrupt:
        _LOGGER.warning("Interrupted")
        return 130


if __name__ == "__main__":
    sys.exit(main())
