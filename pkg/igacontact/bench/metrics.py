"""Benchmark metrics: oscillation amplitudes, Hertz pressure errors, torques.

The metric functions are pure. :py:func:`compute_metrics` reads a run directory written by
:py:mod:`igacontact.bench.output` and evaluates the metrics matching its benchmark kind.
"""
from __future__ import annotations

import logging
import os
import re
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from igacontact.config import BenchmarkKind, ProblemConfig, load_config

_LOGGER = logging.getLogger(__name__)

HISTORY_FILE_NAME = "history.csv"
CONFIG_FILE_NAME = "config.json"
METRICS_FILE_NAME = "metrics.json"
CONTACT_DIR_NAME = "contact"
SNAPSHOT_DIR_NAME = "snapshots"

HISTORY_COLUMNS = (
    "step",
    "stage",
    "u_z",
    "u_x_or_theta",
    "P_z",
    "P_x",
    "torque",
    "active",
    "stick",
    "slip",
)
CONTACT_COLUMNS = (
    "point",
    "X",
    "Y",
    "Z",
    "x",
    "y",
    "z",
    "gap",
    "pressure",
    "tangential",
    "status",
    "weight",
)


class EmptyWindowError(Exception):
    def __init__(self, name: str, *args, **kwargs):
        super().__init__(args, kwargs)
        self.name = name

    def __str__(self):
        return f"Analysis window {self.name!r} holds no samples"


class SamplingMismatchError(Exception):
    def __init__(self, expected: Tuple[int, ...], got: Tuple[int, ...], *args, **kwargs):
        super().__init__(args, kwargs)
        self.expected = expected
        self.got = got

    def __str__(self):
        return f"Fields sampled differently: shapes {self.expected} and {self.got}"


@dataclass(frozen=True)
class HertzSolution:
    """Small strain Hertz contact of an elastic sphere on a rigid plane.

    :var a: Contact radius
    :var p0: Peak pressure
    :var approach: Rigid body approach a^2 / R
    """

    total_load: float
    radius: float
    e_star: float
    a: float
    p0: float
    approach: float

    def pressure(self, r: np.ndarray) -> np.ndarray:
        ratio = np.clip(1.0 - (np.asarray(r, dtype=float) / self.a) ** 2, 0.0, None)
        return self.p0 * np.sqrt(ratio)


@dataclass
class BenchmarkMetrics:
    """Metrics of one run.

    :var window: First and last step of the analysis window
    :var amplitudes: ``max - min`` of P_z, P_x and torque over the window
    :var means: Window averages of the same series
    :var values: Benchmark specific scalars
    :var series: Full per step histories
    """

    benchmark: str
    case: str
    n_steps: int
    expected_steps: int
    window: Tuple[int, int]
    amplitudes: Dict[str, float] = field(default_factory=dict)
    means: Dict[str, float] = field(default_factory=dict)
    values: Dict[str, float] = field(default_factory=dict)
    series: Dict[str, List[float]] = field(default_factory=dict)

    @property
    def aborted(self) -> bool:
        return self.n_steps < self.expected_steps

    def to_dict(self) -> dict:
        out = asdict(self)
        out["window"] = list(self.window)
        out["aborted"] = self.aborted
        return out


def oscillation_amplitude(series: Sequence[float], name: str = "series") -> float:
    """``max - min`` of a series restricted to its analysis window.

    :raises EmptyWindowError: No samples
    """
    values = np.asarray(series, dtype=float)
    if values.size == 0:
        raise EmptyWindowError(name)
    return float(values.max() - values.min())


def average_over_window(series: Sequence[float], window: np.ndarray, name: str = "series") -> float:
    """Mean of ``series`` over the boolean or index ``window``.

    :raises EmptyWindowError: No samples
    """
    values = np.asarray(series, dtype=float)[window]
    if values.size == 0:
        raise EmptyWindowError(name)
    return float(values.mean())


def analysis_window(
    stages: Sequence[str], stage: Optional[str], skip: float = 0.1
) -> np.ndarray:
    """Boolean mask of the steps of ``stage`` without the leading ``skip`` fraction. All
    steps when ``stage`` is None.

    :raises EmptyWindowError: Stage absent or fully skipped
    """
    stages = np.asarray(stages, dtype=object)
    if stage is None:
        mask = np.ones(len(stages), dtype=bool)
    else:
        mask = stages == stage
        idx = np.flatnonzero(mask)
        mask[idx[: int(round(skip * len(idx)))]] = False
    if not np.any(mask):
        raise EmptyWindowError(stage or "all")
    return mask


def l2_pressure_error(
    pressure: np.ndarray, reference: np.ndarray, weights: np.ndarray
) -> float:
    """``sqrt(sum w (p_ref - p)^2)``, the quadrature of the squared pressure difference over the
    contact surface.

    :raises SamplingMismatchError: Fields and weights not on the same points
    """
    p = np.asarray(pressure, dtype=float)
    ref = np.asarray(reference, dtype=float)
    w = np.asarray(weights, dtype=float)
    if p.shape != ref.shape:
        raise SamplingMismatchError(ref.shape, p.shape)
    if w.shape != p.shape:
        raise SamplingMismatchError(p.shape, w.shape)
    return float(np.sqrt(np.sum(w * (ref - p) ** 2)))


def torque_about_axis(
    points: np.ndarray,
    forces: np.ndarray,
    axis_point: Sequence[float],
    axis: Sequence[float],
) -> float:
    """Moment of point forces about an axis: ``sum (x_i - c) x f_i`` projected on the unit
    axis direction."""
    d = np.asarray(axis, dtype=float)
    d = d / np.linalg.norm(d)
    arms = np.atleast_2d(points) - np.asarray(axis_point, dtype=float)
    moment = np.cross(arms, np.atleast_2d(forces)).sum(axis=0)
    return float(moment @ d)


def hertz_solution(total_load: float, radius: float, E: float, nu: float) -> HertzSolution:
    if total_load <= 0.0 or radius <= 0.0:
        raise ValueError(f"load {total_load} and radius {radius} must be positive")
    e_star = E / (1.0 - nu**2)
    a = (3.0 * total_load * radius / (4.0 * e_star)) ** (1.0 / 3.0)
    p0 = 3.0 * total_load / (2.0 * np.pi * a**2)
    return HertzSolution(
        total_load=total_load, radius=radius, e_star=e_star, a=a, p0=p0, approach=a**2 / radius
    )


def normalized_pressure_profile(
    r: np.ndarray, pressure: np.ndarray, solution: HertzSolution
) -> Tuple[np.ndarray, np.ndarray]:
    """``(r/a, p/p0)`` samples."""
    return np.asarray(r, dtype=float) / solution.a, np.asarray(pressure, dtype=float) / solution.p0


def amplitude_reduction(run: float, baseline: float) -> float:
    """Amplitude of ``run`` in percent of ``baseline``."""
    if baseline <= 0.0:
        return float("nan")
    return 100.0 * run / baseline


def torque_deviation(run: Sequence[float], reference: Sequence[float]) -> float:
    """``|mean(run) - mean(reference)|`` of two windowed torque series."""
    return abs(
        average_over_window(run, slice(None), "run")
        - average_over_window(reference, slice(None), "reference")
    )


def stick_fractions(stick: np.ndarray, active: np.ndarray) -> np.ndarray:
    active = np.asarray(active, dtype=float)
    return np.divide(
        np.asarray(stick, dtype=float), active, out=np.zeros_like(active), where=active > 0
    )


def slip_dominant_from(angles: np.ndarray, slip: np.ndarray, active: np.ndarray) -> float:
    """Smallest angle from which more than half of the active points slip at every later step,
    nan if slipping never dominates."""
    slip_frac = stick_fractions(slip, active)
    dominant = slip_frac > 0.5
    if not dominant.size or not dominant[-1]:
        return float("nan")
    first = len(dominant)
    for k in range(len(dominant) - 1, -1, -1):
        if not dominant[k]:
            break
        first = k
    return float(angles[first])


def read_history(path: str) -> Dict[str, np.ndarray]:
    """Columns of a history CSV."""
    with open(path, encoding="utf-8") as f:
        raw = np.genfromtxt(f, delimiter=",", names=True, dtype=None, encoding="utf-8")
    raw = np.atleast_1d(raw)
    missing = [c for c in HISTORY_COLUMNS if c not in (raw.dtype.names or ())]
    if missing:
        raise ValueError(f"{path}: missing history columns {missing}")
    out = {name: np.asarray(raw[name], dtype=float) for name in HISTORY_COLUMNS if name != "stage"}
    out["stage"] = np.asarray(raw["stage"], dtype=str)
    return out


def read_contact_fields(path: str) -> Dict[str, np.ndarray]:
    with open(path, encoding="utf-8") as f:
        data = np.atleast_2d(np.loadtxt(f, delimiter=",", skiprows=1))
    return {name: data[:, i] for i, name in enumerate(CONTACT_COLUMNS)}


def last_contact_file(run_dir: str) -> Optional[str]:
    directory = os.path.join(run_dir, CONTACT_DIR_NAME)
    if not os.path.isdir(directory):
        return None
    files = sorted(f for f in os.listdir(directory) if re.fullmatch(r"step_\d+\.csv", f))
    return os.path.join(directory, files[-1]) if files else None


def _patch_values(cfg: ProblemConfig, fields: Dict[str, np.ndarray]) -> Dict[str, float]:
    applied = abs(cfg.pressures[0].pressure)
    used = fields["weight"] > 0.0
    error = np.abs(fields["pressure"][used] - applied) / applied
    return {
        "applied_pressure": applied,
        "max_relative_error": float(error.max()) if error.size else float("nan"),
        "mean_pressure": float(np.average(fields["pressure"][used], weights=fields["weight"][used])),
    }


def _hertz_values(
    cfg: ProblemConfig, history: Dict[str, np.ndarray], fields: Dict[str, np.ndarray]
) -> Dict[str, float]:
    slave = cfg.body(cfg.contacts[0].slave)
    radius = float(slave.params["r_outer"])
    center = np.asarray(slave.params.get("center", (0.0, 0.0, 0.0)), dtype=float)
    load = abs(history["P_z"][-1]) * cfg.analysis.load_multiplier
    sol = hertz_solution(load, radius, slave.material.E, slave.material.nu)
    r = np.hypot(fields["x"] - center[0], fields["y"] - center[1])
    r_hat, p_hat = normalized_pressure_profile(r, fields["pressure"], sol)
    ref_hat = sol.pressure(r) / sol.p0
    active = fields["status"] > 0
    penetration = float(-fields["gap"][active].min()) if np.any(active) else 0.0
    return {
        "total_load": load,
        "contact_radius": sol.a,
        "p0": sol.p0,
        "p_max": float(fields["pressure"].max()),
        "p_max_ratio": float(fields["pressure"].max() / sol.p0),
        "l2_error": l2_pressure_error(p_hat, ref_hat, fields["weight"]),
        "max_penetration_ratio": penetration / radius,
        "indentation_ratio": abs(history["u_z"][-1]) / radius,
        "contact_extent_ratio": float(r_hat[active].max()) if np.any(active) else 0.0,
    }


def _friction_values(
    history: Dict[str, np.ndarray], stage: Optional[str]
) -> Tuple[Dict[str, float], Dict[str, List[float]]]:
    mask = history["stage"] == stage if stage is not None else np.ones(len(history["step"]), bool)
    active = history["active"][mask]
    fractions = stick_fractions(history["stick"][mask], active)
    angles = history["u_x_or_theta"][mask]
    values = {
        "slip_dominant_from": slip_dominant_from(angles, history["slip"][mask], active),
        "final_stick_fraction": float(fractions[-1]) if fractions.size else float("nan"),
    }
    return values, {"stick_fraction": fractions.tolist(), "angle": angles.tolist()}


def metrics_from_history(
    cfg: ProblemConfig,
    history: Dict[str, np.ndarray],
    contact_fields: Optional[Dict[str, np.ndarray]] = None,
    expected_steps: Optional[int] = None,
) -> BenchmarkMetrics:
    """Evaluate the metrics of one run from its history columns and the final contact fields."""
    steps = history["step"].astype(int)
    window = analysis_window(
        history["stage"], cfg.analysis.window_stage, cfg.analysis.window_skip
    )
    disc = {b.discretization.tag for b in cfg.bodies}
    out = BenchmarkMetrics(
        benchmark=cfg.meta.benchmark.value,
        case="/".join(sorted(disc)),
        n_steps=len(steps),
        expected_steps=expected_steps or sum(s.steps for s in cfg.stages),
        window=(int(steps[window][0]), int(steps[window][-1])),
    )
    for key in ("P_z", "P_x", "torque"):
        out.amplitudes[key] = oscillation_amplitude(history[key][window], key)
        out.means[key] = average_over_window(history[key], window, key)
        out.series[key] = history[key].tolist()
    out.series["step"] = steps.tolist()
    kind = cfg.meta.benchmark
    if kind == BenchmarkKind.PATCH_TEST and contact_fields is not None:
        out.values.update(_patch_values(cfg, contact_fields))
    elif kind == BenchmarkKind.HERTZ and contact_fields is not None:
        out.values.update(_hertz_values(cfg, history, contact_fields))
    if any(s.friction for s in cfg.stages) and any(c.mu_f > 0.0 for c in cfg.contacts):
        values, series = _friction_values(history, cfg.analysis.window_stage)
        out.values.update(values)
        out.series.update(series)
    return out


def compute_metrics(run_dir: str) -> BenchmarkMetrics:
    """Metrics of a run directory holding ``config.json``, ``history.csv`` and ``contact/``.

    :raises ConfigError: Unreadable configuration echo
    :raises EmptyWindowError: The run stopped before the analysis window
    """
    cfg = load_config(os.path.join(run_dir, CONFIG_FILE_NAME))
    history = read_history(os.path.join(run_dir, HISTORY_FILE_NAME))
    contact_file = last_contact_file(run_dir)
    fields = read_contact_fields(contact_file) if contact_file else None
    metrics = metrics_from_history(cfg, history, fields)
    if metrics.aborted:
        _LOGGER.warning(
            f"{run_dir}: run stopped after {metrics.n_steps} of {metrics.expected_steps} steps"
        )
    return metrics
