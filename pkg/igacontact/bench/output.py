"""Run directories: history CSV, contact point CSVs, VTK snapshots and the metrics summary."""
from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, TextIO

import numpy as np

from igacontact import get_lib_logger
from igacontact.bench.metrics import (
    CONFIG_FILE_NAME,
    CONTACT_COLUMNS,
    CONTACT_DIR_NAME,
    HISTORY_COLUMNS,
    HISTORY_FILE_NAME,
    METRICS_FILE_NAME,
    SNAPSHOT_DIR_NAME,
    BenchmarkMetrics,
    EmptyWindowError,
    compute_metrics,
    torque_about_axis,
)
from igacontact.bench.model import BuiltProblem, build_model
from igacontact.config import ProblemConfig, config_to_dict, save_config
from igacontact.continuum import MaterialParams, cauchy_stress, deformation_state
from igacontact.contact import ContactEvaluation, ContactPair
from igacontact.logging import (
    add_run_file_logger,
    get_current_time_string,
    remove_run_file_logger,
)
from igacontact.nurbs import VOBody, dof_summary
from igacontact.solver import (
    CutbackExhausted,
    GlobalSystem,
    LoadProgram,
    RunHistory,
    RunHooks,
    StepRecord,
    run_load_program,
)

_LOGGER = logging.getLogger(__name__)

# VTK cell type of linear hexahedra
VTK_HEX = 12
_HEX_CORNERS = ((0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0), (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1))
# Parametric Jacobians below this determinant (collapsed poles) get no stress value
_DEGENERATE_DET = 1e-12


class OutputError(Exception):
    def __init__(self, path: str, reason: str, *args, **kwargs):
        super().__init__(args, kwargs)
        self.path = path
        self.reason = reason

    def __str__(self):
        return f"Cannot write output {self.path!r}: {self.reason}"


def case_name(cfg: ProblemConfig) -> str:
    tags = []
    for b in cfg.bodies:
        if b.discretization.tag not in tags:
            tags.append(b.discretization.tag)
    return f"{cfg.meta.benchmark.value}_m{cfg.meta.mesh_level}_{'_'.join(tags)}"


def prepare_run_dir(path: str) -> str:
    """:raises OutputError: The directory cannot be created or written"""
    try:
        os.makedirs(os.path.join(path, CONTACT_DIR_NAME), exist_ok=True)
    except OSError as e:
        raise OutputError(path, str(e)) from e
    if not os.access(path, os.W_OK):
        raise OutputError(path, "directory is not writable")
    return path


def _fmt(value: float) -> str:
    return f"{value:.10g}"


class HistoryWriter:
    """One CSV row per converged step, flushed right away so aborted runs keep their rows."""

    def __init__(self, path: str):
        self.path = path
        self._file: Optional[TextIO] = None

    def open(self):
        self._file = open(self.path, "w", encoding="utf-8")
        self._file.write(",".join(HISTORY_COLUMNS) + "\n")
        self._file.flush()

    def write(self, row: Dict[str, object]):
        cells = []
        for key in HISTORY_COLUMNS:
            value = row[key]
            cells.append(_fmt(value) if isinstance(value, float) else str(value))
        self._file.write(",".join(cells) + "\n")
        self._file.flush()

    def close(self):
        if self._file is not None:
            self._file.close()
            self._file = None


def write_contact_csv(path: str, pair: ContactPair, ev: ContactEvaluation):
    """Slave quadrature point fields of one contact evaluation."""
    ref = pair.quad.ref_points
    rows = np.column_stack(
        [
            np.arange(pair.n_points),
            ref,
            ev.x_current,
            ev.gap,
            ev.pressure,
            ev.tangential,
            np.asarray(ev.status, dtype=int),
            ev.weights,
        ]
    )
    fmt = ["%d"] + ["%.10g"] * 9 + ["%d", "%.10g"]
    with open(path, "w", encoding="utf-8") as f:
        np.savetxt(f, rows, delimiter=",", header=",".join(CONTACT_COLUMNS), comments="", fmt=fmt)


def _element_samples(body: VOBody, subdivisions: int) -> np.ndarray:
    """Parameters (E, m^3, 3) of a uniform (m = subdivisions + 1) grid in every element, first
    direction running fastest."""
    vol = body.volume
    bounds = vol.element_bounds(vol.element_spans())
    t = np.linspace(0.0, 1.0, subdivisions + 1)
    c, b, a = np.meshgrid(t, t, t, indexing="ij")
    local = np.stack([a.ravel(), b.ravel(), c.ravel()], axis=1)
    lo = bounds[:, None, :, 0]
    span = bounds[:, None, :, 1] - lo
    return lo + local[None] * span


def sample_body(
    body: VOBody, u: np.ndarray, mat: MaterialParams, subdivisions: int
) -> Dict[str, np.ndarray]:
    """Reference and current positions and the Cauchy stress component sigma_33 on the
    visualization grid of every element."""
    xis = _element_samples(body, subdivisions).reshape(-1, 3)
    kv3 = body.volume.knot_vectors[2]
    in_layer = xis[:, 2] >= kv3.knots[kv3.n_basis - 1]
    X = np.empty((len(xis), 3))
    x = np.empty((len(xis), 3))
    sigma33 = np.zeros(len(xis))
    for mask, basis_of in ((in_layer, body.layer_basis), (~in_layer, body.bulk_basis)):
        if not np.any(mask):
            continue
        basis = basis_of(xis[mask])
        X[mask] = basis.map(body.points)
        x[mask] = basis.map(body.points + u)
        dX = basis.map_grad(body.points)
        dx = basis.map_grad(body.points + u)
        ok = np.abs(np.linalg.det(dX)) > _DEGENERATE_DET
        if not np.any(ok):
            continue
        F = dx[ok] @ np.linalg.inv(dX[ok])
        idx = np.flatnonzero(mask)[ok]
        sigma33[idx] = cauchy_stress(deformation_state(F), mat)[:, 2, 2]
    return {"X": X, "x": x, "sigma33": sigma33}


def write_vtk(
    path: str,
    bodies: Sequence[VOBody],
    displacements: Sequence[np.ndarray],
    materials: Sequence[MaterialParams],
    subdivisions: int = 2,
    title: str = "igacontact",
):
    """Legacy ASCII unstructured grid of all bodies in their reference configuration with
    point data ``displacement`` and ``sigma_33``."""
    m = subdivisions + 1
    points: List[np.ndarray] = []
    disp: List[np.ndarray] = []
    stress: List[np.ndarray] = []
    cells: List[np.ndarray] = []
    offset = 0
    for body, u, mat in zip(bodies, displacements, materials):
        s = sample_body(body, u, mat, subdivisions)
        n_elements = body.volume.element_count
        points.append(s["X"])
        disp.append(s["x"] - s["X"])
        stress.append(s["sigma33"])
        a, b, c = np.meshgrid(*(np.arange(subdivisions),) * 3, indexing="ij")
        base = (a + m * (b + m * c)).ravel()
        corners = np.stack([base + i + m * (j + m * k) for i, j, k in _HEX_CORNERS], axis=1)
        per_element = np.arange(n_elements)[:, None, None] * m**3
        cells.append((corners[None] + per_element).reshape(-1, 8) + offset)
        offset += n_elements * m**3
    pts = np.concatenate(points)
    hexes = np.concatenate(cells)
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID\n")
        f.write(f"POINTS {len(pts)} double\n")
        np.savetxt(f, pts, fmt="%.10g")
        f.write(f"CELLS {len(hexes)} {9 * len(hexes)}\n")
        np.savetxt(f, np.column_stack([np.full(len(hexes), 8), hexes]), fmt="%d")
        f.write(f"CELL_TYPES {len(hexes)}\n")
        np.savetxt(f, np.full(len(hexes), VTK_HEX), fmt="%d")
        f.write(f"POINT_DATA {len(pts)}\nVECTORS displacement double\n")
        np.savetxt(f, np.concatenate(disp), fmt="%.10g")
        f.write("SCALARS sigma_33 double 1\nLOOKUP_TABLE default\n")
        np.savetxt(f, np.concatenate(stress), fmt="%.10g")


def _rotational(cfg: ProblemConfig) -> bool:
    driven = cfg.analysis.driven_set
    return any(m.angle_deg != 0.0 for s in cfg.stages for m in s.motions if m.set == driven)


def history_row(
    cfg: ProblemConfig,
    program: LoadProgram,
    record: StepRecord,
    torque: Optional[float] = None,
) -> Dict[str, object]:
    """One history CSV row: prescribed motion of the driven set, reaction of the reaction set
    and the moment of the torque set about the configured axis.

    :param torque: Axial moment, taken from ``record.torques`` when omitted
    """
    a = cfg.analysis
    u_z = u_x = 0.0
    if a.driven_set is not None:
        motion = program.motion_at(a.driven_set, record.stage, record.progress)
        u_z = float(motion.translation[2])
        u_x = float(motion.angle_deg) if _rotational(cfg) else float(motion.translation[0])
    reaction = record.reactions[a.reaction_set] if a.reaction_set is not None else np.zeros(3)
    if torque is None:
        torque = 0.0
        if a.torque_set is not None and a.torque_set in record.torques:
            axis = np.asarray(a.torque_axis, dtype=float)
            torque = float(record.torques[a.torque_set] @ axis / np.linalg.norm(axis))
    return {
        "step": record.step,
        "stage": record.stage_name,
        "u_z": u_z,
        "u_x_or_theta": u_x,
        "P_z": float(reaction[2]),
        "P_x": float(reaction[0]),
        "torque": torque,
        "active": record.active,
        "stick": record.stick,
        "slip": record.slip,
    }


def write_snapshot(run_dir: str, cfg: ProblemConfig, built: BuiltProblem, step: int, u: np.ndarray):
    model = built.model
    directory = os.path.join(run_dir, SNAPSHOT_DIR_NAME)
    os.makedirs(directory, exist_ok=True)
    write_vtk(
        os.path.join(directory, f"step_{step:04d}.vtk"),
        [bm.body for bm in model.bodies],
        model.dofs.split(u),
        [bm.material for bm in model.bodies],
        cfg.output.vtk_subdivisions,
        title=f"{case_name(cfg)} step {step}",
    )


class RunOutput(RunHooks):
    """Streams the history, contact fields and snapshots of a run into its directory."""

    def __init__(self, run_dir: str, cfg: ProblemConfig, built: BuiltProblem):
        self.run_dir = run_dir
        self.cfg = cfg
        self.built = built
        self.history = HistoryWriter(os.path.join(run_dir, HISTORY_FILE_NAME))
        self._last: Optional[tuple] = None

    def open(self):
        self.history.open()

    def close(self):
        self.history.close()

    def _torque(self, u: np.ndarray, system: GlobalSystem) -> float:
        a = self.cfg.analysis
        if a.torque_set is None:
            return 0.0
        model = self.built.model
        c = model.constraint(a.torque_set)
        dofs = model.dofs.global_dofs(c.body, c.nodes)
        x = model.bodies[c.body].body.points[c.nodes] + u[dofs]
        return torque_about_axis(x, system.residual[dofs], a.torque_center, a.torque_axis)

    def _write_contact(self, step: int, system: GlobalSystem):
        for i, (pair, ev) in enumerate(zip(self.built.model.pairs, system.contact)):
            suffix = f"_{i}" if i else ""
            path = os.path.join(self.run_dir, CONTACT_DIR_NAME, f"step_{step:04d}{suffix}.csv")
            write_contact_csv(path, pair, ev)

    def on_step(self, record: StepRecord, u: np.ndarray, system: GlobalSystem):
        row = history_row(self.cfg, self.built.program, record, self._torque(u, system))
        self.history.write(row)
        out = self.cfg.output
        written = False
        if out.contact_every > 0 and record.step % out.contact_every == 0:
            self._write_contact(record.step, system)
            written = True
        if out.vtk_every > 0 and record.step % out.vtk_every == 0:
            write_snapshot(self.run_dir, self.cfg, self.built, record.step, u)
        self._last = (record.step, u, system, written)

    def finish(self):
        """Contact fields and snapshot of the last converged step, if not written already."""
        if self._last is None:
            return
        step, u, system, written = self._last
        if not written:
            self._write_contact(step, system)
        if self.cfg.output.vtk_every > 0 and step % self.cfg.output.vtk_every != 0:
            write_snapshot(self.run_dir, self.cfg, self.built, step, u)

    def on_abort(self, history: RunHistory, error: Exception):
        _LOGGER.error(
            f"{case_name(self.cfg)}: aborted after {history.n_steps} converged steps: {error}"
        )


@dataclass
class CaseResult:
    run_dir: str
    history: RunHistory
    metrics: Optional[BenchmarkMetrics]


def write_metrics(run_dir: str, cfg: ProblemConfig, metrics: Optional[BenchmarkMetrics], extra: dict):
    """``metrics.json`` with the metrics, the run status and the full configuration."""
    summary = dict(extra)
    summary["written"] = get_current_time_string(ms_prec=False)
    summary["metrics"] = None if metrics is None else metrics.to_dict()
    summary["config"] = config_to_dict(cfg)
    try:
        with open(os.path.join(run_dir, METRICS_FILE_NAME), "w") as f:
            json.dump(summary, f, indent=2)
            f.write("\n")
    except OSError as e:
        raise OutputError(run_dir, str(e)) from e


def write_outputs(
    run_dir: str,
    cfg: ProblemConfig,
    built: BuiltProblem,
    history: RunHistory,
    metrics: Optional[BenchmarkMetrics] = None,
    extra: Optional[dict] = None,
):
    """Write a finished or aborted run in one go: configuration echo, history CSV, a snapshot of
    the last converged state when snapshots are enabled and the metrics summary. Runs driven by
    :py:class:`RunOutput` stream the same files while stepping.

    :raises OutputError: The run directory cannot be created or written
    """
    prepare_run_dir(run_dir)
    save_config(cfg, os.path.join(run_dir, CONFIG_FILE_NAME))
    writer = HistoryWriter(os.path.join(run_dir, HISTORY_FILE_NAME))
    try:
        writer.open()
        for record in history.records:
            writer.write(history_row(cfg, built.program, record))
    except OSError as e:
        raise OutputError(run_dir, str(e)) from e
    finally:
        writer.close()
    if cfg.output.vtk_every > 0 and history.records and history.u is not None:
        write_snapshot(run_dir, cfg, built, history.records[-1].step, history.u)
    status = f"aborted: {history.message}" if history.aborted else "completed"
    write_metrics(run_dir, cfg, metrics, {"status": status, **(extra or {})})


def run_case(cfg: ProblemConfig, out_dir: str, name: Optional[str] = None) -> CaseResult:
    """Build and run ``cfg`` inside ``out_dir/<case name>``.

    An abort after exhausted cutbacks keeps the partial history and still produces metrics as
    far as the converged steps allow.

    :raises OutputError: The run directory cannot be written
    """
    run_dir = prepare_run_dir(os.path.join(out_dir, name or case_name(cfg)))
    save_config(cfg, os.path.join(run_dir, CONFIG_FILE_NAME))
    lib_logger = get_lib_logger()
    handler = add_run_file_logger(lib_logger, run_dir)
    hooks: Optional[RunOutput] = None
    try:
        built = build_model(cfg)
        dofs = {
            body_name: {"interface": s.interface, "bulk": s.bulk, "total": s.total}
            for body_name, s in ((n, dof_summary(b)) for n, b in built.bodies.items())
        }
        _LOGGER.info(f"{run_dir}: {built.model}, program {built.program}")
        hooks = RunOutput(run_dir, cfg, built)
        hooks.open()
        status = "completed"
        try:
            history = run_load_program(
                built.model, built.program, built.settings, hooks, built.torque_centers
            )
        except CutbackExhausted as e:
            history = e.history
            status = f"aborted at step {e.step}"
        hooks.finish()
    finally:
        if hooks is not None:
            hooks.close()
        remove_run_file_logger(lib_logger, handler)
    metrics = None
    try:
        if history.n_steps:
            metrics = compute_metrics(run_dir)
    except (EmptyWindowError, ValueError) as e:
        _LOGGER.warning(f"{run_dir}: no metrics, {e}")
    write_metrics(
        run_dir,
        cfg,
        metrics,
        {"status": status, "dofs": dofs, "penalties": built.penalties},
    )
    return CaseResult(run_dir=run_dir, history=history, metrics=metrics)
