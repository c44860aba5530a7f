"""Load stepping with cutback over a :py:class:`LoadProgram`."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from igacontact.continuum import ElementInversionError
from igacontact.solver.defs import CutbackExhausted, LinearSolveError, NewtonDivergence
from igacontact.solver.newton import NewtonSettings, newton_solve
from igacontact.solver.program import LoadProgram
from igacontact.solver.system import GlobalSystem, Model, assemble, set_reaction, set_torque

_LOGGER = logging.getLogger(__name__)

# Failures a smaller load increment may cure
RECOVERABLE = (ElementInversionError, LinearSolveError, NewtonDivergence)


@dataclass
class StepRecord:
    """Converged state at the end of one program step.

    :var progress: Progress in [0, 1] inside the stage
    :var reactions: Total reaction force (3,) per constraint set
    :var torques: Reaction moment (3,) per requested set
    """

    step: int
    stage: int
    stage_name: str
    progress: float
    load_factor: float
    iterations: int
    cutbacks: int
    residual: float
    reactions: Dict[str, np.ndarray]
    torques: Dict[str, np.ndarray]
    active: int
    stick: int
    slip: int
    max_penetration: float


@dataclass
class RunHistory:
    records: List[StepRecord] = field(default_factory=list)
    aborted: bool = False
    message: str = ""
    u: Optional[np.ndarray] = None

    @property
    def n_steps(self) -> int:
        return len(self.records)

    def series(self, name: str, component: int, kind: str = "reactions") -> np.ndarray:
        """Per step component of a set reaction or torque."""
        return np.array([getattr(r, kind)[name][component] for r in self.records])


class RunHooks:
    """Callbacks of the load stepper. The default implementation does nothing."""

    def on_step(self, record: StepRecord, u: np.ndarray, system: GlobalSystem):
        pass

    def on_abort(self, history: RunHistory, error: Exception):
        pass


def _record(
    model: Model,
    system: GlobalSystem,
    u: np.ndarray,
    step: int,
    stage: int,
    stage_name: str,
    progress: float,
    load_factor: float,
    iterations: int,
    cutbacks: int,
    torque_centers: Dict[str, Sequence[float]],
) -> StepRecord:
    free = model.dofs.free
    penetration = max([ev.max_penetration for ev in system.contact], default=0.0)
    return StepRecord(
        step=step,
        stage=stage,
        stage_name=stage_name,
        progress=progress,
        load_factor=load_factor,
        iterations=iterations,
        cutbacks=cutbacks,
        residual=float(np.linalg.norm(system.residual[free])),
        reactions={c.name: set_reaction(model, system, c.name) for c in model.constraints},
        torques={
            name: set_torque(model, system, u, name, center)
            for name, center in torque_centers.items()
        },
        active=system.n_active,
        stick=system.n_stick,
        slip=system.n_slip,
        max_penetration=penetration,
    )


def run_load_program(
    model: Model,
    program: LoadProgram,
    settings: NewtonSettings = NewtonSettings(),
    hooks: Optional[RunHooks] = None,
    torque_centers: Optional[Dict[str, Sequence[float]]] = None,
) -> RunHistory:
    """Run all stages step by step. A failing increment is halved and retried from the last
    converged state, friction history included.

    :raises CutbackExhausted: A step failed after ``settings.max_cutbacks`` halvings, the
        exception carries the history of the converged steps
    """
    hooks = hooks or RunHooks()
    torque_centers = torque_centers or {}
    dirichlet = model.dofs.dirichlet
    u = np.zeros(model.n_dofs)
    histories = model.new_histories()
    history = RunHistory(u=u)
    step = 0
    for si, stage in enumerate(program.stages):
        _LOGGER.info(
            f"stage {si} ({stage.name}): {stage.steps} steps, "
            f"friction {'on' if stage.friction else 'off'}"
        )
        for k in range(stage.steps):
            step += 1
            s_done = k / stage.steps
            s_target = (k + 1) / stage.steps
            ds = s_target - s_done
            cutbacks = 0
            iterations = 0
            result = None
            while s_done < s_target - 1e-14:
                s_new = min(s_done + ds, s_target)
                load = program.load_factor_at(si, s_new)
                trial = u.copy()
                trial[dirichlet] = model.prescribed(program, si, s_new)[dirichlet]

                def build(x, tangent, _load=load, _hist=histories, _fr=stage.friction):
                    return assemble(model, x, _hist, _load, _fr, tangent)

                try:
                    result = newton_solve(build, trial, dirichlet, settings, label=f"step {step}")
                except RECOVERABLE as e:
                    cutbacks += 1
                    for pair in model.pairs:
                        pair.reset_warm_start()
                    if cutbacks > settings.max_cutbacks:
                        history.aborted = True
                        history.message = str(e)
                        _LOGGER.error(f"step {step}: aborting after {cutbacks - 1} cutbacks: {e}")
                        hooks.on_abort(history, e)
                        raise CutbackExhausted(step, history) from e
                    ds *= 0.5
                    _LOGGER.warning(f"step {step}: {e}; cutback {cutbacks}, increment {ds:.4g}")
                    continue
                u = result.u
                s_done = s_new
                iterations += result.n_iterations
                histories = [
                    pair.commit(h, ev, stage.friction)
                    for pair, h, ev in zip(model.pairs, histories, result.system.contact)
                ]
            for pair, ev in zip(model.pairs, result.system.contact):
                if ev.n_unprojected:
                    _LOGGER.warning(
                        f"step {step}: {pair.name}: closest point projection failed at "
                        f"{ev.n_unprojected} of {ev.converged.size} slave points"
                    )
            record = _record(
                model,
                result.system,
                u,
                step,
                si,
                stage.name,
                s_target,
                program.load_factor_at(si, s_target),
                iterations,
                cutbacks,
                torque_centers,
            )
            history.records.append(record)
            history.u = u
            _LOGGER.info(
                f"step {step} converged in {iterations} iterations: active {record.active}, "
                f"stick {record.stick}, slip {record.slip}, "
                f"max penetration {record.max_penetration:.3e}"
            )
            hooks.on_step(record, u, result.system)
    return history
