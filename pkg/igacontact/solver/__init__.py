"""Global assembly, Dirichlet load programs and Newton-Raphson load stepping."""
from .defs import LinearSolveError, NewtonDivergence, CutbackExhausted
from .dofmap import DofMap
from .program import ConstraintSet, LoadProgram, Motion, Stage, rotation_matrix
from .system import (
    BodyModel,
    GlobalSystem,
    Model,
    SparsityPattern,
    assemble,
    reaction_forces,
    set_reaction,
    set_torque,
)
from .newton import (
    IterationRecord,
    NewtonResult,
    NewtonSettings,
    force_reference,
    linear_solve,
    newton_solve,
)
from .runner import RunHistory, RunHooks, StepRecord, run_load_program
