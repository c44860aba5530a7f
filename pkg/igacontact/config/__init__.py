"""Problem configuration: typed specs, JSON files and the command line."""
from .defs import (
    AnalysisSpec,
    BenchmarkKind,
    BodySpec,
    ConfigError,
    ConstraintSpec,
    ContactSpec,
    Discretization,
    GEOMETRY_PARAMS,
    GeometryKind,
    MaterialSpec,
    MotionSpec,
    OutputSpec,
    PressureSpec,
    ProblemConfig,
    RigidPlaneSpec,
    RunMeta,
    SolverSpec,
    StageSpec,
)
from .json import JsonKeyNames, config_from_dict, config_to_dict, load_config, save_config
from .args import (
    add_case_override_arguments,
    add_default_args,
    add_dofs_arguments,
    add_metrics_arguments,
    add_run_arguments,
    add_setup_arguments,
    add_sweep_arguments,
    create_cli_parser,
    create_default_args_parser,
    parse_cli_arguments,
)
