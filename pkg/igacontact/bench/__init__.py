"""Benchmark setups, model building, run output and metrics."""
from .setups import (
    apply_overrides,
    setup_benchmark,
    setup_hertz,
    setup_ironing,
    setup_patch_test,
    setup_twisting,
)
from .model import BuiltProblem, build_body, build_geometry, build_model, build_program
from .metrics import (
    BenchmarkMetrics,
    EmptyWindowError,
    HertzSolution,
    SamplingMismatchError,
    amplitude_reduction,
    analysis_window,
    average_over_window,
    compute_metrics,
    hertz_solution,
    l2_pressure_error,
    metrics_from_history,
    normalized_pressure_profile,
    oscillation_amplitude,
    read_history,
    slip_dominant_from,
    stick_fractions,
    torque_about_axis,
    torque_deviation,
)
from .output import (
    CaseResult,
    HistoryWriter,
    OutputError,
    RunOutput,
    case_name,
    history_row,
    run_case,
    sample_body,
    write_contact_csv,
    write_metrics,
    write_outputs,
    write_snapshot,
    write_vtk,
)
