"""Intrinsic Cramer-Rao bounds for attitude estimation on SO(3).

Thin package wrapper around the compiled module: rotation utilities,
Fisher information and the curvature-corrected bound, a Wahba solver,
the invariant EKF, and the Monte Carlo runners.
"""

from ._icrb import (
    AngleNearPiError,
    CovMatrix,
    CurvatureTerm,
    EpochSpec,
    IekfState,
    InfoMatrix,
    InvalidScenarioError,
    MeasurementEpoch,
    OmegaSegment,
    Reference,
    Report,
    RngStream,
    Rotation,
    Scenario,
    ScenarioMode,
    SingularInformationError,
    UnobservableError,
    VectorMeasurement,
    compute_gain,
    curvature_operator,
    default_jobs,
    distance,
    dlog_bch,
    epoch_information,
    exp_so3,
    fisher_score_oracle,
    fisher_single_vector,
    fisher_wahba,
    hat,
    icrlb,
    icrlb_squared_form,
    iekf_covariance_sequence,
    initialize,
    invert_information,
    linearized_error_step,
    load_scenario,
    loewner_geq,
    loewner_tolerance,
    log_so3,
    omega_at,
    parse_scenario,
    propagate,
    run_dynamic,
    run_static,
    sample_tangent_gaussian,
    scenario_information,
    scenario_to_json,
    simulate_measurements,
    smith_form_check,
    solve_wahba,
    splitmix64,
    stack_measurement_matrix,
    static_trial_error,
    update,
    validate_scenario,
    vee,
    verify,
    wahba_cost,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
