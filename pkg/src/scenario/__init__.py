"""Initialize scenario package."""

from .config import (
    CASE_LABELS,
    MANAGED_ID,
    BACKGROUND_ID,
    Case,
    CalibrationSettings,
    EnvironmentSettings,
    EvaluationSettings,
    ExtraVehicle,
    Family,
    PerceptionSettings,
    ScenarioConfig,
    SimulationSettings,
    SimulatorConfig,
    VehicleSpec,
    case_label,
    load_simulator_config,
    parse_case,
    scenario_for,
)
from .builder import ConflictSchedule, Scenario, build_profile, build_scenario, nominal_travel, solve_conflict_schedule
from .simulation import (
    EpisodeRecord,
    EpisodeSimulation,
    Outcome,
    classify_avoidable,
    oracle_agent,
    oracle_policy,
    run_episode,
)
from .environment import DelegationEnv
from .calibration import (
    CalibrationResult,
    calibrate_case_parameters,
    scripted_optimum,
    verify_case_matrix,
)

__all__ = [
    "CASE_LABELS",
    "MANAGED_ID",
    "BACKGROUND_ID",
    "Case",
    "CalibrationSettings",
    "EnvironmentSettings",
    "EvaluationSettings",
    "ExtraVehicle",
    "Family",
    "PerceptionSettings",
    "ScenarioConfig",
    "SimulationSettings",
    "SimulatorConfig",
    "VehicleSpec",
    "case_label",
    "load_simulator_config",
    "parse_case",
    "scenario_for",
    "ConflictSchedule",
    "Scenario",
    "build_profile",
    "build_scenario",
    "nominal_travel",
    "solve_conflict_schedule",
    "EpisodeRecord",
    "EpisodeSimulation",
    "Outcome",
    "classify_avoidable",
    "oracle_agent",
    "oracle_policy",
    "run_episode",
    "DelegationEnv",
    "CalibrationResult",
    "calibrate_case_parameters",
    "scripted_optimum",
    "verify_case_matrix",
]
