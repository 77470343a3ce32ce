"""Simulator and optimizer for RIS-assisted mmWave multi-UAV networks."""

from ._risuav import (
    ConfigError,
    InfeasibleError,
    OracleReport,
    Scenario,
    SignTest,
    TimeblockResult,
    dbm_to_watts,
    modes,
    no_blockage_probability,
    oracle_check,
    paired_sign_test,
    results_csv,
    run_experiment,
    sweep,
    sweep_csv,
)
from .csvio import RESULT_COLUMNS, SWEEP_COLUMNS, SchemaError, group_means, read_results

__all__ = [
    "ConfigError",
    "InfeasibleError",
    "OracleReport",
    "RESULT_COLUMNS",
    "SWEEP_COLUMNS",
    "Scenario",
    "SchemaError",
    "SignTest",
    "TimeblockResult",
    "dbm_to_watts",
    "group_means",
    "modes",
    "no_blockage_probability",
    "oracle_check",
    "paired_sign_test",
    "read_results",
    "results_csv",
    "run_experiment",
    "sweep",
    "sweep_csv",
]
