"""Chern-Ricci flow numerical lab."""

from ._chernlab import (
    ConfigError,
    CutoffProfile,
    MonitorRecord,
    RunRecord,
    ScenarioConfig,
    Verdict,
    build_profile,
    cutoff_f,
    cutoff_phi,
    identity_report,
    parse_config,
    run_scenario,
    weighted_sups,
)

__all__ = [
    "ConfigError",
    "CutoffProfile",
    "MonitorRecord",
    "RunRecord",
    "ScenarioConfig",
    "Verdict",
    "build_profile",
    "cutoff_f",
    "cutoff_phi",
    "identity_report",
    "parse_config",
    "run_scenario",
    "weighted_sups",
]
