"""Discrete-event simulator for MPTCP over LTE/NR dual connectivity."""
from .analytics import (AvailabilityReport, dc_availability, empirical_availability, multi_path_availability,
                        path_availability, time_weighted_availability)
from .config import ConfigError, ScenarioConfig, dump_config, load_config, parse_config, save_config
from .engine import Engine, SimEvent, SimulationError
from .harness import RunReport, list_scenarios, run_availability_sweep, run_canned, run_scenario
from .mptcp import SchedulerMode, TerminationPoint, connection_paths, open_connection, select_subflow
from .simulation import Simulation
from .topology import ArchOption, BearerKind, SplitPoint, bearer_violation, build_topology

__all__ = [
    "ArchOption", "AvailabilityReport", "BearerKind", "ConfigError", "Engine", "RunReport", "ScenarioConfig",
    "SchedulerMode", "SimEvent", "Simulation", "SimulationError", "SplitPoint", "TerminationPoint",
    "bearer_violation", "build_topology", "connection_paths", "dc_availability", "dump_config",
    "empirical_availability", "list_scenarios", "load_config", "multi_path_availability", "open_connection",
    "parse_config", "path_availability", "run_availability_sweep", "run_canned", "run_scenario", "save_config",
    "select_subflow", "time_weighted_availability",
]
