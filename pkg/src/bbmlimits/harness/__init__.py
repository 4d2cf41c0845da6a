from .config import ConfigError, ScenarioConfig, load_config
from .emit import emit
from .extrapolate import Extrapolation, InputError, extrapolate
from .runner import Report, run_scenario

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "load_config",
    "emit",
    "Extrapolation",
    "InputError",
    "extrapolate",
    "Report",
    "run_scenario",
]
