"""
Run configuration for one command invocation.
Defaults are merged with an optional JSON config file; explicit flags win.
"""

import json
import math
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

from config import StoppingConfig
from stopping.errors import ConfigError, OutOfDomain
from stopping.model import ModelParams, PARAM_NAMES, validate

logger = logging.getLogger(__name__)

COMMANDS = ('solve', 'verify', 'angle', 'simulate', 'curve')
FORMATS = ('table', 'json')


def default_options() -> dict:
    return {
        'n': StoppingConfig.PATHS,
        'seed': StoppingConfig.SEED,
        'workers': StoppingConfig.WORKERS,
        'starts': None,
        'perturb': None,
        'extrema': False,
        'grid_min': StoppingConfig.GRID_MIN,
        'grid_max': StoppingConfig.GRID_MAX,
        'grid_points': StoppingConfig.GRID_POINTS,
        'format': 'table',
        'output': None,
        'solution': None,
        'corrupt_x2': None,
    }


CONFIG_KEYS = frozenset(PARAM_NAMES) | frozenset(default_options())


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: Optional[ModelParams]   # None when a stored solution supplies them
    n: int
    seed: int
    workers: int
    starts: Optional[Tuple[float, ...]]
    perturb: Optional[float]
    extrema: bool
    grid_min: float
    grid_max: float
    grid_points: int
    format: str
    output: Optional[str]
    solution: Optional[str]
    corrupt_x2: Optional[float]


def load_config_file(path: str) -> dict:
    """Read a flat JSON object whose keys mirror the long flag names"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}")

    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")

    data = {key.replace('-', '_'): value for key, value in data.items()}
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown key(s) in {path}: {', '.join(unknown)}")
    logger.debug(f"Loaded run configuration from {path}: {data}")
    return data


def _positive_int(name, value):
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise OutOfDomain(f"{name} must be a positive integer, got {value!r}")
    return value


def _finite(name, value):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise OutOfDomain(f"{name} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise OutOfDomain(f"{name} must be finite, got {value!r}")
    return value


def build_run_config(command: str, flags: dict, config_path: Optional[str] = None) -> RunConfig:
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")

    merged = default_options()
    if config_path:
        merged.update(load_config_file(config_path))
    merged.update({key: value for key, value in flags.items() if key in CONFIG_KEYS and value is not None})

    has_params = any(merged.get(name) is not None for name in PARAM_NAMES)
    if merged['solution'] and not has_params:
        params = None
    else:
        params = validate({name: merged[name] for name in PARAM_NAMES if merged.get(name) is not None})

    if merged['format'] not in FORMATS:
        raise ConfigError(f"format must be one of {', '.join(FORMATS)}, got {merged['format']!r}")

    n = _positive_int('n', merged['n'])
    workers = _positive_int('workers', merged['workers'])
    grid_points = _positive_int('grid_points', merged['grid_points'])
    seed = merged['seed']
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise OutOfDomain(f"seed must be a non-negative integer, got {seed!r}")

    grid_min = _finite('grid_min', merged['grid_min'])
    grid_max = _finite('grid_max', merged['grid_max'])
    if grid_min > grid_max or (grid_points > 1 and grid_min == grid_max):
        raise OutOfDomain(f"grid needs grid_min < grid_max, got [{grid_min!r}, {grid_max!r}]")

    starts = merged['starts']
    if starts is not None:
        if not isinstance(starts, (list, tuple)) or not starts:
            raise OutOfDomain(f"starts must be a non-empty list of numbers, got {starts!r}")
        starts = tuple(_finite('starts', start) for start in starts)

    perturb = merged['perturb']
    if perturb is not None:
        perturb = _finite('perturb', perturb)
        if perturb <= 0.0:
            raise OutOfDomain(f"perturb must be positive, got {perturb!r}")

    corrupt_x2 = merged['corrupt_x2']
    if corrupt_x2 is not None:
        corrupt_x2 = _finite('corrupt_x2', corrupt_x2)

    extrema = merged['extrema']
    if not isinstance(extrema, bool):
        raise ConfigError(f"extrema must be true or false, got {extrema!r}")

    return RunConfig(
        command=command,
        params=params,
        n=n,
        seed=seed,
        workers=workers,
        starts=starts,
        perturb=perturb,
        extrema=extrema,
        grid_min=grid_min,
        grid_max=grid_max,
        grid_points=grid_points,
        format=merged['format'],
        output=merged['output'],
        solution=merged['solution'],
        corrupt_x2=corrupt_x2,
    )
