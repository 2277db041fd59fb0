"""
Configuration file for the two-sided stopping solver
Contains environment settings, numerical tolerances and logging setup
"""

import os
import sys
import logging
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _env_int(name, default):
    """Read an integer environment variable, keeping the raw text on failure"""
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        return int(raw)
    except ValueError:
        return raw


# Solver Configuration
class StoppingConfig:
    # Logging Settings
    LOG_LEVEL = os.getenv('STOPPING_LOG_LEVEL', 'INFO').upper()
    LOG_FILE = os.getenv('STOPPING_LOG_FILE') or None

    # Monte Carlo Defaults
    WORKERS = _env_int('STOPPING_WORKERS', 1)
    SEED = _env_int('STOPPING_SEED', 42)
    PATHS = _env_int('STOPPING_PATHS', 1_000_000)
    BLOCK_SIZE = _env_int('STOPPING_BLOCK_SIZE', 65_536)  # paths per random stream

    DESCRIPTION = 'Two-sided optimal stopping of a compound Poisson process with payoff |x|'

    # Numerical Tolerances
    ROOT_TOLERANCE = 1e-12          # relative to max(r, |terms of psi|)
    CLOSED_FORM_TOLERANCE = 1e-12
    CONSISTENCY_TOLERANCE = 1e-10
    QUADRATURE_TOLERANCE = 1e-10    # successive refinements
    QUADRATURE_FAILURE = 1e-9
    REPRESENTATION_TOLERANCE = 1e-6
    MAJORANT_TOLERANCE = 1e-12
    ANGLE_TOLERANCE = 1e-10
    INTERIOR_SMOOTHNESS_TOLERANCE = 1e-6

    # Monte Carlo Settings
    TRUNCATION_CEILING = 1e-6
    T_MAX_FACTOR = 50.0             # t_max = T_MAX_FACTOR / r
    VALUE_GATE_SIGMAS = 4.0
    VALUE_GATE_FLOOR = 1e-9         # absolute slack for starts on a threshold (zero stderr)
    DOMINANCE_GATE_SIGMAS = 3.0

    # Verification Grids
    INTERIOR_POINTS = 1001
    EXTERIOR_POINTS = 500
    EXTERIOR_SCALES = 10.0          # exterior grid spans this many mean extrema

    # Curve Export
    GRID_MIN = -3.0
    GRID_MAX = 3.0
    GRID_POINTS = 601

    @classmethod
    def setup_logging(cls):
        """Setup logging configuration for the solver"""
        handlers = [logging.StreamHandler(sys.stderr)]
        if cls.LOG_FILE:
            handlers.append(logging.FileHandler(cls.LOG_FILE, mode='a', encoding='utf-8'))

        logging.basicConfig(
            level=getattr(logging, cls.LOG_LEVEL, logging.INFO),
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            handlers=handlers,
            force=True  # Override any existing loggers
        )

        # Ensure stdout/stderr use UTF-8 encoding
        if hasattr(sys.stdout, 'reconfigure'):
            sys.stdout.reconfigure(encoding='utf-8')
        if hasattr(sys.stderr, 'reconfigure'):
            sys.stderr.reconfigure(encoding='utf-8', line_buffering=True)

    @classmethod
    def validate_config(cls):
        """Validate the environment-provided configuration"""
        errors = []

        if cls.LOG_LEVEL not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            errors.append(f"STOPPING_LOG_LEVEL must be a logging level name, got {cls.LOG_LEVEL!r}")

        for name in ('WORKERS', 'PATHS', 'BLOCK_SIZE'):
            value = getattr(cls, name)
            if not isinstance(value, int) or value < 1:
                errors.append(f"STOPPING_{name} must be a positive integer, got {value!r}")

        if not isinstance(cls.SEED, int) or cls.SEED < 0:
            errors.append(f"STOPPING_SEED must be a non-negative integer, got {cls.SEED!r}")

        return errors

    @classmethod
    def print_config(cls):
        """Print current configuration"""
        print("=== Stopping Solver Configuration ===")
        print(f"Log Level: {cls.LOG_LEVEL}")
        print(f"Log File: {cls.LOG_FILE}")
        print(f"Workers: {cls.WORKERS}")
        print(f"Seed: {cls.SEED}")
        print(f"Paths: {cls.PATHS}")
        print(f"Block Size: {cls.BLOCK_SIZE}")
        print("=====================================")


if __name__ == "__main__":
    # Test configuration
    errors = StoppingConfig.validate_config()
    if errors:
        print("Configuration errors:")
        for error in errors:
            print(f"  - {error}")
    else:
        print("Configuration is valid!")
        StoppingConfig.print_config()
