#!/usr/bin/env python3
"""
Centralized configuration management for the Finsler weak-field lab
"""

import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _threads_from_env() -> int:
    """FWL_THREADS as an int; 0, which validate() rejects, when it is not an integer"""
    raw = os.getenv('FWL_THREADS', '')
    if not raw.strip():
        return 1
    try:
        return int(raw)
    except ValueError:
        return 0


class Config:
    """Application configuration"""

    # Base paths
    BASE_DIR = Path(__file__).parent

    # Logging
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_FILE = os.getenv('LOG_FILE', '')

    # Parallelism and reproducibility
    THREADS = _threads_from_env()
    DEFAULT_SEED = int(os.getenv('FWL_SEED', '0x5EED'), 0)

    # Physical constants of the geometric model
    WEAK_FIELD_LIMIT = float(os.getenv('WEAK_FIELD_LIMIT', '0.1'))
    LIGHT_SPEED = float(os.getenv('LIGHT_SPEED', '1.0'))
    CHI_DEFAULT = float(os.getenv('CHI_DEFAULT', '0.5'))
    MU = float(os.getenv('MU', '1.0'))
    GAMMA = float(os.getenv('GAMMA', '1.0'))
    CHARGE_Q = float(os.getenv('CHARGE_Q', '1.0'))

    # Quadrature
    QUAD_TOL = float(os.getenv('QUAD_TOL', '1e-10'))
    QUAD_MAX_LEVEL = int(os.getenv('QUAD_MAX_LEVEL', '12'))

    # Newton solver
    NEWTON_MAX_ITER = int(os.getenv('NEWTON_MAX_ITER', '100'))
    NEWTON_TOL = float(os.getenv('NEWTON_TOL', '1e-10'))
    NEWTON_MAX_HALVINGS = int(os.getenv('NEWTON_MAX_HALVINGS', '30'))

    # Time evolution
    CFL_LIMIT = float(os.getenv('CFL_LIMIT', '0.9'))
    BLOWUP_LIMIT = float(os.getenv('BLOWUP_LIMIT', '1e6'))

    @classmethod
    def load_run_file(cls, path: Optional[str]) -> Dict[str, Any]:
        """Load command parameters from a YAML run file (empty dict if no path)"""
        if not path:
            return {}
        with open(path, 'r') as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ValueError(f"Run file {path} must contain a mapping, got {type(data).__name__}")
        # YAML keys may use dashes like the command-line flags
        return {str(k).replace('-', '_'): v for k, v in data.items()}

    @classmethod
    def validate(cls) -> bool:
        """Validate critical configuration"""
        from logger import FieldLogger

        errors = []

        if cls.THREADS < 1:
            errors.append(f"FWL_THREADS must be an integer >= 1, got {os.getenv('FWL_THREADS', '')!r}")

        if not 0.0 < cls.WEAK_FIELD_LIMIT < 1.0:
            errors.append(f"WEAK_FIELD_LIMIT must lie in (0, 1), got {cls.WEAK_FIELD_LIMIT}")

        if cls.LIGHT_SPEED <= 0.0:
            errors.append(f"LIGHT_SPEED must be positive, got {cls.LIGHT_SPEED}")

        if not 0.0 <= cls.CHI_DEFAULT <= 1.0:
            errors.append(f"CHI_DEFAULT must lie in [0, 1], got {cls.CHI_DEFAULT}")

        if cls.QUAD_TOL <= 0.0 or cls.NEWTON_TOL <= 0.0:
            errors.append("QUAD_TOL and NEWTON_TOL must be positive")

        if not 0.0 < cls.CFL_LIMIT <= 1.0:
            errors.append(f"CFL_LIMIT must lie in (0, 1], got {cls.CFL_LIMIT}")

        if errors:
            logger = FieldLogger.get_logger("config")
            logger.error("Configuration errors:")
            for error in errors:
                logger.error(f"  - {error}")
            return False

        return True


# Singleton instance
config = Config()
