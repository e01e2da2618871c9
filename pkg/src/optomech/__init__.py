"""Radiation-pressure back-action on a mechanical mode driven by a laser of
finite linewidth."""

__version__ = "0.1.0"

from .core import SystemParams, load_params, params_from_mapping  # noqa: E402
from .errors import ConfigError, OptomechError  # noqa: E402

__all__ = ["SystemParams", "load_params", "params_from_mapping", "ConfigError", "OptomechError", "__version__"]
