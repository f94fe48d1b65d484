"""Spectral laboratory for the linearized Zakharov system around small solitary waves."""

from .config import RunConfig, parse_config
from .errors import ConfigError
from .grid import GridSpec, build_grid, h_profile, soliton_profiles, weighted_dot

__all__ = ["ConfigError", "GridSpec", "RunConfig", "build_grid", "h_profile", "parse_config",
           "soliton_profiles", "weighted_dot"]
