"""Loosely-coupled 5G mmWave / IMU / odometer navigation toolkit."""

from ._core import (
    ConfigError,
    DataError,
    cli_main,
    geodetic_to_enu,
    meridian_radius,
    normal_radius,
    reference_scenario_json,
    run,
    simulate,
    wrap_azimuth,
)

__all__ = [
    "ConfigError",
    "DataError",
    "cli_main",
    "geodetic_to_enu",
    "meridian_radius",
    "normal_radius",
    "reference_scenario_json",
    "run",
    "simulate",
    "wrap_azimuth",
]
