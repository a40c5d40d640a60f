"""Bundled device presets (see data/devices.toml for the table and units)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .cavity import CavityParams
from .exceptions import ConfigError

__all__ = ["DevicePreset", "list_presets", "get_preset"]


@dataclass(frozen=True)
class DevicePreset:
    """One qubit/cavity pair with its calibrated interference phase."""

    name: str
    cavity: CavityParams
    omega_q: float
    t1: float
    theta_rt: float


def _load_table() -> dict:
    data = resources.files("hangersim").joinpath("data/devices.toml").read_bytes()
    return tomllib.loads(data.decode())


def list_presets() -> list[str]:
    return sorted(_load_table())


def get_preset(name: str) -> DevicePreset:
    table = _load_table()
    if name not in table:
        raise ConfigError(f"unknown device preset {name!r}; available: {sorted(table)}")
    row = table[name]
    return DevicePreset(
        name=name,
        cavity=CavityParams.from_qualities(
            f_r_hz=row["resonator_frequency_hz"],
            q_c=row["coupling_quality"],
            q_i=row["internal_quality"],
            chi_hz=row["dispersive_shift_hz"],
        ),
        omega_q=2.0 * math.pi * row["qubit_frequency_hz"],
        t1=row["t1_s"],
        theta_rt=row["theta_rt_rad"],
    )
