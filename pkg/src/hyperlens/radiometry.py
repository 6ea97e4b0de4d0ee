"""Photon budget, dynamic range and photoreceptor/pixel geometry calculators.

All quantities are SI at this API.  :func:`parse_quantity` turns CLI
strings such as ``1.5um``, ``4.84um2``, ``1ms`` or ``550nm`` into SI.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import NamedTuple

from .errors import NonPositiveInput, ParseError

PLANCK = 6.6260755e-34  # J s
LIGHT_SPEED = 2.99792458e8  # m/s


def _positive(**values) -> None:
    for name, v in values.items():
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise NonPositiveInput(f"{name} must be a positive finite number, got {v!r}")


@dataclass(frozen=True)
class SensorSpec:
    area: float  # m^2
    irradiance: float  # W/m^2
    exposure: float  # s
    wavelength: float  # m
    sat_irradiation: float = 1.0
    min_irradiation: float = 1.0

    def __post_init__(self):
        _positive(
            area=self.area, irradiance=self.irradiance, exposure=self.exposure,
            wavelength=self.wavelength, sat_irradiation=self.sat_irradiation,
            min_irradiation=self.min_irradiation,
        )


def photon_count(s: SensorSpec) -> float:
    """Expected photons per pixel, ``A E t / (h c / lambda)``."""
    return s.area * s.irradiance * s.exposure * s.wavelength / (PLANCK * LIGHT_SPEED)


class DynamicRange(NamedTuple):
    ratio: float
    db: float


def dynamic_range(s: SensorSpec) -> DynamicRange:
    """Saturation over minimum irradiation, and ``20 log10`` of it."""
    ratio = s.sat_irradiation / s.min_irradiation
    return DynamicRange(ratio, 20.0 * math.log10(ratio))


def area_ratio(a1: float, a2: float) -> float:
    """How many times smaller ``a1`` is than ``a2``."""
    _positive(a1=a1, a2=a2)
    return a2 / a1


def circle_area(diameter: float) -> float:
    _positive(diameter=diameter)
    return math.pi * (diameter / 2) ** 2


def fovea_cone_estimate(density: float, fovea_diameter: float) -> float:
    """Upper bound on cone count: density (per mm^2) times the disc area (diameter in mm)."""
    _positive(density=density, fovea_diameter=fovea_diameter)
    return density * circle_area(fovea_diameter)


_UNITS = {
    "": 1.0,
    "m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9,
    "m2": 1.0, "mm2": 1e-6, "um2": 1e-12, "nm2": 1e-18,
    "s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9,
}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([a-z0-9]*)\s*$")


def parse_quantity(text: str) -> float:
    """``"1.5um"`` -> 1.5e-6.  Bare numbers are taken as SI already."""
    m = _QUANTITY.match(text)
    if not m or m.group(2) not in _UNITS:
        raise ParseError(f"cannot parse quantity {text!r}", token=text)
    return float(m.group(1)) * _UNITS[m.group(2)]
