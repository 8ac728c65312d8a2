"""Uniform linear array geometry, carrier constants and field-region boundaries.

The array lies on the x-axis with its centre at the origin.  Users live in the
xOz plane and angles are measured from broadside (the z-axis), so a user at
``(r, theta)`` sits at ``x = r sin(theta)``, ``z = r cos(theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0
"Speed of light in vacuum, m/s."


class FarFieldError(ValueError):
    """Raised when a curvature of zero is asked to yield a finite position."""


@dataclass(frozen=True)
class ArrayConfig:
    """ULA geometry and carrier.

    Parameters
    ----------
    n_antennas : int
        Number of elements, at least 2.
    spacing : float
        Element spacing in metres.
    carrier_freq : float
        Carrier frequency in hertz.
    """

    n_antennas: int
    spacing: float
    carrier_freq: float

    def __post_init__(self) -> None:
        if int(self.n_antennas) != self.n_antennas or self.n_antennas < 2:
            raise ValueError(f"n_antennas must be an integer >= 2, got {self.n_antennas}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        if not self.carrier_freq > 0:
            raise ValueError(f"carrier_freq must be positive, got {self.carrier_freq}")

    @classmethod
    def half_wavelength(cls, n_antennas: int, carrier_freq: float) -> "ArrayConfig":
        "Array with lambda/2 spacing at the given carrier."
        return cls(n_antennas, SPEED_OF_LIGHT / carrier_freq / 2.0, carrier_freq)

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def aperture(self) -> float:
        return self.n_antennas * self.spacing

    @cached_property
    def positions(self) -> np.ndarray:
        "x-coordinates of all elements (read-only), index 0 is antenna 1."
        n = np.arange(1, self.n_antennas + 1, dtype=float)
        x = (n - (self.n_antennas + 1) / 2.0) * self.spacing
        x.flags.writeable = False
        return x


@dataclass(frozen=True)
class UserPosition:
    "Point in the xOz plane, metres."

    x: float
    z: float

    @classmethod
    def from_polar(cls, r: float, theta: float) -> "UserPosition":
        return cls(r * math.sin(theta), r * math.cos(theta))

    @property
    def r(self) -> float:
        return math.hypot(self.x, self.z)

    @property
    def theta(self) -> float:
        "Angle from broadside, radians."
        return math.atan2(self.x, self.z)


@dataclass(frozen=True)
class NearFieldParams:
    """Quadratic-phase channel parameters.

    ``p1 = cos(theta)**2 / r`` is the curvature (1/m) and ``p2 = -sin(theta)``
    the linear phase slope.
    """

    p1: float
    p2: float

    def __post_init__(self) -> None:
        if self.p1 < 0:
            raise ValueError(f"p1 must be nonnegative, got {self.p1}")
        if not -1.0 <= self.p2 <= 1.0:
            raise ValueError(f"p2 must lie in [-1, 1], got {self.p2}")


def antenna_position(cfg: ArrayConfig, n: int) -> float:
    "x-coordinate of antenna ``n`` (1-based)."
    if not 1 <= n <= cfg.n_antennas:
        raise IndexError(f"antenna index {n} outside 1..{cfg.n_antennas}")
    return (n - (cfg.n_antennas + 1) / 2.0) * cfg.spacing


def rayleigh_distance(cfg: ArrayConfig) -> float:
    "Fraunhofer boundary 2 D^2 / lambda."
    return 2.0 * cfg.aperture**2 / cfg.wavelength


def fresnel_lower_bound(cfg: ArrayConfig) -> float:
    "Inner limit 0.62 sqrt(D^3 / lambda) of the radiating near field."
    return 0.62 * math.sqrt(cfg.aperture**3 / cfg.wavelength)


def params_from_position(cfg: ArrayConfig, pos: UserPosition) -> NearFieldParams:
    r = pos.r
    if r == 0:
        raise ValueError("user position coincides with the array centre")
    theta = pos.theta
    return NearFieldParams(math.cos(theta) ** 2 / r, -math.sin(theta))


def position_from_params(cfg: ArrayConfig, params: NearFieldParams) -> UserPosition:
    if params.p1 == 0:
        raise FarFieldError("far-field: p1 = 0 corresponds to an infinite radius")
    if abs(params.p2) >= 1:
        raise ValueError(f"|p2| must be < 1 to recover a position, got {params.p2}")
    r = (1.0 - params.p2**2) / params.p1
    return UserPosition.from_polar(r, -math.asin(params.p2))


def sine_grid(n_antennas: int) -> np.ndarray:
    "Uniform grid u_m = -1 + (2m - 1)/N, m = 1..N, over sin(theta) in (-1, 1)."
    m = np.arange(1, n_antennas + 1, dtype=float)
    return -1.0 + (2.0 * m - 1.0) / n_antennas
