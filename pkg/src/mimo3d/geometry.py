"""Uniform planar array layout, element indexing and element responses.

The array sits in the y-z plane. Element index encodes polarization,
column and row as ``index = pol * (n_azimuth * n_elevation)
+ column * n_elevation + row``, so one (pol, column) pair owns a
contiguous run of ``n_elevation`` indices. Cross-polarized partners
share a physical position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PATTERN_MODES = ("isotropic", "parameterized")

# Parameterized element envelope: 65 degree half-power widths in both
# cuts, 30 dB floor on each attenuation term.
_HALF_POWER_DEG = 65.0
_MAX_ATTENUATION_DB = 30.0


@dataclass(frozen=True)
class ArrayGeometry:
    """Dual- or single-polarized uniform planar array.

    Spacings are in carrier wavelengths. ``pol_slants_deg`` lists one
    slant angle per polarization (for example ``(0, 90)`` or
    ``(-45, 45)``).
    """

    n_azimuth: int
    n_elevation: int
    n_pol: int = 2
    spacing_az: float = 0.5
    spacing_el: float = 0.5
    pol_slants_deg: tuple[float, ...] = (0.0, 90.0)
    pattern: str = "isotropic"

    def __post_init__(self):
        if self.n_azimuth < 1 or self.n_elevation < 1:
            raise ValueError("array dimensions must be at least 1")
        if self.n_pol not in (1, 2):
            raise ValueError(f"n_pol must be 1 or 2, got {self.n_pol}")
        if len(self.pol_slants_deg) != self.n_pol:
            raise ValueError(
                f"need {self.n_pol} slant angles, got {len(self.pol_slants_deg)}"
            )
        if self.pattern not in PATTERN_MODES:
            raise ValueError(f"pattern must be one of {PATTERN_MODES}")

    @property
    def n_elements(self) -> int:
        return self.n_azimuth * self.n_elevation * self.n_pol

    @property
    def n_columns(self) -> int:
        """Column count for reconstruction: polarizations count separately."""
        return self.n_azimuth * self.n_pol

    @property
    def n_rows(self) -> int:
        return self.n_elevation

    def element_index(self, pol: int, col: int, row: int) -> int:
        if not (0 <= pol < self.n_pol and 0 <= col < self.n_azimuth and 0 <= row < self.n_elevation):
            raise ValueError(f"(pol={pol}, col={col}, row={row}) out of range")
        return pol * (self.n_azimuth * self.n_elevation) + col * self.n_elevation + row

    def element_unpack(self, index: int) -> tuple[int, int, int]:
        if not 0 <= index < self.n_elements:
            raise ValueError(f"element index {index} out of range 0..{self.n_elements - 1}")
        pol, rest = divmod(index, self.n_azimuth * self.n_elevation)
        col, row = divmod(rest, self.n_elevation)
        return pol, col, row

    def pol_groups(self) -> np.ndarray:
        """Polarization group id of each reconstruction column.

        Column ``v`` covers element indices ``v * n_elevation`` through
        ``(v + 1) * n_elevation - 1`` and belongs to polarization
        ``v // n_azimuth``.
        """
        return np.arange(self.n_columns) // self.n_azimuth


def element_position(geom: ArrayGeometry, index: int) -> np.ndarray:
    """Position of one element in wavelengths, (x, y, z)."""
    _, col, row = geom.element_unpack(index)
    return np.array([0.0, col * geom.spacing_az, row * geom.spacing_el])


def element_positions(geom: ArrayGeometry) -> np.ndarray:
    """Positions of all elements, shape (n_elements, 3)."""
    within_pol = np.arange(geom.n_elements) % (geom.n_azimuth * geom.n_elevation)
    col, row = np.divmod(within_pol, geom.n_elevation)
    out = np.zeros((geom.n_elements, 3))
    out[:, 1] = col * geom.spacing_az
    out[:, 2] = row * geom.spacing_el
    return out


def element_pols(geom: ArrayGeometry) -> np.ndarray:
    """Polarization id of each element, shape (n_elements,)."""
    return np.arange(geom.n_elements) // (geom.n_azimuth * geom.n_elevation)


def unit_direction(theta, phi) -> np.ndarray:
    """Unit propagation vector for zenith angle ``theta`` and azimuth
    ``phi``; theta = 0 points to the zenith, theta = pi/2 to the horizon.

    Accepts scalars or broadcastable arrays; the component axis is last.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    sin_t = np.sin(theta)
    return np.stack(
        [sin_t * np.cos(phi), sin_t * np.sin(phi), np.cos(theta) * np.ones_like(phi)],
        axis=-1,
    )


def _pattern_amplitude(theta, phi) -> np.ndarray:
    half = math.radians(_HALF_POWER_DEG)
    att_az = np.minimum(12.0 * (np.asarray(phi) / half) ** 2, _MAX_ATTENUATION_DB)
    att_el = np.minimum(12.0 * ((np.asarray(theta) - math.pi / 2) / half) ** 2, _MAX_ATTENUATION_DB)
    return 10.0 ** (-(att_az + att_el) / 20.0)


def field_pattern(slant_deg: float, pattern: str, theta, phi):
    """Field response (F_theta, F_phi) of one element toward (theta, phi).

    Isotropic mode splits a unit response by the slant angle alone;
    parameterized mode multiplies in a direction-dependent gain envelope.
    """
    if pattern not in PATTERN_MODES:
        raise ValueError(f"pattern must be one of {PATTERN_MODES}")
    slant = math.radians(slant_deg)
    if pattern == "isotropic":
        amp = np.ones_like(np.asarray(theta, dtype=float))
    else:
        amp = _pattern_amplitude(theta, phi)
    return amp * math.cos(slant), amp * math.sin(slant)
