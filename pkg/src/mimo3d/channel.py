"""Ray-sum generation of per-user, per-subcarrier MIMO channel matrices.

Each ray is a cluster of sub-paths. A sub-path contributes the product of
the receive field response, a 2x2 phase/cross-polarization coupling, the
transmit field response, the two array steering phases and a Doppler
term. Frequency selectivity enters per ray through its delay, applied as
a subcarrier-dependent phase when a drop is assembled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig, SamplerConfig
from .geometry import (
    ArrayGeometry,
    element_pols,
    element_positions,
    field_pattern,
    unit_direction,
)

_SPEED_OF_LIGHT = 299792458.0


def wrap_azimuth(phi):
    """Wrap angles into (-pi, pi]."""
    w = np.mod(np.asarray(phi, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    return np.where(w == -np.pi, np.pi, w)


@dataclass(frozen=True)
class RayParameterSet:
    """Cluster/sub-path parameters of a single user's channel.

    Shapes: per-ray arrays are (n_rays,), per-sub-path arrays are
    (n_rays, n_subpaths). Zenith angles live in [0, pi], azimuth angles
    in (-pi, pi]. ``xpr`` is the linear cross-polarization power ratio.
    The optional Ricean fields describe a deterministic component that
    rides on ray 0: ``los_angles`` is (zoa, aoa, zod, aod).
    """

    powers: np.ndarray
    zoa: np.ndarray
    aoa: np.ndarray
    zod: np.ndarray
    aod: np.ndarray
    phase_tt: np.ndarray
    phase_tp: np.ndarray
    phase_pt: np.ndarray
    phase_pp: np.ndarray
    xpr: np.ndarray
    doppler_hz: np.ndarray
    delays_s: np.ndarray
    ricean_k: float | None = None
    los_angles: tuple[float, float, float, float] | None = None
    los_phase: float | None = None
    los_doppler_hz: float = 0.0

    def __post_init__(self):
        n = self.powers.shape[0]
        if self.powers.ndim != 1 or n < 1:
            raise ValueError("powers must be a non-empty 1-D array")
        if abs(float(self.powers.sum()) - 1.0) > 1e-12:
            raise ValueError(f"ray powers must sum to 1, got {self.powers.sum()!r}")
        per_subpath = (
            self.zoa, self.aoa, self.zod, self.aod,
            self.phase_tt, self.phase_tp, self.phase_pt, self.phase_pp,
            self.xpr, self.doppler_hz,
        )
        shape = self.zoa.shape
        if len(shape) != 2 or shape[0] != n:
            raise ValueError(f"per-sub-path arrays must be (n_rays, n_subpaths), got {shape}")
        for arr in per_subpath:
            if arr.shape != shape:
                raise ValueError("per-sub-path arrays must share one shape")
        if self.delays_s.shape != (n,):
            raise ValueError("delays_s must be per ray")
        if np.any(self.xpr <= 0):
            raise ValueError("cross-polarization ratios must be positive")
        for zen in (self.zoa, self.zod):
            if np.any(zen < 0) or np.any(zen > np.pi):
                raise ValueError("zenith angles must lie in [0, pi]")
        for az in (self.aoa, self.aod):
            if np.any(az <= -np.pi) or np.any(az > np.pi):
                raise ValueError("azimuth angles must lie in (-pi, pi]")
        if self.ricean_k is not None:
            if self.ricean_k < 0:
                raise ValueError("ricean_k must be non-negative")
            if self.los_angles is None or self.los_phase is None:
                raise ValueError("ricean_k requires los_angles and los_phase")
        elif self.los_angles is not None or self.los_phase is not None:
            raise ValueError("los_angles/los_phase are only valid with ricean_k")

    @property
    def n_rays(self) -> int:
        return self.powers.shape[0]

    @property
    def n_subpaths(self) -> int:
        return self.zoa.shape[1]


@dataclass
class ChannelTensor:
    """Per-user, per-subcarrier channel matrices plus drop metadata.

    ``h`` has shape (users, n_rb * n_sc, user_antennas, nt).
    """

    h: np.ndarray
    n_rb: int
    n_sc: int
    wavelength_m: float
    seed: int
    geometry: ArrayGeometry | None = None

    @property
    def n_users(self) -> int:
        return self.h.shape[0]

    @property
    def n_subcarriers(self) -> int:
        return self.h.shape[1]

    @property
    def user_antennas(self) -> int:
        return self.h.shape[2]

    @property
    def nt(self) -> int:
        return self.h.shape[3]


def _element_responses(geom: ArrayGeometry, theta: np.ndarray, phi: np.ndarray):
    """Per-element field response and steering phase toward each (n, m)
    direction. Returns (field, steer): field is (n_elements, 2, n, m)
    with the theta/phi components on axis 1, steer is (n_elements, n, m).
    """
    r_hat = unit_direction(theta, phi)  # (n, m, 3)
    pos = element_positions(geom)  # (E, 3)
    steer = np.exp(2j * np.pi * np.einsum("ed,nmd->enm", pos, r_hat))
    pols = element_pols(geom)
    field = np.empty((geom.n_elements, 2) + theta.shape)
    for pol in range(geom.n_pol):
        f_t, f_p = field_pattern(geom.pol_slants_deg[pol], geom.pattern, theta, phi)
        sel = pols == pol
        field[sel, 0] = f_t
        field[sel, 1] = f_p
    return field, steer


def _coupling_matrix(rays: RayParameterSet) -> np.ndarray:
    """2x2 phase/cross-polarization coupling per sub-path, (2, 2, n, m)."""
    leak = np.sqrt(1.0 / rays.xpr)
    return np.array(
        [
            [np.exp(1j * rays.phase_tt), leak * np.exp(1j * rays.phase_tp)],
            [leak * np.exp(1j * rays.phase_pt), np.exp(1j * rays.phase_pp)],
        ]
    )


def _ray_matrices(rays: RayParameterSet, geom_tx: ArrayGeometry,
                  geom_rx: ArrayGeometry, t: float) -> np.ndarray:
    """Diffuse per-ray channel matrices at time ``t``, shape (n, rx, tx)."""
    f_rx, s_rx = _element_responses(geom_rx, rays.zoa, rays.aoa)
    f_tx, s_tx = _element_responses(geom_tx, rays.zod, rays.aod)
    coupling = _coupling_matrix(rays) * np.exp(2j * np.pi * rays.doppler_hz * t)
    rx_term = f_rx * s_rx[:, None]  # (U, 2, n, m)
    tx_term = f_tx * s_tx[:, None]  # (S, 2, n, m)
    mixed = np.einsum("abnm,sbnm->asnm", coupling, tx_term)
    per_subpath = np.einsum("uanm,asnm->usnm", rx_term, mixed)
    scale = np.sqrt(rays.powers / rays.n_subpaths)
    return np.einsum("usnm,n->nus", per_subpath, scale)


def _los_matrix(rays: RayParameterSet, geom_tx: ArrayGeometry,
                geom_rx: ArrayGeometry, t: float) -> np.ndarray:
    """Deterministic component matrix, shape (rx, tx)."""
    zoa, aoa, zod, aod = rays.los_angles
    shape = (1, 1)
    f_rx, s_rx = _element_responses(geom_rx, np.full(shape, zoa), np.full(shape, aoa))
    f_tx, s_tx = _element_responses(geom_tx, np.full(shape, zod), np.full(shape, aod))
    phase = np.exp(1j * rays.los_phase)
    coupling = np.array([[phase, 0.0], [0.0, -phase]])
    rx_term = (f_rx * s_rx[:, None])[:, :, 0, 0]  # (U, 2)
    tx_term = (f_tx * s_tx[:, None])[:, :, 0, 0]  # (S, 2)
    base = rx_term @ coupling @ tx_term.T
    return base * np.exp(2j * np.pi * rays.los_doppler_hz * t)


def _check_element(geom: ArrayGeometry, index: int, name: str) -> None:
    if not 0 <= index < geom.n_elements:
        raise ValueError(f"{name} index {index} out of range 0..{geom.n_elements - 1}")


def nlos_coefficient(rays: RayParameterSet, geom_tx: ArrayGeometry,
                     geom_rx: ArrayGeometry, u: int, s: int, n: int,
                     t: float = 0.0) -> complex:
    """Diffuse channel coefficient of ray ``n`` from transmit element ``s``
    to receive element ``u`` at time ``t``."""
    if not 0 <= n < rays.n_rays:
        raise ValueError(f"ray index {n} out of range 0..{rays.n_rays - 1}")
    _check_element(geom_rx, u, "receive element")
    _check_element(geom_tx, s, "transmit element")
    return complex(_ray_matrices(rays, geom_tx, geom_rx, t)[n, u, s])


def los_coefficient(rays: RayParameterSet, geom_tx: ArrayGeometry,
                    geom_rx: ArrayGeometry, u: int, s: int, n: int,
                    t: float = 0.0) -> complex:
    """Ricean channel coefficient: the diffuse term scaled down by the
    Ricean factor, with the deterministic component added on ray 0."""
    if rays.ricean_k is None:
        raise ValueError("ray set carries no Ricean factor")
    k_r = rays.ricean_k
    diffuse = nlos_coefficient(rays, geom_tx, geom_rx, u, s, n, t)
    if k_r == 0.0:
        return diffuse
    out = math.sqrt(1.0 / (k_r + 1.0)) * diffuse
    if n == 0:
        out += math.sqrt(k_r / (k_r + 1.0)) * complex(
            _los_matrix(rays, geom_tx, geom_rx, t)[u, s]
        )
    return complex(out)


def _centered(rng, kind: str, spread_rad: float, size) -> np.ndarray:
    """Zero-mean draw with the requested standard deviation."""
    if spread_rad == 0.0:
        return np.zeros(size)
    if kind == "gaussian":
        return rng.normal(0.0, spread_rad, size)
    return rng.laplace(0.0, spread_rad / math.sqrt(2.0), size)


def sample_rays(rng: np.random.Generator, cfg: SamplerConfig,
                wavelength_m: float) -> RayParameterSet:
    """Draw one user's ray set.

    Departure azimuths are wrapped-Gaussian and departure zeniths
    Laplacian around a per-user mean direction; the elevation spread is
    deliberately the narrower one. Draw order is fixed so a given
    generator state always yields the same parameters.
    """
    n, m = cfg.n_rays, cfg.n_subpaths
    d = math.radians

    powers = rng.exponential(1.0, n)
    powers = powers / powers.sum()
    delays = rng.exponential(cfg.delay_spread_s, n) if cfg.delay_spread_s > 0 else np.zeros(n)

    centers = {
        "aod": rng.uniform(d(cfg.aod_center_range_deg[0]), d(cfg.aod_center_range_deg[1])),
        "zod": rng.uniform(d(cfg.zod_center_range_deg[0]), d(cfg.zod_center_range_deg[1])),
        "aoa": rng.uniform(d(cfg.aoa_center_range_deg[0]), d(cfg.aoa_center_range_deg[1])),
        "zoa": rng.uniform(d(cfg.zoa_center_range_deg[0]), d(cfg.zoa_center_range_deg[1])),
    }
    cluster = {
        "aod": centers["aod"] + _centered(rng, "gaussian", d(cfg.spread_aod_deg), n),
        "zod": centers["zod"] + _centered(rng, "laplace", d(cfg.spread_zod_deg), n),
        "aoa": centers["aoa"] + _centered(rng, "gaussian", d(cfg.spread_aoa_deg), n),
        "zoa": centers["zoa"] + _centered(rng, "laplace", d(cfg.spread_zoa_deg), n),
    }
    aod = wrap_azimuth(cluster["aod"][:, None] + _centered(rng, "gaussian", d(cfg.subpath_spread_az_deg), (n, m)))
    aoa = wrap_azimuth(cluster["aoa"][:, None] + _centered(rng, "gaussian", d(cfg.subpath_spread_az_deg), (n, m)))
    zod = np.clip(cluster["zod"][:, None] + _centered(rng, "laplace", d(cfg.subpath_spread_zen_deg), (n, m)), 0.0, np.pi)
    zoa = np.clip(cluster["zoa"][:, None] + _centered(rng, "laplace", d(cfg.subpath_spread_zen_deg), (n, m)), 0.0, np.pi)

    phases = wrap_azimuth(rng.uniform(-np.pi, np.pi, (4, n, m)))
    xpr = 10.0 ** (rng.normal(cfg.xpr_mean_db, cfg.xpr_std_db, (n, m)) / 10.0)

    speed_mps = cfg.speed_kmh / 3.6
    motion_az = rng.uniform(-np.pi, np.pi)
    motion = np.array([math.cos(motion_az), math.sin(motion_az), 0.0])
    doppler = (speed_mps / wavelength_m) * unit_direction(zoa, aoa) @ motion

    kwargs = {}
    if cfg.ricean_k is not None:
        los_phase = float(wrap_azimuth(rng.uniform(-np.pi, np.pi)))
        los_dir = unit_direction(centers["zoa"], centers["aoa"])
        kwargs = {
            "ricean_k": cfg.ricean_k,
            "los_angles": (centers["zoa"], centers["aoa"], centers["zod"], centers["aod"]),
            "los_phase": los_phase,
            "los_doppler_hz": float((speed_mps / wavelength_m) * los_dir @ motion),
        }
    return RayParameterSet(
        powers=powers, zoa=zoa, aoa=aoa, zod=zod, aod=aod,
        phase_tt=phases[0], phase_tp=phases[1], phase_pt=phases[2], phase_pp=phases[3],
        xpr=xpr, doppler_hz=doppler, delays_s=delays, **kwargs,
    )


def user_rng(seed: int, user: int) -> np.random.Generator:
    """Independent, stable per-user stream: the (seed, user) pair feeds a
    seed sequence, so user k's parameters never depend on how many other
    users exist or in which order they are generated."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(user,)))


def generate_drop(config: ExperimentConfig, seed: int) -> ChannelTensor:
    """Generate one seeded drop: every user's channel on every subcarrier.

    Deterministic in (config, seed). Per-ray delays turn into the
    subcarrier phase ramp exp(-j 2 pi f tau), which is what makes
    averaging across a precoding unit lossy.
    """
    config.validate()
    n_sc_total = config.n_rb_total * config.n_sc_per_rb
    freqs = np.arange(n_sc_total) * config.subcarrier_spacing_hz
    h = np.empty(
        (config.users, n_sc_total, config.user_antennas, config.nt),
        dtype=np.complex128,
    )
    for k in range(config.users):
        rays = sample_rays(user_rng(seed, k), config.sampler, config.wavelength_m)
        per_ray = _ray_matrices(rays, config.tx_array, config.rx_array, config.time_s)
        if rays.ricean_k is not None and rays.ricean_k > 0:
            per_ray = per_ray * math.sqrt(1.0 / (rays.ricean_k + 1.0))
            per_ray[0] += math.sqrt(rays.ricean_k / (rays.ricean_k + 1.0)) * _los_matrix(
                rays, config.tx_array, config.rx_array, config.time_s
            )
        ramp = np.exp(-2j * np.pi * np.outer(rays.delays_s, freqs))
        h[k] = np.einsum("nus,nc->cus", per_ray, ramp)
    if not np.isfinite(h).all():
        raise ValueError("channel generation produced non-finite entries")
    return ChannelTensor(
        h=h,
        n_rb=config.n_rb_total,
        n_sc=config.n_sc_per_rb,
        wavelength_m=config.wavelength_m,
        seed=seed,
        geometry=config.tx_array,
    )
