"""Multi-user zero-forcing precoding, power normalization, the
interference-whitening MMSE receiver, and per-stream SINR / sum-rate
scoring.

The transmit scale rho_f and the noise power sigma^2 are kept explicit:
the precoder carries unit-scale directions and the budget enters only
through normalization, so scores isolate how well the reconstructed
subspaces null cross-user interference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg

NORMALIZATIONS = ("entire", "per_user", "per_stream")

_MAX_CONDITION = 1e12


class SingularPrecoderError(RuntimeError):
    """Stacked effective channels are too close to rank deficient."""


@dataclass(frozen=True)
class PrecodeResult:
    """Normalized precoder. ``w`` is Nt x S_tot; ``user_slices`` maps each
    user to its column block."""

    w: np.ndarray
    normalization: str
    power_budget: float
    user_slices: tuple[slice, ...]


@dataclass(frozen=True)
class LinkScore:
    """Per-stream rate-equivalent SINRs and the resulting sum rate.

    ``sinr[k][i]`` is the linear SINR whose single-stream Shannon rate
    equals stream (k, i)'s rate averaged over all scored subcarriers, so
    ``sum_rate`` always equals the sum of log2(1 + sinr) exactly.
    """

    sinr: tuple[np.ndarray, ...]
    sum_rate: float
    noise_power: float
    rho_f: float


def user_slices(stream_counts) -> tuple[slice, ...]:
    """Column slices of each user's block in the stacked precoder."""
    slices = []
    start = 0
    for s in stream_counts:
        slices.append(slice(start, start + s))
        start += s
    return tuple(slices)


def zf_precoder(stacked: np.ndarray) -> np.ndarray:
    """Unnormalized zero-forcer W = H^H (H H^H)^-1 for stacked effective
    channels (S_tot x Nt), so that stacked @ W is the identity."""
    stacked = linalg.as_matrix(stacked, "stacked")
    s_tot, nt = stacked.shape
    if s_tot > nt:
        raise ValueError(f"cannot zero-force {s_tot} streams on {nt} antennas")
    g = linalg.gram(stacked)
    pair = linalg.hermitian_eig(g, s_tot)
    lam_max = float(pair.values[0])
    lam_min = float(pair.values[-1])
    condition = math.inf if lam_min <= 0 else lam_max / lam_min
    if not condition < _MAX_CONDITION:
        raise SingularPrecoderError(
            f"stacked effective channel gram is ill-conditioned: "
            f"condition number {condition:.3e} (limit {_MAX_CONDITION:.0e})"
        )
    return np.linalg.solve(g, stacked).conj().T


def normalize(w: np.ndarray, mode: str, power_budget: float,
              slices: tuple[slice, ...] | None = None) -> PrecodeResult:
    """Scale precoder columns to meet the power budget.

    ``entire`` scales the whole matrix, ``per_user`` gives each user's
    block an equal share, ``per_stream`` gives each column an equal
    share. Column directions never change.
    """
    w = linalg.as_matrix(w, "precoder")
    if mode not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}, got {mode!r}")
    if power_budget <= 0:
        raise ValueError(f"power budget must be positive, got {power_budget}")
    if slices is None:
        if mode == "per_user":
            raise ValueError("per_user normalization needs user_slices")
        slices = user_slices([w.shape[1]])
    if mode == "entire":
        total = float(np.sum(np.abs(w) ** 2))
        if total <= 0:
            raise ValueError("cannot normalize a zero precoder")
        out = w * math.sqrt(power_budget / total)
    elif mode == "per_user":
        out = w.copy()
        share = power_budget / len(slices)
        for sl in slices:
            block = float(np.sum(np.abs(w[:, sl]) ** 2))
            if block <= 0:
                raise ValueError(f"cannot normalize zero-power user block {sl}")
            out[:, sl] *= math.sqrt(share / block)
    else:
        norms_sq = np.sum(np.abs(w) ** 2, axis=0)
        if np.any(norms_sq <= 0):
            raise ValueError("cannot normalize zero-power stream columns")
        out = w * np.sqrt(power_budget / w.shape[1] / norms_sq)[None, :]
    return PrecodeResult(w=out, normalization=mode, power_budget=float(power_budget),
                         user_slices=slices)


def mmse_irc_receiver(h_k: np.ndarray, w: np.ndarray, user_slice: slice,
                      noise_power: float) -> np.ndarray:
    """Interference-whitening MMSE combiner for one user.

    Whitens with the full received covariance (every user's streams plus
    noise) and matches the user's own effective link D = H_k W_k:
    E = D^H (sum_l H_k W_l W_l^H H_k^H + sigma^2 I)^-1, shape (S_k, M).
    """
    if noise_power <= 0:
        raise ValueError(f"noise power must be positive, got {noise_power}")
    h_k = linalg.as_matrix(h_k, "channel")
    t = linalg.matmul(h_k, w)  # M x S_tot
    m = h_k.shape[0]
    cov = t @ t.conj().T + noise_power * np.eye(m)
    d = t[:, user_slice]
    return np.linalg.solve(cov, d).conj().T


def _stream_rates(channels, effectives, mode, rho_f, noise_power,
                  power_budget, rate_cap):
    """Per-subcarrier, per-stream rates inside one precoding unit.

    ``channels`` is (K, n_sub, M, Nt); ``effectives`` one matrix or
    EffectiveChannel per user. Returns (n_sub, K, S) rates in bits.
    """
    hhats = [e.hhat if hasattr(e, "hhat") else np.asarray(e) for e in effectives]
    counts = [h.shape[0] for h in hhats]
    slices = user_slices(counts)
    stacked = np.vstack(hhats)
    if power_budget is None:
        power_budget = float(stacked.shape[0])
    w = normalize(zf_precoder(stacked), mode, power_budget, slices).w

    k_users = channels.shape[0]
    n_sub = channels.shape[1]
    rates = np.zeros((n_sub, k_users, max(counts)))
    for k in range(k_users):
        sl = slices[k]
        for c in range(n_sub):
            h = channels[k, c]
            combiner = mmse_irc_receiver(h, w, sl, noise_power)
            gains = combiner @ h @ w  # S_k x S_tot
            power = np.abs(gains) ** 2
            own = power[np.arange(counts[k]), np.arange(sl.start, sl.stop)]
            total = power.sum(axis=1)
            noise = noise_power * np.sum(np.abs(combiner) ** 2, axis=1)
            denom = rho_f * (total - own) + noise
            sinr = np.where(own > 0, rho_f * own / np.where(denom > 0, denom, 1.0), 0.0)
            rate = np.log2(1.0 + sinr)
            if rate_cap is not None:
                rate = np.minimum(rate, rate_cap)
            rates[c, k, : counts[k]] = rate
    return rates, counts


def score_pu(channels, effectives, mode: str, rho_f: float, noise_power: float,
             power_budget: float | None = None,
             rate_cap: float | None = None) -> LinkScore:
    """Score one precoding unit: build the unit's precoder once, apply it
    to every subcarrier, and average the per-stream rates."""
    channels = np.asarray(channels, dtype=np.complex128)
    if channels.ndim != 4:
        raise ValueError("channels must be (users, n_sub, M, Nt)")
    rates, counts = _stream_rates(
        channels, effectives, mode, rho_f, noise_power, power_budget, rate_cap
    )
    return _score_from_rates(rates.mean(axis=0), counts, rho_f, noise_power)


def _score_from_rates(mean_rates, counts, rho_f, noise_power) -> LinkScore:
    sinr = tuple(
        np.exp2(mean_rates[k, : counts[k]]) - 1.0 for k in range(len(counts))
    )
    sum_rate = float(sum(np.sum(np.log2(1.0 + s)) for s in sinr))
    return LinkScore(sinr=sinr, sum_rate=sum_rate,
                     noise_power=float(noise_power), rho_f=float(rho_f))


def link_score(tensor, effectives, mode: str, rho_f: float, noise_power: float,
               power_budget: float | None = None,
               rate_cap: float | None = None) -> LinkScore:
    """Score a whole drop.

    ``effectives`` is a sequence over precoding units, each a sequence of
    per-user effective channels; a flat per-user sequence means a single
    unit spanning the full band. One precoder is built per unit from that
    unit's effectives and reused on all of the unit's subcarriers.
    """
    per_pu = list(effectives)
    if per_pu and (hasattr(per_pu[0], "hhat") or isinstance(per_pu[0], np.ndarray)):
        per_pu = [per_pu]
    n_pu = len(per_pu)
    n_sc_total = tensor.h.shape[1]
    if n_pu < 1 or n_sc_total % n_pu != 0:
        raise ValueError(
            f"{n_pu} precoding units do not evenly cover {n_sc_total} subcarriers"
        )
    sc_per_pu = n_sc_total // n_pu
    all_rates = []
    counts = None
    for p, eff in enumerate(per_pu):
        rates, counts = _stream_rates(
            tensor.h[:, p * sc_per_pu : (p + 1) * sc_per_pu],
            eff, mode, rho_f, noise_power, power_budget, rate_cap,
        )
        all_rates.append(rates)
    mean_rates = np.concatenate(all_rates, axis=0).mean(axis=0)
    return _score_from_rates(mean_rates, counts, rho_f, noise_power)
