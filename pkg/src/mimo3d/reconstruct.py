"""Effective-channel reconstruction: collapse a user's per-subcarrier
M x Nt channels inside one precoding unit into an S x Nt matrix with
orthonormal rows.

``direct_svd`` eigendecomposes the full averaged correlation matrix.
The three Kronecker variants split that job into an elevation stage and
an azimuth stage: they differ only in how many elevation correlation
matrices they keep (one shared, one per column, or one per polarization
group), so all three run through the same two-stage pipeline here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg

# Relative eigenvalue floor below which a requested stream is considered
# unsupported by the correlation matrix.
_RANK_TOL = 1e-12


class DegenerateRankError(RuntimeError):
    """The correlation matrix cannot support the requested stream count."""


@dataclass(frozen=True)
class PUView:
    """One user's channels within one precoding unit.

    ``channels`` has shape (n_subcarriers, M, Nt) where Nt = v_a * v_e;
    column ``v`` of the array covers the contiguous element indices
    ``v * v_e`` through ``(v + 1) * v_e - 1``. ``pol_groups`` maps each
    column to its polarization group and is only required by the
    per-polarization method.
    """

    channels: np.ndarray
    v_a: int
    v_e: int
    streams: int
    pol_groups: np.ndarray | None = None

    def __post_init__(self):
        ch = np.asarray(self.channels, dtype=np.complex128)
        if ch.ndim != 3:
            raise ValueError(f"channels must be (n_sub, M, Nt), got shape {ch.shape}")
        object.__setattr__(self, "channels", ch)
        n_sub, m, nt = ch.shape
        if self.v_a * self.v_e != nt:
            raise ValueError(
                f"v_a * v_e = {self.v_a * self.v_e} does not match Nt = {nt}"
            )
        if not 1 <= self.streams <= min(m, nt):
            raise ValueError(
                f"streams must lie in 1..min(M, Nt) = {min(m, nt)}, got {self.streams}"
            )
        if n_sub < 1:
            raise ValueError("need at least one subcarrier")
        if not np.isfinite(ch).all():
            raise ValueError("channels contain non-finite entries")
        if self.pol_groups is not None:
            groups = np.asarray(self.pol_groups)
            if groups.shape != (self.v_a,):
                raise ValueError(f"pol_groups must have one entry per column ({self.v_a})")
            object.__setattr__(self, "pol_groups", groups)

    @property
    def n_subcarriers(self) -> int:
        return self.channels.shape[0]

    @property
    def user_antennas(self) -> int:
        return self.channels.shape[1]

    @property
    def nt(self) -> int:
        return self.channels.shape[2]

    def column_blocks(self) -> np.ndarray:
        """Channels reshaped to (n_sub, M, v_a, v_e) column blocks."""
        n_sub, m, _ = self.channels.shape
        return self.channels.reshape(n_sub, m, self.v_a, self.v_e)


@dataclass(frozen=True)
class EffectiveChannel:
    """Reconstruction output: ``hhat`` is S x Nt with orthonormal rows.

    ``eigenvalues`` are the dominant values of the stage that produced
    the rows; ``spectra`` keeps each stage's computed spectrum for
    diagnostics; ``eig_calls`` counts eigendecompositions performed.
    """

    hhat: np.ndarray
    method: str
    eigenvalues: np.ndarray
    spectra: dict = field(default_factory=dict)
    eig_calls: int = 0

    @property
    def streams(self) -> int:
        return self.hhat.shape[0]


def _check_rank(values: np.ndarray, streams: int, method: str) -> None:
    lam1 = float(values[0])
    if lam1 <= 0.0:
        raise DegenerateRankError(
            f"{method}: correlation matrix has no positive eigenvalue"
        )
    floor = _RANK_TOL * lam1
    lam_s = float(values[streams - 1])
    lam_next = float(values[streams]) if streams < values.shape[0] else lam_s
    if lam_s < floor and lam_next < floor:
        raise DegenerateRankError(
            f"{method}: eigenvalue {streams} of the correlation matrix is "
            f"{lam_s:.3e}, below {_RANK_TOL:g} of the dominant {lam1:.3e}"
        )


def _mean_correlation(channels: np.ndarray) -> np.ndarray:
    """(1/n_sub) sum of H^H H over the subcarriers of the unit."""
    r = np.einsum("smn,smp->np", channels.conj(), channels)
    r /= channels.shape[0]
    return 0.5 * (r + r.conj().T)


def direct_svd(pu: PUView) -> EffectiveChannel:
    """Eigen-beamforming reference: rows of the output are the dominant
    eigenvectors of the averaged Nt x Nt correlation matrix."""
    r = _mean_correlation(pu.channels)
    k = min(pu.streams + 1, r.shape[0])
    pair = linalg.hermitian_eig(r, k)
    _check_rank(pair.values, pu.streams, "direct")
    hhat = pair.vectors[:, : pu.streams].conj().T
    return EffectiveChannel(
        hhat=hhat,
        method="direct",
        eigenvalues=pair.values[: pu.streams].copy(),
        spectra={"full": pair.values},
        eig_calls=1,
    )


def _column_groups(pu: PUView, mode: str) -> list[np.ndarray]:
    if mode == "shared":
        return [np.arange(pu.v_a)]
    if mode == "per_column":
        return [np.array([v]) for v in range(pu.v_a)]
    if pu.pol_groups is None:
        raise ValueError("per-polarization reconstruction needs pol_groups metadata")
    ids = np.unique(pu.pol_groups)
    return [np.flatnonzero(pu.pol_groups == g) for g in ids]


def _kron_reconstruct(pu: PUView, mode: str, tag: str) -> EffectiveChannel:
    """Shared two-stage pipeline for the Kronecker-factored methods.

    Stage 1 averages elevation correlation over each column group and
    keeps one dominant elevation vector per group. Stage 2 compresses
    every column with its group's vector, eigendecomposes the much
    smaller azimuth correlation, and rebuilds rows as per-column
    products azimuth(v) * elevation_group(v).
    """
    if pu.streams > pu.v_a:
        # Rows are azimuth (x) elevation products, so at most v_a of them
        # can be orthonormal.
        raise DegenerateRankError(
            f"{tag}: cannot build {pu.streams} orthonormal rows from "
            f"{pu.v_a} azimuth columns"
        )
    blocks = pu.column_blocks()
    n_sub = pu.n_subcarriers
    groups = _column_groups(pu, mode)

    eig_calls = 0
    elevation_spectra = []
    e_cols = np.empty((pu.v_e, pu.v_a), dtype=np.complex128)
    for cols in groups:
        sub = blocks[:, :, cols, :]
        r_e = np.einsum("smve,smvf->ef", sub.conj(), sub)
        r_e /= n_sub * len(cols)
        r_e = 0.5 * (r_e + r_e.conj().T)
        pair = linalg.hermitian_eig(r_e, 1)
        eig_calls += 1
        elevation_spectra.append(pair.values)
        e_cols[:, cols] = pair.vectors[:, 0][:, None]

    # Equivalent azimuth channel: each column block collapsed onto its
    # group's elevation vector.
    h_bar = np.einsum("smve,ev->smv", blocks, e_cols)
    r_a = np.einsum("smv,smw->vw", h_bar.conj(), h_bar)
    r_a /= n_sub
    r_a = 0.5 * (r_a + r_a.conj().T)
    k = min(pu.streams + 1, pu.v_a)
    pair = linalg.hermitian_eig(r_a, k)
    eig_calls += 1
    _check_rank(pair.values, pu.streams, tag)

    a_vecs = pair.vectors[:, : pu.streams]  # (v_a, S)
    stacked = np.einsum("vi,ev->vei", a_vecs, e_cols)  # (v_a, v_e, S)
    hhat = stacked.reshape(pu.nt, pu.streams).conj().T
    return EffectiveChannel(
        hhat=hhat,
        method=tag,
        eigenvalues=pair.values[: pu.streams].copy(),
        spectra={"elevation": elevation_spectra, "azimuth": pair.values},
        eig_calls=eig_calls,
    )


def method1(pu: PUView) -> EffectiveChannel:
    """One elevation vector shared by every column (2 eigendecompositions)."""
    return _kron_reconstruct(pu, "shared", "method1")


def method2(pu: PUView) -> EffectiveChannel:
    """One elevation vector per column (v_a + 1 eigendecompositions)."""
    return _kron_reconstruct(pu, "per_column", "method2")


def method3(pu: PUView) -> EffectiveChannel:
    """One elevation vector per polarization group (n_pol + 1
    eigendecompositions)."""
    return _kron_reconstruct(pu, "per_polarization", "method3")


RECONSTRUCTORS = {
    "direct": direct_svd,
    "method1": method1,
    "method2": method2,
    "method3": method3,
}


def reconstruct(pu: PUView, method: str) -> EffectiveChannel:
    try:
        fn = RECONSTRUCTORS[method]
    except KeyError:
        raise ValueError(f"unknown reconstruction method {method!r}") from None
    return fn(pu)


def pu_views(tensor, user: int, n_rb_per_pu: int, streams: int) -> list[PUView]:
    """Slice one user's tensor into per-precoding-unit views.

    The tensor's geometry supplies the column layout (polarizations count
    as separate columns) and the polarization grouping.
    """
    geom = tensor.geometry
    if geom is None:
        raise ValueError("tensor carries no array geometry")
    if tensor.n_rb % n_rb_per_pu != 0:
        raise ValueError(
            f"PU granularity {n_rb_per_pu} does not divide {tensor.n_rb} resource blocks"
        )
    sc_per_pu = n_rb_per_pu * tensor.n_sc
    n_pu = tensor.n_rb // n_rb_per_pu
    groups = geom.pol_groups()
    return [
        PUView(
            channels=tensor.h[user, p * sc_per_pu : (p + 1) * sc_per_pu],
            v_a=geom.n_columns,
            v_e=geom.n_rows,
            streams=streams,
            pol_groups=groups,
        )
        for p in range(n_pu)
    ]
