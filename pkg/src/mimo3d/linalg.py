"""Dense complex matrix kernel: Hermitian eigendecomposition, products,
Kronecker composition and subspace-distance utilities.

Everything here is a pure function of its inputs; results are plain numpy
arrays that can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

# Jacobi stops when the squared off-diagonal Frobenius mass falls below this
# fraction of the input's squared Frobenius norm, or after _MAX_SWEEPS sweeps.
_OFF_DIAG_TOL = 1e-24
_MAX_SWEEPS = 30

_HERMITIAN_RTOL = 1e-10
_PHASE_FLOOR = 1e-12


@dataclass(frozen=True)
class EigPair:
    """Dominant eigenpairs of a Hermitian matrix.

    Attributes
    ----------
    values : np.ndarray
        Real eigenvalues, sorted descending.
    vectors : np.ndarray
        Matrix whose columns are the matching unit-norm eigenvectors. In
        each column the first entry with modulus above 1e-12 is made real
        and positive, so repeated calls on the same matrix are
        bit-comparable for non-degenerate spectra.
    """

    values: np.ndarray
    vectors: np.ndarray


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D complex128 array, rejecting other ranks."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    return m


def conj_transpose(a) -> np.ndarray:
    return as_matrix(a).conj().T


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch for product: {a.shape} @ {b.shape}")
    return a @ b


def gram(a) -> np.ndarray:
    """A @ A^H, symmetrized by averaging with its conjugate transpose."""
    a = as_matrix(a)
    g = a @ a.conj().T
    return 0.5 * (g + g.conj().T)


def kron_vec(a, b) -> np.ndarray:
    """Kronecker product of two vectors: out[i*len(b) + j] = a[i] * b[j]."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != 1 or b.ndim != 1:
        raise ValueError("kron_vec expects 1-D vectors")
    if a.size == 0 or b.size == 0:
        raise ValueError("kron_vec arguments must be non-empty")
    return np.kron(a, b)


if numba is not None:

    @numba.njit(cache=True)
    def _jacobi_cycle(w, vt, max_sweeps, threshold, skip):  # pragma: no cover
        """Row-cyclic Jacobi sweeps on Hermitian ``w``, diagonalizing in
        place while ``vt`` accumulates the transposed eigenvector matrix."""
        n = w.shape[0]
        for _ in range(max_sweeps):
            off = 0.0
            for i in range(n):
                for j in range(n):
                    if i != j:
                        x = w[i, j]
                        off += x.real * x.real + x.imag * x.imag
            if off <= threshold:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    wpq = w[p, q]
                    r = abs(wpq)
                    if r <= skip:
                        continue
                    theta = 0.5 * np.arctan2(2.0 * r, w[p, p].real - w[q, q].real)
                    c = np.cos(theta)
                    u = (wpq / r) * np.sin(theta)
                    uc = u.conjugate()
                    for j in range(n):
                        xp = w[p, j]
                        xq = w[q, j]
                        w[p, j] = c * xp + u * xq
                        w[q, j] = c * xq - uc * xp
                    for i in range(n):
                        xp = w[i, p]
                        xq = w[i, q]
                        w[i, p] = c * xp + uc * xq
                        w[i, q] = c * xq - u * xp
                    w[p, q] = 0.0
                    w[q, p] = 0.0
                    for j in range(n):
                        xp = vt[p, j]
                        xq = vt[q, j]
                        vt[p, j] = c * xp + uc * xq
                        vt[q, j] = c * xq - u * xp

else:  # pragma: no cover
    _jacobi_cycle = None


def _rotation_rounds(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Round-robin pivot schedule: every index pair appears exactly once per
    sweep and the pairs within one round are disjoint, so a round's rotations
    can be applied as a single batched unitary update."""
    players = list(range(n if n % 2 == 0 else n + 1))
    rounds = []
    for _ in range(len(players) - 1):
        half = len(players) // 2
        pairs = [
            (min(players[i], players[-1 - i]), max(players[i], players[-1 - i]))
            for i in range(half)
        ]
        pairs = [(p, q) for p, q in pairs if q < n]
        if pairs:
            p_arr = np.array([p for p, _ in pairs], dtype=np.intp)
            q_arr = np.array([q for _, q in pairs], dtype=np.intp)
            rounds.append((p_arr, q_arr))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _jacobi_sweep(w: np.ndarray, vt: np.ndarray, rounds, skip: float) -> None:
    """One batched cyclic Jacobi sweep, used when numba is unavailable.

    ``vt`` accumulates the transpose of the eigenvector matrix so its
    update is a row operation. ``w`` stays Hermitian throughout, which
    lets the column half of each similarity be written as the conjugate
    of the freshly rotated rows instead of a second strided update.
    """
    for p, q in rounds:
        wpq = w[p, q]
        r = np.abs(wpq)
        active = r > skip
        if not np.any(active):
            continue
        if not active.all():
            p = p[active]
            q = q[active]
            wpq = wpq[active]
            r = r[active]
        theta = 0.5 * np.arctan2(2.0 * r, w[p, p].real - w[q, q].real)
        c = np.cos(theta)
        u = (wpq / r) * np.sin(theta)  # sin(theta) * exp(i*arg(w_pq))
        uc = np.conj(u)

        # Rows of J^H W; the pairs are disjoint, so one batch is exact.
        rp = w[p, :]
        rq = w[q, :]
        bp = c[:, None] * rp + u[:, None] * rq
        bq = c[:, None] * rq - uc[:, None] * rp

        # The right rotation only touches columns p and q; apply it inside
        # the gathered rows, then mirror those rows onto the columns.
        for blk in (bp, bq):
            sp = blk[:, p]
            sq = blk[:, q]
            blk[:, p] = sp * c[None, :] + sq * uc[None, :]
            blk[:, q] = sq * c[None, :] - sp * u[None, :]

        w[p, :] = bp
        w[q, :] = bq
        w[:, p] = bp.conj().T
        w[:, q] = bq.conj().T
        w[p, q] = 0.0
        w[q, p] = 0.0

        vp = vt[p, :]
        vq = vt[q, :]
        vt[p, :] = c[:, None] * vp + uc[:, None] * vq
        vt[q, :] = c[:, None] * vq - u[:, None] * vp


def _jacobi_cycle_numpy(w, vt, max_sweeps, threshold, skip):
    rounds = _rotation_rounds(w.shape[0])
    for _ in range(max_sweeps):
        # Direct off-diagonal sum; a total-minus-diagonal shortcut would
        # cancel catastrophically long before the 1e-24 threshold.
        mass = np.abs(w) ** 2
        np.fill_diagonal(mass, 0.0)
        if float(mass.sum()) <= threshold:
            break
        _jacobi_sweep(w, vt, rounds, skip)


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first entry with modulus > 1e-12 is real
    and positive."""
    mags = np.abs(vectors)
    significant = mags > _PHASE_FLOOR
    has_any = significant.any(axis=0)
    first = np.argmax(significant, axis=0)
    cols = np.arange(vectors.shape[1])
    pivot = vectors[first, cols]
    pmag = np.abs(pivot)
    scale = np.where(has_any & (pmag > 0), np.conj(pivot) / np.where(pmag > 0, pmag, 1.0), 1.0)
    return vectors * scale[None, :]


def hermitian_eig(a, k: int) -> EigPair:
    """Return the ``k`` dominant eigenpairs of a Hermitian matrix.

    Uses cyclic Jacobi rotations; sweeps stop once the off-diagonal
    Frobenius mass drops below 1e-24 times the squared Frobenius norm of
    the input, or after 30 sweeps. Per-pair residuals satisfy
    ``|A v - lam v| <= 1e-9 |A|_F``.

    Parameters
    ----------
    a : array_like
        Square matrix, Hermitian within 1e-10 relative Frobenius error.
    k : int
        Number of dominant pairs to return, ``1 <= k <= dim(a)``.
    """
    a = as_matrix(a)
    n, m = a.shape
    if n != m:
        raise ValueError(f"matrix must be square, got {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    fro = float(np.linalg.norm(a))
    defect = float(np.linalg.norm(a - a.conj().T))
    if defect > _HERMITIAN_RTOL * max(fro, np.finfo(float).tiny):
        raise ValueError(
            f"matrix is not Hermitian: |A - A^H| = {defect:.3e} vs |A| = {fro:.3e}"
        )
    if not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= {n}, got {k}")

    w = 0.5 * (a + a.conj().T)
    vt = np.eye(n, dtype=np.complex128)
    threshold = _OFF_DIAG_TOL * fro * fro
    skip = 1e-18 * fro
    cycle = _jacobi_cycle if _jacobi_cycle is not None else _jacobi_cycle_numpy
    cycle(w, vt, _MAX_SWEEPS, threshold, skip)

    values = np.diag(w).real.copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = _fix_phases(vt.T[:, order])
    return EigPair(values=values[:k], vectors=np.ascontiguousarray(vectors[:, :k]))


def principal_angle(u, v) -> float:
    """Largest principal angle between the column spans of two matrices
    with orthonormal columns, in radians within [0, pi/2].

    1-D inputs are treated as single columns. Small angles are computed
    from the sine (the part of V outside span(U)); the cosine
    formulation alone cannot resolve angles below about 1e-8.
    """
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    if u.ndim == 1:
        u = u[:, None]
    if v.ndim == 1:
        v = v[:, None]
    if u.ndim != 2 or v.ndim != 2 or u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    overlap = u.conj().T @ v
    residual = v - u @ overlap
    # Largest singular value of (I - U U^H) V is the sine of the largest
    # principal angle; accurate where it matters, near zero.
    pair = hermitian_eig(gram(residual.conj().T), 1)
    sin_sq = float(np.clip(pair.values[0], 0.0, 1.0))
    if sin_sq <= 0.5:
        return float(np.arcsin(np.sqrt(sin_sq)))
    # Wide angles: switch to the cosine branch, where it is the accurate one.
    pair = hermitian_eig(gram(overlap), overlap.shape[0])
    lam_min = float(np.clip(pair.values[-1], 0.0, 1.0))
    return float(np.arccos(np.sqrt(lam_min)))
