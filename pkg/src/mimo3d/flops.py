"""Symbolic FLOP cost model for the reconstruction pipeline.

Primitive costs follow the usual dense linear-algebra accounting: one
scalar addition or multiplication is one FLOP, with no real/complex
distinction. Each pipeline's total is composed from primitive terms so
an alternative accounting is a one-line change.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

PRIMITIVES = ("gram", "matmul", "scale", "sum", "qr", "svd_su", "svd_sv")


def _positive(name: str, *dims: int) -> None:
    for d in dims:
        if d < 1:
            raise ValueError(f"{name}: dimensions must be positive, got {dims}")


def _exact_int(value: Fraction, label: str) -> int:
    if value.denominator != 1:
        raise AssertionError(f"{label} cost is not an integer: {value}")
    return int(value)


def flops_gram(m: int, n: int) -> int:
    """A A^H for A of shape (m, n): m^2 n + m (n - m/2) - m/2."""
    _positive("gram", m, n)
    mf = Fraction(m)
    return _exact_int(mf * mf * n + mf * (n - Fraction(m, 2)) - Fraction(m, 2), "gram")


def flops_matmul(m: int, n: int, l: int) -> int:
    """A B for shapes (m, n) x (n, l): 2 m n l - m l."""
    _positive("matmul", m, n, l)
    return 2 * m * n * l - m * l


def flops_scale(m: int, n: int) -> int:
    "One multiply per entry."
    _positive("scale", m, n)
    return m * n


def flops_sum(m: int, n: int) -> int:
    "One addition per entry."
    _positive("sum", m, n)
    return m * n


def flops_qr(m: int, n: int) -> int:
    """Q of a QR factorization: 4 (m^2 n - m n^2 + n^3 / 3).

    The expression is not integral for every n; the nearest integer is
    returned so all primitives share one return type.
    """
    _positive("qr", m, n)
    exact = 4 * (Fraction(m) * m * n - Fraction(m) * n * n + Fraction(n**3, 3))
    return round(exact)


def flops_svd_su(m: int, n: int) -> int:
    """Singular values and U of an (m, n) matrix: 4 m^2 n + 13 n^3."""
    _positive("svd_su", m, n)
    return 4 * m * m * n + 13 * n**3


def flops_svd_sv(m: int, n: int) -> int:
    """Singular values and V of an (m, n) matrix: 2 m n^2 + 13 n^3."""
    _positive("svd_sv", m, n)
    return 2 * m * n * n + 13 * n**3


@dataclass(frozen=True)
class CostConfig:
    """Dimensions a reconstruction pass runs at.

    nt = v_a * v_e transmit antennas, m user antennas, s streams, and
    n_rb * n_sc subcarriers averaged per precoding unit. ``n_pol`` is
    the polarization group count used by the per-polarization method.
    """

    nt: int
    v_a: int
    v_e: int
    m: int
    s: int
    n_rb: int = 1
    n_sc: int = 12
    n_pol: int = 2

    def __post_init__(self):
        _positive("cost config", self.nt, self.v_a, self.v_e, self.m,
                  self.s, self.n_rb, self.n_sc, self.n_pol)
        if self.v_a * self.v_e != self.nt:
            raise ValueError(f"v_a * v_e = {self.v_a * self.v_e} != nt = {self.nt}")
        if self.n_pol > self.v_a:
            raise ValueError("n_pol cannot exceed the column count")

    @property
    def n_sub(self) -> int:
        return self.n_rb * self.n_sc


@dataclass(frozen=True)
class CostBreakdown:
    """FLOP counts per primitive plus the eigendecomposition call count."""

    method: str
    counts: dict
    svd_calls: int
    config: CostConfig

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_text(self) -> str:
        lines = [f"{label}={self.counts[label]}" for label in PRIMITIVES]
        lines.append(f"svd_calls={self.svd_calls}")
        lines.append(f"total={self.total}")
        return "\n".join(lines)


def _breakdown(method: str, cfg: CostConfig, terms, svd_calls: int) -> CostBreakdown:
    counts = {label: 0 for label in PRIMITIVES}
    for label, value in terms:
        counts[label] += value
    return CostBreakdown(method=method, counts=counts, svd_calls=svd_calls, config=cfg)


def cost_direct(cfg: CostConfig) -> CostBreakdown:
    """Average correlation over the unit, then one full-size
    eigendecomposition (costed as an SVD returning the V factor)."""
    terms = [
        ("gram", cfg.n_sub * flops_gram(cfg.nt, cfg.m)),
        ("scale", flops_scale(cfg.nt, cfg.nt)),
        ("svd_sv", flops_svd_sv(cfg.nt, cfg.nt)),
    ]
    if cfg.n_sub > 1:
        terms.append(("sum", (cfg.n_sub - 1) * flops_sum(cfg.nt, cfg.nt)))
    return _breakdown("direct", cfg, terms, svd_calls=1)


def _cost_two_stage(method: str, cfg: CostConfig, n_groups: int) -> CostBreakdown:
    """Shared composition of the Kronecker-factored pipelines.

    Elevation stage: one gram per column per subcarrier, summed and
    scaled into ``n_groups`` correlation matrices, each decomposed.
    Column compression is counted sparsity-aware: v_a independent
    (m x v_e) by (v_e x 1) products per subcarrier. Azimuth stage
    mirrors the direct pipeline at size v_a. Recomposition costs one
    multiplication per output entry.
    """
    n_sub = cfg.n_sub
    terms = [
        ("gram", n_sub * cfg.v_a * flops_gram(cfg.v_e, cfg.m)),
        ("scale", n_groups * flops_scale(cfg.v_e, cfg.v_e)),
        ("svd_sv", n_groups * flops_svd_sv(cfg.v_e, cfg.v_e)),
        ("matmul", n_sub * cfg.v_a * flops_matmul(cfg.m, cfg.v_e, 1)),
        ("gram", n_sub * flops_gram(cfg.v_a, cfg.m)),
        ("scale", flops_scale(cfg.v_a, cfg.v_a)),
        ("svd_sv", flops_svd_sv(cfg.v_a, cfg.v_a)),
        ("scale", flops_scale(cfg.s, cfg.nt)),
    ]
    if n_sub * cfg.v_a > n_groups:
        terms.append(("sum", (n_sub * cfg.v_a - n_groups) * flops_sum(cfg.v_e, cfg.v_e)))
    if n_sub > 1:
        terms.append(("sum", (n_sub - 1) * flops_sum(cfg.v_a, cfg.v_a)))
    return _breakdown(method, cfg, terms, svd_calls=n_groups + 1)


def cost_method1(cfg: CostConfig) -> CostBreakdown:
    "Shared elevation vector: 2 decompositions."
    return _cost_two_stage("method1", cfg, n_groups=1)


def cost_method2(cfg: CostConfig) -> CostBreakdown:
    "Per-column elevation vectors: v_a + 1 decompositions."
    return _cost_two_stage("method2", cfg, n_groups=cfg.v_a)


def cost_method3(cfg: CostConfig) -> CostBreakdown:
    "Per-polarization elevation vectors: n_pol + 1 decompositions."
    return _cost_two_stage("method3", cfg, n_groups=cfg.n_pol)


COST_MODELS = {
    "direct": cost_direct,
    "method1": cost_method1,
    "method2": cost_method2,
    "method3": cost_method3,
}


def cost_of(method: str, cfg: CostConfig) -> CostBreakdown:
    try:
        fn = COST_MODELS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}") from None
    return fn(cfg)
