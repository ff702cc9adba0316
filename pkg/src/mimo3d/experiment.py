"""Seeded experiment orchestration across methods, normalizations and
precoding-unit granularities, with deterministic CSV emission.

Rows are independent jobs: the channel drop for seed index i derives
from a stable hash of (config seed, i), so re-running any subset of an
experiment reproduces identical numbers. The MR_THREADS environment
variable caps worker threads; results are assembled in configured order
regardless of completion order, so output bytes never depend on the
thread count.
"""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .channel import ChannelTensor, generate_drop
from .config import ExperimentConfig
from .flops import CostConfig, cost_direct, cost_of
from .precode import SingularPrecoderError, link_score
from .reconstruct import DegenerateRankError, pu_views, reconstruct

CSV_HEADER = "method,seed,pu_granularity,normalization,sum_rate_bps_hz,flops_total,flops_ratio"

FLOPS_CSV_HEADER = "n_azimuth,n_elevation,n_pol,nt,method,flops_total,flops_ratio"

STATUS_OK = "ok"


@dataclass(frozen=True)
class ResultRow:
    method: str
    seed: int
    pu_granularity: int
    normalization: str
    sum_rate: float | None
    flops_total: int
    flops_ratio: float
    status: str = STATUS_OK


@dataclass(frozen=True)
class FlopsRow:
    n_azimuth: int
    n_elevation: int
    n_pol: int
    nt: int
    method: str
    flops_total: int
    flops_ratio: float


def derive_drop_seed(master_seed: int, seed_index: int) -> int:
    """Stable 64-bit drop seed for one seed coordinate of an experiment."""
    digest = hashlib.sha256(f"mimo3d:{master_seed}:{seed_index}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def max_workers() -> int:
    try:
        return max(1, int(os.environ.get("MR_THREADS", "1")))
    except ValueError:
        return 1


def _cost_table(config: ExperimentConfig) -> dict:
    """(method, pu_granularity) -> (total, ratio vs direct); seed-free."""
    geom = config.tx_array
    table = {}
    for pu in config.pu_granularities:
        cost_cfg = CostConfig(
            nt=geom.n_elements,
            v_a=geom.n_columns,
            v_e=geom.n_rows,
            m=config.user_antennas,
            s=config.streams_per_user,
            n_rb=pu,
            n_sc=config.n_sc_per_rb,
            n_pol=geom.n_pol,
        )
        direct_total = cost_direct(cost_cfg).total
        for method in config.methods:
            total = cost_of(method, cost_cfg).total
            table[(method, pu)] = (total, total / direct_total)
    return table


def _score_tensor(tensor: ChannelTensor, config: ExperimentConfig):
    """All (method, pu, normalization) scores for one drop.

    Reconstruction failures are captured per combination rather than
    aborting the drop.
    """
    out = {}
    for pu in config.pu_granularities:
        views = [
            pu_views(tensor, k, pu, config.streams_per_user)
            for k in range(config.users)
        ]
        n_pu = tensor.n_rb // pu
        for method in config.methods:
            try:
                effectives = [
                    [reconstruct(views[k][p], method) for k in range(config.users)]
                    for p in range(n_pu)
                ]
            except DegenerateRankError:
                for norm in config.normalizations:
                    out[(method, pu, norm)] = (None, "degenerate-rank")
                continue
            for norm in config.normalizations:
                try:
                    score = link_score(
                        tensor,
                        effectives,
                        norm,
                        rho_f=config.rho_f,
                        noise_power=config.noise_power,
                        power_budget=config.power_budget,
                        rate_cap=config.rate_cap_bits,
                    )
                    out[(method, pu, norm)] = (score.sum_rate, STATUS_OK)
                except SingularPrecoderError:
                    out[(method, pu, norm)] = (None, "singular-precoder")
    return out


def run_experiment(config: ExperimentConfig) -> list[ResultRow]:
    """Run every (seed, method, granularity, normalization) combination.

    Deterministic in the config: identical configs produce identical row
    sequences, independent of MR_THREADS.
    """
    config.validate()
    costs = _cost_table(config)
    seed_indices = list(range(config.n_seeds))

    def seed_job(seed_index: int):
        tensor = generate_drop(config, derive_drop_seed(config.seed, seed_index))
        return _score_tensor(tensor, config)

    workers = max_workers()
    if workers > 1 and len(seed_indices) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = list(pool.map(seed_job, seed_indices))
    else:
        scores = [seed_job(i) for i in seed_indices]

    rows = []
    for seed_index, per_seed in zip(seed_indices, scores):
        for method in config.methods:
            for pu in config.pu_granularities:
                total, ratio = costs[(method, pu)]
                for norm in config.normalizations:
                    sum_rate, status = per_seed[(method, pu, norm)]
                    rows.append(
                        ResultRow(
                            method=method,
                            seed=seed_index,
                            pu_granularity=pu,
                            normalization=norm,
                            sum_rate=sum_rate,
                            flops_total=total,
                            flops_ratio=ratio,
                            status=status,
                        )
                    )
    return rows


def replay_rows(tensor: ChannelTensor, config: ExperimentConfig) -> list[ResultRow]:
    """Rows for a pre-generated drop; the seed column reports the seed
    stored in the tensor."""
    config.validate()
    if tensor.geometry is None:
        raise ValueError("tensor carries no array geometry")
    costs = _cost_table(config)
    per_seed = _score_tensor(tensor, config)
    rows = []
    for method in config.methods:
        for pu in config.pu_granularities:
            total, ratio = costs[(method, pu)]
            for norm in config.normalizations:
                sum_rate, status = per_seed[(method, pu, norm)]
                rows.append(
                    ResultRow(
                        method=method,
                        seed=tensor.seed,
                        pu_granularity=pu,
                        normalization=norm,
                        sum_rate=sum_rate,
                        flops_total=total,
                        flops_ratio=ratio,
                        status=status,
                    )
                )
    return rows


def compare_flops(config: ExperimentConfig, sweep) -> list[FlopsRow]:
    """Cost-model rows for a sweep of array geometries.

    Sweep entries are either ``n`` (an n x n panel) or ``(n_az, n_el)``;
    polarization setup and the per-unit averaging span come from the
    config. The granularity used is the first configured one.
    """
    config.validate()
    n_pol = config.tx_array.n_pol
    pu = config.pu_granularities[0]
    rows = []
    for entry in sweep:
        n_az, n_el = (entry, entry) if isinstance(entry, int) else entry
        cost_cfg = CostConfig(
            nt=n_az * n_el * n_pol,
            v_a=n_az * n_pol,
            v_e=n_el,
            m=config.user_antennas,
            s=config.streams_per_user,
            n_rb=pu,
            n_sc=config.n_sc_per_rb,
            n_pol=n_pol,
        )
        direct_total = cost_direct(cost_cfg).total
        for method in config.methods:
            total = cost_of(method, cost_cfg).total
            rows.append(
                FlopsRow(
                    n_azimuth=n_az,
                    n_elevation=n_el,
                    n_pol=n_pol,
                    nt=cost_cfg.nt,
                    method=method,
                    flops_total=total,
                    flops_ratio=total / direct_total,
                )
            )
    return rows


def _format_rate(row: ResultRow) -> str:
    # Degenerate rows carry their status where the rate would go.
    return repr(row.sum_rate) if row.status == STATUS_OK else row.status


def result_csv(rows) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(
            f"{row.method},{row.seed},{row.pu_granularity},{row.normalization},"
            f"{_format_rate(row)},{row.flops_total},{row.flops_ratio!r}"
        )
    return "\n".join(lines) + "\n"


def flops_csv(rows) -> str:
    lines = [FLOPS_CSV_HEADER]
    for row in rows:
        lines.append(
            f"{row.n_azimuth},{row.n_elevation},{row.n_pol},{row.nt},"
            f"{row.method},{row.flops_total},{row.flops_ratio!r}"
        )
    return "\n".join(lines) + "\n"
