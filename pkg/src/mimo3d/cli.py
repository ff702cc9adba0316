"""Command line entry points.

Verbs:
  run     experiment config -> result CSV (optionally figures)
  flops   cost-model sweep over array sizes -> CSV (optionally a figure)
  gen     generate one drop and save it as a binary tensor file
  replay  score a saved tensor file -> result CSV

``--out`` writes to a file (stdout if omitted). ``--strict`` exits
nonzero when any row failed to produce a rate. MR_THREADS caps worker
threads.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import dropfile, report
from .config import load_config, with_seeds
from .experiment import (
    STATUS_OK,
    compare_flops,
    derive_drop_seed,
    flops_csv,
    replay_rows,
    result_csv,
    run_experiment,
)
from .channel import generate_drop


def _write_out(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _figures_dir(args) -> str | None:
    if args.figures is None:
        return None
    if args.figures != "":
        return args.figures
    return os.path.dirname(os.path.abspath(args.out)) if args.out else "."


def _strict_status(rows, strict: bool) -> int:
    bad = sum(1 for r in rows if r.status != STATUS_OK)
    if bad:
        print(f"{bad} row(s) carry a failure status", file=sys.stderr)
    return 1 if strict and bad else 0


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seeds is not None:
        cfg = with_seeds(cfg, args.seeds)
    rows = run_experiment(cfg)
    _write_out(result_csv(rows), args.out)
    fig_dir = _figures_dir(args)
    if fig_dir is not None:
        for path in report.save_rate_figures(rows, fig_dir):
            print(f"wrote {path}", file=sys.stderr)
    return _strict_status(rows, args.strict)


def _parse_sweep(text: str):
    entries = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if "x" in token:
            az, el = token.split("x", 1)
            entries.append((int(az), int(el)))
        else:
            entries.append(int(token))
    if not entries:
        raise ValueError("empty antenna sweep")
    return entries


def _breakdown_text(cfg) -> str:
    from .flops import CostConfig, cost_of

    geom = cfg.tx_array
    cost_cfg = CostConfig(
        nt=geom.n_elements, v_a=geom.n_columns, v_e=geom.n_rows,
        m=cfg.user_antennas, s=cfg.streams_per_user,
        n_rb=cfg.pu_granularities[0], n_sc=cfg.n_sc_per_rb, n_pol=geom.n_pol,
    )
    blocks = []
    for method in cfg.methods:
        blocks.append(f"[{method}]\n{cost_of(method, cost_cfg).to_text()}")
    return "\n\n".join(blocks) + "\n"


def _cmd_flops(args) -> int:
    cfg = load_config(args.config)
    if args.breakdown:
        _write_out(_breakdown_text(cfg), args.out)
        return 0
    rows = compare_flops(cfg, _parse_sweep(args.sweep))
    _write_out(flops_csv(rows), args.out)
    fig_dir = _figures_dir(args)
    if fig_dir is not None:
        for path in report.save_flops_figure(rows, fig_dir):
            print(f"wrote {path}", file=sys.stderr)
    return 0


def _cmd_gen(args) -> int:
    cfg = load_config(args.config)
    seed = args.seed if args.seed is not None else derive_drop_seed(cfg.seed, 0)
    tensor = generate_drop(cfg, seed)
    dropfile.save_drop(tensor, args.out)
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


def _cmd_replay(args) -> int:
    cfg = load_config(args.config)
    tensor = dropfile.load_drop(args.tensor, geometry=cfg.tx_array,
                                wavelength_m=cfg.wavelength_m)
    if tensor.n_rb != cfg.n_rb_total or tensor.n_sc != cfg.n_sc_per_rb:
        raise ValueError(
            f"tensor holds {tensor.n_rb} RB x {tensor.n_sc} SC but the config "
            f"expects {cfg.n_rb_total} x {cfg.n_sc_per_rb}"
        )
    if tensor.n_users != cfg.users or tensor.user_antennas != cfg.user_antennas:
        raise ValueError(
            f"tensor user layout ({tensor.n_users} users x {tensor.user_antennas} "
            f"antennas) does not match the config"
        )
    rows = replay_rows(tensor, cfg)
    _write_out(result_csv(rows), args.out)
    return _strict_status(rows, args.strict)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimo3d",
        description="Channel reconstruction and zero-forcing link experiments "
        "on planar arrays",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a seeded experiment, emit result CSV")
    run.add_argument("--config", default=None, help="config file (defaults apply if omitted)")
    run.add_argument("--out", default=None, help="output CSV path (stdout if omitted)")
    run.add_argument("--seeds", type=int, default=None, help="override the seed count")
    run.add_argument("--strict", action="store_true",
                     help="exit nonzero if any row failed")
    run.add_argument("--figures", nargs="?", const="", default=None, metavar="DIR",
                     help="also render figures (next to --out if DIR omitted)")
    run.set_defaults(fn=_cmd_run)

    fl = sub.add_parser("flops", help="cost-model sweep over array sizes")
    fl.add_argument("--config", default=None)
    fl.add_argument("--out", default=None)
    fl.add_argument("--sweep", default="2,4,8,12,16",
                    help="comma list of panel sizes: n (square) or AZxEL")
    fl.add_argument("--breakdown", action="store_true",
                    help="emit per-primitive label=value lines for the config "
                    "geometry instead of the sweep CSV")
    fl.add_argument("--figures", nargs="?", const="", default=None, metavar="DIR")
    fl.set_defaults(fn=_cmd_flops)

    gen = sub.add_parser("gen", help="generate a drop and save the tensor file")
    gen.add_argument("--config", default=None)
    gen.add_argument("--seed", type=int, default=None,
                     help="drop seed (derived from the config seed if omitted)")
    gen.add_argument("--out", required=True, help="tensor file path")
    gen.set_defaults(fn=_cmd_gen)

    rep = sub.add_parser("replay", help="score a saved tensor file")
    rep.add_argument("--tensor", required=True, help="tensor file from gen")
    rep.add_argument("--config", default=None)
    rep.add_argument("--out", default=None)
    rep.add_argument("--strict", action="store_true")
    rep.set_defaults(fn=_cmd_replay)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
