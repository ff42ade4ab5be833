"""Command-line front end.

Subcommands: ``generate`` (spiked instance to dense-csv), ``primal``,
``bound``, ``submatrix``, ``oracle`` (each emits one JSON report), and
``report`` (aggregates JSON reports into a CSV table).

Exit codes: 0 success, 2 usage or parameter error, 3 enumeration-guard
refusal, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass

from . import __version__
from .dualbound import branch_and_bound, build_cip_model, spectral_prep
from .errors import GuardError, InputError, NumericalError
from .instances import (
    SpikedSpec,
    _atomic_write,
    generate_spiked_instance,
    load_matrix,
    save_dense_csv,
)
from .kernels import BACKEND
from .oracle import brute_force_opt
from .primal import multistart
from .submatrix_bound import DEFAULT_RATIOS, submatrix_upper_bound

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_GUARD = 3
EXIT_NUMERICAL = 4

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one solve run; defaults mirror the experiment protocol."""

    input: str
    fmt: str
    k: int
    r: int
    seed: int = 0
    n_breakpoints: int = 40
    restarts: int = 400
    max_iters: int | None = None
    time_limit_s: float = 60.0
    ratios: tuple[float, ...] = DEFAULT_RATIOS
    out: str | None = None


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _report_payload(command: str, cfg: RunConfig, lb: float | None,
                    ub: float | None, wallclock: float, stats: dict) -> dict:
    payload = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "instance": cfg.input,
        "k": cfg.k,
        "r": cfg.r,
        "seed": cfg.seed,
        "wallclock_s": wallclock,
        "solver_stats": stats,
    }
    if lb is not None:
        payload["lb"] = lb
    if ub is not None:
        payload["ub"] = ub
    if lb is not None and ub is not None and lb > 0:
        payload["gap"] = (ub - lb) / lb
    return payload


def _load(cfg: RunConfig):
    fmt = "matrix-market-sym" if cfg.fmt == "mm" else cfg.fmt
    mat = load_matrix(cfg.input, fmt=fmt)
    if not 1 <= cfg.r <= cfg.k <= mat.dim:
        raise InputError(
            f"need 1 <= r <= k <= d, got r={cfg.r}, k={cfg.k}, d={mat.dim}")
    return mat


def cmd_generate(args) -> int:
    spec = SpikedSpec(d=args.d, ka=args.ka, m_samples=args.m_samples,
                      seed=args.seed)
    mat = generate_spiked_instance(spec)
    save_dense_csv(args.out, mat)
    print(f"wrote {args.out}: d={mat.dim} trace={mat.trace():.6f} seed={args.seed}")
    return EXIT_OK


def cmd_primal(cfg: RunConfig) -> int:
    mat = _load(cfg)
    t0 = time.monotonic()
    sol = multistart(mat, cfg.k, cfg.r, restarts=cfg.restarts, seed=cfg.seed,
                     max_iters=cfg.max_iters)
    stats = {
        "restarts": cfg.restarts,
        "iterations": sol.iterations,
        "support": sorted(sol.support),
        "kernel": BACKEND,
    }
    _emit(_report_payload("primal", cfg, sol.objective, None,
                          time.monotonic() - t0, stats), cfg.out)
    return EXIT_OK


def _primal_lb(cfg: RunConfig, mat):
    if cfg.restarts <= 0:
        return None, None
    sol = multistart(mat, cfg.k, cfg.r, restarts=cfg.restarts, seed=cfg.seed,
                     max_iters=cfg.max_iters)
    return sol.objective, sol


def cmd_bound(cfg: RunConfig) -> int:
    mat = _load(cfg)
    t0 = time.monotonic()
    lb, sol = _primal_lb(cfg, mat)
    prep = spectral_prep(mat, cfg.k, n_breakpoints=cfg.n_breakpoints)
    model = build_cip_model(prep, mat, cfg.k, cfg.r)
    report = branch_and_bound(model, time_limit=cfg.time_limit_s,
                              warm_start_factor=None if sol is None else sol.factor)
    stats = {
        "status": report.status,
        "nodes_explored": report.nodes_explored,
        "lp_solves": report.lp_solves,
        "cuts_added": report.cuts_added,
        "root_bound": report.root_bound,
        "additive_term": report.additive_term,
        "n_breakpoints": cfg.n_breakpoints,
        "restarts": cfg.restarts,
    }
    _emit(_report_payload("bound", cfg, lb, report.upper_bound,
                          time.monotonic() - t0, stats), cfg.out)
    return EXIT_OK


def cmd_submatrix(cfg: RunConfig) -> int:
    mat = _load(cfg)
    t0 = time.monotonic()
    lb, _ = _primal_lb(cfg, mat)
    best_ub = None
    per_ratio = []
    for m in cfg.ratios:
        if math.ceil(m * cfg.k) > mat.dim:
            print(f"skipping ratio {m}: ceil(m*k) > d", file=sys.stderr)
            continue
        ub, plan = submatrix_upper_bound(
            mat, cfg.k, cfg.r, m, per_cip_time_limit=cfg.time_limit_s,
            n_breakpoints=cfg.n_breakpoints)
        per_ratio.append({
            "ratio": m,
            "bound": ub,
            "block_size": len(plan.s_rows),
            "best_ktilde": plan.best_ktilde,
        })
        if best_ub is None or ub < best_ub:
            best_ub = ub
    if best_ub is None:
        raise InputError(
            "no feasible ratio: every ceil(m*k) exceeds d; "
            "solve the whole matrix with the bound command")
    stats = {
        "ratios": per_ratio,
        "per_cip_time_limit_s": cfg.time_limit_s,
        "n_breakpoints": cfg.n_breakpoints,
        "restarts": cfg.restarts,
    }
    _emit(_report_payload("submatrix", cfg, lb, best_ub,
                          time.monotonic() - t0, stats), cfg.out)
    return EXIT_OK


def cmd_oracle(cfg: RunConfig) -> int:
    mat = _load(cfg)
    t0 = time.monotonic()
    opt, support = brute_force_opt(mat, cfg.k, cfg.r)
    stats = {"support": sorted(int(j) for j in support),
             "candidates": math.comb(mat.dim, cfg.k)}
    # the optimum is both bounds at once
    _emit(_report_payload("oracle", cfg, opt, opt,
                          time.monotonic() - t0, stats), cfg.out)
    return EXIT_OK


def cmd_report(args) -> int:
    rows: dict[tuple, dict] = {}
    methods: list[str] = []
    parsed = 0
    for path in args.reports:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
            if data.get("schema") != SCHEMA_VERSION:
                raise ValueError(f"unsupported schema {data.get('schema')!r}")
            method = data["command"]
            key = (data["instance"], data["r"], data["k"])
        except (OSError, ValueError, KeyError) as exc:
            print(f"skipping {path}: {exc}", file=sys.stderr)
            continue
        parsed += 1
        if method not in methods:
            methods.append(method)
        row = rows.setdefault(key, {})
        for fieldname in ("lb", "ub", "gap"):
            if fieldname in data:
                row[f"{method}_{fieldname}"] = data[fieldname]
    if parsed == 0:
        print("no readable reports", file=sys.stderr)
        return EXIT_USAGE
    header = ["instance", "r", "k"]
    for method in methods:
        header += [f"{method}_lb", f"{method}_ub", f"{method}_gap"]
    lines = [",".join(header)]
    for key in sorted(rows):
        instance, r, k = key
        cells = [str(instance), str(r), str(k)]
        for col in header[3:]:
            val = rows[key].get(col)
            cells.append("" if val is None else repr(val))
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if args.out:
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _add_solve_flags(sub, time_default: float) -> None:
    sub.add_argument("--input", required=True, help="instance file path")
    sub.add_argument("--format", default="dense-csv",
                     choices=("dense-csv", "mm"), help="input format")
    sub.add_argument("--k", type=int, required=True, help="row-support budget")
    sub.add_argument("--r", type=int, required=True, help="number of components")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--n-breakpoints", type=int, default=40,
                     help="PLA half-count N")
    sub.add_argument("--restarts", type=int, default=400,
                     help="multistart restarts (0 disables the primal stage)")
    sub.add_argument("--max-iters", type=int, default=None,
                     help="greedy iteration cap (default: d)")
    sub.add_argument("--time-limit-s", type=float, default=time_default)
    sub.add_argument("--ratios", default=None,
                     help="comma-separated sub-matrix ratios")
    sub.add_argument("--out", default=None, help="write JSON here (default stdout)")


def _config(args) -> RunConfig:
    if args.ratios is None:
        ratios = DEFAULT_RATIOS
    else:
        try:
            ratios = tuple(float(tok) for tok in args.ratios.split(",") if tok)
        except ValueError as exc:
            raise InputError(f"bad --ratios value: {exc}") from None
        if not ratios:
            raise InputError("--ratios must list at least one value")
    return RunConfig(input=args.input, fmt=args.format, k=args.k, r=args.r,
                     seed=args.seed, n_breakpoints=args.n_breakpoints,
                     restarts=args.restarts, max_iters=args.max_iters,
                     time_limit_s=args.time_limit_s, ratios=ratios,
                     out=args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rspca",
        description="Row-sparse PCA: primal search and certified dual bounds.")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("generate", help="write a spiked covariance instance")
    gen.add_argument("--d", type=int, default=500, help="dimension")
    gen.add_argument("--ka", type=int, default=10, help="planted block size")
    gen.add_argument("--m-samples", type=int, default=3000,
                     help="number of Gaussian samples")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="dense-csv output path")

    for name, help_text, time_default in (
            ("primal", "multistart greedy lower bound", 60.0),
            ("bound", "certified upper bound (branch-and-bound)", 60.0),
            ("submatrix", "certified upper bound via diagonal blocks", 20.0),
            ("oracle", "exact optimum by support enumeration", 60.0)):
        _add_solve_flags(subs.add_parser(name, help=help_text), time_default)

    rep = subs.add_parser("report", help="aggregate JSON reports into CSV")
    rep.add_argument("reports", nargs="+", help="JSON report files")
    rep.add_argument("--out", default=None, help="CSV output path")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "report":
            return cmd_report(args)
        cfg = _config(args)
        handler = {"primal": cmd_primal, "bound": cmd_bound,
                   "submatrix": cmd_submatrix, "oracle": cmd_oracle}[args.command]
        return handler(cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GuardError as exc:
        print(f"refusing to enumerate: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
