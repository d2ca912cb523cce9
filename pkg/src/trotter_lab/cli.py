"""Batch experiment driver with CSV/JSON reports.

Every command emits rows with the fixed columns
{command, potential, n, value, lower, upper, argmax_t, argmax_s, verdict};
JSON output mirrors them under {"meta": ..., "rows": [...]}.  Summary rows
(slope fits, floors) use n = 0 and are written after the per-n rows, which
are sorted by n.  Reports are deterministic for a fixed seed except for
the generated_at timestamp (CSV: first comment line; JSON: meta field).

Exit codes: 0 success, 2 argument/spec errors, 3 search budget exhausted
(a partial report is still written, flagged in the meta).

The environment variable TROTTER_LAB_THREADS caps worker threads for the
sweeps (default 1).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import BudgetExceededError, TrotterLabError
from .matrix_lie import lie_error, random_matrix_pair, spectral_norm, telescoping_residual
from .potentials import Potential, build_cantor, build_tent_train, build_weierstrass, from_spec
from .quadrature import DeltaPair
from .rates import fit_loglog, holder_bound_check
from .semigroup import (GridFunction, operator_norm_oracle,
                        _per_tau_norm_argmax, per_tau_operator_norm,
                        strong_convergence_curve)
from .sup_search import SearchConfig, sup_riemann_error, trotter_error_sandwich

COLUMNS = ("command", "potential", "n", "value", "lower", "upper",
           "argmax_t", "argmax_s", "verdict")


# ---------------------------------------------------------------- parsing

def parse_n_list(text: str) -> list[int]:
    """Parse an n list: 'a..b' = powers of two from a to b, else commas."""
    text = text.strip()
    if ".." in text:
        a_str, b_str = text.split("..", 1)
        a, b = int(a_str), int(b_str)
        if a < 1 or b < a:
            raise ValueError(f"bad range {text!r}")
        if (a & (a - 1)) or (b & (b - 1)):
            raise ValueError("range endpoints must both be powers of two")
        out = []
        n = a
        while n <= b:
            out.append(n)
            n *= 2
        return out
    out = [int(tok) for tok in text.split(",") if tok.strip()]
    if not out:
        raise ValueError("empty n list")
    return out


def parse_int_range(text: str) -> list[int]:
    """Parse an inclusive integer range 'a..b' or a comma list."""
    text = text.strip()
    if ".." in text:
        a_str, b_str = text.split("..", 1)
        return list(range(int(a_str), int(b_str) + 1))
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _parse_kv(rest: str) -> dict[str, str]:
    out = {}
    for tok in rest.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if "=" not in tok:
            raise ValueError(f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_potential(text: str, args=None) -> Potential:
    """Resolve a potential from shorthand or a @file.json spec.

    Shorthands: 'constant[:c=1]', 'linear[:slope=1,intercept=0]',
    'weier:beta=0.5,levels=12', 'cantor:depth=3', 'tent:harmonic=12',
    'tent:amplitudes=1+0.5+0.25', 'pw:breakpoints=0+1/2+1,values=1+0'.
    Missing weier/cantor/tent parameters fall back to --beta, --levels,
    --depth when those flags are present.
    """
    text = text.strip()
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            return from_spec(json.load(fh))
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    kv = _parse_kv(rest)

    def fallback(key, flag, default=None):
        if key in kv:
            return kv[key]
        if args is not None and getattr(args, flag, None) is not None:
            return getattr(args, flag)
        if default is not None:
            return default
        raise ValueError(f"potential {name!r} needs {key}= or --{flag}")

    if name == "constant":
        return from_spec({"kind": "constant", "params": {"c": float(kv.get("c", 1.0))}})
    if name == "linear":
        return from_spec({"kind": "linear", "params": {
            "slope": float(kv.get("slope", 1.0)),
            "intercept": float(kv.get("intercept", 0.0))}})
    if name in ("weier", "weierstrass"):
        return build_weierstrass(float(fallback("beta", "beta")),
                                 int(fallback("levels", "levels")))
    if name in ("cantor", "cantorindicator"):
        return build_cantor(int(fallback("depth", "depth")))[0]
    if name in ("tent", "tenttrain"):
        if "amplitudes" in kv:
            amps = [float(a) for a in kv["amplitudes"].split("+")]
        else:
            levels = int(fallback("harmonic", "levels"))
            amps = [1.0 / j for j in range(1, levels + 1)]
        return build_tent_train(amps)
    if name in ("pw", "piecewise"):
        bps = [Fraction(b) for b in kv["breakpoints"].split("+")]
        vals = [float(v) for v in kv["values"].split("+")]
        return from_spec({"kind": "piecewise_constant",
                          "params": {"breakpoints": [str(b) for b in bps],
                                     "values": vals}})
    raise ValueError(f"unknown potential shorthand {name!r}")


# ---------------------------------------------------------------- output

def _row(command: str, potential: str, n: int, value=None, lower=None,
         upper=None, argmax_t=None, argmax_s=None, verdict: str = "") -> dict:
    return {"command": command, "potential": potential, "n": n,
            "value": value, "lower": lower, "upper": upper,
            "argmax_t": argmax_t, "argmax_s": argmax_s, "verdict": verdict}


def _sort_rows(rows: list[dict]) -> list[dict]:
    data = sorted((r for r in rows if r["n"]), key=lambda r: (r["n"], r["command"]))
    summary = [r for r in rows if not r["n"]]
    return data + summary


def write_report(path: str | None, fmt: str, meta: dict, rows: list[dict]) -> None:
    rows = _sort_rows(rows)
    stamp = datetime.now(timezone.utc).isoformat()
    if fmt == "json":
        payload = {"meta": {"generated_at": stamp, **meta}, "rows": rows}
        text = json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"
    else:
        buf = io.StringIO()
        buf.write(f"# generated_at={stamp}\n")
        for key in sorted(meta):
            buf.write(f"# {key}={meta[key]}\n")
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: ("" if r[k] is None else r[k]) for k in COLUMNS})
        text = buf.getvalue()
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("TROTTER_LAB_THREADS", "1")))
    except ValueError:
        return 1


def _parallel_map(fn, items):
    workers = _thread_count()
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _search_config(args, hints=()) -> SearchConfig:
    return SearchConfig(coarse_grid=args.grid, refine_levels=args.refine,
                        hint_points=tuple(hints), max_evals=args.max_evals)


# ---------------------------------------------------------------- commands

def cmd_rates(args) -> int:
    q = parse_potential(args.potential, args)
    ns = parse_n_list(args.n)
    cfg = _search_config(args)
    label = q.describe()
    rows: list[dict] = []
    meta = {"command": "rates", "potential": label, "n_list": ns,
            "seed": args.seed, "tool_version": __version__}

    reports = []
    exhausted = False
    if args.max_evals is None:
        reports = _parallel_map(lambda n: sup_riemann_error(q, n, cfg), ns)
    else:
        # budget accounting is per search; stop the sweep at first exhaustion
        for n in ns:
            try:
                reports.append(sup_riemann_error(q, n, cfg))
            except BudgetExceededError as exc:
                reports.append(exc.partial)
                exhausted = True
                break

    check = holder_bound_check(q, reports) if q.holder_meta else None
    for i, rep in enumerate(reports):
        verdict = ""
        if check is not None:
            verdict = "HOLDER_OK" if check.margins[i][1] >= 0.0 else "HOLDER_VIOLATION"
        upper = rep.upper_op_norm if rep.upper_op_norm is not None else rep.r_n
        rows.append(_row("rates", label, rep.n, rep.r_n, rep.lower_op_norm,
                         upper, rep.argmax.t, rep.argmax.s, verdict))

    points = [(rep.n, rep.r_n) for rep in reports]
    if len(points) >= 4:
        fit = fit_loglog(points)
        rows.append(_row("rates/fit", label, 0, fit.slope,
                         fit.slope - fit.slope_ci, fit.slope + fit.slope_ci,
                         verdict=fit.verdict_label))
        meta["verdict"] = fit.verdict_label
    if exhausted:
        meta["budget_exhausted"] = True
    write_report(args.output, args.format, meta, rows)
    return 3 if exhausted else 0


def cmd_cantor(args) -> int:
    depth = args.depth if args.depth is not None else 6
    q, cons = build_cantor(depth)
    ms = parse_int_range(args.m) if args.m else list(range(1, depth + 1))
    cfg = _search_config(args)
    label = q.describe()
    meta = {"command": "cantor", "potential": label, "depth": depth,
            "seed": args.seed, "tool_version": __version__,
            "complement_measure": str(cons.complement_measure),
            "integral": float(q.antiderivative(1.0)),
            "open_intervals": len(cons.merged_open_set)}
    if args.format == "json":
        meta["merged_open_set"] = [[str(lo), str(hi)]
                                   for lo, hi in cons.merged_open_set]
    rows: list[dict] = []
    floors = []
    exhausted = False
    for m in ms:
        n = 2 ** m
        eps = 1.0 / (3.0 * 2.0 ** (2 * m + 2))
        floor = float(cons.complement_measure) - 2.0 * eps
        try:
            rep = sup_riemann_error(q, n, cfg)
        except BudgetExceededError as exc:
            rep = exc.partial
            exhausted = True
        verdict = "FLOOR_OK" if rep.r_n >= floor else "FLOOR_MISS"
        upper = rep.upper_op_norm if rep.upper_op_norm is not None else rep.r_n
        rows.append(_row("cantor", label, n, rep.r_n, rep.lower_op_norm,
                         upper, rep.argmax.t, rep.argmax.s, verdict))
        floors.append((n, rep.r_n, floor))
        if exhausted:
            break

    if len(floors) >= 4:
        fit = fit_loglog([(n, r) for n, r, _ in floors],
                         subsequence=[n for n, _, _ in floors])
        rows.append(_row("cantor/fit", label, 0, min(r for _, r, _ in floors),
                         verdict=fit.verdict_label))
        meta["verdict"] = fit.verdict_label
    if exhausted:
        meta["budget_exhausted"] = True
    write_report(args.output, args.format, meta, rows)
    return 3 if exhausted else 0


def cmd_oracle(args) -> int:
    q = parse_potential(args.potential, args)
    ns = parse_n_list(args.n)
    m = int(args.m) if args.m else 65536
    cfg = _search_config(args)
    label = q.describe()
    meta = {"command": "oracle", "potential": label, "n_list": ns,
            "m": m, "p": args.p, "tau_grid": args.tau_grid,
            "trials": args.trials, "seed": args.seed,
            "tool_version": __version__}
    taus = [j / args.tau_grid for j in range(1, args.tau_grid + 1)]
    rows: list[dict] = []

    def tau_sweep(n: int) -> tuple[float, float]:
        vals = [(per_tau_operator_norm(q, tau, n), tau) for tau in taus]
        return max(vals)

    for n, (symbol_max, tau_star) in zip(ns, _parallel_map(tau_sweep, ns)):
        _, t_star = _per_tau_norm_argmax(q, tau_star, n)
        lower, upper = trotter_error_sandwich(q, n, cfg)
        contained = lower - 1e-3 <= symbol_max <= upper + 1e-3
        rows.append(_row("oracle/symbol", label, n, symbol_max, lower, upper,
                         tau_star, t_star,
                         "CONTAINED" if contained else "OUTSIDE"))
        probe = operator_norm_oracle(q, tau_star, n, args.p, args.trials,
                                     args.seed, m=m)
        slack = 2.0 * q.sup_norm / m
        reached = probe >= 0.95 * symbol_max - 1e-12
        rows.append(_row("oracle/probe", label, n, probe, 0.95 * symbol_max,
                         symbol_max + slack, tau_star, None,
                         "REACHED" if reached else "SHORT"))
    write_report(args.output, args.format, meta, rows)
    return 0


def cmd_lie(args) -> int:
    ns = parse_n_list(args.n)
    label = f"matrix-pair(dim={args.dim},norm={args.norm_bound},seed={args.seed})"
    meta = {"command": "lie", "dim": args.dim, "norm_bound": args.norm_bound,
            "pairs": args.trials, "n_list": ns, "seed": args.seed,
            "tool_version": __version__}
    rows: list[dict] = []

    worst = 0.0
    worst_scale = 0.0
    for k in range(args.trials):
        A, B = random_matrix_pair(args.dim, args.norm_bound, args.seed + k)
        res = telescoping_residual(A, B, tau=1.0, n=8)
        scale = math.exp(spectral_norm(A) + spectral_norm(B))
        worst = max(worst, res / scale)
        worst_scale = max(worst_scale, res)
    rows.append(_row("lie/telescoping", label, 0, worst_scale, None, worst,
                     verdict="PASS" if worst <= 1e-12 else "FAIL"))

    A, B = random_matrix_pair(args.dim, args.norm_bound, args.seed)
    errs = lie_error(A, B, tau=1.0, ns=ns)
    for n, err in errs:
        rows.append(_row("lie/error", label, n, err))
    if len(errs) >= 4:
        fit = fit_loglog(errs)
        rows.append(_row("lie/fit", label, 0, fit.slope,
                         fit.slope - fit.slope_ci, fit.slope + fit.slope_ci,
                         verdict=fit.verdict_label))
        meta["verdict"] = fit.verdict_label
    write_report(args.output, args.format, meta, rows)
    return 0


def cmd_strong(args) -> int:
    q = parse_potential(args.potential, args)
    ns = parse_n_list(args.n)
    m = int(args.m) if args.m else 16384
    tau = args.tau
    cfg = _search_config(args)
    label = q.describe()
    meta = {"command": "strong", "potential": label, "tau": tau, "m": m,
            "p": args.p, "n_list": ns, "seed": args.seed,
            "tool_version": __version__}
    f = GridFunction.from_callable(lambda t: np.sin(np.pi * t) ** 2, m, args.p)
    rows: list[dict] = []
    curve = strong_convergence_curve(q, f, tau, ns)
    for n, resid in curve:
        rows.append(_row("strong/residual", label, n, resid))
    for n in ns:
        if n & (n - 1) == 0:
            lo, up = trotter_error_sandwich(q, n, cfg)
            rows.append(_row("strong/norm-floor", label, n, lo, lo, up))
    resids = [r for _, r in curve]
    decreasing = all(b <= a + 1e-3 for a, b in zip(resids, resids[1:]))
    rows.append(_row("strong/summary", label, 0, resids[-1],
                     verdict="DECREASING" if decreasing else "NOT_DECREASING"))
    meta["residual_decreasing"] = decreasing
    write_report(args.output, args.format, meta, rows)
    return 0


# ---------------------------------------------------------------- driver

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="trotter-lab",
        description="Numerical experiments on splitting-error convergence "
                    "for shift-plus-multiplication semigroups on [0, 1].")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, potential_required=True):
        if potential_required:
            p.add_argument("--potential", required=True,
                           help="shorthand like linear, cantor:depth=3, "
                                "weier:beta=0.5,levels=12, or @spec.json")
        p.add_argument("--depth", type=int, default=None,
                       help="Cantor construction depth")
        p.add_argument("--beta", type=float, default=None,
                       help="Holder exponent for weier shorthands")
        p.add_argument("--levels", type=int, default=None,
                       help="level count for weier/tent shorthands")
        p.add_argument("--p", type=float, default=2.0, help="L^p exponent")
        p.add_argument("--seed", type=int, default=1234)
        p.add_argument("--grid", type=int, default=256,
                       help="coarse search grid per axis")
        p.add_argument("--refine", type=int, default=4,
                       help="search refinement levels")
        p.add_argument("--max-evals", type=int, default=None,
                       help="probe budget for the sup search")
        p.add_argument("--trials", type=int, default=8)
        p.add_argument("--output", default=None, help="file path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("rates", help="worst-case error sweep with rate fit")
    common(p)
    p.add_argument("--n", default="8..4096", help="n list, e.g. 8..4096 or 3,5,9")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("cantor", help="counterexample floors along n = 2^m")
    common(p, potential_required=False)
    p.add_argument("--m", default=None, help="level list, e.g. 1..6")
    p.set_defaults(func=cmd_cantor)

    p = sub.add_parser("oracle", help="symbol norm vs sandwich vs test functions")
    common(p)
    p.add_argument("--n", default="4,16,64")
    p.add_argument("--m", default=None, help="oracle grid resolution (default 65536)")
    p.add_argument("--tau-grid", type=int, default=256, dest="tau_grid")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("lie", help="matrix telescoping identity and O(1/n) rate")
    common(p, potential_required=False)
    p.add_argument("--n", default="16..4096")
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--norm-bound", type=float, default=2.0, dest="norm_bound")
    p.set_defaults(func=cmd_lie)

    p = sub.add_parser("strong", help="strong residuals vs operator-norm floor")
    common(p)
    p.add_argument("--n", default="2..256")
    p.add_argument("--m", default=None, help="grid resolution (default 16384)")
    p.add_argument("--tau", type=float, default=0.5)
    p.set_defaults(func=cmd_strong)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (TrotterLabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
