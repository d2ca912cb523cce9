"""Worst-case Riemann-error search over the triangle 0 < s <= t <= 1.

The quantity of interest is the essential supremum over the triangle of
the pointwise left-sum error; its value sandwiches the operator-norm
splitting error between e^{-sup_norm} and 1 times itself.  The landscape
is non-smooth (step potentials) or highly oscillatory (tent trains), so
the search is a coarse lattice plus local refinement around the best
cells, seeded with the analytically known near-maximizers of each family.
Every reported value is an exact pointwise evaluation, hence a true lower
bound; certified upper bounds are derived per family where structure
allows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceededError
from .potentials import CantorIndicator, Linear, PiecewiseConstant, Potential
from .quadrature import DeltaPair, riemann_errors


@dataclass(frozen=True)
class SearchConfig:
    """Grid-search parameters.

    ``max_evals`` caps the number of probed (t, s) pairs; when exhausted
    the search raises BudgetExceededError carrying the partial report.
    """

    coarse_grid: int = 256
    refine_levels: int = 4
    refine_factor: int = 8
    top_cells: int = 16
    s_min: float = 1e-9
    hint_points: tuple[DeltaPair, ...] = ()
    max_evals: int | None = None

    def __post_init__(self):
        if self.coarse_grid < 2:
            raise ValueError("coarse_grid must be >= 2")
        if self.refine_factor < 2:
            raise ValueError("refine_factor must be >= 2")
        if not 0.0 < self.s_min < 1.0:
            raise ValueError("s_min must lie in (0, 1)")


@dataclass(frozen=True)
class SearchTrace:
    """Summary of how a search arrived at its value."""

    level_best: tuple[float, ...]
    evals: int
    certified: bool
    hints_probed: int
    budget_hit: bool = False

    def __str__(self):
        lv = ">".join(f"{v:.6g}" for v in self.level_best)
        tag = "certified" if self.certified else "heuristic"
        flag = ";budget_hit" if self.budget_hit else ""
        return f"evals={self.evals};{tag};levels={lv}{flag}"


@dataclass(frozen=True)
class RiemannReport:
    """Best found sup estimate with its operator-norm sandwich."""

    n: int
    r_n: float
    argmax: DeltaPair
    lower_op_norm: float
    upper_op_norm: float | None
    method: SearchTrace


class _BestTracker:
    """Running max with the deterministic tie-break: smallest s, then largest t."""

    def __init__(self):
        self.value = -1.0
        self.t = 1.0
        self.s = 1.0

    def offer(self, vals: np.ndarray, ts: np.ndarray, ss: np.ndarray):
        if len(vals) == 0:
            return
        vmax = float(vals.max())
        if vmax < self.value:
            return
        cand = np.flatnonzero(vals == vmax)
        order = np.lexsort((-ts[cand], ss[cand]))
        i = cand[order[0]]
        t, s = float(ts[i]), float(ss[i])
        if (vmax > self.value
                or s < self.s
                or (s == self.s and t > self.t)):
            self.value, self.t, self.s = vmax, t, s


def default_hints(q: Potential, n: int, s_min: float) -> list[DeltaPair]:
    """Analytic near-maximizers probed unconditionally.

    Always includes the long-window corner (1, s_min) plus a few
    alignment-breaking offsets of order 1/n.  For Cantor indicators adds
    the corner points (1 - eps_m/2, eps_m/2) with eps_m = 1/(3*4^{m+1}),
    at which the dyadic left sums of step 2^{-m} vanish identically.
    """
    pts = [DeltaPair(1.0, s_min)]
    for num in (1.0, 2.0):
        s = num / (3.0 * n)
        if s_min < s < 1.0:
            pts.append(DeltaPair(1.0, s))
        t = 1.0 - num / (3.0 * n)
        if s_min < t:
            pts.append(DeltaPair(t, s_min))
    if isinstance(q, CantorIndicator):
        for m in range(1, q.depth + 1):
            eps = 1.0 / (3.0 * 2.0 ** (2 * m + 2))
            pts.append(DeltaPair(1.0 - 0.5 * eps, 0.5 * eps))
    return pts


def certified_upper_bound(q: Potential, n: int) -> float | None:
    """Family-specific upper bound on the sup of the Riemann error.

    Holder certificate (beta, L): every pointwise error is at most
    L * (t-s)^{1+beta} / n^beta <= L / n^beta.
    Piecewise-constant with K interior jumps: only subintervals containing
    a jump contribute, each at most (t-s)/n * sup_norm, so the error is
    at most sup_norm * min(1, K/n).
    Linear: the left-sum error is exactly slope * (t-s)^2 / (2n), whose
    sup over the triangle is slope / (2n).
    """
    bounds = []
    if q.holder_meta is not None:
        cert = q.holder_meta
        bounds.append(cert.constant / float(n) ** cert.beta)
    if isinstance(q, PiecewiseConstant):
        k = q.internal_breakpoint_count
        bounds.append(q.sup_norm * min(1.0, k / n))
    if isinstance(q, Linear):
        bounds.append(abs(q.slope) / (2.0 * n))
    return min(bounds) if bounds else None


def sup_riemann_error(q: Potential, n: int,
                      cfg: SearchConfig | None = None) -> RiemannReport:
    """Multi-resolution search for the worst-case left-sum error.

    Probes hint points first, then a coarse lattice on the triangle, then
    ``refine_levels`` rounds of local grids around the ``top_cells`` best
    points so far.  Deterministic for a fixed config.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cfg = cfg if cfg is not None else SearchConfig()
    tracker = _BestTracker()
    evals = 0
    level_best: list[float] = []
    hints = default_hints(q, n, cfg.s_min) + list(cfg.hint_points)

    def make_report(budget_hit: bool) -> RiemannReport:
        upper = certified_upper_bound(q, n)
        r = max(tracker.value, 0.0)
        return RiemannReport(
            n=n, r_n=r, argmax=DeltaPair(tracker.t, tracker.s),
            lower_op_norm=math.exp(-q.sup_norm) * r,
            upper_op_norm=upper,
            method=SearchTrace(tuple(level_best), evals, upper is not None,
                               len(hints), budget_hit))

    def probe(ts, ss):
        nonlocal evals
        ts = np.asarray(ts, dtype=float)
        ss = np.asarray(ss, dtype=float)
        if cfg.max_evals is not None and evals + len(ts) > cfg.max_evals:
            raise BudgetExceededError(
                f"search budget {cfg.max_evals} exhausted at {evals} probes",
                partial=make_report(True))
        vals = riemann_errors(q, ts, ss, n)
        evals += len(ts)
        tracker.offer(vals, ts, ss)
        return vals, ts, ss

    probe([p.t for p in hints], [p.s for p in hints])

    axis = np.linspace(cfg.s_min, 1.0, cfg.coarse_grid)
    tg, sg = np.meshgrid(axis, axis, indexing="ij")
    keep = sg <= tg
    vals, ts, ss = probe(tg[keep], sg[keep])
    level_best.append(tracker.value)

    spacing = (1.0 - cfg.s_min) / (cfg.coarse_grid - 1)
    for _ in range(cfg.refine_levels):
        order = np.lexsort((-ts, ss, -vals))
        seeds = order[:cfg.top_cells]
        pts_t, pts_s = [], []
        side = cfg.refine_factor + 1
        for i in seeds:
            tlin = np.clip(np.linspace(ts[i] - spacing, ts[i] + spacing, side),
                           cfg.s_min, 1.0)
            slin = np.clip(np.linspace(ss[i] - spacing, ss[i] + spacing, side),
                           cfg.s_min, 1.0)
            tt, sv = np.meshgrid(tlin, slin, indexing="ij")
            m = sv <= tt
            pts_t.append(tt[m])
            pts_s.append(sv[m])
        vals, ts, ss = probe(np.concatenate(pts_t), np.concatenate(pts_s))
        level_best.append(tracker.value)
        spacing = 2.0 * spacing / cfg.refine_factor

    return make_report(False)


def trotter_error_sandwich(q: Potential, n: int,
                           cfg: SearchConfig | None = None
                           ) -> tuple[float, float]:
    """Two-sided bracket for the sup-over-tau operator-norm splitting error.

    Lower end: e^{-sup_norm} times the search value (a true lower bound).
    Upper end: the certified family bound when one exists, else the search
    value itself, which is then only a heuristic estimate of the sup.
    """
    rep = sup_riemann_error(q, n, cfg)
    upper = rep.upper_op_norm if rep.upper_op_norm is not None else rep.r_n
    return rep.lower_op_norm, upper
