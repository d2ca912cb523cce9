"""Families of bounded non-negative potentials q on [0, 1].

Each potential knows how to evaluate itself at scalar or array arguments,
carries a certified upper bound on its sup norm, and exposes an exact
antiderivative whenever one exists in closed form.  Discontinuous families
keep exact rational breakpoints so that downstream quadrature is exact.

Value convention at jumps: a piecewise potential takes the value of the
piece on [a, b) at its left endpoint, and the value of the last piece at
t = 1.  This pins an everywhere-defined representative; it differs from
the underlying a.e. class only on the finite breakpoint set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import ResourceLimitError, ToleranceNotMetError

# Absolute slop tolerated on domain checks; protects against roundoff in
# sample-point generation (s + k*(t-s)/n can land 1 ulp outside [0, 1]).
_DOMAIN_SLOP = 1e-12


def _as_domain_array(t) -> tuple[np.ndarray, bool]:
    """Validate t against [0, 1] and return (array, was_scalar)."""
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    if scalar:
        arr = arr.reshape(1)
    if np.any(np.isnan(arr)):
        raise ValueError("potential argument is NaN")
    lo = arr.min(initial=0.0)
    hi = arr.max(initial=1.0)
    if lo < -_DOMAIN_SLOP or hi > 1.0 + _DOMAIN_SLOP:
        raise ValueError(
            f"potential argument outside [0, 1]: range [{lo}, {hi}]"
        )
    if lo < 0.0 or hi > 1.0:
        arr = np.clip(arr, 0.0, 1.0)
    return arr, scalar


@dataclass(frozen=True)
class HolderCertificate:
    """Certifies |q(x) - q(y)| <= constant * |x - y|**beta on [0, 1]."""

    beta: float
    constant: float

    def __post_init__(self):
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("Holder exponent must lie in (0, 1]")
        if self.constant < 0.0:
            raise ValueError("Holder constant must be >= 0")


class Potential:
    """A bounded measurable q: [0, 1] -> [0, inf).

    Attributes:
        kind: family tag, e.g. "Linear" or "CantorIndicator".
        sup_norm: a valid upper bound for ess sup |q|.
        exact_integrable: True when the antiderivative has a closed form.
        holder_meta: optional HolderCertificate.
    """

    kind: str = "Abstract"

    def __init__(self, sup_norm: float, exact_integrable: bool,
                 holder_meta: HolderCertificate | None = None):
        if sup_norm < 0.0:
            raise ValueError("sup_norm must be >= 0")
        self.sup_norm = float(sup_norm)
        self.exact_integrable = bool(exact_integrable)
        self.holder_meta = holder_meta

    def __call__(self, t):
        """Evaluate q(t) for scalar or array t in [0, 1]."""
        arr, scalar = _as_domain_array(t)
        out = self._eval(arr)
        return float(out[0]) if scalar else out

    def antiderivative(self, t, tol: float = 1e-12):
        """Return the running integral of q from 0 to t.

        Uses the closed form when available, otherwise adaptive quadrature
        to absolute tolerance ``tol``.
        """
        arr, scalar = _as_domain_array(t)
        if self.exact_integrable:
            out = self._antiderivative_exact(arr)
        else:
            out = self._antiderivative_quad(arr, tol)
        return float(out[0]) if scalar else out

    def _eval(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _antiderivative_exact(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _antiderivative_quad(self, t: np.ndarray, tol: float) -> np.ndarray:
        out = np.empty_like(t)
        flat_t = t.reshape(-1)
        flat_out = out.reshape(-1)
        for i, ti in enumerate(flat_t):
            val, err = quad(lambda y: self(float(y)), 0.0, float(ti),
                            epsabs=tol, epsrel=0.0, limit=500)[:2]
            if err > tol:
                raise ToleranceNotMetError(
                    f"quadrature reached abs error {err:.3e} > {tol:.3e}",
                    requested=tol, achieved=float(err))
            flat_out[i] = val
        return out

    def params(self) -> dict:
        """Family-specific parameters, JSON-serializable."""
        return {}

    def describe(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in self.params().items())
        return f"{self.kind}({inner})"

    def __repr__(self):
        return self.describe()


class Constant(Potential):
    """q(t) = c."""

    kind = "Constant"

    def __init__(self, c: float = 1.0):
        if c < 0.0:
            raise ValueError("constant potential must be >= 0")
        self.c = float(c)
        super().__init__(sup_norm=c, exact_integrable=True,
                         holder_meta=HolderCertificate(1.0, 0.0))

    def _eval(self, t):
        return np.full_like(t, self.c)

    def _antiderivative_exact(self, t):
        return self.c * t

    def params(self):
        return {"c": self.c}


class Linear(Potential):
    """q(t) = intercept + slope * t, constrained non-negative on [0, 1]."""

    kind = "Linear"

    def __init__(self, slope: float = 1.0, intercept: float = 0.0):
        lo = min(intercept, intercept + slope)
        if lo < 0.0:
            raise ValueError("linear potential is negative on [0, 1]")
        self.slope = float(slope)
        self.intercept = float(intercept)
        hi = max(intercept, intercept + slope)
        super().__init__(sup_norm=hi, exact_integrable=True,
                         holder_meta=HolderCertificate(1.0, abs(slope)))

    def _eval(self, t):
        return self.intercept + self.slope * t

    def _antiderivative_exact(self, t):
        return self.intercept * t + 0.5 * self.slope * t * t

    def params(self):
        return {"slope": self.slope, "intercept": self.intercept}


class PiecewiseConstant(Potential):
    """Right-open step function with exact rational breakpoints.

    Pieces are [b_i, b_{i+1}) with value values[i]; q(1) takes the last
    value.  Breakpoints must start at 0, end at 1, strictly increase.
    """

    kind = "PiecewiseConstant"

    def __init__(self, breakpoints: Sequence, values: Sequence[float]):
        bps = tuple(Fraction(b) for b in breakpoints)
        vals = tuple(float(v) for v in values)
        if len(bps) < 2 or len(vals) != len(bps) - 1:
            raise ValueError("need k+1 breakpoints for k pieces")
        if bps[0] != 0 or bps[-1] != 1:
            raise ValueError("breakpoints must span [0, 1]")
        if any(b1 >= b2 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must strictly increase")
        if any(v < 0.0 for v in vals):
            raise ValueError("piece values must be >= 0")
        self.breakpoints = bps
        self.values = vals
        self._bp = np.array([float(b) for b in bps])
        self._vals = np.array(vals)
        widths = np.diff(self._bp)
        self._cum = np.concatenate(([0.0], np.cumsum(self._vals * widths)))
        super().__init__(sup_norm=max(vals), exact_integrable=True)

    @property
    def internal_breakpoint_count(self) -> int:
        """Number of jump locations strictly inside (0, 1)."""
        return len(self.breakpoints) - 2

    def _piece_index(self, t):
        idx = np.searchsorted(self._bp, t, side="right") - 1
        return np.clip(idx, 0, len(self._vals) - 1)

    def _eval(self, t):
        return self._vals[self._piece_index(t)]

    def _antiderivative_exact(self, t):
        idx = self._piece_index(t)
        return self._cum[idx] + self._vals[idx] * (t - self._bp[idx])

    def params(self):
        return {"breakpoints": [str(b) for b in self.breakpoints],
                "values": list(self.values)}


class HolderWeierstrass(Potential):
    """Lacunary cosine sum, Holder continuous of exponent beta.

    q(t) = (M + sum_j 2^{-j beta} cos(2^j pi t)) / (2M) with
    M = sum_j 2^{-j beta}, so 0 <= q <= 1 for every beta and level count.
    """

    kind = "HolderWeierstrass"

    def __init__(self, beta: float, levels: int):
        if not 0.0 < beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if levels < 1:
            raise ValueError("levels must be >= 1")
        self.beta = float(beta)
        self.levels = int(levels)
        j = np.arange(1, levels + 1)
        self._amps = 2.0 ** (-beta * j)
        self._freqs = np.pi * 2.0 ** j
        self._m = float(self._amps.sum())
        # termwise: |cos a - cos b| <= min(2, |a-b|) <= 2^{1-beta}|a-b|^beta
        lip = (2.0 ** (1.0 - beta)) * (np.pi ** beta) * levels / (2.0 * self._m)
        super().__init__(sup_norm=1.0, exact_integrable=True,
                         holder_meta=HolderCertificate(beta, lip))

    def _eval(self, t):
        acc = np.full_like(t, self._m)
        for a, w in zip(self._amps, self._freqs):
            acc += a * np.cos(w * t)
        return acc / (2.0 * self._m)

    def _antiderivative_exact(self, t):
        acc = self._m * t
        for a, w in zip(self._amps, self._freqs):
            acc += a * np.sin(w * t) / w
        return acc / (2.0 * self._m)

    def params(self):
        return {"beta": self.beta, "levels": self.levels}


class TentTrain(Potential):
    """Superposition of periodic tents vanishing on dyadic grids.

    Level j contributes a_j * tri(frac(2^j t)) with tri(u) = 1 - |2u - 1|:
    a tent of height a_j and period 2^{-j} that is zero at every k/2^j.
    Left Darboux sums on the dyadic grid of step 2^{-m} therefore miss
    every level j >= m entirely, which is the point of the family.
    """

    kind = "TentTrain"

    def __init__(self, amplitudes: Sequence[float]):
        amps = tuple(float(a) for a in amplitudes)
        if any(a <= 0.0 for a in amps):
            raise ValueError("tent amplitudes must be > 0")
        self.amplitudes = amps
        self.levels = len(amps)
        lip = sum(a * 2.0 ** (j + 1) for j, a in enumerate(amps, start=1))
        super().__init__(sup_norm=sum(amps), exact_integrable=True,
                         holder_meta=HolderCertificate(1.0, lip))

    def _eval(self, t):
        acc = np.zeros_like(t)
        for j, a in enumerate(self.amplitudes, start=1):
            z = np.ldexp(t, j)          # 2^j * t, exact scaling
            u = z - np.floor(z)
            acc += a * (1.0 - np.abs(2.0 * u - 1.0))
        return acc

    def _antiderivative_exact(self, t):
        acc = np.zeros_like(t)
        for j, a in enumerate(self.amplitudes, start=1):
            z = np.ldexp(t, j)
            k = np.floor(z)
            u = z - k
            tent_int = np.where(u <= 0.5, u * u, 2.0 * u - u * u - 0.5)
            acc += a * np.ldexp(0.5 * k + tent_int, -j)
        return acc

    def params(self):
        return {"amplitudes": list(self.amplitudes)}


class CallablePotential(Potential):
    """Adapter for an arbitrary non-negative callable; integrates adaptively."""

    kind = "Callable"

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], sup_norm: float,
                 holder_meta: HolderCertificate | None = None):
        self._fn = fn
        super().__init__(sup_norm=sup_norm, exact_integrable=False,
                         holder_meta=holder_meta)

    def _eval(self, t):
        # tolerate callables that collapse 1-element arrays to scalars
        out = np.asarray(self._fn(t), dtype=float)
        return np.broadcast_to(out, t.shape).copy() if out.shape != t.shape else out

    def params(self):
        return {"sup_norm": self.sup_norm}


@dataclass(frozen=True)
class CantorConstruction:
    """Exact record of a truncated fat-Cantor construction.

    ``intervals[n-1]`` lists the open intervals removed at level n: one of
    half width around each interior dyadic point k/2^n and half-sized
    pieces hugging 0 and 1.  ``merged_open_set`` is the disjoint normal
    form of their union over levels 1..depth, and ``complement_measure``
    the exact Lebesgue measure of what survives.
    """

    depth: int
    centers: tuple[tuple[Fraction, ...], ...]
    intervals: tuple[tuple[tuple[Fraction, Fraction], ...], ...]
    merged_open_set: tuple[tuple[Fraction, Fraction], ...]
    complement_measure: Fraction

    def level_measure(self, n: int) -> Fraction:
        """Total length of the level-n intervals before merging."""
        return sum((hi - lo for lo, hi in self.intervals[n - 1]),
                   start=Fraction(0))


class CantorIndicator(PiecewiseConstant):
    """Indicator of the surviving set of a truncated fat-Cantor construction."""

    kind = "CantorIndicator"

    def __init__(self, depth: int, construction: CantorConstruction,
                 breakpoints: Sequence, values: Sequence[float]):
        super().__init__(breakpoints, values)
        self.depth = int(depth)
        self.construction = construction
        # indicator range is {0, 1}; the generic bound max(values) == 1
        self.sup_norm = 1.0

    def params(self):
        return {"depth": self.depth}


def _cantor_level_intervals(n: int) -> list[tuple[Fraction, Fraction]]:
    hw = Fraction(1, 2 ** (2 * n + 2))
    out = [(Fraction(0), hw)]
    for k in range(1, 2 ** n):
        c = Fraction(k, 2 ** n)
        out.append((c - hw, c + hw))
    out.append((Fraction(1) - hw, Fraction(1)))
    return out


def _merge_open_intervals(ivs):
    """Disjoint normal form of a union of open intervals (exact)."""
    merged: list[list[Fraction]] = []
    for lo, hi in sorted(ivs):
        # touching open intervals stay separate: their shared endpoint
        # is not removed, so (a,b) u (b,c) is not an interval
        if merged and lo < merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


def build_cantor(depth: int, max_pieces: int = 1 << 20
                 ) -> tuple[CantorIndicator, CantorConstruction]:
    """Build the indicator of a positive-measure nowhere-dense set.

    Around every dyadic point k/2^n (n = 1..depth) an open interval of
    half-width 2^{-(2n+2)} is removed, clipped to half-size at 0 and 1.
    Level n removes total length 2^{-(n+1)}, so the survivor keeps
    measure >= 1/2 at every depth.  All arithmetic is exact rational.

    Args:
        depth: number of removal levels, >= 1.
        max_pieces: cap on the raw interval count before merging.

    Returns:
        (potential, construction) where the potential is an exact
        piecewise-constant 0/1 function.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    raw_count = sum(2 ** n + 1 for n in range(1, depth + 1))
    if raw_count > max_pieces:
        raise ResourceLimitError(
            f"depth {depth} needs {raw_count} intervals > cap {max_pieces}")

    centers = tuple(
        tuple(Fraction(k, 2 ** n) for k in range(2 ** n + 1))
        for n in range(1, depth + 1))
    levels = tuple(tuple(_cantor_level_intervals(n))
                   for n in range(1, depth + 1))
    merged = _merge_open_intervals(iv for lvl in levels for iv in lvl)
    open_measure = sum((hi - lo for lo, hi in merged), start=Fraction(0))
    construction = CantorConstruction(
        depth=depth, centers=centers, intervals=levels,
        merged_open_set=merged, complement_measure=1 - open_measure)

    bps: list[Fraction] = [Fraction(0)]
    vals: list[float] = []
    pos = Fraction(0)
    for lo, hi in merged:
        if lo > pos:
            vals.append(1.0)
            bps.append(lo)
        vals.append(0.0)
        bps.append(hi)
        pos = hi
    if pos < 1:
        vals.append(1.0)
        bps.append(Fraction(1))

    q = CantorIndicator(depth, construction, bps, vals)
    return q, construction


def build_weierstrass(beta: float, levels: int) -> HolderWeierstrass:
    """Holder-continuous potential of exponent beta with unit sup norm.

    Args:
        beta: Holder exponent in (0, 1).
        levels: number of cosine layers, >= 1.
    """
    return HolderWeierstrass(beta, levels)


def build_tent_train(amplitudes: Sequence[float],
                     levels: int | None = None) -> TentTrain | Constant:
    """Continuous piecewise-linear demonstrator of slow convergence.

    Args:
        amplitudes: tent heights a_1..a_L, all > 0.  An empty list yields
            the zero potential.
        levels: optional redundant count; must equal len(amplitudes).
    """
    amps = list(amplitudes)
    if levels is not None and levels != len(amps):
        raise ValueError("levels does not match len(amplitudes)")
    if not amps:
        return Constant(0.0)
    return TentTrain(amps)


_SPEC_KINDS = {
    "constant": lambda p: Constant(float(p.get("c", 1.0))),
    "linear": lambda p: Linear(float(p.get("slope", 1.0)),
                               float(p.get("intercept", 0.0))),
    "piecewiseconstant": lambda p: PiecewiseConstant(
        [Fraction(str(b)) for b in p["breakpoints"]], p["values"]),
    "holderweierstrass": lambda p: build_weierstrass(
        float(p["beta"]), int(p["levels"])),
    "weierstrass": lambda p: build_weierstrass(
        float(p["beta"]), int(p["levels"])),
    "tenttrain": lambda p: build_tent_train(
        [float(a) for a in p["amplitudes"]]),
    "cantorindicator": lambda p: build_cantor(int(p["depth"]))[0],
    "cantor": lambda p: build_cantor(int(p["depth"]))[0],
}


def from_spec(spec: dict) -> Potential:
    """Resolve a {"kind": ..., "params": {...}} description to a Potential."""
    try:
        kind = str(spec["kind"])
    except (KeyError, TypeError):
        raise ValueError("potential spec needs a 'kind' key") from None
    key = kind.replace("_", "").replace("-", "").lower()
    if key not in _SPEC_KINDS:
        raise ValueError(f"unknown potential kind {kind!r}")
    params = spec.get("params", {})
    if not isinstance(params, dict):
        raise ValueError("'params' must be a mapping")
    return _SPEC_KINDS[key](params)
