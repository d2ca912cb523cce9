"""Potential families: exact measures, certificates, conventions."""

import warnings
from fractions import Fraction

import numpy as np
import pytest

import trotter_lab as tl
from trotter_lab.potentials import CallablePotential

# Exact survivor measures of the truncated fat-Cantor construction,
# cross-derived by independent rational interval merging.
CANTOR_MEASURE = {
    1: Fraction(3, 4),
    2: Fraction(11, 16),
    3: Fraction(21, 32),
    4: Fraction(165, 256),
    5: Fraction(327, 512),
    6: Fraction(2605, 4096),
}


def test_eval_examples():
    assert tl.Constant(1.0)(0.3) == 1.0
    assert tl.Linear()(0.25) == 0.25
    q1, _ = tl.build_cantor(1)
    assert q1(0.5) == 0.0  # removed interval is centered on 1/2


@pytest.mark.parametrize("bad", [-0.1, 1.5, float("nan")])
def test_domain_error(bad):
    with pytest.raises(ValueError):
        tl.Linear()(bad)


def test_scalar_vs_array_eval():
    q = tl.build_weierstrass(0.5, 4)
    ts = np.linspace(0.0, 1.0, 17)
    arr = q(ts)
    assert arr.shape == ts.shape
    assert isinstance(q(0.5), float)
    assert arr[8] == q(ts[8])


def test_piecewise_value_convention():
    q = tl.PiecewiseConstant([0.0, 0.5, 1.0], [1.0, 2.0])
    assert q(0.25) == 1.0
    assert q(0.5) == 2.0  # jumps take the right piece's value
    assert q(0.0) == 1.0
    assert q(1.0) == 2.0


def test_piecewise_validation():
    with pytest.raises(ValueError):
        tl.PiecewiseConstant([0.0, 0.5], [1.0, 2.0])  # length mismatch
    with pytest.raises(ValueError):
        tl.PiecewiseConstant([0.0, 0.6, 0.5, 1.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        tl.PiecewiseConstant([0.1, 0.5, 1.0], [1.0, 2.0])  # must start at 0
    with pytest.raises(ValueError):
        tl.PiecewiseConstant([0.0, 0.5, 1.0], [1.0, -2.0])  # q >= 0


@pytest.mark.parametrize("depth", sorted(CANTOR_MEASURE))
def test_cantor_measure_exact(depth):
    _, cons = tl.build_cantor(depth)
    assert isinstance(cons.complement_measure, Fraction)
    assert cons.complement_measure == CANTOR_MEASURE[depth]


@pytest.mark.parametrize("depth", range(1, 9))
def test_cantor_complement_at_least_half(depth):
    _, cons = tl.build_cantor(depth)
    assert cons.complement_measure >= Fraction(1, 2)


def test_cantor_level_measure_and_disjointness():
    _, cons = tl.build_cantor(5)
    for n in range(1, 6):
        assert cons.level_measure(n) == Fraction(1, 2 ** (n + 1))
        level = cons.intervals[n - 1]
        for (a1, b1), (a2, b2) in zip(level, level[1:]):
            assert b1 <= a2  # mutually disjoint within a level


def test_cantor_fine_grid_measure_cross_check():
    # Midpoint estimate on 2^20 cells; breakpoints are dyadic with
    # denominator <= 2^8, so every cell lies inside one piece.
    q, cons = tl.build_cantor(3)
    m = 1 << 20
    est = float(np.mean(q((np.arange(m) + 0.5) / m)))
    assert abs(est - float(cons.complement_measure)) < 1e-4


def test_cantor_indicator_values():
    q, cons = tl.build_cantor(1)
    assert q(0.0) == 0.0  # inside the half-interval hugging 0
    assert q(1.0) == 0.0
    assert q(0.25) == 1.0
    assert q.sup_norm == 1.0
    assert q.depth == 1
    # merged open set midpoints evaluate to 0, complement gaps to 1
    for lo, hi in cons.merged_open_set:
        assert q(float((lo + hi) / 2)) == 0.0


def test_cantor_sampling_property():
    # for (t, s) inside the proof corner box, all 2^m left-sample points
    # land in removed level-m intervals
    depth = 4
    q, _ = tl.build_cantor(depth)
    rng = np.random.default_rng(42)
    for m in range(1, depth + 1):
        eps = 1.0 / (3.0 * 2.0 ** (2 * m + 2))
        n = 2 ** m
        for _ in range(20):
            s = rng.uniform(1e-12, eps)
            t = rng.uniform(1.0 - eps, 1.0)
            xi = s + np.arange(n) * (t - s) / n
            assert np.all(q(xi) == 0.0)


def test_cantor_resource_error():
    with pytest.raises(tl.ResourceLimitError):
        tl.build_cantor(26, max_pieces=10_000)
    with pytest.raises(ValueError):
        tl.build_cantor(0)


def test_weierstrass_range():
    grid = np.linspace(0.0, 1.0, 100_001)
    for beta in (0.3, 0.5, 0.9):
        q = tl.build_weierstrass(beta, 6)
        vals = q(grid)
        assert vals.min() >= 0.0
        assert vals.max() <= 1.0
    assert tl.build_weierstrass(0.5, 1)(0.0) == 1.0  # all cosines peak at 0


def test_weierstrass_holder_quotient():
    q = tl.build_weierstrass(0.5, 12)
    cert = q.holder_meta
    assert cert is not None and cert.beta == 0.5
    rng = np.random.default_rng(7)
    x = rng.uniform(0.0, 1.0, 10_000)
    y = rng.uniform(0.0, 1.0, 10_000)
    keep = x != y
    quot = np.abs(q(x[keep]) - q(y[keep])) / np.abs(x[keep] - y[keep]) ** 0.5
    assert quot.max() <= cert.constant * (1.0 + 1e-12)


@pytest.mark.parametrize("beta", [0.0, 1.0, 1.5, -0.2])
def test_weierstrass_beta_validation(beta):
    with pytest.raises(ValueError):
        tl.build_weierstrass(beta, 3)


def test_weierstrass_levels_validation():
    with pytest.raises(ValueError):
        tl.build_weierstrass(0.5, 0)


def test_tent_geometry():
    q = tl.build_tent_train([1.0])
    assert q(0.0) == 0.0
    assert q(0.5) == 0.0
    assert q(1.0) == 0.0
    assert q(0.25) == 1.0
    # 1/2-periodic
    xs = np.linspace(0.0, 0.5, 101)
    assert np.allclose(q(xs), q(xs + 0.5), atol=1e-12)


def test_tent_level_area():
    # each level-m tent integrates to a_m/2 regardless of its period:
    # compare totals of trains truncated at consecutive levels
    amps = [1.0, 0.5, 2.0, 0.25, 0.125]
    totals = [0.0]
    for m in range(1, len(amps) + 1):
        totals.append(tl.build_tent_train(amps[:m]).antiderivative(1.0))
    for m, a in enumerate(amps, start=1):
        assert abs((totals[m] - totals[m - 1]) - a / 2.0) < 1e-12


def test_tent_empty_amplitudes():
    q = tl.build_tent_train([])
    assert isinstance(q, tl.Constant)
    assert q.sup_norm == 0.0
    assert q(0.3) == 0.0


def test_tent_validation():
    with pytest.raises(ValueError):
        tl.build_tent_train([1.0, 0.5], levels=3)
    with pytest.raises(ValueError):
        tl.build_tent_train([1.0, -0.5])


def test_antiderivative_examples():
    assert tl.Constant(1.0).antiderivative(1.0) == 1.0
    assert tl.Linear().antiderivative(1.0) == 0.5
    q3, cons = tl.build_cantor(3)
    assert abs(q3.antiderivative(1.0) - float(cons.complement_measure)) < 1e-15
    assert cons.complement_measure == Fraction(21, 32)


def test_antiderivative_monotone():
    q = tl.build_tent_train([1.0 / j for j in range(1, 6)])
    ts = np.linspace(0.0, 1.0, 257)
    anti = q.antiderivative(ts)
    assert np.all(np.diff(anti) >= -1e-15)


@pytest.mark.parametrize("maker", [
    lambda: tl.Linear(),
    lambda: tl.Constant(2.0),
    lambda: tl.build_weierstrass(0.5, 8),
    lambda: tl.build_tent_train([1.0 / j for j in range(1, 6)]),
])
def test_antiderivative_finite_difference(maker):
    # central difference of the antiderivative reproduces q at continuity
    # points; keep sample points clear of the tent kink lattice k/64
    q = maker()
    rng = np.random.default_rng(11)
    ts = rng.uniform(0.01, 0.99, 64)
    ts = ts[np.abs(ts * 64 - np.round(ts * 64)) > 1e-3]
    h = 1e-8
    fd = (q.antiderivative(ts + h) - q.antiderivative(ts - h)) / (2 * h)
    assert np.max(np.abs(fd - q(ts))) < 1e-6


def test_callable_adaptive_quadrature():
    q = CallablePotential(lambda t: t * t, sup_norm=1.0)
    assert not q.exact_integrable
    assert abs(q.antiderivative(1.0) - 1.0 / 3.0) < 1e-10


def test_callable_tolerance_not_met():
    q = CallablePotential(lambda t: np.exp(t), sup_norm=3.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # scipy roundoff-warning path
        with pytest.raises(tl.ToleranceNotMetError) as exc:
            q.antiderivative(1.0, tol=1e-16)
    assert exc.value.achieved > exc.value.requested


def test_from_spec_roundtrip(zoo):
    grid = np.linspace(0.0, 1.0, 101)
    for name, q in zoo:
        spec = {"kind": q.kind, "params": q.params()}
        q2 = tl.from_spec(spec)
        assert q2.kind == q.kind, name
        assert np.allclose(q2(grid), q(grid), atol=1e-15), name


def test_from_spec_unknown_kind():
    with pytest.raises(ValueError):
        tl.from_spec({"kind": "mystery", "params": {}})


def test_nonnegative_and_sup_norm(zoo):
    rng = np.random.default_rng(3)
    ts = rng.uniform(0.0, 1.0, 100_000)
    for name, q in zoo:
        vals = q(ts)
        assert vals.min() >= 0.0, name
        assert vals.max() <= q.sup_norm + 1e-12, name


def test_holder_certificates(zoo):
    rng = np.random.default_rng(5)
    x = rng.uniform(0.0, 1.0, 20_000)
    y = rng.uniform(0.0, 1.0, 20_000)
    for name, q in zoo:
        cert = q.holder_meta
        if cert is None:
            continue
        lhs = np.abs(q(x) - q(y))
        rhs = cert.constant * np.abs(x - y) ** cert.beta
        assert np.all(lhs <= rhs + 1e-12), name


def test_linear_validation():
    with pytest.raises(ValueError):
        tl.Linear(slope=-2.0, intercept=1.0)  # negative at t=1
    q = tl.Linear(slope=-0.5, intercept=1.0)  # decreasing but nonnegative
    assert q(1.0) == 0.5
    assert q.holder_meta.constant == 0.5


def test_describe_is_printable(zoo):
    for _, q in zoo:
        text = q.describe()
        assert q.kind in text
