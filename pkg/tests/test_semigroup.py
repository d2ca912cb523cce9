"""Discretized semigroup actions, symbol norms, and the oracle."""

import math
import warnings

import numpy as np
import pytest

import trotter_lab as tl


def _smooth(m, p=2.0):
    return tl.GridFunction.from_callable(lambda t: np.sin(np.pi * t) ** 2, m, p)


def _random_gf(rng, m, p=2.0):
    vals = rng.normal(size=m) + 1j * rng.normal(size=m)
    return tl.GridFunction(vals, p)


def test_gridfunction_norms():
    f = tl.GridFunction(np.array([3.0, -4.0, 0.0, 0.0]), p=1.0)
    assert f.norm() == pytest.approx(7.0 / 4.0)
    g = tl.GridFunction(np.array([3.0, -4.0, 0.0, 0.0]), p=2.0)
    assert g.norm() == pytest.approx(5.0 / 2.0)
    with pytest.raises(ValueError):
        tl.GridFunction(np.array([1.0]), p=0.5)
    with pytest.raises(ValueError):
        tl.GridFunction(np.array([]).reshape(0), p=2.0)


def test_gridfunction_nodes_and_sub():
    f = _smooth(8)
    assert np.allclose(f.nodes(), (np.arange(8) + 0.5) / 8)
    with pytest.raises(ValueError):
        _ = f - _smooth(16)


def test_shift_identity_and_nilpotent():
    rng = np.random.default_rng(0)
    f = _random_gf(rng, 64)
    out0 = tl.apply_shift(0.0, f)
    assert np.array_equal(out0.samples, f.samples)
    for tau in (1.0, 1.5, 7.0):
        out = tl.apply_shift(tau, f)
        assert np.all(out.samples == 0.0)
    with pytest.raises(ValueError):
        tl.apply_shift(-0.1, f)


def test_shift_indicator_example():
    m = 64
    nodes = (np.arange(m) + 0.5) / m
    f = tl.GridFunction((nodes < 0.5).astype(float))
    out = tl.apply_shift(0.5, f)
    want = (nodes >= 0.5).astype(float)
    assert np.array_equal(out.samples.real, want)


def test_shift_rounding_warning():
    f = _smooth(64)
    with pytest.warns(tl.GridResolutionWarning):
        tl.apply_shift(1.0 / 3.0, f)


def test_mult_examples():
    rng = np.random.default_rng(1)
    f = _random_gf(rng, 128)
    out0 = tl.apply_mult_semigroup(tl.Linear(), 0.0, f)
    assert np.array_equal(out0.samples, f.samples)

    out = tl.apply_mult_semigroup(tl.Constant(1.0), 1.0, f)
    assert np.allclose(out.samples, math.exp(-1.0) * f.samples, rtol=0, atol=1e-15)

    qc, cons = tl.build_cantor(2)
    nodes = f.nodes()
    out = tl.apply_mult_semigroup(qc, 1.0, f)
    inside = qc(nodes) == 0.0
    assert np.array_equal(out.samples[inside], f.samples[inside])
    assert np.allclose(out.samples[~inside], math.exp(-1.0) * f.samples[~inside],
                       rtol=0, atol=1e-15)


def test_exact_matches_shift_for_zero_potential():
    rng = np.random.default_rng(2)
    f = _random_gf(rng, 256)
    a = tl.apply_exact(tl.Constant(0.0), 0.25, f)
    b = tl.apply_shift(0.25, f)
    assert np.array_equal(a.samples, b.samples)


def test_exact_constant_two_paths():
    rng = np.random.default_rng(3)
    f = _random_gf(rng, 256)
    tau = 0.25
    a = tl.apply_exact(tl.Constant(2.0), tau, f)
    b = tl.apply_mult_semigroup(tl.Constant(2.0), tau, tl.apply_shift(tau, f))
    assert np.max(np.abs(a.samples - b.samples)) < 1e-12


def test_exact_semigroup_law():
    q = tl.build_weierstrass(0.5, 6)
    f = _smooth(4096)
    one = tl.apply_exact(q, 0.375, f)
    two = tl.apply_exact(q, 0.25, tl.apply_exact(q, 0.125, f))
    assert np.max(np.abs(one.samples - two.samples)) < 1e-12


def test_exact_nilpotent():
    f = _smooth(128)
    for tau in (1.0, 2.5):
        assert np.all(tl.apply_exact(tl.Linear(), tau, f).samples == 0.0)
        assert np.all(tl.apply_trotter(tl.Linear(), tau, 4, f).samples == 0.0)


def test_trotter_constant_equals_exact():
    rng = np.random.default_rng(4)
    f = _random_gf(rng, 512)
    for n in (1, 2, 8):
        a = tl.apply_trotter(tl.Constant(1.5), 0.5, n, f)
        b = tl.apply_exact(tl.Constant(1.5), 0.5, f)
        assert np.max(np.abs(a.samples - b.samples)) < 1e-12


def test_trotter_n1_closed_form():
    m, tau = 2048, 0.5
    q = tl.Linear()
    f = _smooth(m)
    out = tl.apply_trotter(q, tau, 1, f)
    ts = f.nodes()
    r = round(tau * m)
    want = np.zeros(m, dtype=complex)
    # single step: damp at the source point t - tau, then shift
    want[r:] = np.exp(-tau * q(ts[:m - r])) * f.samples[:m - r]
    assert np.max(np.abs(out.samples - want)) < 1e-15


def test_trotter_subgrid_warning():
    f = _smooth(64)
    with pytest.warns(tl.GridResolutionWarning):
        tl.apply_trotter(tl.Linear(), 0.5, 128, f)


def test_contractivity(zoo):
    rng = np.random.default_rng(5)
    m = 512
    for p in (1.0, 2.0, 4.0):
        f = _random_gf(rng, m, p)
        base = f.norm()
        for name, q in zoo:
            for tau in (0.125, 0.375):  # grid-aligned, no warnings
                for out in (tl.apply_shift(tau, f),
                            tl.apply_mult_semigroup(q, tau, f),
                            tl.apply_exact(q, tau, f),
                            tl.apply_trotter(q, tau, 4, f)):
                    assert out.norm() <= base + 1e-12, (name, p, tau)


def test_closed_form_agreement():
    # apply_trotter against the product-symbol formula. Step potentials
    # are tested at grid-aligned tau only: misaligned per-step rounding
    # can push a sample across a jump, which the stated envelope does not
    # cover; continuous q tolerates arbitrary tau.
    cases = [
        (tl.Linear(), 0.25, 5),               # misaligned (1024*0.25/5)
        (tl.build_weierstrass(0.5, 6), 0.25, 7),
        (tl.build_cantor(2)[0], 0.25, 4),      # aligned
        (tl.build_cantor(2)[0], 0.5, 16),      # aligned
    ]
    m = 1024
    f = _smooth(m)
    ts = f.nodes()
    for q, tau, n in cases:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = tl.apply_trotter(q, tau, n, f)
        r_step = round(tau * m / n)
        r_total = n * r_step
        ok = np.arange(m) >= r_total
        shifted = np.zeros(m, dtype=complex)
        shifted[r_total:] = f.samples[:m - r_total]
        sums = tl.left_darboux_sums(q, ts[ok], np.clip(ts[ok] - tau, 0.0, 1.0), n)
        want = np.zeros(m, dtype=complex)
        want[ok] = np.exp(-sums) * shifted[ok]
        err = np.max(np.abs(out.samples - want))
        assert err <= 2.0 * q.sup_norm * (n / m + 1.0 / m) + 1e-12, (q.kind, tau, n)


def test_per_tau_trivial():
    assert tl.per_tau_operator_norm(tl.Linear(), 0.0, 4) == 0.0
    for tau in np.linspace(0.0, 1.0, 9):
        assert tl.per_tau_operator_norm(tl.Constant(2.0), float(tau), 5) <= 1e-15
    with pytest.raises(ValueError):
        tl.per_tau_operator_norm(tl.Linear(), 1.5, 4)
    with pytest.raises(ValueError):
        tl.per_tau_operator_norm(tl.Linear(), 0.5, 0)


def test_per_tau_linear_sup_over_grid():
    vals = [tl.per_tau_operator_norm(tl.Linear(), j / 256, 10)
            for j in range(257)]
    top = max(vals)
    assert math.exp(-1.0) * 0.05 - 1e-3 <= top <= 0.05 + 1e-9
    assert vals[0] == 0.0
    assert vals[256] == 0.0  # nilpotent horizon


def test_per_tau_exact_vs_dense_grid():
    # step-potential path is event-exact; a dense grid must agree from below
    q2, _ = tl.build_cantor(2)
    for tau, n in ((0.5, 4), (0.9, 16), (0.3, 3)):
        exact = tl.per_tau_operator_norm(q2, tau, n)
        ts = np.linspace(tau + 1e-9, 1.0 - 1e-12, 100_001)
        u = np.exp(-(q2.antiderivative(ts) - q2.antiderivative(ts - tau)))
        v = np.exp(-tl.left_darboux_sums(q2, ts, ts - tau, n))
        dense = float(np.max(np.abs(u - v)))
        assert exact >= dense - 1e-12
        assert exact <= dense + 5e-4


def test_oracle_constant_near_zero():
    val = tl.operator_norm_oracle(tl.Constant(1.0), 0.5, 4, 2.0, trials=2,
                                  seed=0, m=2048)
    assert val <= 1e-12


def test_oracle_reaches_symbol_norm():
    m = 8192
    tau = 255.0 / 256.0  # grid-aligned: tau*m/n integral for n=10
    want = tl.per_tau_operator_norm(tl.Linear(), tau, 10)
    for p in (1.0, 2.0, 4.0):
        got = tl.operator_norm_oracle(tl.Linear(), tau, 10, p, trials=2,
                                      seed=5, m=m)
        assert got >= 0.95 * want, p
        assert got <= want + 2.0 * tl.Linear().sup_norm / m + 1e-12, p


def test_oracle_upper_bound_invariant():
    q2, _ = tl.build_cantor(2)
    m = 4096
    want = tl.per_tau_operator_norm(q2, 0.5, 4)
    got = tl.operator_norm_oracle(q2, 0.5, 4, 2.0, trials=4, seed=9, m=m)
    assert got <= want + 2.0 * q2.sup_norm / m + 1e-9


def test_oracle_validation():
    with pytest.raises(ValueError):
        tl.operator_norm_oracle(tl.Linear(), 0.5, 4, 2.0, trials=0, seed=0)
    with pytest.raises(ValueError):
        tl.operator_norm_oracle(tl.Linear(), 1.5, 4, 2.0, trials=1, seed=0)


def test_oracle_nilpotent_tau():
    # at tau = 1 with step-aligned n both maps vanish: every quotient is 0
    val = tl.operator_norm_oracle(tl.Linear(), 1.0, 8, 2.0, trials=1,
                                  seed=1, m=1024)
    assert val == 0.0


def test_strong_curve_examples():
    f = _smooth(2048)
    curve = tl.strong_convergence_curve(tl.Constant(1.0), f, 0.5, [1, 2, 4])
    assert all(resid <= 1e-12 for _, resid in curve)

    q3, _ = tl.build_cantor(3)
    curve = tl.strong_convergence_curve(q3, f, 0.5, [2, 8, 32, 128])
    resids = [r for _, r in curve]
    assert resids[-1] < 0.25 * resids[0]  # strong convergence kicks in

    with pytest.raises(ValueError):
        tl.strong_convergence_curve(q3, f, 0.5, [4, 2])
    with pytest.raises(ValueError):
        tl.strong_convergence_curve(q3, f, 0.5, [])


def test_strong_curve_no_warnings_when_aligned():
    f = _smooth(4096)
    q3, _ = tl.build_cantor(3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        tl.strong_convergence_curve(q3, f, 0.5, [2, 4, 8, 16])
