"""Property tests for the structural invariants."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ultraborel import (check_gamma_r, check_mg, check_SV_r, compare, gevrey, interpolate, is_log_convex,
                        lambda_ps, lc_minorant, make_sequence, nq_sum, power, Verdict)
from ultraborel.assoc import omega, omega_brute
from ultraborel.catalog import CATALOG, GROWING, get
from ultraborel.jets import JetSpec, convolve, ring_inequality, seminorm
from ultraborel.reports import scan_sup
from ultraborel.weights import from_log_values

finite = st.floats(-20, 20, allow_nan=False)
positive_quotients = arrays(float, st.integers(2, 40), elements=st.floats(-3, 6, allow_nan=False))


def lc_from(increments):
    """Normalized log-convex log values from arbitrary floats (sorted quotients)."""
    q = np.sort(np.asarray(increments, dtype=float))
    return np.concatenate([[0.0], np.cumsum(q)])


@given(arrays(float, st.integers(2, 30), elements=finite))
def test_normalization(v):
    M = from_log_values(v)
    assert M.log_values(v.size - 1)[0] == 0.0


@given(positive_quotients)
def test_mean_below_last_quotient(q):
    M = from_log_values(lc_from(q))
    n = q.size
    v, mu = M.log_values(n), M.log_quotients(n)
    for k in range(1, n + 1):
        assert v[k] / k <= mu[k] + 1e-10


@pytest.mark.parametrize("name", ["g0.5", "g1", "g1.5", "g2", "g3", "q2", "shift_g2"])
def test_mean_below_last_quotient_catalog(name):
    M = get(name)
    k = np.arange(1, 501)
    assert np.all(M.log_values(500)[1:] / k <= M.log_quotients(500)[1:] + 1e-10)


@given(arrays(float, st.integers(3, 30), elements=finite))
def test_lc_minorant(v):
    M = from_log_values(v)
    n = v.size - 1
    H = lc_minorant(M)
    h = H.log_values(n)
    assert is_log_convex(H, n).holds
    assert np.all(h <= M.log_values(n) + 1e-12)
    np.testing.assert_allclose(lc_minorant(H).log_values(n), h, atol=1e-10)


@given(st.sampled_from(sorted(CATALOG)), st.integers(1, 6))
def test_power_round_trip(name, r):
    M = get(name)
    back = power(power(M, 1.0 / r), r).log_values(400)
    ref = M.log_values(400)
    assert np.all(np.abs(back - ref) <= 1e-12 * np.maximum(1.0, np.abs(ref)))


@given(st.sampled_from(sorted(CATALOG)), st.sampled_from(sorted(CATALOG)))
@settings(max_examples=30)
def test_compare_reflexive_antisymmetric(a, b):
    M, N = get(a), get(b)
    assert compare(M, M, 500).equivalent
    fwd, bwd = compare(M, N, 500), compare(N, M, 500)
    if fwd.preceq and bwd.preceq:
        assert fwd.equivalent and bwd.equivalent
    assert fwd.preceq == bwd.succeq


@pytest.mark.parametrize("name", GROWING)
def test_nq_monotone_in_r(name):
    M = get(name)
    rs = [1, 1.5, 2, 3]
    verdicts = [nq_sum(M, r, 5000).converges for r in rs]
    for i, v in enumerate(verdicts):
        if v is Verdict.HOLDS:
            assert all(w is Verdict.HOLDS for w in verdicts[:i])


@pytest.mark.parametrize("pair", [("g2", "g2"), ("g3", "g3"), ("g1.5", "g3"), ("g1", "g2"), ("g1.5", "g1.5")])
@pytest.mark.parametrize("r", [1, 2])
def test_gamma_implies_sv(pair, r):
    M, N = get(pair[0]), get(pair[1])
    g = check_gamma_r(M, N, r, 10_000)
    if not g.holds:
        return
    sv = check_SV_r(M, N, r, horizon=10_000)
    C = compare(M, N, 10_000).le_constant
    assert sv.holds and sv.s == 1
    assert sv.sup_value <= C ** (1 / r) * g.sup_value * (1 + 1e-9)


@pytest.mark.parametrize("name", ["g1", "g1.5", "g2", "g3", "shift_g2"])
@pytest.mark.parametrize("r", [1, 2])
def test_sv_gamma_agree_under_mg(name, r):
    M = get(name)
    assert check_mg(M, 5000).holds
    assert check_SV_r(M, M, r, horizon=10_000).verdict is check_gamma_r(M, M, r, 10_000).verdict


@given(st.integers(1, 200), st.integers(1, 10), st.sampled_from([("g1", "g2"), ("g2", "g2"), ("g1.5", "g3")]))
def test_lambda_bound(p, s, pair):
    M, N = get(pair[0]), get(pair[1])
    logC = math.log(compare(M, N, 1000).le_constant)
    lam = lambda_ps(M, N, p, s)
    bound = logC + min(M.log_quotients(p)[p], N.log_quotients(p)[p])
    assert lam <= bound + 1e-10


@given(st.sampled_from(sorted(CATALOG)), st.integers(2, 5))
@settings(max_examples=30)
def test_interpolation_identities(name, r):
    M = get(name)
    P = interpolate(M, r)
    pv = P.log_values(r * 100)
    np.testing.assert_array_equal(pv[::r], M.log_values(100))
    pi = np.diff(pv)
    mu = M.log_quotients(101)
    for k in range(100):
        for j in range(1, r + 1):
            want = mu[k + 1] / r
            assert abs(pi[r * k + j - 1] - want) <= 1e-12 * max(1.0, abs(want))


@given(positive_quotients, st.integers(1, 4))
def test_interpolation_keeps_log_convexity(q, r):
    M = from_log_values(lc_from(q))
    P = interpolate(M, r)
    assert is_log_convex(P, r * q.size).holds


@given(st.sampled_from(GROWING), st.floats(0.0, 4.0), st.floats(0.01, 1.5))
def test_omega_monotone_convex(name, lt1, gap):
    M = get(name)
    a, b, c = (omega(M, math.exp(x)).omega for x in (lt1, lt1 + gap, lt1 + 2 * gap))
    assert a <= b + 1e-12 <= c + 2e-12
    assert b <= (a + c) / 2 + 1e-9


@given(st.sampled_from(["g1", "g1.5", "g2", "g3"]), st.floats(0.1, 9.0))
def test_omega_against_brute(name, lt):
    M = get(name)
    ev = omega(M, math.exp(lt))
    brute, _ = omega_brute(M, math.exp(lt), 4 * ev.sigma + 50)
    assert ev.omega == pytest.approx(brute, abs=1e-10)


jets = arrays(float, st.integers(1, 31), elements=st.floats(-1e3, 1e3, allow_nan=False))


@given(jets, jets, st.sampled_from(["g1", "g1.5", "g2", "g3"]), st.floats(0.2, 5.0))
def test_ring_inequality(a, b, name, h):
    chk = ring_inequality(JetSpec(a), JetSpec(b), get(name), h)
    assert chk.ok, chk.violations


@given(jets, st.floats(0.1, 4.0), st.floats(1.0, 3.0))
def test_seminorm_nonincreasing_in_h(a, h, factor):
    M = gevrey(2)
    assert seminorm(JetSpec(a), M, h * factor).value <= seminorm(JetSpec(a), M, h).value * (1 + 1e-12)


@given(jets, jets)
def test_convolve_commutative(a, b):
    A, B = JetSpec(a), JetSpec(b)
    np.testing.assert_allclose(convolve(A, B, A.order + B.order).coeffs,
                               convolve(B, A, A.order + B.order).coeffs, rtol=1e-12, atol=1e-9)


@given(arrays(float, st.integers(1, 200), elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_scan_sup_is_max(v):
    sc = scan_sup(v)
    assert sc.sup == v.max()
    assert v[sc.witness] == v.max()
    assert sc.extrapolated >= sc.sup


# ---------------------------------------------------------------- synthesis

from ultraborel.synth import BumpPlan, FunctionRep, Grid, Term, box_derivative  # noqa: E402

widths = arrays(float, st.integers(4, 12), elements=st.floats(0.02, 0.3)).map(lambda w: np.sort(w)[::-1])


@given(widths)
@settings(max_examples=15)
def test_bump_properties(w):
    plan = BumpPlan(w)
    grid = Grid(15, 1.25 * plan.support_radius)
    plan.check_grid(grid)
    f = FunctionRep(grid, [Term(1.0, plan, 0)])
    phi = f.samples.real
    i0 = grid.zero_index
    assert f.roundtrip_error() <= 1e-12
    assert f.support_leak() <= 1e-12
    assert phi[i0] == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(phi[1:i0][::-1], phi[i0 + 1:], atol=1e-12)
    assert np.all(np.diff(phi[i0:]) <= 1e-12)
    assert np.sum(phi) * grid.dx == pytest.approx(plan.support_radius, rel=1e-10)


@given(widths, st.integers(1, 3), st.floats(-0.9, 0.9))
@settings(max_examples=15)
def test_box_route_matches_spectral(w, order, frac):
    plan = BumpPlan(w)
    grid = Grid(15, 1.25 * plan.support_radius)
    f = FunctionRep(grid, [Term(1.0, plan, 0)])
    i = grid.zero_index + int(frac * plan.support_radius / grid.dx)
    spec = f.derivative_samples(order)[i].real
    box = box_derivative(plan, order, float(grid.x[i]))
    assert abs(spec - box) <= 1e-6 * plan.derivative_bound(order)


@given(widths, st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 3))
@settings(max_examples=15)
def test_function_rep_linear(w, alpha, beta, d):
    plan = BumpPlan(w)
    grid = Grid(13, 1.25 * plan.support_radius)
    cache = {}
    f = FunctionRep(grid, [Term(alpha, plan, d), Term(beta, plan, 0)], cache=cache)
    a = FunctionRep(grid, [Term(1.0, plan, d)], cache=cache)
    b = FunctionRep(grid, [Term(1.0, plan, 0)], cache=cache)
    np.testing.assert_allclose(f.samples, alpha * a.samples + beta * b.samples, atol=1e-12)
