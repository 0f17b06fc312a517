import math

import numpy as np
import pytest

from ultraborel import gevrey, interpolate
from ultraborel.jets import JetSpec
from ultraborel.synth import (BumpPlan, ExtensionError, ExtensionOperator, FunctionRep, Grid, GridError,
                              Term, UnreliableDerivative, box_derivative, build_bump, build_chi,
                              choose_parameters, derivative_at_zero, extend, profile_u, sup_derivative,
                              tau_widths)
from ultraborel.synth.vanishing import (PreconditionError, chi_difference, index_set,
                                        vanishing_bound_check)


@pytest.fixture(scope="module")
def g2_bump():
    return build_bump(gevrey(2), K=50, grid_m=18, orders=8)


@pytest.fixture(scope="module")
def op1():
    return ExtensionOperator(gevrey(3), gevrey(3), r=1, order=4)


@pytest.fixture(scope="module")
def op2():
    return ExtensionOperator(gevrey(3), gevrey(3), r=2, order=4)


class TestGrid:
    def test_layout(self):
        g = Grid(10, 2.0)
        assert g.n == 1024
        assert g.x[g.zero_index] == 0.0
        assert g.dx == pytest.approx(4.0 / 1024)

    def test_synthesize_gaussian(self):
        g = Grid(12, 10.0)
        spec = math.sqrt(2 * math.pi) * np.exp(-g.xi**2 / 2)
        f = g.synthesize(spec).real
        np.testing.assert_allclose(f, np.exp(-g.x**2 / 2), atol=1e-13)
        d1 = g.synthesize(spec, 1).real
        np.testing.assert_allclose(d1, -g.x * np.exp(-g.x**2 / 2), atol=1e-12)


class TestPlan:
    def test_validation(self):
        with pytest.raises(ValueError):
            BumpPlan(np.array([1.0, 0.5]))
        with pytest.raises(ValueError):
            BumpPlan(np.array([0.5, 1.0, 0.2]))

    def test_k_too_small_for_order(self):
        plan = BumpPlan(np.array([0.5, 0.25, 0.125, 0.1, 0.1]))
        with pytest.raises(GridError):
            plan.check_grid(Grid(14, 2.0), max_order=8)

    def test_grid_too_coarse(self):
        with pytest.raises(GridError):
            build_bump(gevrey(2), K=50, grid_m=10)

    def test_spectrum_at_zero(self):
        plan = BumpPlan(np.array([0.5, 0.3, 0.2]))
        assert plan.spectrum(np.array([0.0]))[0] == pytest.approx(plan.support_radius)  # integral of phi


class TestBump:
    def test_support_radius(self, g2_bump):
        oracle = math.fsum(1.0 / j**2 for j in range(1, 51))
        assert g2_bump.support_radius == pytest.approx(oracle, rel=1e-14)
        assert oracle == pytest.approx(1.6251, abs=1e-4)
        assert g2_bump.support_from_mass == pytest.approx(oracle, rel=0.01)

    def test_value_range(self, g2_bump):
        assert g2_bump.value_at_zero == pytest.approx(1.0, abs=1e-10)
        assert g2_bump.min_value >= -1e-10
        assert g2_bump.max_value <= 1 + 1e-10

    def test_central_flatness(self, g2_bump):
        plan, f = g2_bump.plan, g2_bump.f
        for j in range(1, plan.K - 2):
            assert abs(box_derivative(plan, j, 0.0)) <= 1e-8 * math.exp(plan.log_tau_products(j)[j])
        for j in range(1, 9):
            v = abs(f.derivative_samples(j)[f.grid.zero_index])
            assert v <= 1e-8 * math.exp(plan.log_tau_products(j)[j])

    def test_second_derivative_bound(self, g2_bump):
        entry = g2_bump.ledger[2]
        assert entry["bound"] == pytest.approx(16.0)
        assert entry["sup"] <= 16.0

    def test_ledger(self, g2_bump):
        for e in g2_bump.ledger:
            assert e["ratio"] <= 1.05
            if e["cross_discrepancy"] is not None:
                assert e["cross_discrepancy"] <= 1e-4

    def test_first_derivative_is_max_u(self, g2_bump):
        u = profile_u(g2_bump.plan, g2_bump.f.grid)
        sd = sup_derivative(g2_bump.f, 1)
        assert sd.value == pytest.approx(u.max(), rel=1e-6)

    def test_sup_order_zero(self, g2_bump):
        assert sup_derivative(g2_bump.f, 0).value == pytest.approx(1.0, abs=1e-10)

    def test_even_and_monotone(self, g2_bump):
        f = g2_bump.f
        phi = f.samples.real
        i0 = f.grid.zero_index
        np.testing.assert_allclose(phi[1:i0][::-1], phi[i0 + 1:], atol=1e-12)
        assert np.all(np.diff(phi[i0:]) <= 1e-12)

    def test_mass_of_u(self, g2_bump):
        assert g2_bump.mass_u == pytest.approx(1.0, abs=1e-10)

    def test_roundtrip_and_support(self, g2_bump):
        f = g2_bump.f
        assert f.roundtrip_error() <= 1e-12
        assert f.support_leak() <= 1e-12

    def test_ramified_bump(self):
        rep = build_bump(interpolate(gevrey(3), 2), K=50, grid_m=18, orders=8)
        assert rep.value_at_zero == pytest.approx(1.0, abs=1e-10)
        assert all(e["ratio"] <= 1.05 for e in rep.ledger)


class TestBoxDerivative:
    def test_agrees_with_spectral_off_center(self, g2_bump):
        f = g2_bump.f
        for order in (1, 3, 5):
            i = int(np.argmax(np.abs(f.derivative_samples(order))))
            x0 = float(f.grid.x[i])
            spec = f.derivative_samples(order)[i].real
            box = box_derivative(g2_bump.plan, order, x0)
            assert box == pytest.approx(spec, rel=1e-6)

    def test_high_order_off_center_refused(self, g2_bump):
        with pytest.raises(UnreliableDerivative):
            box_derivative(g2_bump.plan, 25, 0.4)


class TestDerivativeAtZero:
    def test_monomial(self, g2_bump):
        f = FunctionRep(g2_bump.f.grid, [Term(1.0, g2_bump.plan, 3)])
        dv = derivative_at_zero(f, 3)
        assert dv.value == pytest.approx(1.0, abs=1e-9)
        assert dv.cross_value == pytest.approx(1.0, abs=1e-14)

    def test_bump_flat(self, g2_bump):
        dv = derivative_at_zero(g2_bump.f, 1)
        assert abs(dv.value) <= 1e-10 and dv.cross_value == 0

    def test_chi_ramified(self, op2):
        prm = op2.params
        chi = build_chi(gevrey(3), op2.N, 2, prm.h, 1, prm.s, prm.A, max_order=4)
        dv = derivative_at_zero(chi.f, 2)
        assert dv.value == pytest.approx(1.0, abs=1e-6)

    def test_disagreement_raises(self, g2_bump):
        with pytest.raises(UnreliableDerivative):
            derivative_at_zero(g2_bump.f, 2, tol=0.0)


class TestChooseParameters:
    def test_example_A2(self):
        p = np.arange(1, 1001)
        l, d = choose_parameters(2.0, 1, 1, 1e-3, 2 * np.log(p))
        assert l == 22
        assert d == pytest.approx(49.5)

    def test_example_A1(self):
        p = np.arange(1, 1001)
        l, _ = choose_parameters(1.0, 1, 1, 1e-3, 2 * np.log(p))
        assert l == 11

    def test_monotone_in_A(self):
        p = np.arange(1, 1001)
        ls = [choose_parameters(A, 2, 2, 0.5, 3 * np.log(p))[0] for A in (1, 2, 4, 8)]
        assert ls == sorted(ls)

    def test_sup_not_certified(self):
        with pytest.raises(ValueError):
            choose_parameters(1.0, 1, 1, 0.1, np.zeros(100))


class TestChi:
    def test_delta_property(self, op1):
        prm = op1.params
        chi = build_chi(gevrey(3), op1.N, 1, prm.h, 2, prm.s, prm.A, max_order=6)
        for j in range(7):
            dv = derivative_at_zero(chi.f, j)
            assert abs(dv.cross_value - (1.0 if j == 2 else 0.0)) <= 1e-6
        assert chi.support_ok

    def test_p0_bound(self, op1):
        prm = op1.params
        chi = build_chi(gevrey(3), op1.N, 1, prm.h, 0, prm.s, prm.A)
        N = op1.N
        for e in chi.ledger:
            j = e["order"]
            bound = 2.0**j * prm.h**j * math.exp(N.log_values(j)[j])
            assert e["sup"] <= bound * 1.05
        assert chi.ledger[0]["ok"]

    def test_support_budget(self):
        with pytest.raises(GridError):
            build_chi(gevrey(3), gevrey(3), 1, 1.0, 0, 1, 1.5)

    def test_tau_widths_layout(self, op2):
        prm = op2.params
        w = tau_widths(op2.N, 2, prm.h, 1, 0.0, 10)
        assert np.all(w[:4] == w[0])
        assert np.all(np.diff(w) <= 0)


class TestExtend:
    def test_unit_jet_r1(self, op1):
        res = op1.apply(JetSpec.unit(0))
        assert all(e["error"] <= 1e-6 for e in res.jet_errors)
        assert res.support["ok"]

    def test_unit_jet_r2(self, op2):
        res = op2.apply(JetSpec([0, 1, 0, 0], r=2))
        err = {e["order"]: e["error"] for e in res.jet_errors}
        assert err[2] <= 1e-5 and err[0] <= 1e-5 and err[4] <= 1e-5
        inter = {e["order"]: e["value"] for e in res.intermediate}
        assert inter[1] <= 1e-5 and inter[3] <= 1e-5

    def test_zero_jet(self, op1):
        f = op1.function(JetSpec(np.zeros(5)))
        assert np.all(f.samples == 0)

    def test_bound_ledger(self, op1):
        res = op1.apply(JetSpec([1.0, -0.5, 2.0, 0, 1.0]))
        assert all(e["ratio"] <= 1.05 for e in res.bound_ledger)
        assert res.truncation_report["tail_bound"] == [0.0] * 5

    def test_linearity(self, op2):
        a = JetSpec([1.0, 0.2, -0.3], r=2)
        b = JetSpec([0.0, 1.0, 0.5], r=2)
        lin = JetSpec(0.7 * a.coeffs - 1.3 * b.coeffs, r=2)
        fa, fb, fl = (op2.function(j).samples for j in (a, b, lin))
        assert np.max(np.abs(fl - (0.7 * fa - 1.3 * fb))) <= 1e-10

    def test_sv_fails(self):
        with pytest.raises(ExtensionError):
            extend(JetSpec.unit(0), gevrey(1))

    def test_jet_too_long(self, op1):
        with pytest.raises(ValueError):
            op1.function(JetSpec(np.ones(6)))

    def test_wrong_r(self, op1):
        with pytest.raises(ValueError):
            op1.function(JetSpec([1.0], r=2))


class TestVanishing:
    def test_zero(self):
        led = vanishing_bound_check(lambda k, s: np.zeros_like(s), [1.0, 1.0, 1.0], 2.0, 1.0)
        assert led.lhs == 0 and led.rhs == 0 and led.ok

    def test_cubic(self):
        a = 0.4

        def deriv(k, s):
            s = np.asarray(s, dtype=float)
            pos = s > 0
            return np.where(pos, math.factorial(3) / math.factorial(3 - k) * np.where(pos, s, 0) ** (3 - k), 0.0)

        t = 3 * a
        led = vanishing_bound_check(deriv, [a, a, a], 3 * a, t)
        assert led.J == [3]
        assert led.rhs == pytest.approx(2**6 * a**3 * 6, rel=1e-12)
        assert led.lhs == pytest.approx(t**3, rel=1e-12)
        assert led.ok

    def test_index_set(self):
        assert index_set([3, 3, 2, 1, 1]) == [2, 3, 5]

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            vanishing_bound_check(lambda k, s: np.ones_like(s), [1.0], 1.0, 0.5)
        with pytest.raises(PreconditionError):
            vanishing_bound_check(lambda k, s: np.zeros_like(s), [1.0], 2.0, 0.5)

    def test_chi_difference(self, op1):
        prm = op1.params
        chi = build_chi(gevrey(3), op1.N, 1, prm.h, 2, prm.s, prm.A, max_order=6)
        g = chi_difference(chi.f, 1, 2, 0)
        widths = chi.plan.widths[:3]
        A = float(np.sum(widths))
        for t in (0.25 * A, 0.5 * A, A):
            led = vanishing_bound_check(g, widths, A, t)
            assert led.ok
