import math

import numpy as np
import pytest

from ultraborel import (Verdict, check_beta1, check_gamma_r, check_SV_r, gevrey, is_quasianalytic,
                        lambda_ps, lower_order, make_sequence, nq_sum, qgevrey)

ZETA2 = math.pi**2 / 6


def brute_lambda(M, N, p, s):
    vm = M.log_values(p)[p] - p * math.log(s)
    return max((vm - N.log_values(p)[j]) / (p - j) for j in range(p))


class TestNq:
    def test_basel(self):
        rep = nq_sum(gevrey(2), 1, 100_000)
        assert rep.converges is Verdict.HOLDS
        assert rep.estimate == pytest.approx(ZETA2, abs=1e-6)
        # independent oracle: fsum of 1/p^2 plus the integral tail 1/H
        H = 100_000
        oracle = math.fsum(1.0 / p**2 for p in range(1, H + 1)) + 1.0 / H
        assert rep.estimate == pytest.approx(oracle, abs=1e-9)

    def test_harmonic_diverges(self):
        assert nq_sum(gevrey(2), 2, 10_000).converges is Verdict.FAILS

    def test_qgevrey_geometric(self):
        rep = nq_sum(qgevrey(2), 3, 1000)
        assert rep.converges is Verdict.HOLDS
        assert rep.tail_bound is not None and rep.tail_bound < 1e-12

    def test_bad_r(self):
        with pytest.raises(ValueError):
            nq_sum(gevrey(2), 0)

    def test_table_without_envelope_is_undetermined(self):
        M = make_sequence([math.factorial(p) ** 2 for p in range(30)])
        assert nq_sum(M, 1, 29).converges is Verdict.UNDETERMINED


class TestLowerOrder:
    @pytest.mark.parametrize("s", [1, 2])
    def test_gevrey(self, s):
        lo = lower_order(gevrey(s), 100_000)
        assert lo.omega == pytest.approx(s, abs=0.05)
        assert lo.lam == pytest.approx(1 / s, abs=0.05)

    def test_qgevrey_infinite(self):
        lo = lower_order(qgevrey(2), 100_000)
        assert lo.omega > 50
        assert lo.infinite

    def test_short_horizon(self):
        with pytest.raises(ValueError):
            lower_order(gevrey(2), 50)


class TestBeta1:
    def test_g2_holds(self):
        rep = check_beta1(gevrey(2), horizon=5000)
        assert rep.holds
        assert rep.Q == 2

    def test_g1_fails(self):
        assert check_beta1(gevrey(1), horizon=5000).fails

    def test_constant_fails(self):
        assert check_beta1(gevrey(0), horizon=500).fails


class TestLambda:
    def test_factorial_example(self):
        g1 = gevrey(1)
        assert math.exp(lambda_ps(g1, g1, 4, 1)) == pytest.approx(4.0, rel=1e-13)
        assert lambda_ps(g1, g1, 4, 1) == pytest.approx(brute_lambda(g1, g1, 4, 1), abs=1e-14)

    @pytest.mark.parametrize("p,s", [(1, 1), (7, 2), (30, 5), (120, 3)])
    def test_matches_brute(self, p, s):
        M, N = gevrey(1.5), gevrey(2)
        assert lambda_ps(M, N, p, s) == pytest.approx(brute_lambda(M, N, p, s), abs=1e-12)

    def test_bound_tight(self):
        g1 = gevrey(1)
        assert lambda_ps(g1, g1, 4, 1) <= math.log(4) + 1e-12

    def test_bad_index(self):
        with pytest.raises(ValueError):
            lambda_ps(gevrey(1), gevrey(1), 0, 1)


class TestGamma:
    def test_g2_r1(self):
        rep = check_gamma_r(gevrey(2), gevrey(2), 1, 100_000)
        assert rep.holds
        assert rep.witness_p == 1
        assert rep.sup_value == pytest.approx(ZETA2, abs=1e-6)

    def test_g1_r1_fails(self):
        assert check_gamma_r(gevrey(1), gevrey(1), 1, 10_000).fails

    def test_g3_r2(self):
        rep = check_gamma_r(gevrey(3), gevrey(3), 2, 100_000)
        assert rep.holds
        # brute-force oracle for Q(p) at small p: p^{3/2}/p * sum_{k>=p} k^{-3/2}
        H = 100_000
        k = np.arange(1, H + 1, dtype=float)
        tail = 2.0 / math.sqrt(H)
        Q = [p**0.5 * (math.fsum(k[p - 1:] ** -1.5) + tail) for p in (1, 2, 3)]
        assert rep.sup_value >= max(Q) - 1e-3
        assert math.isfinite(rep.sup_value)


class TestSV:
    def test_g2_r1(self):
        sv = check_SV_r(gevrey(2), gevrey(2), 1, horizon=100_000)
        g = check_gamma_r(gevrey(2), gevrey(2), 1, 100_000)
        assert sv.holds and sv.s == 1
        assert sv.sup_value <= g.sup_value + 1e-9

    def test_g2_r2_fails(self):
        assert check_SV_r(gevrey(2), gevrey(2), 2, horizon=10_000).fails

    def test_mixed_g1_g3(self):
        sv = check_SV_r(gevrey(1), gevrey(3), 1, horizon=10_000)
        assert sv.holds
        # brute-force oracle: lambda_{p,1} <= mu_p = p, tail sum ~ p^-2/2
        H = 10_000
        k = np.arange(1, H + 1, dtype=float)
        suffix = np.cumsum((k**-3)[::-1])[::-1] + 0.5 / H**2
        brute = max(math.exp(lambda_ps(gevrey(1), gevrey(3), p, 1)) / p * suffix[p - 1]
                    for p in range(1, 200))
        assert sv.sup_value == pytest.approx(brute, rel=1e-9)

    def test_bad_s_max(self):
        with pytest.raises(ValueError):
            check_SV_r(gevrey(2), s_max=0)


class TestQuasianalytic:
    @pytest.mark.parametrize("s,r,quasi", [(1, 1, True), (2, 1, False), (3, 2, False), (3, 3, True)])
    def test_gevrey(self, s, r, quasi):
        rep = is_quasianalytic(gevrey(s), r, 10_000)
        assert rep.verdict is (Verdict.HOLDS if quasi else Verdict.FAILS)

    def test_non_lc_table_regularized(self):
        vals = [math.factorial(p) ** 2 * (3.0 if p % 2 else 1.0) for p in range(40)]
        M = make_sequence(vals)
        rep = is_quasianalytic(M, 1, 39)
        assert rep.diagnostics["lc_minorant_applied"]

    def test_non_integer_r(self):
        with pytest.raises(ValueError):
            is_quasianalytic(gevrey(2), 1.5)
