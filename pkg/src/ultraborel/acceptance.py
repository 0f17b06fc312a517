"""Acceptance suite: one function per criterion, shared by the CLI and pytest.

Every check returns a :class:`CriterionResult` with the measured quantities
in ``details`` so that a failure shows the numbers, not just a flag.  In
quick mode the expensive criteria run on a reduced subset (smaller grids and
horizons) with the same tolerances.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gammaln

from . import catalog
from .assoc import (check_integral_condition, integral_identity_check, omega_many,
                    power_law_check)
from .conditions import check_gamma_r, check_SV_r, is_quasianalytic, log_lambda_table, lambda_ps
from .jets import JetSpec, ring_inequality, seminorm
from .ramify import interpolate, nq_partial_sum_identity, transfer_check
from .reports import Verdict
from .weights import Envelope, from_log_values, gevrey

EPS_PHI = 1e-10


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    elapsed: float
    budget: float
    details: dict = field(default_factory=dict)

    @property
    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        over = "" if self.elapsed <= self.budget else f" (over budget {self.budget:g}s)"
        return f"[{status}] criterion {self.number:2d} {self.name}: {self.elapsed:.2f}s{over}"

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "elapsed": round(self.elapsed, 3), "budget": self.budget, "details": _jsonable(self.details)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Verdict):
        return obj.value
    return obj


GEVREY_S = (0.5, 1.0, 1.5, 2.0, 3.0)


def c1_gamma_threshold(quick=False) -> dict:
    horizon = 10_000 if quick else 100_000
    rows, ok = [], True
    for s in GEVREY_S:
        M = gevrey(s)
        for r in (1, 2, 3):
            v = check_gamma_r(M, M, r, horizon).verdict
            want = Verdict.HOLDS if s > r else Verdict.FAILS
            rows.append({"s": s, "r": r, "verdict": v.value, "expected": want.value})
            ok &= v is want
    return {"passed": ok, "rows": rows, "horizon": horizon}


def c2_sv_gamma(quick=False) -> dict:
    horizon = 4000 if quick else 10_000
    pairs = [(f"g{s:g}", f"g{s:g}") for s in GEVREY_S] + [("g1", "g2"), ("g1.5", "g3"), ("g2", "shift_g2")]
    rows, ok = [], True
    for a, b in pairs:
        M, N = catalog.get(a), catalog.get(b)
        for r in (1, 2):
            sv = check_SV_r(M, N, r, horizon=horizon).verdict
            ga = check_gamma_r(M, N, r, horizon).verdict
            rows.append({"M": a, "N": b, "r": r, "sv": sv.value, "gamma": ga.value})
            ok &= sv is ga and sv is not Verdict.UNDETERMINED
    return {"passed": ok, "rows": rows}


def c3_interpolation(quick=False) -> dict:
    rows, ok = [], True
    n_max = 200 if quick else 500
    for name, M in catalog.members().items():
        for r in range(1, 6):
            P = interpolate(M, r)
            K = n_max // r
            node_err = float(np.max(np.abs(P.log_values(r * K)[::r] - M.log_values(K))))
            # quotient identity: pi_l = mu_k^{1/r} for l = r(k-1)+1 .. rk
            pi = np.diff(P.log_values(r * K))
            want = np.repeat(M.log_quotients(K)[1:] / r, r)
            q_err = float(np.max(np.abs(pi - want)))
            lhs, rhs = nq_partial_sum_identity(M, r, K)
            rel = abs(lhs - rhs) / abs(rhs)
            good = node_err <= 1e-12 and q_err <= 1e-12 * max(1.0, float(np.max(np.abs(want)))) and rel <= 1e-12
            ok &= good
            rows.append({"M": name, "r": r, "node_err": node_err, "quot_err": q_err, "sum_rel": rel})
    return {"passed": ok, "rows": rows}


def c4_transfer(quick=False) -> dict:
    horizon = 2000 if quick else 10_000
    names = ("g1", "g2", "g3", "q2") if quick else tuple(catalog.CATALOG)
    rows, ok = [], True
    for name in names:
        M = catalog.get(name)
        for r in (2, 3):
            for which in ("nq", "mg", "gamma"):
                t = transfer_check(M, M, r, which, horizon)
                good = t.agree and t.bounds_ok
                ok &= good
                rows.append({"M": name, "r": r, "which": which, "base": t.base.verdict.value,
                             "interp": t.interpolated.verdict.value, "bounds": t.bounds, "ok": good})
    return {"passed": ok, "rows": rows}


def c5_lambda_bound(quick=False) -> dict:
    pairs = [("g1", "g1"), ("g1", "g2"), ("g2", "shift_g2")]
    P, S = 200, 10
    rows, ok = [], True
    for a, b in pairs:
        M, N = catalog.get(a), catalog.get(b)
        logC = float(np.max(M.log_values(P) - N.log_values(P)))
        bound = logC + np.minimum(M.log_quotients(P)[1:], N.log_quotients(P)[1:])
        worst = -math.inf
        for s in range(1, S + 1):
            lam = log_lambda_table(M, N, s, P)
            worst = max(worst, float(np.max(lam - bound)))
        # the table against the defining max at a few points
        spot = max(abs(lambda_ps(M, N, p, s) - log_lambda_table(M, N, s, P)[p - 1])
                   for p in (1, 7, 50, 200) for s in (1, 3, 10))
        good = worst <= 1e-10 and spot <= 1e-10
        ok &= good
        rows.append({"M": a, "N": b, "log_C": logC, "max_excess": worst, "table_vs_direct": spot})
    return {"passed": ok, "rows": rows}


def gevrey_slope(s: float, t_lo=1e3, t_hi=1e6, n=31) -> float:
    t = np.geomspace(t_lo, t_hi, n)
    w = omega_many(gevrey(s), t)
    return float(np.polyfit(np.log(t), np.log(w), 1)[0])


def c6_assoc(quick=False) -> dict:
    rows, ok = [], True
    names = ("g1", "g2", "q2") if quick else catalog.GROWING
    for name in names:
        M = catalog.get(name)
        ts = np.geomspace(1.5, 1e3, 20)
        # errors relative to max(1, omega): log M_p itself is only known to ~1e-16 relative
        ident = 0.0
        for t in ts:
            direct, integral, err = integral_identity_check(M, float(t))
            ident = max(ident, err / max(1.0, abs(direct)))
        pl = 0.0
        for s in (0.5, 2.0, 3.0):
            for t in np.geomspace(1.5, 10.0, 8):
                lhs, rhs = power_law_check(M, float(t), s)
                pl = max(pl, abs(lhs - rhs) / max(1.0, abs(lhs)))
        good = ident <= 1e-10 and pl <= 1e-10
        ok &= good
        rows.append({"M": name, "identity_rel_err": ident, "power_law_rel_err": pl})
    slopes = {}
    for s in (1.0, 1.5, 2.0, 3.0):
        sl = gevrey_slope(s)
        slopes[s] = {"slope": sl, "expected": 1 / s}
        ok &= abs(sl - 1 / s) <= 0.05
    return {"passed": ok, "rows": rows, "slopes": slopes,
            "note": "s = 0.5 left out of the slope check: omega on [1e3, 1e6] needs p up to 1e12"}


def c7_integral(quick=False) -> dict:
    rows, ok = [], True
    for s, r in ((3, 2), (2, 3), (2, 1)):
        M = gevrey(s)
        ic = check_integral_condition(M, M, r)
        g = check_gamma_r(M, M, r, 10_000 if quick else 100_000).verdict
        v = ic.report.verdict
        good = v is g and v is not Verdict.UNDETERMINED
        if v is Verdict.HOLDS:
            good &= ic.diagnostics["top_decade_growth"] <= 0.1
        ok &= good
        rows.append({"s": s, "r": r, "integral": v.value, "gamma": g.value,
                     "top_decade_growth": ic.diagnostics["top_decade_growth"], "C_hat_max": ic.report.sup_value})
    return {"passed": ok, "rows": rows}


def c8_bump(quick=False) -> dict:
    from .synth import build_bump

    grid_m, K = (16, 30) if quick else (18, 50)
    rows, ok = [], True
    for label, M, r in (("gevrey:s=2", gevrey(2), 1), ("interp(gevrey:s=3,r=2)", interpolate(gevrey(3), 2), 2)):
        orders = 8 * r
        b = build_bump(M, K=K, grid_m=grid_m, orders=orders)
        predicted = math.fsum(np.exp(-M.log_quotients(K)[1:]))
        radius_rel = abs(b.support_from_mass - predicted) / predicted
        checks = {
            "phi0": abs(b.value_at_zero - 1.0) <= EPS_PHI,
            "range": b.min_value >= -EPS_PHI and b.max_value <= 1.0 + EPS_PHI,
            "radius": radius_rel <= 0.01 and b.support_leak <= 1e-12,
        }
        # plain orders j <= 8 and, for r >= 2, ramified orders rj, j <= 8
        led = [e for e in b.ledger if e["order"] <= 8 or e["order"] % r == 0]
        checks["bound"] = all(e["sup"] <= 1.05 * e["bound"] for e in led)
        disc = max(e["cross_discrepancy"] for e in led if e["cross_discrepancy"] is not None)
        checks["cross"] = disc <= 1e-4
        good = all(checks.values())
        ok &= good
        rows.append({"M": label, "r": r, "phi0": b.value_at_zero, "min": b.min_value, "max": b.max_value,
                     "radius_measured": b.support_from_mass, "radius_predicted": predicted,
                     "max_bound_ratio": max(e["ratio"] for e in led), "max_cross_discrepancy": disc,
                     "checks": checks})
    return {"passed": ok, "rows": rows, "grid_m": grid_m, "K": K}


def c9_extension(quick=False) -> dict:
    from .synth import ExtensionOperator

    M = gevrey(3)
    grid_m = 18  # r = 1 widths (20 k^3)^{-1} need 2^18 points for K >= 8
    rng = np.random.default_rng(20240611)
    rows, ok = [], True
    for r in ((1,) if quick else (1, 2)):
        op = ExtensionOperator(M, M, r, 1, grid_m, order=4)
        mags = np.exp(M.log_values(4))
        rand = JetSpec(rng.uniform(-1, 1, 5) * mags, r=r)
        jets = [JetSpec.unit(p, 5, r=r) for p in range(5)] + [rand]
        for jet in jets:
            res = op.apply(jet)
            jet_ok = all(e["error"] <= 1e-5 * max(1.0, math.hypot(*e["target"])) for e in res.jet_errors)
            inter = max([e["value"] / max(1.0, e["scale"]) for e in res.intermediate], default=0.0)
            sup_ok = res.support["declared_radius"] <= 1 + 1e-9 and res.support["leak_outside_1"] <= 1e-12
            bound_ok = all(e["sup"] <= 1.05 * e["bound"] for e in res.bound_ledger)
            good = jet_ok and inter <= 1e-5 and sup_ok and bound_ok
            ok &= good
            rows.append({"r": r, "jet": [float(z.real) for z in jet.coeffs],
                         "max_jet_error": max(e["error"] for e in res.jet_errors),
                         "max_spectral_jet_error": max(e["spectral_error"] for e in res.jet_errors),
                         "max_intermediate": inter, "max_bound_ratio": max(e["ratio"] for e in res.bound_ledger),
                         "support": res.support["declared_radius"], "ok": good})
        al, be = 0.7 - 0.2j, -1.3
        fa = op.function(jets[1]).samples
        fb = op.function(rand).samples
        comb = JetSpec(al * jets[1].coeffs + be * rand.coeffs, r=r)
        lin = float(np.max(np.abs(op.function(comb).samples - (al * fa + be * fb))))
        ok &= lin <= 1e-10
        rows.append({"r": r, "linearity_err": lin, "parameters": op.params.to_dict()})
    return {"passed": ok, "rows": rows, "grid_m": grid_m}


def c10_quasianalytic(quick=False) -> dict:
    cases = [(gevrey(1), 1, True), (gevrey(2), 1, False), (gevrey(3), 2, False), (gevrey(3), 3, True)]
    rows, ok = [], True
    for M, r, qa in cases:
        v = is_quasianalytic(M, r).verdict
        want = Verdict.HOLDS if qa else Verdict.FAILS
        ok &= v is want
        rows.append({"M": M.label, "r": r, "verdict": v.value, "expected": want.value})
    T = bumpy_table()
    rep = is_quasianalytic(T, 1)
    good = rep.verdict is Verdict.FAILS and bool(rep.diagnostics.get("lc_minorant_applied"))
    ok &= good
    rows.append({"M": T.label, "r": 1, "verdict": rep.verdict.value, "expected": "fails",
                 "lc_minorant_applied": rep.diagnostics.get("lc_minorant_applied")})
    return {"passed": ok, "rows": rows}


def bumpy_table(n: int = 400) -> object:
    """Gevrey-2 log values with bumps at a few indices, so not log-convex."""
    p = np.arange(n + 1)
    v = 2.0 * gammaln(p + 1)
    v[[3, 17, 101]] += [1.0, 2.5, 4.0]
    return from_log_values(v, label="bumpy_g2", envelope=Envelope.simple(2.0))


def c11_ring(quick=False) -> dict:
    rng = np.random.default_rng(7)
    names = list(catalog.CATALOG)
    rows, ok = [], True
    for i in range(20):
        M = catalog.get(names[i % len(names)])
        Pa, Pb = (int(x) for x in rng.integers(0, 31, 2))
        h = float(rng.choice([0.5, 1.0, 2.0, 3.0]))
        la = np.exp(M.log_values(Pa)) * h ** np.arange(Pa + 1)
        lb = np.exp(M.log_values(Pb)) * h ** np.arange(Pb + 1)
        a = JetSpec(rng.uniform(-1, 1, Pa + 1) * la)
        b = JetSpec(rng.uniform(-1, 1, Pb + 1) * lb)
        rc = ring_inequality(a, b, M, h)
        # independent recount of violations, term by term
        prod = np.convolve(a.coeffs, b.coeffs)
        na, nb = seminorm(a, M, h).value, seminorm(b, M, h).value
        lv = M.log_values(prod.size - 1)
        brute = [k for k, z in enumerate(prod)
                 if abs(z) > 0 and math.log(abs(z)) - k * math.log(2 * h) - lv[k] > math.log(na * nb) + 1e-12]
        good = rc.ok and rc.violations == brute
        ok &= good
        rows.append({"M": M.label, "Pa": Pa, "Pb": Pb, "h": h, "lhs": rc.lhs, "rhs": rc.rhs, "ok": good})
    # a deliberately false inequality (same h on the left) must be reported, not hidden
    M = gevrey(1)
    a = JetSpec(np.ones(6))
    rc_bad = ring_inequality(a, a, M, 0.5)
    return {"passed": ok, "rows": rows, "violation_demo": {"violations": rc_bad.violations}}


CRITERIA: list[tuple[int, str, Callable, float]] = [
    (1, "gevrey gamma threshold", c1_gamma_threshold, 10),
    (2, "SV <=> gamma", c2_sv_gamma, 30),
    (3, "interpolation identities", c3_interpolation, 5),
    (4, "transfer lemmas", c4_transfer, 30),
    (5, "lambda bound", c5_lambda_bound, 2),
    (6, "associated function identities", c6_assoc, 10),
    (7, "integral condition <=> gamma", c7_integral, 60),
    (8, "bump contract", c8_bump, 60),
    (9, "extension operator", c9_extension, 180),
    (10, "quasianalyticity decision", c10_quasianalytic, 2),
    (11, "sequence-space ring", c11_ring, 2),
]


def run_criterion(number: int, quick: bool = False) -> CriterionResult:
    for num, name, fn, budget in CRITERIA:
        if num == number:
            t0 = time.perf_counter()
            try:
                out = fn(quick)
                passed = bool(out.pop("passed"))
            except Exception as e:  # a crash is a failed criterion with its message kept
                out, passed = {"error": f"{type(e).__name__}: {e}"}, False
            return CriterionResult(num, name, passed, time.perf_counter() - t0, budget, out)
    raise ValueError(f"no criterion {number}")


def run_acceptance(quick: bool = False, numbers=None, echo: Callable[[str], None] | None = None):
    results = []
    for num, *_ in CRITERIA:
        if numbers is not None and num not in numbers:
            continue
        res = run_criterion(num, quick)
        if echo is not None:
            echo(res.line)
        results.append(res)
    return results
