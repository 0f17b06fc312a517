"""Building blocks ``chi_{h,rp}`` and the finite-jet extension operator ``T_c``.

For a jet ``a_0..a_P`` the operator returns ``f = sum_p a_p chi_{cl,rp}`` with

    chi_{h,rp}(t) = rho_{h,p}(t) t^{rp} / (rp)!

where ``rho_{h,p}`` is the box bump over the width sequence ``tau^p``: ``2pr``
copies of ``(h lambda_{p,s})^{-1/r}`` followed by ``r`` copies of each
``(h nu_{2p+k})^{-1/r}`` (for p = 0 just ``r`` copies of each ``(h nu_k)^{-1/r}``).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from ..conditions import check_SV_r, log_lambda_table
from ..jets import JetSpec, seminorm
from ..reports import Verdict, last_quarter, scan_sup
from ..weights import WeightSequence, compare, is_log_convex
from .bump import (MAX_ORDER, BumpPlan, FunctionRep, Grid, GridError, Term, derivative_at_zero,
                   sup_derivative, truncate_widths)

K_MAX = 50
GRID_HALF_LENGTH = 1.25
SLACK = 0.05
DEFAULT_HORIZON = 4000


class ExtensionError(RuntimeError):
    """The operator cannot be built for these inputs; ``report`` explains why."""

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


@dataclass(frozen=True)
class Parameters:
    A: float
    s: int
    l: int
    d: float
    c: int
    h: int
    r: int
    B: float
    thresholds: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"A": self.A, "s": self.s, "l": self.l, "d": self.d, "c": self.c, "h": self.h,
                "r": self.r, "B": self.B, "thresholds": dict(self.thresholds)}


def choose_parameters(A: float, s: int, r: int, B: float, lambda_table) -> tuple[int, float]:
    """Smallest integer ``l`` meeting the three support conditions, and ``d``.

    ``lambda_table`` holds ``log lambda_{p,s}`` for p = 1..P.  The conditions are

        (a) B / l^{1/r} < 1/2
        (b) 2 A r p / (l lambda_{p,s})^{1/r} < 1   for every p
        (c) 2 A e s / l^{1/r} < 1/2

    and ``d = l^{1/r} (2 + 1/(2A))``.
    """
    l, d, _ = _choose(A, s, r, B, lambda_table)
    return l, d


def _choose(A, s, r, B, lambda_table):
    if A < 1 or s < 1 or r < 1:
        raise ValueError("need A >= 1 and positive integers s, r")
    lam = np.asarray(lambda_table, dtype=float)
    if lam.size < 8:
        raise ValueError("lambda table too short to certify condition (b)")
    p = np.arange(1, lam.size + 1)
    # (b) <=> log l > r log(2Arp) - log lambda_p
    vals = r * np.log(2.0 * A * r * p) - lam
    k = int(np.argmax(vals))
    if k >= last_quarter(vals.size).start:
        raise ValueError(f"lambda table too short to certify condition (b): sup at p = {k + 1} "
                         f"of {vals.size}")
    thr = {
        "a": r * math.log(2.0 * B) if B > 0 else -math.inf,
        "b": float(vals[k]),
        "c": r * math.log(4.0 * A * math.e * s),
    }
    log_l = max(thr.values())
    l = max(1, math.floor(math.exp(log_l)) + 1)
    d = l ** (1.0 / r) * (2.0 + 1.0 / (2.0 * A))
    return l, d, {k2: math.exp(v) for k2, v in thr.items()}


def _log_nu(N: WeightSequence, n: int) -> np.ndarray:
    return np.asarray(N.log_quotients(n))


def tau_widths(N: WeightSequence, r: int, h: float, p: int, log_lambda: float | None, count: int) -> np.ndarray:
    """The first ``count`` widths of ``tau^p`` (nonincreasing)."""
    need = count // r + 2 * p + 2
    q = _log_nu(N, need)
    lh = math.log(h)
    if p == 0:
        tail = np.exp(-(lh + q[1:]) / r)
        w = np.repeat(tail, r)
    else:
        if log_lambda is None:
            raise ValueError("p >= 1 needs lambda_{p,s}")
        head = np.full(2 * p * r, math.exp(-(lh + log_lambda) / r))
        tail = np.repeat(np.exp(-(lh + q[2 * p + 1:]) / r), r)
        w = np.concatenate([head, tail])
    return w[:count]


@dataclass
class ChiResult:
    f: FunctionRep
    p: int
    plan: BumpPlan
    ledger: list
    support_ok: bool


def chi_bound(M: WeightSequence, N: WeightSequence, r: int, h: float, p: int, s: int, A: float, j: int) -> float:
    """Log of the bound on ``sup |chi_{h,rp}^{(rj)}|``."""
    lNj = float(N.log_values(j)[j])
    if p == 0:
        return r * j * math.log(2.0) + j * math.log(h) + lNj
    lMp = float(M.log_values(p)[p])
    return (lNj - lMp + r * p * math.log(2.0 * A * math.e * s / h ** (1.0 / r)) + j * math.log(h)
            + r * j * math.log(2.0 + 1.0 / (2.0 * A)))


def _chi_plan(M, N, r, h, p, s, grid, log_lambda, max_order):
    w = tau_widths(N, r, h, p, log_lambda, K_MAX + 2 * p * r)
    w = truncate_widths(w, grid, K_MAX + 2 * p * r)
    plan = BumpPlan(w, label=f"tau^{p}")
    plan.check_grid(grid, max_order)
    if plan.support_radius > 1.0:
        raise GridError(f"support budget exceeded for p = {p}: radius {plan.support_radius:.6g} > 1 "
                        "(h too small)")
    return plan


def build_chi(M: WeightSequence, N: WeightSequence, r: int, h: float, p: int, s: int, A: float,
              grid_m: int = 18, max_order: int | None = None, ledger_orders: int = 4,
              cross_check: bool = True, cache: dict | None = None) -> ChiResult:
    """``chi_{h,rp}`` on ``[-1.25, 1.25)`` with its derivative ledger against the termwise bound."""
    grid = Grid(grid_m, GRID_HALF_LENGTH)
    max_order = r * ledger_orders + r if max_order is None else max_order
    lam = None
    if p >= 1:
        lam = float(log_lambda_table(M, N, s, p)[p - 1])
    plan = _chi_plan(M, N, r, h, p, s, grid, lam, max_order - r * p if max_order > r * p else 0)
    f = FunctionRep(grid, [Term(1.0, plan, r * p)],
                    {"kind": "chi", "p": p, "r": r, "h": h, "s": s, "A": A, "K": plan.K,
                     "grid_m": grid_m}, cache=cache)
    ledger = []
    for j in range(ledger_orders + 1):
        if r * j > max_order:
            break
        sd = sup_derivative(f, r * j, cross_check=False)
        lb = chi_bound(M, N, r, h, p, s, A, j)
        ledger.append({"order": r * j, "sup": sd.value, "bound": math.exp(lb),
                       "ok": sd.value <= math.exp(lb) * (1 + SLACK)})
    return ChiResult(f, p, plan, ledger, plan.support_radius <= 1.0 and f.support_leak(1.0) <= 1e-12)


# ---------------------------------------------------------------- standing assumptions

def standing_assumptions(M: WeightSequence, N: WeightSequence, r: int, horizon: int) -> dict:
    """Checks (I), (II)_{R,r} and (III) at the horizon."""
    out = {}
    n = min(M.available(horizon), N.available(horizon))
    for name, S in (("M", M), ("N", N)):
        lc = S.log_convex or is_log_convex(S, n).holds
        q = S.log_quotients(n)
        env = S.tail_envelope
        grows = (env.alpha > 0 or env.beta > 0) if env is not None else bool(q[-1] > q[n // 4] > 0)
        out[f"I_{name}"] = {"log_convex": bool(lc), "normalized": S.normalized, "root_unbounded": bool(grows),
                            "ok": bool(lc and S.normalized and grows)}
    p = np.arange(1, n + 1)
    v = (M.log_values(n)[1:] / r - gammaln(p + 1)) / p
    env = M.tail_envelope
    if env is not None and (env.beta > 0 or env.alpha >= r):
        ok2 = True
    else:
        ok2 = scan_sup(-v).stabilized
    out["II"] = {"liminf_log": float(v[last_quarter(n)].min()), "ok": bool(ok2)}
    c = compare(M, N, n)
    out["III"] = {"preceq": c.preceq, "le_constant": c.le_constant, "ok": bool(c.preceq)}
    return out


def _rescaled(N: WeightSequence, log_C: float) -> WeightSequence:
    """``C^p N_p``: same class, dominates ``M`` termwise once ``M_p <= C^p N_p``."""
    from ..weights import Envelope
    env = N.tail_envelope
    env2 = None
    if env is not None:
        env2 = Envelope(env.alpha, env.beta, env.c + log_C, env.c_lo + log_C, env.c_hi + log_C,
                        env.onset, env.exact)
    return WeightSequence(lambda n: N.log_values(n) + log_C * np.arange(n + 1),
                          quot_gen=lambda n: np.concatenate([[0.0], N.log_quotients(n)[1:] + log_C]),
                          label=f"scale({N.label},{math.exp(log_C):g})", limit=N.limit, envelope=env2,
                          log_convex=N.log_convex)


# ---------------------------------------------------------------- operator

@dataclass
class ExtensionResult:
    f: FunctionRep
    jet_errors: list
    intermediate: list
    bound_ledger: list
    support: dict
    truncation_report: dict
    parameters: Parameters
    assumptions: dict
    diagnostics: dict = field(default_factory=dict)

    def sidecar(self) -> dict:
        return {"jet_errors": self.jet_errors, "intermediate": self.intermediate,
                "bound_ledger": self.bound_ledger, "support": self.support,
                "truncation_report": self.truncation_report, "parameters": self.parameters.to_dict(),
                "assumptions": self.assumptions, "diagnostics": self.diagnostics}


class ExtensionOperator:
    """``T_c`` for fixed ``(M, N, r, c)``; the ``chi`` building blocks are shared by every jet.

    ``order`` is the largest jet index the operator accepts and
    ``ledger_orders`` the number of ``rj`` orders checked against the bound.
    """

    def __init__(self, M: WeightSequence, N: WeightSequence, r: int = 1, c: int = 1, grid_m: int = 18,
                 order: int = 4, ledger_orders: int = 4, horizon: int = DEFAULT_HORIZON,
                 s_max: int = 32, workers: int = 4):
        if int(r) != r or r < 1:
            raise ValueError("synthesis needs an integer r >= 1")
        if int(c) != c or c < 1:
            raise ValueError("c must be a positive integer")
        self.r, self.c, self.grid_m = int(r), int(c), grid_m
        self.order, self.ledger_orders = order, ledger_orders
        self.M = M
        self.assumptions = standing_assumptions(M, N, self.r, horizon)
        for key in ("I_M", "I_N", "II", "III"):
            if not self.assumptions[key]["ok"]:
                raise ExtensionError(f"standing assumption {key} not verified at horizon {horizon}",
                                     self.assumptions)
        C = self.assumptions["III"]["le_constant"]
        self.N = N if C is None or C <= 1.0 else _rescaled(N, math.log(C))
        self.sv = check_SV_r(M, self.N, self.r, s_max, horizon)
        if self.sv.verdict is not Verdict.HOLDS:
            raise ExtensionError(f"SV_{self.r} does not hold ({self.sv.verdict.value}); operator not "
                                 "constructible", self.sv.to_dict())
        s = int(self.sv.s)
        sup = max(self.sv.sup_value, self.sv.diagnostics.get("extrapolated", self.sv.sup_value))
        A = 1.1 * max(sup, 1.0 + sup / 2.0, 1.0)
        n = self.N.available(horizon)
        B, B_tail = self._B(n)
        lam_table = log_lambda_table(M, self.N, s, n // 2)
        l, d, thr = _choose(A, s, self.r, B, lam_table)
        h = self.c * l
        self.params = Parameters(A, s, l, d, self.c, h, self.r, B, thr)
        self.B_tail = B_tail
        self.grid = Grid(grid_m, GRID_HALF_LENGTH)
        self.cache: dict = {}
        max_order = self.r * (max(order, ledger_orders) + 1)
        if max_order > MAX_ORDER:
            raise ExtensionError(f"derivative order {max_order} above the cap {MAX_ORDER}")
        lam = [None] + [float(v) for v in lam_table[:order]]

        def plan_for(p):
            return _chi_plan(M, self.N, self.r, h, p, s, self.grid, lam[p],
                             max(0, max_order - self.r * p))

        with ThreadPoolExecutor(max_workers=workers) as ex:
            self.plans = list(ex.map(plan_for, range(order + 1)))
            # warm the shared bump cache in parallel; summation order stays fixed
            probe = FunctionRep(self.grid, [Term(1.0, pl, self.r * p) for p, pl in enumerate(self.plans)],
                                cache=self.cache)
            list(ex.map(lambda pl: [probe._bump(pl, k) for k in range(max_order + 1)], self.plans))

    def _B(self, n):
        q = self.N.log_quotients(n)[1:]
        partial = self.r * math.fsum(np.exp(-q / self.r))
        env = self.N.tail_envelope
        tail = env.inverse_root_tail(self.r, n) if env is not None else None
        return partial + (self.r * tail if tail else 0.0), tail

    def function(self, jet: JetSpec) -> FunctionRep:
        if jet.r != self.r:
            raise ValueError(f"jet has r = {jet.r}, operator r = {self.r}")
        if jet.order > self.order:
            raise ValueError(f"jet order {jet.order} above the operator order {self.order}")
        terms = [Term(complex(a), self.plans[p], self.r * p) for p, a in enumerate(jet.coeffs)]
        return FunctionRep(self.grid, terms, {"kind": "extension", "r": self.r, "c": self.c,
                                              "grid_m": self.grid_m, "params": self.params.to_dict()},
                           cache=self.cache)

    def apply(self, jet: JetSpec, diagnostics: bool = True) -> ExtensionResult:
        f = self.function(jet)
        res = ExtensionResult(f, [], [], [], {}, {}, self.params, self.assumptions,
                              {"sv": {"sup": self.sv.sup_value, "s": self.sv.s},
                               "B_tail": self.B_tail, "K": [pl.K for pl in self.plans]})
        if diagnostics:
            self._diagnose(jet, res)
        return res

    def _diagnose(self, jet: JetSpec, res: ExtensionResult):
        r, f, prm = self.r, res.f, self.params
        P = jet.order
        for j in range(P + 1):
            dv = derivative_at_zero(f, r * j)
            a = complex(jet.coeffs[j])
            res.jet_errors.append({"j": j, "order": r * j, "target": [a.real, a.imag],
                                   "error": abs(dv.cross_value - a), "spectral_error": abs(dv.value - a),
                                   "discrepancy": dv.discrepancy})
            for k in range(1, r):
                dk = derivative_at_zero(f, r * j + k)
                res.intermediate.append({"order": r * j + k, "value": abs(dk.cross_value),
                                         "spectral_value": abs(dk.value), "scale": dk.scale,
                                         "discrepancy": dk.discrepancy})
        sem = seminorm(jet, self.M, float(prm.c))
        for j in range(self.ledger_orders + 1):
            sd = sup_derivative(f, r * j, cross_check=False)
            lb = (math.log(2 * sem.value) if sem.value > 0 else -math.inf)
            lb += j * math.log(prm.c) + r * j * math.log(prm.d) + float(self.N.log_values(j)[j])
            bound = math.exp(lb) if lb > -math.inf else 0.0
            res.bound_ledger.append({"order": r * j, "sup": sd.value, "bound": bound,
                                     "ratio": sd.value / bound if bound > 0 else (0.0 if sd.value == 0 else math.inf),
                                     "aliased": sd.aliased})
        res.support = {"declared_radius": f.support_radius, "leak_outside_1": f.support_leak(1.0),
                       "ok": f.support_radius <= 1.0 and f.support_leak(1.0) <= 1e-12}
        res.truncation_report = self._truncation(jet, sem.value)

    def _truncation(self, jet: JetSpec, sem: float) -> dict:
        r, prm = self.r, self.params
        if jet.envelope is None:
            return {"terms_kept": jet.order + 1, "discarded": "none (finite jet)", "tail_bound": [0.0] * (self.ledger_orders + 1)}
        factor = 2.0 ** (-r * (jet.order + 1)) / (1.0 - 2.0 ** (-r))
        full = seminorm(jet, self.M, float(prm.c)).value
        bounds = []
        for j in range(self.ledger_orders + 1):
            lb = j * math.log(prm.c) + r * j * math.log(prm.d) + float(self.N.log_values(j)[j])
            bounds.append(factor * full * math.exp(lb))
        return {"terms_kept": jet.order + 1, "decay_factor": factor, "seminorm": full, "tail_bound": bounds}


def extend(jet: JetSpec, M: WeightSequence, N: WeightSequence | None = None, r: int | None = None,
           c: int = 1, grid_m: int = 18, **kw) -> ExtensionResult:
    """One-shot ``T_c`` applied to a finite jet."""
    N = M if N is None else N
    r = jet.r if r is None else r
    op = ExtensionOperator(M, N, r, c, grid_m, order=max(jet.order, 0), **kw)
    return op.apply(jet)
