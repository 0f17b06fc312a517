"""Non-quasianalyticity lattice: (nq_r), lower order, (beta_1), (gamma_r), lambda_{p,s}, SV_r.

Every check scans a finite horizon.  Rigorous tails come from declared
envelopes (see :class:`ultraborel.weights.Envelope`); without one, a
tail-sensitive check reports ``undetermined`` instead of truncating.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .reports import ConditionReport, Verdict, last_quarter, scan_sup
from .weights import (DEFAULT_HORIZON, Envelope, WeightSequence, compare,
                      is_log_convex, lc_minorant)

S_MAX = 32


@dataclass
class PartialSumReport:
    """``sum_{p<=P} mu_p^{-1/r}`` plus an optional rigorous tail bound."""

    partial_sum: float
    tail_bound: float | None
    converges: Verdict
    horizon: int
    r: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def estimate(self) -> float:
        return self.partial_sum + (self.tail_bound or 0.0)

    def to_report(self, condition="nq") -> ConditionReport:
        return ConditionReport(condition, self.converges, self.estimate, self.horizon, self.horizon,
                               tail_bound=self.tail_bound, r=self.r, diagnostics=dict(self.diagnostics))


def _check_r(r):
    r = float(r)
    if not r > 0:
        raise ValueError("r must be > 0")
    return r


def nq_sum(M: WeightSequence, r: float = 1.0, horizon: int = DEFAULT_HORIZON) -> PartialSumReport:
    r = _check_r(r)
    n = M.available(horizon)
    q = M.log_quotients(n)[1:]
    terms = np.exp(-q / r)
    partial = float(np.sum(terms))
    diag = {"log_convex": bool(M.log_convex or is_log_convex(M, max(n, 2)).holds)}
    env = M.tail_envelope
    tail = None
    if env is not None:
        if env.nq_converges(r):
            verdict = Verdict.HOLDS
            tail = env.inverse_root_tail(r, n)
            diag["certificate"] = "envelope tail comparison"
        else:
            verdict = Verdict.FAILS
            diag["certificate"] = (f"envelope beta=0, alpha={env.alpha:g} <= r: terms >= "
                                   f"C p^(-{env.alpha / r:g}), a divergent p-series")
    else:
        w = terms[last_quarter(n)]
        if w.size >= 2 and w[-1] >= w[0] * (1 - 1e-12):
            verdict = Verdict.FAILS
            diag["certificate"] = "terms stopped decreasing over the last quarter"
        else:
            verdict = Verdict.UNDETERMINED
    return PartialSumReport(partial, tail, verdict, n, r, diag)


@dataclass
class LowerOrder:
    omega: float
    lam: float
    horizon: int
    infinite: bool
    envelope_limit: float | None

    @property
    def identity_gap(self) -> float:
        return abs(self.lam * self.omega - 1.0)


def lower_order(M: WeightSequence, horizon: int = 100_000) -> LowerOrder:
    """Last-quarter estimators of ``liminf log mu_p / log p`` and its reciprocal."""
    n = M.available(horizon)
    if n < 100:
        raise ValueError("lower_order needs horizon >= 100")
    if not (M.log_convex or is_log_convex(M, n).holds):
        raise ValueError(f"{M.label} is not log-convex up to {n}")
    q = M.log_quotients(n)
    p = np.arange(2, n + 1)
    ratio = q[2:] / np.log(p)
    w = ratio[last_quarter(ratio.size)]
    om = float(w.min())
    lam = float(np.max(1.0 / w)) if np.all(w > 0) else math.inf
    env = M.tail_envelope
    inf = bool(env is not None and env.beta > 0)
    lim = env.alpha if (env is not None and env.beta == 0 and env.exact) else None
    return LowerOrder(om, lam, n, inf, lim)


def check_beta1(M: WeightSequence, Q_max: int = 4, horizon: int = DEFAULT_HORIZON,
                margin: float = 1e-3) -> ConditionReport:
    """``liminf mu_{Qp} / mu_p > Q`` for some ``Q <= Q_max``."""
    if Q_max < 2:
        raise ValueError("Q_max must be >= 2")
    n = M.available(horizon)
    q = M.log_quotients(n)
    best = (-math.inf, 1, 2)
    per_Q = {}
    for Q in range(2, Q_max + 1):
        p = np.arange(1, n // Q + 1)
        if p.size < 4:
            break
        d = q[Q * p] - q[p]
        win = slice((3 * p.size) // 4, p.size)
        i = int(np.argmin(d[win])) + win.start
        per_Q[Q] = float(d[i])
        if d[i] - math.log(Q + margin) > best[0] - math.log(best[2] + margin):
            best = (float(d[i]), int(p[i]), Q)
    stat, wp, Qb = best
    hits = [Q for Q, v in per_Q.items() if v > math.log(Q + margin)]
    env = M.tail_envelope
    diag = {"liminf_log_ratio": per_Q, "window": "last quarter", "margin": margin}
    if hits:
        verdict, Qb = Verdict.HOLDS, hits[0]
        stat = per_Q[Qb]
    elif env is not None and (env.beta > 0 or env.alpha > 1):
        verdict = Verdict.HOLDS
        diag["certificate"] = "envelope: mu_Qp/mu_p -> Q^alpha or infinity"
    elif env is not None and env.exact and env.beta == 0 and env.alpha <= 1:
        verdict = Verdict.FAILS
        diag["certificate"] = f"envelope: mu_Qp/mu_p -> Q^{env.alpha:g} <= Q"
    else:
        verdict = Verdict.UNDETERMINED
    return ConditionReport("beta1", verdict, stat, wp, n, Q=Qb, diagnostics=diag)


# ---------------------------------------------------------------- lambda_{p,s}

def lambda_ps(M: WeightSequence, N: WeightSequence, p: int, s: int = 1) -> float:
    """``log lambda_{p,s} = max_{0<=j<p} (log M_p - p log s - log N_j)/(p - j)``."""
    if p < 1 or s < 1:
        raise ValueError("p and s must be >= 1")
    Y = M.log_values(p)[p] - p * math.log(s)
    nj = N.log_values(p - 1)
    j = np.arange(p)
    return float(np.max((Y - nj) / (p - j)))


def _log_lambda_convex(Y: np.ndarray, nv: np.ndarray) -> np.ndarray:
    """Vectorized tangent search, valid when ``nv`` is convex.

    For fixed p, ``g(i) = (Y_p - n_i)/(p - i)`` increases while the chain
    slope ``n_{i+1} - n_i`` stays below ``g(i)`` and decreases afterwards, so
    the maximizer is the first ``i`` where the slope overtakes ``g``.
    """
    P = Y.size
    p = np.arange(1, P + 1)
    e = np.diff(nv)  # e[i] = n_{i+1} - n_i

    def g(i):
        return (Y - nv[i]) / (p - i)

    lo = np.zeros(P, dtype=np.int64)
    hi = p - 1
    while True:
        act = lo < hi
        if not act.any():
            break
        mid = (lo + hi) // 2
        pred = e[np.minimum(mid, e.size - 1)] > g(mid)
        pred |= mid == p - 1
        hi = np.where(act & pred, mid, hi)
        lo = np.where(act & ~pred, mid + 1, lo)
    best = g(lo)
    prev = np.maximum(lo - 1, 0)
    return np.maximum(best, g(prev))


def _log_lambda_hull(Y: np.ndarray, nv: np.ndarray) -> np.ndarray:
    """Tangent search against the incremental lower hull (any ``nv``)."""
    P = Y.size
    out = np.empty(P)
    hull: list[int] = []
    for p in range(1, P + 1):
        j = p - 1
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            if (nv[b] - nv[a]) * (j - a) >= (nv[j] - nv[a]) * (b - a):
                hull.pop()
            else:
                break
        hull.append(j)
        y = Y[p - 1]
        lo, hi = 0, len(hull) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            i, k = hull[mid], hull[mid + 1]
            slope = (nv[k] - nv[i]) / (k - i)
            if slope > (y - nv[i]) / (p - i):
                hi = mid
            else:
                lo = mid + 1
        i = hull[lo]
        out[p - 1] = (y - nv[i]) / (p - i)
    return out


def log_lambda_table(M: WeightSequence, N: WeightSequence, s: int, P: int) -> np.ndarray:
    """``log lambda_{p,s}`` for p = 1..P."""
    Y = M.log_values(P)[1:] - np.arange(1, P + 1) * math.log(s)
    nv = np.asarray(N.log_values(P))
    if N.log_convex or is_log_convex(N, max(P, 2)).holds:
        return _log_lambda_convex(Y, nv)
    return _log_lambda_hull(Y, nv)


# ---------------------------------------------------------------- gamma_r / SV_r

def _log_suffix(N: WeightSequence, r: float, n: int):
    """``log(sum_{k=p}^{n} nu_k^{-1/r} + tail)`` for p = 1..n, and the tail."""
    q = N.log_quotients(n)[1:]
    t = -q / r
    suf = np.logaddexp.accumulate(t[::-1])[::-1]
    env = N.tail_envelope
    tail = env.inverse_root_tail(r, n) if env is not None else None
    if tail is not None and tail > 0:
        suf = np.logaddexp(suf, math.log(tail))
    return suf, tail


def _gamma_env_bounded(em: Envelope | None, en: Envelope | None, r: float) -> bool | None:
    if em is None or en is None:
        return None
    if not en.nq_converges(r):
        return False
    if en.beta == 0:
        return em.beta == 0 and em.alpha <= en.alpha
    if em.beta != en.beta:
        return em.beta < en.beta
    return em.alpha - en.alpha <= r


def _warn_order(M, N, horizon, diag):
    if M is not N:
        c = compare(M, N, horizon)
        diag["M_preceq_N"] = c.preceq
        return c
    diag["M_preceq_N"] = True
    return None


def check_gamma_r(M: WeightSequence, N: WeightSequence | None = None, r: float = 1.0,
                  horizon: int = DEFAULT_HORIZON) -> ConditionReport:
    """Mixed ``(M,N)_{gamma_r}``: ``sup_p mu_p^{1/r}/p * sum_{k>=p} nu_k^{-1/r}``."""
    r = _check_r(r)
    N = M if N is None else N
    n = min(M.available(horizon), N.available(horizon))
    diag: dict = {"window": "last quarter"}
    _warn_order(M, N, n, diag)
    nq = nq_sum(N, r, n)
    diag["nq_N"] = nq.converges.value
    P = n // 2
    suf, tail = _log_suffix(N, r, n)
    p = np.arange(1, P + 1)
    logQ = M.log_quotients(P)[1:] / r - np.log(p) + suf[:P]
    sc = scan_sup(logQ)
    sup = math.exp(sc.sup)
    diag.update(rule=sc.rule, extrapolated=math.exp(sc.extrapolated))
    if nq.converges is Verdict.FAILS:
        diag["certificate"] = "nq_r fails for N: " + nq.diagnostics.get("certificate", "")
        return ConditionReport("gamma_r", Verdict.FAILS, sup, int(p[sc.witness]), n,
                               tail_bound=tail, r=r, diagnostics=diag)
    env_ok = _gamma_env_bounded(M.tail_envelope, N.tail_envelope, r)
    diag["envelope_bounded"] = env_ok
    if tail is None:
        verdict = Verdict.UNDETERMINED
        diag["reason"] = "no rigorous tail for the nu-sum"
    elif sc.stabilized and env_ok is not False:
        verdict = Verdict.HOLDS
    elif not sc.stabilized and env_ok is False:
        verdict = Verdict.FAILS
        diag["certificate"] = "envelope growth: Q(p) unbounded"
    else:
        verdict = Verdict.UNDETERMINED
    return ConditionReport("gamma_r", verdict, sup, int(p[sc.witness]), n, tail_bound=tail,
                           r=r, diagnostics=diag)


def check_SV_r(M: WeightSequence, N: WeightSequence | None = None, r: float = 1.0,
               s_max: int = S_MAX, horizon: int = DEFAULT_HORIZON) -> ConditionReport:
    """Mixed ``(M,N)_{SV_r}`` with the s-search capped at ``s_max``."""
    r = _check_r(r)
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    N = M if N is None else N
    n = min(M.available(horizon), N.available(horizon))
    diag: dict = {"window": "last quarter", "s_max": s_max, "per_s": {}}
    _warn_order(M, N, n, diag)
    nq = nq_sum(N, r, n)
    diag["nq_N"] = nq.converges.value
    P = n // 2
    suf, tail = _log_suffix(N, r, n)
    p = np.arange(1, P + 1)
    first = None
    for s in range(1, s_max + 1):
        logQ = log_lambda_table(M, N, s, P) / r - np.log(p) + suf[:P]
        sc = scan_sup(logQ)
        diag["per_s"][s] = {"sup": math.exp(sc.sup), "stabilized": sc.stabilized,
                            "extrapolated": math.exp(sc.extrapolated), "witness_p": int(p[sc.witness])}
        if first is None:
            first = (s, sc)
        if nq.converges is Verdict.FAILS:
            diag["certificate"] = "nq_r fails for N (p = 1 term forces it)"
            return ConditionReport("sv_r", Verdict.FAILS, math.exp(sc.sup), int(p[sc.witness]), n,
                                   tail_bound=tail, r=r, s=s, diagnostics=diag)
        if tail is None:
            diag["reason"] = "no rigorous tail for the nu-sum"
            return ConditionReport("sv_r", Verdict.UNDETERMINED, math.exp(sc.sup), int(p[sc.witness]),
                                   n, tail_bound=None, r=r, s=s, diagnostics=diag)
        if sc.stabilized:
            diag["extrapolated"] = math.exp(sc.extrapolated)
            return ConditionReport("sv_r", Verdict.HOLDS, math.exp(sc.sup), int(p[sc.witness]), n,
                                   tail_bound=tail, r=r, s=s, diagnostics=diag)
    s, sc = first
    return ConditionReport("sv_r", Verdict.UNDETERMINED, math.exp(sc.sup), int(p[sc.witness]), n,
                           tail_bound=tail, r=r, s=None, diagnostics=diag)


def is_quasianalytic(M: WeightSequence, r: int = 1, horizon: int = DEFAULT_HORIZON) -> ConditionReport:
    """Quasianalyticity of the (r-ramified) class: ``holds`` means quasianalytic."""
    if int(r) != r or r < 1:
        raise ValueError("r must be a positive integer")
    r = int(r)
    lc = M.log_convex or is_log_convex(M, M.available(horizon)).holds
    diag = {"lc_minorant_applied": False, "input_log_convex": bool(lc)}
    if not lc and r == 1:
        M = lc_minorant(M, horizon)
        diag["lc_minorant_applied"] = True
        diag["regularized_label"] = M.label
    nq = nq_sum(M, r, horizon)
    verdict = {Verdict.HOLDS: Verdict.FAILS, Verdict.FAILS: Verdict.HOLDS}.get(nq.converges,
                                                                              Verdict.UNDETERMINED)
    diag["class"] = {Verdict.HOLDS: "quasianalytic", Verdict.FAILS: "nonquasianalytic"}.get(
        verdict, "undetermined")
    diag.update(nq.diagnostics)
    return ConditionReport("quasianalytic", verdict, nq.estimate, nq.horizon, nq.horizon,
                           tail_bound=nq.tail_bound, r=r, diagnostics=diag)
