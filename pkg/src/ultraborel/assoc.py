"""Associated function ``omega_M``, counting function ``Sigma_M`` and the mixed integral condition.

For log-convex ``M`` the sup in ``omega_M(t) = sup_p (p log t - log M_p)`` is
attained at ``p = Sigma_M(t)``, and ``omega_M`` is piecewise linear in
``log t`` with breakpoints at the quotients.  Everything below exploits that
structure, so no quadrature tolerance enters the identities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .reports import ConditionReport, Verdict
from .weights import WeightSequence, is_log_convex, power

HORIZON_CAP = 1 << 22


@dataclass(frozen=True)
class AssocEval:
    t: float
    omega: float
    argmax_p: int
    sigma: int


def _is_lc(M: WeightSequence, n: int) -> bool:
    return M.log_convex or is_log_convex(M, max(n, 2)).holds


def _grow_until(M: WeightSequence, log_t: float, cap: int = HORIZON_CAP) -> int:
    """Smallest materialized horizon ``n`` with ``log mu_n > log_t``."""
    n = 1024
    while True:
        n_eff = M.available(n)
        q = M.log_quotients(n_eff)
        if q[-1] > log_t:
            return n_eff
        if n_eff < n:
            raise ValueError(f"{M.label}: horizon exhausted, t = {math.exp(log_t):.6g} "
                             f"exceeds mu at the last index {n_eff}")
        env = M.tail_envelope
        if env is not None and env.alpha <= 0 and env.beta <= 0:
            raise ValueError(f"{M.label}: (M_p)^(1/p) stays bounded, omega infinite for large t")
        if n >= cap:
            raise ValueError(f"{M.label}: needs more than {cap} terms for t = {math.exp(log_t):.6g}")
        n = min(4 * n, cap)


def sigma(M: WeightSequence, t: float, horizon: int | None = None) -> int:
    """``#{p >= 1 : mu_p <= t}``."""
    if not t > 0:
        raise ValueError("t must be > 0")
    lt = math.log(t)
    n = _grow_until(M, lt) if horizon is None else M.available(horizon)
    q = M.log_quotients(n)[1:]
    if horizon is not None and q[-1] <= lt:
        raise ValueError(f"{M.label}: horizon exhausted at t = {t:g}")
    return int(np.searchsorted(q, lt, side="right"))


def omega(M: WeightSequence, t: float, horizon: int | None = None) -> AssocEval:
    """``omega_M(t)`` with its maximizing index."""
    if not t > 0:
        raise ValueError("t must be > 0")
    lt = math.log(t)
    n = _grow_until(M, lt) if horizon is None else M.available(horizon)
    v = M.log_values(n)
    if _is_lc(M, n):
        k = int(np.searchsorted(M.log_quotients(n)[1:], lt, side="right"))
        return AssocEval(t, max(0.0, k * lt - float(v[k])), k, k)
    vals = np.arange(n + 1) * lt - v
    k = int(np.argmax(vals))
    sg = int(np.count_nonzero(M.log_quotients(n)[1:] <= lt))
    return AssocEval(t, float(vals[k]), k, sg)


def omega_many(M: WeightSequence, ts) -> np.ndarray:
    """Vectorized ``omega_M`` over an array of t (log-convex ``M``)."""
    ts = np.asarray(ts, dtype=float)
    lt = np.log(ts)
    n = _grow_until(M, float(lt.max()))
    if not _is_lc(M, n):
        return np.array([omega(M, float(t)).omega for t in ts])
    k = np.searchsorted(M.log_quotients(n)[1:], lt, side="right")
    return np.maximum(0.0, k * lt - M.log_values(n)[k])


def omega_brute(M: WeightSequence, t: float, n: int) -> tuple[float, int]:
    """Direct ``max_{p<=n} (p log t - log M_p)``; the independent oracle."""
    vals = np.arange(n + 1) * math.log(t) - M.log_values(n)
    k = int(np.argmax(vals))
    return float(vals[k]), k


def integral_identity_check(M: WeightSequence, t: float) -> tuple[float, float, float]:
    """``omega_M(t)`` directly against ``int_0^t Sigma_M(u) du/u`` summed over breakpoints."""
    lt = math.log(t)
    n = _grow_until(M, lt)
    q = M.log_quotients(n)[1:]
    K = int(np.searchsorted(q, lt, side="right"))
    direct, _ = omega_brute(M, t, min(n, 2 * K + 16))
    if K == 0:
        return direct, 0.0, abs(direct)
    right = np.append(q[1:K], lt)  # Sigma = k on [mu_k, mu_{k+1})
    counts = np.arange(1, K + 1)
    integral = math.fsum(counts * (right - q[:K]))
    return direct, integral, abs(direct - integral)


def power_law_check(M: WeightSequence, t: float, s: float) -> tuple[float, float]:
    """``omega_M(t^s)`` and ``s omega_{M^{1/s}}(t)``."""
    if not (t > 0 and s > 0):
        raise ValueError("t and s must be > 0")
    lhs = omega(M, t**s).omega
    rhs = s * omega(power(M, 1.0 / s), t).omega
    return lhs, rhs


# ---------------------------------------------------------------- integral condition

def _F(y, K, a, w):
    # antiderivative of (K y - a) e^{-w y}
    e = np.exp(-w * y)
    return -e * ((K * y - a) / w + K / (w * w))


def _truncated_integrals(N: WeightSequence, lts: np.ndarray, V: np.ndarray, w: float, n: int):
    """``int_{lt}^{lt+V} omega_N(e^y) e^{-w y} dy`` for each entry, exactly."""
    q = np.asarray(N.log_quotients(n)[1:])
    logN = np.asarray(N.log_values(n))
    # piece k lives on [q_k, q_{k+1}) with omega = k y - log N_k (k >= 1)
    ks = np.arange(1, n)
    lo, hi = q[:-1], q[1:]
    pieces = _F(hi, ks, logN[1:n], w) - _F(lo, ks, logN[1:n], w)
    cum = np.concatenate([[0.0], np.cumsum(pieces)])  # cum[k-1] = integral up to q_k

    def G(y):
        # integral from q_1 to y, y < q_n
        k = np.searchsorted(q, y, side="right")  # omega piece index at y
        out = np.zeros_like(y)
        pos = k >= 1
        kk = k[pos]
        out[pos] = cum[kk - 1] + _F(y[pos], kk, logN[kk], w) - _F(q[kk - 1], kk, logN[kk], w)
        return out

    return G(lts + V) - G(lts)


def _omega_upper_coeffs(env, n0_extra: int = 0):
    """Coefficients of an upper bound for ``omega_N`` on ``x >= 1``.

    Returns ``(A1, A2, Kp, ap)`` with ``omega_N(x) <= A1 log x + A2 log^2 x + Kp x^ap``.
    """
    n0 = max(0, env.onset - 1) + n0_extra
    if env.beta > 0:
        return n0 + max(0.0, -env.c_lo) / env.beta, 1.0 / (2.0 * env.beta), 0.0, 0.0
    if env.alpha > 0:
        K = math.exp(-env.c_lo / env.alpha)
        return float(n0), 0.0, env.alpha * K, 1.0 / env.alpha
    return None


def _tail_bound(env, lt: float, V: float, w: float) -> float | None:
    """Bound on ``int_{U}^inf omega_N(t u) u^{-1-w} du`` with ``U = e^V``."""
    co = _omega_upper_coeffs(env)
    if co is None:
        return None
    A1, A2, Kp, ap = co
    if Kp > 0 and ap >= w:
        return math.inf
    # polynomial part in v = log u: (c0 + c1 v + c2 v^2) e^{-w v} from V to inf
    c0 = A1 * lt + A2 * lt * lt
    c1 = A1 + 2 * A2 * lt
    c2 = A2
    e = math.exp(-w * V)
    poly = e * ((c0 + c1 * V + c2 * V * V) / w + (c1 + 2 * c2 * V) / w**2 + 2 * c2 / w**3)
    powr = 0.0
    if Kp > 0:
        a = ap - w
        powr = Kp * math.exp(ap * lt) * math.exp(a * V) / (-a)
    return poly + powr


@dataclass
class IntegralConditionReport:
    report: ConditionReport
    t: np.ndarray
    integral: np.ndarray
    tail: np.ndarray
    omega_M: np.ndarray
    C_hat: np.ndarray
    u_max: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def check_integral_condition(M: WeightSequence, N: WeightSequence, r: float,
                             t_grid=None, u_max: float = 1e6,
                             horizon_cap: int = 1 << 21) -> IntegralConditionReport:
    """``int_1^inf omega_N(t u) u^{-1-1/r} du <= C omega_M(t) + C`` over a t grid.

    The truncated integral up to ``u_max`` is exact (piecewise closed form in
    ``log u``); the rest is bounded from ``N``'s envelope.  ``C_hat(t)`` is the
    ratio to ``1 + omega_M(t)``; the condition holds when its running max
    grows by at most 10% across the top decade of the grid.
    """
    if not r > 0:
        raise ValueError("r must be > 0")
    w = 1.0 / r
    t = np.geomspace(10.0, 1e6, 25) if t_grid is None else np.asarray(t_grid, dtype=float)
    lts = np.log(t)
    n = N.available(horizon_cap)
    qN = N.log_quotients(n)
    y_max = float(qN[-1])
    V = np.minimum(math.log(u_max), y_max - lts)
    if np.any(V <= 0):
        raise ValueError("t grid reaches past the materialized horizon of N")
    I = t**w * _truncated_integrals(N, lts, V, w, n)
    env = N.tail_envelope
    diag = {"u_max_requested": u_max, "horizon": n, "rule": "top-decade growth <= 10%"}
    if env is None:
        tails = np.full(t.size, np.nan)
    else:
        tails = np.array([_tail_bound(env, float(a), float(b), w) for a, b in zip(lts, V)])
    om = omega_many(M, t)
    total = I + np.where(np.isnan(tails), 0.0, tails)
    C = total / (1.0 + om)
    top = t >= t.max() / 10.0
    run = np.maximum.accumulate(C)
    before = run[~top][-1] if np.any(~top) else run[0]
    growth = float(run[-1] / before - 1.0) if 0 < before < math.inf and math.isfinite(run[-1]) else math.inf
    diag["top_decade_growth"] = growth
    idx = int(np.argmax(C)) if np.all(np.isfinite(C)) else int(np.argmax(~np.isfinite(C)))
    if env is None or np.any(np.isnan(tails)):
        verdict = Verdict.UNDETERMINED
        diag["reason"] = "no envelope for the u-tail; values are truncated integrals"
    elif np.any(np.isinf(tails)):
        verdict = Verdict.FAILS
        diag["certificate"] = (f"omega_N(x) >= c x^(1/{env.alpha:g}) with 1/{env.alpha:g} >= 1/r: "
                               "integral diverges for every t")
    elif growth <= 0.1:
        verdict = Verdict.HOLDS
    else:
        verdict = Verdict.FAILS
        diag["certificate"] = f"C_hat grew by {growth:.3g} over the top decade"
    sup = float(np.max(C)) if np.all(np.isfinite(C)) else math.inf
    rep = ConditionReport("integral", verdict, sup, idx, n,
                          tail_bound=None if env is None else float(np.nanmax(tails)),
                          r=r, diagnostics=diag)
    return IntegralConditionReport(rep, t, I, tails, om, C, np.exp(V), diag)
