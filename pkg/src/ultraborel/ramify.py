"""The r-interpolating sequence and its transfer lemmas as executable oracles."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .reports import ConditionReport, Verdict
from .weights import (DEFAULT_HORIZON, Envelope, WeightSequence, check_mg,
                      register_combinator)


def _interp_envelope(env: Envelope, r: int) -> Envelope:
    # log pi_l = log mu_k / r with k = ceil(l/r), and l/r <= k <= (l + r - 1)/r
    a, b = env.alpha, env.beta
    base = -a * math.log(r)
    spread = a * math.log(1.0 + r) + b * (r - 1) / r
    lo = (env.c_lo + base + min(0.0, spread)) / r
    hi = (env.c_hi + base + max(0.0, spread)) / r
    exact = env.exact and b == 0
    c = (env.c + base) / r
    return Envelope(a / r, b / r**2, c, min(lo, c), max(hi, c), r * (env.onset - 1) + 1, exact)


def interpolate(M: WeightSequence, r: int) -> WeightSequence:
    """``P^{M,r}``: ``log P_{rk+j} = ((r-j) log M_k + j log M_{k+1}) / r``."""
    if int(r) != r or r < 1:
        raise ValueError("r must be an integer >= 1")
    r = int(r)
    if r == 1:
        return M

    def logs(n):
        kmax = -(-n // r)
        v = M.log_values(kmax)
        ell = np.arange(n + 1)
        k, j = ell // r, ell % r
        out = ((r - j) * v[k] + j * v[np.minimum(k + 1, kmax)]) / r
        at_nodes = j == 0
        out[at_nodes] = v[k[at_nodes]]
        return out

    def quots(n):
        kmax = -(-n // r)
        q = M.log_quotients(kmax)
        ell = np.arange(n + 1)
        out = q[-(-ell // r)] / r
        out[0] = 0.0
        return out

    env = None if M.tail_envelope is None else _interp_envelope(M.tail_envelope, r)
    limit = None if M.limit is None else r * M.limit
    return WeightSequence(logs, quot_gen=quots, label=f"interp({M.label},r={r})", limit=limit,
                          envelope=env, log_convex=M.log_convex, meta={"base": M.label, "r": r})


register_combinator("interp", interpolate, ("kw:r",))


def nq_partial_sum_identity(M: WeightSequence, r: int, K: int) -> tuple[float, float]:
    """``sum_{l<=rK} 1/pi_l`` against ``r sum_{k<=K} mu_k^{-1/r}``.

    The left side uses quotients recomputed from the interpolated log values,
    not the closed form, so the comparison is not circular.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    P = interpolate(M, r)
    pi = np.diff(P.log_values(r * K))
    lhs = math.fsum(np.exp(-pi))
    rhs = r * math.fsum(np.exp(-M.log_quotients(K)[1:] / r))
    return lhs, rhs


@dataclass
class TransferResult:
    which: str
    base: ConditionReport
    interpolated: ConditionReport
    bounds: dict = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        return self.base.verdict is self.interpolated.verdict

    @property
    def bounds_ok(self) -> bool:
        return all(b["ok"] for b in self.bounds.values())


def transfer_check(M: WeightSequence, N: WeightSequence | None = None, r: int = 2,
                   which: str = "nq", horizon: int = DEFAULT_HORIZON) -> TransferResult:
    """Run a condition on ``(M, N, r)`` and its r = 1 form on the interpolants."""
    from .conditions import check_gamma_r, nq_sum

    r = int(r)
    PM = interpolate(M, r)
    H = M.available(horizon)
    if which == "nq":
        base = nq_sum(M, r, H).to_report("nq_r")
        interp = nq_sum(PM, 1, r * H).to_report("nq")
        return TransferResult(which, base, interp)
    if which == "mg":
        base = check_mg(M, H)
        interp = check_mg(PM, r * H)
        tol = 1e-10 * max(1.0, abs(base.sup_value))
        bounds = {
            "interp_le_base_over_r": {"lhs": interp.sup_value, "rhs": base.sup_value / r,
                                      "ok": interp.sup_value <= base.sup_value / r + tol},
            "base_le_r_interp": {"lhs": base.sup_value, "rhs": r * interp.sup_value,
                                 "ok": base.sup_value <= r * interp.sup_value + tol},
        }
        return TransferResult(which, base, interp, bounds)
    if which == "gamma":
        N = M if N is None else N
        PN = interpolate(N, r) if N is not M else PM
        H = min(H, N.available(horizon))
        base = check_gamma_r(M, N, r, H)
        interp = check_gamma_r(PM, PN, 1, r * H)
        bounds = {}
        if base.verdict is not Verdict.FAILS and interp.verdict is not Verdict.FAILS:
            b, i = base.sup_value, interp.sup_value
            bounds = {
                "interp_le_1plusr_base": {"lhs": i, "rhs": (1 + r) * b, "ok": i <= (1 + r) * b + 1e-6},
                "base_le_r_interp": {"lhs": b, "rhs": r * i, "ok": b <= r * i + 1e-6},
            }
        return TransferResult(which, base, interp, bounds)
    raise ValueError(f"unknown transfer {which!r}")
