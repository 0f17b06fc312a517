"""Jets (target derivative sequences), the seminorms ``|a|_{M,h}`` and the convolution ring."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .reports import scan_sup
from .weights import DEFAULT_HORIZON, WeightSequence, make_sequence

FLAVORS = ("roumieu", "beurling")


@dataclass(frozen=True)
class JetEnvelope:
    """``|a_p| <= C h^p M_p`` for every p past the explicit coefficients.

    ``M`` is a sequence spec; ``None`` means "the sequence the jet is
    measured against".
    """

    C: float
    h: float
    M: str | None = None


@dataclass(frozen=True)
class JetSpec:
    coeffs: np.ndarray
    r: int = 1
    flavor: str = "roumieu"
    envelope: JetEnvelope | None = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        object.__setattr__(self, "coeffs", c)
        if self.flavor not in FLAVORS:
            raise ValueError(f"flavor must be one of {FLAVORS}")
        if int(self.r) != self.r or self.r < 1:
            raise ValueError("r must be a positive integer")

    @property
    def order(self) -> int:
        """Index of the last explicit coefficient."""
        return self.coeffs.size - 1

    @classmethod
    def unit(cls, p: int, length: int | None = None, **kw) -> "JetSpec":
        c = np.zeros(max(p + 1, length or 0), dtype=complex)
        c[p] = 1.0
        return cls(c, **kw)

    def to_json(self) -> dict:
        env = None
        if self.envelope is not None:
            env = {"C": self.envelope.C, "h": self.envelope.h}
            if self.envelope.M is not None:
                env["M"] = self.envelope.M
        return {"r": int(self.r), "coeffs": [[float(z.real), float(z.imag)] for z in self.coeffs],
                "envelope": env, "flavor": self.flavor}

    @classmethod
    def from_json(cls, obj: dict) -> "JetSpec":
        try:
            coeffs = np.array([complex(re, im) for re, im in obj["coeffs"]], dtype=complex)
        except (KeyError, TypeError, ValueError) as e:
            raise ValueError(f"malformed jet: {e}") from None
        env = obj.get("envelope")
        if env is not None:
            env = JetEnvelope(float(env["C"]), float(env["h"]), env.get("M"))
        return cls(coeffs, int(obj.get("r", 1)), obj.get("flavor", "roumieu"), env)

    @classmethod
    def load(cls, path: str | Path) -> "JetSpec":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass
class SeminormValue:
    value: float
    finite: bool
    witness_p: int
    diagnostics: dict = field(default_factory=dict)


def _log_abs(c: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(c))


def _envelope_exponent(a: JetSpec, M: WeightSequence, h: float, horizon: int):
    """``log(C h_e^p M^e_p / (h^p M_p))`` for p past the explicit part."""
    env = a.envelope
    Me = M if env.M is None else make_sequence(env.M)
    P0 = a.order + 1
    n = min(M.available(horizon), Me.available(horizon))
    p = np.arange(P0, n + 1)
    e = (math.log(env.C) + p * math.log(env.h / h) + Me.log_values(n)[P0:] - M.log_values(n)[P0:])
    return p, e, Me is M


def seminorm(a: JetSpec, M: WeightSequence, h: float, horizon: int = DEFAULT_HORIZON) -> SeminormValue:
    """``|a|_{M,h} = sup_p |a_p| / (h^p M_p)``."""
    if not h > 0:
        raise ValueError("h must be > 0")
    P = a.order
    logs = _log_abs(a.coeffs) - np.arange(P + 1) * math.log(h) - M.log_values(P)
    k = int(np.argmax(logs))
    best, wp = float(logs[k]), k
    diag = {}
    finite = True
    if a.envelope is not None:
        p, e, same = _envelope_exponent(a, M, h, horizon)
        if same:
            # exponent is linear in p: decreasing iff h_e <= h
            if a.envelope.h > h:
                finite = False
            elif e.size:
                j = int(np.argmax(e))
                if e[j] > best:
                    best, wp = float(e[j]), int(p[j])
        elif e.size:
            sc = scan_sup(e)
            diag["envelope_rule"] = sc.rule
            if not sc.stabilized:
                finite = False
            elif sc.sup > best:
                best, wp = sc.sup, int(p[sc.witness])
    if not finite:
        return SeminormValue(math.inf, False, wp, diag)
    return SeminormValue(math.exp(best) if best > -math.inf else 0.0, True, wp, diag)


def convolve(a: JetSpec, b: JetSpec, order: int | None = None) -> JetSpec:
    """Cauchy product ``(a * b)_n = sum_k a_k b_{n-k}`` up to ``order``.

    The default order is the longer explicit part.  Jets without an envelope
    are exactly zero past their last entry, so for two such jets the order
    may go up to ``Pa + Pb`` (the full product).  With an envelope present the
    coefficients past the explicit part are unknown and the order is capped
    at ``max(Pa, Pb)``.
    """
    Pa, Pb = a.order, b.order
    exact = a.envelope is None and b.envelope is None
    cap = Pa + Pb if exact else max(Pa, Pb)
    if order is None:
        order = max(Pa, Pb)
    if order < 0 or order > cap:
        raise ValueError(f"order {order} outside the explicit range 0..{cap}")
    ca = np.zeros(order + 1, dtype=complex)
    cb = np.zeros(order + 1, dtype=complex)
    ca[: min(order, Pa) + 1] = a.coeffs[: order + 1]
    cb[: min(order, Pb) + 1] = b.coeffs[: order + 1]
    out = np.convolve(ca, cb)[: order + 1]
    flavor = "roumieu" if "roumieu" in (a.flavor, b.flavor) else "beurling"
    return JetSpec(out, a.r, flavor)


@dataclass
class Classification:
    kind: str  # "roumieu", "beurling_consistent", "outside_at_horizon"
    h_star: float | None
    seminorms: dict


def classify(a: JetSpec, M: WeightSequence, h_grid=(1.0, 2.0, 4.0),
             horizon: int = DEFAULT_HORIZON) -> Classification:
    """Beurling if finite for every grid h and the envelope allows every h; else the Roumieu h*."""
    hs = sorted(float(h) for h in h_grid)
    vals = {h: seminorm(a, M, h, horizon) for h in hs}
    finite = [h for h in hs if vals[h].finite]
    every_h = True
    if a.envelope is not None:
        # every h > 0 works iff the exponent with h -> 0 still tends to -infinity,
        # i.e. log(M^e_p / M_p) drops faster than any linear function of p
        env = a.envelope
        Me = M if env.M is None else make_sequence(env.M)
        if Me is M:
            every_h = False
        else:
            n = min(M.available(horizon), Me.available(horizon))
            p = np.arange(1, n + 1)
            d = (Me.log_values(n)[1:] - M.log_values(n)[1:]) / p
            # -d growing without a settled sup means d -> -infinity
            every_h = bool(not scan_sup(-d).stabilized and d[-1] < d[(3 * n) // 4])
    sem = {h: (v.value if v.finite else math.inf) for h, v in vals.items()}
    if finite and len(finite) == len(hs) and every_h:
        return Classification("beurling_consistent", None, sem)
    if finite:
        return Classification("roumieu", finite[0], sem)
    return Classification("outside_at_horizon", None, sem)


@dataclass
class RingCheck:
    ok: bool
    lhs: float
    rhs: float
    violations: list


def ring_inequality(a: JetSpec, b: JetSpec, M: WeightSequence, h: float) -> RingCheck:
    """``|a * b|_{M,2h} <= |a|_{M,h} |b|_{M,h}``; violating indices are listed."""
    prod = convolve(a, b, a.order + b.order)
    lhs = seminorm(prod, M, 2 * h).value
    na, nb = seminorm(a, M, h).value, seminorm(b, M, h).value
    rhs = na * nb
    n = prod.order
    logs = _log_abs(prod.coeffs) - np.arange(n + 1) * math.log(2 * h) - M.log_values(n)
    with np.errstate(divide="ignore"):
        lim = math.log(rhs) if rhs > 0 else -math.inf
    bad = [int(i) for i in np.flatnonzero(logs > lim + 1e-12 * max(1.0, abs(lim)))]
    return RingCheck(not bad, lhs, rhs, bad)
