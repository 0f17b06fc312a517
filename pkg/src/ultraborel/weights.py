"""Log-domain weight sequences, their combinators and the basic regularity checks.

A weight sequence ``M = (M_p)`` is stored through ``log M_p``; quotients
``mu_p = M_p / M_{p-1}`` through ``log mu_p``.  Built-in families are
generated on demand, so sequences are conceptually infinite and materialized
up to whatever index a check asks for.
"""
from __future__ import annotations

import csv
import math
import re
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

from .reports import ConditionReport, Verdict, scan_sup

DEFAULT_HORIZON = 10_000
HULL_HORIZON = 4096


class SequenceRangeError(IndexError):
    """Raised when a finite (tabulated) sequence is asked beyond its last index."""


class SpecParseError(ValueError):
    def __init__(self, msg: str, text: str, pos: int):
        super().__init__(f"{msg} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


@dataclass(frozen=True)
class Envelope:
    """Eventual behaviour ``log mu_p = alpha log p + beta p + c + o(1)``.

    ``c_lo <= log mu_p - alpha log p - beta p <= c_hi`` is assumed for every
    ``p >= onset``; these are the bounds the rigorous tail estimates use.
    ``c`` is the limit of the middle expression when ``exact`` is true.
    """

    alpha: float
    beta: float
    c: float
    c_lo: float
    c_hi: float
    onset: int = 1
    exact: bool = True

    @classmethod
    def simple(cls, alpha, beta=0.0, c=0.0, onset=1):
        return cls(float(alpha), float(beta), float(c), float(c), float(c), int(onset), True)

    def scaled(self, e: float) -> "Envelope":
        lo, hi = sorted((e * self.c_lo, e * self.c_hi))
        return Envelope(e * self.alpha, e * self.beta, e * self.c, lo, hi, self.onset, self.exact)

    def shifted(self) -> "Envelope":
        a, b = self.alpha, self.beta
        lo = self.c_lo + b + min(0.0, a * math.log(2.0))
        hi = self.c_hi + b + max(0.0, a * math.log(2.0))
        return Envelope(a, b, self.c + b, lo, hi, max(1, self.onset - 1), self.exact)

    def nq_converges(self, r: float) -> bool:
        return self.beta > 0 or self.alpha > r

    def inverse_root_tail(self, r: float, P: int) -> float | None:
        """Upper bound for ``sum_{k>P} mu_k^{-1/r}``; ``None`` if unavailable."""
        if P < max(1, self.onset - 1):
            return None
        a, b = self.alpha / r, self.beta / r
        pref = math.exp(-self.c_lo / r)
        if b > 0:
            if a < 0:
                return None
            return pref * (P + 1) ** (-a) * math.exp(-b * (P + 1)) / (-math.expm1(-b))
        if a > 1:
            return pref * P ** (1.0 - a) / (a - 1.0)
        return None


class WeightSequence:
    """A normalized weight sequence held in the log domain.

    Parameters
    ----------
    log_gen : callable
        ``log_gen(n)`` returns ``log M_0..log M_n`` as an array.
    label : str
        Canonical spec string; ``make_sequence(label)`` rebuilds the sequence
        for families and combinators.
    quot_gen : callable, optional
        ``quot_gen(n)`` returns ``log mu_0..log mu_n`` with entry 0 equal to 0.
        Supplied by families with a closed form, which avoids cancellation
        in ``log M_p - log M_{p-1}`` at large p.
    limit : int, optional
        Last available index for finite tables.
    envelope : Envelope, optional
    log_convex : bool
        Declared log-convexity (families, hulls).
    """

    def __init__(self, log_gen: Callable[[int], np.ndarray], *, label: str,
                 quot_gen: Callable[[int], np.ndarray] | None = None,
                 limit: int | None = None, envelope: Envelope | None = None,
                 log_convex: bool = False, meta: dict | None = None):
        self._log_gen = log_gen
        self._quot_gen = quot_gen
        self.label = label
        self.limit = limit
        self.tail_envelope = envelope
        self.log_convex = log_convex
        self.meta = dict(meta or {})
        self._lock = threading.Lock()
        self._logM = np.zeros(0)
        self._logmu = np.zeros(0)

    def __repr__(self):
        return f"WeightSequence({self.label!r})"

    @property
    def envelope(self) -> Envelope | None:
        return self.tail_envelope

    def available(self, n: int) -> int:
        return int(n) if self.limit is None else min(int(n), self.limit)

    def _ensure(self, n: int):
        if n < self._logM.size:
            return
        if self.limit is not None and n > self.limit:
            raise SequenceRangeError(
                f"{self.label}: index {n} requested, table ends at {self.limit}")
        with self._lock:
            if n < self._logM.size:
                return
            m = max(n, 2 * self._logM.size, 64)
            if self.limit is not None:
                m = min(m, self.limit)
            logM = np.asarray(self._log_gen(m), dtype=float)
            if logM[0] != 0.0:
                logM = logM - logM[0]
            logM[0] = 0.0
            if self._quot_gen is not None:
                logmu = np.asarray(self._quot_gen(m), dtype=float).copy()
            else:
                logmu = np.concatenate([[0.0], np.diff(logM)])
            logmu[0] = 0.0
            if not (np.all(np.isfinite(logM)) and np.all(np.isfinite(logmu))):
                raise ValueError(f"{self.label}: non-finite log value below index {m}")
            logM.flags.writeable = False
            logmu.flags.writeable = False
            self._logmu = logmu
            self._logM = logM

    def log_values(self, n: int) -> np.ndarray:
        """``log M_0 .. log M_n`` (read-only)."""
        self._ensure(n)
        return self._logM[: n + 1]

    def log_quotients(self, n: int) -> np.ndarray:
        """``log mu_0 .. log mu_n`` with ``log mu_0 = 0`` (read-only)."""
        self._ensure(n)
        return self._logmu[: n + 1]

    @property
    def normalized(self) -> bool:
        return self.log_values(1)[1] >= 0.0

    def log_m(self, n: int) -> np.ndarray:
        """``log m_p = log M_p - log p!`` for p = 0..n."""
        return self.log_values(n) - gammaln(np.arange(n + 1) + 1.0)


# ---------------------------------------------------------------- families

def gevrey(s: float) -> WeightSequence:
    s = float(s)
    if s < 0:
        raise ValueError("gevrey exponent must be >= 0")

    def logs(n):
        return s * gammaln(np.arange(n + 1) + 1.0)

    def quots(n):
        q = np.zeros(n + 1)
        q[1:] = s * np.log(np.arange(1, n + 1))
        return q

    return WeightSequence(logs, quot_gen=quots, label=f"gevrey:s={s:g}",
                          envelope=Envelope.simple(s), log_convex=True)


def qgevrey(q: float) -> WeightSequence:
    q = float(q)
    if q <= 1:
        raise ValueError("qgevrey needs q > 1")
    lq = math.log(q)

    def logs(n):
        p = np.arange(n + 1, dtype=float)
        return p * p * lq

    def quots(n):
        out = (2.0 * np.arange(n + 1) - 1.0) * lq
        out[0] = 0.0
        return out

    return WeightSequence(logs, quot_gen=quots, label=f"qgevrey:q={q:g}",
                          envelope=Envelope.simple(0.0, 2 * lq, -lq), log_convex=True)


def from_log_values(log_values, *, label="table", envelope: Envelope | None = None) -> WeightSequence:
    """Tabulated sequence; normalized by subtracting ``log M_0``.

    Without an envelope the table is finite.  With one, indices past the
    table are generated from ``alpha log p + beta p + c``.
    """
    v = np.asarray(log_values, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise ValueError("a table needs at least M_0 and M_1")
    if not np.all(np.isfinite(v)):
        bad = int(np.flatnonzero(~np.isfinite(v))[0])
        raise ValueError(f"non-finite log M at p={bad}")
    v = v - v[0]
    T = v.size - 1
    if envelope is None:
        return WeightSequence(lambda n: v[: n + 1].copy(), label=label, limit=T)
    env = envelope
    if env.onset <= T:
        # widen the declared bounds to cover table entries inside the envelope range
        p = np.arange(env.onset, T + 1)
        resid = np.diff(v)[env.onset - 1:] - env.alpha * np.log(p) - env.beta * p
        env = replace(env, c_lo=min(env.c_lo, float(resid.min())), c_hi=max(env.c_hi, float(resid.max())))
    else:
        env = replace(env, onset=T + 1)

    def logs(n):
        if n <= T:
            return v[: n + 1].copy()
        p = np.arange(T + 1, n + 1, dtype=float)
        ext = env_tail_logmu(envelope, p)
        return np.concatenate([v, v[-1] + np.cumsum(ext)])

    return WeightSequence(logs, label=label, envelope=env)


def env_tail_logmu(env: Envelope, p: np.ndarray) -> np.ndarray:
    return env.alpha * np.log(p) + env.beta * p + env.c


def from_values(values, *, label="table", envelope: Envelope | None = None) -> WeightSequence:
    """Tabulated sequence from raw ``M_p`` values (all must be positive)."""
    v = np.asarray(values, dtype=float)
    bad = np.flatnonzero(~(v > 0))
    if bad.size:
        raise ValueError(f"non-positive table entry M_{int(bad[0])} = {float(v[bad[0]]):g}")
    return from_log_values(np.log(v), label=label, envelope=envelope)


_ENV_LINE = re.compile(r"#\s*envelope\s*:?(.*)", re.IGNORECASE)


def read_table(path: str | Path) -> WeightSequence:
    """Read a CSV table with header ``p,logM`` (or ``p,M`` for raw values).

    A comment line ``# envelope: alpha=2, beta=0, c=0, onset=10`` declares a
    tail envelope and lets the sequence extend past the table.
    """
    path = Path(path)
    env_kw = {}
    rows = []
    with open(path, newline="") as fh:
        data_lines = []
        for line in fh:
            s = line.strip()
            if not s:
                continue
            m = _ENV_LINE.match(s)
            if m:
                for part in re.split(r"[,\s]+", m.group(1).strip()):
                    if part:
                        k, _, val = part.partition("=")
                        env_kw[k.strip()] = float(val)
                continue
            if s.startswith("#"):
                continue
            data_lines.append(s)
    reader = csv.reader(data_lines)
    header = [h.strip() for h in next(reader, [])]
    if len(header) != 2 or header[0] != "p" or header[1] not in ("logM", "M"):
        raise ValueError(f"{path}: expected header 'p,logM' or 'p,M', got {','.join(header)!r}")
    for lineno, row in enumerate(reader, start=2):
        try:
            rows.append((int(row[0]), float(row[1])))
        except (ValueError, IndexError):
            raise ValueError(f"{path}:{lineno}: malformed row {row!r}") from None
    idx = [p for p, _ in rows]
    if idx != list(range(len(rows))):
        raise ValueError(f"{path}: indices must be contiguous from 0")
    vals = [x for _, x in rows]
    env = None
    if env_kw:
        env = Envelope.simple(env_kw.get("alpha", 0.0), env_kw.get("beta", 0.0),
                              env_kw.get("c", 0.0), int(env_kw.get("onset", 1)))
    label = f"table:{path}"
    if header[1] == "M":
        return from_values(vals, label=label, envelope=env)
    return from_log_values(vals, label=label, envelope=env)


# ---------------------------------------------------------------- combinators

def power(M: WeightSequence, exponent: float) -> WeightSequence:
    """``M^e``: all log values scaled by ``e``."""
    e = float(exponent)
    if not e > 0:
        raise ValueError("exponent must be > 0")
    if e == 1.0:
        return M
    env = None if M.tail_envelope is None else M.tail_envelope.scaled(e)
    return WeightSequence(lambda n: e * M.log_values(n), quot_gen=lambda n: e * M.log_quotients(n),
                          label=f"pow({M.label},{e:g})", limit=M.limit, envelope=env,
                          log_convex=M.log_convex)


def shift(M: WeightSequence) -> WeightSequence:
    """``N_p = M_{p+1} / M_1``."""
    def logs(n):
        v = M.log_values(n + 1)
        return v[1:] - v[1]

    def quots(n):
        q = M.log_quotients(n + 1)
        out = q[1:].copy()
        out[0] = 0.0
        return out

    env = None if M.tail_envelope is None else M.tail_envelope.shifted()
    limit = None if M.limit is None else M.limit - 1
    return WeightSequence(logs, quot_gen=quots, label=f"shift({M.label})", limit=limit,
                          envelope=env, log_convex=M.log_convex,
                          meta={"renormalized_by_log_M1": float(M.log_values(1)[1])})


def _lower_hull(y: np.ndarray) -> np.ndarray:
    """Values of the lower convex hull of ``(p, y_p)``, p = 0..n (monotone chain)."""
    n = y.size
    hull = []
    for i in range(n):
        while len(hull) >= 2:
            j, k = hull[-2], hull[-1]
            # drop k if it lies on or above the chord j -> i
            if (y[k] - y[j]) * (i - j) >= (y[i] - y[j]) * (k - j):
                hull.pop()
            else:
                break
        hull.append(i)
    h = np.asarray(hull)
    return np.interp(np.arange(n), h, y[h])


def lc_minorant(M: WeightSequence, horizon: int | None = None) -> WeightSequence:
    """Log-convex minorant: lower convex hull of ``(p, log M_p)``.

    Sequences already declared log-convex are returned unchanged.  The hull
    is taken over ``0..horizon``; when ``M`` carries an envelope with
    nondecreasing tail and its quotient past the horizon dominates the last
    hull slope, the result continues with ``M``'s own values and stays
    infinite.  Otherwise the result is finite.
    """
    if M.log_convex:
        return M
    n = M.available(HULL_HORIZON if horizon is None else horizon)
    y = M.log_values(n)
    hv = _lower_hull(np.asarray(y))
    hv[0] = 0.0
    hv.flags.writeable = False
    env = M.tail_envelope
    infinite = False
    if M.limit is None and env is not None and env.alpha >= 0 and env.beta >= 0 and n >= env.onset:
        last_slope = hv[-1] - hv[-2]
        q = M.log_quotients(2 * n)[n + 1:]
        infinite = bool(q[0] >= last_slope and np.all(np.diff(q) >= 0))
    label = f"lcmin({M.label})"
    meta = {"hull_horizon": n}
    if not infinite:
        return WeightSequence(lambda k: hv[: k + 1].copy(), label=label, limit=n,
                              log_convex=True, meta=meta)

    def logs(k):
        if k <= n:
            return hv[: k + 1].copy()
        return np.concatenate([hv, M.log_values(k)[n + 1:]])

    return WeightSequence(logs, label=label, envelope=env, log_convex=True, meta=meta)


def quotient(M: WeightSequence, p: int) -> float:
    """``log mu_p = log M_p - log M_{p-1}`` for ``p >= 1``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return float(M.log_quotients(p)[p])


# ---------------------------------------------------------------- checks

def _horizon(M: WeightSequence, horizon: int, minimum: int = 1) -> int:
    n = M.available(horizon)
    if n < minimum:
        raise ValueError(f"{M.label}: horizon {n} below the minimum {minimum}")
    return n


def is_log_convex(M: WeightSequence, horizon: int = DEFAULT_HORIZON) -> ConditionReport:
    """Scan ``log mu_{p-1} - log mu_p <= tol`` for p = 2..horizon."""
    if horizon < 2:
        raise ValueError("horizon must be >= 2")
    n = _horizon(M, horizon, 1)
    q = M.log_quotients(n)[1:]
    tol = 1e-12 * float(np.max(np.abs(q))) if q.size else 0.0
    if q.size < 2:
        return ConditionReport("lc", Verdict.HOLDS, -math.inf, 1, n)
    drop = q[:-1] - q[1:]  # drop[i] belongs to p = i + 2
    bad = np.flatnonzero(drop > tol)
    env = M.tail_envelope
    diag = {"tolerance": tol, "declared_log_convex": M.log_convex,
            "unconditional": bool(M.log_convex or (env is not None and env.alpha >= 0
                                                   and env.beta >= 0 and n >= env.onset))}
    if bad.size:
        diag["unconditional"] = False
        return ConditionReport("lc", Verdict.FAILS, float(drop.max()), int(bad[0]) + 2, n,
                               diagnostics=diag)
    return ConditionReport("lc", Verdict.HOLDS, float(drop.max()), int(np.argmax(drop)) + 2, n,
                           diagnostics=diag)


def _regularized(M: WeightSequence, horizon: int):
    if M.log_convex or is_log_convex(M, horizon).holds:
        return M, False
    return lc_minorant(M, horizon), True


def check_mg(M: WeightSequence, horizon: int = DEFAULT_HORIZON) -> ConditionReport:
    """Moderate growth via ``sup_p log(mu_{2p} / mu_p)``."""
    if horizon < 4:
        raise ValueError("check_mg needs horizon >= 4")
    M, regularized = _regularized(M, horizon)
    n = _horizon(M, horizon, 4)
    q = M.log_quotients(n)
    p = np.arange(1, n // 2 + 1)
    S = q[2 * p] - q[p]
    sc = scan_sup(S)
    env = M.tail_envelope
    diag = {"rule": sc.rule, "regularized": regularized, "window": "last quarter"}
    tail = None
    if env is not None and env.beta > 0:
        verdict = Verdict.FAILS
        diag["certificate"] = "envelope beta > 0: log(mu_2p/mu_p) >= beta*p + const"
    elif env is not None:
        tail = env.alpha * math.log(2.0) + env.c_hi - env.c_lo
        verdict = Verdict.HOLDS
    else:
        verdict = Verdict.HOLDS if sc.stabilized else Verdict.UNDETERMINED
    bound = max(sc.extrapolated, tail if tail is not None else -math.inf)
    diag["constant"] = math.exp(bound) if verdict is Verdict.HOLDS else None
    return ConditionReport("mg", verdict, sc.sup, int(p[sc.witness]), n, tail_bound=tail,
                           diagnostics=diag)


def check_dc(M: WeightSequence, horizon: int = DEFAULT_HORIZON) -> ConditionReport:
    """Derivation closedness via ``sup_p log(mu_{p+1}) / (p+1)``."""
    n = _horizon(M, horizon, 2)
    q = M.log_quotients(n)
    k = np.arange(1, n + 1)
    vals = q[1:] / k
    sc = scan_sup(vals)
    env = M.tail_envelope
    diag = {"rule": sc.rule, "window": "last quarter"}
    tail = None
    if env is not None:
        # (alpha log p + c_hi)/p + beta is eventually decreasing towards beta
        pp = np.arange(n + 1, 4 * n + 2, dtype=float)
        tail = env.beta + max(0.0, float(np.max((env.alpha * np.log(pp) + env.c_hi) / pp)))
        verdict = Verdict.HOLDS
        diag["constant"] = math.exp(max(sc.sup, env.beta))
    elif sc.stabilized:
        verdict = Verdict.HOLDS
        diag["constant"] = math.exp(sc.extrapolated)
    else:
        verdict = Verdict.UNDETERMINED
        diag["constant"] = None
    return ConditionReport("dc", verdict, sc.sup, int(k[sc.witness]) - 1, n, tail_bound=tail,
                           diagnostics=diag)


@dataclass
class ComparisonResult:
    """Outcome of comparing two weight sequences up to a horizon.

    ``preceq`` means ``M_p <= C2^p N_p`` (with ``C2 = sup_ratio``) looks
    bounded; ``succeq`` the reverse.  ``le_constant`` is the single constant
    ``C`` with ``M_p <= C N_p`` when that scan settles too.
    """

    relation: str
    preceq: bool
    succeq: bool
    sup_ratio: float
    witness_p: int
    reverse_sup_ratio: float
    reverse_witness_p: int
    le_constant: float | None
    horizon: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def equivalent(self) -> bool:
        return self.relation == "equivalent"


def _env_preceq(em: Envelope, en: Envelope) -> bool:
    # log M_p ~ alpha p log p + beta p^2 / 2
    if em.beta != en.beta:
        return em.beta < en.beta
    return em.alpha <= en.alpha


def compare(M: WeightSequence, N: WeightSequence, horizon: int = DEFAULT_HORIZON) -> ComparisonResult:
    n = min(M.available(horizon), N.available(horizon))
    if n < 1:
        raise ValueError("need at least index 1")
    d = M.log_values(n)[1:] - N.log_values(n)[1:]
    p = np.arange(1, n + 1)
    fwd = scan_sup(d / p)
    bwd = scan_sup(-d / p)
    le = scan_sup(d)
    em, en = M.tail_envelope, N.tail_envelope
    if em is not None and en is not None:
        pre, suc = _env_preceq(em, en), _env_preceq(en, em)
        how = "envelope"
    else:
        pre, suc = fwd.stabilized, bwd.stabilized
        how = "scan"
    if pre and suc:
        rel = "equivalent"
    elif pre:
        rel = "preceq"
    elif suc:
        rel = "succeq"
    else:
        rel = "incomparable_at_horizon"
    le_c = math.exp(max(0.0, le.sup)) if (pre and le.stabilized) else None
    return ComparisonResult(rel, pre, suc, math.exp(fwd.sup), int(p[fwd.witness]),
                            math.exp(bwd.sup), int(p[bwd.witness]), le_c, n,
                            {"decided_by": how, "forward_rule": fwd.rule, "backward_rule": bwd.rule})


# ---------------------------------------------------------------- spec grammar

_NUM = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[a-z]+")

# combinator name -> (builder, kinds of extra args); ramify registers interp
COMBINATORS: dict[str, tuple[Callable, tuple[str, ...]]] = {
    "shift": (shift, ()),
    "lcmin": (lambda M: lc_minorant(M), ()),
    "pow": (power, ("float",)),
}


def register_combinator(name: str, builder: Callable, args: tuple[str, ...]):
    COMBINATORS[name] = (builder, args)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise SpecParseError(msg, self.text, self.pos)

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def eat(self, s: str):
        self.ws()
        if not self.text.startswith(s, self.pos):
            self.error(f"expected {s!r}")
        self.pos += len(s)

    def number(self) -> float:
        self.ws()
        m = _NUM.match(self.text, self.pos)
        if not m:
            self.error("expected a number")
        self.pos = m.end()
        return float(m.group())

    def spec(self) -> WeightSequence:
        self.ws()
        t = self.text
        start = self.pos
        for prefix, build in (("gevrey:s=", gevrey), ("qgevrey:q=", qgevrey)):
            if t.startswith(prefix, start):
                self.pos += len(prefix)
                val = self.number()
                try:
                    return build(val)
                except ValueError as e:
                    self.pos = start
                    self.error(str(e))
        if t.startswith("table:", start):
            self.pos += len("table:")
            end = self.pos
            depth = 0
            while end < len(t):
                ch = t[end]
                if ch == "(":
                    depth += 1
                elif ch in "),":
                    if depth == 0:
                        break
                    if ch == ")":
                        depth -= 1
                end += 1
            path = t[self.pos:end].strip()
            if not path:
                self.error("empty table path")
            self.pos = end
            return read_table(path)
        m = _IDENT.match(t, start)
        if not m or m.group() not in COMBINATORS:
            self.error("unknown sequence family or combinator")
        name = m.group()
        self.pos = m.end()
        builder, kinds = COMBINATORS[name]
        self.eat("(")
        inner = self.spec()
        extra = []
        for kind in kinds:
            self.eat(",")
            if kind == "float":
                extra.append(self.number())
            elif kind.startswith("kw:"):
                key = kind[3:]
                self.eat(f"{key}=")
                val = self.number()
                if val != int(val):
                    self.error(f"{key} must be an integer")
                extra.append(int(val))
        self.eat(")")
        try:
            return builder(inner, *extra)
        except ValueError as e:
            self.pos = start
            self.error(str(e))


def parse_spec(text: str) -> WeightSequence:
    from . import ramify  # noqa: F401  registers interp()

    p = _Parser(text)
    seq = p.spec()
    p.ws()
    if p.pos != len(text):
        p.error("trailing input")
    return seq


def make_sequence(spec: str | Sequence | np.ndarray, *, envelope: Envelope | None = None) -> WeightSequence:
    """Build a sequence from a spec string, raw ``M_p`` values or ``(p, log M_p)`` pairs."""
    if isinstance(spec, WeightSequence):
        return spec
    if isinstance(spec, str):
        return parse_spec(spec)
    arr = np.asarray(spec, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 2:
        if not np.array_equal(arr[:, 0], np.arange(arr.shape[0])):
            raise ValueError("indices must be contiguous from 0")
        return from_log_values(arr[:, 1], envelope=envelope)
    return from_values(arr, envelope=envelope)
