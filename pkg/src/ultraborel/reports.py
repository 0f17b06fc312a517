"""Verdict types and the finite-horizon supremum scanner shared by all checks."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNDETERMINED = "undetermined"

    def __str__(self):
        return self.value


@dataclass
class ConditionReport:
    """Outcome of a finite-horizon decision about an asymptotic condition.

    ``to_dict`` emits exactly the public report schema; everything else the
    check wants to expose goes into ``diagnostics``.
    """

    condition: str
    verdict: Verdict
    sup_value: float
    witness_p: int
    horizon: int
    tail_bound: float | None = None
    r: float | None = None
    s: int | None = None
    Q: int | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    @property
    def fails(self) -> bool:
        return self.verdict is Verdict.FAILS

    def to_dict(self) -> dict[str, Any]:
        return {
            "condition": self.condition,
            "verdict": self.verdict.value,
            "sup_value": _json_float(self.sup_value),
            "witness_p": int(self.witness_p),
            "horizon": int(self.horizon),
            "tail_bound": None if self.tail_bound is None else _json_float(self.tail_bound),
            "params": {
                "r": None if self.r is None else float(self.r),
                "s": None if self.s is None else int(self.s),
                "Q": None if self.Q is None else int(self.Q),
            },
        }


def _json_float(x):
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass(frozen=True)
class SupScan:
    """Running-maximum scan of a finite sample of an index-dependent quantity.

    Attributes
    ----------
    sup : float
        Maximum over the sample.
    witness : int
        Position (0-based, relative to the sample) attaining ``sup``.
    stabilized : bool
        Whether the running max looks settled, see :func:`scan_sup`.
    extrapolated : float
        ``sup`` plus the geometric projection of the remaining growth when
        the stabilization came from decaying octave increments.
    rule : str
        Which rule fired: ``"flat"``, ``"geometric"`` or ``"growing"``.
    """

    sup: float
    witness: int
    stabilized: bool
    extrapolated: float
    rule: str


def scan_sup(values, *, atol=1e-10, ratio=0.85, octaves=3) -> SupScan:
    """Decide whether a scanned supremum has settled at the end of the sample.

    Two rules, tried in order:

    * flat: the max over the last quarter does not exceed the max over the
      first three quarters by more than ``atol`` (relative to ``max(1, |R|)``).
    * geometric: the increments of the running max between octave indices
      ``2^k`` shrink by at least ``ratio`` for the last ``octaves`` octaves.
      The remaining growth is then bounded by the geometric series and
      added to ``extrapolated``.

    The flat rule alone is blind to quantities that creep up to their limit
    from below (e.g. ``1 - c/sqrt(p)``), which is why the second rule exists.
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    if n == 0:
        raise ValueError("empty scan")
    if np.any(np.isnan(v)):
        raise ValueError("NaN in scanned values")
    run = np.maximum.accumulate(v)
    sup = float(run[-1])
    witness = int(np.argmax(v))
    if not math.isfinite(sup):
        return SupScan(sup, witness, False, sup, "growing")
    q = (3 * n) // 4
    if q >= 1:
        early = float(run[q - 1])
        if sup <= early + atol * max(1.0, abs(early)):
            return SupScan(sup, witness, True, sup, "flat")
    ks = int(math.floor(math.log2(n)))
    cps = np.array([2**k - 1 for k in range(ks + 1)])
    if cps.size >= octaves + 2:
        inc = np.diff(run[cps])[-(octaves + 1):]
        if np.all(inc >= 0) and inc[0] > 0 and np.all(inc[1:] <= ratio * inc[:-1]):
            rho = float(np.max(inc[1:] / inc[:-1]))
            tail = inc[-1] * rho / (1.0 - rho)
            return SupScan(sup, witness, True, sup + float(tail), "geometric")
    return SupScan(sup, witness, False, sup, "growing")


def last_quarter(n: int) -> slice:
    """Index window used by every liminf/limsup estimator."""
    return slice((3 * n) // 4, n)
