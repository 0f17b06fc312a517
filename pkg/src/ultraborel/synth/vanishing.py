"""Hörmander-type vanishing bound as a diagnostic.

For ``f`` vanishing on ``(-inf, 0]``, widths ``a_1 >= ... >= a_l`` and
``0 < t <= A <= sum a_i``:

    |f(t)| <= sum_{j in J_l} 2^{2j} a_1...a_j sup_{s<t} |f^{(j)}(s)|,
    J_l = {j : a_{j+1} < a_j} U {l}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bump import FunctionRep, Grid

VANISH_TOL = 1e-12


class PreconditionError(ValueError):
    pass


@dataclass
class VanishingLedger:
    lhs: float
    rhs: float
    terms: dict
    J: list
    t: float
    ok: bool
    diagnostics: dict = field(default_factory=dict)


def index_set(widths) -> list:
    """``J_l`` (1-based): the positions where the width strictly drops, plus ``l``."""
    a = np.asarray(widths, dtype=float)
    l = a.size
    J = [j for j in range(1, l) if a[j] < a[j - 1]]
    return J + [l]


def vanishing_bound_check(f, widths, A: float, t: float, n_samples: int = 4097) -> VanishingLedger:
    """Evaluate both sides of the vanishing bound.

    ``f`` is either sampled (a :class:`FunctionRep` or :class:`SampledFunction`;
    ``t`` is snapped down to the grid) or a callable ``deriv(order, s_array)`` that
    returns derivative values at arbitrary points.
    """
    a = np.asarray(widths, dtype=float)
    if a.size < 1 or np.any(a <= 0) or np.any(np.diff(a) > 0):
        raise PreconditionError("widths must be positive and nonincreasing")
    if not (0 < t <= A <= a.sum() * (1 + 1e-12)):
        raise PreconditionError(f"need 0 < t <= A <= sum a_i (t={t}, A={A}, sum={a.sum()})")
    l = a.size
    J = index_set(a)
    if hasattr(f, "derivative_samples"):
        x = f.grid.x
        idx = int(np.searchsorted(x, t, side="right")) - 1
        t_eff = float(x[idx])
        neg = x <= 0
        vals = np.abs(f.samples)
        scale = float(vals.max()) or 1.0
        if float(vals[neg].max()) > VANISH_TOL * scale:
            raise PreconditionError("f does not vanish on (-inf, 0]")
        lhs = float(vals[idx])
        window = (x >= 0) & (x < t_eff)

        def sup_j(j):
            return float(np.max(np.abs(f.derivative_samples(j)[window]))) if window.any() else 0.0
    elif isinstance(f, Callable):
        t_eff = float(t)
        neg = np.linspace(-1.0, 0.0, 257)
        v0 = np.abs(np.asarray(f(0, neg)))
        s = np.linspace(0.0, t_eff, n_samples)[:-1]
        ref = max(float(np.max(np.abs(f(0, s)))), abs(float(np.abs(f(0, np.array([t_eff])))[0])), 1e-300)
        if float(v0.max()) > VANISH_TOL * ref:
            raise PreconditionError("f does not vanish on (-inf, 0]")
        lhs = float(np.abs(f(0, np.array([t_eff])))[0])

        def sup_j(j):
            return float(np.max(np.abs(f(j, s))))
    else:
        raise TypeError("f must be sampled or a callable deriv(order, s)")
    terms = {}
    log_prod = np.concatenate([[0.0], np.cumsum(np.log(a))])
    for j in J:
        sj = sup_j(j)
        terms[j] = {"sup": sj, "weight": math.exp(2 * j * math.log(2) + log_prod[j]),
                    "value": math.exp(2 * j * math.log(2) + log_prod[j]) * sj}
    rhs = math.fsum(v["value"] for v in terms.values())
    return VanishingLedger(lhs, rhs, terms, J, t_eff, lhs <= rhs * (1 + 1e-6),
                           {"l": l, "A": A})


@dataclass
class SampledFunction:
    """Grid samples of a function and its derivatives, given by ``deriv(order)``."""

    grid: Grid
    deriv: Callable[[int], np.ndarray]
    provenance: dict = field(default_factory=dict)

    def derivative_samples(self, order: int = 0) -> np.ndarray:
        return self.deriv(order)

    @property
    def samples(self) -> np.ndarray:
        return self.deriv(0)


def chi_difference(chi: FunctionRep, r: int, p: int, j: int) -> SampledFunction:
    """``g(t) = chi^{(rj)}(t) - t^{r(p-j)}/(r(p-j))!`` for ``t > 0`` and 0 otherwise.

    The two pieces agree to infinite order at 0 (``rho = 1`` near 0), so ``g``
    is smooth and vanishes on the negative half line.
    """
    if not 0 <= j <= p:
        raise ValueError("need 0 <= j <= p")
    x = chi.grid.x
    e = r * (p - j)
    pos = x > 0
    cache: dict = {}

    def deriv(k):
        if k not in cache:
            d = chi.derivative_samples(r * j + k).real.copy()
            if e - k >= 0:
                d -= np.where(pos, x ** (e - k) / math.factorial(e - k), 0.0)
            d[~pos] = 0.0
            cache[k] = d
        return cache[k]

    return SampledFunction(chi.grid, deriv, {"kind": "chi_difference", "p": p, "j": j, "r": r})
