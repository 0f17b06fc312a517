"""Box-convolution bumps on a periodic grid, with two independent derivative routes.

A plan with widths ``a_1 >= ... >= a_K`` and ``S = sum a_j`` describes

    u   = H_{a_1} * ... * H_{a_K}          (one-sided normalized boxes on [0, S])
    psi = int_y^inf u,   phi(x) = psi(|x|)

and ``phi`` equals ``S * (H^c_S * H^c_{a_1} * ... * H^c_{a_K})`` with centered
boxes ``H^c``, so its transform is ``S sinc(xi S/2) prod_j sinc(xi a_j/2)``.
Samples come from that closed-form spectrum (route 1, spectral).  Route 2
uses the exact identity ``(H^c_a * g)' = (g(x + a/2) - g(x - a/2)) / a``: an
order-n derivative is an n-fold central difference, with the box widths as
steps, of the convolution of the remaining boxes.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import comb, gammaln

from ..weights import WeightSequence

MAX_ORDER = 12
MAX_BOX_ORDER = 20
MIN_STEPS_PER_WIDTH = 8
DISCREPANCY_TOL = 1e-4


class UnreliableDerivative(RuntimeError):
    pass


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid ``x_n = -L + n dx`` with ``2^m`` points."""

    m: int
    L: float

    @property
    def n(self) -> int:
        return 1 << self.m

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.n

    @cached_property
    def x(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.n)

    @cached_property
    def xi(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @property
    def zero_index(self) -> int:
        return self.n // 2

    def synthesize(self, spec: np.ndarray, order: int = 0) -> np.ndarray:
        """Samples of the function (or derivative) whose transform is ``spec``."""
        s = spec * np.exp(-1j * self.xi * self.L)
        if order:
            s = s * (1j * self.xi) ** order
        return np.fft.ifft(s) * (self.n / (2.0 * self.L))


@dataclass(frozen=True, eq=False)
class BumpPlan:
    """Widths of the box factors of one bump."""

    widths: np.ndarray
    label: str = ""

    def __post_init__(self):
        w = np.asarray(self.widths, dtype=float).reshape(-1)
        if w.size < 3:
            raise ValueError("need K >= 3 box factors")
        if not np.all(w > 0):
            raise ValueError("widths must be positive")
        if np.any(np.diff(w) > 1e-15 * w[0]):
            raise ValueError("widths must be nonincreasing")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "widths", w)

    @classmethod
    def from_log_tau(cls, log_tau, label=""):
        return cls(np.exp(-np.asarray(log_tau, dtype=float)), label)

    @property
    def K(self) -> int:
        return self.widths.size

    @property
    def support_radius(self) -> float:
        return float(np.sum(self.widths))

    @property
    def all_widths(self) -> np.ndarray:
        """``[S, a_1, ..., a_K]``: the factors of ``phi`` itself, widest first."""
        return np.concatenate([[self.support_radius], self.widths])

    def log_tau_products(self, n: int) -> np.ndarray:
        """``log prod_{i<=j} tau_i`` for j = 0..n."""
        return np.concatenate([[0.0], np.cumsum(-np.log(self.widths[:n]))])

    def derivative_bound(self, j: int) -> float:
        """``2^j prod_{i<=j} tau_i``: the sup-norm bound for ``phi^(j)``."""
        return float(2.0**j * math.exp(self.log_tau_products(j)[j]))

    def spectrum(self, xi: np.ndarray) -> np.ndarray:
        S = self.support_radius
        out = S * np.sinc(xi * S / (2 * np.pi))
        for a in self.widths:
            out = out * np.sinc(xi * a / (2 * np.pi))
        return out

    def check_grid(self, grid: Grid, max_order: int = 0):
        if self.support_radius >= grid.L:
            raise GridError(f"support radius {self.support_radius:.6g} does not fit in [-{grid.L}, {grid.L}]")
        if self.widths[-1] < MIN_STEPS_PER_WIDTH * grid.dx:
            raise GridError(f"smallest width {self.widths[-1]:.3g} below {MIN_STEPS_PER_WIDTH} grid steps "
                            f"({grid.dx:.3g}); raise --grid or lower K")
        if max_order > self.K - 3:
            raise GridError(f"K = {self.K} too small for derivative order {max_order} (need K >= order + 3)")


def truncate_widths(widths, grid: Grid, K_max: int = 50) -> np.ndarray:
    """Keep the leading widths that the grid resolves, at most ``K_max``."""
    w = np.asarray(widths, dtype=float)[:K_max]
    ok = w >= MIN_STEPS_PER_WIDTH * grid.dx
    k = int(np.argmin(ok)) if not ok.all() else w.size
    return w[:k]


# ---------------------------------------------------------------- route 2 (box differences)

def _cutoff(widths: np.ndarray, level: float = 1e-20) -> float:
    """Frequency past which ``prod sinc(xi a/2)`` is below ``level`` (envelope bound)."""
    def log_env(X):
        return float(np.sum(np.minimum(0.0, np.log(2.0 / (X * widths)))))

    lo, hi = 1e-3, 1e3
    while log_env(hi) > math.log(level):
        hi *= 4
    for _ in range(60):
        mid = math.sqrt(lo * hi)
        if log_env(mid) > math.log(level):
            lo = mid
        else:
            hi = mid
    return hi


def _box_conv_values(widths: np.ndarray, pts: np.ndarray, max_terms: int = 400_000) -> np.ndarray:
    """Convolution of centered normalized boxes evaluated at arbitrary points.

    Exactly zero outside the support; inside, a cosine series with period
    four times the support (no wrap-around) truncated where the transform
    envelope drops below 1e-20.
    """
    half = 0.5 * float(np.sum(widths))
    out = np.zeros(pts.size)
    inside = np.abs(pts) < half * (1 - 1e-13)
    if not inside.any():
        return out
    period = 4.0 * half
    X = _cutoff(widths)
    kmax = int(X * period / (2 * np.pi)) + 1
    if kmax > max_terms:
        return _box_conv_truncated_powers(widths, pts, out, inside)
    xk = 2 * np.pi * np.arange(1, kmax + 1) / period
    Rh = np.ones(kmax)
    for a in widths:
        Rh *= np.sinc(xk * a / (2 * np.pi))
    p_in = pts[inside]
    vals = np.empty(p_in.size)
    chunk = max(1, 4_000_000 // kmax)
    for i in range(0, p_in.size, chunk):
        vals[i:i + chunk] = (1.0 + 2.0 * np.cos(np.outer(p_in[i:i + chunk], xk)) @ Rh) / period
    out[inside] = vals
    return out


def _box_conv_truncated_powers(widths, pts, out, inside):
    """Exact piecewise-polynomial evaluation for a few slowly decaying boxes."""
    m = widths.size
    if m > 20:
        raise UnreliableDerivative(f"{m} remaining boxes too many for the exact polynomial route")
    half = 0.5 * float(np.sum(widths))
    y = pts[inside] + half
    acc = np.zeros(y.size)
    logf = gammaln(m)
    for eps in itertools.product((0, 1), repeat=m):
        shift = float(np.dot(eps, widths))
        sign = -1.0 if sum(eps) % 2 else 1.0
        z = np.maximum(y - shift, 0.0)
        acc += sign * z ** (m - 1)
    out[inside] = acc * math.exp(-logf) / float(np.prod(widths))
    return out


def box_derivative(plan: BumpPlan, order: int, x0: float) -> float:
    """``phi^(order)(x0)`` by the box-difference identity (route 2)."""
    if order < 0:
        raise ValueError("order must be >= 0")
    allw = plan.all_widths
    S = allw[0]
    if order == 0:
        if x0 == 0.0:
            return 1.0  # integral of the remaining boxes over their full support
        return _window_integral(allw[1:], x0, S)
    if order > plan.K - 1:
        raise ValueError(f"order {order} needs more than K = {plan.K} boxes")
    d = allw[:order]
    rest = allw[order:]
    # every node x0 +- d_0/2 +- ... lies outside the support of the remaining boxes
    if d[0] / 2 - abs(x0) - float(np.sum(d[1:])) / 2 >= float(np.sum(rest)) / 2 * (1 - 1e-13):
        return 0.0
    if order > MAX_BOX_ORDER:
        raise UnreliableDerivative(f"box route enumerates 2^{order} nodes; cap is order {MAX_BOX_ORDER}")
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=order)))
    pts = x0 + signs @ (d / 2.0)
    vals = _box_conv_values(rest, pts)
    return float(S / np.prod(d) * np.dot(np.prod(signs, axis=1), vals))


def _window_integral(widths, x0, S):
    """``int_{x0 - S/2}^{x0 + S/2} R`` by integrating the cosine series termwise."""
    half = 0.5 * float(np.sum(widths))
    period = 4.0 * (half + abs(x0) + S)
    kmax = int(_cutoff(widths) * period / (2 * np.pi)) + 1
    xk = 2 * np.pi * np.arange(1, kmax + 1) / period
    Rh = np.ones(kmax)
    for a in widths:
        Rh *= np.sinc(xk * a / (2 * np.pi))
    lo, hi = x0 - S / 2, x0 + S / 2
    return float((hi - lo + 2.0 * np.dot(Rh, (np.sin(xk * hi) - np.sin(xk * lo)) / xk)) / period)


# ---------------------------------------------------------------- function representation

@dataclass(frozen=True, eq=False)
class Term:
    """``coef * phi_plan(x) * x^degree / degree!``."""

    coef: complex
    plan: BumpPlan
    degree: int = 0


class FunctionRep:
    """Finite sum of bump-times-monomial terms sampled on one grid.

    Samples and spectrum are computed lazily and cached; derivatives use
    spectral differentiation of each bump combined with the monomials by
    Leibniz' rule.
    """

    def __init__(self, grid: Grid, terms, provenance: dict | None = None, max_order: int = MAX_ORDER,
                 cache: dict | None = None):
        self.grid = grid
        self.terms = tuple(terms)
        self.provenance = dict(provenance or {})
        self.max_order = max_order
        # bump samples keyed by plan identity; may be shared between functions on one grid
        self._bump_cache: dict = {} if cache is None else cache
        self._deriv_cache: dict = {}
        for t in self.terms:
            t.plan.check_grid(grid)

    # -- bumps on the grid
    def _bump(self, plan: BumpPlan, order: int) -> np.ndarray:
        key = (plan, order)
        if key not in self._bump_cache:
            spec = self._spec_cache(plan)
            vals = self.grid.synthesize(spec, order).real
            # the box spline and its derivatives vanish exactly outside [-S, S]
            vals[np.abs(self.grid.x) > plan.support_radius] = 0.0
            self._bump_cache[key] = vals
        return self._bump_cache[key]

    def _spec_cache(self, plan):
        key = (plan, "spec")
        if key not in self._bump_cache:
            self._bump_cache[key] = plan.spectrum(self.grid.xi)
        return self._bump_cache[key]

    def _monomial(self, d: int) -> np.ndarray:
        key = ("mono", d)
        if key not in self._bump_cache:
            x = self.grid.x
            self._bump_cache[key] = np.power(x, d) / math.factorial(d) if d >= 0 else np.zeros_like(x)
        return self._bump_cache[key]

    def derivative_samples(self, order: int = 0) -> np.ndarray:
        if order > self.max_order:
            raise UnreliableDerivative(f"order {order} above the cap {self.max_order}")
        if order in self._deriv_cache:
            return self._deriv_cache[order]
        out = np.zeros(self.grid.n, dtype=complex)
        for t in self.terms:
            if t.coef == 0:
                continue
            acc = np.zeros(self.grid.n)
            for k in range(min(order, t.degree) + 1):
                acc += comb(order, k, exact=True) * self._bump(t.plan, order - k) * self._monomial(t.degree - k)
            out += t.coef * acc
        self._deriv_cache[order] = out
        return out

    @property
    def samples(self) -> np.ndarray:
        return self.derivative_samples(0)

    @cached_property
    def spectrum(self) -> np.ndarray:
        return np.fft.fft(self.samples)

    def roundtrip_error(self) -> float:
        back = np.fft.ifft(self.spectrum)
        m = float(np.max(np.abs(self.samples))) or 1.0
        return float(np.max(np.abs(back - self.samples))) / m

    @property
    def support_radius(self) -> float:
        radii = [t.plan.support_radius for t in self.terms if t.coef != 0]
        return max(radii) if radii else 0.0

    def support_leak(self, radius: float | None = None) -> float:
        """``max |f|`` outside the declared support, relative to ``max |f|``."""
        R = self.support_radius if radius is None else radius
        f = np.abs(self.samples)
        m = float(f.max())
        if m == 0:
            return 0.0
        out = np.abs(self.grid.x) > R
        return float(f[out].max() / m) if out.any() else 0.0

    def top_octave_ratio(self) -> float:
        s = np.abs(self.spectrum) ** 2
        tot = float(s.sum())
        if tot == 0:
            return 0.0
        k = np.abs(np.fft.fftfreq(self.grid.n)) * self.grid.n
        return float(s[k > self.grid.n / 4].sum() / tot)

    # -- pointwise evaluation by the box-difference route
    def box_derivative_at(self, order: int, x0: float) -> complex:
        total = 0j
        for t in self.terms:
            if t.coef == 0:
                continue
            acc = 0.0
            for k in range(min(order, t.degree) + 1):
                e = t.degree - k
                mono = x0**e / math.factorial(e)
                if mono == 0.0:
                    continue
                acc += comb(order, k, exact=True) * box_derivative(t.plan, order - k, x0) * mono
            total += t.coef * acc
        return total

    def derivative_scale(self, order: int, x0: float) -> float:
        """A priori bound for ``|f^(order)(x0)|`` from the box-width bounds."""
        total = 0.0
        for t in self.terms:
            if t.coef == 0:
                continue
            acc = 0.0
            for k in range(min(order, t.degree) + 1):
                e = t.degree - k
                mono = abs(x0) ** e / math.factorial(e)
                if mono == 0.0:
                    continue
                acc += comb(order, k, exact=True) * t.plan.derivative_bound(order - k) * mono
            total += abs(t.coef) * acc
        return total


@dataclass
class DerivativeValue:
    value: complex
    cross_value: complex
    discrepancy: float
    scale: float
    x: float
    order: int
    diagnostics: dict = field(default_factory=dict)


def _compare(spec_val, box_val, scale):
    den = max(abs(spec_val), abs(box_val), scale)
    return abs(spec_val - box_val) / den if den > 0 else 0.0


def derivative_at_zero(f: FunctionRep, order: int, tol: float = DISCREPANCY_TOL,
                       raise_on_disagreement: bool = True) -> DerivativeValue:
    """``f^(order)(0)`` spectrally, cross-checked by the box-difference route.

    The discrepancy is measured relative to ``max(|value|, |cross|, bound)``
    where ``bound`` is the a priori size of ``f^(order)`` at 0; that keeps the
    comparison meaningful at flat points where the true value is zero.
    """
    v = complex(f.derivative_samples(order)[f.grid.zero_index])
    b = f.box_derivative_at(order, 0.0)
    sc = f.derivative_scale(order, 0.0)
    disc = _compare(v, b, sc)
    if raise_on_disagreement and disc > tol:
        raise UnreliableDerivative(f"order {order}: spectral {v} vs box {b} (relative {disc:.3g})")
    return DerivativeValue(v, b, disc, sc, 0.0, order)


@dataclass
class SupDerivative:
    value: float
    x: float
    aliased: bool
    top_octave_ratio: float
    cross: DerivativeValue | None


def sup_derivative(f: FunctionRep, order: int, cross_check: bool = True,
                   tol: float = DISCREPANCY_TOL) -> SupDerivative:
    """``max |f^(order)|`` over the grid, with a box-route check at the maximizer."""
    d = f.derivative_samples(order)
    i = int(np.argmax(np.abs(d)))
    x0 = float(f.grid.x[i])
    ratio = f.top_octave_ratio()
    cross = None
    if cross_check:
        b = f.box_derivative_at(order, x0)
        sc = abs(d[i])
        disc = _compare(complex(d[i]), b, sc)
        cross = DerivativeValue(complex(d[i]), b, disc, sc, x0, order)
        if disc > tol:
            raise UnreliableDerivative(f"order {order} at x={x0}: spectral {d[i]} vs box {b} "
                                       f"(relative {disc:.3g})")
    return SupDerivative(float(abs(d[i])), x0, ratio > 1e-8, ratio, cross)


# ---------------------------------------------------------------- bumps from weight sequences

@dataclass
class BumpReport:
    f: FunctionRep
    plan: BumpPlan
    value_at_zero: float
    min_value: float
    max_value: float
    support_radius: float
    support_from_mass: float
    threshold_radius: float
    support_leak: float
    mass_u: float
    ledger: list
    provenance: dict


def bump_plan_from(tau, K: int) -> BumpPlan:
    """Widths ``1/tau_j``, j = 1..K, from a sequence's quotients or an array of tau."""
    if isinstance(tau, WeightSequence):
        lt = np.asarray(tau.log_quotients(K)[1:])
        return BumpPlan.from_log_tau(lt, label=tau.label)
    t = np.asarray(tau, dtype=float)[:K]
    if t.size < K:
        raise ValueError(f"need {K} quotients, got {t.size}")
    return BumpPlan(1.0 / t)


def build_bump(tau, K: int = 50, grid_m: int = 18, L: float | None = None,
               orders: int = 8, cross_check: bool = True) -> BumpReport:
    """Bump from quotients ``tau`` with its contract ledger.

    ``orders`` is the highest derivative order put into the ledger; each
    entry compares the grid sup of ``phi^(j)`` with ``2^j prod_{i<=j} tau_i``.
    """
    plan = bump_plan_from(tau, K)
    S = plan.support_radius
    grid = Grid(grid_m, 1.25 * S if L is None else L)
    orders = min(orders, K - 2)
    plan.check_grid(grid, max(0, orders - 1))
    f = FunctionRep(grid, [Term(1.0, plan, 0)], {"kind": "bump", "tau": plan.label, "K": K,
                                                   "grid_m": grid_m, "L": grid.L},
                    max_order=max(MAX_ORDER, orders))
    phi = f.samples.real
    ledger = []
    for j in range(orders + 1):
        sd = sup_derivative(f, j, cross_check=cross_check and j >= 1, tol=math.inf)
        bound = plan.derivative_bound(j)
        ledger.append({"order": j, "sup": sd.value, "bound": bound, "ratio": sd.value / bound,
                       "x": sd.x, "cross_discrepancy": None if sd.cross is None else sd.cross.discrepancy,
                       "aliased": sd.aliased})
    a = np.abs(phi)
    thr = np.abs(grid.x[a > 1e-12 * a.max()]).max()
    u = profile_u(plan, grid)
    return BumpReport(f, plan, float(phi[grid.zero_index]), float(phi.min()), float(phi.max()),
                      S, float(np.sum(phi) * grid.dx), float(thr), f.support_leak(), float(np.sum(u) * grid.dx),
                      ledger, f.provenance)


def profile_u(plan: BumpPlan, grid: Grid) -> np.ndarray:
    """Samples of ``u = H_{a_1} * ... * H_{a_K}`` (one-sided boxes)."""
    spec = np.ones_like(grid.xi)
    for a in plan.widths:
        spec = spec * np.sinc(grid.xi * a / (2 * np.pi))
    return grid.synthesize(spec * np.exp(-1j * grid.xi * plan.support_radius / 2)).real
