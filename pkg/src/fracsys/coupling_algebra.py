"""Closed-form scalar functions and parameter-regime predicates.

Notation follows the coupled system

    (-Δ)^s u + u = μ1 |u|^{2p-2} u + β |v|^p |u|^{p-2} u
    (-Δ)^s v + v = μ2 |v|^{2p-2} v + β |u|^p |v|^{p-2} v

with proportional ansatz ``(u, v) = (k w, τ k w)``. Everything here is a pure
function of its arguments. Scalar functions of ``tau`` accept floats or numpy
arrays and return the same kind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from ._roots import refine_root
from .errors import ConstraintError, DomainError, ParameterError

__all__ = [
    "SystemParams",
    "NormalizedParams",
    "Interval",
    "ConditionReport",
    "critical_exponent",
    "eval_g",
    "eval_g_tilde",
    "g_tilde_scale",
    "eval_dg",
    "eval_h",
    "eval_dh",
    "eval_H",
    "eval_f",
    "eval_df",
    "eval_f_at_root",
    "eval_H1",
    "H1_argmax",
    "eval_F_G",
    "eval_l",
    "region_D",
    "region_Dtilde",
    "a_conditions",
    "b_conditions",
    "beta_roots",
    "beta_tilde_roots",
    "classify_conditions",
    "simultaneous_roots",
]


def critical_exponent(s: float, N: int) -> float:
    """Fractional Sobolev exponent 2N/(N-2s), or +inf when N <= 2s."""
    if N <= 2 * s:
        return math.inf
    return 2 * N / (N - 2 * s)


def _check_exponents(s, p, N):
    if not 0 < s <= 1:
        raise ParameterError(f"need 0 < s <= 1, got s={s}")
    if int(N) != N or N < 1:
        raise ParameterError(f"need integer N >= 1, got N={N}")
    crit = critical_exponent(s, N)
    if not 1 < p < crit / 2:
        raise ParameterError(f"need 1 < p < {crit / 2} for s={s}, N={N}; got p={p}")


@dataclass(frozen=True)
class SystemParams:
    """Parameters of the coupled system; ``mu1 > mu2 > 0`` is enforced."""

    s: float
    p: float
    N: int
    mu1: float
    mu2: float
    beta: float

    def __post_init__(self):
        _check_exponents(self.s, self.p, self.N)
        if not self.mu1 > self.mu2 > 0:
            raise ParameterError(f"need mu1 > mu2 > 0, got mu1={self.mu1}, mu2={self.mu2}")
        if not math.isfinite(self.beta):
            raise ParameterError("beta must be finite")

    def normalized(self) -> NormalizedParams:
        return NormalizedParams(
            mu=self.mu1 / self.mu2, beta_tilde=self.beta / self.mu2, p=self.p, s=self.s, N=self.N
        )

    def with_(self, **changes) -> SystemParams:
        values = {k: getattr(self, k) for k in ("s", "p", "N", "mu1", "mu2", "beta")}
        values.update(changes)
        return SystemParams(**values)

    def as_dict(self) -> dict:
        return {"s": self.s, "p": self.p, "N": self.N, "mu1": self.mu1, "mu2": self.mu2, "beta": self.beta}


@dataclass(frozen=True)
class NormalizedParams:
    """The system after dividing by ``mu2``: coefficients ``(mu, 1, beta_tilde)``."""

    mu: float
    beta_tilde: float
    p: float
    s: float = 1.0
    N: int = 1

    def __post_init__(self):
        _check_exponents(self.s, self.p, self.N)
        if not self.mu > 1:
            raise ParameterError(f"need mu > 1, got mu={self.mu}")

    def as_system(self) -> SystemParams:
        """The normalized system read as a ``SystemParams`` with ``mu2 = 1``."""
        return SystemParams(s=self.s, p=self.p, N=self.N, mu1=self.mu, mu2=1.0, beta=self.beta_tilde)

    def denormalize(self, mu2: float) -> SystemParams:
        return SystemParams(
            s=self.s, p=self.p, N=self.N, mu1=self.mu * mu2, mu2=mu2, beta=self.beta_tilde * mu2
        )


@dataclass(frozen=True)
class Interval:
    """Interval of the positive half-line; ``hi = inf`` stands for +∞."""

    lo: float
    hi: float
    lo_open: bool = True
    hi_open: bool = True

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    def __contains__(self, x) -> bool:
        above = x > self.lo if self.lo_open else x >= self.lo
        below = x < self.hi if self.hi_open else x <= self.hi
        return bool(above and below)

    def as_list(self):
        """JSON-friendly ``[lo, hi]`` with ``None`` for an infinite end."""
        return [self.lo, None if math.isinf(self.hi) else self.hi]


@dataclass(frozen=True)
class ConditionReport:
    a_flags: tuple
    b_flags: tuple
    beta0: float | None
    beta1: float | None
    nonexistence_window: bool
    beta_tilde0: float | None = None
    beta_tilde1: float | None = None
    notes: tuple = field(default_factory=tuple)

    @property
    def a_holding(self) -> list:
        """1-based indices of the A-conditions that hold."""
        return [i + 1 for i, f in enumerate(self.a_flags) if f]

    @property
    def b_holding(self) -> list:
        return [i + 1 for i, f in enumerate(self.b_flags) if f]

    def as_dict(self) -> dict:
        return {
            "a_flags": list(self.a_flags),
            "b_flags": list(self.b_flags),
            "beta0": self.beta0,
            "beta1": self.beta1,
            "nonexistence_window": self.nonexistence_window,
        }


# ---------------------------------------------------------------------------
# scalar functions of tau


def _tau(tau, allow_zero=False):
    t = np.asarray(tau, dtype=float)
    bad = t < 0 if allow_zero else t <= 0
    if np.any(bad) or not np.all(np.isfinite(t)):
        bound = ">= 0" if allow_zero else "> 0"
        raise DomainError(f"tau must be finite and {bound}")
    return t


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def eval_g(params: SystemParams, tau):
    """Coupling root function μ1 + βτ^p − μ2 τ^{2p−2} − βτ^{p−2}."""
    t = _tau(tau)
    p, b = params.p, params.beta
    return _out(params.mu1 + b * t**p - params.mu2 * t ** (2 * p - 2) - b * t ** (p - 2))


def eval_g_tilde(normalized: NormalizedParams, tau):
    """Normalized coupling function μ + β̃τ^p − β̃τ^{p−2} − τ^{2p−2}."""
    t = _tau(tau)
    p, b = normalized.p, normalized.beta_tilde
    return _out(normalized.mu + b * t**p - b * t ** (p - 2) - t ** (2 * p - 2))


def g_tilde_scale(normalized: NormalizedParams, tau: float) -> float:
    """Sum of the magnitudes of the terms of g~ at τ, the yardstick for root tests."""
    p, b = normalized.p, abs(normalized.beta_tilde)
    return normalized.mu + b * (tau**p + tau ** (p - 2)) + tau ** (2 * p - 2)


def eval_h(params: SystemParams, tau):
    """h(τ) = βpτ² − 2μ2(p−1)τ^p − β(p−2), so that g'(τ) = τ^{p−3} h(τ)."""
    t = _tau(tau, allow_zero=True)
    p, b = params.p, params.beta
    return _out(b * p * t**2 - 2 * params.mu2 * (p - 1) * t**p - b * (p - 2))


def eval_dh(params: SystemParams, tau):
    t = _tau(tau, allow_zero=True)
    p = params.p
    return _out(2 * p * t * (params.beta - params.mu2 * (p - 1) * t ** (p - 2)))


def eval_dg(params: SystemParams, tau):
    t = _tau(tau)
    return _out(t ** (params.p - 3) * eval_h(params, t))


def eval_H(params: SystemParams, tau):
    """Denominator base μ1 + 2βτ^p + μ2 τ^{2p}."""
    t = _tau(tau, allow_zero=True)
    p = params.p
    return _out(params.mu1 + 2 * params.beta * t**p + params.mu2 * t ** (2 * p))


def eval_f(params: SystemParams, tau):
    """Landscape function (1 + τ²) / H(τ)^{1/p}, defined for τ >= 0."""
    t = _tau(tau, allow_zero=True)
    H = np.asarray(eval_H(params, t))
    if np.any(H <= 0):
        raise DomainError("mu1 + 2 beta tau^p + mu2 tau^2p must be positive")
    return _out((1 + t**2) / H ** (1 / params.p))


def eval_df(params: SystemParams, tau):
    """f'(τ) = 2τ g(τ) / H(τ)^{1+1/p}."""
    t = _tau(tau)
    return _out(2 * t * eval_g(params, t) / np.asarray(eval_H(params, t)) ** (1 + 1 / params.p))


def eval_f_at_root(params: SystemParams, tau):
    """f at a root of g, via H = (μ1 + βτ^p)(1 + τ²) which holds only there."""
    t = _tau(tau)
    p = params.p
    return _out((1 + t**2) ** (1 - 1 / p) * (params.mu1 + params.beta * t**p) ** (-1 / p))


def eval_H1(t, p: float):
    """H1(t) = t²/(p−1) − ((p−2)/p)(p−1)^{−p/(p−2)} t^{2(p−1)/(p−2)}, for p > 2."""
    if not p > 2:
        raise DomainError(f"H1 is only defined for p > 2, got p={p}")
    x = _tau(t)
    return _out(
        x**2 / (p - 1) - (p - 2) / p * (p - 1) ** (-p / (p - 2)) * x ** (2 * (p - 1) / (p - 2))
    )


def H1_argmax(p: float) -> float:
    """Maximizer p^{(p−2)/2} (p−1)^{(4−p)/2} of H1; the maximum is (p/(p−1))^{p−2}."""
    return p ** ((p - 2) / 2) * (p - 1) ** ((4 - p) / 2)


def eval_F_G(normalized: NormalizedParams, tau):
    """The pair (F, G) used to exclude simultaneous roots of the normalized system."""
    t = _tau(tau)
    p, b, mu = normalized.p, normalized.beta_tilde, normalized.mu
    F = p * t ** (2 * p - 2) - 2 * b * t**p
    G = 2 * (p - 1) / p * mu + b * (p - 2) / p * t**p - b * t ** (p - 2)
    return _out(F), _out(G)


def eval_l(normalized: NormalizedParams, tau: float, root_tol: float = 1e-8) -> float:
    """The quotient l(β̃) at a root ``tau`` of the normalized coupling function.

    Raises ConstraintError unless ``tau`` is a root (to ``root_tol``, relative
    to μ) and both amplitude factors are positive.
    """
    t = float(_tau(tau))
    p, b, mu = normalized.p, normalized.beta_tilde, normalized.mu
    first = mu + b * t**p
    second = t ** (2 * p - 2) + b * t ** (p - 2)
    if first <= 0 or second <= 0:
        raise ConstraintError("amplitude factors must be positive at tau")
    if abs(eval_g_tilde(normalized, t)) > root_tol * g_tilde_scale(normalized, t):
        raise ConstraintError(f"tau={t} is not a root of g~ (residual {eval_g_tilde(normalized, t):.3e})")
    return (mu * (2 * p - 1) + b * (p - 1) * t**p - b * p * t ** (p - 2)) / first


# ---------------------------------------------------------------------------
# regions and condition sets


def _region(p, beta, threshold_small_p, threshold_large_p) -> Interval:
    if 1 < p < 2 and threshold_small_p > beta > 0:
        return Interval(0.0, 1.0)
    if p > 2 and beta > threshold_large_p:
        return Interval(1.0, math.inf)
    return Interval(0.0, math.inf)


def region_D(params: SystemParams) -> Interval:
    p, m1, m2 = params.p, params.mu1, params.mu2
    e = 2 * (p - 1)
    small = (p - 1) * m1 ** ((p - 2) / e) * m2 ** (p / e)
    return _region(p, params.beta, small, (p - 1) * m1)


def region_Dtilde(normalized: NormalizedParams) -> Interval:
    p, mu = normalized.p, normalized.mu
    small = (p - 1) * mu ** ((p - 2) / (2 * (p - 1)))
    return _region(p, normalized.beta_tilde, small, (p - 1) * mu)


def _H1_level_roots(level: float, p: float, scale: float = 1.0):
    """Both solutions t0 < t1 of H1(t) = level, scaled by ``scale``; None if absent.

    H1 rises from 0 to its maximum and then decreases to −∞, so there are two
    roots exactly when 0 < level < max H1.
    """
    t_max = H1_argmax(p)
    h_max = (p / (p - 1)) ** (p - 2)
    if not 0 < level < h_max:
        return None, None
    fun = lambda t: level - eval_H1(t, p)  # noqa: E731
    eps = t_max * 1e-12
    while fun(eps) <= 0:
        eps /= 2
    t0 = refine_root(fun, eps, t_max)
    hi = 2 * t_max
    while fun(hi) <= 0:
        hi *= 2
        if hi > 2.0**60:
            return t0 * scale, None
    t1 = refine_root(fun, t_max, hi)
    return t0 * scale, t1 * scale


def beta_roots(params: SystemParams):
    """β0 < β1 solving 2(p−1)μ1/(pμ2) − H1(β/μ2) = 0, or (None, None)."""
    p = params.p
    if not p > 2:
        return None, None
    return _H1_level_roots(2 * (p - 1) * params.mu1 / (p * params.mu2), p, params.mu2)


def beta_tilde_roots(normalized: NormalizedParams):
    p = normalized.p
    if not p > 2:
        return None, None
    return _H1_level_roots(2 * (p - 1) / p * normalized.mu, p)


def a_conditions(params: SystemParams, beta0=None, beta1=None) -> tuple:
    """Flags for the seven existence-and-non-degeneracy conditions A1..A7."""
    p, m1, m2, b = params.p, params.mu1, params.mu2, params.beta
    if beta0 is None and beta1 is None:
        beta0, beta1 = beta_roots(params)
    e = 2 * (p - 1)
    flags = [False] * 7
    if p > 2:
        bound = (p - 1) * m1
        pivot = m2 / 2 * (p / (p - 1)) ** (p - 1)
        flags[0] = 0 < b <= bound
        flags[1] = m1 >= pivot and b > bound
        if m1 < pivot and beta0 is not None and beta1 is not None:
            flags[2] = (bound <= b <= beta0) or (b >= max(beta1, bound))
    elif p < 2:
        upper = (p - 1) * m1 ** ((p - 2) / e) * m2 ** (p / e)
        lin = (p * m2 - m1 * (2 - p)) / 2
        flags[3] = b >= upper
        if 0 < m1 < p * m2 / (2 - p):
            cap = (
                2 * (p - 1) * (2 - p) ** ((2 - p) / e) * (1 / p) ** (p / e)
                * m1 ** (p / e) * m2 ** ((p - 2) / e)
            )
            flags[4] = 0 < b <= min(lin, cap)
        flags[5] = max(lin, 0.0) < b < upper
    else:
        flags[6] = (0 < b < m2) or (b > m1)
    return tuple(flags)


def b_conditions(normalized: NormalizedParams, beta_tilde0=None, beta_tilde1=None) -> tuple:
    """Flags for the seven no-simultaneous-root conditions B1..B7 (β̃ > 0 only)."""
    p, mu, b = normalized.p, normalized.mu, normalized.beta_tilde
    flags = [False] * 7
    if not b > 0:
        return tuple(flags)
    if beta_tilde0 is None and beta_tilde1 is None:
        beta_tilde0, beta_tilde1 = beta_tilde_roots(normalized)
    e = 2 * (p - 1)
    if p > 2:
        bound = (p - 1) * mu
        pivot = 0.5 * (p / (p - 1)) ** (p - 1)
        flags[0] = b <= bound
        flags[1] = mu >= pivot and b >= bound
        if 1 < mu < pivot and beta_tilde0 is not None and beta_tilde1 is not None:
            flags[2] = (bound <= b <= beta_tilde0) or (b >= max(beta_tilde1, bound))
    elif p < 2:
        upper = (p - 1) * mu ** ((p - 2) / e)
        lin = (p - mu * (2 - p)) / 2
        flags[3] = b >= upper
        if 1 < mu < p / (2 - p):
            cap = 2 * (p - 1) * (2 - p) ** ((2 - p) / e) * (mu / p) ** (p / e)
            flags[4] = b <= min(lin, cap)
        flags[5] = max(lin, 0.0) < b < upper
    else:
        flags[6] = True
    return tuple(flags)


def classify_conditions(params: SystemParams) -> ConditionReport:
    """Evaluate A1..A7, B1..B7 (on the normalized tuple) and the p = 2 window."""
    beta0, beta1 = beta_roots(params)
    normalized = params.normalized()
    bt0, bt1 = beta_tilde_roots(normalized)
    window = params.p == 2 and params.mu2 <= params.beta <= params.mu1
    notes = []
    if window:
        notes.append("p = 2 and mu2 <= beta <= mu1: no positive solutions")
    return ConditionReport(
        a_flags=a_conditions(params, beta0, beta1),
        b_flags=b_conditions(normalized, bt0, bt1),
        beta0=beta0,
        beta1=beta1,
        nonexistence_window=window,
        beta_tilde0=bt0,
        beta_tilde1=bt1,
        notes=tuple(notes),
    )


def simultaneous_roots(normalized: NormalizedParams, n_points: int = 100_000, tol: float = 1e-6,
                       tau_max: float = 1e6, region: Interval | None = None):
    """Dense scan for common roots of F(τ) = μ(2−p) and g~(τ) = 0 inside D~.

    Roots of g~ are located by sign changes on ``n_points`` log-spaced nodes
    (the unbounded region is truncated at ``tau_max``), refined, and kept when
    ``|F − μ(2−p)| <= tol`` there as well. Returns the list of such τ.
    ``region`` overrides D~ as the search interval.
    """
    region = region_Dtilde(normalized) if region is None else region
    lo = max(region.lo, 1e-8)
    hi = min(region.hi, tau_max)
    taus = np.geomspace(lo, hi, n_points)
    # open ends of D~ are excluded
    taus = taus[(taus > region.lo) & (taus < region.hi)]
    g = eval_g_tilde(normalized, taus)
    target = normalized.mu * (2 - normalized.p)

    def gfun(t):
        return eval_g_tilde(normalized, t)

    hits = []
    candidates = list(taus[g == 0.0])
    for i in np.flatnonzero(g[:-1] * g[1:] < 0):
        candidates.append(refine_root(gfun, taus[i], taus[i + 1]))
    # tangential zeros: discrete local minima of |g~| that are already small
    ag = np.abs(g)
    for i in np.flatnonzero((ag[1:-1] <= ag[:-2]) & (ag[1:-1] <= ag[2:]) & (ag[1:-1] <= tol)) + 1:
        res = minimize_scalar(lambda t: abs(gfun(t)), bounds=(taus[i - 1], taus[i + 1]),
                              method="bounded", options={"xatol": 1e-14})
        if abs(gfun(res.x)) <= tol:
            candidates.append(float(res.x))
    for t in candidates:
        F, _ = eval_F_G(normalized, t)
        if abs(F - target) <= tol:
            hits.append(float(t))
    return hits
