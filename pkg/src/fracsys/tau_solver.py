"""Roots of the coupling function and the critical-point landscape of f.

A proportional solution ``(k1 w, tau0 k1 w)`` of the coupled system exists for
every root ``tau0`` of g in the region D with both amplitude factors positive;
the interior critical points of f are exactly the positive roots of g, so the
same root machinery drives both :func:`solve_tau0` and
:func:`classify_landscape`.

Roots of g are found without sampling: h' has at most one positive zero, so h
has at most two, which split (0, ∞) into pieces where g is monotone and holds
at most one root each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._roots import piece_roots, refine_root
from .coupling_algebra import (
    Interval,
    NormalizedParams,
    SystemParams,
    eval_dg,
    eval_dh,
    eval_f,
    eval_g,
    eval_h,
    eval_l,
    region_D,
)
from .errors import (
    NoRoot,
    NonConvergence,
    OutOfRange,
    ParameterError,
    PositivityViolation,
    SemitrivialMinimizer,
    Unclassified,
)

__all__ = [
    "TauSolution",
    "CriticalPoint",
    "Landscape",
    "amplitude",
    "g_roots",
    "solve_tau0",
    "classify_landscape",
    "tau_min_and_Smu",
    "solve_beta_k",
]

KC_TOL = 1e-10


@dataclass(frozen=True)
class TauSolution:
    tau0: float
    k1: float
    region: Interval
    positivity_ok: tuple
    method: str = "bracket"

    def as_dict(self) -> dict:
        return {
            "tau0": self.tau0,
            "k1": self.k1,
            "region": self.region.as_list(),
            "positivity_ok": list(self.positivity_ok),
            "method": self.method,
        }


@dataclass(frozen=True)
class CriticalPoint:
    tau: float
    kind: str  # "min", "max" or "saddle"
    f_value: float


@dataclass(frozen=True)
class Landscape:
    critical_points: tuple
    tau_min: float | None
    k_min: float | None
    case_label: str
    global_min_tau: float

    def as_dict(self) -> dict:
        return {
            "case_label": self.case_label,
            "critical_points": [
                {"tau": c.tau, "kind": c.kind, "f": c.f_value} for c in self.critical_points
            ],
            "tau_min": self.tau_min,
            "k_min": self.k_min,
        }


def amplitude(params: SystemParams, tau: float) -> float:
    """k solving (μ1 + βτ^p) k^{2p−2} = 1."""
    base = params.mu1 + params.beta * tau**params.p
    if base <= 0:
        raise PositivityViolation(f"mu1 + beta tau^p = {base} <= 0")
    return base ** (-1 / (2 * params.p - 2))


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def _limit_signs(params: SystemParams):
    """Signs of g and h as τ → 0+ and τ → ∞, read off the dominant terms."""
    p, b, m1, m2 = params.p, params.beta, params.mu1, params.mu2
    if p > 2:
        return 1, -1, _sign(-b), -1
    if p < 2:
        return _sign(-b), _sign(b), _sign(b), _sign(b)
    # g = (μ1 − β) + (β − μ2)τ²; a vanishing coefficient hands over to the other
    g0 = _sign(m1 - b) or _sign(b - m2)
    ginf = _sign(b - m2) or _sign(m1 - b)
    return g0, ginf, _sign(b - m2), _sign(b - m2)


def _h_turning_points(params: SystemParams) -> list:
    p, b = params.p, params.beta
    if p == 2 or b <= 0:
        return []
    return [(b / (params.mu2 * (p - 1))) ** (1 / (p - 2))]


def _outer_bounds(params: SystemParams):
    """τ_lo, τ_hi beyond which neither g nor h can change sign."""
    g0, ginf, h0, hinf = _limit_signs(params)
    turning = _h_turning_points(params)
    p, b = params.p, params.beta

    lo = min([1e-3] + [t / 2 for t in turning])
    while not (
        _sign(eval_g(params, lo)) == g0 and (h0 == 0 or _sign(eval_h(params, lo)) == h0)
    ):
        lo /= 2
        if lo < 1e-300:
            raise NonConvergence("could not isolate the tau -> 0 asymptotics of g")

    hi = max([2.0] + [2 * t for t in turning])
    try:
        if p > 2 and b > 0:
            hi = max(hi, 2 * (2 * b / p) ** (1 / (p - 2)))
        elif p < 2 and b > 0:
            # βτ^p overtakes μ2 τ^{2p−2} near (μ2/β)^{1/(2−p)}, which can be huge
            hi = max(hi, 2 * (4 * params.mu2 / b) ** (1 / (2 - p)))
    except OverflowError:
        raise NonConvergence("tau -> inf asymptotics lie beyond floating-point range") from None
    start = hi
    while not (
        _sign(eval_g(params, hi)) == ginf and (hinf == 0 or _sign(eval_h(params, hi)) == hinf)
    ):
        hi *= 2
        if hi > start * 2.0**60 or not math.isfinite(eval_g(params, hi)):
            raise NonConvergence("could not isolate the tau -> inf asymptotics of g")
    return lo, hi


def _g_pieces(params: SystemParams):
    lo, hi = _outer_bounds(params)
    h_edges = [lo] + _h_turning_points(params) + [hi]
    h_roots = piece_roots(lambda t: eval_h(params, t), h_edges, lambda t: eval_dh(params, t))
    return [lo] + h_roots + [hi]


def g_roots(params: SystemParams, touch_tol: float = 0.0) -> list:
    """All positive roots of g, ascending. Requires β ≠ 0."""
    if params.beta == 0:
        raise ParameterError("g_roots needs beta != 0")
    edges = _g_pieces(params)
    return piece_roots(
        lambda t: eval_g(params, t), edges, lambda t: eval_dg(params, t), touch_tol=touch_tol
    )


def _check_window(params: SystemParams):
    p, b, m1, m2 = params.p, params.beta, params.mu1, params.mu2
    if b == 0:
        raise NoRoot("beta = 0 decouples the system")
    if b <= -math.sqrt(m1 * m2):
        raise NoRoot("beta <= -sqrt(mu1 mu2): no positive proportional solution")
    if p == 2 and m2 <= b <= m1:
        raise NoRoot("p = 2 and beta in [mu2, mu1]: no positive solutions")


def _make_solution(params: SystemParams, tau: float, region: Interval, method: str) -> TauSolution:
    p, b = params.p, params.beta
    first = params.mu1 + b * tau**p
    second = params.mu2 * tau ** (2 * p - 2) + b * tau ** (p - 2)
    ok = (first > 0, second > 0)
    if not all(ok):
        raise PositivityViolation(f"tau0={tau}: amplitude factors {first}, {second}")
    k1 = amplitude(params, tau)
    kk = k1 ** (2 * p - 2)
    if abs(first * kk - 1) > KC_TOL or abs(second * kk - 1) > KC_TOL:
        raise NonConvergence(f"amplitude relations not met at tau0={tau}")
    return TauSolution(tau0=tau, k1=k1, region=region, positivity_ok=ok, method=method)


def solve_tau0(params: SystemParams, method: str = "auto") -> list:
    """Every root τ0 of g in D that yields a positive proportional solution.

    ``method="auto"`` uses the closed form √((μ1−β)/(μ2−β)) when p = 2;
    ``method="bracket"`` always brackets and refines. Raises NoRoot outside
    the existence windows, PositivityViolation if the amplitude relation
    fails at a root.
    """
    if method not in ("auto", "bracket"):
        raise ValueError(f"unknown method {method!r}")
    _check_window(params)
    p, b, m1, m2 = params.p, params.beta, params.mu1, params.mu2
    region = region_D(params)

    if p == 2 and method == "auto":
        tau = math.sqrt((m1 - b) / (m2 - b))
        return [_make_solution(params, tau, region, "closed_form")]

    if b < 0:
        # h is strictly decreasing for beta < 0, so g has at most two positive
        # roots; g > 0 at lo and g < 0 at hi leaves exactly one between.
        lo = (abs(b) / m2) ** (1 / p)
        hi = (m1 / abs(b)) ** (1 / p)
        tau = refine_root(lambda t: eval_g(params, t), lo, hi, lambda t: eval_dg(params, t))
        return [_make_solution(params, tau, region, "bracket")]

    roots = [t for t in g_roots(params) if t in region]
    if not roots:
        raise NoRoot(f"no root of g in D={region.as_list()}")
    return [_make_solution(params, t, region, "bracket") for t in roots]


def _classify_point(left: int, right: int) -> str:
    if left > 0 > right:
        return "max"
    if left < 0 < right:
        return "min"
    return "saddle"


_CASES = {
    ("min", "max"): "unique_max_min_at_0",
    ("max", "min"): "unique_min_max_at_0",
    ("min", "max", "min", "max"): "four_point_max_min_max",
    ("max", "min", "max", "min"): "four_point_min_max_min",
    ("min",): "monotone_increasing",
}


def classify_landscape(params: SystemParams, scan_points: int = 2000) -> Landscape:
    """Census of the critical points of f on [0, ∞) for β > 0.

    τ = 0 is always critical; interior critical points are the roots of g and
    are typed by the sign of f' = 2τg/H^{1+1/p} on either side. A coarse
    log-spaced scan of g cross-checks the root count; any disagreement raises
    Unclassified rather than being resolved silently.
    """
    if not params.beta > 0:
        raise ParameterError("classify_landscape needs beta > 0")
    scale = max(params.mu1, params.mu2, params.beta)
    edges = _g_pieces(params)
    lo, hi = edges[0], edges[-1]
    roots = piece_roots(
        lambda t: eval_g(params, t), edges, lambda t: eval_dg(params, t), touch_tol=1e-13 * scale
    )

    # sign of g on each gap between consecutive roots (geometric midpoints)
    nodes = [lo] + roots + [hi]
    gap_signs = []
    for a, b in zip(nodes[:-1], nodes[1:]):
        gap_signs.append(_sign(eval_g(params, math.sqrt(a * b))))
    if 0 in gap_signs:
        raise Unclassified("g vanishes between its isolated roots")

    kind0 = "min" if gap_signs[0] > 0 else "max"
    points = [CriticalPoint(0.0, kind0, eval_f(params, 0.0))]
    for i, t in enumerate(roots):
        kind = _classify_point(gap_signs[i], gap_signs[i + 1])
        points.append(CriticalPoint(t, kind, eval_f(params, t)))

    kinds = tuple(c.kind for c in points if c.kind != "saddle")
    if any(a == b for a, b in zip(kinds[:-1], kinds[1:])) or kinds not in _CASES:
        raise Unclassified(f"critical-point pattern {kinds} fits no known case")

    scan = np.sign(eval_g(params, np.geomspace(lo, hi, scan_points)))
    changes = int(np.count_nonzero(scan[:-1] * scan[1:] < 0))
    simple = len(kinds) - 1
    if changes > simple or (simple - changes) % 2:
        raise Unclassified(f"scan sees {changes} sign changes, census has {simple}")

    minima = [c for c in points if c.kind == "min"]
    best = min(minima, key=lambda c: c.f_value)
    tau_min = k_min = None
    # when 0 is a maximum, f falls into the first interior minimum, so f(τ_min) < f(0)
    # holds even if the two values round to the same float
    if best.tau > 0 and (kind0 == "max" or best.f_value < points[0].f_value):
        tau_min = best.tau
        k_min = amplitude(params, tau_min)
    return Landscape(
        critical_points=tuple(points),
        tau_min=tau_min,
        k_min=k_min,
        case_label=_CASES[kinds],
        global_min_tau=best.tau,
    )


def tau_min_and_Smu(params: SystemParams, S: float):
    """(τ_min, k_min, S_{μ1,μ2} = f(τ_min) S) for the positive least-energy level."""
    land = classify_landscape(params)
    if land.tau_min is None:
        raise SemitrivialMinimizer(
            f"global minimum of f at tau={land.global_min_tau}: minimizer is semi-trivial"
        )
    t = land.tau_min
    stationarity = t * eval_g(params, t)
    if abs(stationarity) > 1e-10 * max(1.0, t) * max(params.mu1, abs(params.beta)):
        raise NonConvergence(f"tau_min={t} fails stationarity ({stationarity:.3e})")
    return t, land.k_min, eval_f(params, t) * S


def _l_of(normalized: NormalizedParams, beta_tilde: float) -> float:
    np_ = NormalizedParams(mu=normalized.mu, beta_tilde=beta_tilde, p=normalized.p,
                           s=normalized.s, N=normalized.N)
    tau = solve_tau0(np_.as_system(), method="bracket")[0].tau0
    return eval_l(np_, tau)


def solve_beta_k(normalized: NormalizedParams, lambda_k: float, tol: float = 1e-10) -> float:
    """β̃ in (−√μ, 0) with l(β̃) = λ_k; l decreases there from +∞ to 2p − 1.

    Only ``mu``, ``p``, ``s`` and ``N`` of ``normalized`` are used.
    """
    p, mu = normalized.p, normalized.mu
    if not lambda_k > 2 * p - 1:
        raise OutOfRange(f"lambda_k={lambda_k} <= 2p-1: l exceeds 2p-1 on (-sqrt(mu), 0)")
    root_mu = math.sqrt(mu)

    def resid(bt):
        return _l_of(normalized, bt) - lambda_k

    hi = -1e-3 * root_mu
    while resid(hi) >= 0:
        hi /= 10
        if hi > -1e-15 * root_mu:
            raise OutOfRange(f"lambda_k={lambda_k} too close to 2p-1")
    eps = 1e-3
    while resid(-root_mu * (1 - eps)) <= 0:
        eps /= 10
        if eps < 1e-13:
            raise OutOfRange(f"lambda_k={lambda_k} beyond the numerically attainable range")
    lo = -root_mu * (1 - eps)
    bt = refine_root(resid, lo, hi)
    if abs(resid(bt)) > tol * max(1.0, lambda_k):
        raise NonConvergence(f"l(beta~) missed lambda_k by {resid(bt):.3e}")
    return bt
