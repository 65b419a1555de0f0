"""Least-energy level of the coupled system by direct minimization.

The coupled quotient

    Q(u, v) = (‖u‖²_H + ‖v‖²_H) / (∫ μ1|u|^{2p} + 2β|u|^p|v|^p + μ2|v|^{2p})^{1/p},

with ‖u‖²_H = ∫(1 + |ξ|^{2s})|û|², is homogeneous of degree zero, so it is
minimized by descent on log Q over pairs normalized to unit denominator.
At (w, τw) it equals f(τ)·S, which is what ties the minimization back to the
landscape of f.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .coupling_algebra import SystemParams, eval_f
from .errors import HypothesisError, NonConvergence, ParameterError
from .ground_state import GroundState, solve_w
from .spectral_core import Field, Grid, integrate
from .tau_solver import amplitude, classify_landscape, tau_min_and_Smu

__all__ = [
    "CoupledState",
    "quotient",
    "energy",
    "el_rescale",
    "minimize_quotient",
    "proportional_state",
    "vector_residual",
    "check_Bprime",
    "young_gap",
    "level_from_landscape",
]

FLOOR = 1e-14


@dataclass(frozen=True)
class CoupledState:
    u: Field
    v: Field
    quotient_value: float
    energy_value: float
    steps: int = 0
    history: tuple = ()
    candidates: tuple = ()
    seed_label: str = ""

    def as_dict(self) -> dict:
        return {
            "quotient": self.quotient_value,
            "energy": self.energy_value,
            "steps": self.steps,
            "seed": self.seed_label,
            "candidates": [
                {"seed": lab, "quotient": q, "steps": n} for lab, q, n in self.candidates
            ],
        }


def _H_norm_sq(grid: Grid, s: float, x: np.ndarray) -> float:
    c = np.abs(grid.forward(x)) ** 2 * grid.rfft_weights * (1 + grid.symbol(s))
    return float(grid.cell * np.sum(c) / grid.n**grid.N)


def _spow(x: np.ndarray, e: float) -> np.ndarray:
    """sign(x)|x|^e, finite at x = 0 for every e > 0."""
    return np.sign(x) * np.abs(x) ** e


def _density(params: SystemParams, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    p = params.p
    au, av = np.abs(u) ** p, np.abs(v) ** p
    return params.mu1 * au**2 + 2 * params.beta * au * av + params.mu2 * av**2


def _nonlinear(params: SystemParams, u: np.ndarray, v: np.ndarray):
    """Right-hand sides of the coupled system at (u, v)."""
    p, b = params.p, params.beta
    au, av = np.abs(u) ** p, np.abs(v) ** p
    nu = params.mu1 * _spow(u, 2 * p - 1) + b * av * _spow(u, p - 1)
    nv = params.mu2 * _spow(v, 2 * p - 1) + b * au * _spow(v, p - 1)
    return nu, nv


def _AD(params: SystemParams, grid: Grid, u: np.ndarray, v: np.ndarray):
    A = _H_norm_sq(grid, params.s, u) + _H_norm_sq(grid, params.s, v)
    D = integrate(_density(params, u, v), grid)
    return A, D


def _values(x):
    return x.values if isinstance(x, Field) else np.asarray(x, dtype=float)


def quotient(params: SystemParams, u, v, grid: Grid | None = None) -> float:
    grid = grid or u.grid
    A, D = _AD(params, grid, _values(u), _values(v))
    if not D > 0:
        raise ParameterError("denominator of the quotient is not positive")
    return A / D ** (1 / params.p)


def energy(params: SystemParams, u, v, grid: Grid | None = None) -> float:
    """I(u, v) = ½(‖u‖²_H + ‖v‖²_H) − (1/2p)∫(μ1|u|^{2p} + 2β|u|^p|v|^p + μ2|v|^{2p})."""
    grid = grid or u.grid
    A, D = _AD(params, grid, _values(u), _values(v))
    return 0.5 * A - D / (2 * params.p)


def el_rescale(params: SystemParams, u, v, grid: Grid | None = None):
    """Scale (u, v) by t = (A/D)^{1/(2p−2)}, which absorbs the Lagrange multiplier."""
    grid = grid or u.grid
    uu, vv = _values(u), _values(v)
    A, D = _AD(params, grid, uu, vv)
    t = (A / D) ** (1 / (2 * params.p - 2))
    return Field(grid, t * uu), Field(grid, t * vv)


def _make_state(params, grid, u, v, steps=0, history=(), candidates=(), label=""):
    uf, vf = Field(grid, u), Field(grid, v)
    ru, rv = el_rescale(params, uf, vf)
    return CoupledState(
        u=uf,
        v=vf,
        quotient_value=quotient(params, uf, vf),
        energy_value=energy(params, ru, rv),
        steps=steps,
        history=tuple(history),
        candidates=tuple(candidates),
        seed_label=label,
    )


# ---------------------------------------------------------------------------
# descent


def _descend(params: SystemParams, grid: Grid, u: np.ndarray, v: np.ndarray, gtol: float,
             descent_tol: float, window: int, max_steps: int):
    """Sobolev-gradient descent on log Q with Armijo backtracking.

    The H-gradient of log Q is d = 2x/A − 2L⁻¹N(x)/D; the trial step A/2
    turns x − αd into the fixed-point map (A/D) L⁻¹N(x). Iterates are
    floored at FLOOR and renormalized to D = 1 after every step.
    """
    p = params.p
    inv = 1 / (1 + grid.symbol(params.s))

    def prep(a, b):
        a, b = np.maximum(a, FLOOR), np.maximum(b, FLOOR)
        A, D = _AD(params, grid, a, b)
        c = D ** (-1 / (2 * p))
        return a * c, b * c

    def logq(a, b):
        A, D = _AD(params, grid, a, b)
        return math.log(A) - math.log(D) / p, A, D

    u, v = prep(u, v)
    val, A, D = logq(u, v)
    history = [math.exp(val)]
    steps = 0
    while True:
        nu, nv = _nonlinear(params, u, v)
        gu = u - (A / D) * grid.apply_symbol(nu, inv)
        gv = v - (A / D) * grid.apply_symbol(nv, inv)
        # relative Euler-Lagrange residual in the H norm
        gnorm = math.sqrt((_H_norm_sq(grid, params.s, gu) + _H_norm_sq(grid, params.s, gv)) / A)
        if gnorm < gtol:
            break
        if len(history) > window and history[-window - 1] - history[-1] <= descent_tol * history[-1]:
            break
        if steps >= max_steps:
            raise NonConvergence(f"descent did not settle in {max_steps} steps (gradient {gnorm:.2e})")
        # slope of log Q along -g in the H inner product is -(2/A)‖g‖²_H
        slope = -2 * gnorm**2
        alpha = 1.0
        while True:
            tu, tv = prep(u - alpha * gu, v - alpha * gv)
            tval, tA, tD = logq(tu, tv)
            if tval <= val + 1e-4 * alpha * slope or alpha < 1e-8:
                break
            alpha *= 0.5
        if tval > val:
            break
        u, v, val, A, D = tu, tv, tval, tA, tD
        steps += 1
        history.append(math.exp(val))
    return u, v, steps, history


def _random_seed(grid: Grid, rng: np.random.Generator):
    """Two Gaussian bumps sharing a random centre, with random widths and heights."""
    center = rng.uniform(-grid.L / 8, grid.L / 8, size=grid.N)
    r2 = sum((c - x0) ** 2 for c, x0 in zip(grid.coords, center))
    out = []
    for _ in range(2):
        width = rng.uniform(0.5, 3.0)
        height = rng.uniform(0.2, 2.0)
        out.append(height * np.exp(-r2 / (2 * width**2)))
    return out


def minimize_quotient(params: SystemParams, grid: Grid, restarts: int = 8, seed: int = 0,
                      ground_state: GroundState | None = None, gtol: float = 1e-8,
                      descent_tol: float = 1e-8, window: int = 25, max_steps: int = 5000,
                      workers: int = 1) -> CoupledState:
    """Best of ``restarts`` random descents plus one seeded at (w, τ_min w).

    Every candidate is kept in ``candidates`` as (label, quotient, steps).
    """
    if not params.beta > 0:
        raise ParameterError("minimize_quotient needs beta > 0")
    if restarts < 0:
        raise ParameterError("restarts must be non-negative")
    gs = ground_state or solve_w(params.s, params.p, grid)
    if gs.grid is not grid and (gs.grid.n, gs.grid.L, gs.grid.N) != (grid.n, grid.L, grid.N):
        raise ParameterError("ground state lives on a different grid")
    land = classify_landscape(params)
    tau = land.tau_min if land.tau_min is not None else land.global_min_tau
    w = gs.w.values

    rng = np.random.default_rng(seed)
    starts = [("informed", w.copy(), tau * w)]
    for i in range(restarts):
        a, b = _random_seed(grid, rng)
        starts.append((f"random-{i}", a, b))

    def run(item):
        label, a, b = item
        return label, _descend(params, grid, a, b, gtol, descent_tol, window, max_steps)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(item) for item in starts]

    candidates = []
    best = None
    for label, (u, v, steps, hist) in results:
        q = quotient(params, u, v, grid)
        candidates.append((label, q, steps))
        if best is None or q < best[1]:
            best = (label, q, u, v, steps, hist)
    label, _, u, v, steps, hist = best
    return _make_state(params, grid, u, v, steps, hist, candidates, label)


def proportional_state(params: SystemParams, gs: GroundState, tau: float,
                       k: float | None = None) -> CoupledState:
    """The pair (k w, τ k w); k defaults to the amplitude of the coupled system."""
    if k is None:
        k = amplitude(params, tau)
    w = gs.w.values
    return _make_state(params, gs.grid, k * w, tau * k * w, label="proportional")


def vector_residual(params: SystemParams, state, rescale: bool = True):
    """Relative L² residuals (r_u, r_v) of both equations of the coupled system.

    ``state`` is a :class:`CoupledState` or a pair of Fields. With
    ``rescale`` the pair is first multiplied by the Euler-Lagrange factor.
    A component whose equation is identically 0 = 0 gets residual 0.
    """
    u, v = (state.u, state.v) if isinstance(state, CoupledState) else state
    grid = u.grid
    if rescale:
        u, v = el_rescale(params, u, v)
    uu, vv = u.values, v.values
    nu, nv = _nonlinear(params, uu, vv)
    m = 1 + grid.symbol(params.s)
    out = []
    for x, n in ((uu, nu), (vv, nv)):
        r = np.linalg.norm(grid.apply_symbol(x, m) - n)
        d = np.linalg.norm(n)
        out.append(0.0 if r == 0 else (r / d if d > 0 else math.inf))
    return tuple(out)


# ---------------------------------------------------------------------------
# derivative of the least-energy level in mu1


def _check_hypotheses(params: SystemParams):
    p, b = params.p, params.beta
    if p == 2 and b > params.mu1:
        return
    if 1 < p < 2 and b > 0:
        return
    raise HypothesisError("need beta > mu1 with p = 2, or beta > 0 with 1 < p < 2")


def _level(params: SystemParams, B1: float) -> float:
    tau, k, _ = tau_min_and_Smu(params, 1.0)
    return k**2 * (1 + tau**2) * B1


def check_Bprime(params: SystemParams, gs: GroundState, delta_mu: float):
    """(centered difference of B in μ1, −k_min^{2p} ∫w^{2p} / 2p).

    B(μ1) = k_min²(1 + τ_min²)·(p−1)/(2p)·∫w^{2p} is rebuilt from the landscape
    at μ1 ± δ.
    """
    if not 1e-5 <= delta_mu <= 1e-2:
        raise ParameterError(f"delta_mu must lie in [1e-5, 1e-2], got {delta_mu}")
    _check_hypotheses(params)
    lo, hi = params.with_(mu1=params.mu1 - delta_mu), params.with_(mu1=params.mu1 + delta_mu)
    for q in (lo, hi):
        _check_hypotheses(q)
    p = params.p
    moment = gs.moment()
    B1 = (p - 1) / (2 * p) * moment
    lhs = (_level(hi, B1) - _level(lo, B1)) / (2 * delta_mu)
    _, k, _ = tau_min_and_Smu(params, 1.0)
    rhs = -(k ** (2 * p)) * moment / (2 * p)
    return lhs, rhs


def level_from_landscape(params: SystemParams, gs: GroundState) -> float:
    """B(μ1) through f: B1·f(τ_min)^{p/(p−1)}; equal to the k², τ² form."""
    tau, _, _ = tau_min_and_Smu(params, 1.0)
    p = params.p
    return (p - 1) / (2 * p) * gs.moment() * eval_f(params, tau) ** (p / (p - 1))


def young_gap(u, z, p: float, grid: Grid | None = None) -> float:
    """∫|u|^{2p} − ∫|u|^p|z|^p after rescaling z to the same 2p-norm as u (≥ 0)."""
    grid = grid or u.grid
    uu, zz = _values(u), _values(z)
    Mu = integrate(np.abs(uu) ** (2 * p), grid)
    Mz = integrate(np.abs(zz) ** (2 * p), grid)
    zz = zz * (Mu / Mz) ** (1 / (2 * p))
    return Mu - integrate(np.abs(uu) ** p * np.abs(zz) ** p, grid)

