"""Positive ground state of (-Δ)^s w + w = w^{2p-1} by Petviashvili iteration."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coupling_algebra import critical_exponent
from .errors import CollapseToZero, NonConvergence, ParameterError
from .spectral_core import Field, Grid, sobolev_quotient

__all__ = ["GroundState", "solve_w", "compute_S", "scalar_residual"]


@dataclass(frozen=True)
class GroundState:
    w: Field
    s: float
    p: float
    residual_norm: float
    S_value: float
    iterations: int
    residual_history: tuple = ()

    @property
    def grid(self) -> Grid:
        return self.w.grid

    def moment(self) -> float:
        """∫ w^{2p}."""
        g = self.grid
        return float(g.cell * np.sum(self.w.values ** (2 * self.p)))

    def as_dict(self) -> dict:
        return {
            "s": self.s,
            "p": self.p,
            "w0": float(self.w.values.max()),
            "residual_norm": self.residual_norm,
            "S": self.S_value,
            "iterations": self.iterations,
            "grid": {"N": self.grid.N, "n": self.grid.n, "L": self.grid.L},
        }


def scalar_residual(w: np.ndarray, grid: Grid, s: float, p: float) -> float:
    """‖Lw − w^{2p−1}‖₂ / ‖w^{2p−1}‖₂ with L = (-Δ)^s + 1."""
    nonlin = np.abs(w) ** (2 * p - 2) * w
    Lw = grid.apply_symbol(w, 1 + grid.symbol(s))
    return float(np.linalg.norm(Lw - nonlin) / np.linalg.norm(nonlin))


def _recenter(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Move the peak to the origin node, then remove the sub-grid offset.

    The offset along each axis comes from a parabola through the peak and
    its two neighbours; the fractional shift is a phase rotation.
    """
    c = grid.n // 2
    peak = np.unravel_index(np.argmax(u), u.shape)
    u = np.roll(u, [c - i for i in peak], axis=tuple(range(grid.N)))
    offsets = []
    for ax in range(grid.N):
        idx = [c] * grid.N
        line = []
        for d in (-1, 0, 1):
            idx[ax] = c + d
            line.append(u[tuple(idx)])
        fm, f0, fp = line
        curv = fm - 2 * f0 + fp
        offsets.append(0.5 * (fm - fp) / curv if curv < 0 else 0.0)
    if any(abs(o) > 1e-14 for o in offsets):
        phase = sum(k * o * grid.dx for k, o in zip(grid._axes_k, offsets))
        u = grid.backward(grid.forward(u) * np.exp(1j * phase))
    return u


def _symmetrize(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Average over the reflection x_j -> -x_j in every axis."""
    rev = (grid.n - np.arange(grid.n)) % grid.n
    for ax in range(grid.N):
        u = 0.5 * (u + np.take(u, rev, axis=ax))
    return u


def solve_w(s: float, p: float, grid: Grid, tol: float = 1e-10, max_iter: int = 10_000,
            seed: Field | None = None, clip_until: float = 1e-4) -> GroundState:
    """Petviashvili iteration for the scalar ground state.

    u ← c^γ L⁻¹(|u|^{2p−2}u) with c = ⟨Lu, u⟩ / ⟨|u|^{2p−2}u, u⟩ and
    γ = (2p−1)/(2p−2), started from a Gaussian (or ``seed``). Every step
    recentres on the peak and symmetrizes. While the relative change exceeds
    ``clip_until`` the positive part is taken; after that the iteration runs
    unclipped, since spectral undershoot in the far tails would otherwise
    pin it to a non-solution. Stops once both the relative change and the
    relative residual are below ``tol``.
    """
    if not 0 < s <= 1:
        raise ParameterError(f"need 0 < s <= 1, got {s}")
    crit = critical_exponent(s, grid.N)
    if not 1 < p < crit / 2:
        raise ParameterError(f"need 1 < p < {crit / 2}, got p={p}")
    if tol < 1e-12:
        raise ParameterError(f"tol must be >= 1e-12, got {tol}")

    m = 1 + grid.symbol(s)
    gamma = (2 * p - 1) / (2 * p - 2)
    if seed is None:
        u = np.exp(-grid.radius**2 / 2)
    else:
        u = np.array(seed.values, dtype=float)

    history = []
    change = residual = math.inf
    for it in range(1, max_iter + 1):
        nonlin = np.abs(u) ** (2 * p - 2) * u
        Lu = grid.backward(m * grid.forward(u))
        num, den = float(np.sum(Lu * u)), float(np.sum(nonlin * u))
        if not (den > 0 and num > 0) or not math.isfinite(num / den) or num / den < 1e-300:
            raise CollapseToZero(f"stabilizing factor degenerate at iteration {it}")
        new = (num / den) ** gamma * grid.backward(grid.forward(nonlin) / m)
        norm = np.linalg.norm(new)
        if norm == 0:
            raise CollapseToZero(f"iterate vanished at iteration {it}")
        change = float(np.linalg.norm(new - u) / norm)
        if change > clip_until:
            new = np.maximum(new, 0.0)
        u = _symmetrize(_recenter(new, grid), grid)
        residual = scalar_residual(u, grid, s, p)
        history.append(residual)
        if change < tol and residual < tol:
            break
    else:
        raise NonConvergence(
            f"no convergence in {max_iter} iterations (change {change:.2e}, residual {residual:.2e})"
        )
    # drop round-off undershoot when that costs nothing in the residual
    clipped = np.maximum(u, 0.0)
    clipped_res = scalar_residual(clipped, grid, s, p)
    if clipped_res < tol:
        u, residual = clipped, clipped_res
    w = Field(grid, u)
    return GroundState(
        w=w,
        s=s,
        p=p,
        residual_norm=residual,
        S_value=sobolev_quotient(w, s, p),
        iterations=it,
        residual_history=tuple(history),
    )


def compute_S(gs: GroundState) -> float:
    """The best constant S, attained by the ground state."""
    return sobolev_quotient(gs.w, gs.s, gs.p)
