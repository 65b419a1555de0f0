"""Linearization at a proportional solution and its kernel.

At ``(U, V) = (k1 w, τ0 k1 w)`` the linearized system is

    L φ = w^{2p−2} (a φ + b ψ),    L ψ = w^{2p−2} (b φ + c ψ),    L = (−Δ)^s + 1,

with constant coefficients a, b, c. The symmetric matrix K = [[a, b], [b, c]]
has eigenvalues 2p − 1 and f̃, so the kernel is governed by where these two
numbers sit in the weighted spectrum L Φ = λ w^{2p−2} Φ. The 2p − 1 branch
always produces the N translation modes; the system is degenerate exactly
when f̃ hits some λ_k as well.

Numerically everything is done on the symmetric, compact operator
A = L^{−1/2} (W ⊗ K) L^{−1/2}, whose largest eigenvalues are resolved quickly
by Lanczos. Eigenvalues of A are κ/λ_k, and the singular values of the
preconditioned linearization I − A are |1 − α|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .coupling_algebra import NormalizedParams, eval_g_tilde, g_tilde_scale
from .errors import ConstraintError, ParameterError, WeightFloorTooSmall, ZeroCoupling
from .ground_state import GroundState
from .spectral_core import Field, spectral_derivative
from .tau_solver import TauSolution

__all__ = [
    "LinearizationCoeffs",
    "WeightedSpectrum",
    "NondegeneracyReport",
    "linearization_coeffs",
    "check_claims",
    "weighted_spectrum",
    "kernel_dimension",
    "scalar_kernel_dimension",
    "cosine_similarity",
]

MAX_K = 40
MAX_CONDITION = 1e12
ROOT_TOL = 1e-8


@dataclass(frozen=True)
class LinearizationCoeffs:
    a: float
    b: float
    c: float
    gamma_plus: float
    gamma_minus: float
    f_tilde: float
    theta: float
    p: float
    beta_tilde: float

    @property
    def gamma(self) -> float:
        """The root γ with a − bγ = 2p − 1 (γ₋ for β̃ < 0, γ₊ for β̃ > 0)."""
        return self.gamma_minus if self.beta_tilde < 0 else self.gamma_plus

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.b, self.c]])

    def as_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "gamma_plus": self.gamma_plus,
            "gamma_minus": self.gamma_minus,
            "f_tilde": self.f_tilde,
            "theta": self.theta,
        }


def _gamma_roots(a: float, b: float, c: float):
    """Roots (γ₊, γ₋) of bγ² + (c − a)γ − b = 0.

    The labels are chosen so that a − bγ = 2p − 1 holds for γ₋ when b < 0
    and for γ₊ when b > 0; that root is always the negative one, and equals
    −τ0 because (1, τ0) spans the translation direction of K. Concretely
    γ± = q ∓ sign(b)√(q² + 1) with q = (a − c)/2b, evaluated without
    cancellation through γ₊γ₋ = −1.
    """
    q = (a - c) / (2 * b)
    r = math.hypot(q, 1.0)
    pos = q + r if q >= 0 else -1.0 / (q - r)
    neg = q - r if q < 0 else -1.0 / (q + r)
    return (neg, pos) if b > 0 else (pos, neg)


def linearization_coeffs(normalized: NormalizedParams, sol: TauSolution | float) -> LinearizationCoeffs:
    """a, b, c, γ±, f̃ and θ at the root τ0 of the normalized coupling function.

    ``sol`` may be a :class:`TauSolution` or the bare ratio τ0; the ratio is
    the same for the original and the normalized system, while the
    amplitude is recomputed from the normalized coefficients.
    """
    bt, p, mu = normalized.beta_tilde, normalized.p, normalized.mu
    if bt == 0:
        raise ZeroCoupling("beta_tilde = 0: the linearization decouples")
    tau = float(sol.tau0 if isinstance(sol, TauSolution) else sol)
    resid = eval_g_tilde(normalized, tau)
    if abs(resid) > ROOT_TOL * g_tilde_scale(normalized, tau):
        raise ConstraintError(f"tau0={tau} is not a root of g~ (residual {resid:.3e})")
    base = mu + bt * tau**p
    if base <= 0:
        raise ConstraintError("mu + beta_tilde tau0^p must be positive")
    kk = 1.0 / base  # k^{2p-2}
    a = (mu * (2 * p - 1) + bt * (p - 1) * tau**p) * kk
    b = bt * p * tau ** (p - 1) * kk
    c = ((2 * p - 1) * tau ** (2 * p - 2) + bt * (p - 1) * tau ** (p - 2)) * kk
    gp, gm = _gamma_roots(a, b, c)
    g = gm if bt < 0 else gp
    f_tilde = b * g + c
    theta = g + (2 * p - 1 - f_tilde) / b
    return LinearizationCoeffs(a, b, c, gp, gm, f_tilde, theta, p, bt)


def check_claims(coeffs: LinearizationCoeffs, normalized: NormalizedParams, tol: float = 1e-10):
    """(f̃ ≠ 1, f̃ < 2p − 1), each decided with margin ``tol``; needs β̃ > 0."""
    if not normalized.beta_tilde > 0:
        raise ParameterError("the claims concern beta_tilde > 0")
    p = normalized.p
    return abs(coeffs.f_tilde - 1) > tol, coeffs.f_tilde < 2 * p - 1 - tol


# ---------------------------------------------------------------------------
# weighted eigenproblem


@dataclass(frozen=True)
class WeightedSpectrum:
    eigenvalues: tuple
    eigenfields: tuple
    weight: Field
    weight_floor: float
    exclusion_radius: float | None

    def orthogonality_defect(self) -> float:
        """max |∫WΦkΦm| / √(∫WΦk² ∫WΦm²) over k ≠ m."""
        g = self.weight.grid
        W = self.weight.values
        P = np.array([f.values.ravel() for f in self.eigenfields])
        G = g.cell * (P * W.ravel()) @ P.T
        d = np.sqrt(np.diag(G))
        G = G / np.outer(d, d)
        np.fill_diagonal(G, 0.0)
        return float(np.abs(G).max()) if len(P) > 1 else 0.0

    def as_dict(self) -> list:
        return [float(x) for x in self.eigenvalues]


def _weight(gs: GroundState, weight_floor: float):
    if weight_floor < 1 / MAX_CONDITION:
        raise WeightFloorTooSmall(
            f"weight floor {weight_floor:g} implies conditioning above {MAX_CONDITION:g}"
        )
    w = gs.w.values
    W = np.abs(w) ** (2 * gs.p - 2)
    cut = W < weight_floor * W.max()
    radius = float(gs.grid.radius[cut].min()) if cut.any() else None
    return np.where(cut, 0.0, W), radius


def _v0(size: int) -> np.ndarray:
    # fixed seed: the ground state itself would miss every odd mode
    return np.random.default_rng(12345).standard_normal(size)


def weighted_spectrum(gs: GroundState, K: int = 6, tol: float = 0.0,
                      weight_floor: float = 1e-10) -> WeightedSpectrum:
    """First ``K`` eigenpairs of L Φ = λ w^{2p−2} Φ.

    Lanczos on L^{−1/2} W L^{−1/2}, whose eigenvalues are 1/λ; eigenfields are
    mapped back by Φ = L^{−1/2} y and scaled to ∫ w^{2p−2} Φ² = 1. Nodes where
    the weight falls below ``weight_floor`` times its maximum are dropped from W.
    """
    if not 1 <= K <= MAX_K:
        raise ParameterError(f"need 1 <= K <= {MAX_K}, got {K}")
    grid = gs.grid
    W, radius = _weight(gs, weight_floor)
    half = (1 + grid.symbol(gs.s)) ** -0.5
    shape = grid.shape

    def matvec(y):
        z = grid.apply_symbol(y.reshape(shape), half)
        return grid.apply_symbol(W * z, half).ravel()

    n = W.size
    op = LinearOperator((n, n), matvec=matvec, dtype=float)
    vals, vecs = eigsh(op, k=K, which="LA", tol=tol, v0=_v0(n))
    order = np.argsort(vals)[::-1]
    lam, fields = [], []
    for i in order:
        phi = grid.apply_symbol(vecs[:, i].reshape(shape), half)
        norm = math.sqrt(grid.cell * np.sum(W * phi**2))
        phi = phi / norm
        if phi.flat[np.argmax(np.abs(phi))] < 0:
            phi = -phi
        lam.append(1.0 / vals[i])
        fields.append(Field(grid, phi))
    return WeightedSpectrum(tuple(lam), tuple(fields), Field(grid, W), weight_floor, radius)


def cosine_similarity(u: Field, v: Field) -> float:
    """|⟨u, v⟩| / (‖u‖ ‖v‖)."""
    a, b = u.values.ravel(), v.values.ravel()
    return float(abs(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b)))


# ---------------------------------------------------------------------------
# kernel of the linearized operator


@dataclass(frozen=True)
class _KernelResult:
    singular_values: tuple
    kernel_dim: int
    kernel_gap: float
    basis: np.ndarray  # columns: kernel vectors in preconditioned variables


def _kernel(gs: GroundState, Kmat: np.ndarray, grid_tol: float, n_values: int,
            weight_floor: float) -> _KernelResult:
    """Smallest singular values of I − A, A = L^{−1/2}(W ⊗ K)L^{−1/2}.

    Top eigenvalues of A are computed in growing batches until the
    ``n_values`` smallest |1 − α| are certified (every eigenvalue not yet
    computed is below the smallest computed one).
    """
    grid = gs.grid
    W, _ = _weight(gs, weight_floor)
    half = (1 + grid.symbol(gs.s)) ** -0.5
    m = Kmat.shape[0]
    shape = grid.shape
    n = W.size

    def matvec(y):
        comps = [grid.apply_symbol(c.reshape(shape), half) for c in y.reshape(m, n)]
        out = []
        for i in range(m):
            mixed = sum(Kmat[i, j] * comps[j] for j in range(m))
            out.append(grid.apply_symbol(W * mixed, half).ravel())
        return np.concatenate(out)

    op = LinearOperator((m * n, m * n), matvec=matvec, dtype=float)
    k = n_values + 4
    while True:
        vals, vecs = eigsh(op, k=k, which="LA", tol=0.0, v0=_v0(m * n))
        sv = np.abs(1 - vals)
        certified = sv <= 1 - vals.min()
        if certified.sum() >= n_values or k >= 4 * MAX_K:
            break
        k *= 2
    order = np.argsort(sv)
    order = order[certified[order]][:n_values]
    sv, vecs = sv[order], vecs[:, order]
    top = sv.max()
    dim = int(np.count_nonzero(sv <= grid_tol * top))
    if dim == 0:
        gap = 0.0
    elif dim < len(sv):
        gap = float(sv[dim] / sv[dim - 1]) if sv[dim - 1] > 0 else math.inf
    else:
        gap = math.inf
    return _KernelResult(tuple(float(x) for x in sv), dim, gap, vecs[:, :dim])


def _basis_check(gs: GroundState, Kmat: np.ndarray, weights, kernel: np.ndarray, weight_floor: float):
    """Residual and alignment of the predicted kernel (weights_i ∂w/∂x_j).

    Returns the largest relative image norm ‖(I − A)ỹ‖/‖ỹ‖ over j (with
    ỹ = L^{1/2} of the predicted vector) and the smallest fraction of ỹ
    captured by the computed kernel.
    """
    grid = gs.grid
    W, _ = _weight(gs, weight_floor)
    full = (1 + grid.symbol(gs.s)) ** 0.5
    half = 1 / full
    residuals, alignments = [], []
    for j in range(grid.N):
        dw = spectral_derivative(gs.w, j).values
        y = np.concatenate([grid.apply_symbol(c * dw, full).ravel() for c in weights])
        ny = np.linalg.norm(y)
        # A ỹ = L^{-1/2} W K v, with v the predicted vector itself
        comps = [c * dw for c in weights]
        img = []
        for i in range(len(weights)):
            mixed = sum(Kmat[i, k] * comps[k] for k in range(len(weights)))
            img.append(grid.apply_symbol(W * mixed, half).ravel())
        r = y - np.concatenate(img)
        residuals.append(float(np.linalg.norm(r) / ny))
        if kernel.shape[1]:
            proj = kernel @ (kernel.T @ y)
            alignments.append(float(np.linalg.norm(proj) / ny))
        else:
            alignments.append(0.0)
    return max(residuals), min(alignments)


@dataclass(frozen=True)
class NondegeneracyReport:
    params: dict
    coeffs: LinearizationCoeffs | None
    spectrum: WeightedSpectrum
    f_tilde_distances: tuple
    kernel_dim: int
    kernel_gap: float
    verdict: str
    singular_values: tuple = ()
    basis_residual: float = math.nan
    kernel_alignment: float = math.nan
    grid_tol: float = 1e-6
    notes: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        def num(x):
            return None if x is None or not math.isfinite(x) else float(x)

        return {
            "params": dict(self.params),
            "coeffs": None if self.coeffs is None else self.coeffs.as_dict(),
            "spectrum": self.spectrum.as_dict(),
            "distances": [float(d) for d in self.f_tilde_distances],
            "kernel_dim": self.kernel_dim,
            "kernel_gap": num(self.kernel_gap),
            "verdict": self.verdict,
            "singular_values": list(self.singular_values),
            "basis_residual": num(self.basis_residual),
            "kernel_alignment": num(self.kernel_alignment),
            "grid_tol": self.grid_tol,
            "exclusion_radius": self.spectrum.exclusion_radius,
            "notes": list(self.notes),
        }

    as_dict = to_dict


def _verdict(N, dim, gap, min_dist, basis_residual, grid_tol):
    if dim > N:
        return "degenerate"
    if dim == N and gap >= 100 and min_dist >= 10 * grid_tol and basis_residual <= 10 * grid_tol:
        return "nondegenerate"
    return "inconclusive"


def kernel_dimension(gs: GroundState, sol: TauSolution | float, normalized: NormalizedParams,
                     K: int = 8, grid_tol: float = 1e-6, weight_floor: float = 1e-10,
                     spectrum: WeightedSpectrum | None = None) -> NondegeneracyReport:
    """Kernel census of the two-component linearization at ``(k1 w, τ0 k1 w)``.

    Counts singular values below ``grid_tol`` times the largest of the
    2N + 4 smallest ones, checks that (θ ∂w/∂x_j, ∂w/∂x_j) lies in the kernel
    and compares f̃ with the weighted spectrum.
    """
    if gs.grid.N != normalized.N or gs.s != normalized.s or gs.p != normalized.p:
        raise ParameterError("ground state and parameters disagree on (s, p, N)")
    coeffs = linearization_coeffs(normalized, sol)
    if spectrum is None:
        spectrum = weighted_spectrum(gs, K, weight_floor=weight_floor)
    N = gs.grid.N
    ker = _kernel(gs, coeffs.matrix, grid_tol, 2 * N + 4, weight_floor)
    res, align = _basis_check(gs, coeffs.matrix, (coeffs.theta, 1.0), ker.basis, weight_floor)
    dists = tuple(abs(coeffs.f_tilde - lam) for lam in spectrum.eigenvalues)
    verdict = _verdict(N, ker.kernel_dim, ker.kernel_gap, min(dists), res, grid_tol)
    notes = []
    if ker.kernel_dim > N:
        near = int(np.argmin(dists))
        notes.append(f"f_tilde is within {dists[near]:.2e} of lambda_{near + 1}")
    return NondegeneracyReport(
        params={"mu": normalized.mu, "beta_tilde": normalized.beta_tilde, "p": normalized.p,
                "s": normalized.s, "N": normalized.N},
        coeffs=coeffs,
        spectrum=spectrum,
        f_tilde_distances=dists,
        kernel_dim=ker.kernel_dim,
        kernel_gap=ker.kernel_gap,
        verdict=verdict,
        singular_values=ker.singular_values,
        basis_residual=res,
        kernel_alignment=align,
        grid_tol=grid_tol,
        notes=tuple(notes),
    )


def scalar_kernel_dimension(gs: GroundState, grid_tol: float = 1e-6, weight_floor: float = 1e-10):
    """(kernel_dim, gap, basis_residual) for L − (2p−1) w^{2p−2}, the decoupled case."""
    Kmat = np.array([[2 * gs.p - 1]])
    ker = _kernel(gs, Kmat, grid_tol, 2 * gs.grid.N + 4, weight_floor)
    res, _ = _basis_check(gs, Kmat, (1.0,), ker.basis, weight_floor)
    return ker.kernel_dim, ker.kernel_gap, res
