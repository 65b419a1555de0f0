"""
Non-degeneracy of proportional solutions
========================================

Diagonalizing the linearized system leaves two scalar problems. One is the
scalar linearization, whose kernel is spanned by the derivatives of w. The
other is a weighted eigenproblem (-Delta)^s phi + phi = lambda w^(2p-2) phi
at lambda = f_tilde. The solution is non-degenerate when f_tilde misses the
weighted spectrum, apart from the trivial eigenvalue 2p-1.
"""

from fracsys.coupling_algebra import NormalizedParams, SystemParams
from fracsys.ground_state import solve_w
from fracsys.nondegeneracy import kernel_dimension, linearization_coeffs, weighted_spectrum
from fracsys.spectral_core import Grid
from fracsys.tau_solver import solve_beta_k, solve_tau0

grid = Grid(1, 8192, 256.0)
gs = solve_w(1.0, 2.0, grid)

# %% weighted spectrum for the sech profile: 1, 3, 6, 10, ...
spec = weighted_spectrum(gs, K=6)
print(spec.eigenvalues)

# %% coefficients of the 2x2 coupling matrix
for beta in (3.0, 0.5, -0.5):
    q = SystemParams(s=1.0, p=2.0, N=1, mu1=2.0, mu2=1.0, beta=beta)
    (sol,) = solve_tau0(q)
    c = linearization_coeffs(q.normalized(), sol)
    print(f"beta={beta:5.2f}  gamma+={c.gamma_plus:+.6f}  gamma-={c.gamma_minus:+.6f}",
          f"f_tilde={c.f_tilde:.10f}")

# %% kernel census: one kernel direction (the translation) in 1D
q = SystemParams(s=1.0, p=2.0, N=1, mu1=2.0, mu2=1.0, beta=3.0)
(sol,) = solve_tau0(q)
rep = kernel_dimension(gs, sol, q.normalized(), spectrum=spec)
print(rep.verdict, rep.kernel_dim, f"gap={rep.kernel_gap:.3g}")

# %% tune the coupling so f_tilde hits the third eigenvalue: the kernel grows
n = NormalizedParams(mu=2.0, beta_tilde=0.0, p=2.0)
bt = solve_beta_k(n, spec.eigenvalues[2])
n = NormalizedParams(mu=2.0, beta_tilde=bt, p=2.0)
tau = solve_tau0(n.as_system())[0].tau0
rep = kernel_dimension(gs, tau, n, spectrum=spec)
print(f"beta_tilde={bt:.10f}", rep.verdict, rep.kernel_dim)
print("f_tilde there:", linearization_coeffs(n, tau).f_tilde, " lambda_3:", spec.eigenvalues[2])
