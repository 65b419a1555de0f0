"""
Least-energy level by direct minimization
=========================================

The coupled Sobolev quotient is minimized by gradient descent from random
seeds. The minimum agrees with f(tau_min) S and the minimizer is the
proportional pair (w, tau_min w) up to scaling and translation.
"""

import numpy as np

from fracsys.coupling_algebra import SystemParams
from fracsys.ground_state import solve_w
from fracsys.least_energy import check_Bprime, minimize_quotient, vector_residual
from fracsys.spectral_core import Grid
from fracsys.tau_solver import tau_min_and_Smu

grid = Grid(1, 8192, 256.0)
gs = solve_w(1.0, 2.0, grid)
q = SystemParams(s=1.0, p=2.0, N=1, mu1=2.0, mu2=1.0, beta=3.0)

# %% the minimum over random restarts
state = minimize_quotient(q, grid, restarts=6, seed=1, ground_state=gs)
tau, k, Smu = tau_min_and_Smu(q, gs.S_value)
for label, value, steps in state.candidates:
    print(f"{label:>10}  quotient={value:.10f}  steps={steps}")
print("landscape prediction", Smu)

u, v = state.u.values, state.v.values
print("|v - tau u| / |u| =", np.linalg.norm(v - tau * u) / np.linalg.norm(u))
print("residuals", vector_residual(q, state))

# %% the level B(mu1) and its derivative
for delta in (4e-3, 2e-3, 1e-3, 1e-4):
    lhs, rhs = check_Bprime(q, gs, delta)
    print(f"delta={delta:.0e}  centered={lhs:.12f}  formula={rhs:.12f}  rel={abs(lhs / rhs - 1):.2e}")
