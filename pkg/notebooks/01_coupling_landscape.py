"""
Proportional solutions and the coupling landscape
=================================================

A positive proportional solution (u, v) = (k w, k tau w) exists exactly when
tau is a positive root of g inside the admissible interval D. This script
walks through the root structure and the landscape of f, whose minimum gives
the least-energy level.
"""

import math

import numpy as np

from fracsys.coupling_algebra import SystemParams, classify_conditions, eval_f, eval_g
from fracsys.errors import NoRoot
from fracsys.tau_solver import classify_landscape, solve_tau0, tau_min_and_Smu

# %% p = 2 has a closed form, and no solution when beta lies in [mu2, mu1]
for beta in (-0.5, 0.5, 1.5, 3.0):
    q = SystemParams(s=1.0, p=2.0, N=1, mu1=2.0, mu2=1.0, beta=beta)
    try:
        (sol,) = solve_tau0(q)
        print(f"beta={beta:5.2f}  tau0={sol.tau0:.12f}  k1={sol.k1:.12f}")
    except NoRoot as err:
        print(f"beta={beta:5.2f}  {err}")

# %% the bracketing path agrees with the closed form
q = SystemParams(s=1.0, p=2.0, N=1, mu1=2.0, mu2=1.0, beta=3.0)
print(solve_tau0(q, method="bracket")[0].tau0 - math.sqrt(0.5))

# %% a cubic coupling can carry more than one root
q = SystemParams(s=1.0, p=3.0, N=1, mu1=1.1, mu2=1.0, beta=4.0)
print("roots:", [round(s.tau0, 10) for s in solve_tau0(q)])
print(classify_conditions(q).as_dict())

# %% the sign of g on a log grid
taus = np.logspace(-3, 3, 13)
print(np.sign(eval_g(q, taus)))

# %% landscape of f: tau = 0 is a local max, the global minimum sits inside
q = SystemParams(s=1.0, p=1.5, N=1, mu1=2.0, mu2=1.0, beta=math.exp(-2.0))
land = classify_landscape(q)
for c in land.critical_points:
    print(f"{c.kind:>4}  tau={c.tau:.6g}  f={c.f_value:.12f}")
# the far minimum near tau = 50 is only local: f creeps up to mu2^(-1/p)
print("f at 1e6:", eval_f(q, 1e6), " limit:", q.mu2 ** (-1 / q.p))

# %% S_{mu1,mu2} = f(tau_min) S, here with the sech value S = sqrt(16/3)
q = SystemParams(s=1.0, p=2.0, N=1, mu1=2.0, mu2=1.0, beta=3.0)
tau, k, Smu = tau_min_and_Smu(q, math.sqrt(16 / 3))
print(f"tau_min={tau:.12f}  k={k:.12f}  S_mu={Smu:.12f}")
