"""
Scalar ground states on a periodic box
======================================

The Petviashvili iteration finds the positive radial solution w of
(-Delta)^s w + w = w^(2p-1). Two closed forms serve as oracles: sech for
s = 1, p = 2 and the Lorentzian 2/(1+x^2) for s = 1/2, p = 3/2.
"""

import numpy as np

from fracsys.ground_state import solve_w
from fracsys.spectral_core import Grid, sobolev_quotient

grid = Grid(1, 8192, 256.0)
window = np.abs(grid.x) <= 10

# %% the sech profile
gs = solve_w(1.0, 2.0, grid)
exact = np.sqrt(2) / np.cosh(grid.x)
print("iterations", gs.iterations, "residual", gs.residual_norm)
print("max rel err", np.max(np.abs(gs.w.values - exact)[window] / exact[window]))

# %% the half-Laplacian profile has an algebraic tail
gs = solve_w(0.5, 1.5, grid)
exact = 2 / (1 + grid.x**2)
print("max rel err", np.max(np.abs(gs.w.values - exact)[window] / exact[window]))
# periodic images of the 1/x^2 tail dominate the error; a wider box shrinks it
wide = solve_w(0.5, 1.5, Grid(1, 16384, 512.0))
exact = 2 / (1 + wide.grid.x**2)
m = np.abs(wide.grid.x) <= 10
print("wider box", np.max(np.abs(wide.w.values - exact)[m] / exact[m]))

# %% the Sobolev quotient at w is the best constant S
for s, p in [(1.0, 2.0), (0.75, 1.8), (1.0, 3.0)]:
    gs = solve_w(s, p, grid)
    print(f"s={s} p={p}  w(0)={gs.w.values.max():.10f}  S={gs.S_value:.10f}",
          f"check={sobolev_quotient(gs.w, s, p):.10f}")

# %% two dimensions: the Townes soliton, w(0) close to 2.2062
gs2 = solve_w(1.0, 2.0, Grid(2, 256, 24.0))
print("2D w(0) =", gs2.w.values.max())
