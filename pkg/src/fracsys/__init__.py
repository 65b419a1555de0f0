"""Proportional solutions of a coupled fractional Schrödinger system.

The package couples exact scalar algebra for the amplitude ratio τ with a
pseudospectral discretization of R^N (N = 1, 2) used to compute the scalar
ground state, the weighted eigenvalue problem behind non-degeneracy, and the
least-energy level of the system.
"""

__version__ = "0.1.0"

from .coupling_algebra import (  # noqa: E402
    ConditionReport,
    Interval,
    NormalizedParams,
    SystemParams,
    classify_conditions,
    critical_exponent,
    eval_f,
    eval_g,
    eval_l,
    region_D,
    region_Dtilde,
    simultaneous_roots,
)
from .errors import *  # noqa: E402,F401,F403
from .ground_state import GroundState, compute_S, solve_w  # noqa: E402
from .least_energy import (  # noqa: E402
    CoupledState,
    check_Bprime,
    minimize_quotient,
    proportional_state,
    quotient,
    vector_residual,
)
from .nondegeneracy import (  # noqa: E402
    LinearizationCoeffs,
    NondegeneracyReport,
    WeightedSpectrum,
    check_claims,
    kernel_dimension,
    linearization_coeffs,
    weighted_spectrum,
)
from .spectral_core import Field, Grid, default_grid  # noqa: E402
from .tau_solver import (  # noqa: E402
    Landscape,
    TauSolution,
    classify_landscape,
    solve_beta_k,
    solve_tau0,
    tau_min_and_Smu,
)
