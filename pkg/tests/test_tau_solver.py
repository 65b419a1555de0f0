import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracsys.coupling_algebra import NormalizedParams, SystemParams, eval_f, eval_g, eval_l
from fracsys.errors import NoRoot, OutOfRange, ParameterError, SemitrivialMinimizer
from fracsys.tau_solver import (
    amplitude,
    classify_landscape,
    g_roots,
    solve_beta_k,
    solve_tau0,
    tau_min_and_Smu,
)


def P(p=2.0, mu1=2.0, mu2=1.0, beta=3.0, s=1.0):
    return SystemParams(s=s, p=p, N=1, mu1=mu1, mu2=mu2, beta=beta)


def _kc_residuals(params, sol):
    p, t, k = params.p, sol.tau0, sol.k1
    first = (params.mu1 + params.beta * t**p) * k ** (2 * p - 2) - 1
    second = (params.mu2 * t ** (2 * p - 2) + params.beta * t ** (p - 2)) * k ** (2 * p - 2) - 1
    return abs(first), abs(second)


# --- solve_tau0 --------------------------------------------------------------------


def test_p2_example():
    (sol,) = solve_tau0(P())
    assert sol.tau0 == pytest.approx(math.sqrt(0.5), rel=1e-15)
    assert sol.k1 == pytest.approx(math.sqrt(1 / 3.5), rel=1e-14)
    assert sol.method == "closed_form"
    (br,) = solve_tau0(P(), method="bracket")
    assert br.tau0 == pytest.approx(sol.tau0, rel=1e-12)


def _p2_admissible(rng):
    mu2 = rng.uniform(0.2, 3.0)
    mu1 = mu2 * rng.uniform(1.05, 4.0)
    which = rng.integers(3)
    if which == 0:
        beta = -rng.uniform(0.02, 0.98) * math.sqrt(mu1 * mu2)
    elif which == 1:
        beta = rng.uniform(0.02, 0.98) * mu2
    else:
        beta = mu1 * rng.uniform(1.02, 5.0)
    return P(mu1=mu1, mu2=mu2, beta=beta)


def test_p2_closed_form_matches_bracket():
    rng = np.random.default_rng(20)
    for _ in range(100):
        params = _p2_admissible(rng)
        closed = solve_tau0(params)
        bracket = solve_tau0(params, method="bracket")
        assert len(closed) == len(bracket) == 1
        assert bracket[0].tau0 == pytest.approx(closed[0].tau0, rel=1e-12)


@pytest.mark.parametrize("beta", [1.0, 1.5, 2.0])
def test_p2_window_has_no_root(beta):
    with pytest.raises(NoRoot):
        solve_tau0(P(beta=beta))


@pytest.mark.parametrize("beta", [0.0, -math.sqrt(2.0), -3.0])
def test_outside_windows(beta):
    with pytest.raises(NoRoot):
        solve_tau0(P(p=1.5, beta=beta))


def test_unknown_method():
    with pytest.raises(ValueError):
        solve_tau0(P(), method="newton")


@settings(max_examples=60, deadline=None)
@given(st.floats(1.1, 4.0), st.floats(0.2, 3.0), st.floats(1.05, 4.0), st.floats(0.02, 0.98))
def test_negative_beta_bracket_signs(p, mu2, ratio, frac):
    mu1 = mu2 * ratio
    beta = -frac * math.sqrt(mu1 * mu2)
    params = P(p=p, mu1=mu1, mu2=mu2, beta=beta)
    lo = (abs(beta) / mu2) ** (1 / p)
    hi = (mu1 / abs(beta)) ** (1 / p)
    assert lo < hi
    assert eval_g(params, lo) > 0 > eval_g(params, hi)
    # closed value of g at the right endpoint
    expected = -(1 / abs(beta)) * (mu1 / abs(beta)) ** ((p - 2) / p) * (mu1 * mu2 - beta**2)
    assert eval_g(params, hi) == pytest.approx(expected, rel=1e-10, abs=1e-12)
    (sol,) = solve_tau0(params)
    assert lo < sol.tau0 < hi


@settings(max_examples=80, deadline=None)
@given(
    st.sampled_from([1.3, 1.5, 1.8, 2.5, 3.0, 4.0]),
    st.floats(0.3, 2.0),
    st.floats(1.05, 4.0),
    st.floats(-0.95, 6.0).filter(lambda b: abs(b) > 0.02),
)
def test_every_root_satisfies_amplitude_relations(p, mu2, ratio, b):
    mu1 = mu2 * ratio
    beta = b * math.sqrt(mu1 * mu2) if b < 0 else b * mu2
    params = P(p=p, mu1=mu1, mu2=mu2, beta=beta)
    try:
        sols = solve_tau0(params)
    except NoRoot:
        return
    taus = [s.tau0 for s in sols]
    assert taus == sorted(taus)
    for sol in sols:
        assert sol.tau0 in sol.region
        assert all(sol.positivity_ok)
        assert max(_kc_residuals(params, sol)) <= 1e-10
        assert sol.k1 == pytest.approx(amplitude(params, sol.tau0), rel=1e-14)


def test_p_gt_2_bracket_root_above_one():
    (sol,) = solve_tau0(P(p=3.0, beta=5.0))
    assert sol.tau0 > 1
    assert abs(eval_g(P(p=3.0, beta=5.0), sol.tau0)) < 1e-12 * 5


def test_p_lt_2_small_beta_root_below_one():
    params = P(p=1.5, beta=0.1)
    (sol,) = solve_tau0(params)
    assert 0 < sol.tau0 < 1


def test_g_roots_needs_coupling():
    with pytest.raises(ParameterError):
        g_roots(P(beta=0.0))


# --- classify_landscape ------------------------------------------------------------


def _scan_oracle(params, n=100_000):
    taus = np.concatenate([[0.0], np.geomspace(1e-6, 1e6, n)])
    f = eval_f(params, taus)
    return taus, f


def test_landscape_p3_small_beta():
    land = classify_landscape(P(p=3.0, beta=1.0))
    assert land.case_label == "unique_max_min_at_0"
    assert land.tau_min is None
    (top,) = [c for c in land.critical_points if c.kind == "max"]
    assert top.tau > 1


def test_landscape_p2_large_beta():
    params = P(p=2.0, beta=3.0)
    land = classify_landscape(params)
    assert land.case_label == "unique_min_max_at_0"
    # for these values the interior minimum sits at √0.5, below 1
    assert land.tau_min == pytest.approx(math.sqrt(0.5), rel=1e-13)
    assert land.k_min == pytest.approx(math.sqrt(1 / 3.5), rel=1e-13)
    t, h = land.tau_min, 1e-4
    assert eval_f(params, t + h) + eval_f(params, t - h) - 2 * eval_f(params, t) > 0


LANDSCAPE_CASES = [
    P(p=3.0, beta=1.0),
    P(p=3.0, beta=5.0),
    P(p=3.0, mu1=1.1, beta=4.0),
    P(p=3.0, mu1=1.1, beta=2.6),
    P(p=1.5, beta=0.4),
    P(p=1.5, beta=3.0),
    P(p=2.0, beta=3.0),
    P(p=2.0, beta=0.5),
    P(p=4.0, mu1=1.2, beta=6.0),
]


@pytest.mark.parametrize("params", LANDSCAPE_CASES, ids=lambda q: f"p{q.p}-m{q.mu1}-b{q.beta}")
def test_landscape_matches_dense_scan(params):
    land = classify_landscape(params)
    taus, f = _scan_oracle(params)
    for c in land.critical_points:
        if c.tau == 0:
            continue
        i = int(np.argmin(np.abs(taus - c.tau)))
        window = f[max(i - 2, 0): i + 3]
        if c.kind == "min":
            assert c.f_value <= window.min() + 1e-12
        elif c.kind == "max":
            assert c.f_value >= window.max() - 1e-12
    assert eval_f(params, land.global_min_tau) <= f.min() + 1e-12


def test_four_point_configuration_reported_in_full():
    land = classify_landscape(P(p=3.0, mu1=1.1, beta=2.6))
    assert land.case_label.startswith("four_point")
    assert len(land.critical_points) == 4
    taus = [c.tau for c in land.critical_points]
    assert taus == sorted(taus)


@pytest.mark.parametrize("params", LANDSCAPE_CASES, ids=lambda q: f"p{q.p}-m{q.mu1}-b{q.beta}")
@pytest.mark.parametrize("c", [0.01, 7.5, 300.0])
def test_landscape_scaling_invariance(params, c):
    base = classify_landscape(params)
    scaled_params = params.with_(mu1=c * params.mu1, mu2=c * params.mu2, beta=c * params.beta)
    scaled = classify_landscape(scaled_params)
    assert scaled.case_label == base.case_label
    for a, b in zip(base.critical_points, scaled.critical_points):
        assert b.tau == pytest.approx(a.tau, rel=1e-9, abs=1e-12)
        assert b.f_value == pytest.approx(a.f_value * c ** (-1 / params.p), rel=1e-9)


def test_landscape_needs_positive_beta():
    with pytest.raises(ParameterError):
        classify_landscape(P(beta=-0.5))


# --- tau_min_and_Smu ------------------------------------------------------------------


def test_Smu_example():
    S = 2.3
    t, k, Smu = tau_min_and_Smu(P(), S)
    assert t == pytest.approx(math.sqrt(0.5), rel=1e-13)
    assert k == pytest.approx(math.sqrt(1 / 3.5), rel=1e-13)
    assert Smu == pytest.approx(math.sqrt(3 / 7) * S, rel=1e-13)


@pytest.mark.parametrize("params", [P(p=2.0, beta=3.0), P(p=1.5, beta=0.4), P(p=1.5, beta=3.0)])
def test_Smu_is_a_lower_bound(params):
    _, _, Smu = tau_min_and_Smu(params, 1.0)
    taus = np.concatenate([[0.0], np.geomspace(1e-5, 1e5, 20_001)])
    assert np.all(eval_f(params, taus) >= Smu - 1e-13)
    assert Smu < params.mu1 ** (-1 / params.p)


def test_semitrivial_minimizer():
    with pytest.raises(SemitrivialMinimizer):
        tau_min_and_Smu(P(p=2.0, beta=0.5), 1.0)


# --- solve_beta_k ------------------------------------------------------------------------


def test_beta_k_round_trip():
    n = NormalizedParams(mu=2.0, beta_tilde=-0.5, p=2.0)
    tau = math.sqrt((2.0 + 0.5) / 1.5)
    target = eval_l(n, tau)
    assert target == pytest.approx(37 / 7, rel=1e-13)
    bt = solve_beta_k(n, target)
    assert bt == pytest.approx(-0.5, abs=1e-9)


@pytest.mark.parametrize("lam", [3.0, 2.5, 1.5])
def test_beta_k_out_of_range(lam):
    with pytest.raises(OutOfRange):
        solve_beta_k(NormalizedParams(mu=2.0, beta_tilde=0.0, p=2.0), lam)


@settings(max_examples=15, deadline=None)
@given(st.floats(1.2, 5.0), st.floats(1.2, 3.5), st.floats(0.05, 2.0), st.floats(0.05, 2.0))
def test_beta_k_monotone(mu, p, da, db):
    if abs(da - db) < 1e-3:
        return
    n = NormalizedParams(mu=mu, beta_tilde=0.0, p=p)
    base = 2 * p - 1
    la, lb = sorted((base + da, base + db))
    ba, bb = solve_beta_k(n, la), solve_beta_k(n, lb)
    assert -math.sqrt(mu) < bb < ba < 0
