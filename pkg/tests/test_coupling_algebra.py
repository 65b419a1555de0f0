import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracsys.coupling_algebra import (
    H1_argmax,
    Interval,
    NormalizedParams,
    SystemParams,
    a_conditions,
    beta_roots,
    classify_conditions,
    critical_exponent,
    eval_dg,
    eval_df,
    eval_dh,
    eval_f,
    eval_f_at_root,
    eval_F_G,
    eval_g,
    eval_g_tilde,
    eval_H,
    eval_H1,
    eval_h,
    eval_l,
    region_D,
    region_Dtilde,
    simultaneous_roots,
)
from fracsys.errors import ConstraintError, DomainError, ParameterError

mp.mp.dps = 40


def P(p=2.0, mu1=2.0, mu2=1.0, beta=3.0, s=1.0, N=1):
    return SystemParams(s=s, p=p, N=N, mu1=mu1, mu2=mu2, beta=beta)


params_st = st.builds(
    lambda p, mu2, ratio, beta: P(p=p, mu1=mu2 * ratio, mu2=mu2, beta=beta),
    st.floats(1.05, 4.5),
    st.floats(0.1, 5.0),
    st.floats(1.01, 6.0),
    st.floats(-5.0, 8.0).filter(lambda b: abs(b) > 1e-3),
)


# --- parameter types -------------------------------------------------------


def test_critical_exponent():
    assert critical_exponent(1.0, 1) == math.inf
    assert critical_exponent(0.5, 1) == math.inf
    assert critical_exponent(0.5, 2) == pytest.approx(4.0)
    assert critical_exponent(1.0, 3) == pytest.approx(6.0)


@pytest.mark.parametrize(
    "kw",
    [
        dict(s=0.0), dict(s=1.2), dict(mu1=1.0, mu2=1.0), dict(mu1=1.0, mu2=2.0),
        dict(mu2=-1.0, mu1=1.0), dict(p=1.0), dict(p=2.5, s=0.5, N=2), dict(beta=math.nan),
    ],
)
def test_system_params_rejects(kw):
    with pytest.raises(ParameterError):
        P(**kw)


@given(params_st)
def test_normalize_roundtrip(params):
    back = params.normalized().denormalize(params.mu2)
    for key in ("mu1", "mu2", "beta"):
        assert getattr(back, key) == pytest.approx(getattr(params, key), rel=1e-14)


@given(params_st, st.floats(1e-3, 1e3))
def test_g_scales_with_mu2(params, tau):
    g = eval_g(params, tau)
    gt = eval_g_tilde(params.normalized(), tau)
    scale = params.mu1 + abs(params.beta) * (tau**params.p + tau ** (params.p - 2)) + params.mu2 * tau ** (2 * params.p - 2)
    assert abs(g - params.mu2 * gt) <= 1e-12 * scale


def test_interval_membership():
    iv = Interval(0.0, 1.0)
    assert 0.5 in iv and 0.0 not in iv and 1.0 not in iv
    assert Interval(1.0, math.inf).as_list() == [1.0, None]
    with pytest.raises(ValueError):
        Interval(1.0, 1.0)


# --- g, f, H1 ------------------------------------------------------------------


@given(params_st)
def test_g_at_one(params):
    assert eval_g(params, 1.0) == pytest.approx(params.mu1 - params.mu2, rel=1e-14, abs=1e-14)


def test_g_examples():
    assert eval_g(P(p=1.7, beta=7.3), 1.0) == pytest.approx(1.0, abs=1e-14)
    # β < 0 bracket endpoint (|β|/μ2)^{1/p} = 1: value (μ1 μ2 − β²)/μ2
    assert eval_g(P(beta=-1.0), 1.0) == pytest.approx(1.0, abs=1e-14)
    assert abs(eval_g(P(beta=3.0), math.sqrt(0.5))) < 1e-14


def test_g_domain():
    with pytest.raises(DomainError):
        eval_g(P(), 0.0)
    with pytest.raises(DomainError):
        eval_g(P(), -1.0)


def test_f_examples():
    assert eval_f(P(mu1=4.0, mu2=1.0), 0.0) == pytest.approx(0.5, rel=1e-15)
    big = P(p=1.5, mu1=3.0, mu2=1.7, beta=2.0)
    assert eval_f(big, 1e12) == pytest.approx(1.7 ** (-1 / 1.5), rel=1e-5)
    t = math.sqrt(0.5)
    assert eval_f(P(), t) == pytest.approx(eval_f_at_root(P(), t), rel=1e-12)
    # H(√0.5) = 2 + 2·3·0.5 + 0.25 = 5.25, so f = 1.5/√5.25 = √(3/7)
    assert eval_f(P(), t) == pytest.approx(math.sqrt(3 / 7), rel=1e-14)


def test_f_domain_for_negative_beta():
    with pytest.raises(DomainError):
        eval_f(P(beta=-10.0), 1.0)


def test_H1_examples():
    assert H1_argmax(3.0) == pytest.approx(math.sqrt(6.0), rel=1e-15)
    assert eval_H1(math.sqrt(6.0), 3.0) == pytest.approx(1.5, rel=1e-14)
    assert eval_H1(1e-12, 3.0) == pytest.approx(0.0, abs=1e-20)
    oracle = mp.mpf(1) / 2 - mp.mpf(1) / 3 * mp.mpf(2) ** -3
    assert oracle == mp.mpf(11) / 24
    assert eval_H1(1.0, 3.0) == pytest.approx(float(oracle), rel=1e-15)
    with pytest.raises(DomainError):
        eval_H1(1.0, 2.0)


@given(st.floats(2.05, 6.0))
def test_H1_maximum(p):
    t = H1_argmax(p)
    top = (p / (p - 1)) ** (p - 2)
    assert eval_H1(t, p) == pytest.approx(top, rel=1e-12)
    assert eval_H1(t * 1.01, p) < top and eval_H1(t * 0.99, p) < top


# --- derivative identities against a high-precision finite difference ---------


def _mp_g(params, t):
    p, b = mp.mpf(params.p), mp.mpf(params.beta)
    return params.mu1 + b * t**p - params.mu2 * t ** (2 * p - 2) - b * t ** (p - 2)


def _mp_h(params, t):
    p, b = mp.mpf(params.p), mp.mpf(params.beta)
    return b * p * t**2 - 2 * params.mu2 * (p - 1) * t**p - b * (p - 2)


def _mp_f(params, t):
    p, b = mp.mpf(params.p), mp.mpf(params.beta)
    return (1 + t**2) / (params.mu1 + 2 * b * t**p + params.mu2 * t ** (2 * p)) ** (1 / p)


def _close(exact, oracle, scale, rel=1e-6):
    return abs(exact - float(oracle)) <= rel * max(abs(float(oracle)), scale)


@settings(max_examples=100, deadline=None)
@given(params_st.filter(lambda q: q.beta > -math.sqrt(q.mu1 * q.mu2)))
def test_derivative_identities(params):
    for tau in np.geomspace(0.05, 20.0, 7):
        t = mp.mpf(tau)
        p, b = params.p, params.beta
        # scale for near-cancelling sums: magnitude of the individual terms
        g_scale = (params.mu2 * (2 * p - 2) * tau ** (2 * p - 3)
                   + abs(b) * (p * tau ** (p - 1) + abs(p - 2) * tau ** (p - 3)))
        assert _close(eval_dg(params, tau), mp.diff(lambda x: _mp_g(params, x), t), g_scale)
        h_scale = 2 * p * tau * (abs(b) + params.mu2 * (p - 1) * tau ** (p - 2))
        assert _close(eval_dh(params, tau), mp.diff(lambda x: _mp_h(params, x), t), h_scale)
        assert _close(eval_h(params, tau), _mp_h(params, t), h_scale * tau)
        if params.beta > 0:
            f_scale = 2 * tau * g_scale * tau / eval_H(params, tau) ** (1 + 1 / p)
            assert _close(eval_df(params, tau), mp.diff(lambda x: _mp_f(params, x), t), f_scale)


@given(params_st.filter(lambda q: q.beta > 0), st.floats(1e-4, 1e4))
def test_H_positive_for_positive_beta(params, tau):
    assert eval_H(params, tau) > 0


# --- F, G and l ----------------------------------------------------------------


norm_st = st.builds(
    NormalizedParams,
    mu=st.floats(1.01, 8.0),
    beta_tilde=st.floats(-3.0, 6.0),
    p=st.floats(1.05, 4.5),
)


def test_FG_examples():
    n = NormalizedParams(mu=2.5, beta_tilde=1.3, p=3.0)
    F, G = eval_F_G(n, 1.0)
    assert G == pytest.approx(2 / 3 * (2 * 2.5 - 1.3), rel=1e-14)
    n0 = NormalizedParams(mu=2.5, beta_tilde=0.0, p=1.7)
    F, G = eval_F_G(n0, 2.0)
    assert F == pytest.approx(1.7 * 2.0 ** 1.4, rel=1e-14)
    assert G == pytest.approx(2 * 0.7 / 1.7 * 2.5, rel=1e-14)


@settings(max_examples=100)
@given(norm_st, st.floats(1e-2, 1e2))
def test_G_identity(n, tau):
    F, G = eval_F_G(n, tau)
    lhs = G - eval_g_tilde(n, tau) - (F - n.mu * (2 - n.p)) / n.p
    scale = n.mu + abs(n.beta_tilde) * (tau**n.p + tau ** (n.p - 2)) + tau ** (2 * n.p - 2)
    assert abs(lhs) <= 1e-12 * scale


def _p2_tau(mu, bt):
    return math.sqrt((mu - bt) / (1 - bt))


def test_l_examples():
    n = NormalizedParams(mu=2.0, beta_tilde=3.0, p=2.0)
    assert eval_l(n, math.sqrt(0.5)) == pytest.approx(3 / 7, rel=1e-13)
    n = NormalizedParams(mu=2.0, beta_tilde=-0.5, p=2.0)
    assert eval_l(n, _p2_tau(2.0, -0.5)) == pytest.approx(37 / 7, rel=1e-13)
    # β~ -> 0-: τ0 -> μ^{1/(2p-2)} and l -> 2p - 1
    n = NormalizedParams(mu=3.0, beta_tilde=-1e-9, p=2.0)
    assert eval_l(n, _p2_tau(3.0, -1e-9)) == pytest.approx(3.0, abs=1e-7)


def test_l_rejects_non_roots():
    n = NormalizedParams(mu=2.0, beta_tilde=-0.5, p=2.0)
    with pytest.raises(ConstraintError):
        eval_l(n, 1.0)
    with pytest.raises(ConstraintError):
        eval_l(NormalizedParams(mu=2.0, beta_tilde=-5.0, p=2.0), 1.0)


@given(st.floats(1.01, 10.0), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_l_decreasing_p2(mu, a, b):
    lo, hi = sorted((-a * math.sqrt(mu), -b * math.sqrt(mu)))
    if hi - lo < 1e-6:
        return
    la = eval_l(NormalizedParams(mu, lo, 2.0), _p2_tau(mu, lo))
    lb = eval_l(NormalizedParams(mu, hi, 2.0), _p2_tau(mu, hi))
    assert la > lb > 3.0


# --- regions and conditions ----------------------------------------------------------


def test_regions():
    assert region_D(P(p=3.0, beta=5.0)) == Interval(1.0, math.inf)
    assert region_D(P(p=2.0, beta=0.3)) == Interval(0.0, math.inf)
    assert region_D(P(p=2.0, beta=30.0)) == Interval(0.0, math.inf)
    assert region_D(P(p=1.5, beta=-0.5)) == Interval(0.0, math.inf)
    assert region_D(P(p=1.5, beta=0.1)) == Interval(0.0, 1.0)
    assert region_Dtilde(NormalizedParams(2.0, 5.0, 3.0)) == Interval(1.0, math.inf)
    assert region_Dtilde(NormalizedParams(2.0, 0.1, 1.5)) == Interval(0.0, 1.0)


def test_classify_examples():
    rep = classify_conditions(P(beta=1.5))
    assert rep.nonexistence_window and not any(rep.a_flags)
    rep = classify_conditions(P(beta=3.0))
    assert rep.a_holding == [7] and not rep.nonexistence_window
    rep = classify_conditions(P(p=3.0, beta=1.0))
    assert rep.a_holding == [1]
    assert rep.beta0 is None and rep.beta1 is None


def test_A3_roots():
    # μ1 < (μ2/2)(p/(p-1))^{p-1} = 1.125 for p = 3, so A3 is the relevant case
    params = P(p=3.0, mu1=1.1, mu2=1.0, beta=4.0)
    b0, b1 = beta_roots(params)
    assert b0 < H1_argmax(3.0) < b1
    level = 2 * 2 * 1.1 / 3
    for b in (b0, b1):
        assert level - eval_H1(b, 3.0) == pytest.approx(0.0, abs=1e-10)
    assert a_conditions(params)[2]
    # strictly between the roots (and above (p-1)μ1) A3 is reported false
    mid = P(p=3.0, mu1=1.1, mu2=1.0, beta=0.5 * (max(b0, 2.2) + b1))
    assert not any(a_conditions(mid))


@settings(max_examples=50)
@given(st.floats(2.05, 4.0), st.floats(0.3, 1.0), st.floats(0.1, 3.0))
def test_beta_roots_bracket_argmax(p, frac, mu2):
    # put μ1 below the pivot so the two roots exist
    pivot = mu2 / 2 * (p / (p - 1)) ** (p - 1)
    mu1 = max(frac * pivot, mu2 * 1.001)
    if mu1 >= 0.99 * pivot:
        return
    params = P(p=p, mu1=mu1, mu2=mu2, beta=1.0)
    b0, b1 = beta_roots(params)
    assert b0 is not None and b1 is not None
    assert b0 < H1_argmax(p) * mu2 < b1
    rep = classify_conditions(params)
    assert rep.beta0 < rep.beta1


@pytest.mark.parametrize("p, tau", [(3.0, 0.8), (1.5, 2.0)])
def test_simultaneous_roots_planted(p, tau):
    # the p < 2 case is a tangential zero of g~, so the scan needs the default density
    # F(τ) = μ(2−p) and g~(τ) = 0 are linear in (μ, β~): plant a common root at τ
    C, A, B = tau ** (2 * p - 2), tau**p, tau ** (p - 2)
    bt = (2 * p - 2) * C / (p * A + (2 - p) * B)
    mu = (p * C - 2 * bt * A) / (2 - p)
    n = NormalizedParams(mu=mu, beta_tilde=bt, p=p)
    assert abs(eval_g_tilde(n, tau)) < 1e-12
    hits = simultaneous_roots(n, region=Interval(0.0, math.inf))
    # a double root is only located to about sqrt(machine eps)
    assert any(abs(h - tau) < 1e-6 for h in hits)
    # the planted point lies outside D~, which is why the lemma is not contradicted
    assert tau not in region_Dtilde(n)
    assert simultaneous_roots(n) == []
