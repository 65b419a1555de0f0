"""Scalar root refinement shared by the algebra and tau modules."""

import math

from scipy.optimize import brentq

XTOL = 1e-300
RTOL = 4 * 2.220446049250313e-16
MAXITER = 200
# brackets wider than this ratio are searched in log space
LOG_RATIO = 1e3


def refine_root(fun, a, b, dfun=None, newton_steps=3):
    """Root of ``fun`` in the sign-change bracket ``[a, b]``.

    Brent's method to full precision, then a few guarded Newton steps when a
    derivative is available. Positive brackets spanning many decades are
    searched in log space first, where Brent needs far fewer iterations. A Newton step is kept only if it stays inside
    the bracket and does not increase ``|fun|``.
    """
    fa, fb = fun(a), fun(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        raise ValueError(f"no sign change on [{a}, {b}]")
    lo, hi = min(a, b), max(a, b)
    if lo > 0 and hi / lo > LOG_RATIO:
        y = brentq(lambda s: fun(math.exp(s)), math.log(lo), math.log(hi), xtol=1e-15, maxiter=MAXITER)
        x = min(max(math.exp(y), lo), hi)
    else:
        x = brentq(fun, a, b, xtol=XTOL, rtol=RTOL, maxiter=MAXITER)
    if dfun is None:
        return x
    fx = fun(x)
    for _ in range(newton_steps):
        d = dfun(x)
        if fx == 0.0 or d == 0.0 or not math.isfinite(d):
            break
        xn = x - fx / d
        if not lo <= xn <= hi:
            break
        fn = fun(xn)
        if abs(fn) >= abs(fx):
            break
        x, fx = xn, fn
    return x


def piece_roots(fun, edges, dfun=None, touch_tol=0.0):
    """Roots of ``fun`` given that it is monotone between consecutive ``edges``.

    Each piece holds at most one simple root. An edge where ``|fun|`` is at
    most ``touch_tol`` is reported as a root as well (a tangential zero, which
    has no sign change around it).
    """
    roots = []
    values = [fun(e) for e in edges]
    for e, v in zip(edges[1:-1], values[1:-1]):
        if abs(v) <= touch_tol:
            roots.append(e)
    for (a, b), (fa, fb) in zip(zip(edges[:-1], edges[1:]), zip(values[:-1], values[1:])):
        if fa * fb < 0 and abs(fa) > touch_tol and abs(fb) > touch_tol:
            roots.append(refine_root(fun, a, b, dfun))
    return sorted(roots)
