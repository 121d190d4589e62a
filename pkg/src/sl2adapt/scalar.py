"""Stable evaluation of the even special functions C and S.

C(x) = cosh(sqrt(x)) and S(x) = sinh(sqrt(x))/sqrt(x), continued to x < 0
through cos and sin. Every function here accepts a scalar or an ndarray and
returns the same shape. Near x = 0 the removable singularities of the
difference quotients are evaluated from their Taylor series.
"""

from math import factorial

import numpy as np

PI2 = np.pi ** 2

#: below this |x| the series path is used for S, S', quotients and f
SERIES_THRESHOLD = 1e-3

_DEGREE = 10

# Taylor coefficients in powers of x (highest degree first, for polyval)
_C_COEF = np.array([1.0 / factorial(2 * k) for k in range(_DEGREE + 1)])[::-1]
_S_COEF = np.array([1.0 / factorial(2 * k + 1) for k in range(_DEGREE + 1)])[::-1]
_CQ_COEF = np.array([1.0 / factorial(2 * k) for k in range(1, _DEGREE + 2)])[::-1]
_SQ_COEF = np.array([1.0 / factorial(2 * k + 1) for k in range(1, _DEGREE + 2)])[::-1]
_SP_COEF = np.array([k / factorial(2 * k + 1) for k in range(1, _DEGREE + 2)])[::-1]


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a kernel function."""


def _as_real(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument must be finite")
    return arr


def _ret(arr, like):
    return arr.item() if np.ndim(like) == 0 else arr


def _split(x):
    """Return the direct-path values cosh/cos(sqrt|x|) and sinhc/sinc(sqrt|x|)."""
    r = np.sqrt(np.abs(x))
    pos = x >= 0
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        c = np.where(pos, np.cosh(r), np.cos(r))
        s = np.where(pos, np.sinh(r), np.sin(r)) / np.where(r == 0, 1.0, r)
    return c, np.where(r == 0, 1.0, s)


def eval_C(x):
    """cosh(sqrt(x)) for x >= 0 and cos(sqrt(-x)) for x < 0."""
    arr = _as_real(x)
    return _ret(_split(arr)[0], x)


def eval_S(x):
    """sinh(sqrt(x))/sqrt(x), extended by sin(sqrt(-x))/sqrt(-x) and S(0) = 1."""
    arr = _as_real(x)
    small = np.abs(arr) < SERIES_THRESHOLD
    direct = _split(arr)[1]
    out = np.where(small, np.polyval(_S_COEF, arr), direct)
    return _ret(out, x)


def eval_S_prime(x):
    """Derivative of S, i.e. (C(x) - S(x)) / (2x) with the series at the origin."""
    arr = _as_real(x)
    small = np.abs(arr) < SERIES_THRESHOLD
    c, s = _split(arr)
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = (c - s) / (2.0 * arr)
    out = np.where(small, np.polyval(_SP_COEF, arr), direct)
    return _ret(out, x)


def stable_quotients(x):
    """Return ``((C(x) - 1)/x, (S(x) - 1)/x)`` with limits 1/2 and 1/6 at 0."""
    arr = _as_real(x)
    small = np.abs(arr) < SERIES_THRESHOLD
    c, s = _split(arr)
    with np.errstate(invalid="ignore", divide="ignore"):
        cq = np.where(small, np.polyval(_CQ_COEF, arr), (c - 1.0) / arr)
        sq = np.where(small, np.polyval(_SQ_COEF, arr), (s - 1.0) / arr)
    return _ret(cq, x), _ret(sq, x)


def eval_f(x):
    """The boundary function x C(x) / (C(x) - S(x)), evaluated as C / (2 S').

    Only defined for x > -pi**2; the guard is strict.
    """
    arr = _as_real(x)
    if np.any(arr <= -PI2):
        raise DomainError("f is only defined for x > -pi**2")
    c = _split(arr)[0]
    sp = np.asarray(eval_S_prime(arr))
    return _ret(c / (2.0 * sp), x)


def eval_C_complex(q):
    """Entire extension of C to complex arguments (branch independent)."""
    q = np.asarray(q, dtype=complex)
    small = np.abs(q) < SERIES_THRESHOLD
    w = np.sqrt(q)
    with np.errstate(over="ignore", invalid="ignore"):
        direct = np.cosh(w)
    return np.where(small, np.polyval(_C_COEF.astype(complex), q), direct)


def eval_S_complex(q):
    """Entire extension of S to complex arguments (branch independent)."""
    q = np.asarray(q, dtype=complex)
    small = np.abs(q) < SERIES_THRESHOLD
    w = np.sqrt(q)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        direct = np.sinh(w) / np.where(small, 1.0, w)
    return np.where(small, np.polyval(_S_COEF.astype(complex), q), direct)


def bisect(func, lo, hi, *, xtol=0.0, maxiter=200):
    """Bisection for a continuous scalar function with a sign change on [lo, hi].

    Iterates until the bracket stops shrinking in floating point (or is below
    ``xtol``) and returns the midpoint.
    """
    flo = func(lo)
    fhi = func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise ValueError(f"no sign change on [{lo!r}, {hi!r}]")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= xtol:
            break
        fmid = func(mid)
        if fmid == 0.0:
            return mid
        if np.sign(fmid) == np.sign(flo):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)
