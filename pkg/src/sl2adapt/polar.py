"""The polar map P_m : G x g -> SL2(C) and the slice domains Sigma_m*, Sigma_m.

A slice point (e, uU + aH), a >= 0, is described by the derived scalars

    x = 4 u^2 m^2 - 4 a^2,    y = 4 u^2 m^2 + 4 a^2 m.

Sigma_m* is {x > -pi^2}; Sigma_m is the connected component of the origin in
{x > -pi^2 and y < f(x)}, where the differential of P_m is non-singular.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import ndimage

from .algebra import exp_group, from_matrix, inv2, k_part, p_part
from .geodesics import TangentPoint
from .scalar import PI2, bisect, eval_C, eval_f, eval_S, stable_quotients

BOUNDARY_SCAN_STEP = 0.01
DEFAULT_REGION_RES = 600
DEFAULT_U_MAX = 3.0


class NoRootError(RuntimeError):
    """Raised when a bracketing scan finds no sign change."""


@dataclass(frozen=True)
class SlicePoint:
    """The slice point (e, uU + aH) for the metric parameter m."""

    u: float
    a: float
    m: float

    def __post_init__(self):
        if not self.a >= 0:
            raise ValueError("slice points need a >= 0")
        for v in (self.u, self.a, self.m):
            if not np.isfinite(v):
                raise ValueError("slice point coordinates must be finite")

    @property
    def x(self):
        return 4 * self.u ** 2 * self.m ** 2 - 4 * self.a ** 2

    @property
    def y(self):
        return 4 * self.u ** 2 * self.m ** 2 + 4 * self.a ** 2 * self.m

    @property
    def X(self):
        return np.array([self.u, self.a, 0.0])

    def tangent_point(self):
        return TangentPoint.at_identity(self.X)


def slice_xy(m, u, a):
    u = np.asarray(u, dtype=float)
    a = np.asarray(a, dtype=float)
    um2 = 4 * u ** 2 * m ** 2
    return um2 - 4 * a ** 2, um2 + 4 * a ** 2 * m


def polar(m, p):
    """P_m(g, X) = g exp i(-m X_k + X_p) exp i(1+m) X_k."""
    X = np.asarray(p.X, dtype=float)
    first = exp_group(1j * (-m * k_part(X) + p_part(X)))
    second = exp_group(1j * (1.0 + m) * k_part(X))
    return p.g @ first @ second


def polar_slice(m, u, a):
    """P_m(e, uU + aH) for arrays of slice coordinates."""
    u = np.asarray(u, dtype=float)
    a = np.asarray(a, dtype=float)
    zeros = np.zeros_like(u + a)
    first = np.stack([-m * u + zeros, a + zeros, zeros], axis=-1)
    second = np.stack([(1.0 + m) * u + zeros, zeros, zeros], axis=-1)
    return exp_group(1j * first) @ exp_group(1j * second)


def six_vectors_arrays(m, u, a):
    """The six closed-form tangent-image vectors, shape (..., 6, 3), complex."""
    u = np.asarray(u, dtype=float)
    a = np.asarray(a, dtype=float)
    x, _ = slice_xy(m, u, a)
    C = np.asarray(eval_C(x))
    S = np.asarray(eval_S(x))
    cq, sq = (np.asarray(q) for q in stable_quotients(x))
    um = u * m
    one = np.ones_like(x)
    v1 = [1 - 4 * a ** 2 * cq, 4 * a * um * cq, 2j * a * S]
    v2 = [-4 * a * um * cq, 1 + 4 * um ** 2 * cq, 2j * um * S]
    v3 = [2j * a * S, -2j * um * S, C]
    v4 = [1j * (1 + 4 * a ** 2 * m * sq), -4j * a * u * m ** 2 * sq, 2 * a * m * cq]
    v5 = [-4j * a * um * sq, 1j * (1 + 4 * um ** 2 * sq), -2 * um * cq]
    v6 = [-2 * a * cq, 2 * um * cq, 1j * S * one]
    rows = [np.stack(np.broadcast_arrays(*v), axis=-1) for v in (v1, v2, v3, v4, v5, v6)]
    return np.stack(rows, axis=-2).astype(complex)


def six_vectors(s):
    """Images under DP_m (up to Ad_{exp -i(1+m)X_k}) of (U,0), (H,0), (W,0), (0,U), (0,H), (0,W)."""
    return six_vectors_arrays(s.m, s.u, s.a)


def determinants_arrays(m, u, a):
    v = six_vectors_arrays(m, u, a)
    block1 = np.stack(
        [np.stack([v[..., i, 0].real, v[..., i, 1].real, v[..., i, 2].imag], axis=-1) for i in (0, 1, 5)],
        axis=-2,
    )
    block2 = np.stack(
        [np.stack([v[..., i, 0].imag, v[..., i, 1].imag, v[..., i, 2].real], axis=-1) for i in (2, 3, 4)],
        axis=-2,
    )
    return np.linalg.det(block1), np.linalg.det(block2)


def slice_determinants(s):
    """The two 3x3 determinants whose product is the Jacobian determinant of P_m."""
    d1, d2 = determinants_arrays(s.m, s.u, s.a)
    return float(d1), float(d2)


def tangential_minor(s):
    """Area spanned by DP_m(0,U) and DP_m(0,H) as real 6-vectors (Gram root)."""
    v = six_vectors(s)
    r = np.stack([np.concatenate([v[i].real, v[i].imag]) for i in (3, 4)])
    return float(np.sqrt(max(np.linalg.det(r @ r.T), 0.0)))


def sigma_conditions(m, u, a):
    """Boolean arrays for (*) x > -pi^2 and (**) y < f(x) (the latter only where (*) holds)."""
    x, y = slice_xy(m, u, a)
    star = x > -PI2
    fx = np.full(np.shape(x), np.nan)
    if np.any(star):
        fx[star] = eval_f(np.asarray(x)[star]) if np.ndim(x) else eval_f(float(x))
    with np.errstate(invalid="ignore"):
        dstar = star & (y < fx)
    return star, dstar


def in_sigma_star(s):
    """Condition (*): 4u^2m^2 - 4a^2 > -pi^2 (strict)."""
    return bool(s.x > -PI2)


def star_boundary_a(m, u):
    """The a >= 0 with x = -pi^2 above u."""
    u = np.asarray(u, dtype=float)
    return 0.5 * np.sqrt(4 * u ** 2 * m ** 2 + PI2)


class SigmaRegion:
    """Flood-filled grid picture of Sigma_m over a window of the (u, a) plane.

    Nodes satisfying (*) and (**) are labelled into 4-connected components;
    Sigma_m is the component holding the origin. The object is immutable after
    construction and can be shared.
    """

    def __init__(self, m, window, res=(DEFAULT_REGION_RES, DEFAULT_REGION_RES)):
        u0, u1, a0, a1 = (float(w) for w in window)
        if not (u0 <= 0.0 <= u1 and a0 == 0.0 and a1 > 0):
            raise ValueError("window must contain the origin and start at a = 0")
        nu, na = (res, res) if np.isscalar(res) else res
        self.m = float(m)
        self.window = (u0, u1, a0, a1)
        self.us = np.linspace(u0, u1, int(nu))
        self.as_ = np.linspace(a0, a1, int(na))
        uu, aa = np.meshgrid(self.us, self.as_, indexing="ij")
        _, ok = sigma_conditions(self.m, uu, aa)
        labels, n = ndimage.label(ok)
        self.inequality_mask = ok
        self.n_components = int(n)
        iu = int(np.argmin(np.abs(self.us)))
        self.origin_label = int(labels[iu, 0])
        if self.origin_label == 0:
            raise RuntimeError("origin not inside the inequality region")
        self.labels = labels
        self.mask = labels == self.origin_label
        self.mask.setflags(write=False)

    @property
    def connected(self):
        return self.n_components == 1

    def in_window(self, u, a):
        u0, u1, a0, a1 = self.window
        return (u >= u0) & (u <= u1) & (a >= a0) & (a <= a1)

    def contains(self, u, a):
        """Sigma_m membership for points inside the window."""
        u = np.asarray(u, dtype=float)
        a = np.asarray(a, dtype=float)
        _, ok = sigma_conditions(self.m, u, a)
        ok = ok & self.in_window(u, a)
        if self.connected:
            return ok
        # several components: accept when an adjacent node is in the origin component
        iu = np.clip(np.searchsorted(self.us, u) - 1, 0, len(self.us) - 2)
        ia = np.clip(np.searchsorted(self.as_, a) - 1, 0, len(self.as_) - 2)
        near = (
            self.mask[iu, ia] | self.mask[iu + 1, ia] | self.mask[iu, ia + 1] | self.mask[iu + 1, ia + 1]
        )
        return ok & near


def default_window(m, u_max=DEFAULT_U_MAX):
    u_max = float(u_max)
    a_max = float(star_boundary_a(m, u_max)) * 1.02
    return (-u_max, u_max, 0.0, a_max)


@lru_cache(maxsize=32)
def region_for(m, u_max=DEFAULT_U_MAX, res=DEFAULT_REGION_RES):
    return SigmaRegion(m, default_window(m, u_max), res)


def _u_max_for(u):
    umax = float(np.max(np.abs(u))) if np.size(u) else 0.0
    if umax <= DEFAULT_U_MAX:
        return DEFAULT_U_MAX
    return float(np.ceil(1.25 * umax))


def in_sigma_m_arrays(m, u, a, region=None):
    u = np.asarray(u, dtype=float)
    a = np.asarray(a, dtype=float)
    if region is None:
        region = region_for(float(m), _u_max_for(u))
    return region.contains(u, a)


def in_sigma_m(s, region=None):
    """Membership of a slice point in Sigma_m."""
    return bool(in_sigma_m_arrays(s.m, s.u, s.a, region))


def boundary_residual(m, u, a):
    """y - f(x) at the given slice coordinates."""
    x, y = slice_xy(m, u, a)
    return y - eval_f(x)


def boundary_a(m, u):
    """The a >= 0 on the boundary of Sigma_m above u, for m > -1.

    Scans a upward in steps of BOUNDARY_SCAN_STEP towards the (*) boundary and
    bisects the first sign change of f(x) - y.
    """
    if not m > -1:
        raise ValueError("boundary_a is only supported for m > -1; for m <= -1 Sigma_m = Sigma_m*")
    u = float(u)
    a_star = float(star_boundary_a(m, u))

    def g(a):
        x, y = slice_xy(m, u, a)
        return float(eval_f(float(x)) - y)

    grid = np.arange(0.0, a_star, BOUNDARY_SCAN_STEP)
    top = np.nextafter(a_star, 0.0)
    while slice_xy(m, u, top)[0] <= -PI2:
        top = np.nextafter(top, 0.0)
    grid = np.append(grid[grid < top], top)
    x, y = slice_xy(m, u, grid)
    signs = np.sign(eval_f(x) - y)
    change = np.flatnonzero(signs[1:] != signs[:-1])
    if change.size:
        i = change[0]
        return float(bisect(g, grid[i], grid[i + 1]))
    raise NoRootError(f"no boundary crossing for m={m}, u={u} on [0, {a_star}]")


def _real6(V):
    return np.concatenate([V.real, V.imag], axis=-1)


def numeric_jacobian(m, p, h=1e-5):
    """Central-difference differential of P_m at p in left-translated charts.

    Columns correspond to the tangent directions (U,0), (H,0), (W,0), (0,U),
    (0,H), (0,W); rows are the real and imaginary parts of the coefficients
    of P_m(p)^-1 P_m(p') in g^C. Returns ``(J, det J)``.
    """
    base_inv = inv2(polar(m, p))
    eye = np.eye(3)
    cols = []
    for j in range(6):
        diffs = []
        for s in (h, -h):
            if j < 3:
                q = TangentPoint(p.g @ exp_group(s * eye[j]), p.X)
            else:
                q = TangentPoint(p.g, p.X + s * eye[j - 3])
            diffs.append(base_inv @ polar(m, q))
        cols.append(_real6(from_matrix((diffs[0] - diffs[1]) / (2 * h))))
    J = np.stack(cols, axis=-1)
    return J, float(np.linalg.det(J))
