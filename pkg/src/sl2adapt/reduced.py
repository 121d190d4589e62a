"""The reduced polar map on the slice and everything built on it.

    P^_m(u, a) = (e^{-2u(1+m)} (C(x) + 2umS(x)), e^{2u(1+m)} (C(x) - 2umS(x)))

with x = 4u^2m^2 - 4a^2. Its product st = 1 - 4a^2 S(x)^2 is invariant under
the R-action, so R-orbits in the slice are level sets of phi_m = 2aS(x).
The off-axis preimage of the diagonal {s = t} is the zero set of Gamma, whose
graph a = gamma(u) produces the non-injectivity for m > 0.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from skimage import measure

from .polar import (
    NoRootError,
    SigmaRegion,
    SlicePoint,
    boundary_a,
    in_sigma_m_arrays,
    sigma_conditions,
    slice_xy,
    star_boundary_a,
)
from .scalar import PI2, DomainError, bisect, eval_C, eval_f, eval_S, eval_S_prime

LEVEL_TOL = 1e-8
WITNESS_TOL = 1e-9
MARGIN_TOL = 1e-9
NEWTON_STEPS = 20
DEFAULT_LEVEL_RES = 800
GAMMA_U_MAX = 5.0


# -- closed forms -----------------------------------------------------------

def reduced_polar_arrays(m, u, a):
    u = np.asarray(u, dtype=float)
    a = np.asarray(a, dtype=float)
    x, _ = slice_xy(m, u, a)
    C, S = eval_C(x), eval_S(x)
    e = np.exp(2 * u * (1 + m))
    return (C + 2 * u * m * S) / e, e * (C - 2 * u * m * S)


def reduced_polar(s):
    """P^_m at a slice point, as a pair (s, t)."""
    from .quotients import PPoint

    sv, tv = reduced_polar_arrays(s.m, s.u, s.a)
    return PPoint(float(sv), float(tv))


def reduced_polar_jacobian(m, u, a):
    """Analytic partial derivatives ((ds/du, ds/da), (dt/du, dt/da)), vectorised."""
    u = np.asarray(u, dtype=float)
    a = np.asarray(a, dtype=float)
    x, _ = slice_xy(m, u, a)
    C, S, Sp = eval_C(x), eval_S(x), eval_S_prime(x)
    Cp = 0.5 * S
    xu, xa = 8 * u * m * m, -8 * a
    e = np.exp(2 * u * (1 + m))
    plus = C + 2 * u * m * S
    minus = C - 2 * u * m * S
    ds_du = (-2 * (1 + m) * plus + Cp * xu + 2 * m * S + 2 * u * m * Sp * xu) / e
    ds_da = (Cp + 2 * u * m * Sp) * xa / e
    dt_du = e * (2 * (1 + m) * minus + Cp * xu - 2 * m * S - 2 * u * m * Sp * xu)
    dt_da = e * (Cp - 2 * u * m * Sp) * xa
    return np.stack([np.stack([ds_du, ds_da], -1), np.stack([dt_du, dt_da], -1)], -2)


def phi(m, u, a):
    """phi_m(a, u) = 2 a S(4m^2u^2 - 4a^2)."""
    x, _ = slice_xy(m, u, a)
    return 2 * np.asarray(a) * eval_S(x)


def st_of(s):
    """The R-invariant st = 1 - 4a^2 S(x)^2 of the image of a slice point."""
    return float(1.0 - 4 * s.a ** 2 * eval_S(s.x) ** 2)


def sigma_margin(m, u, a):
    """min(x + pi^2, f(x) - y); positive exactly on the inequality region."""
    x, y = slice_xy(m, u, a)
    x = np.asarray(x, dtype=float)
    out = x + PI2
    ok = out > 0
    fy = np.full(x.shape, -np.inf)
    if np.any(ok):
        fy[ok] = eval_f(x[ok]) - np.asarray(y)[ok]
    return np.minimum(out, fy)


# -- Gamma, gamma and the axis cutoff ---------------------------------------

def gamma_value(s):
    """Gamma = m/(1+m) C(4u^2(1+m)^2)/S(4u^2(1+m)^2) - C(x)/S(x)."""
    m, u = s.m, s.u
    if m == -1:
        raise ValueError("Gamma is undefined for m = -1")
    if not s.x > -PI2:
        raise DomainError("Gamma needs x > -pi^2")
    z = 4 * u * u * (1 + m) ** 2
    return float(m / (1 + m) * eval_C(z) / eval_S(z) - eval_C(s.x) / eval_S(s.x))


def gamma_curve(m, u):
    """The unique a with x > -pi^2 and Gamma(u, a) = 0, for m > -1.

    Gamma increases in a from a negative value at a = 0 to +inf at the (*)
    boundary, so bisection always brackets. For m = 0 the curve is the line
    a = pi/4, returned exactly.
    """
    if not m > -1:
        raise ValueError("gamma_curve needs m > -1")
    u = float(u)
    if m == 0:
        return np.pi / 4
    top = float(star_boundary_a(m, u))
    while not SlicePoint(u, top, m).x > -PI2:
        top = np.nextafter(top, 0.0)

    def g(a):
        return gamma_value(SlicePoint(u, a, m))

    if not g(0.0) < 0 < g(top):
        raise NoRootError(f"gamma_curve failed to bracket at m={m}, u={u}: "
                           f"Gamma(0)={g(0.0)!r}, Gamma(top)={g(top)!r}")
    return float(bisect(g, 0.0, top))


def tilde_a(m):
    """Root in (0, pi/2) of tan(2a) = 2a (1+m)/m, for m > 0 (it lies below pi/4)."""
    if not m > 0:
        raise ValueError("tilde_a needs m > 0")
    k = (1 + m) / m

    def g(a):
        return np.sin(2 * a) - 2 * a * k * np.cos(2 * a)

    return float(bisect(g, 1e-6, np.pi / 4))


# -- level sets -------------------------------------------------------------

@dataclass
class LevelSet:
    """Branches of l_c = {phi_m^2 = 1 - c} inside Sigma_m, as (n, 2) arrays of (u, a)."""

    m: float
    c: float
    branches: list = field(default_factory=list)

    def residuals(self):
        out = []
        for b in self.branches:
            out.append(np.abs(phi(self.m, b[:, 0], b[:, 1]) ** 2 - (1 - self.c)))
        return out

    @property
    def max_residual(self):
        res = self.residuals()
        return float(max((r.max() for r in res if r.size), default=0.0))

    def __len__(self):
        return len(self.branches)


def level_window(m, u_max=3.0):
    return (0.0, u_max, 0.0, 1.02 * float(star_boundary_a(m, u_max)))


def _level_field(m, c, u, a):
    return phi(m, u, a) ** 2 - (1 - c)


def _log_level_step(m, c, u, a):
    """Newton step for log(phi^2) = log(1 - c); far better scaled than phi^2 itself."""
    x, _ = slice_xy(m, u, a)
    S, Sp = eval_S(x), eval_S_prime(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        F = 2 * np.log(2 * a * S) - np.log(1 - c)
        ratio = 2 * Sp / S
        g_a = 2 / a + ratio * (-8 * a)
        g_u = ratio * 8 * u * m * m
        n2 = g_u * g_u + g_a * g_a
        step = F / n2
    ok = np.isfinite(step)
    step = np.where(ok, step, 0.0)
    return step * g_u, step * g_a


def _refine(m, c, pts, steps=30):
    u, a = pts[:, 0].copy(), pts[:, 1].copy()
    for _ in range(steps):
        du, da = _log_level_step(m, c, u, a)
        u, a = u - du, a - da
        if np.all(np.abs(_level_field(m, c, u, a)) < 0.1 * LEVEL_TOL):
            break
    return np.stack([u, a], axis=-1)


def _split_polyline(pts, keep):
    out, cur = [], []
    for p, k in zip(pts, keep):
        if k:
            cur.append(p)
        elif cur:
            out.append(np.array(cur))
            cur = []
    if cur:
        out.append(np.array(cur))
    return [b for b in out if len(b) >= 2]


def trace_level_set(m, c, window=None, resolution=DEFAULT_LEVEL_RES, region=None):
    """Trace l_c inside Sigma_m over ``window`` with marching squares.

    Vertices are projected back onto the level set by Newton steps along the
    gradient; vertices leaving Sigma_m split a branch. When the window starts at
    u = 0, interior turning points within one grid step of u = 0 are cut, since
    the open half-slice {u > 0} does not contain them.
    """
    if c > 1:
        raise ValueError("level sets need c <= 1")
    window = level_window(m) if window is None else tuple(float(w) for w in window)
    u0, u1, a0, a1 = window
    if c == 1:
        us = np.linspace(u0, u1, resolution)
        return LevelSet(m, c, [np.stack([us, np.zeros_like(us)], axis=-1)])
    if region is None:
        ru = max(abs(u0), abs(u1))
        region = SigmaRegion(m, (-ru, ru, 0.0, a1), (2 * resolution, resolution))
    us = np.linspace(u0, u1, resolution)
    as_ = np.linspace(a0, a1, resolution)
    uu, aa = np.meshgrid(us, as_, indexing="ij")
    inside = region.contains(uu, aa)
    fld = np.where(inside, _level_field(m, c, uu, aa), 0.0)
    du, da = us[1] - us[0], as_[1] - as_[0]
    branches = []
    for contour in measure.find_contours(fld, 0.0, mask=inside):
        pts = np.stack([u0 + contour[:, 0] * du, a0 + contour[:, 1] * da], axis=-1)
        pts = _refine(m, c, pts)
        keep = region.contains(pts[:, 0], pts[:, 1]) & (pts[:, 1] > 0)
        with np.errstate(invalid="ignore"):
            keep &= np.abs(_level_field(m, c, pts[:, 0], pts[:, 1])) < LEVEL_TOL
        if u0 == 0.0:
            keep &= pts[:, 0] >= 0
            uvals = pts[:, 0]
            turn = np.zeros(len(pts), dtype=bool)
            turn[1:-1] = (uvals[1:-1] <= uvals[:-2]) & (uvals[1:-1] <= uvals[2:]) & (uvals[1:-1] < du)
            keep &= ~turn
        branches.extend(_split_polyline(pts, keep))
    branches.sort(key=lambda b: (round(float(b[:, 1].min()), 9), round(float(b[:, 0].min()), 9)))
    return LevelSet(m, c, branches)


# -- injectivity ------------------------------------------------------------

@dataclass
class ScanReport:
    """Outcome of a grid scan for collisions of P^_m on Sigma_m."""

    m: float
    window: tuple
    resolution: int
    n_nodes: int = 0
    n_inside: int = 0
    n_candidates: int = 0
    n_verified: int = 0
    n_same_side: int = 0
    max_residual: float = 0.0
    delta_img: float = 0.0
    delta_pre: float = 0.0
    witnesses: list = field(default_factory=list)

    def to_dict(self):
        return {
            "m": self.m,
            "grid": {"window": list(self.window), "resolution": self.resolution},
            "n_nodes": self.n_nodes,
            "n_inside": self.n_inside,
            "n_candidates": self.n_candidates,
            "n_verified": self.n_verified,
            "n_same_side": self.n_same_side,
            "max_residual": self.max_residual,
            "delta_img": self.delta_img,
            "delta_pre": self.delta_pre,
            "witnesses": self.witnesses,
        }


def scan_window(m, u_max=1.0):
    return (-u_max, u_max, 0.0, float(star_boundary_a(m, u_max)))


def _newton_match(m, target, start, steps=NEWTON_STEPS, max_step=0.25):
    """Solve P^_m(q) = target from the given starting points (vectorised)."""
    q = start.copy()
    for _ in range(steps):
        s, t = reduced_polar_arrays(m, q[:, 0], q[:, 1])
        r = np.stack([s, t], axis=-1) - target
        Jm = reduced_polar_jacobian(m, q[:, 0], q[:, 1])
        det = Jm[:, 0, 0] * Jm[:, 1, 1] - Jm[:, 0, 1] * Jm[:, 1, 0]
        ok = np.abs(det) > 1e-300
        det = np.where(ok, det, 1.0)
        du = (Jm[:, 1, 1] * r[:, 0] - Jm[:, 0, 1] * r[:, 1]) / det
        da = (-Jm[:, 1, 0] * r[:, 0] + Jm[:, 0, 0] * r[:, 1]) / det
        step = np.stack([du, da], axis=-1) * ok[:, None]
        norm = np.linalg.norm(step, axis=-1)
        scale = np.where(norm > max_step, max_step / np.maximum(norm, 1e-300), 1.0)
        q = q - step * scale[:, None]
        q[:, 1] = np.abs(q[:, 1])
    s, t = reduced_polar_arrays(m, q[:, 0], q[:, 1])
    res = np.max(np.abs(np.stack([s, t], axis=-1) - target), axis=-1)
    return q, res


def _strictly_inside(m, u, a):
    with np.errstate(invalid="ignore", over="ignore"):
        margin = sigma_margin(m, u, a)
    return (margin > MARGIN_TOL) & in_sigma_m_arrays(m, u, a) & (a > 0)


def _witness_dict(m, p, q, res, kind):
    return {
        "kind": kind,
        "p": [float(p[0]), float(p[1])],
        "q": [float(q[0]), float(q[1])],
        "image": [float(v) for v in reduced_polar_arrays(m, p[0], p[1])],
        "residual": float(res),
    }


def injectivity_scan(m, resolution=500, window=None, neighbours=16, max_witnesses=50):
    """Search Sigma_m for pairs of distinct points with the same image under P^_m.

    Candidates are grid nodes whose images are within delta_img of each other
    while the nodes are more than delta_pre apart, plus (for m > -1) mirror
    pairs (u, a), (-u, a) near the diagonal s = t. Every candidate is refined
    (Newton on the second point, or a = gamma(u) for mirror pairs) and only
    accepted when both points lie strictly inside Sigma_m, stay apart, and
    share the image within WITNESS_TOL.
    """
    window = scan_window(m) if window is None else tuple(float(w) for w in window)
    u0, u1, a0, a1 = window
    us = np.linspace(u0, u1, resolution)
    as_ = np.linspace(a0, a1, resolution)
    region = SigmaRegion(m, window, resolution)
    uu, aa = np.meshgrid(us, as_, indexing="ij")
    inside = region.contains(uu, aa) & (aa > 0)
    pre = np.stack([uu[inside], aa[inside]], axis=-1)
    s, t = reduced_polar_arrays(m, pre[:, 0], pre[:, 1])
    img = np.stack([s, t], axis=-1)
    step = max(us[1] - us[0], as_[1] - as_[0])
    diag = float(np.hypot(*(img.max(axis=0) - img.min(axis=0)))) if len(img) else 0.0
    delta_img = 1e-4 * diag
    delta_pre = float(10 * step)
    report = ScanReport(m, window, resolution, n_nodes=uu.size, n_inside=int(inside.sum()),
                        delta_img=delta_img, delta_pre=delta_pre)
    if len(img) < 2:
        return report

    k = min(neighbours + 1, len(img))
    dist, idx = cKDTree(img).query(img, k=k)
    ii = np.repeat(np.arange(len(img)), k)
    jj = idx.ravel()
    close = (dist.ravel() < delta_img) & (ii < jj)
    ii, jj = ii[close], jj[close]
    far = np.linalg.norm(pre[ii] - pre[jj], axis=-1) > delta_pre
    ii, jj = ii[far], jj[far]

    witnesses = []
    if len(ii):
        q, res = _newton_match(m, img[ii], pre[jj])
        good = (res < WITNESS_TOL) & (np.linalg.norm(q - pre[ii], axis=-1) > delta_pre)
        good &= _strictly_inside(m, q[:, 0], q[:, 1])
        for n in np.flatnonzero(good):
            witnesses.append((pre[ii[n]], q[n], res[n], "grid"))
    n_candidates = len(ii)

    if m > -1:
        mirror = (np.abs(s - t) < delta_img) & (pre[:, 0] > delta_pre / 2)
        cand_u = np.unique(pre[mirror, 0])
        n_candidates += len(cand_u)
        for u in cand_u:
            a = gamma_curve(m, u)
            p, qq = np.array([u, a]), np.array([-u, a])
            if not np.all(_strictly_inside(m, np.array([u, -u]), np.array([a, a]))):
                continue
            sp, tp = reduced_polar_arrays(m, u, a)
            sq, tq = reduced_polar_arrays(m, -u, a)
            res = max(abs(sp - sq), abs(tp - tq))
            if res < WITNESS_TOL:
                witnesses.append((p, qq, res, "mirror"))

    report.n_candidates = n_candidates
    report.n_verified = len(witnesses)
    report.n_same_side = sum(1 for p, q, _, _ in witnesses if p[0] * q[0] > 0)
    report.max_residual = float(max((w[2] for w in witnesses), default=0.0))
    order = sorted(witnesses, key=lambda w: (w[3] != "mirror", float(w[2]), float(w[0][0]), float(w[0][1])))
    report.witnesses = [_witness_dict(m, p, q, r, kind) for p, q, r, kind in order[:max_witnesses]]
    return report


def noninjectivity_witness(m, u=0.3):
    """Two distinct points (u, gamma(u)), (-u, gamma(u)) of Sigma_m with equal images (m > 0)."""
    if not m > 0:
        raise ValueError("non-injectivity witnesses exist only for m > 0")
    if not 0 < u <= GAMMA_U_MAX:
        raise ValueError(f"u must lie in (0, {GAMMA_U_MAX}]")
    a = gamma_curve(m, u)
    p, q = SlicePoint(u, a, m), SlicePoint(-u, a, m)
    if not np.all(_strictly_inside(m, np.array([u, -u]), np.array([a, a]))):
        raise RuntimeError(f"gamma({u}) = {a} is not inside Sigma_{m}")
    sp, tp = reduced_polar_arrays(m, u, a)
    sq, tq = reduced_polar_arrays(m, -u, a)
    if max(abs(sp - sq), abs(tp - tq)) >= WITNESS_TOL:
        raise RuntimeError("witness images differ")
    return p, q


def sigma_boundary_curve(m, us):
    """Boundary of Sigma_m above each u: the (*) hyperbola for m <= -1, else y = f(x)."""
    us = np.asarray(us, dtype=float)
    if m <= -1:
        return star_boundary_a(m, us)
    return np.array([boundary_a(m, u) for u in us])

