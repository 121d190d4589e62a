"""Datasets behind the three slice pictures, with CSV, JSON and SVG writers.

A dataset is a list of polylines. Each vertex carries the residual of the
equation defining its curve, so consumers can check what they plot.
"""

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .polar import (
    NoRootError,
    SlicePoint,
    boundary_a,
    boundary_residual,
    slice_xy,
    star_boundary_a,
)
from .reduced import gamma_curve, gamma_value, trace_level_set
from .scalar import PI2

FIGURE1_MS = (-1.5, -0.5, 1.0)
FIGURE3_MS = (1.0,)
LEVELS = (0.7, 0.2, 0.0, -0.7)
R_ORBIT_LEVELS = (0.5, -0.5, -2.0)
FIGURE2_WINDOW = (-4.0, 4.0, -4.0, 4.0)
DEFAULT_RES = 400
MIN_RES = 16
SVG_WIDTH = 800.0
FORMATS = ("csv", "json", "svg")
CSV_COLUMNS = ("m", "u", "a", "kind", "residual", "branch")


@dataclass
class FigureSpec:
    figure: int
    ms: tuple = ()
    window: tuple = None
    res: int = DEFAULT_RES
    fmt: str = "csv"

    def __post_init__(self):
        if self.figure not in (1, 2, 3):
            raise ValueError("figure must be 1, 2 or 3")
        if self.res < MIN_RES:
            raise ValueError(f"resolution must be at least {MIN_RES}")
        if self.fmt not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        if not self.ms:
            self.ms = {1: FIGURE1_MS, 2: (), 3: FIGURE3_MS}[self.figure]
        self.ms = tuple(float(m) for m in self.ms)
        if self.window is None:
            self.window = default_figure_window(self.figure, self.ms)
        self.window = tuple(float(w) for w in self.window)
        if len(self.window) != 4 or not all(math.isfinite(w) for w in self.window):
            raise ValueError("window must be four finite numbers u0,u1,a0,a1")
        u0, u1, a0, a1 = self.window
        if not (u0 < u1 and a0 < a1):
            raise ValueError("window ranges must be increasing")
        if self.figure != 2 and a0 < 0:
            raise ValueError("slice windows need a0 >= 0")


@dataclass
class Polyline:
    kind: str
    m: object
    points: np.ndarray
    residual: np.ndarray
    branch: int = 0


@dataclass
class Dataset:
    spec: FigureSpec
    polylines: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def kinds(self):
        return sorted({p.kind for p in self.polylines})

    def select(self, kind, m=None):
        return [p for p in self.polylines if p.kind == kind and (m is None or p.m == m)]


def default_figure_window(figure, ms):
    if figure == 2:
        return FIGURE2_WINDOW
    u_max = 3.0
    top = max(float(star_boundary_a(m, u_max)) for m in ms) if ms else 2.0
    u0 = -u_max if figure == 1 else 0.0
    return (u0, u_max, 0.0, round(1.05 * top, 6))


def _runs(mask):
    """Index ranges of consecutive True entries."""
    out, start = [], None
    for i, v in enumerate(mask):
        if v and start is None:
            start = i
        elif not v and start is not None:
            out.append((start, i))
            start = None
    if start is not None:
        out.append((start, len(mask)))
    return out


def _curve_polylines(kind, m, us, a, res, keep, branch0=0):
    lines = []
    for n, (i, j) in enumerate(_runs(keep)):
        if j - i >= 2:
            lines.append(Polyline(kind, m, np.stack([us[i:j], a[i:j]], -1), res[i:j], branch0 + n))
    return lines


def star_boundary(m, us):
    a = np.asarray(star_boundary_a(m, us), dtype=float)
    x, _ = slice_xy(m, us, a)
    return a, np.abs(np.asarray(x) + PI2)


def sigma_boundary(m, us):
    """Sigma_m boundary heights and residuals; NaN where no crossing exists."""
    if m <= -1:
        return star_boundary(m, us)
    a = np.full(len(us), np.nan)
    for i, u in enumerate(us):
        try:
            a[i] = boundary_a(m, u)
        except NoRootError:
            pass
    res = np.full(len(us), np.nan)
    ok = np.isfinite(a)
    res[ok] = np.abs(boundary_residual(m, us[ok], a[ok]))
    return a, res


def _in_window(pts, window):
    u0, u1, a0, a1 = window
    return (pts[0] >= u0) & (pts[0] <= u1) & (pts[1] >= a0) & (pts[1] <= a1)


def figure1(spec):
    u0, u1, _, _ = spec.window
    us = np.linspace(u0, u1, spec.res)
    ds = Dataset(spec)
    gaps = {}
    for m in spec.ms:
        a_star, r_star = star_boundary(m, us)
        a_sig, r_sig = sigma_boundary(m, us)
        ds.polylines += _curve_polylines("sigma_star_boundary", m, us, a_star, r_star,
                                         _in_window((us, a_star), spec.window))
        keep = np.isfinite(a_sig) & _in_window((us, np.nan_to_num(a_sig)), spec.window)
        ds.polylines += _curve_polylines("sigma_m_boundary", m, us, a_sig, r_sig, keep)
        ok = np.isfinite(a_sig)
        gaps[repr(m)] = float(np.min(a_star[ok] - a_sig[ok])) if np.any(ok) else None
    ds.metadata["min_gap"] = gaps
    return ds


def _hyperbola(kind, c, window, res, branch0=0):
    """Both branches of st = c inside the (s, t) window."""
    s0, s1, t0, t1 = window
    lines = []
    for n, sign in enumerate((1.0, -1.0)):
        if c == 0:
            continue
        lo, hi = (max(s0, 1e-9), s1) if sign > 0 else (s0, min(s1, -1e-9))
        if lo >= hi:
            continue
        s = np.linspace(lo, hi, res)
        t = c / s
        keep = (t >= t0) & (t <= t1)
        resid = np.abs(s * t - c)
        lines += _curve_polylines(kind, None, s, t, resid, keep, branch0 + 2 * n)
    return lines


def figure2(spec):
    ds = Dataset(spec)
    s0, s1, t0, t1 = spec.window
    ds.polylines += _hyperbola("P_boundary", 1.0, spec.window, spec.res)
    for n, c in enumerate(R_ORBIT_LEVELS):
        ds.polylines += _hyperbola("R_orbit", c, spec.window, spec.res, branch0=4 * n)
    # slice: {s + t = 2, t >= s} and {s + t = -2, s >= t}, plus p0, p1, p3
    s = np.linspace(s0, min(s1, 1.0), spec.res)
    t = 2 - s
    ds.polylines += _curve_polylines("S_slice", None, s, t, np.abs(s + t - 2),
                                     (t >= t0) & (t <= t1), branch0=0)
    s = np.linspace(max(s0, -1.0), s1, spec.res)
    t = -2 - s
    ds.polylines += _curve_polylines("S_slice", None, s, t, np.abs(s + t + 2),
                                     (t >= t0) & (t <= t1), branch0=10)
    for n, (ps, pt) in enumerate(((0.0, 0.0), (2.0, 0.0), (-2.0, 0.0))):
        ds.polylines.append(Polyline("S_slice", None, np.array([[ps, pt]]), np.zeros(1), 20 + n))
    return ds


def gamma_polylines(m, us, window):
    if not m > -1:
        return []
    a = np.array([gamma_curve(m, u) for u in us])
    res = np.array([abs(gamma_value(SlicePoint(u, ai, m))) for u, ai in zip(us, a)])
    return _curve_polylines("gamma_zero", m, us, a, res, _in_window((us, a), window))


def level_polylines(level):
    lines = []
    kind = f"level_c={level.c!r}"
    for n, (b, r) in enumerate(zip(level.branches, level.residuals())):
        lines.append(Polyline(kind, level.m, b, r, n))
    return lines


def figure3(spec):
    u0, u1, _, _ = spec.window
    us = np.linspace(u0, u1, spec.res)
    ds = Dataset(spec)
    counts = {}
    for m in spec.ms:
        a_star, r_star = star_boundary(m, us)
        a_sig, r_sig = sigma_boundary(m, us)
        ds.polylines += _curve_polylines("sigma_star_boundary", m, us, a_star, r_star,
                                         _in_window((us, a_star), spec.window))
        keep = np.isfinite(a_sig) & _in_window((us, np.nan_to_num(a_sig)), spec.window)
        ds.polylines += _curve_polylines("sigma_m_boundary", m, us, a_sig, r_sig, keep)
        ds.polylines += gamma_polylines(m, us, spec.window)
        for c in LEVELS:
            level = trace_level_set(m, c, spec.window, spec.res)
            ds.polylines += level_polylines(level)
            counts[f"{m!r}:{c!r}"] = len(level)
    ds.metadata["branch_counts"] = counts
    return ds


def render_figure(spec):
    return {1: figure1, 2: figure2, 3: figure3}[spec.figure](spec)


def _fmt(v):
    if v is None:
        return ""
    return repr(float(v))


def to_csv(ds):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for p in ds.polylines:
        for (u, a), r in zip(p.points, p.residual):
            w.writerow([_fmt(p.m), _fmt(u), _fmt(a), p.kind, _fmt(r), p.branch])
    return buf.getvalue()


def to_json(ds):
    spec = ds.spec
    payload = {
        "figure": spec.figure,
        "ms": list(spec.ms),
        "window": list(spec.window),
        "res": spec.res,
        "metadata": ds.metadata,
        "polylines": [
            {
                "kind": p.kind,
                "m": None if p.m is None else float(p.m),
                "branch": p.branch,
                "points": [[float(u), float(a), float(r)] for (u, a), r in zip(p.points, p.residual)],
            }
            for p in ds.polylines
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def _css_class(kind):
    return re.sub(r"[^A-Za-z0-9_-]", "-", kind)


def to_svg(ds):
    u0, u1, a0, a1 = ds.spec.window
    width = SVG_WIDTH
    height = round(width * (a1 - a0) / (u1 - u0), 3)
    sx = width / (u1 - u0)
    sy = height / (a1 - a0)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width:g} {height:g}">',
    ]
    for p in ds.polylines:
        xs = (p.points[:, 0] - u0) * sx
        ys = height - (p.points[:, 1] - a0) * sy
        if len(xs) == 1:
            d = f"M{xs[0]:.3f},{ys[0]:.3f}h0"
        else:
            d = "M" + " L".join(f"{x:.3f},{y:.3f}" for x, y in zip(xs, ys))
        m = "" if p.m is None else f' data-m="{float(p.m)!r}"'
        out.append(f'<path class="{_css_class(p.kind)}"{m} data-branch="{p.branch}" d="{d}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def serialize(ds, fmt=None):
    fmt = fmt or ds.spec.fmt
    return {"csv": to_csv, "json": to_json, "svg": to_svg}[fmt](ds)
