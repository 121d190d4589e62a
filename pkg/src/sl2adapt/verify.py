"""Invariant suites run by ``sl2adapt verify``.

Each check returns a record {name, passed, max_residual, samples}. A suite
passes when every check does. Sampling is seeded so reports are reproducible.
"""

import numpy as np

from . import algebra as alg
from .geodesics import connection, geodesic, metric_eval, rotation
from .polar import (
    boundary_a,
    determinants_arrays,
    in_sigma_m_arrays,
    polar_slice,
    sigma_conditions,
    six_vectors_arrays,
    star_boundary_a,
)
from .quotients import E_TILDE, F_arrays, special_points
from .reduced import (
    gamma_curve,
    injectivity_scan,
    reduced_polar_arrays,
    tilde_a,
)
from .scalar import PI2, eval_C, eval_f, eval_S, eval_S_prime

SUITES = ("functions", "algebra", "geodesics", "polar", "quotients", "reduced")
DEFAULT_SCAN_RES = 300


def _check(name, residuals, tol, samples=None):
    residuals = np.atleast_1d(np.asarray(residuals, dtype=float))
    worst = float(np.max(residuals)) if residuals.size else 0.0
    return {
        "name": name,
        "passed": bool(np.all(np.isfinite(residuals)) and worst < tol),
        "max_residual": worst,
        "samples": int(samples if samples is not None else residuals.size),
    }


def _flag(name, ok, samples, residual=0.0):
    return {"name": name, "passed": bool(ok), "max_residual": float(residual), "samples": int(samples)}


def _tol(default, override):
    return default if override is None else override


def suite_functions(rng, tol=None, **_):
    xs = np.linspace(-50, 50, 2001)
    C, S = eval_C(xs), eval_S(xs)
    grid = np.linspace(-PI2 + 1e-6, 30, 10_000)
    Sg, Cg, Spg = eval_S(grid), eval_C(grid), eval_S_prime(grid)
    mono = [Sg, Cg, Spg, Cg / Sg, Sg / Spg]
    viol = max(float(np.max(-np.diff(v))) for v in mono)
    xf = np.linspace(-PI2 + 1e-3, 20, 2001)
    h = 1e-5
    xc = rng.uniform(-9, 30, 200)
    dC = (eval_C(xc + h) - eval_C(xc - h)) / (2 * h)
    return [
        _check("pythagoras", np.abs(C * C - xs * S * S - 1) / np.maximum(1, C * C), _tol(1e-10, tol)),
        _flag("positivity", np.all(Sg > 0) and np.all(Spg > 0), grid.size),
        _flag("monotonicity", viol < 0, grid.size, max(viol, 0.0)),
        _check("f_at_zero", abs(eval_f(0.0) - 3.0), _tol(1e-9, tol), 1),
        _flag("f_above_diagonal", np.all(eval_f(xf) > xf), xf.size),
        _check("C_prime", np.abs(dC - 0.5 * eval_S(xc)) / np.maximum(1, np.abs(dC)), _tol(1e-6, tol)),
    ]


def suite_algebra(rng, tol=None, **_):
    X = rng.normal(size=(1000, 3))
    X *= (2 * rng.uniform(size=(1000, 1)) ** (1 / 3)) / np.linalg.norm(X, axis=-1, keepdims=True)
    dets = np.abs(alg.det2(alg.exp_group(1j * X)) - 1)
    Z = rng.normal(size=(200, 3)) + 1j * rng.normal(size=(200, 3))
    oracle = alg.expm_taylor(alg.to_matrix(Z))
    diff = np.max(np.abs(alg.exp_group(Z) - oracle), axis=(-2, -1)) / np.maximum(
        1, np.max(np.abs(oracle), axis=(-2, -1)))
    g = alg.exp_group(rng.normal(size=(200, 3)))
    A, B = rng.normal(size=(200, 3)), rng.normal(size=(200, 3))
    kill = np.abs(alg.killing_form(alg.adjoint(g, A), alg.adjoint(g, B)) - alg.killing_form(A, B))
    gc = alg.exp_group(0.5 * Z)
    equi = np.abs(alg.cayley_A(alg.sigma_G(gc)) - alg.sigma_SU11(alg.cayley_A(gc)))
    return [
        _check("det_exp", dets, _tol(1e-10, tol)),
        _check("exp_vs_taylor", diff, _tol(1e-10, tol)),
        _check("killing_invariance", kill, _tol(1e-8, tol)),
        _check("cayley_equivariance", equi.max(axis=(-2, -1)), _tol(1e-12, tol)),
    ]


def suite_geodesics(rng, tol=None, **_):
    h = 1e-4
    ts = np.linspace(0.1, 1.9, 10)
    ode, speed = [], []
    for _ in range(100):
        m = rng.uniform(-2, 2)
        X = rng.normal(size=3)
        X *= rng.uniform(0.05, 0.5) / np.linalg.norm(X)
        g0 = geodesic(m, X, ts - h)
        g1 = geodesic(m, X, ts)
        g2 = geodesic(m, X, ts + h)
        gm = geodesic(m, X, ts - 2 * h)
        gp = geodesic(m, X, ts + 2 * h)

        def vel(a, b, c):
            return np.real(alg.from_matrix(alg.inv2(b) @ (c - a) / (2 * h)))

        V0, V1, V2 = vel(gm, g0, g1), vel(g0, g1, g2), vel(g1, g2, gp)
        dV = (V2 - V0) / (2 * h)
        ode.append(np.max(np.abs(dV + (1 + m) * alg.bracket(alg.k_part(V1), alg.p_part(V1)))))
        nu = metric_eval(m, V1, V1)
        speed.append(np.max(np.abs(nu - metric_eval(m, X, X))))
    Xs, Ys, Zs = rng.normal(size=(3, 100, 3))
    compat = np.abs(metric_eval(1.0, connection(1.0, Xs, Ys), Zs) + metric_eval(1.0, Ys, connection(1.0, Xs, Zs)))
    k = rotation(rng.uniform(0, 2 * np.pi))
    iso = np.abs(metric_eval(0.7, np.real(alg.adjoint(k, Xs)), np.real(alg.adjoint(k, Ys))) - metric_eval(0.7, Xs, Ys))
    return [
        _check("geodesic_ode", ode, _tol(1e-6, tol)),
        _check("constant_speed", speed, _tol(1e-7, tol)),
        _check("metric_compatibility", compat, _tol(1e-9, tol)),
        _check("k_isometry", iso, _tol(1e-9, tol)),
    ]


def six_vectors_oracle(m, u, a, N=40):
    """The six vectors from truncated adjoint and D exp series."""
    first = 1j * np.array([-m * u, a, 0.0])
    out = [alg.ad_series(-first, e, N) for e in np.eye(3)]
    for j, e in enumerate(np.eye(3)):
        if j == 0:
            out.append(alg.d_exp(first, -1j * m * e, N) + 1j * (1 + m) * e)
        else:
            out.append(alg.d_exp(first, 1j * e, N))
    return np.array(out)


def suite_polar(rng, tol=None, m=None, **_):
    us, as_, ms = np.meshgrid(np.linspace(-1, 1, 5), np.linspace(0, 1, 5), np.linspace(-2, 2, 5), indexing="ij")
    us, as_, ms = us.ravel(), as_.ravel(), ms.ravel()
    worst = []
    for u, a, mm in zip(us, as_, ms):
        worst.append(np.max(np.abs(six_vectors_arrays(mm, u, a) - six_vectors_oracle(mm, u, a))))
    checks = [_check("six_vectors_series", worst, _tol(1e-8, tol), us.size)]
    margins = []
    for mm in (-0.5, 0.0, 1.0):
        for u in np.linspace(-2, 2, 21):
            a = boundary_a(mm, u)
            margins.append(4 * u * u * mm * mm - 4 * a * a + PI2)
    checks.append(_flag("boundary_inside_star", min(margins) > 1e-9, len(margins), min(margins)))
    uu, aa = np.meshgrid(np.linspace(-2.5, 2.5, 100), np.linspace(0, 3, 100), indexing="ij")
    mismatch = 0
    for mm in (-2.0, -1.0):
        star, _ = sigma_conditions(mm, uu, aa)
        mismatch += int(np.sum(in_sigma_m_arrays(mm, uu, aa) != star))
    checks.append(_flag("sigma_equals_star", mismatch == 0, 2 * uu.size, mismatch))
    d1, d2 = determinants_arrays(0.0, 0.0, 0.0)
    checks.append(_check("origin_determinants", [abs(d1 - 1), abs(d2 - 1)], _tol(1e-12, tol)))
    return checks


def suite_quotients(rng, tol=None, **_):
    pts = special_points()
    one = np.abs(np.array(F_arrays(alg.IDENTITY)) - 1)
    et = np.abs(np.array(F_arrays(pts["e_tilde"])) + 1)
    rho = np.linspace(-2, 2, 41)
    s, t = F_arrays(alg.exp_group(1j * rho[:, None] * (alg.U + alg.H)))
    rho_res = np.maximum(np.abs(s - (1 - 2 * rho)), np.abs(t - (1 + 2 * rho)))
    g = alg.exp_group(rng.normal(size=(1000, 3)) + 1j * 0.7 * rng.normal(size=(1000, 3)))
    s0, t0 = F_arrays(g)
    sl, tl = F_arrays(E_TILDE @ g)
    sr, tr = F_arrays(g @ E_TILDE)
    sc, tc = F_arrays(alg.inv2(E_TILDE) @ g @ E_TILDE)
    scale = np.maximum(1, np.maximum(np.abs(s0), np.abs(t0)))
    left = np.maximum(np.abs(sl + s0), np.abs(tl + t0)) / scale
    # right multiplication is the composite of the other two: (s, t) -> (-t, -s)
    right = np.maximum(np.abs(sr + t0), np.abs(tr + s0)) / scale
    conj = np.maximum(np.abs(sc - t0), np.abs(tc - s0)) / scale
    contain = s0 * t0 - 1 - 1e-9 * scale ** 2
    return [
        _check("F_identity", one, _tol(1e-10, tol)),
        _check("F_e_tilde", et, _tol(1e-10, tol)),
        _check("F_rho_line", rho_res, _tol(1e-10, tol)),
        _check("left_e_tilde_reflection", left, _tol(1e-10, tol)),
        _check("right_e_tilde_antiswap", right, _tol(1e-10, tol)),
        _check("conjugation_swap", conj, _tol(1e-10, tol)),
        _flag("image_in_P", np.all(contain <= 0), g.shape[0]),
    ]


def suite_reduced(rng, tol=None, m=None, res=DEFAULT_SCAN_RES, **_):
    ms = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0) if m is None else (float(m),)
    checks, witnesses = [], []
    for mm in ms:
        u = rng.uniform(-1, 1, 2000)
        a = rng.uniform(0, 1, 2000) * star_boundary_a(mm, u)
        s, t = F_arrays(polar_slice(mm, u, a))
        sh, th = reduced_polar_arrays(mm, u, a)
        scale = np.maximum(1, np.maximum(np.abs(s), np.abs(t)))
        checks.append(_check(f"reduced_map_m={mm!r}",
                             np.maximum(np.abs(s - sh), np.abs(t - th)) / scale, _tol(1e-10, tol)))
        x = 4 * u * u * mm * mm - 4 * a * a
        checks.append(_check(f"st_identity_m={mm!r}",
                             np.abs(sh * th - (1 - 4 * a * a * eval_S(x) ** 2)) / scale ** 2, _tol(1e-10, tol)))
        rep = injectivity_scan(mm, res)
        expect = mm > 0
        ok = (rep.n_verified > 0) == expect and rep.n_same_side == 0
        checks.append(_flag(f"injectivity_m={mm!r}", ok, rep.n_inside, rep.max_residual))
        for w in rep.witnesses:
            witnesses.append(dict(w, m=mm))
        if mm > 0:
            ta = tilde_a(mm)
            checks.append(_check(f"tilde_a_m={mm!r}", abs(gamma_curve(mm, 0.0) - ta), _tol(1e-8, tol), 1))
    return checks, witnesses


_RUNNERS = {
    "functions": suite_functions,
    "algebra": suite_algebra,
    "geodesics": suite_geodesics,
    "polar": suite_polar,
    "quotients": suite_quotients,
    "reduced": suite_reduced,
}


def run_verify(suite, seed=0, tol=None, m=None, res=DEFAULT_SCAN_RES):
    """Run one suite (or ``all``) and return the JSON-ready report."""
    if suite != "all" and suite not in _RUNNERS:
        raise KeyError(suite)
    names = SUITES if suite == "all" else (suite,)
    rng = np.random.default_rng(seed)
    checks, witnesses = [], []
    for name in names:
        out = _RUNNERS[name](rng, tol=tol, m=m, res=res)
        if isinstance(out, tuple):
            out, found = out
            witnesses += found
        for c in out:
            c["name"] = f"{name}.{c['name']}"
        checks += out
    return {
        "suite": suite,
        "seed": seed,
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
        "witnesses": witnesses,
    }
