"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line; the lines are echoed in the pytest
terminal summary and also printed when the file is run as a script:

    python tests/test_acceptance.py
"""

import numpy as np
import pytest

from sl2adapt import algebra as alg
from sl2adapt.figures import FigureSpec, render_figure, to_csv, to_json
from sl2adapt.geodesics import TangentPoint, geodesic, metric_eval
from sl2adapt.polar import (
    boundary_a,
    in_sigma_m_arrays,
    polar,
    polar_slice,
    sigma_conditions,
    six_vectors_arrays,
    star_boundary_a,
)
from sl2adapt.quotients import E_TILDE, F_arrays
from sl2adapt.reduced import gamma_curve, injectivity_scan, reduced_polar_arrays, tilde_a, trace_level_set
from sl2adapt.scalar import PI2, eval_C, eval_f, eval_S, eval_S_prime

SEED = 20240611
RESULTS = {}


def record(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail}"
    RESULTS[n] = line
    print(line)
    return ok


def relerr(x, ref):
    return np.abs(x - ref) / np.maximum(1, np.abs(ref))


# -- 1. six tangent-image vectors against two oracles -------------------------

def series_six(m, u, a, N=40):
    first = 1j * np.array([-m * u, a, 0.0])
    out = [alg.ad_series(-first, e, N) for e in np.eye(3)]
    out.append(alg.d_exp(first, -1j * m * alg.U, N) + 1j * (1 + m) * alg.U)
    out += [alg.d_exp(first, 1j * e, N) for e in (alg.H, alg.W)]
    return np.array(out)


def fd_six(m, u, a, h=1e-3):
    # 5-point stencil on the polar map, then undo conjugation by the trailing factor
    base = TangentPoint.at_identity([u, a, 0.0])
    P_inv = alg.inv2(polar(m, base))
    E2 = alg.exp_group(1j * (1 + m) * np.array([u, 0.0, 0.0]))
    out = []
    for j in range(6):
        d = []
        for s in (-2 * h, -h, h, 2 * h):
            e = np.eye(3)[j % 3] * s
            q = TangentPoint(alg.exp_group(e).real, base.X) if j < 3 else TangentPoint(np.eye(2), base.X + e)
            d.append(polar(m, q))
        left = P_inv @ (d[0] - 8 * d[1] + 8 * d[2] - d[3]) / (12 * h)
        out.append(alg.from_matrix(E2 @ left @ alg.inv2(E2)))
    return np.array(out)


def criterion_1():
    worst_series = worst_fd = 0.0
    for m in np.linspace(-2, 2, 5):
        for u in np.linspace(-1, 1, 5):
            for a in np.linspace(0, 1, 5):
                v = six_vectors_arrays(m, u, a)
                worst_series = max(worst_series, np.max(np.abs(v - series_six(m, u, a))))
                worst_fd = max(worst_fd, np.max(np.abs(v - fd_six(m, u, a))))
    ok = worst_series < 1e-8 and worst_fd < 1e-8
    return record(1, ok, f"six vectors on 125 points: series err {worst_series:.2e}, "
                         f"finite-difference err {worst_fd:.2e} (tol 1e-8)")


# -- 2. scalar kernel -------------------------------------------------------------

def criterion_2():
    x = np.linspace(-PI2, 30, 10_001)[1:]
    C, S, Sp = eval_C(x), eval_S(x), eval_S_prime(x)
    positive = bool(np.all(S > 0) and np.all(Sp > 0))
    monotone = all(bool(np.all(np.diff(v) > 0)) for v in (S, C, Sp, C / S, S / Sp))
    above = bool(np.all(eval_f(x) > x))
    pyth = float(np.max(relerr(C * C - x * S * S, 1.0)))
    f0 = abs(float(eval_f(0.0)) - 3)
    ok = positive and monotone and above and pyth < 1e-10 and f0 < 1e-9
    return record(2, ok, f"positivity {positive}, monotonicity {monotone}, f(x) > x {above}, "
                         f"|C^2 - xS^2 - 1| {pyth:.1e}, |f(0) - 3| {f0:.1e}")


# -- 3. geodesics -------------------------------------------------------------------

def _d5(f, t, h):
    return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)


def _velocity(m, X, t, h):
    # left-trivialised derivative g^-1 g' by a 5-point stencil
    dg = _d5(lambda s: geodesic(m, X, s), t, h)
    return np.real(alg.from_matrix(alg.inv2(geodesic(m, X, t)) @ dg))


def criterion_3():
    rng = np.random.default_rng(SEED)
    h = 1e-3
    t = np.linspace(0, 2, 21)
    worst_ode = worst_speed = 0.0
    for _ in range(100):
        m = rng.uniform(-2, 2)
        X = rng.uniform(-1, 1, 3)
        V = _velocity(m, X, t, h)
        dV = _d5(lambda s: _velocity(m, X, s, h), t, h)
        ode = dV + (1 + m) * alg.bracket(alg.k_part(V), alg.p_part(V))
        worst_ode = max(worst_ode, float(np.max(np.linalg.norm(ode, axis=-1))))
        drift = metric_eval(m, V, V) - metric_eval(m, X, X)
        worst_speed = max(worst_speed, float(np.max(np.abs(drift))))
    ok = worst_ode < 1e-6 and worst_speed < 1e-7
    return record(3, ok, f"100 geodesics on [0, 2]: ODE residual {worst_ode:.1e} (tol 1e-6), "
                         f"speed drift {worst_speed:.1e} (tol 1e-7)")


# -- 4. reduced map against the quotient of the polar map ---------------------------

def _slice_sample(rng, m, n):
    u = rng.uniform(-1.5, 1.5, n)
    a = rng.uniform(0, 0.999, n) * star_boundary_a(m, u)
    return u, a


def criterion_4():
    rng = np.random.default_rng(SEED)
    worst_map = worst_st = 0.0
    for m in (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0):
        u, a = _slice_sample(rng, m, 10_000)
        s, t = F_arrays(polar_slice(m, u, a))
        sh, th = reduced_polar_arrays(m, u, a)
        scale = np.maximum(1, np.maximum(np.abs(s), np.abs(t)))
        worst_map = max(worst_map, float(np.max(np.maximum(np.abs(s - sh), np.abs(t - th)) / scale)))
        x = 4 * u * u * m * m - 4 * a * a
        worst_st = max(worst_st, float(np.max(relerr(s * t, 1 - 4 * a * a * eval_S(x) ** 2))))
    ok = worst_map < 1e-10 and worst_st < 1e-10
    return record(4, ok, f"F o P_m vs closed form on 6 x 10^4 points: {worst_map:.1e}, "
                         f"st identity {worst_st:.1e} (tol 1e-10)")


# -- 5. quotient anchors and symmetries ----------------------------------------------

def _random_complex_group(rng, n):
    X = rng.normal(size=(n, 3)) + 0.7j * rng.normal(size=(n, 3))
    return alg.exp_group(X)


def _pair_err(a, b, scale):
    return float(np.max(np.maximum(np.abs(a[0] - b[0]), np.abs(a[1] - b[1])) / scale))


def criterion_5():
    rng = np.random.default_rng(SEED)
    e = np.eye(2, dtype=complex)
    anchors = [
        _pair_err(F_arrays(e), (1.0, 1.0), 1),
        _pair_err(F_arrays(E_TILDE), (-1.0, -1.0), 1),
    ]
    rho = np.linspace(-2, 2, 81)
    g = alg.exp_group(1j * rho[:, None] * (alg.U + alg.H))
    anchors.append(_pair_err(F_arrays(g), (1 - 2 * rho, 1 + 2 * rho), 1))
    anchor = max(anchors)

    g = _random_complex_group(rng, 1000)
    s, t = F_arrays(g)
    scale = np.maximum(1, np.maximum(np.abs(s), np.abs(t)))
    right = _pair_err(F_arrays(g @ E_TILDE), (-s, -t), scale)
    conj = _pair_err(F_arrays(alg.inv2(E_TILDE) @ g @ E_TILDE), (t, s), scale)
    # observed behaviour, reported alongside the stated one
    left = _pair_err(F_arrays(E_TILDE @ g), (-s, -t), scale)
    right_swap = _pair_err(F_arrays(g @ E_TILDE), (-t, -s), scale)
    ok = anchor < 1e-10 and right < 1e-10 and conj < 1e-10
    return record(5, ok, f"anchors {anchor:.1e}; F(g e~) = -F(g) {right:.1e}; "
                         f"F(e~^-1 g e~) = swap F(g) {conj:.1e} (tol 1e-10) "
                         f"[observed: F(e~ g) = -F(g) {left:.1e}, F(g e~) = -swap F(g) {right_swap:.1e}]")


# -- 6. slice dichotomy -----------------------------------------------------------

def criterion_6():
    mismatches = 0
    for m in (-2.0, -1.0):
        uu, aa = np.meshgrid(np.linspace(-2.9, 2.9, 100), np.linspace(0, 3.5, 100), indexing="ij")
        star, _ = sigma_conditions(m, uu, aa)
        mismatches += int(np.sum(in_sigma_m_arrays(m, uu, aa) != star))
    margins = {}
    for m in (-0.5, 0.0, 1.0):
        us = np.linspace(-2, 2, 81)
        gap = [float(star_boundary_a(m, u)) - boundary_a(m, u) for u in us]
        margins[m] = min(gap)
    ok = mismatches == 0 and all(v > 0 for v in margins.values())
    margin_txt = ", ".join(f"m={m:g}: {v:.3f}" for m, v in margins.items())
    return record(6, ok, f"Sigma_m vs Sigma_m* mismatches for m<=-1: {mismatches}/20000; "
                         f"boundary margins {margin_txt}")


# -- 7. injectivity phase transition ---------------------------------------------

def criterion_7():
    counts = {m: injectivity_scan(m, 500).n_verified for m in (-2.0, -1.0, -0.5, 0.0)}
    rep = injectivity_scan(1.0, 500)
    mirror = [w for w in rep.witnesses if w["kind"] == "mirror" and w["residual"] < 1e-9]
    shaped = [
        w for w in mirror
        if w["p"][0] == -w["q"][0] and w["p"][1] == w["q"][1]
        and abs(w["p"][1] - gamma_curve(1.0, w["p"][0])) < 1e-12
    ]
    ok = all(v == 0 for v in counts.values()) and len(shaped) >= 1
    best = min((w["residual"] for w in shaped), default=float("nan"))
    txt = ", ".join(f"m={m:g}: {v}" for m, v in counts.items())
    return record(7, ok, f"500x500 scans, verified witnesses {txt}; m=1: {len(shaped)} "
                         f"(u, gamma(u)) / (-u, gamma(u)) pairs, best residual {best:.1e}")


# -- 8. level-set topology --------------------------------------------------------

def criterion_8():
    counts = {c: len(trace_level_set(-1.0, c)) for c in (0.2, 0.7, -0.7)}
    expect = {0.2: 2, 0.7: 2, -0.7: 1}
    spec = FigureSpec(3)
    a, b = render_figure(spec), render_figure(FigureSpec(3))
    same = to_csv(a) == to_csv(b) and to_json(a) == to_json(b)
    ok = counts == expect and same
    txt = ", ".join(f"c={c:g}: {n}" for c, n in counts.items())
    return record(8, ok, f"m=-1 branch counts {txt} (expect 2, 2, 1); figure 3 byte-identical rerun {same}")


# -- 9. axis cutoff ----------------------------------------------------------------

def criterion_9():
    ta = tilde_a(1.0)
    eq = abs(np.tan(2 * ta) - 4 * ta)
    vs_gamma = abs(ta - gamma_curve(1.0, 0.0))
    a = np.linspace(0, 1.2, 2401)
    step = a[1] - a[0]
    inside = in_sigma_m_arrays(1.0, np.zeros_like(a), a)
    cutoff = abs(a[inside].max() - ta)
    ok = eq < 1e-10 and vs_gamma < 1e-8 and cutoff <= step
    return record(9, ok, f"a~ = {ta:.12f}: |tan 2a~ - 4a~| {eq:.1e}, |a~ - gamma(0)| {vs_gamma:.1e}, "
                         f"axis cutoff offset {cutoff:.1e} (grid step {step:.1e})")


# -- 10. boundary degeneration -------------------------------------------------------

def criterion_10():
    worst_lit = worst_st = 0.0
    for m in (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0):
        u = np.linspace(-1, 1, 41)
        a = star_boundary_a(m, u)
        s, t = F_arrays(polar_slice(m, u, a))
        lit = (-np.exp(-u * (1 + m)), -np.exp(u * (1 + m)))
        worst_lit = max(worst_lit, _pair_err((s, t), lit, 1))
        worst_st = max(worst_st, float(np.max(np.abs(s * t - 1))))
    ok = worst_lit < 1e-9 and worst_st < 1e-9
    return record(10, ok, f"x = -pi^2 images vs (-e^(-u(1+m)), -e^(u(1+m))): {worst_lit:.1e}; "
                          f"st = 1: {worst_st:.1e} (tol 1e-9)")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda f: f.__name__)
def test_acceptance(criterion, acceptance_lines):
    ok = criterion()
    acceptance_lines.append(RESULTS[int(criterion.__name__.split("_")[1])])
    assert ok, RESULTS[int(criterion.__name__.split("_")[1])]


if __name__ == "__main__":
    for crit in CRITERIA:
        crit()
