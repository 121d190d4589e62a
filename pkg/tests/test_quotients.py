import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.spatial import cKDTree

from sl2adapt import algebra as alg
from sl2adapt.geodesics import rotation
from sl2adapt.polar import polar_slice, star_boundary_a
from sl2adapt.quotients import (
    E_TILDE,
    ConsistencyError,
    F_arrays,
    F_map,
    PPoint,
    QPoint,
    decode_q,
    in_P,
    in_sigma_ag,
    is_unimodular,
    kc_action,
    orbit_dimension,
    pi1,
    q_matrix,
    r_action,
    slice_s1_image,
    slice_s1_preimage,
    special_points,
    to_Q,
)
from sl2adapt.scalar import PI2

gen = arrays(float, 3, elements=st.floats(-1.5, 1.5, allow_nan=False))


def complex_group(re, im):
    return alg.exp_group(np.asarray(re) + 1j * np.asarray(im))


def real_group(x):
    return alg.exp_group(np.asarray(x)).real.astype(complex)


def close(p, q, tol=1e-10):
    scale = max(1.0, *map(abs, p))
    return max(abs(a - b) for a, b in zip(p, q)) < tol * scale


def test_pi1_examples(rng):
    g = real_group(rng.normal(size=3))
    np.testing.assert_allclose(pi1(g), np.eye(2), atol=1e-14)
    X = rng.normal(size=3) * 0.5
    np.testing.assert_allclose(pi1(alg.exp_group(1j * X)), alg.exp_group(2j * X), atol=1e-13)


@given(gen, gen, gen)
def test_pi1_properties(re, im, h):
    g = complex_group(re, im)
    out = pi1(g)
    scale = np.max(np.abs(out)) ** 2
    np.testing.assert_allclose(alg.sigma_G(out), alg.inv2(out), atol=1e-10 * scale)
    np.testing.assert_allclose(pi1(real_group(h) @ g), out, atol=1e-12 * scale * np.max(np.abs(real_group(h))) ** 2)


def test_to_Q_anchors():
    q = to_Q(np.eye(2, dtype=complex))
    assert isinstance(q, QPoint)
    assert close((q.s, q.t, q.b), (1.0, 1.0, 0j), 1e-15)
    q = to_Q(E_TILDE)
    assert (q.s, q.t) == (pytest.approx(-1, abs=1e-15), pytest.approx(-1, abs=1e-15))
    assert abs(q.b) < 1e-15


@given(gen, gen)
def test_to_Q_membership(re, im):
    q = to_Q(complex_group(re, im))
    assert q.residual < 1e-9 * max(1.0, abs(q.s * q.t))


def test_decode_rejects_non_Q_form():
    with pytest.raises(ConsistencyError):
        decode_q(np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex))
    with pytest.raises(ConsistencyError):
        decode_q(np.array([[1j, 0], [0, -1j]]))


@given(gen, gen, st.floats(-1, 1), st.floats(-1, 1))
def test_kc_action_matches_right_multiplication(re, im, x, y):
    g = complex_group(re, im)
    lam = complex(x, y)
    moved = to_Q(g @ alg.exp_group(-lam * alg.U))
    expect = kc_action(lam, to_Q(g))
    scale = max(1.0, abs(moved.s), abs(moved.t), abs(moved.b))
    assert abs(moved.s - expect.s) < 1e-10 * scale
    assert abs(moved.t - expect.t) < 1e-10 * scale
    assert abs(moved.b - expect.b) < 1e-10 * scale


def test_F_rho_line():
    rho = np.linspace(-3, 3, 61)
    s, t = F_arrays(alg.exp_group(1j * rho[:, None] * (alg.U + alg.H)))
    np.testing.assert_allclose(s, 1 - 2 * rho, atol=1e-10)
    np.testing.assert_allclose(t, 1 + 2 * rho, atol=1e-10)


def test_F_on_slice_S1(rng):
    u = rng.uniform(-1.5, 1.5, 500)
    a = rng.uniform(0, 1.5, 500)
    s, t = F_arrays(alg.exp_group(1j * np.stack([u, a, 0 * u], -1)))
    s1, t1 = slice_s1_image(u, a)
    np.testing.assert_allclose(s, s1, atol=1e-10 * max(1, np.max(np.abs(s))))
    np.testing.assert_allclose(t, t1, atol=1e-10 * max(1, np.max(np.abs(t))))


def test_F_constant_on_L_orbits(rng):
    for _ in range(100):
        g = complex_group(rng.normal(size=3), rng.normal(size=3))
        h = real_group(rng.normal(size=3))
        k = rotation(rng.uniform(0, 2 * np.pi))
        assert close(F_map(h @ g @ alg.inv2(k)), F_map(g))


def test_r_action_basics():
    p = PPoint(0.3, -2.0)
    assert r_action(0.0, p) == p
    assert r_action(0.7, p).st == pytest.approx(p.st, rel=1e-15)


@given(gen, gen, st.floats(-1.5, 1.5))
def test_r_action_equivariance(re, im, y):
    g = complex_group(re, im)
    assert close(F_map(g @ alg.exp_group(-1j * y * alg.U)), r_action(y, F_map(g)))
    # the opposite exponent gives the inverse scaling
    assert close(F_map(g @ alg.exp_group(1j * y * alg.U)), r_action(-y, F_map(g)))


def test_special_points():
    pts = special_points()
    np.testing.assert_allclose(pts["g0"], np.diag([np.exp(0.25j * np.pi), np.exp(-0.25j * np.pi)]), atol=1e-15)
    np.testing.assert_allclose(pts["g3"], E_TILDE @ pts["g1"], atol=0)
    np.testing.assert_allclose(pts["g4"], E_TILDE @ pts["g2"], atol=0)
    expect = {
        "e_tilde": (-1, -1),
        "g0": (0, 0),
        "g1": (2, 0),
        "g2": (0, 2),
        "g3": (-2, 0),
        "g4": (0, -2),
    }
    for name, st_ in expect.items():
        assert is_unimodular(pts[name])
        assert close(F_map(pts[name]), st_), name


def test_orbit_dimensions():
    pts = special_points()
    pts["e"] = np.eye(2, dtype=complex)
    # L = G x K: 3-dimensional through e and e~, 4 through the others
    assert orbit_dimension(pts["e"]) == 3
    assert orbit_dimension(pts["e_tilde"]) == 3
    for name in ("g0", "g1", "g2", "g3", "g4"):
        assert orbit_dimension(pts[name]) == 4, name
    # G x K^C: codimension one generically, drops at the R-fixed points
    for name in ("e", "e_tilde", "g0"):
        assert orbit_dimension(pts[name], "GxKC") == 4, name
    for name in ("g1", "g2", "g3", "g4"):
        assert orbit_dimension(pts[name], "GxKC") == 5, name
    with pytest.raises(ValueError):
        orbit_dimension(pts["e"], "K")


def test_symmetries(rng):
    g = complex_group(rng.normal(size=(1000, 3)), 0.7 * rng.normal(size=(1000, 3)))
    s, t = F_arrays(g)
    scale = np.maximum(1, np.maximum(np.abs(s), np.abs(t)))
    sl, tl = F_arrays(E_TILDE @ g)
    assert np.max(np.maximum(np.abs(sl + s), np.abs(tl + t)) / scale) < 1e-10
    sc, tc = F_arrays(alg.inv2(E_TILDE) @ g @ E_TILDE)
    assert np.max(np.maximum(np.abs(sc - t), np.abs(tc - s)) / scale) < 1e-10
    # right multiplication composes the two: (s, t) -> (-t, -s)
    sr, tr = F_arrays(g @ E_TILDE)
    assert np.max(np.maximum(np.abs(sr + t), np.abs(tr + s)) / scale) < 1e-10


def test_image_in_P(rng):
    g = complex_group(rng.normal(size=(2000, 3)), rng.normal(size=(2000, 3)))
    s, t = F_arrays(g)
    assert np.all(s * t <= 1 + 1e-9 * np.maximum(1, np.abs(s * t)))
    assert in_P(PPoint(2.0, 0.5)) and not in_P(PPoint(2.0, 0.6))


def test_sigma_ag():
    assert in_sigma_ag(0.0, np.pi / 4)
    assert not in_sigma_ag(0.0, np.pi / 4, closed=False)
    assert not in_sigma_ag(0.0, 0.8)


def test_slice_s1_bijective_onto_half_P():
    # fine parameterisation of the closure of Sigma_AG
    u = np.linspace(-1.5, 1.5, 301)
    uu, ff = np.meshgrid(u, np.linspace(0, 1, 151), indexing="ij")
    aa = ff * np.sqrt(uu ** 2 + PI2 / 16)
    s, t = slice_s1_image(uu.ravel(), aa.ravel())
    assert np.all(s + t >= -1e-12)
    assert np.all(s * t <= 1 + 1e-12)
    # collisions only between parameter points that are themselves close
    pts = np.stack([s, t], -1)
    pre = np.stack([uu.ravel(), aa.ravel()], -1)
    pairs = cKDTree(pts).query_pairs(1e-6, output_type="ndarray")
    far = np.linalg.norm(pre[pairs[:, 0]] - pre[pairs[:, 1]], axis=-1) > 0.05
    # the only identifications happen on the edge x = -pi^2/4, which maps to s = -t
    edge = np.abs(4 * pre[pairs[far, 0], 0] ** 2 - 4 * pre[pairs[far, 0], 1] ** 2 + PI2 / 4) < 1e-9
    assert np.all(edge)
    # the e~ translate covers the other half
    sg, tg = F_arrays(E_TILDE @ alg.exp_group(1j * np.stack([uu.ravel(), aa.ravel(), 0 * aa.ravel()], -1)))
    assert np.all(sg + tg <= 1e-9)


@given(st.floats(-1.5, 1.5), st.floats(0, 1))
def test_slice_s1_round_trip(u, frac):
    a = frac * np.sqrt(u * u + PI2 / 16) * (1 - 1e-9)
    s, t = slice_s1_image(u, a)
    u2, a2 = slice_s1_preimage(float(s), float(t))
    assert u2 == pytest.approx(u, abs=1e-6)
    assert a2 == pytest.approx(a, abs=1e-6)
    with pytest.raises(ValueError):
        slice_s1_preimage(-2.0, 0.5)


@pytest.mark.parametrize("m", [-2.0, -0.5, 0.0, 1.0])
def test_star_boundary_image(m):
    # points with x = -pi^2 land on {st = 1} at (-e^{-2u(1+m)}, -e^{2u(1+m)})
    u = np.linspace(-1, 1, 41)
    a = star_boundary_a(m, u)
    s, t = F_arrays(polar_slice(m, u, a))
    np.testing.assert_allclose(s, -np.exp(-2 * u * (1 + m)), rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(t, -np.exp(2 * u * (1 + m)), rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(s * t, 1, atol=1e-9)


def test_q_matrix_shape(rng):
    g = complex_group(rng.normal(size=(4, 2, 3)), rng.normal(size=(4, 2, 3)))
    assert q_matrix(g).shape == (4, 2, 2, 2)
