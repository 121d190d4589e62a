"""Models of the quotients of SL2(C) by G, by L = G x K and by G x K^C.

Pi_1(g) = sigma_G(g)^-1 g realises G\\G^C; after the Cayley automorphism A its
image is the matrix model Q = {[[s, b], [-conj(b), t]] : st + |b|^2 = 1}.
Forgetting b gives P = {(s, t) : st <= 1} = G^C / L, and F = Pi_2 o A o Pi_1.
"""

from typing import NamedTuple

import numpy as np

from .algebra import (
    BASIS_MATRICES,
    H,
    U,
    cayley_A,
    det2,
    exp_group,
    from_matrix,
    inv2,
    sigma_G,
)
from .scalar import PI2, bisect, eval_C, eval_S

Q_TOL = 1e-8
P_TOL = 1e-9
RANK_RTOL = 1e-7

E_TILDE = np.array([[1j, 0], [0, -1j]], dtype=complex)


class ConsistencyError(RuntimeError):
    """A matrix expected to lie in the model Q does not have Q-form."""


class QPoint(NamedTuple):
    s: float
    t: float
    b: complex

    @property
    def residual(self):
        return abs(self.s * self.t + abs(self.b) ** 2 - 1.0)


class PPoint(NamedTuple):
    s: float
    t: float

    @property
    def st(self):
        return self.s * self.t

    def swap(self):
        return PPoint(self.t, self.s)

    def __neg__(self):
        return PPoint(-self.s, -self.t)


def pi1(g):
    """sigma_G(g)^-1 g; constant on left G-cosets."""
    g = np.asarray(g)
    return inv2(sigma_G(g)) @ g


def q_matrix(g):
    """A(Pi_1(g)) as a raw matrix (vectorised)."""
    return cayley_A(pi1(g))


def decode_q(M, tol=Q_TOL):
    """Split matrices of Q-form into arrays (s, t, b), checking the form."""
    M = np.asarray(M)
    scale = np.maximum(1.0, np.max(np.abs(M), axis=(-2, -1)))
    bad = np.maximum.reduce(
        [
            np.abs(M[..., 0, 0].imag),
            np.abs(M[..., 1, 1].imag),
            np.abs(M[..., 1, 0] + np.conj(M[..., 0, 1])),
        ]
    )
    if np.any(bad > tol * scale):
        raise ConsistencyError(f"matrix not of Q-form (defect {np.max(bad / scale):.3e})")
    s = M[..., 0, 0].real
    t = M[..., 1, 1].real
    b = 0.5 * (M[..., 0, 1] - np.conj(M[..., 1, 0]))
    return s, t, b


def to_Q(g):
    s, t, b = decode_q(q_matrix(g))
    return QPoint(float(s), float(t), complex(b))


def F_arrays(g):
    """F = Pi_2 o A o Pi_1 on stacks of matrices; returns arrays (s, t)."""
    s, t, _ = decode_q(q_matrix(g))
    return s, t


def F_map(g):
    s, t = F_arrays(g)
    return PPoint(float(s), float(t))


def r_action(y, p):
    """The R-action (s, t) -> (e^{2y} s, e^{-2y} t); corresponds to g -> g exp(-iyU)."""
    return PPoint(np.exp(2 * y) * p.s, np.exp(-2 * y) * p.t)


def kc_action(lam, q):
    """exp(lam U) acting on Q: s -> e^{2y}s, b -> e^{2ix}b, t -> e^{-2y}t, lam = x + iy.

    It matches right multiplication by exp(-lam U) on SL2(C).
    """
    x, y = complex(lam).real, complex(lam).imag
    return QPoint(np.exp(2 * y) * q.s, np.exp(-2 * y) * q.t, np.exp(2j * x) * q.b)


def special_points():
    """The elements e~, g0, ..., g4 used to describe orbit types."""
    g1 = exp_group(-0.5j * (U + H))
    g2 = exp_group(0.5j * (U + H))
    return {
        "e_tilde": E_TILDE.copy(),
        "g0": exp_group(0.25j * np.pi * H),
        "g1": g1,
        "g2": g2,
        "g3": E_TILDE @ g1,
        "g4": E_TILDE @ g2,
    }


def in_P(p, tol=P_TOL):
    return p.s * p.t <= 1.0 + tol


def _real6(V):
    return np.concatenate([V.real, V.imag], axis=-1)


def orbit_dimension(g, group="L"):
    """Real dimension of the orbit through g under L = G x K or under G x K^C.

    Numeric rank of the differential of the action, left-trivialised at g:
    generators X in sl2(R) act by g^-1 X g, generators Y of k (or k^C) by -Y.
    """
    g = np.asarray(g, dtype=complex)
    ginv = inv2(g)
    gens = [from_matrix(ginv @ M @ g) for M in BASIS_MATRICES]
    gens.append(-U.astype(complex))
    if group == "GxKC":
        gens.append(-1j * U)
    elif group != "L":
        raise ValueError("group must be 'L' or 'GxKC'")
    A = np.stack([_real6(v) for v in gens], axis=-1)
    sv = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(sv > RANK_RTOL * sv[0]))


def in_sigma_ag(u, a, closed=True):
    """The Akhiezer-Gindikin slice condition 4u^2 - 4a^2 > -pi^2/4 (or >= when closed)."""
    x = 4 * np.asarray(u) ** 2 - 4 * np.asarray(a) ** 2
    return x >= -PI2 / 4 if closed else x > -PI2 / 4


def slice_s1_image(u, a):
    """F(exp i(uU + aH)) = (C(x) - 2uS(x), C(x) + 2uS(x)), x = 4u^2 - 4a^2."""
    x = 4 * np.asarray(u) ** 2 - 4 * np.asarray(a) ** 2
    C, S = eval_C(x), eval_S(x)
    return C - 2 * np.asarray(u) * S, C + 2 * np.asarray(u) * S


def slice_s1_preimage(s, t):
    """Inverse of slice_s1_image on P intersected with {s >= -t}.

    Solves C(x) = (s + t)/2 on [-pi^2/4, inf) by bisection, then reads off u and a.
    """
    half = 0.5 * (s + t)
    if half < 0 or s * t > 1 + P_TOL:
        raise ValueError("point outside P intersected with {s >= -t}")
    lo = -PI2 / 4
    hi = 1.0
    while eval_C(hi) < half:
        hi *= 2
    x = lo if half == 0 else bisect(lambda v: eval_C(v) - half, lo, hi)
    u = (t - s) / (4 * eval_S(x))
    a = np.sqrt(max(u * u - x / 4, 0.0))
    return float(u), float(a)


def is_unimodular(g, tol=1e-10):
    return bool(abs(det2(np.asarray(g)) - 1) < tol)
