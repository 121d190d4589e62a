"""The left-invariant metrics nu_m on SL2(R), their connection and geodesics.

nu_m(X, Y) = -m B(X_k, Y_k) + B(X_p, Y_p). The group L = G x K acts on
TG = G x g by (g, k).(g', X) = (g g' k^-1, Ad_k X).
"""

from dataclasses import dataclass

import numpy as np

from .algebra import (
    adjoint,
    bracket,
    det2,
    exp_group,
    inv2,
    k_part,
    killing_form,
    p_part,
)

GROUP_TOL = 1e-10


@dataclass(frozen=True)
class TangentPoint:
    """A point (g, X) of TG with g in SL2(R) and X a real algebra vector."""

    g: np.ndarray
    X: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=complex)
        X = np.asarray(self.X)
        if g.shape != (2, 2) or X.shape != (3,):
            raise ValueError("TangentPoint needs a 2x2 matrix and 3 coefficients")
        if np.max(np.abs(g.imag)) > GROUP_TOL or abs(det2(g) - 1) > GROUP_TOL:
            raise ValueError("base point must lie in SL2(R)")
        if np.iscomplexobj(X) and np.max(np.abs(X.imag)) > GROUP_TOL:
            raise ValueError("tangent vector must be real")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "X", np.real(X).astype(float))

    @classmethod
    def at_identity(cls, X):
        return cls(np.eye(2), X)


def metric_eval(m, X, Y):
    """nu_m(X, Y) for real algebra vectors."""
    return -m * killing_form(k_part(X), k_part(Y)) + killing_form(p_part(X), p_part(Y))


def connection(m, X, Y):
    """nabla_X Y = 1/2 ([X,Y] + (1+m)([X_k, Y_p] + [Y_k, X_p]))."""
    cross = bracket(k_part(X), p_part(Y)) + bracket(k_part(Y), p_part(X))
    return 0.5 * (bracket(X, Y) + (1.0 + m) * cross)


def geodesic(m, X, t):
    """gamma_X(t) = exp t(-m X_k + X_p) . exp t(1+m) X_k, the geodesic through e."""
    X = np.asarray(X, dtype=float)
    first = -m * k_part(X) + p_part(X)
    second = (1.0 + m) * k_part(X)
    t = np.asarray(t, dtype=float)[..., None]
    return exp_group(t * first) @ exp_group(t * second)


def is_rotation(k, tol=1e-10):
    k = np.asarray(k, dtype=complex)
    if k.shape != (2, 2) or np.max(np.abs(k.imag)) > tol:
        return False
    k = k.real
    return bool(np.allclose(k.T @ k, np.eye(2), atol=tol) and abs(np.linalg.det(k) - 1) < tol)


def l_action(g, k, p):
    """(g, k).(g', X) = (g g' k^-1, Ad_k X)."""
    if not is_rotation(k):
        raise ValueError("k must lie in SO2(R)")
    g = np.asarray(g, dtype=complex)
    k = np.asarray(k, dtype=complex)
    return TangentPoint(g @ p.g @ inv2(k), np.real(adjoint(k, p.X)))


def rotation(theta):
    """exp(theta U), an element of K = SO2(R)."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)
