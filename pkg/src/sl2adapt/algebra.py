"""Arithmetic in sl2 and SL2(C) in the basis {U, H, W}.

An algebra element is an array whose last axis holds the three (possibly
complex) coefficients ``(c_U, c_H, c_W)``; a group element is a ``(..., 2, 2)``
complex array. All functions broadcast over leading axes.

    U = [[0, -1], [1, 0]],  H = [[1, 0], [0, -1]],  W = [[0, 1], [1, 0]]

U spans k, {H, W} spans p and a+ = {aH : a >= 0}.
"""

from math import factorial

import numpy as np

from .scalar import eval_C_complex, eval_S_complex

DET_TOL = 1e-10

U = np.array([1.0, 0.0, 0.0])
H = np.array([0.0, 1.0, 0.0])
W = np.array([0.0, 0.0, 1.0])

U_MAT = np.array([[0, -1], [1, 0]], dtype=complex)
H_MAT = np.array([[1, 0], [0, -1]], dtype=complex)
W_MAT = np.array([[0, 1], [1, 0]], dtype=complex)
BASIS_MATRICES = np.stack([U_MAT, H_MAT, W_MAT])

IDENTITY = np.eye(2, dtype=complex)
J = np.array([[1, 0], [0, -1]], dtype=complex)

# conjugator realising A: U -> iH, H -> iU, W -> W
CAYLEY_T = np.array([[1, 1j], [1j, 1]], dtype=complex) / np.sqrt(2.0)
CAYLEY_T_INV = np.array([[1, -1j], [-1j, 1]], dtype=complex) / np.sqrt(2.0)


class GroupError(ValueError):
    """Raised for matrices that are not in the expected group."""


def vec(c_u=0.0, c_h=0.0, c_w=0.0):
    """Build a coefficient vector; complex if any coefficient is complex."""
    return np.array([c_u, c_h, c_w])


def k_part(X):
    """Projection onto k = span{U}."""
    X = np.asarray(X)
    out = np.zeros_like(X)
    out[..., 0] = X[..., 0]
    return out


def p_part(X):
    """Projection onto p = span{H, W}."""
    X = np.asarray(X)
    out = X.copy()
    out[..., 0] = 0
    return out


def to_matrix(X):
    X = np.asarray(X)
    cu, ch, cw = X[..., 0], X[..., 1], X[..., 2]
    out = np.empty(X.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = ch
    out[..., 0, 1] = cw - cu
    out[..., 1, 0] = cw + cu
    out[..., 1, 1] = -ch
    return out


def from_matrix(M):
    """Coefficients of a trace-zero matrix in the basis {U, H, W}."""
    M = np.asarray(M)
    out = np.empty(M.shape[:-2] + (3,), dtype=complex)
    out[..., 0] = 0.5 * (M[..., 1, 0] - M[..., 0, 1])
    out[..., 1] = 0.5 * (M[..., 0, 0] - M[..., 1, 1])
    out[..., 2] = 0.5 * (M[..., 1, 0] + M[..., 0, 1])
    return out


def real_if_close(X, tol=1e-12):
    """Drop the imaginary part when it vanishes everywhere (the realness flag)."""
    X = np.asarray(X)
    if np.iscomplexobj(X) and np.all(np.abs(X.imag) <= tol):
        return X.real.copy()
    return X


def bracket(X, Y):
    """Lie bracket from [U,H] = 2W, [U,W] = -2H, [H,W] = -2U."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    x1, x2, x3 = X[..., 0], X[..., 1], X[..., 2]
    y1, y2, y3 = Y[..., 0], Y[..., 1], Y[..., 2]
    return np.stack(
        [
            -2.0 * (x2 * y3 - x3 * y2),
            -2.0 * (x1 * y3 - x3 * y1),
            2.0 * (x1 * y2 - x2 * y1),
        ],
        axis=-1,
    )


def ad_matrix(X):
    """Matrix of ad(X) acting on coefficient column vectors."""
    X = np.asarray(X)
    cols = [bracket(X, e) for e in np.eye(3)]
    return np.stack(cols, axis=-1)


def killing_form(X, Y):
    """B(X, Y) = tr(ad X ad Y), computed from the structure constants."""
    return np.trace(ad_matrix(X) @ ad_matrix(Y), axis1=-2, axis2=-1)


def det2(M):
    M = np.asarray(M)
    return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]


def inv2(M):
    """Inverse of a 2x2 matrix with determinant one."""
    M = np.asarray(M)
    out = np.empty_like(M)
    out[..., 0, 0] = M[..., 1, 1]
    out[..., 0, 1] = -M[..., 0, 1]
    out[..., 1, 0] = -M[..., 1, 0]
    out[..., 1, 1] = M[..., 0, 0]
    return out


def group_element(M, tol=DET_TOL):
    """Validate membership in SL2(C) and return the matrix as a complex array."""
    M = np.asarray(M, dtype=complex)
    if M.shape[-2:] != (2, 2):
        raise GroupError(f"expected 2x2 matrices, got shape {M.shape}")
    dev = np.max(np.abs(det2(M) - 1.0))
    if not dev < tol:
        raise GroupError(f"determinant deviates from 1 by {dev:.3e}")
    return M


def exp_group(Z):
    """Closed-form exponential: exp Z = C(q) I + S(q) Z with q = -det Z."""
    M = to_matrix(Z)
    q = -det2(M)
    c = eval_C_complex(q)[..., None, None]
    s = eval_S_complex(q)[..., None, None]
    return c * IDENTITY + s * M


def expm_taylor(M, degree=24, squarings=7):
    """Scaling-and-squaring Taylor exponential; used as an independent oracle."""
    M = np.asarray(M, dtype=complex)
    A = M / 2.0 ** squarings
    term = np.broadcast_to(IDENTITY, M.shape).copy()
    out = term.copy()
    for k in range(1, degree + 1):
        term = term @ A / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def adjoint(g, X):
    """Ad_g X = g X g^-1, returned as coefficients."""
    g = np.asarray(g)
    return from_matrix(g @ to_matrix(X) @ inv2(g))


def _check_order(N):
    if not 0 <= N <= 60:
        raise ValueError("series order must lie in [0, 60]")


def ad_series(X, Y, N):
    """Truncated exponential-adjoint series sum_{l<=N} ad(X)^l Y / l!."""
    _check_order(N)
    term = np.asarray(Y, dtype=complex)
    out = term.copy()
    for l in range(1, N + 1):
        term = bracket(X, term)
        out = out + term / factorial(l)
    return out


def d_exp(X, Y, N):
    """Left-trivialised differential of exp: sum_{l<=N} (-1)^l ad(X)^l Y / (l+1)!."""
    _check_order(N)
    term = np.asarray(Y, dtype=complex)
    out = term.copy()
    for l in range(1, N + 1):
        term = bracket(X, term)
        out = out + (-1) ** l * term / factorial(l + 1)
    return out


def sigma_G(g):
    """Complex conjugation, the involution of SL2(C) fixing SL2(R)."""
    return np.conj(np.asarray(g))


def sigma_SU11(g):
    """The involution J (conj(g)^T)^-1 J whose fixed points form SU(1,1)."""
    g = np.asarray(g)
    gh = np.conj(np.swapaxes(g, -1, -2))
    return J @ inv2(gh) @ J


def cayley_A(g):
    """Group automorphism A(g) = T g T^-1, carrying SL2(R) onto SU(1,1)."""
    return CAYLEY_T @ np.asarray(g) @ CAYLEY_T_INV


def cayley_A_alg(X):
    """Lie algebra version of A: U -> iH, H -> iU, W -> W."""
    X = np.asarray(X)
    out = np.empty(X.shape, dtype=complex)
    out[..., 0] = 1j * X[..., 1]
    out[..., 1] = 1j * X[..., 0]
    out[..., 2] = X[..., 2]
    return out


def _self_check():
    images = from_matrix(CAYLEY_T @ BASIS_MATRICES @ CAYLEY_T_INV)
    expected = np.array([[0, 1j, 0], [1j, 0, 0], [0, 0, 1]])
    if not np.allclose(images, expected, atol=1e-14):
        raise RuntimeError("Cayley conjugator does not realise U->iH, H->iU, W->W")
    if not np.allclose(CAYLEY_T @ CAYLEY_T_INV, IDENTITY, atol=1e-14):
        raise RuntimeError("Cayley conjugator inverse is wrong")
    if abs(det2(CAYLEY_T) - 1) > 1e-14:
        raise RuntimeError("Cayley conjugator must have unit determinant")


_self_check()
