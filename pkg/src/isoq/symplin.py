"""Linear algebra of Sp(2, C), its 5-dimensional orthogonal representation
on skew matrices, and the spin / symmetric-cube maps.

Index conventions: ``elem(i, j)`` is the 4x4 matrix unit with a 1 in row
``i``, column ``j`` (1-based).  The symplectic form is ``x^T J y`` with
``J = [[0, I], [-I, 0]]``.
"""

import math

import numpy as np

from .errors import NotInSpan, NotSymplectic, NotUnimodular

GROUP_TOL = 1e-9
SQ2 = math.sqrt(2.0)

J = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]], dtype=complex)


def elem(i, j, n=4):
    m = np.zeros((n, n), dtype=complex)
    m[i - 1, j - 1] = 1.0
    return m


def _L():
    e = elem
    return np.array([
        e(2, 1) - e(1, 2),
        e(4, 1) - e(1, 4),
        (e(3, 1) - e(1, 3) - e(4, 2) + e(2, 4)) / SQ2,
        e(3, 2) - e(2, 3),
        e(4, 3) - e(3, 4),
    ])


L = _L()
E = np.array([
    (L[0] + L[4]) / SQ2,
    1j * (L[0] - L[4]) / SQ2,
    L[2],
    (L[1] + L[3]) / SQ2,
    1j * (L[1] - L[3]) / SQ2,
])

# antidiagonal Gram matrix of the L-basis
GRAM = np.fliplr(np.eye(5)).astype(complex)


def omega_pair(x, y):
    x = np.asarray(x)
    y = np.asarray(y)
    return x[..., 0] * y[..., 2] - x[..., 2] * y[..., 0] + x[..., 1] * y[..., 3] - x[..., 3] * y[..., 1]


def symplectic_residual(A):
    A = np.asarray(A, dtype=complex)
    return float(np.max(np.abs(A.T @ J @ A - J)))


def is_symplectic(A, tol=GROUP_TOL):
    return symplectic_residual(A) < tol


def sp_inverse(A):
    """Inverse of a symplectic matrix, ``-J A^T J``."""
    A = np.asarray(A, dtype=complex)
    return -J @ A.T @ J


_LFLAT = L.reshape(5, 16).T


def lbasis_compose(c):
    c = np.asarray(c, dtype=complex)
    return np.tensordot(c, L, axes=(-1, 0))


def lbasis_decompose(X, tol=GROUP_TOL):
    X = np.asarray(X, dtype=complex)
    flat = X.reshape(16)
    c, *_ = np.linalg.lstsq(_LFLAT, flat, rcond=None)
    res = np.max(np.abs(_LFLAT @ c - flat))
    scale = max(1.0, float(np.max(np.abs(flat))))
    if res > tol * scale:
        raise NotInSpan(f"matrix is {res:.3g} away from the span of the L-basis")
    return c


def gfrak(X, Y):
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    return complex(0.5 * np.trace(J @ X @ J @ Y))


def gram_check():
    """Max deviation of the hard-coded Gram matrix from direct evaluation."""
    G = np.array([[gfrak(a, b) for b in L] for a in L])
    return float(np.max(np.abs(G - GRAM)))


def spin_cover(A, tol=GROUP_TOL):
    """Matrix of ``X -> A X A^T`` on the L-basis."""
    A = np.asarray(A, dtype=complex)
    if symplectic_residual(A) > tol:
        raise NotSymplectic(f"residual {symplectic_residual(A):.3g}")
    return np.column_stack([lbasis_decompose(A @ Lk @ A.T, tol=1e-6) for Lk in L])


def gram_orthogonality_residual(M):
    M = np.asarray(M, dtype=complex)
    return float(np.max(np.abs(M.T @ GRAM @ M - GRAM)))


# symmetric cube: basis a111, a112, a222, a122 rescaled so the image is
# symplectic and the orbit of e1 is the twisted cubic of the standard cycle
CUBE_WEIGHTS = np.array([1.0, -SQ2 * math.sqrt(3.0) / 3.0, SQ2 * math.sqrt(3.0), 1.0])
_MONOMIALS = [(3, 0), (2, 1), (0, 3), (1, 2)]  # powers of (u, v) per slot


def sym_cube_entries(a, b, c, d):
    """Entries of the symmetric cube of ``[[a, b], [c, d]]`` as a nested list.

    Works for any ring elements (numbers or jets).
    """
    # u -> a u + c v, v -> b u + d v acting on monomials u^p v^q
    out = [[0 for _ in range(4)] for _ in range(4)]
    index = {m: k for k, m in enumerate(_MONOMIALS)}
    for col, (p, q) in enumerate(_MONOMIALS):
        poly = {(0, 0): 1}
        for _ in range(p):
            poly = _polymul(poly, {(1, 0): a, (0, 1): c})
        for _ in range(q):
            poly = _polymul(poly, {(1, 0): b, (0, 1): d})
        for mono, coef in poly.items():
            row = index[mono]
            out[row][col] = out[row][col] + coef * (CUBE_WEIGHTS[row] / CUBE_WEIGHTS[col])
    return out


def _sym_cube(x):
    (a, b), (c, d) = x
    return np.array(sym_cube_entries(a, b, c, d), dtype=complex)


def _polymul(p, q):
    r = {}
    for (i1, j1), c1 in p.items():
        for (i2, j2), c2 in q.items():
            k = (i1 + i2, j1 + j2)
            r[k] = r.get(k, 0) + c1 * c2
    return r


def embed_sl2(x, tol=GROUP_TOL):
    x = np.asarray(x, dtype=complex)
    if abs(np.linalg.det(x) - 1) > tol:
        raise NotUnimodular(f"det = {np.linalg.det(x)}")
    return _sym_cube(x)


# E-basis coordinates
_EFLAT = E.reshape(5, 16).T


def real_coords(X):
    """E-basis coordinates of ``X``; returns ``(t_real, residual)``.

    ``residual`` is the size of the imaginary part of the complex
    coordinates, i.e. the distance from the real form.
    """
    c = lbasis_decompose(X)
    X = lbasis_compose(c)
    t, *_ = np.linalg.lstsq(_EFLAT, X.reshape(16), rcond=None)
    return t.real.copy(), float(np.max(np.abs(t.imag)))


def e_from_l(c):
    """Convert L-coordinates to (complex) E-coordinates."""
    X = lbasis_compose(c)
    t, *_ = np.linalg.lstsq(_EFLAT, X.reshape(16), rcond=None)
    return t


def random_sl2(rng):
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return x / np.sqrt(np.linalg.det(x))


def random_symplectic(rng, scale=0.5):
    """exp of a random element of sp(2, C)."""
    from scipy.linalg import expm

    P = scale * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    Q = scale * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    R = scale * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    Q = Q + Q.T
    R = R + R.T
    X = np.block([[P, Q], [R, -P.T]])
    return expm(X)


def bonnet_matrix(b):
    """Element ``cosh(b/2) I + sinh(b/2) M`` of the classical Goursat group."""
    M = elem(1, 2) + elem(2, 1) - elem(3, 4) - elem(4, 3)
    return np.cosh(b / 2) * np.eye(4) + np.sinh(b / 2) * M
