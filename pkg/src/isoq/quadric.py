"""Points of the quadric as Lagrangian planes, the Pluecker embedding,
the conformal and contact charts, and projections to the space forms.

Chart calibration
-----------------
The raw affine chart ``(-l4, l3, l2) / l1`` is not isometric to the flat
metric ``dw1 dw3 - dw2**2``; with ``w2 = C2 * l3 / l1`` the null relation
reads ``dw1 dw3 - dw2**2 / (2 C2**2)``.  We take ``C2 = 1/sqrt(2)`` so the
pullback of ``dw1 dw3 - dw2**2`` vanishes on isotropic curves, and the
phase ``SIGMA = -i`` in the flat projections so that the standard cycle
maps to an Enneper surface.  The product ``C2 * SIGMA = -i/sqrt(2)``
is all the projections see.
"""

import numpy as np

from .errors import (
    DegenerateSolve,
    NotLagrangian,
    NotUnimodular,
    OnHyperplaneSection,
    OnQuadric,
)
from .jets import Jet
from .symplin import E, GRAM, GROUP_TOL, J, L, SQ2, gfrak, lbasis_decompose, omega_pair

C2 = 1.0 / SQ2
SIGMA = -1j
END_TOL = 1e-8

PAULI = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


class QPoint:
    """Lagrangian plane spanned by ``u1`` and ``u2``."""

    __slots__ = ("u1", "u2")

    def __init__(self, u1, u2, tol=1e-8):
        u1 = np.asarray(u1, dtype=complex)
        u2 = np.asarray(u2, dtype=complex)
        scale = max(np.linalg.norm(u1) * np.linalg.norm(u2), 1e-300)
        if abs(omega_pair(u1, u2)) > tol * scale:
            raise NotLagrangian(f"omega(u1, u2) = {omega_pair(u1, u2)}")
        if np.linalg.norm(np.outer(u1, u2) - np.outer(u2, u1)) <= 1e-14 * scale:
            raise NotLagrangian("u1 and u2 are parallel")
        self.u1 = u1
        self.u2 = u2


# -- Pluecker map -----------------------------------------------------------

# l-coordinates read directly off the entries of x y^T - y x^T
def _plucker_entries(x, y):
    def w(i, j):
        return x[i] * y[j] - x[j] * y[i]
    # X[1,0] = l1, X[3,0] = l2, X[2,0] = l3/sqrt2, X[2,1] = l4, X[3,2] = l5
    return [w(1, 0), w(3, 0), SQ2 * w(2, 0), w(2, 1), w(3, 2)]


def plucker(P):
    """L-coordinates of ``u1 u2^T - u2 u1^T``."""
    if not isinstance(P, QPoint):
        P = QPoint(*P)
    return np.array(_plucker_entries(P.u1, P.u2), dtype=complex)


def plucker_jet(u1, u2):
    """Pluecker lift of a pair of vector jets, as a ``(5,)``-valued jet."""
    return Jet.stack(_plucker_entries(u1, u2))


def null_residual(l):
    l = np.asarray(l)
    return 2 * l[0] * l[4] + 2 * l[1] * l[3] + l[2] ** 2


def omega_jet(x, y):
    return x[0] * y[2] - x[2] * y[0] + x[1] * y[3] - x[3] * y[1]


def mdot(u1, u2):
    """Matrix ``m_ij = omega(u_i, u_j')`` of jets."""
    d1, d2 = u1.derive(), u2.derive()
    n = d1.order
    a, b = u1.truncate(n), u2.truncate(n)
    return [[omega_jet(a, d1), omega_jet(a, d2)], [omega_jet(b, d1), omega_jet(b, d2)]]


def isotropy_residual(u1, u2):
    m = mdot(u1, u2)
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


# -- charts ----------------------------------------------------------------

def _check_section(value, l, name):
    scale = float(np.max(np.abs(l)))
    if abs(value) <= END_TOL * scale:
        raise OnHyperplaneSection(name, f"point lies on the hyperplane section {name}")


def affine_chart(P, c2=C2):
    l = plucker(P) if not np.ndim(P) == 1 else np.asarray(P, dtype=complex)
    _check_section(l[0], l, "A")
    return np.array([-l[3], c2 * l[2], l[1]]) / l[0]


def affine_chart_inverse(w, c2=C2):
    """L-coordinates (normalized with l1 = 1) of the chart point ``w``."""
    w1, w2, w3 = w
    l3 = w2 / c2
    # 2 l5 + 2 l2 l4 + l3^2 = 0 with l1 = 1
    l5 = -(2 * w3 * (-w1) + l3 * l3) / 2
    return np.array([1.0, w3, l3, -w1, l5], dtype=complex)


def affine_chart_jet(u1, u2, c2=C2):
    l = plucker_jet(u1, u2)
    return Jet.stack([-l[3] / l[0], c2 * l[2] / l[0], l[1] / l[0]])


def unimodular_chart(P):
    l = plucker(P) if not np.ndim(P) == 1 else np.asarray(P, dtype=complex)
    _check_section(l[2], l, "B")
    return (SQ2 / l[2]) * np.array([[l[0], -l[1]], [-l[3], -l[4]]])


def contact_matrix(xi):
    xi = np.asarray(xi, dtype=complex)
    return np.array([[xi[1], xi[0]], [xi[2], xi[3]]])


def contact_det(xi):
    return xi[1] * xi[3] - xi[0] * xi[2]


def contact_chart(xi):
    """Unimodular representative of the contact chart (sign is free)."""
    xi = np.asarray(xi, dtype=complex)
    d = contact_det(xi)
    if abs(d) <= END_TOL * float(np.max(np.abs(xi))) ** 2:
        raise OnQuadric("point lies on the quadric of the contact chart")
    return contact_matrix(xi) / np.sqrt(d)


def contact_residual(xi):
    """Pullback coefficient of the contact form along a jet; zero iff Legendre.

    The form is ``-omega(xi, dxi)``, the invariant contact form of the
    symplectic structure.
    """
    d = xi.derive()
    x = xi.truncate(d.order)
    return -omega_jet(x, d)


# -- projections -------------------------------------------------------------

def project_flat(w, target="R3", sigma=SIGMA):
    w1, w2, w3 = w
    if target == "R3":
        return np.array([((w1 + w3) / 2).real, ((w1 - w3) / 2).imag, (sigma * w2).real])
    if target == "R12":
        return np.array([(sigma * w2).real, ((w1 + w3) / 2).imag, ((w1 - w3) / 2).imag])
    raise ValueError(f"unknown flat target {target!r}")


def hermitian_coords(alpha):
    """Coefficients of a Hermitian 2x2 matrix on ``(I, s1, s2, s3)``."""
    return np.array([np.trace(P @ alpha).real / 2 for P in PAULI])


def project_hyperbolic(B, target="H3", tol=1e-8):
    B = np.asarray(B, dtype=complex)
    if abs(abs(np.linalg.det(B)) - 1) > tol:
        raise NotUnimodular(f"|det B| = {abs(np.linalg.det(B))}")
    if target == "H3":
        alpha = B @ B.conj().T
    elif target == "H12":
        alpha = B @ np.diag([1.0, -1.0]) @ B.conj().T
    else:
        raise ValueError(f"unknown hyperbolic target {target!r}")
    return hermitian_coords(alpha)


def ball_model(x):
    x = np.asarray(x, dtype=float)
    return x[1:] / (1 + x[0])


# -- twistor fibration ---------------------------------------------------------

_ERJ = np.array([Ek @ J for Ek in E])
_JE = np.array([J @ Ek for Ek in E])


def twistor_project(xi, sign_ref=None):
    """Point of the 4-sphere (unit vector of E-coordinates) over ``[xi]``.

    Solves ``X J xi xi^T = xi xi^T J X`` for real combinations ``X`` of the
    E-basis; the solution space is a line.
    """
    xi = np.asarray(xi, dtype=complex)
    nrm = np.linalg.norm(xi)
    if nrm == 0:
        raise DegenerateSolve("xi = 0")
    xi = xi / nrm
    P = np.outer(xi, xi)
    cols = [(_ERJ[k] @ P - P @ _JE[k]).reshape(16) for k in range(5)]
    M = np.array(cols).T
    Mr = np.vstack([M.real, M.imag])
    _, s, vh = np.linalg.svd(Mr)
    if s[3] < 1e-8 * s[0] or s[4] > 1e-8 * s[0]:
        raise DegenerateSolve(f"singular values {s}")
    t = vh[-1]
    t = t / np.linalg.norm(t)
    if sign_ref is not None:
        if np.dot(t, sign_ref) < 0:
            t = -t
    else:
        k = int(np.nonzero(np.abs(t) > 1e-12)[0][0])
        if t[k] < 0:
            t = -t
    return t


def random_compact_symplectic(rng, scale=1.0):
    """Element of Sp(2) = Sp(2, C) intersected with U(4)."""
    from scipy.linalg import expm

    P = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    P = scale * (P - P.conj().T) / 2
    Q = scale * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    Q = Q + Q.T
    X = np.block([[P, Q], [-Q.conj(), P.conj()]])
    return expm(X)


__all__ = [
    "C2", "SIGMA", "QPoint", "plucker", "plucker_jet", "isotropy_residual", "mdot",
    "affine_chart", "affine_chart_inverse", "unimodular_chart", "contact_chart",
    "contact_residual", "project_flat", "project_hyperbolic", "ball_model",
    "twistor_project", "null_residual", "gfrak", "lbasis_decompose", "GRAM", "L",
    "GROUP_TOL", "random_compact_symplectic", "contact_det", "contact_matrix",
    "hermitian_coords", "affine_chart_jet", "omega_jet",
]
