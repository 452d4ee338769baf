"""Adapted symplectic frames along an isotropic curve and the invariants
read off from them: the quartic differential, the projective connection,
the quadratic differential, bending, heptactic points, osculating cycles
and contact order.

Frames are 4x4 matrix jets ``A`` whose first column is the Legendre lift.
Their Maurer-Cartan coefficient ``alpha = A^-1 A'`` (w.r.t. ``dz``) is
brought into the normal form

    alpha[2,0] = alpha[3,0] = alpha[0,3] = 0
    alpha[1,0] = alpha[3,1]          (= r, nonzero)
    alpha[0,0] = 3 alpha[1,1]
    4 alpha[0,1] = 3 alpha[1,3]

by an explicit construction: with ``A1 = xi`` and ``r**3 = omega(xi', xi'')``
each remaining column is determined by differentiation, and the
construction lands in the gauge ``alpha[1,1] = 0``.  The residual gauge
freedom is the image of upper triangular SL(2) under the symmetric cube.
"""

import cmath
import math
import os
from dataclasses import dataclass

import numpy as np

from .curves import (
    Goursat,
    StandardCycle,
    bending_lambdas,
    legendre_from_pair,
)
from .errors import (
    AssociateBranchPoint,
    BranchPoint,
    CriticalPoint,
    CycleCurve,
    GaugeSolveFailed,
    HeptacticPoint,
    NotLegendre,
    SingularFrame,
    ZeroDenominator,
    ZeroJet,
)
from .expr import parse_expr
from .jets import Jet, jet_pow, jet_strip
from .quadric import omega_jet, plucker_jet
from .symplin import CUBE_WEIGHTS, J, embed_sl2, sym_cube_entries

FRAME_TOL = 1e-9
HEPTACTIC_TOL = 1e-10
CONTACT_TOL = 1e-7
CONTACT_CAP = 8
# extra jet orders consumed by the reduction (six derivatives plus slack)
MARGIN = 8

ETA21 = -(6.0 ** (-1.0 / 3.0))
ETA12 = -((3.0 / 32.0) ** (1.0 / 3.0))
Z8_CONST = 6.0 ** 0.75


def default_order():
    """Jet order used when none is given; ``ISOQ_JET_ORDER`` overrides."""
    v = os.environ.get("ISOQ_JET_ORDER")
    if v:
        try:
            k = int(v)
        except ValueError:
            k = 0
        if k > 0:
            return k
    return 6


@dataclass
class DifferentialSample:
    degree: int
    base: complex
    coeff: Jet

    def __post_init__(self):
        if self.degree not in (2, 4):
            raise ValueError("degree must be 2 or 4")

    @property
    def value(self):
        return self.coeff.value


@dataclass
class Connection:
    """Projective connection coefficients ``eta11, eta21, eta12`` in the z-chart."""

    eta11: Jet
    eta21: Jet
    eta12: Jet
    frame: "FrameJet" = None


class FrameJet:
    """Matrix jet ``A`` with its Maurer-Cartan coefficient ``alpha``."""

    def __init__(self, A, alpha=None, xi=None):
        self.A = A
        self.alpha = maurer_cartan(A) if alpha is None else alpha
        self.xi = xi

    @property
    def base(self):
        return self.A.base

    @property
    def order(self):
        return self.alpha.order

    def value(self):
        return self.A.value

    def pe4_residuals(self):
        return pe4_residuals(self.alpha)

    def delta(self):
        a = self.alpha
        return a[0, 2] * a[3, 1] ** 3


def _sp_inverse_jet(A):
    return Jet(np.stack([-J @ c.T @ J for c in A.coeffs]), A.base)


def maurer_cartan(A, tol=FRAME_TOL, order=None):
    """``A^-1 A'`` for a symplectic matrix jet, optionally truncated to ``order``."""
    if isinstance(A, FrameJet):
        A = A.A
    A0 = A.value
    scale = max(1.0, float(np.max(np.abs(A0))) ** 2)
    res = float(np.max(np.abs(A0.T @ J @ A0 - J)))
    if res > tol * scale:
        raise SingularFrame(f"frame is not symplectic at its base (residual {res:.3g})")
    d = A.derive()
    alpha = _sp_inverse_jet(A.truncate(d.order)) @ d
    if order is not None:
        alpha = alpha.truncate(min(order, alpha.order))
    a0 = alpha.coeffs
    skew = np.abs(np.swapaxes(a0, -1, -2) @ J + J @ a0).max()
    if skew > 1e-6 * max(1.0, float(np.abs(a0).max())):
        raise SingularFrame(f"Maurer-Cartan form leaves sp(2) (residual {skew:.3g})")
    return alpha


def pe4_residuals(alpha):
    a = alpha
    return [a[2, 0], a[3, 0], a[1, 0] - a[3, 1], a[0, 0] - 3 * a[1, 1],
            4 * a[0, 1] - 3 * a[1, 3], a[0, 3]]


def pe4_max_residual(alpha):
    return max(float(np.max(np.abs(r.coeffs))) for r in pe4_residuals(alpha))


# -- reduction ------------------------------------------------------------------

def _lift(model, z0, n, rescale):
    c = model.evaluate(z0, n + 1)
    try:
        xi, k1 = legendre_from_pair(c.u1, c.u2)
    except (ZeroJet, NotLegendre) as exc:
        raise BranchPoint(f"isotropy matrix vanishes identically: {exc}") from None
    if k1 > 0:
        raise BranchPoint(f"f is ramified at z = {z0} (index {k1})")
    if c.xi is not None:
        xi = c.xi.truncate(n)
    try:
        v, xi = jet_strip(xi)
    except ZeroJet:
        raise AssociateBranchPoint("Legendre lift vanishes") from None
    xi = xi.truncate(n - v) if v else xi
    # projective normalization keeps the differentiation chain well conditioned
    k = int(np.argmax(np.abs(xi.value)))
    xi = xi / xi[k]
    if rescale is not None:
        phi, _ = parse_expr(rescale).jet(z0, xi.order)
        xi = phi * xi
    x0, x1 = xi.value, xi.derive().value
    w = np.outer(x0, x1) - np.outer(x1, x0)
    if np.max(np.abs(w)) <= 1e-10 * max(float(np.max(np.abs(x0))), 1e-300) * max(
            float(np.max(np.abs(x1))), float(np.max(np.abs(x0)))):
        raise AssociateBranchPoint(f"Legendre associate is ramified at z = {z0}")
    return xi


def reduce_frame(model, z0, order=None, rescale=None, root=0):
    """Frame jet at ``z0`` satisfying the normal form, to jet order ``order``.

    ``rescale`` (an expression) multiplies the Legendre lift and ``root``
    picks the cube root of ``omega(xi', xi'')``; both only move the frame
    inside its residual gauge group.
    """
    order = default_order() if order is None else order
    n = order + MARGIN
    xi = _lift(model, z0, n, rescale)
    d1 = xi.derive()
    d2 = d1.derive()
    r3 = omega_jet(d1.truncate(d2.order), d2)
    scale = float(np.max(np.abs(d1.value))) ** 2 + 1e-300
    if abs(r3.value) <= 1e-12 * scale:
        raise BranchPoint(f"omega(xi', xi'') vanishes at z = {z0}")
    r = jet_pow(r3, 1.0 / 3.0) * cmath.exp(2j * math.pi * root / 3)
    A1 = xi.truncate(r.order)
    A2 = d1.truncate(r.order) / r
    dA2 = A2.derive()
    s = -0.3 * omega_jet(dA2.truncate(dA2.order - 1), dA2.derive()) / (r * r)
    A4 = (dA2 - s * A1) / r
    A3 = ((4.0 / 3.0) * s * A2 - A4.derive()) / r
    A = Jet.stack([A1, A2, A3, A4], axis=1)
    alpha = maurer_cartan(A, order=order)
    A = A.truncate(order)
    res = pe4_max_residual(alpha)
    if res > FRAME_TOL * max(1.0, float(np.max(np.abs(alpha.coeffs)))):
        raise GaugeSolveFailed(f"normal-form residual {res:.3g}")
    return FrameJet(A, alpha, xi.truncate(order))


# -- quartic differential ---------------------------------------------------------

def quartic_delta(model, z0, order=2):
    frame = reduce_frame(model, z0, order)
    return DifferentialSample(4, complex(z0), frame.delta())


def _h1_jet(lam, mu):
    ent = sym_cube_entries(lam, mu, 0 * lam, 1 / lam)
    return Jet.stack([Jet.stack(row) for row in ent])


def z8_reduce(frame, tol=HEPTACTIC_TOL):
    """Gauge the frame so that ``delta = 6^(3/4) eta21^4`` and ``eta11 = 0``.

    The eighth root is pinned by ``arg(lambda(z0))`` in ``[0, pi/4)``, where
    ``lambda`` is the diagonal entry of the gauge change.
    """
    a = frame.alpha
    r, t, p = a[3, 1], a[0, 2], a[1, 1]
    delta = t * r ** 3
    if abs(delta.value) <= tol:
        raise HeptacticPoint(f"delta vanishes at z = {frame.base}")
    # eta21 = ETA21 lambda^2 r, so delta = 6^(3/4) eta21^4 fixes lambda^8
    lam = jet_pow(delta / (Z8_CONST * ETA21 ** 4 * r ** 4), 0.125)
    k = math.floor((cmath.phase(lam.value) % (2 * math.pi)) / (math.pi / 4))
    lam = lam * cmath.exp(-1j * math.pi * k / 4)
    dlam = lam.derive()
    n = dlam.order
    lam_, p_, r_ = lam.truncate(n), p.truncate(n), r.truncate(n)
    mu = -math.sqrt(6.0) * (lam_ * p_ + dlam) / (lam_ * lam_ * r_)
    S = _h1_jet(lam_, mu)
    A = frame.A.truncate(n).matmul(S)
    alpha = maurer_cartan(A)
    new = FrameJet(A.truncate(alpha.order), alpha, frame.xi)
    conn = Connection(alpha[1, 1], ETA21 * alpha[3, 1], ETA12 * alpha[1, 3], new)
    return new, conn


def quadratic_ddelta(model, z0, order=2):
    frame = reduce_frame(model, z0, order + 2)
    _, conn = z8_reduce(frame)
    return DifferentialSample(2, complex(z0), 4 * conn.eta21 * conn.eta12)


# -- projective structure in a chart ------------------------------------------------

def d_naive(Z):
    """Chart operator ``Z''/(2Z) - (9/16)(Z'/Z)**2`` on a quartic coefficient."""
    if abs(Z.value) == 0:
        raise ZeroDenominator("quartic coefficient vanishes at the base")
    d1 = Z.derive()
    d2 = d1.derive()
    n = d2.order
    z, z1 = Z.truncate(n), d1.truncate(n)
    return 0.5 * d2 / z - (9.0 / 16.0) * (z1 / z) ** 2


def projective_correction(e11, e21, e12):
    """Correction term turning the chart operator into the invariant one."""
    if abs(e21.value) == 0:
        raise ZeroDenominator("eta21 vanishes at the base")
    d1 = e21.derive()
    d2 = d1.derive()
    n = d2.order
    de11 = e11.derive().truncate(n)
    e11, e21t, e12 = e11.truncate(n), e21.truncate(n), e12.truncate(n)
    g = d1.truncate(n) / e21t
    return (-2 * d2 / e21t + g * (3 * g - 4 * e11)
            + 4 * (de11 + e11 * e11 + e12 * e21t))


def ddelta_chart_path(model, z0, order=2):
    """Quadratic differential via the chart operator plus the correction term.

    Uses the unnormalized frame, so it is independent of the eighth-root
    reduction in :func:`z8_reduce`.
    """
    frame = reduce_frame(model, z0, order + 2)
    a = frame.alpha
    naive = d_naive(frame.delta())
    corr = projective_correction(a[1, 1], ETA21 * a[3, 1], ETA12 * a[1, 3])
    return DifferentialSample(2, complex(z0), naive.truncate(corr.order) + corr)


def schwarzian(h):
    if abs(h.derive().value) == 0:
        raise CriticalPoint("h' vanishes at the base")
    d1 = h.derive()
    d2 = d1.derive()
    q = d2 / d1.truncate(d2.order)
    dq = q.derive()
    return dq - 0.5 * q.truncate(dq.order) ** 2


def d_transform_check(Z, h):
    """Residual of the chart-change law for the chart operator.

    ``Z`` is a quartic coefficient in the chart ``w`` (based at ``h(z0)``),
    ``h`` the chart change ``w = h(z)`` based at ``z0``.
    """
    dh = h.derive()
    n = dh.order
    W = Z.compose(h).truncate(n) * dh ** 4
    lhs = d_naive(W)
    m = lhs.order
    rhs = d_naive(Z).compose(h).truncate(m) * dh.truncate(m) ** 2 + 2 * schwarzian(h).truncate(m)
    diff = lhs - rhs
    scale = max(1.0, float(np.max(np.abs(lhs.coeffs))))
    return float(np.max(np.abs(diff.coeffs))) / scale


# -- bending and friends --------------------------------------------------------------

def bending(model, z0, tol=HEPTACTIC_TOL):
    """``ddelta**2 / delta`` at ``z0``."""
    if model.is_cycle:
        raise CycleCurve("curve is a conformal cycle")
    frame = reduce_frame(model, z0, 6)
    delta = frame.delta()
    if float(np.max(np.abs(delta.coeffs))) <= tol:
        raise CycleCurve("quartic differential vanishes identically near the point")
    _, conn = z8_reduce(frame, tol)
    g = 4 * conn.eta21.value * conn.eta12.value
    return complex(g * g / delta.value)


def r_map(kappa):
    """Canonical representative ``q`` of the W-curve class with bending ``kappa``.

    The class is ``{q, -q, 1/q, -1/q}``; a real class is represented by its
    element > 1, a complex one by the element with ``|q| >= 1`` and
    nonnegative real part.
    """
    bending_lambdas(kappa)  # rejects the exceptional values
    c = np.sqrt(complex(kappa))
    reps = []
    for cc in (c, -c):
        for w in (np.sqrt(cc * cc - 1), -np.sqrt(cc * cc - 1)):
            den = 5 * cc + 4 * w
            if den == 0:
                continue
            reps.append(_canonical_q(np.sqrt((5 * cc - 4 * w) / den)))
    q = reps[0]
    for other in reps[1:]:
        if abs(other - q) > 1e-8 * max(1.0, abs(q)):
            raise ArithmeticError(f"square-root choices disagree: {q} vs {other}")
    if abs(q.imag) <= 1e-12 * abs(q):
        return float(q.real)
    return q


def _canonical_q(q):
    q = complex(q)
    if q == 0:
        return q
    if abs(q) < 1:
        q = 1 / q
    if q.real < 0 or (q.real == 0 and q.imag < 0):
        q = -q
    if abs(abs(q) - 1) < 1e-12:
        # on the unit circle 1/q = conj(q); pick nonnegative imaginary part
        if q.imag < 0:
            q = q.conjugate()
    return q


def _delta_and_slope(model, z):
    frame = reduce_frame(model, z, 1)
    d = frame.delta()
    return d.value, d.coeffs[1]


def heptactic_points(model, region=(0.0, 0.5, 2.0), grid=12, tol=HEPTACTIC_TOL,
                     max_iter=30, conv=1e-12):
    """Zeros of the quartic differential inside an annulus ``(center, r_in, r_out)``.

    The annulus is sampled on a ``grid x 2*grid`` polar grid; local minima
    of ``|delta|`` seed Newton's method.
    """
    if model.is_cycle:
        raise CycleCurve("every point of a cycle is heptactic")
    center, r_in, r_out = complex(region[0]), float(region[1]), float(region[2])
    nr, na = grid, 2 * grid
    radii = np.linspace(r_in, r_out, nr + 2)[1:-1] if r_in == 0 else np.linspace(r_in, r_out, nr)
    angles = np.linspace(0, 2 * math.pi, na, endpoint=False)
    vals = np.full((nr, na), np.inf)
    for i, rad in enumerate(radii):
        for j, th in enumerate(angles):
            try:
                vals[i, j] = abs(_delta_and_slope(model, center + rad * cmath.exp(1j * th))[0])
            except ArithmeticError:
                pass
    seeds = []
    for i in range(nr):
        for j in range(na):
            v = vals[i, j]
            if not np.isfinite(v):
                continue
            nb = [vals[i, (j + 1) % na], vals[i, (j - 1) % na]]
            if i > 0:
                nb.append(vals[i - 1, j])
            if i < nr - 1:
                nb.append(vals[i + 1, j])
            if all(v <= x for x in nb):
                seeds.append(center + radii[i] * cmath.exp(1j * angles[j]))
    roots = []
    for z in seeds:
        try:
            for _ in range(max_iter):
                d, dd = _delta_and_slope(model, z)
                if dd == 0:
                    break
                step = d / dd
                z = z - step
                if abs(step) < conv * max(1.0, abs(z)):
                    break
            d, _ = _delta_and_slope(model, z)
        except ArithmeticError:
            continue
        rad = abs(z - center)
        if abs(d) < tol and r_in - 1e-9 <= rad <= r_out + 1e-9:
            if all(abs(z - w) > 1e-8 * max(1.0, abs(z)) for w in roots):
                roots.append(complex(z))
    return roots


# -- osculating cycle and contact ---------------------------------------------------

def osculating_cycle(model, z0):
    """Matrix ``X`` such that ``X . StandardCycle`` osculates the curve at ``z0``.

    The cycle passes through ``f(z0)`` at parameter 0.
    """
    frame = reduce_frame(model, z0, 2)
    return frame.A.value


def osculating_cycle_model(model, z0):
    return Goursat(StandardCycle(), osculating_cycle(model, z0))


def _plucker_lift(model, z0, order):
    u1, u2 = model.pair(z0, order)
    return plucker_jet(u1, u2)


def contact_order(modelA, modelB, z0, maxk=CONTACT_CAP, z0_b=None, reparametrize=True,
                  tol=CONTACT_TOL):
    """Largest ``k <= maxk`` with ``lB(h(z)) = rho(z) lA(z)`` to order ``k``.

    ``lA``, ``lB`` are Pluecker lifts; ``rho`` is a scalar function and
    ``h`` a local reparametrization with ``h(z0) = z0_b`` (the identity
    shift when ``reparametrize`` is false).  Returns -1 when the curves do
    not even meet.
    """
    z0 = complex(z0)
    z0_b = z0 if z0_b is None else complex(z0_b)
    lA = _plucker_lift(modelA, z0, maxk)
    lB = _plucker_lift(modelB, z0_b, maxk)
    return jet_contact_order(lA, lB, maxk, reparametrize, tol)


def jet_contact_order(lA, lB, maxk=CONTACT_CAP, reparametrize=True, tol=CONTACT_TOL):
    """Contact order of two vector jets up to scaling (and reparametrization of ``lB``)."""
    a, b = lA.coeffs, lB.coeffs
    z0, z0_b = lA.base, lB.base
    dim = a.shape[1]
    # order 0
    rho = [complex(np.vdot(a[0], b[0]) / np.vdot(a[0], a[0]))]
    if np.linalg.norm(b[0] - rho[0] * a[0]) > tol * np.linalg.norm(b[0]):
        return -1
    h = [z0_b, 1.0 + 0j]
    dB = b[1]
    for j in range(1, maxk + 1):
        # coefficient j of lB(h(z)) with h_j set to zero
        hj = np.array(h[: j + 1] + [0j] * (maxk + 1 - len(h[: j + 1])), dtype=complex)
        if reparametrize:
            hj[j] = 0.0
        inner = Jet(hj, z0)
        known = lB.compose(inner).coeffs[j]
        conv = sum(rho[i] * a[j - i] for i in range(j))
        rhs = conv - known
        # solve dB h_j - a0 rho_j = rhs (h_j only when reparametrizing)
        if reparametrize:
            M = np.column_stack([dB, -a[0]])
            sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
            hnew, rnew = sol
        else:
            M = -a[0].reshape(dim, 1)
            sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
            hnew, rnew = None, sol[0]
        res = M @ sol - rhs
        # floor at the size of the point so rounding noise in vanishing
        # high-order coefficients is not read as a mismatch
        scale = max(np.linalg.norm(known), np.linalg.norm(conv), np.linalg.norm(a[0]) * abs(rnew),
                    np.linalg.norm(a[0]), np.linalg.norm(b[0]))
        if np.linalg.norm(res) > tol * scale:
            return j - 1
        rho.append(complex(rnew))
        if reparametrize:
            if j < len(h):
                h[j] = complex(hnew)
            else:
                h.append(complex(hnew))
    return maxk


# -- residual gauge group ---------------------------------------------------------------

def sl2_from_embedded(Q, tol=1e-8):
    """Recover ``x`` in SL(2) with ``embed_sl2(x) = Q``.

    ``x[0,0]`` is a cube root of ``Q[0,0]``; the other entries then follow
    linearly, and the cube root with the smallest reconstruction error wins.
    """
    Q = np.asarray(Q, dtype=complex)
    w = CUBE_WEIGHTS
    best, err = None, np.inf
    a0 = complex(Q[0, 0]) ** (1 / 3)
    for k in range(3):
        a = a0 * cmath.exp(2j * math.pi * k / 3)
        if a == 0:
            continue
        c = Q[1, 0] * w[0] / (3 * a * a * w[1])
        b = Q[0, 1] * w[1] / (w[0] * a * a)
        d = (1 + b * c) / a
        x = np.array([[a, b], [c, d]])
        e = float(np.max(np.abs(embed_sl2(x, tol=1e-3) - Q)))
        if e < err:
            best, err = x, e
    if best is None or err > tol * max(1.0, float(np.max(np.abs(Q)))):
        raise ArithmeticError("matrix is not in the image of the symmetric cube")
    return best


__all__ = [
    "FrameJet", "DifferentialSample", "Connection", "maurer_cartan", "reduce_frame",
    "pe4_residuals", "quartic_delta", "z8_reduce", "quadratic_ddelta", "d_naive",
    "schwarzian", "d_transform_check", "bending", "r_map", "heptactic_points",
    "osculating_cycle", "osculating_cycle_model", "contact_order", "jet_contact_order", "sl2_from_embedded",
    "ddelta_chart_path", "projective_correction", "default_order",
]
