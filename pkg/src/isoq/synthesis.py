"""Integration of holomorphic Maurer-Cartan equations ``A' = A N`` and
construction of isotropic curves with prescribed invariants.

The curve with quartic differential ``D dz^4`` and quadratic differential
``G dz^2`` is the first plane ``[A1 ^ A2]`` of the solution of ``A' = A N``
with

    N = [[0,   3E/4, r,    0 ],
         [r,   0,    0,    E ],
         [0,   0,    0,   -r ],
         [0,   r,   -3E/4, 0 ]],      r = D**(1/4),  E = G / r.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .curves import CurveJet, CurveModel
from .errors import DVanishes, NotSymplectic, SingularityOnPath, StepUnderflow
from .expr import parse_expr
from .jets import Jet, jet_pow
from .symplin import GROUP_TOL, symplectic_residual

TAYLOR_ORDER = 10
STEP_TOL = 1e-11


def normal_coefficient(r, E):
    """Matrix jet ``N`` built from the jets ``r`` and ``E``."""
    z = 0 * r
    q = 0.75 * E
    return Jet.stack([
        Jet.stack([z, q, r, z]),
        Jet.stack([r, z, z, E]),
        Jet.stack([z, z, z, -r]),
        Jet.stack([z, r, -q, z]),
    ])


def taylor_frame(A0, N):
    """Jet of the solution of ``A' = A N`` with ``A(base) = A0``.

    ``N`` is a matrix jet of order p; the result has order p + 1.
    """
    Nc = N.coeffs
    p = Nc.shape[0] - 1
    out = np.zeros((p + 2, 4, 4), dtype=complex)
    out[0] = A0
    for j in range(p + 1):
        acc = np.zeros((4, 4), dtype=complex)
        for i in range(j + 1):
            acc += out[i] @ Nc[j - i]
        out[j + 1] = acc / (j + 1)
    return Jet(out, N.base)


@dataclass
class MCSystem:
    """``coeff(z, order, state) -> (N, state)`` plus base frame and polyline path.

    ``state`` carries branch choices forward along the path.
    """

    coeff: object
    A0: np.ndarray
    path: list
    state: object = None


@dataclass
class MCResult:
    points: list = field(default_factory=list)  # (z, A, state) at path vertices
    steps: int = 0

    @property
    def endpoint(self):
        return self.points[-1][1]


def _step_size(coeffs, tol, hmax):
    """Largest power-of-two fraction of ``hmax`` with last-term error below tol."""
    scale = max(1.0, float(np.max(np.abs(coeffs[0]))))
    last = float(np.max(np.abs(coeffs[-1])))
    h = hmax
    while last * h ** (len(coeffs) - 1) > tol * scale:
        h /= 2
    return h


def mc_integrate(system, order=TAYLOR_ORDER, tol=STEP_TOL, min_step=1e-10):
    """Taylor integration of ``A' = A N`` along the polyline ``system.path``."""
    path = [complex(z) for z in system.path]
    A = np.asarray(system.A0, dtype=complex)
    if symplectic_residual(A) > GROUP_TOL * max(1.0, float(np.max(np.abs(A)))) ** 2:
        raise NotSymplectic("base frame is not symplectic")
    state = system.state
    res = MCResult([(path[0], A.copy(), state)])
    z = path[0]
    for target in path[1:]:
        while abs(target - z) > 0:
            try:
                N, state_here = system.coeff(z, order - 1, state)
            except DVanishes:
                raise
            except ArithmeticError as exc:
                raise SingularityOnPath(f"coefficients singular near z = {z}: {exc}") from None
            Aj = taylor_frame(A, N)
            dist = abs(target - z)
            u = (target - z) / dist
            h = _step_size(Aj.coeffs, tol, dist)
            if h < min_step * max(1.0, abs(z)):
                raise StepUnderflow(f"step size underflow at z = {z}")
            z = target if h >= dist else z + h * u
            A = Aj(z)
            state = state_here
            res.steps += 1
        res.points.append((z, A.copy(), state))
    return res


# -- synthesized curves -------------------------------------------------------------

def _nearest_root(value, ref, k):
    """Among ``value * exp(2 pi i j / k)`` pick the one closest to ``ref``."""
    if ref is None:
        return 1.0
    best, fac = None, 1.0
    for j in range(k):
        f = cmath.exp(2j * math.pi * j / k)
        d = abs(value * f - ref)
        if best is None or d < best:
            best, fac = d, f
    return fac


class Synthesized(CurveModel):
    """Curve obtained by integrating the normal-form equation from ``base``.

    ``coeff(z, order, state)`` returns jets ``(r, E)`` and a new state;
    frames at visited points are cached so repeated evaluation is cheap.
    """

    kind = "synthesized"

    def __init__(self, coeff, base=0.0, A0=None, descriptor=None, data=None):
        self._coeff = coeff
        self.base = complex(base)
        self.A0 = np.eye(4, dtype=complex) if A0 is None else np.asarray(A0, dtype=complex)
        self._descriptor = descriptor
        self.data = data or {}
        self._cache = {}

    def coefficients(self, z, order, state=None):
        r, E, state = self._coeff(complex(z), order, state)
        return r, E, state

    def coefficients_at(self, z0, order):
        """Coefficient jets at ``z0`` on the branch reached from the base point."""
        _, _, state = self.frame_at(z0)
        return self._coeff(complex(z0), order, state)

    def _system_coeff(self, z, order, state):
        r, E, state = self._coeff(z, order, state)
        return normal_coefficient(r, E), state

    def frame_at(self, z0):
        """Frame value and branch state at ``z0`` (integrating from the nearest cached point)."""
        z0 = complex(z0)
        key = (round(z0.real, 14), round(z0.imag, 14))
        if key in self._cache:
            return self._cache[key]
        start = (self.base, self.A0, None)
        if self._cache:
            best = min(self._cache.values(), key=lambda v: abs(v[0] - z0))
            if abs(best[0] - z0) < abs(self.base - z0):
                start = best
        sys = MCSystem(self._system_coeff, start[1], [start[0], z0], start[2])
        out = mc_integrate(sys)
        z, A, state = out.points[-1]
        _, _, state = self._coeff(z0, 0, state)
        self._cache[key] = (z0, A, state)
        return z0, A, state

    def frame_jet(self, z0, order):
        _, A, state = self.frame_at(z0)
        r, E, _ = self._coeff(complex(z0), order - 1, state)
        return taylor_frame(A, normal_coefficient(r, E))

    def evaluate(self, z0, order, ref=None):
        A = self.frame_jet(z0, order)
        u1, u2 = A[:, 0], A[:, 1]
        return CurveJet(u1, u2, u1)

    def descriptor(self):
        if self._descriptor is None:
            raise NotImplementedError("this synthesized curve has no descriptor")
        d = dict(self._descriptor)
        if not np.allclose(self.A0, np.eye(4)):
            d["A0"] = [[[float(x.real), float(x.imag)] for x in row] for row in self.A0]
        return d


def _root4_coeff(D, G):
    """Coefficient function continuing ``D**(1/4)`` by nearest root."""

    def coeff(z, order, state):
        ref_root, ref_D, ref_G = state if state else (None, None, None)
        Dj, bD = D.jet(z, order, ref_D)
        if abs(Dj.value) == 0:
            raise DVanishes(f"D vanishes at z = {z}")
        Gj, bG = G.jet(z, order, ref_G)
        r = jet_pow(Dj, 0.25)
        r = r * _nearest_root(r.value, ref_root, 4)
        return r, Gj / r, (r.value, bD, bG)

    return coeff


def synthesize(D, G, base=0.0, A0=None):
    """Isotropic curve with quartic coefficient ``D`` and quadratic coefficient ``G``."""
    D, G = parse_expr(D), parse_expr(G)
    base = complex(base)
    try:
        d0 = D(base)
    except ArithmeticError as exc:
        raise DVanishes(f"D is not defined at the base point: {exc}") from None
    if abs(d0) == 0:
        raise DVanishes(f"D vanishes at the base point {base}")
    desc = {"type": "synthesized", "D": str(D), "G": str(G), "base": [base.real, base.imag]}
    return Synthesized(_root4_coeff(D, G), base, A0, desc, {"D": D, "G": G})


def synthesize_root4(r, E, base=0.0, A0=None, data=None, descriptor=None):
    """Curve from jet functions ``r(z, order)`` and ``E(z, order)`` directly."""

    def coeff(z, order, state):
        return r(z, order), E(z, order), state

    return Synthesized(coeff, base, A0, descriptor, data)


def equivalent(modelA, modelB, samples, tol=1e-6):
    """True iff quartic and quadratic coefficients agree (relatively) at all samples."""
    from .frames import quadratic_ddelta, quartic_delta

    for z in samples:
        da = quartic_delta(modelA, z, 0).value
        db = quartic_delta(modelB, z, 0).value
        if abs(da - db) > tol * max(abs(da), abs(db), 1e-300):
            return False
        ga = quadratic_ddelta(modelA, z, 0).value
        gb = quadratic_ddelta(modelB, z, 0).value
        if abs(ga - gb) > tol * max(abs(ga), abs(gb), abs(da) ** 0.5, 1e-300):
            return False
    return True


__all__ = [
    "MCSystem", "MCResult", "mc_integrate", "taylor_frame", "normal_coefficient",
    "Synthesized", "synthesize", "synthesize_root4", "equivalent",
]
