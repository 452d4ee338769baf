"""The seven tamed surfaces of an isotropic curve, sampled as meshes.

Each kind composes the curve with a chart and a projection:

    min_r3, max_r12    Pluecker map, affine chart, flat projection
    cmc1_h3, cmc1_h12  Pluecker map, unimodular chart, hyperbolic projection
    flat_h3, flat_h12  Legendre associate, contact chart, hyperbolic projection
    super_s4           Legendre associate, twistor projection

Geometric checks use central finite differences of the real map
``(x, y) -> F(x + iy)`` in the ambient metric of the target.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .curves import legendre_associate
from .errors import AtEnd, InputError, IsoqError, OnHyperplaneSection, OnQuadric, SingularJacobian
from .quadric import (
    affine_chart,
    ball_model,
    contact_chart,
    contact_det,
    plucker_jet,
    project_flat,
    project_hyperbolic,
    twistor_project,
    unimodular_chart,
)

OK, NEAR_END, SINGULAR = 0, 1, 2
NEAR_TOL = 1e-3
SING_TOL = 1e-6


@dataclass(frozen=True)
class Ambient:
    section: str       # "A", "B", "Q2" or "" (no ends)
    metric: tuple      # diagonal of the ambient inner product
    curvature: float   # sectional curvature of the target space form
    sphere: float      # <x, x> on the target (None for flat targets)


KINDS = {
    "min_r3": Ambient("A", (1.0, 1.0, 1.0), 0.0, None),
    "max_r12": Ambient("A", (1.0, -1.0, 1.0), 0.0, None),
    "cmc1_h3": Ambient("B", (-1.0, 1.0, 1.0, 1.0), -1.0, -1.0),
    "cmc1_h12": Ambient("B", (-1.0, 1.0, 1.0, 1.0), 1.0, 1.0),
    "flat_h3": Ambient("Q2", (-1.0, 1.0, 1.0, 1.0), -1.0, -1.0),
    "flat_h12": Ambient("Q2", (-1.0, 1.0, 1.0, 1.0), 1.0, 1.0),
    "super_s4": Ambient("", (1.0,) * 5, 1.0, 1.0),
}


def _ambient(kind):
    try:
        return KINDS[kind]
    except KeyError:
        raise InputError(f"unknown surface kind {kind!r}; expected one of {sorted(KINDS)}") from None


def _plucker_at(model, z):
    u1, u2 = model.pair(z, 0)
    return plucker_jet(u1, u2).value


def _xi_at(model, z):
    return legendre_associate(model, z, 0).value


def end_ratio(model, z, kind):
    """Normalized chart denominator at ``z``; ends are its zeros."""
    amb = _ambient(kind)
    if amb.section == "A":
        l = _plucker_at(model, z)
        return abs(l[0]) / np.linalg.norm(l)
    if amb.section == "B":
        l = _plucker_at(model, z)
        return abs(l[2]) / np.linalg.norm(l)
    if amb.section == "Q2":
        xi = _xi_at(model, z)
        return abs(contact_det(xi)) / np.linalg.norm(xi) ** 2
    return 1.0


def tamed_point(model, z, kind, sign_ref=None):
    """Point of the tamed surface of ``kind`` over the parameter ``z``."""
    amb = _ambient(kind)
    z = complex(z)
    try:
        if kind in ("min_r3", "max_r12"):
            return project_flat(affine_chart(_plucker_at(model, z)), "R3" if kind == "min_r3" else "R12")
        if kind in ("cmc1_h3", "cmc1_h12"):
            return project_hyperbolic(unimodular_chart(_plucker_at(model, z)), kind.rsplit("_", 1)[1].upper())
        xi = _xi_at(model, z)
        if kind == "super_s4":
            return twistor_project(xi, sign_ref)
        return project_hyperbolic(contact_chart(xi), kind.rsplit("_", 1)[1].upper())
    except (OnHyperplaneSection, OnQuadric):
        raise AtEnd(amb.section, f"z = {z} is an end of the {kind} surface") from None


# -- second-order geometry ---------------------------------------------------------

def _derivatives(model, z, kind, h):
    F0 = tamed_point(model, z, kind)
    ref = F0 if kind == "super_s4" else None

    def P(dx, dy):
        return tamed_point(model, z + complex(dx, dy) * h, kind, ref)

    Fx = (P(1, 0) - P(-1, 0)) / (2 * h)
    Fy = (P(0, 1) - P(0, -1)) / (2 * h)
    Fxx = (P(1, 0) - 2 * F0 + P(-1, 0)) / h ** 2
    Fyy = (P(0, 1) - 2 * F0 + P(0, -1)) / h ** 2
    Fxy = (P(1, 1) - P(1, -1) - P(-1, 1) + P(-1, -1)) / (4 * h ** 2)
    return F0, Fx, Fy, Fxx, Fxy, Fyy


def _normal_frame(vectors, eta):
    """Orthonormal basis (with signs) of the eta-orthogonal complement of ``vectors``."""
    M = np.array(vectors) * eta
    _, s, vh = np.linalg.svd(M)
    k = len(vectors)
    basis = []
    for v in vh[k:]:
        for b, sb in basis:
            v = v - sb * (v @ (eta * b)) * b
        n2 = v @ (eta * v)
        if abs(n2) < 1e-12:
            raise SingularJacobian("degenerate normal space")
        sgn = 1.0 if n2 > 0 else -1.0
        basis.append((v / math.sqrt(abs(n2)), sgn))
    return basis


def second_order_report(model, z, kind, h=None):
    """First and second fundamental forms of the tamed surface at ``z``.

    Returns a dict with the metric coefficients, ``conformal_residual``
    ``|E - G| + |F|``, the mean curvature ``H`` (normal oriented so that
    ``H >= 0`` in codimension one, the length of the mean curvature vector
    otherwise), the intrinsic curvature from the Gauss equation and the
    causal character of the tangent plane.
    """
    amb = _ambient(kind)
    z = complex(z)
    h = 1e-4 * max(1.0, abs(z)) if h is None else h
    F0, Fx, Fy, Fxx, Fxy, Fyy = _derivatives(model, z, kind, h)
    eta = np.array(amb.metric)

    def ip(a, b):
        return float(a @ (eta * b))

    E, Fm, G = ip(Fx, Fx), ip(Fx, Fy), ip(Fy, Fy)
    det = E * G - Fm * Fm
    if abs(det) <= SING_TOL ** 2 * max(abs(E), abs(G), 1e-300) ** 2:
        raise SingularJacobian(f"tamed map is singular at z = {z}")
    if det > 0 and E > 0:
        causal = "spacelike"
    elif det < 0:
        causal = "timelike"
    else:
        causal = "negative definite"
    tangent = [Fx, Fy] if amb.sphere is None else [F0, Fx, Fy]
    normals = _normal_frame(tangent, eta)
    Iinv = np.array([[G, -Fm], [-Fm, E]]) / det
    Hvec = np.zeros_like(F0)
    gauss = amb.curvature
    Hscalar = None
    for n, sgn in normals:
        L, M, N = ip(Fxx, n), ip(Fxy, n), ip(Fyy, n)
        tr = Iinv[0, 0] * L + 2 * Iinv[0, 1] * M + Iinv[1, 1] * N
        Hvec = Hvec + sgn * tr / 2 * n
        gauss += sgn * (L * N - M * M) / det
        if len(normals) == 1:
            Hscalar = abs(float(tr)) / 2
    if Hscalar is None:
        Hscalar = math.sqrt(abs(ip(Hvec, Hvec)))
    return {
        "E": E, "F": Fm, "G": G,
        "conformal_residual": abs(E - G) + abs(Fm),
        "mean_curvature": Hscalar,
        "gauss_curvature": gauss,
        "causal_character": causal,
        "point": F0,
    }


def harmonicity_residual(model, z, kind, h=None):
    """Five-point Laplacian of the tamed map relative to its second derivatives."""
    z = complex(z)
    h = 1e-3 * max(1.0, abs(z)) if h is None else h
    F0, _, _, Fxx, Fxy, Fyy = _derivatives(model, z, kind, h)
    lap = Fxx + Fyy
    scale = max(float(np.max(np.abs(Fxx))), float(np.max(np.abs(Fyy))), float(np.max(np.abs(Fxy))), 1e-300)
    return float(np.max(np.abs(lap))) / scale


def target_residual(point, kind):
    """Deviation of a point from the target space form (0 for flat targets)."""
    amb = _ambient(kind)
    if amb.sphere is None:
        return 0.0
    p = np.asarray(point)
    return abs(float(p @ (np.array(amb.metric) * p)) - amb.sphere)


# -- grids, ends and meshes --------------------------------------------------------

@dataclass
class Grid:
    """Polar (``r_in..r_out`` by angle) or cartesian (``width x height``) sample grid."""

    center: complex = 0j
    r_out: float = 1.0
    r_in: float = 0.0
    nu: int = 32
    nv: int = 32
    polar: bool = True
    width: float = 2.0
    height: float = 2.0

    def points(self):
        """``(nu, nv)`` array of parameters; rows run radially or along x."""
        if self.polar:
            r = np.linspace(self.r_in, self.r_out, self.nu)
            t = np.linspace(0, 2 * np.pi, self.nv, endpoint=False)
            return self.center + r[:, None] * np.exp(1j * t)[None, :]
        x = np.linspace(-self.width / 2, self.width / 2, self.nu)
        y = np.linspace(-self.height / 2, self.height / 2, self.nv)
        return self.center + x[:, None] + 1j * y[None, :]


@dataclass
class EndCluster:
    center: complex
    ratio: float
    members: list = field(default_factory=list)


def _safe_ratio(model, z, kind):
    try:
        return end_ratio(model, z, kind)
    except ArithmeticError:
        return 0.0


def _components(mask, wrap):
    """Connected components (4-neighbour, optionally periodic in the second index)."""
    nu, nv = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    comps = []
    for i in range(nu):
        for j in range(nv):
            if not mask[i, j] or seen[i, j]:
                continue
            stack, comp = [(i, j)], []
            seen[i, j] = True
            while stack:
                a, b = stack.pop()
                comp.append((a, b))
                for da, db in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    p, q = a + da, b + db
                    if wrap:
                        q %= nv
                    if 0 <= p < nu and 0 <= q < nv and mask[p, q] and not seen[p, q]:
                        seen[p, q] = True
                        stack.append((p, q))
            comps.append(comp)
    return comps


def detect_ends(model, grid, kind, near_tol=NEAR_TOL, end_tol=1e-6, ratios=None):
    """Clusters of grid points near ends, each refined to a located end.

    Grid points with normalized denominator below ``near_tol`` are grouped;
    each group's best point seeds a minimization of the denominator.  A
    group counts as an end when the minimum drops below ``end_tol`` (or the
    curve cannot be evaluated there).
    """
    zs = grid.points()
    if ratios is None:
        ratios = np.array([[_safe_ratio(model, z, kind) for z in row] for row in zs])
    comps = _components(ratios < near_tol, grid.polar)
    out = []
    for comp in comps:
        i, j = min(comp, key=lambda p: ratios[p])
        z0 = zs[i, j]

        def fun(x):
            return _safe_ratio(model, complex(x[0], x[1]), kind)

        step = 0.5 * max(abs(zs[min(i + 1, zs.shape[0] - 1), j] - z0), abs(zs[i, (j + 1) % zs.shape[1]] - z0))
        sol = minimize(fun, [z0.real, z0.imag], method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000,
                                "initial_simplex": [[z0.real, z0.imag], [z0.real + step, z0.imag],
                                                    [z0.real, z0.imag + step]]})
        c = complex(sol.x[0], sol.x[1])
        if sol.fun < end_tol:
            out.append(EndCluster(c, float(sol.fun), [complex(zs[p]) for p in comp]))
    return out


@dataclass
class SurfaceMesh:
    dim: int
    vertices: np.ndarray
    faces: np.ndarray
    flags: np.ndarray
    params: np.ndarray = None
    kind: str = ""

    def check(self):
        """Face indices in range and no face touching a flagged vertex."""
        f = self.faces
        if len(f) == 0:
            return True
        if f.min() < 0 or f.max() >= len(self.vertices):
            return False
        return bool(np.all(self.flags[f] == OK))


def view_coordinates(points, kind, view="raw"):
    """Raw target coordinates or a 3-dimensional picture of them."""
    P = np.asarray(points, dtype=float)
    if view == "raw" or P.shape[1] == 3:
        return P
    if kind in ("cmc1_h3", "flat_h3"):
        return np.array([ball_model(p) for p in P])
    if kind in ("cmc1_h12", "flat_h12"):
        return P[:, :3]
    if kind == "super_s4":
        stereo = P[:, :4] / (1 - P[:, 4:5])
        return stereo[:, :3]
    return P


def build_mesh(model, grid, kind, near_tol=NEAR_TOL, clamp=None, view="raw", sing_tol=SING_TOL):
    """Sample the tamed surface on ``grid``; points at ends are dropped.

    Vertex flags: 0 ok, 1 near an end (denominator below ``near_tol`` or
    outside the ball ``clamp`` for hyperbolic targets), 2 singular
    (tangent vectors nearly dependent).  Faces only join ok vertices.
    """
    _ambient(kind)
    zs = grid.points()
    nu, nv = zs.shape
    pts = np.full((nu, nv), None, dtype=object)
    flags = np.zeros((nu, nv), dtype=np.uint8)
    for i in range(nu):
        for j in range(nv):
            ref = None
            if kind == "super_s4":
                if j > 0 and pts[i, j - 1] is not None:
                    ref = pts[i, j - 1]
                elif i > 0 and pts[i - 1, j] is not None:
                    ref = pts[i - 1, j]
            try:
                pts[i, j] = tamed_point(model, zs[i, j], kind, ref)
            except (IsoqError, ArithmeticError):
                continue
            if _safe_ratio(model, zs[i, j], kind) < near_tol:
                flags[i, j] = NEAR_END
            elif clamp is not None and kind.endswith("h3") and np.linalg.norm(ball_model(pts[i, j])) > clamp:
                flags[i, j] = NEAR_END
    # singular vertices: grid tangents nearly dependent
    for i in range(nu):
        for j in range(nv):
            if pts[i, j] is None or flags[i, j]:
                continue
            a = _neighbour_diff(pts, i, j, 1, 0, grid.polar)
            b = _neighbour_diff(pts, i, j, 0, 1, grid.polar)
            if a is None or b is None:
                continue
            na, nb = np.linalg.norm(a), np.linalg.norm(b)
            if na == 0 or nb == 0:
                flags[i, j] = SINGULAR
                continue
            g = np.array([[a @ a, a @ b], [a @ b, b @ b]])
            if abs(np.linalg.det(g)) < (sing_tol * na * nb) ** 2:
                flags[i, j] = SINGULAR
    index = -np.ones((nu, nv), dtype=int)
    verts, vflags, params = [], [], []
    for i in range(nu):
        for j in range(nv):
            if pts[i, j] is not None:
                index[i, j] = len(verts)
                verts.append(pts[i, j])
                vflags.append(flags[i, j])
                params.append(zs[i, j])
    faces = []
    jmax = nv if grid.polar else nv - 1
    for i in range(nu - 1):
        for j in range(jmax):
            q = [(i, j), (i + 1, j), (i + 1, (j + 1) % nv), (i, (j + 1) % nv)]
            ids = [index[p] for p in q]
            if min(ids) < 0 or any(flags[p] != OK for p in q):
                continue
            faces.append((ids[0], ids[1], ids[2]))
            faces.append((ids[0], ids[2], ids[3]))
    V = view_coordinates(np.array(verts, dtype=float).reshape(len(verts), -1), kind, view)
    dim = V.shape[1] if len(verts) else 3
    return SurfaceMesh(dim, V, np.array(faces, dtype=int).reshape(-1, 3),
                       np.array(vflags, dtype=np.uint8), np.array(params), kind)


def _neighbour_diff(pts, i, j, di, dj, wrap):
    nu, nv = pts.shape
    p, q = i + di, j + dj
    if wrap:
        q %= nv
    if not (0 <= p < nu and 0 <= q < nv) or pts[p, q] is None:
        p, q = i - di, j - dj
        if wrap:
            q %= nv
        if not (0 <= p < nu and 0 <= q < nv) or pts[p, q] is None:
            return None
    return np.asarray(pts[p, q], dtype=float) - np.asarray(pts[i, j], dtype=float)


__all__ = [
    "KINDS", "OK", "NEAR_END", "SINGULAR", "Grid", "EndCluster", "SurfaceMesh",
    "tamed_point", "end_ratio", "second_order_report", "harmonicity_residual",
    "target_residual", "detect_ends", "build_mesh", "view_coordinates",
]
