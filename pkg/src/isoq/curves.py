"""Isotropic curve families and their jet evaluators.

Every model evaluates, at a point ``z0``, to a pair of vector jets
``(u1, u2)`` spanning the Lagrangian plane ``f(z)``.  Models built from a
Legendre curve also expose the lift ``xi`` directly.
"""

import math
import warnings
from fractions import Fraction
from math import gcd

import numpy as np

from .errors import (
    BothDiagonalEntriesVanish,
    ExceptionalKappa,
    InputError,
    NotLegendre,
    NotSymplectic,
    SchemaError,
    ZeroJet,
)
from .expr import Expr, parse_expr
from .jets import Jet, jet_exp, jet_strip
from .quadric import contact_residual, mdot, omega_jet
from .symplin import GROUP_TOL, symplectic_residual

E4 = np.eye(4, dtype=complex)


def _vec(comps, z):
    """Stack four scalar jets / constants into a vector jet."""
    return Jet.stack([c if isinstance(c, Jet) else z * 0 + c for c in comps])


class CurveJet:
    __slots__ = ("u1", "u2", "xi", "branch")

    def __init__(self, u1, u2, xi=None, branch=None):
        self.u1, self.u2, self.xi, self.branch = u1, u2, xi, branch or {}


class CurveModel:
    """Base class; subclasses implement :meth:`evaluate`."""

    kind = "abstract"
    is_cycle = False

    def evaluate(self, z0, order, ref=None):
        raise NotImplementedError

    def pair(self, z0, order, ref=None):
        c = self.evaluate(z0, order, ref)
        return c.u1, c.u2

    def descriptor(self):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.descriptor()})"


# -- explicit families ----------------------------------------------------------

class WCurve(CurveModel):
    """W-curve with parameter q = m/n, stored canonically with m > n > 0.

    ``param="uniform"`` (default) uses the exponents ``(2m, m+n, 2n)`` for
    every q; this is the parametrization in which the closed forms
    ``delta_q = -(9m^4-82m^2n^2+9n^4)/(100 z^4)`` and
    ``gamma_q = 2(m^2+n^2)/(5 z^2)`` hold.  ``param="verbatim"`` halves the
    exponents when m+n is even, giving the injective curve; it is the
    uniform curve composed with ``sqrt(z)``.
    """

    kind = "wcurve"

    def __init__(self, m, n, param="uniform"):
        m, n = int(m), int(n)
        if n == 0 or m == 0:
            raise InputError("W-curve needs m, n nonzero")
        g = gcd(m, n)
        m, n = abs(m // g), abs(n // g)
        if m == n:
            raise InputError("W-curve needs q != +-1")
        if m < n:
            m, n = n, m
        self.m, self.n = m, n
        if param not in ("uniform", "verbatim"):
            raise InputError(f"unknown W-curve parametrization {param!r}")
        self.param = param
        self.is_cycle = (m, n) == (3, 1)

    @classmethod
    def from_q(cls, q, param="uniform"):
        f = Fraction(q).limit_denominator(10 ** 6)
        return canonical_wcurve(f.numerator, f.denominator, param)

    @property
    def q(self):
        return Fraction(self.m, self.n)

    @property
    def factor(self):
        if self.param == "uniform":
            return 2
        return 1 + (self.m + self.n) % 2

    def exponents(self):
        f = self.factor
        return f * self.m, f * (self.m + self.n) // 2, f * self.n

    def evaluate(self, z0, order, ref=None):
        m, n = self.m, self.n
        a, b, c = self.exponents()
        z = Jet.variable(z0, order)
        s = 2j * math.sqrt(m * n)
        za, zb, zc = z ** a, z ** b, z ** c
        u1 = _vec([m - n, 0, -(m + n) * za, -s * zb], z)
        u2 = _vec([0, m - n, -s * zb, (m + n) * zc], z)
        return CurveJet(u1, u2)

    def closed_form_legendre(self, z0, order):
        """Legendre associate from the closed form, same parametrization."""
        m, n = self.m, self.n
        a, b, c = self.exponents()
        d = self.factor * (m - n) // 2
        z = Jet.variable(z0, order)
        sn, sm = math.sqrt(n), math.sqrt(m)
        return _vec([1j * sn, -sm * z ** d, 1j * sn * z ** a, -sm * z ** b], z)

    def delta_formula(self, z):
        m, n = self.m, self.n
        return -(9 * m ** 4 - 82 * m * m * n * n + 9 * n ** 4) / (100 * z ** 4)

    def gamma_formula(self, z):
        m, n = self.m, self.n
        return 2 * (m * m + n * n) / (5 * z ** 2)

    def kappa_formula(self):
        q = self.m / self.n
        return -16 * (1 + q * q) ** 2 / (9 * q ** 4 - 82 * q * q + 9)

    def descriptor(self):
        d = {"type": "wcurve", "m": self.m, "n": self.n}
        if self.param != "uniform":
            d["param"] = self.param
        return d


def canonical_wcurve(m, n, param="uniform"):
    """WCurve for q = m/n, warning when the canonical q > 1 differs."""
    m, n = int(m), int(n)
    w = WCurve(m, n, param)
    g = gcd(m, n) or 1
    if (m // g, n // g) != (w.m, w.n):
        warnings.warn(f"W-curve q = {m}/{n} replaced by the equivalent q = {w.m}/{w.n}",
                      stacklevel=2)
    if w.is_cycle:
        warnings.warn("W-curve with q = 3 is a conformal cycle", stacklevel=2)
    return w


class StandardCycle(CurveModel):
    kind = "cycle"
    is_cycle = True

    def evaluate(self, z0, order, ref=None):
        z = Jet.variable(z0, order)
        u1 = _vec([1, 0, z ** 3 / 3, -(z ** 2) / 2], z)
        u2 = _vec([0, 1, -(z ** 2) / 2, z], z)
        return CurveJet(u1, u2)

    def descriptor(self):
        return {"type": "cycle"}


def bending_lambdas(kappa):
    kappa = complex(kappa)
    for bad in (1.0, -16.0 / 9.0):
        if abs(kappa - bad) < 1e-12:
            raise ExceptionalKappa(f"bending {kappa} is of exceptional type")
    c = np.sqrt(kappa)
    w = np.sqrt(c * c - 1)
    l1 = 0.5 * np.sqrt(5 * c - 4 * w)
    l2 = 0.5 * np.sqrt(5 * c + 4 * w)
    return complex(l1), complex(l2)


class ConstantBending(CurveModel):
    kind = "constant_bending"

    def __init__(self, kappa):
        self.kappa = complex(kappa)
        self.l1, self.l2 = bending_lambdas(self.kappa)

    def evaluate(self, z0, order, ref=None):
        l1, l2 = self.l1, self.l2
        z = Jet.variable(z0, order)
        A = (l1 + l2) / (l1 - l2)
        B = 2j * np.sqrt(l1) * np.sqrt(l2) / (l1 - l2)
        e12 = jet_exp((l1 + l2) * z)
        u1 = _vec([1, 0, -A * jet_exp(2 * l1 * z), -B * e12], z)
        u2 = _vec([0, 1, -B * e12, A * jet_exp(2 * l2 * z)], z)
        return CurveJet(u1, u2)

    def descriptor(self):
        return {"type": "constant_bending", "kappa": [self.kappa.real, self.kappa.imag]}


class Exceptional1(CurveModel):
    """Embedded curve of constant bending one."""

    kind = "exceptional1"

    def evaluate(self, z0, order, ref=None):
        z = Jet.variable(z0, order)
        u1 = _vec([1, 0, jet_exp(z), z], z)
        u2 = _vec([0, 1, z, -jet_exp(-z)], z)
        return CurveJet(u1, u2)

    def descriptor(self):
        return {"type": "exceptional1"}


# -- expression-defined curves ------------------------------------------------

def _jets_of(exprs, z0, order, ref):
    out, branch = [], {}
    for k, e in enumerate(exprs):
        sub = ref.get(k) if ref else None
        j, b = e.jet(z0, order, sub)
        out.append(j)
        branch[k] = b
    return out, branch


class Bryant(CurveModel):
    """Isotropic curve whose Legendre associate is ``(2g', 2gg', 2hg'-gh', h')``."""

    kind = "bryant"

    def __init__(self, g, h):
        self.g = parse_expr(g)
        self.h = parse_expr(h)

    def legendre_jet(self, z0, order, ref=None):
        (g, h), branch = _jets_of([self.g, self.h], z0, order + 1, ref)
        dg, dh = g.derive(), h.derive()
        g, h = g.truncate(order), h.truncate(order)
        xi = Jet.stack([2 * dg, 2 * g * dg, 2 * h * dg - g * dh, dh])
        return xi, branch

    def evaluate(self, z0, order, ref=None):
        xi, branch = self.legendre_jet(z0, order + 1, ref)
        return CurveJet(xi.truncate(order), xi.derive(), xi.truncate(order), branch)

    def descriptor(self):
        return {"type": "bryant", "g": str(self.g), "h": str(self.h)}


class LegendreCurve(CurveModel):
    """Isotropic curve ``[xi ^ xi']`` from a Legendre curve ``xi``."""

    kind = "legendre"

    def __init__(self, xi):
        if len(xi) != 4:
            raise InputError("Legendre curve needs four components")
        self.xi = [parse_expr(e) for e in xi]

    def legendre_jet(self, z0, order, ref=None):
        comps, branch = _jets_of(self.xi, z0, order, ref)
        return Jet.stack(comps), branch

    def evaluate(self, z0, order, ref=None):
        xi, branch = self.legendre_jet(z0, order + 1, ref)
        return CurveJet(xi.truncate(order), xi.derive(), xi.truncate(order), branch)

    def descriptor(self):
        return {"type": "legendre", "xi": [str(e) for e in self.xi]}


class LagrangianPair(CurveModel):
    kind = "pair"

    def __init__(self, u1, u2):
        if len(u1) != 4 or len(u2) != 4:
            raise InputError("each spanning vector needs four components")
        self.u1 = [parse_expr(e) for e in u1]
        self.u2 = [parse_expr(e) for e in u2]

    def evaluate(self, z0, order, ref=None):
        c, branch = _jets_of(self.u1 + self.u2, z0, order, ref)
        return CurveJet(Jet.stack(c[:4]), Jet.stack(c[4:]), None, branch)

    def descriptor(self):
        return {"type": "pair", "u1": [str(e) for e in self.u1],
                "u2": [str(e) for e in self.u2]}


class Goursat(CurveModel):
    """The curve ``X . inner`` for a constant symplectic ``X``."""

    kind = "goursat"

    def __init__(self, inner, X, tol=GROUP_TOL):
        X = np.asarray(X, dtype=complex)
        if X.shape != (4, 4):
            raise InputError("Goursat matrix must be 4x4")
        res = symplectic_residual(X)
        if res > tol * max(1.0, float(np.max(np.abs(X))) ** 2):
            raise NotSymplectic(f"Goursat matrix has symplectic residual {res:.3g}")
        self.inner = inner
        self.X = X
        self.is_cycle = inner.is_cycle

    def evaluate(self, z0, order, ref=None):
        c = self.inner.evaluate(z0, order, ref)
        xi = None if c.xi is None else self.X @ c.xi
        return CurveJet(self.X @ c.u1, self.X @ c.u2, xi, c.branch)

    def descriptor(self):
        X = [[[float(x.real), float(x.imag)] for x in row] for row in self.X]
        return {"type": "goursat", "X": X, "inner": self.inner.descriptor()}


class Reparametrized(CurveModel):
    """The curve ``inner(h(z))`` for an expression ``h``."""

    kind = "reparametrized"

    def __init__(self, inner, h):
        self.inner = inner
        self.h = parse_expr(h)
        self.is_cycle = inner.is_cycle

    def evaluate(self, z0, order, ref=None):
        hj, _ = self.h.jet(z0, order)
        c = self.inner.evaluate(hj.value, order, ref)
        xi = None if c.xi is None else c.xi.compose(hj)
        return CurveJet(c.u1.compose(hj), c.u2.compose(hj), xi, c.branch)

    def descriptor(self):
        return {"type": "reparametrized", "h": str(self.h), "inner": self.inner.descriptor()}


def kuy_example(n):
    """Bryant potentials of the flat fronts with n ends."""
    n = int(n)
    if n < 3:
        raise InputError("n must be at least 3")
    p = Fraction(2 - n, n)
    e = f"({p.numerator}/{p.denominator})"
    g = f"z^(-1)*(z^{n}-1)^{e}"
    h = f"z^(-2)*(1+z^{n})*(z^{n}-1)^{e}"
    model = Bryant(g, h)
    model.kuy_n = n
    return model


def eval_curve(model, z0, order):
    return model.pair(z0, order)


# -- Legendre associate ----------------------------------------------------------

def _stripped_mdot(u1, u2):
    m = mdot(u1, u2)
    M = Jet.stack([Jet.stack([m[0][0], m[0][1]]), Jet.stack([m[1][0], m[1][1]])])
    k1, unit = jet_strip(M)
    return k1, unit


def legendre_from_pair(u1, u2):
    """Legendre lift from spanning jets; returns ``(xi, k1)``."""
    try:
        k1, m = _stripped_mdot(u1, u2)
    except ZeroJet:
        raise NotLegendre("curve is degenerate: omega(u_i, u_j') vanishes") from None
    n = m.order
    a, b = u1.truncate(n), u2.truncate(n)
    m0 = np.abs(m.value)
    scale = float(m0.max())
    if m0[1, 1] > 1e-8 * scale:
        xi = -m[1, 1] * a + m[0, 1] * b
    elif m0[0, 0] > 1e-8 * scale:
        xi = -m[0, 0] * b + m[1, 0] * a
    else:
        raise BothDiagonalEntriesVanish("both diagonal entries vanish after stripping")
    return xi, k1


def legendre_associate(model, z0, order):
    c = model.evaluate(z0, order)
    if c.xi is not None:
        return c.xi
    xi, k1 = legendre_from_pair(*model.pair(z0, order + 1))
    return xi.truncate(min(order, xi.order))


def ramification_indices(model, z0, order=12):
    """``(k1, k2)``: vanishing orders of the isotropy matrix and of ``xi ^ xi'``."""
    u1, u2 = model.pair(z0, order)
    try:
        k1, _ = _stripped_mdot(u1, u2)
        xi, _ = legendre_from_pair(u1, u2)
        _, xi = jet_strip(xi)
    except ZeroJet:
        raise NotLegendre("curve is degenerate: omega(u_i, u_j') vanishes") from None
    d = xi.derive()
    x = xi.truncate(d.order)
    wedge = Jet.stack([x[i] * d[j] - x[j] * d[i] for i in range(4) for j in range(i + 1, 4)])
    try:
        k2, _ = jet_strip(wedge)
    except ZeroJet:
        raise NotLegendre("Legendre associate is constant") from None
    return k1, k2


def curve_from_legendre(xi, check_at=(0.3 + 0.2j, -0.4 + 0.1j), tol=1e-9):
    """Isotropic curve ``[xi ^ xi']`` from a Legendre curve (exprs or a model)."""
    model = xi if isinstance(xi, CurveModel) else LegendreCurve(xi)
    for z0 in check_at:
        try:
            x, _ = model.legendre_jet(z0, 6)
        except InputError:
            raise
        except ArithmeticError:
            continue
        res = contact_residual(x)
        scale = max(float(np.max(np.abs(x.coeffs))) ** 2, 1e-300)
        if res.max_abs() > tol * scale:
            raise NotLegendre(f"contact residual {res.max_abs():.3g} at z = {z0}")
        M = np.array([x.taylor(0), x.taylor(1), x.taylor(2)])
        sv = np.linalg.svd(M, compute_uv=False)
        if sv[2] < 1e-10 * sv[0]:
            raise NotLegendre("curve lies in a contact line")
    return model


# -- descriptors ---------------------------------------------------------------

def _complex(v, ptr):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    if isinstance(v, str):
        try:
            return complex(v.replace("i", "j").replace(" ", ""))
        except ValueError:
            pass
    raise SchemaError("expected a complex number as [re, im]", ptr)


def _matrix4(X, ptr):
    if not isinstance(X, list) or len(X) != 4:
        raise SchemaError("expected a 4x4 matrix", ptr)
    rows = []
    for i, row in enumerate(X):
        if not isinstance(row, list) or len(row) != 4:
            raise SchemaError("expected a row of 4 entries", f"{ptr}/{i}")
        rows.append([_complex(v, f"{ptr}/{i}/{j}") for j, v in enumerate(row)])
    return np.array(rows)


def _exprs(v, ptr, count):
    if not isinstance(v, list) or len(v) != count:
        raise SchemaError(f"expected a list of {count} expressions", ptr)
    out = []
    for k, e in enumerate(v):
        if not isinstance(e, (str, int, float)):
            raise SchemaError("expected an expression string", f"{ptr}/{k}")
        out.append(_expr(e, f"{ptr}/{k}"))
    return out


def _expr(e, ptr):
    try:
        return parse_expr(e)
    except InputError as exc:
        raise SchemaError(str(exc), ptr) from None


def model_from_descriptor(d, ptr=""):
    """Build a CurveModel from a JSON-style dict; errors carry a JSON pointer."""
    if isinstance(d, str):
        if d in ("cycle", "exceptional1"):
            d = {"type": d}
        else:
            raise SchemaError("descriptor must be an object", ptr)
    if not isinstance(d, dict):
        raise SchemaError("descriptor must be an object", ptr)
    t = d.get("type")
    if not isinstance(t, str):
        raise SchemaError("missing or invalid 'type'", f"{ptr}/type")

    def need(key):
        if key not in d:
            raise SchemaError(f"missing '{key}'", f"{ptr}/{key}")
        return d[key]

    if t == "wcurve":
        m, n = need("m"), need("n")
        for key, v in (("m", m), ("n", n)):
            if not isinstance(v, int) or isinstance(v, bool):
                raise SchemaError("expected an integer", f"{ptr}/{key}")
        try:
            return canonical_wcurve(m, n, d.get("param", "uniform"))
        except InputError as exc:
            raise SchemaError(str(exc), ptr) from None
    if t == "cycle":
        return StandardCycle()
    if t == "exceptional1":
        return Exceptional1()
    if t == "constant_bending":
        k = _complex(need("kappa"), f"{ptr}/kappa")
        try:
            return ConstantBending(k)
        except InputError as exc:
            raise SchemaError(str(exc), f"{ptr}/kappa") from None
    if t == "bryant":
        return Bryant(_expr(need("g"), f"{ptr}/g"), _expr(need("h"), f"{ptr}/h"))
    if t == "kuy":
        n = need("n")
        if not isinstance(n, int) or n < 3:
            raise SchemaError("expected an integer >= 3", f"{ptr}/n")
        return kuy_example(n)
    if t == "legendre":
        return LegendreCurve(_exprs(need("xi"), f"{ptr}/xi", 4))
    if t == "pair":
        return LagrangianPair(_exprs(need("u1"), f"{ptr}/u1", 4),
                              _exprs(need("u2"), f"{ptr}/u2", 4))
    if t == "goursat":
        X = _matrix4(need("X"), f"{ptr}/X")
        inner = model_from_descriptor(need("inner"), f"{ptr}/inner")
        try:
            return Goursat(inner, X)
        except InputError as exc:
            raise SchemaError(str(exc), f"{ptr}/X") from None
    if t == "reparametrized":
        inner = model_from_descriptor(need("inner"), f"{ptr}/inner")
        return Reparametrized(inner, _expr(need("h"), f"{ptr}/h"))
    if t == "synthesized":
        from .synthesis import synthesize

        base = _complex(d.get("base", 0), f"{ptr}/base")
        A0 = _matrix4(d["A0"], f"{ptr}/A0") if "A0" in d else None
        try:
            return synthesize(_expr(need("D"), f"{ptr}/D"), _expr(need("G"), f"{ptr}/G"), base, A0)
        except ArithmeticError as exc:
            raise SchemaError(str(exc), f"{ptr}/D") from None
    if t == "deformed":
        from .deformation import deform4

        base = model_from_descriptor(need("base"), f"{ptr}/base")
        try:
            return deform4(base, _expr(need("a_hat"), f"{ptr}/a_hat"))
        except (InputError, ArithmeticError) as exc:
            raise SchemaError(str(exc), f"{ptr}/base") from None
    raise SchemaError(f"unknown curve type {t!r}", f"{ptr}/type")


__all__ = [
    "CurveModel", "CurveJet", "WCurve", "StandardCycle", "ConstantBending", "Exceptional1",
    "Bryant", "LegendreCurve", "LagrangianPair", "Goursat", "kuy_example", "eval_curve",
    "legendre_associate", "legendre_from_pair", "ramification_indices",
    "curve_from_legendre", "model_from_descriptor", "canonical_wcurve", "Expr",
    "omega_jet", "Reparametrized", "bending_lambdas",
]
