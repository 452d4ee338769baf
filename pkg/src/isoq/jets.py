"""Truncated complex power series ("jets") at a base point.

A :class:`Jet` stores the Taylor coefficients of a holomorphic quantity
about ``base`` up to a finite ``order``::

    a(z) = c[0] + c[1] (z - base) + ... + c[order] (z - base)**order + O(...)

Coefficients beyond ``order`` are unknown, not zero, so every operation
returns a jet whose order is the smallest order that is still exact.

Jets may be array valued: ``coeffs`` has shape ``(order + 1, *shape)``.
Arithmetic is elementwise with numpy broadcasting; :meth:`Jet.matmul`
gives the Cauchy product of matrix-valued series.  All derivatives used
elsewhere in the package are read off these coefficients.
"""

from __future__ import annotations

import cmath
import math
import numbers

import numpy as np

from .errors import (
    BaseMismatch,
    BranchPointAtBase,
    DivisionByIdenticallyZero,
    LaurentResult,
    OrderExhausted,
    ZeroJet,
)

DEFAULT_ORDER = 10
STRIP_TOL = 1e-13


def _same_base(a, b):
    return a == b or abs(a - b) <= 1e-14 * max(1.0, abs(a), abs(b))


class Jet:
    """Truncated Taylor series with complex (possibly array) coefficients."""

    __array_priority__ = 1000
    __slots__ = ("base", "coeffs")

    def __init__(self, coeffs, base=0.0):
        c = np.array(coeffs, dtype=complex)
        if c.ndim == 0:
            c = c.reshape(1)
        if not np.all(np.isfinite(c)):
            raise ValueError("jet coefficients must be finite")
        self.coeffs = c
        self.base = complex(base)

    # -- construction -------------------------------------------------
    @classmethod
    def constant(cls, value, order=DEFAULT_ORDER, base=0.0):
        value = np.asarray(value, dtype=complex)
        c = np.zeros((order + 1,) + value.shape, dtype=complex)
        c[0] = value
        return cls(c, base)

    @classmethod
    def variable(cls, base=0.0, order=DEFAULT_ORDER):
        """The identity function ``z`` expanded about ``base``."""
        c = np.zeros(order + 1, dtype=complex)
        c[0] = base
        if order >= 1:
            c[1] = 1.0
        return cls(c, base)

    @classmethod
    def stack(cls, items, axis=0):
        """Stack jets (or constants) sharing a base into one array-valued jet."""
        jets = [x for x in items if isinstance(x, Jet)]
        if not jets:
            raise ValueError("stack needs at least one Jet")
        base = jets[0].base
        order = min(j.order for j in jets)
        for j in jets:
            if not _same_base(j.base, base):
                raise BaseMismatch(f"bases {j.base} and {base} differ")
        parts = []
        for x in items:
            if isinstance(x, Jet):
                parts.append(x.coeffs[: order + 1])
            else:
                parts.append(Jet.constant(x, order, base).coeffs)
        ax = axis + 1 if axis >= 0 else axis
        return cls(np.stack(parts, axis=ax), base)

    # -- basic properties --------------------------------------------
    @property
    def order(self):
        return self.coeffs.shape[0] - 1

    @property
    def shape(self):
        return self.coeffs.shape[1:]

    @property
    def value(self):
        """Value at the base point (constant coefficient)."""
        c = self.coeffs[0]
        return complex(c) if c.ndim == 0 else c.copy()

    def __len__(self):
        if not self.shape:
            raise TypeError("scalar jet has no len()")
        return self.shape[0]

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.coeffs[(slice(None),) + idx], self.base)

    @property
    def T(self):
        return Jet(np.swapaxes(self.coeffs, -1, -2), self.base)

    def truncate(self, order):
        if order > self.order:
            raise OrderExhausted(f"cannot raise order {self.order} to {order}")
        return Jet(self.coeffs[: order + 1], self.base)

    def copy(self):
        return Jet(self.coeffs.copy(), self.base)

    def __call__(self, z):
        """Evaluate the truncated polynomial at ``z``."""
        h = complex(z) - self.base
        acc = np.zeros(self.shape, dtype=complex)
        for c in self.coeffs[::-1]:
            acc = acc * h + c
        return complex(acc) if acc.ndim == 0 else acc

    def taylor(self, k):
        """k-th derivative at the base point."""
        if k > self.order:
            raise OrderExhausted(f"derivative {k} exceeds order {self.order}")
        c = self.coeffs[k] * math.factorial(k)
        return complex(c) if c.ndim == 0 else c

    def max_abs(self):
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def __repr__(self):
        return f"Jet(order={self.order}, base={self.base}, shape={self.shape})"

    # -- coercion ------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            if not _same_base(self.base, other.base):
                raise BaseMismatch(f"bases {self.base} and {other.base} differ")
            n = min(self.order, other.order)
            return _align(self.coeffs[: n + 1], other.coeffs[: n + 1])
        if isinstance(other, (numbers.Number, np.ndarray, np.number)):
            o = np.asarray(other, dtype=complex)
            c = np.zeros((self.order + 1,) + o.shape, dtype=complex)
            c[0] = o
            return _align(self.coeffs, c)
        return NotImplemented

    # -- arithmetic ---------------------------------------------------
    def __neg__(self):
        return Jet(-self.coeffs, self.base)

    def __pos__(self):
        return self

    def __add__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return r
        return Jet(r[0] + r[1], self.base)

    __radd__ = __add__

    def __sub__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return r
        return Jet(r[0] - r[1], self.base)

    def __rsub__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return r
        return Jet(r[1] - r[0], self.base)

    def __mul__(self, other):
        if isinstance(other, (numbers.Number, np.number)):
            return Jet(self.coeffs * complex(other), self.base)
        r = self._coerce(other)
        if r is NotImplemented:
            return r
        return Jet(_cauchy(r[0], r[1]), self.base)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (numbers.Number, np.number)):
            if other == 0:
                raise DivisionByIdenticallyZero("division by zero constant")
            return Jet(self.coeffs / complex(other), self.base)
        r = self._coerce(other)
        if r is NotImplemented:
            return r
        return Jet(_divide(r[0], r[1]), self.base)

    def __rtruediv__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return r
        return Jet(_divide(r[1], r[0]), self.base)

    def __pow__(self, p):
        return jet_pow(self, p)

    def matmul(self, other):
        """Cauchy product with matrix multiplication of coefficients."""
        if isinstance(other, Jet):
            a, b = self._coerce(other)
        else:
            other = np.asarray(other, dtype=complex)
            return Jet(np.stack([c @ other for c in self.coeffs]), self.base)
        return Jet(_cauchy_matmul(a, b), self.base)

    def __matmul__(self, other):
        return self.matmul(other)

    def __rmatmul__(self, other):
        other = np.asarray(other, dtype=complex)
        return Jet(np.stack([other @ c for c in self.coeffs]), self.base)

    def div(self, other, strip=False):
        """Divide; with ``strip`` a common zero at the base is cancelled first."""
        if not strip or not isinstance(other, Jet):
            return self / other
        out, _ = jet_div_report(self, other)
        return out

    def derive(self, k=1):
        return jet_derive(self, k)

    def compose(self, inner):
        return jet_compose(self, inner)

    def exp(self):
        return jet_exp(self)

    def log(self):
        return jet_log(self)

    def sqrt(self):
        return jet_pow(self, 0.5)


def _align(a, b):
    # numpy broadcasting on the value shape, keeping the order axis first
    da, db = a.ndim, b.ndim
    if da < db:
        a = a.reshape(a.shape[:1] + (1,) * (db - da) + a.shape[1:])
    elif db < da:
        b = b.reshape(b.shape[:1] + (1,) * (da - db) + b.shape[1:])
    return a, b


def _cauchy(a, b):
    n = a.shape[0]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
    for i in range(n):
        out[i:] += a[i] * b[: n - i]
    return out


def _cauchy_matmul(a, b):
    n = a.shape[0]
    out = np.zeros((n,) + np.shape(a[0] @ b[0]), dtype=complex)
    for k in range(n):
        acc = out[k]
        for i in range(k + 1):
            acc = acc + a[i] @ b[k - i]
        out[k] = acc
    return out


def _divide(a, b):
    b0 = b[0]
    if np.any(b0 == 0):
        raise DivisionByIdenticallyZero(
            "denominator vanishes at the base point; use jet_div_report to strip")
    n = a.shape[0]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
    for k in range(n):
        acc = a[k] - sum((b[i] * out[k - i] for i in range(1, k + 1)), np.zeros(()))
        out[k] = acc / b0
    return out


def _as_jet(x, like=None):
    if isinstance(x, Jet):
        return x
    if like is None:
        raise TypeError("expected a Jet")
    return Jet.constant(x, like.order, like.base)


def jet_arith(a, b, op):
    """Binary arithmetic by name: ``add``, ``sub``, ``mul`` or ``div``."""
    if isinstance(a, Jet) and isinstance(b, Jet) and not _same_base(a.base, b.base):
        raise BaseMismatch(f"bases {a.base} and {b.base} differ")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return jet_div_report(_as_jet(a, b if isinstance(b, Jet) else None), b)[0]
    raise ValueError(f"unknown op {op!r}")


def jet_div_report(a, b):
    """Long division with valuation stripping; returns ``(quotient, v)``.

    ``v`` is the number of factors ``(z - base)`` cancelled from both
    operands.  The quotient's order drops by ``v``.
    """
    if not isinstance(b, Jet):
        return a / b, 0
    if not isinstance(a, Jet):
        a = Jet.constant(a, b.order, b.base)
    if not _same_base(a.base, b.base):
        raise BaseMismatch(f"bases {a.base} and {b.base} differ")
    try:
        vb, _ = jet_strip(b)
    except ZeroJet:
        raise DivisionByIdenticallyZero("denominator vanishes to its order") from None
    if vb == 0:
        return a / b, 0
    n = min(a.order, b.order)
    head = a.coeffs[:vb]
    scale = max(a.max_abs(), 1e-300)
    if np.any(np.abs(head) > STRIP_TOL * scale):
        raise LaurentResult(f"numerator valuation below denominator valuation {vb}")
    num = Jet(a.coeffs[vb: n + 1], a.base)
    den = Jet(b.coeffs[vb: n + 1], b.base)
    return num / den, vb


def jet_derive(a, k=1):
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > a.order:
        raise OrderExhausted(f"derivative {k} exceeds order {a.order}")
    if k == 0:
        return a
    n = a.order - k
    j = np.arange(n + 1)
    fac = np.ones(n + 1)
    for m in range(1, k + 1):
        fac = fac * (j + m)
    fac = fac.reshape((n + 1,) + (1,) * len(a.shape))
    return Jet(a.coeffs[k:] * fac, a.base)


def jet_strip(a, tol=STRIP_TOL):
    """Split ``a = (z - base)**v * unit`` with ``unit(base) != 0``.

    Coefficients below ``tol`` times the largest coefficient magnitude count
    as zero.  For array-valued jets ``v`` is the common valuation.
    """
    mags = np.abs(a.coeffs).reshape(a.order + 1, -1).max(axis=1)
    top = mags.max() if mags.size else 0.0
    if top == 0.0:
        raise ZeroJet("jet vanishes to its order")
    nz = np.nonzero(mags > tol * top)[0]
    v = int(nz[0])
    coeffs = a.coeffs[v:].copy()
    coeffs[np.abs(coeffs) <= tol * top] = 0.0
    return v, Jet(coeffs, a.base)


# -- elementary functions --------------------------------------------------

def jet_exp(a):
    c = a.coeffs
    n = c.shape[0]
    out = np.zeros_like(c)
    out[0] = np.exp(c[0])
    for k in range(1, n):
        acc = np.zeros(c.shape[1:], dtype=complex)
        for j in range(1, k + 1):
            acc = acc + j * c[j] * out[k - j]
        out[k] = acc / k
    return Jet(out, a.base)


def jet_log(a):
    c = a.coeffs
    if np.any(c[0] == 0):
        raise BranchPointAtBase("log of a jet vanishing at its base")
    n = c.shape[0]
    out = np.zeros_like(c)
    out[0] = np.log(c[0])
    # a * l' = a'  ->  k c0 l_k = k c_k - sum_{j=1}^{k-1} j l_j c_{k-j}
    for k in range(1, n):
        acc = k * c[k]
        for j in range(1, k):
            acc = acc - j * out[j] * c[k - j]
        out[k] = acc / (k * c[0])
    return Jet(out, a.base)


def _is_integer(p):
    if isinstance(p, numbers.Integral):
        return True
    try:
        return complex(p).imag == 0 and float(complex(p).real).is_integer()
    except TypeError:
        return False


def jet_pow(a, p):
    """Principal-branch power ``a**p``; integer ``p`` allows a zero at the base."""
    if _is_integer(p):
        k = int(complex(p).real)
        if k >= 0:
            out = Jet.constant(np.ones(a.shape), a.order, a.base)
            sq = a
            while k:
                if k & 1:
                    out = out * sq
                k >>= 1
                if k:
                    sq = sq * sq
            return out
        return 1.0 / jet_pow(a, -k)
    c = a.coeffs
    if np.any(c[0] == 0):
        raise BranchPointAtBase(f"power {p} of a jet vanishing at its base")
    p = complex(p)
    n = c.shape[0]
    out = np.zeros_like(c)
    out[0] = np.exp(p * np.log(c[0]))
    for k in range(1, n):
        acc = np.zeros(c.shape[1:], dtype=complex)
        for j in range(1, k + 1):
            acc = acc + (p * j - (k - j)) * c[j] * out[k - j]
        out[k] = acc / (k * c[0])
    return Jet(out, a.base)


def jet_sqrt(a):
    return jet_pow(a, 0.5)


def jet_elementary(a, fn, exponent=None):
    """Apply ``exp``, ``log``, ``sqrt`` or ``pow`` (with ``exponent``)."""
    if fn == "exp":
        return jet_exp(a)
    if fn == "log":
        return jet_log(a)
    if fn == "sqrt":
        return jet_pow(a, 0.5)
    if fn == "pow":
        if exponent is None:
            raise ValueError("pow needs an exponent")
        return jet_pow(a, exponent)
    raise ValueError(f"unknown function {fn!r}")


def jet_compose(outer, inner):
    """Taylor coefficients of ``outer(inner(z))``.

    ``inner``'s constant term must equal ``outer.base``; the result is based
    at ``inner.base``.
    """
    if not _same_base(complex(inner.coeffs[0]), outer.base):
        raise BaseMismatch(
            f"inner value {complex(inner.coeffs[0])} differs from outer base {outer.base}")
    n = min(outer.order, inner.order)
    shifted = inner.coeffs[: n + 1].copy()
    shifted[0] = 0.0
    h = Jet(shifted, inner.base)
    oc = outer.coeffs[: n + 1]
    acc = Jet.constant(oc[n], n, inner.base)
    for k in range(n - 1, -1, -1):
        acc = acc * h + oc[k]
    return acc


def elementary_series(fn, at, order=DEFAULT_ORDER):
    """Jet of ``exp``/``log``/``sqrt`` expanded about the point ``at``."""
    z = Jet.variable(at, order)
    return jet_elementary(z, fn)


def principal_log(z):
    return cmath.log(z)
