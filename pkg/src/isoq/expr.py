"""Small meromorphic-expression language in one variable ``z``.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' rational)?
    base   := number | 'z' | 'i' | '(' expr ')' | fn '(' expr ')' | '-' base
    fn     := 'exp' | 'log' | 'sqrt'
    rational := integer | '(' ['-'] integer ['/' integer] ')'

Multivalued nodes (fractional powers, log, sqrt) use the principal branch
unless a dict of reference values is supplied; then each node picks the
branch whose value is closest to its reference.  Following a path and
feeding each evaluation's branch values into the next one gives analytic
continuation.
"""

import cmath
import math
import re
from fractions import Fraction

import numpy as np

from .errors import BranchPointAtPoint, ExprSyntaxError, PoleAtPoint
from .jets import Jet, jet_exp, jet_log, jet_pow

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]+)|(.))")


class Node:
    multivalued = False

    def walk(self):
        yield self


class Num(Node):
    def __init__(self, value):
        self.value = complex(value)

    def __str__(self):
        v = self.value
        if v.imag == 0:
            return repr(v.real)
        if v.real == 0:
            return f"{v.imag!r}*i"
        return f"({v.real!r}+{v.imag!r}*i)"


class Var(Node):
    def __str__(self):
        return "z"


class Bin(Node):
    def __init__(self, op, a, b):
        self.op, self.a, self.b = op, a, b

    def walk(self):
        yield self
        yield from self.a.walk()
        yield from self.b.walk()

    def __str__(self):
        return f"({self.a}{self.op}{self.b})"


class Neg(Node):
    def __init__(self, a):
        self.a = a

    def walk(self):
        yield self
        yield from self.a.walk()

    def __str__(self):
        return f"(-{self.a})"


class Pow(Node):
    def __init__(self, a, p):
        self.a, self.p = a, Fraction(p)
        self.multivalued = self.p.denominator != 1

    def walk(self):
        yield self
        yield from self.a.walk()

    def __str__(self):
        if self.p.denominator == 1 and self.p >= 0:
            return f"{self.a}^{self.p.numerator}"
        return f"{self.a}^({self.p.numerator}/{self.p.denominator})"


class Fn(Node):
    def __init__(self, name, a):
        self.name, self.a = name, a
        self.multivalued = name in ("log", "sqrt")

    def walk(self):
        yield self
        yield from self.a.walk()

    def __str__(self):
        return f"{self.name}({self.a})"


class Expr:
    """Parsed expression; evaluate on complex numbers or on jets."""

    def __init__(self, root, src=None):
        self.root = root
        self.src = src if src is not None else str(root)
        self._ids = {id(n): k for k, n in enumerate(root.walk())}

    def __str__(self):
        return self.src

    def __repr__(self):
        return f"Expr({self.src!r})"

    def jet(self, z0, order, ref=None):
        """Jet of the expression at ``z0``; returns ``(jet, branch_values)``."""
        z = Jet.variable(z0, order)
        out = {}
        val = self._eval(self.root, z, ref, out)
        if not isinstance(val, Jet):
            val = Jet.constant(val, order, z0)
        return val, out

    def __call__(self, z0, ref=None):
        j, _ = self.jet(z0, 0, ref)
        return j.value

    def _eval(self, n, z, ref, out):
        if isinstance(n, Num):
            return n.value
        if isinstance(n, Var):
            return z
        if isinstance(n, Neg):
            return -self._eval(n.a, z, ref, out)
        if isinstance(n, Bin):
            a = self._eval(n.a, z, ref, out)
            b = self._eval(n.b, z, ref, out)
            if n.op == "+":
                return a + b
            if n.op == "-":
                return a - b
            if n.op == "*":
                return a * b
            if _is_zero(b):
                raise PoleAtPoint(f"division by zero at z = {z.base}")
            if not isinstance(b, Jet):
                return a / b
            if not isinstance(a, Jet):
                a = Jet.constant(a, z.order, z.base)
            return a / b
        key = self._ids[id(n)]
        a = self._eval(n.a, z, ref, out)
        if not isinstance(a, Jet):
            a = Jet.constant(a, z.order, z.base)
        a0 = a.value
        if isinstance(n, Pow):
            p = n.p
            if p.denominator == 1:
                if p < 0 and a0 == 0:
                    raise PoleAtPoint(f"negative power of zero at z = {z.base}")
                return a ** int(p)
            if a0 == 0:
                raise BranchPointAtPoint(f"fractional power of zero at z = {z.base}")
            y = jet_pow(a, float(p))
            y = _pick_power(y, p, ref.get(key) if ref else None)
            out[key] = y.value
            return y
        if n.name == "exp":
            return jet_exp(a)
        if a0 == 0:
            if n.name == "log":
                raise PoleAtPoint(f"log of zero at z = {z.base}")
            raise BranchPointAtPoint(f"sqrt of zero at z = {z.base}")
        if n.name == "log":
            y = jet_log(a)
            r = ref.get(key) if ref else None
            if r is not None:
                k = round((r - y.value).imag / (2 * math.pi))
                y = y + 2j * math.pi * k
            out[key] = y.value
            return y
        y = jet_pow(a, 0.5)
        y = _pick_power(y, Fraction(1, 2), ref.get(key) if ref else None)
        out[key] = y.value
        return y


def _is_zero(b):
    if isinstance(b, Jet):
        return b.value == 0
    return b == 0


def _pick_power(y, p, r):
    if r is None:
        return y
    q = p.denominator
    best, fac = None, 1.0
    for k in range(q):
        f = cmath.exp(2j * math.pi * k * p.numerator / q)
        d = abs(y.value * f - r)
        if best is None or d < best:
            best, fac = d, f
    return y * fac


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = []
        pos = 0
        while pos < len(src):
            m = _TOKEN.match(src, pos)
            if m is None or m.end() == pos:
                break
            if m.group(0).strip() == "":
                break
            start = m.start(m.lastindex)
            if m.group(1) is not None:
                self.toks.append(("num", m.group(1), start))
            elif m.group(2) is not None:
                self.toks.append(("name", m.group(2), start))
            else:
                self.toks.append(("op", m.group(3), start))
            pos = m.end()
        self.k = 0

    def peek(self):
        return self.toks[self.k] if self.k < len(self.toks) else ("end", "", len(self.src))

    def take(self):
        t = self.peek()
        self.k += 1
        return t

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ExprSyntaxError(f"expected {op!r}, got {t[1]!r}", t[2])
        return t

    def parse(self):
        if not self.toks:
            raise ExprSyntaxError("empty expression", 0)
        node = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ExprSyntaxError(f"unexpected {t[1]!r}", t[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = Bin(op, node, self.factor())
        return node

    def factor(self):
        node = self.base()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            node = Pow(node, self.rational())
        return node

    def integer(self):
        t = self.take()
        if t[0] != "num" or not t[1].isdigit():
            raise ExprSyntaxError(f"expected an integer, got {t[1]!r}", t[2])
        return int(t[1])

    def rational(self):
        t = self.peek()
        if t[0] == "num":
            return Fraction(self.integer())
        if t[0] == "op" and t[1] == "(":
            self.take()
            sign = 1
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                sign = -1
            p = self.integer()
            q = 1
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                qt = self.peek()
                q = self.integer()
                if q == 0:
                    raise ExprSyntaxError("zero denominator in exponent", qt[2])
            self.expect(")")
            return Fraction(sign * p, q)
        raise ExprSyntaxError(f"expected an exponent, got {t[1]!r}", t[2])

    def base(self):
        t = self.take()
        kind, text, pos = t
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text == "z":
                return Var()
            if text == "i":
                return Num(1j)
            if text in ("exp", "log", "sqrt"):
                self.expect("(")
                a = self.expr()
                self.expect(")")
                return Fn(text, a)
            raise ExprSyntaxError(f"unknown name {text!r}", pos)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "op" and text == "-":
            return Neg(self.base())
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", pos)
        raise ExprSyntaxError(f"unexpected {text!r}", pos)


def parse_expr(src):
    if isinstance(src, Expr):
        return src
    if isinstance(src, (int, float, complex, np.number)):
        return Expr(Num(src), repr(src))
    return Expr(_Parser(str(src)).parse(), str(src))
