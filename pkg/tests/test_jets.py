import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isoq.errors import BaseMismatch, BranchPointAtBase, DivisionByIdenticallyZero, OrderExhausted, ZeroJet
from isoq.jets import (
    Jet,
    jet_arith,
    jet_compose,
    jet_derive,
    jet_div_report,
    jet_elementary,
    jet_exp,
    jet_log,
    jet_strip,
)


def poly(coeffs, base=0.0):
    return Jet(np.array(coeffs, dtype=complex), base)


def close(a, b, tol=1e-12):
    a = a.coeffs if isinstance(a, Jet) else np.asarray(a)
    b = b.coeffs if isinstance(b, Jet) else np.asarray(b)
    return np.max(np.abs(a - b)) <= tol * max(1.0, np.max(np.abs(b)))


def test_product_of_linear_factors():
    assert close(poly([1, 1, 0, 0, 0]) * poly([1, -1, 0, 0, 0]), [1, 0, -1, 0, 0])


def test_geometric_series():
    one = Jet.constant(1.0, 3)
    assert close(one / poly([1, -1, 0, 0]), [1, 1, 1, 1])


def test_division_strips_common_zero():
    q, v = jet_div_report(poly([0, 2, 1, 0, 0]), poly([0, 1, 0, 0, 0]))
    assert v == 1
    assert close(q, [2, 1, 0, 0])


def test_division_by_zero_jet():
    with pytest.raises(DivisionByIdenticallyZero):
        jet_arith(poly([1, 1]), poly([0, 0]), "div")


def test_base_mismatch():
    with pytest.raises(BaseMismatch):
        jet_arith(poly([1, 1], 0.0), poly([1, 1], 1.0), "add")


def test_elementary_series():
    z = Jet.variable(0.0, 3)
    assert close(jet_elementary(z, "exp"), [1, 1, 0.5, 1 / 6])
    assert close(jet_elementary(1 + z, "log"), [0, 1, -0.5, 1 / 3])
    z2 = Jet.variable(0.0, 2)
    assert close(jet_elementary(1 + z2, "pow", 0.5), [1, 0.5, -0.125])


def test_fractional_power_at_zero_raises():
    with pytest.raises(BranchPointAtBase):
        jet_elementary(Jet.variable(0.0, 3), "sqrt")


def test_compose_examples():
    w = Jet.variable(1.0, 4)
    outer = w * w
    inner = poly([1, 1, 0, 0, 0])
    assert close(jet_compose(outer, inner), [1, 2, 1, 0, 0])
    e = jet_exp(Jet.variable(0.0, 4))
    assert close(jet_compose(e, poly([0, 0, 1, 0, 0])), [1, 0, 1, 0, 0.5])


def test_compose_matches_direct_expansion(rng):
    p = rng.normal(size=4) + 1j * rng.normal(size=4)
    q = rng.normal(size=4) + 1j * rng.normal(size=4)
    n = 9
    inner = Jet(np.concatenate([[0], q[1:], np.zeros(n - 3)]), 0.0)
    outer = Jet(np.concatenate([p, np.zeros(n - 3)]), 0.0)
    # expand p(q(z)) with numpy polynomial arithmetic
    qpoly = np.concatenate([[0], q[1:]])
    acc = np.zeros(1, dtype=complex)
    for c in p[::-1]:
        acc = np.polynomial.polynomial.polymul(acc, qpoly)
        acc[0] += c
    want = np.zeros(n + 1, dtype=complex)
    want[: min(len(acc), n + 1)] = acc[: n + 1]
    assert close(jet_compose(outer, inner), want)


def test_derivatives():
    z = Jet.variable(0.0, 3)
    assert close(jet_derive(z ** 3, 1), [0, 0, 3])
    e = jet_exp(Jet.variable(0.0, 6))
    assert close(jet_derive(e, 2), e.truncate(4))
    assert jet_derive(e, 0) is e
    with pytest.raises(OrderExhausted):
        jet_derive(z, 4)


def test_strip():
    v, u = jet_strip(poly([0, 0, 1, 1]))
    assert v == 2 and close(u, [1, 1])
    v, u = jet_strip(poly([1, 1]))
    assert v == 0
    v, _ = jet_strip(poly([0, 1e-20, 1, 0]))
    assert v == 2
    with pytest.raises(ZeroJet):
        jet_strip(poly([0, 0, 0]))


def test_order_never_extends():
    a = poly([1, 2, 3])
    b = poly([1, 1, 1, 1, 1])
    assert (a * b).order == 2
    assert (a + b).order == 2


coef = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=6, max_size=6), st.lists(coef, min_size=6, max_size=6),
       st.lists(coef, min_size=6, max_size=6))
def test_associativity(a, b, c):
    A, B, C = poly(a), poly(b), poly(c)
    assert close((A * B) * C, A * (B * C), 1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=6, max_size=6))
def test_reciprocal(a):
    a[0] = 1.0 + abs(a[0])
    A = poly(a)
    assert close(A * (1.0 / A), [1, 0, 0, 0, 0, 0], 1e-10)


@settings(max_examples=30, deadline=None)
@given(st.lists(coef, min_size=7, max_size=7))
def test_exp_chain_rule_and_log_inverse(a):
    a[0] = complex(a[0].real, math.remainder(a[0].imag, 2 * math.pi) * 0.5)
    A = poly(a)
    E = jet_exp(A)
    lhs = jet_derive(E)
    rhs = jet_derive(A) * E.truncate(5)
    assert close(lhs, rhs, 1e-12)
    assert close(jet_log(E), A, 1e-12)
