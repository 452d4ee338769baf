import cmath

import numpy as np
import pytest

from isoq.errors import BranchPointAtPoint, ExprSyntaxError, PoleAtPoint
from isoq.expr import parse_expr
from isoq.jets import Jet, jet_exp


def test_simple_value():
    assert parse_expr("2*z + i")(1.0) == 2 + 1j


def test_rational_powers_parse_and_evaluate():
    e = parse_expr("z^(-1)*(z^5-1)^(-3/5)")
    z = 0.4 + 0.3j
    assert abs(e(z) - (1 / z) * (z ** 5 - 1) ** (-0.6)) < 1e-13


def test_syntax_error_position():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("z^^2")
    assert info.value.offset == 2 or "2" in str(info.value)


@pytest.mark.parametrize("src", ["", "z+", "(z", "foo(z)", "z^(1/0)", "z^x"])
def test_malformed(src):
    with pytest.raises(ExprSyntaxError):
        parse_expr(src)


def test_jet_evaluation_matches_direct_arithmetic():
    e = parse_expr("exp(2*z)/(1+z^2) - log(1+z)")
    j, _ = e.jet(0.2, 6)
    z = Jet.variable(0.2, 6)
    want = jet_exp(2 * z) / (1 + z * z) - (1 + z).log()
    assert np.max(np.abs(j.coeffs - want.coeffs)) < 1e-12


def test_poles_and_branch_points():
    with pytest.raises(PoleAtPoint):
        parse_expr("1/z")(0.0)
    with pytest.raises(BranchPointAtPoint):
        parse_expr("z^(1/2)")(0.0)


def test_branch_continuation_follows_reference():
    e = parse_expr("z^(1/2)")
    _, ref = e.jet(1.0, 0)
    # walk once around the origin; the branch flips sign
    for t in np.linspace(0, 2 * np.pi, 65)[1:]:
        j, ref = e.jet(cmath.exp(1j * t), 0, ref)
    assert abs(j.value + 1) < 1e-12


def test_round_trip_through_string():
    e = parse_expr("(1+z)^3 - 2.5*i*z")
    e2 = parse_expr(str(e))
    assert abs(e(0.3 - 0.2j) - e2(0.3 - 0.2j)) < 1e-14
