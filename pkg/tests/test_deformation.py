import numpy as np
import pytest

from isoq.curves import WCurve
from isoq.deformation import (
    classify_goursat,
    connection_selftest,
    deform4,
    deformation_s,
    goursat_apply,
    hyperbolic_goursat_matrix,
    thomsen_factor,
    verify_deformation,
)
from isoq.errors import FrameUnavailable
from isoq.frames import quadratic_ddelta, quartic_delta
from isoq.jets import Jet, jet_exp
from isoq.synthesis import equivalent, synthesize
from isoq.symplin import bonnet_matrix, random_sl2, random_symplectic, symplectic_residual

Z0 = 0.3 + 0.2j


def test_s_examples():
    z = Jet.variable(0.4, 6)
    assert deformation_s(1 + 0 * z).coeff.max_abs() < 1e-15
    c = 0.3 - 0.2j
    s = deformation_s(jet_exp(c * z))
    assert np.max(np.abs(s.coeff.coeffs - np.eye(1, s.coeff.order + 1)[0] * (-c * c))) < 1e-12
    w = Jet.variable(0.0, 6)
    assert abs(deformation_s(1 + w).value + 3) < 1e-14
    assert abs(deformation_s("1+z", 0.0).value + 3) < 1e-14


def test_goursat_identity_keeps_invariants():
    f = WCurve(5, 1)
    g = goursat_apply(f, np.eye(4))
    assert abs(quartic_delta(f, 0.8, 0).value - quartic_delta(g, 0.8, 0).value) < 1e-12


def test_classification(rng):
    assert classify_goursat(bonnet_matrix(0.7)) == "classical"
    assert classify_goursat(hyperbolic_goursat_matrix(random_sl2(rng))) == "hyperbolic"
    assert classify_goursat(random_symplectic(rng)) == "conformal"


def test_thomsen_factor():
    T = thomsen_factor()
    assert symplectic_residual(T) < 1e-14
    assert np.max(np.abs(T @ T - np.diag([-1j, -1j, 1j, 1j]))) < 1e-14


def test_trivial_deformation_is_congruent():
    f = synthesize("1", "0.5+0.3*z")
    g = deform4(f, "1")
    assert equivalent(f, g, [0.2, 0.3 + 0.2j])


def test_shift_of_quadratic_coefficient():
    f = synthesize("1", "0.5+0.3*z")
    g = deform4(f, "exp(0.1*z)")
    for z in (0.2, Z0):
        d = quadratic_ddelta(g, z, 0).value - quadratic_ddelta(f, z, 0).value
        assert abs(d + 0.01) < 1e-7


def test_deform_needs_unit_quartic():
    with pytest.raises(FrameUnavailable):
        deform4(synthesize("1+z", "0"), "exp(z)")
    with pytest.raises(FrameUnavailable):
        deform4(WCurve(5, 1), "exp(z)")


def test_verify_fourth_order_deformation():
    f = synthesize("1", "0.5+0.3*z")
    rep = verify_deformation(f, deform4(f, "exp(0.1*z)"), Z0)
    assert rep.orth_residual < 1e-6
    assert rep.contact_order == 4


def test_verify_congruent_copy(rng):
    f = synthesize("1", "0.5+0.3*z")
    rep = verify_deformation(f, deform4(f, "1"), Z0)
    assert rep.contact_order == 8


def test_verify_rejects_unrelated_curve():
    f = synthesize("1", "0.5+0.3*z")
    g = synthesize("1", "0.2-0.4*z+0.5*z^2")
    rep = verify_deformation(f, g, Z0)
    assert rep.orth_residual > 1e-6


def test_connection_selftest_reports_fitted_coefficient():
    diff, fitted = connection_selftest()
    assert abs(fitted - 3 / (2 * np.sqrt(2))) < 1e-12
    assert diff > 0.1
