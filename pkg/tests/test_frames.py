import math

import numpy as np
import pytest

from isoq.curves import Bryant, ConstantBending, Exceptional1, StandardCycle, WCurve
from isoq.deformation import goursat_apply
from isoq.errors import CycleCurve, ExceptionalKappa, HeptacticPoint
from isoq.frames import (
    Z8_CONST,
    contact_order,
    d_naive,
    d_transform_check,
    heptactic_points,
    maurer_cartan,
    osculating_cycle_model,
    pe4_max_residual,
    quadratic_ddelta,
    quartic_delta,
    r_map,
    reduce_frame,
    schwarzian,
    bending,
    z8_reduce,
)
from isoq.jets import Jet, jet_exp
from isoq.symplin import J, random_symplectic


def const_jet(M, order=4, base=0.0):
    c = np.zeros((order + 1,) + M.shape, dtype=complex)
    c[0] = M
    return Jet(c, base)


def test_maurer_cartan_constant_and_exponential():
    A = const_jet(np.eye(4))
    assert maurer_cartan(A).max_abs() < 1e-15
    N = np.zeros((4, 4), dtype=complex)
    N[0, 1] = 1.0
    N[3, 2] = -1.0  # x -> sp element: e12 - e43
    assert np.max(np.abs(N.T @ J + J @ N)) < 1e-15
    order = 6
    c = np.array([np.linalg.matrix_power(N, k) / math.factorial(k) for k in range(order + 1)],
                 dtype=complex)
    alpha = maurer_cartan(Jet(c, 0.0))
    assert np.max(np.abs(alpha.value - N)) < 1e-12


def test_maurer_cartan_left_invariance(rng):
    A = WCurve(5, 1)
    frame = reduce_frame(A, 1.0, 4)
    X = random_symplectic(rng)
    XA = const_jet(X, frame.A.order, frame.A.base).matmul(frame.A)
    a1 = maurer_cartan(XA)
    n = min(a1.order, frame.alpha.order)
    assert np.max(np.abs(a1.truncate(n).coeffs - frame.alpha.truncate(n).coeffs)) < 1e-9


def test_pe4_residuals_small():
    frame = reduce_frame(WCurve(5, 1), 1.0, 4)
    assert pe4_max_residual(frame.alpha) < 1e-9


def test_cycle_frame_extra_relation():
    frame = reduce_frame(StandardCycle(), 1.0, 4)
    assert abs(frame.alpha[0, 2].value) < 1e-10


def test_quartic_delta_values():
    assert abs(quartic_delta(WCurve(5, 1), 1.0, 0).value + 35.84) < 1e-9
    assert abs(quartic_delta(StandardCycle(), 0.7, 0).value) < 1e-10


def test_quadratic_ddelta_values():
    assert abs(quadratic_ddelta(WCurve(5, 1), 1.0, 0).value - 10.4) < 1e-9
    assert abs(quadratic_ddelta(WCurve(5, 3), 2.0, 0).value - 3.4) < 1e-9


def test_goursat_invariance(rng):
    f = WCurve(5, 1)
    g = goursat_apply(f, random_symplectic(rng))
    z = 0.8 + 0.3j
    assert abs(quartic_delta(f, z, 0).value - quartic_delta(g, z, 0).value) < 1e-9 * 40
    assert abs(quadratic_ddelta(f, z, 0).value - quadratic_ddelta(g, z, 0).value) < 1e-8 * 10


def test_z8_normalization():
    frame = reduce_frame(WCurve(5, 1), 1.2, 6)
    new, conn = z8_reduce(frame)
    ratio = new.delta().value / conn.eta21.value ** 4
    assert abs(ratio - Z8_CONST) < 1e-9
    assert conn.eta11.max_abs() < 1e-9
    with pytest.raises(HeptacticPoint):
        z8_reduce(reduce_frame(StandardCycle(), 0.5, 6))


def test_d_naive_examples():
    z = Jet.variable(0.7, 6)
    assert d_naive(3 + 0 * z).max_abs() < 1e-15
    got = d_naive(z ** -4)
    want = z.truncate(got.order) ** -2
    assert np.max(np.abs(got.coeffs - want.coeffs)) < 1e-10
    got = d_naive(z ** 4)
    want = -3 * z.truncate(got.order) ** -2
    assert np.max(np.abs(got.coeffs - want.coeffs)) < 1e-10


def test_schwarzian_examples():
    z = Jet.variable(0.3, 8)
    mob = (2 * z + 1) / (z + 3)
    assert schwarzian(mob).max_abs() < 1e-11
    w = Jet.variable(1.0, 6)
    assert abs(schwarzian(w * w).value + 1.5) < 1e-12
    s = schwarzian(jet_exp(z))
    assert abs(s.value + 0.5) < 1e-13 and np.max(np.abs(s.coeffs[1:])) < 1e-12


def test_chart_change_law(rng):
    z = Jet.variable(0.4, 10)
    h = (z + 0.5) / (0.2 * z + 1)
    Z = Jet.variable(h.value, 10)
    P = 1 + 0.3 * Z + 0.2 * Z * Z - 0.1 * Z ** 3
    assert d_transform_check(P, h) < 1e-10
    Z = Jet.variable(0.16, 10)
    P = 2 + Z + 0.5 * Z ** 3
    assert d_transform_check(P, z * z) < 1e-9
    Z = Jet.variable(np.exp(0.4), 10)
    P = 1 + Z * Z
    assert d_transform_check(P, jet_exp(z)) < 1e-9


def test_bending_values():
    assert abs(bending(WCurve(5, 1), 1.0) + 169 / 56) < 1e-8
    for z in np.linspace(-0.5, 0.5, 10) + 0.2j:
        assert abs(bending(Exceptional1(), z) - 1) < 1e-6
    assert abs(bending(ConstantBending(2.0), 0.3) - 2) < 1e-6
    with pytest.raises(CycleCurve):
        bending(StandardCycle(), 0.3)


def test_r_map():
    assert abs(r_map(-169 / 56) - 5) < 1e-9
    assert abs(r_map(WCurve(7, 1).kappa_formula()) - 7) < 1e-8
    with pytest.raises(ExceptionalKappa):
        r_map(1.0)


def test_heptactic_points():
    assert heptactic_points(WCurve(5, 1), (0.0, 0.5, 2.0)) == []
    with pytest.raises(CycleCurve):
        heptactic_points(StandardCycle())
    # for h = z^5 the quartic coefficient is a pure negative power of z
    assert heptactic_points(Bryant("z", "z^5"), (0.0, 0.2, 2.0), grid=10) == []
    b = Bryant("z", "z^5+z^3")
    roots = heptactic_points(b, (0.0, 0.2, 1.0), grid=10)
    assert len(roots) >= 2
    for r in roots:
        assert abs(quartic_delta(b, r, 0).value) < 1e-10


def test_osculating_cycle_contact():
    f = WCurve(5, 1)
    z0 = 1 + 0.3j
    cyc = osculating_cycle_model(f, z0)
    assert contact_order(f, cyc, z0, z0_b=0.0) == 5
    assert contact_order(f, f, z0) == 8


def test_cycle_is_its_own_osculating_cycle():
    c = StandardCycle()
    cyc = osculating_cycle_model(c, 0.4)
    assert contact_order(c, cyc, 0.4, z0_b=0.0) == 8


def test_contact_with_moved_copy_is_small(rng):
    f = WCurve(5, 1)
    g = goursat_apply(f, random_symplectic(rng))
    assert contact_order(f, g, 0.9 + 0.2j) < 3


def test_contact_at_heptactic_point():
    b = Bryant("z", "z^5+z^3")
    roots = heptactic_points(b, (0.0, 0.2, 1.0), grid=10)
    assert roots
    z0 = roots[0]
    assert contact_order(b, osculating_cycle_model(b, z0), z0, z0_b=0.0) >= 6


def test_gauge_unique_up_to_triangular_factor(rng):
    from isoq.frames import sl2_from_embedded

    f = WCurve(7, 2)
    X = random_symplectic(rng)
    z0 = 0.9 - 0.4j
    Af = reduce_frame(f, z0, 2).A.value
    Ag = reduce_frame(goursat_apply(f, X), z0, 2).A.value
    Q = np.linalg.solve(X @ Af, Ag)
    x = sl2_from_embedded(Q)
    assert abs(x[1, 0]) < 1e-8 * np.max(np.abs(x))
