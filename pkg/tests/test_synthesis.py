import numpy as np
import pytest
from scipy.linalg import expm

from isoq.curves import WCurve
from isoq.deformation import goursat_apply
from isoq.errors import DVanishes, NotSymplectic
from isoq.frames import bending, quadratic_ddelta, quartic_delta
from isoq.jets import Jet
from isoq.synthesis import MCSystem, equivalent, mc_integrate, synthesize
from isoq.symplin import random_symplectic


def const_coeff(N):
    def coeff(z, order, state):
        c = np.zeros((order + 1, 4, 4), dtype=complex)
        c[0] = N
        return Jet(c, z), state

    return coeff


def test_zero_coefficient_keeps_frame(rng):
    A0 = random_symplectic(rng)
    out = mc_integrate(MCSystem(const_coeff(np.zeros((4, 4))), A0, [0, 1 + 1j]))
    assert np.max(np.abs(out.endpoint - A0)) < 1e-14


def test_constant_coefficient_matches_exponential(rng):
    N = np.zeros((4, 4), dtype=complex)
    N[0, 1], N[3, 2] = 1.0, -1.0
    N[1, 0], N[2, 3] = 0.5, -0.5
    A0 = random_symplectic(rng)
    z = 1.2 - 0.7j
    out = mc_integrate(MCSystem(const_coeff(N), A0, [0, z]))
    want = A0 @ expm(z * N)
    assert np.max(np.abs(out.endpoint - want)) < 1e-10 * np.max(np.abs(want))


def test_path_independence():
    f = synthesize("z+2", "z")
    g = synthesize("z+2", "z")
    a = f.frame_at(0.6 + 0.4j)[1]
    # reach the same point around the other side of the disk
    g.frame_at(-0.5j)
    g.frame_at(0.6 - 0.3j)
    b = g.frame_at(0.6 + 0.4j)[1]
    assert np.max(np.abs(a - b)) < 1e-9


@pytest.mark.parametrize("c", [0.0, 0.7])
def test_constant_coefficients_give_bending_c_squared(c):
    f = synthesize("1", str(c))
    for z in (0.2, 0.3 + 0.4j):
        if c == 0:
            assert abs(quadratic_ddelta(f, z, 0).value) < 1e-6
        else:
            assert abs(bending(f, z) - c * c) < 1e-6


def test_round_trip_of_invariants():
    f = synthesize("z+2", "z")
    for z in (0.1, 0.5j, -0.4 + 0.3j):
        assert abs(quartic_delta(f, z, 0).value - (z + 2)) < 1e-6
        assert abs(quadratic_ddelta(f, z, 0).value - z) < 1e-6


def test_equivalence_checks(rng):
    f5, f7 = WCurve(5, 1), WCurve(7, 1)
    samples = [0.7 + 0.2j, 1.1 - 0.3j]
    assert equivalent(f5, goursat_apply(f5, random_symplectic(rng)), samples)
    assert not equivalent(f5, f7, samples)
    a = synthesize("z+2", "z")
    b = synthesize("z+2", "z", A0=random_symplectic(rng))
    assert equivalent(a, b, [0.3, 0.2 + 0.5j])


def test_errors():
    with pytest.raises(DVanishes):
        synthesize("z", "1")
    with pytest.raises(NotSymplectic):
        synthesize("1", "0", A0=2 * np.eye(4)).frame_at(0.5)
