import math

import numpy as np
import pytest

from isoq.errors import NotInSpan, NotSymplectic, NotUnimodular
from isoq.symplin import (
    E,
    GRAM,
    SQ2,
    J,
    L,
    bonnet_matrix,
    elem,
    embed_sl2,
    gfrak,
    gram_check,
    gram_orthogonality_residual,
    lbasis_compose,
    lbasis_decompose,
    omega_pair,
    random_sl2,
    random_symplectic,
    real_coords,
    spin_cover,
    symplectic_residual,
)


def unit(k, n=4):
    v = np.zeros(n, dtype=complex)
    v[k] = 1
    return v


def test_omega_values(rng):
    assert omega_pair(unit(0), unit(2)) == 1
    assert omega_pair(unit(1), unit(3)) == 1
    x = rng.normal(size=4) + 1j * rng.normal(size=4)
    assert abs(omega_pair(x, x)) < 1e-15


def test_symplectic_examples(rng):
    assert symplectic_residual(np.eye(4)) == 0
    assert symplectic_residual(embed_sl2(random_sl2(rng))) < 1e-12
    assert symplectic_residual(bonnet_matrix(0.7)) < 1e-12
    assert symplectic_residual(bonnet_matrix(1.3)) < 1e-12
    assert np.allclose(bonnet_matrix(0.0), np.eye(4))


def test_lbasis():
    assert np.allclose(lbasis_decompose(L[2]), [0, 0, 1, 0, 0])
    assert np.allclose(lbasis_decompose(elem(2, 1) - elem(1, 2)), [1, 0, 0, 0, 0])
    with pytest.raises(NotInSpan):
        lbasis_decompose(elem(1, 1))


def test_lbasis_round_trip(rng):
    c = rng.normal(size=5) + 1j * rng.normal(size=5)
    assert np.max(np.abs(lbasis_decompose(lbasis_compose(c)) - c)) < 1e-14


def test_gram_matrix():
    assert gfrak(L[0], L[4]) == pytest.approx(1)
    assert gfrak(L[2], L[2]) == pytest.approx(1)
    assert abs(gfrak(L[0], L[0])) < 1e-15
    assert gram_check() < 1e-14
    G = np.array([[gfrak(a, b) for b in E] for a in E])
    assert np.max(np.abs(G - np.eye(5))) < 1e-12


def test_spin_cover(rng):
    assert np.allclose(spin_cover(np.eye(4)), np.eye(5))
    A, B = random_symplectic(rng), random_symplectic(rng)
    assert np.max(np.abs(spin_cover(A @ B) - spin_cover(A) @ spin_cover(B))) < 1e-10
    assert gram_orthogonality_residual(spin_cover(A)) < 1e-10
    assert gram_orthogonality_residual(spin_cover(embed_sl2(random_sl2(rng)))) < 1e-10
    with pytest.raises(NotSymplectic):
        spin_cover(2 * np.eye(4))


def test_embed_sl2(rng):
    assert np.allclose(embed_sl2(np.eye(2)), np.eye(4))
    assert np.allclose(embed_sl2(np.diag([2.0, 0.5])), np.diag([8, 2, 1 / 8, 1 / 2]))
    for _ in range(5):
        x, y = random_sl2(rng), random_sl2(rng)
        assert np.max(np.abs(embed_sl2(x @ y) - embed_sl2(x) @ embed_sl2(y))) < 1e-11
    # upper-triangular elements fix the line through e1
    X = embed_sl2(np.array([[2.0, 0.7], [0.0, 0.5]]))
    assert np.max(np.abs(X[1:, 0])) < 1e-15
    with pytest.raises(NotUnimodular):
        embed_sl2(np.diag([2.0, 2.0]))


def test_real_coords():
    t, res = real_coords(L[2])
    assert np.allclose(t, [0, 0, 1, 0, 0]) and res < 1e-15
    t, res = real_coords((L[0] + L[4]) / SQ2)
    assert np.allclose(t, [1, 0, 0, 0, 0])
    _, res = real_coords(1j * E[0])
    assert res > 0.5


def test_plucker_images_are_null(rng):
    for _ in range(5):
        A = random_symplectic(rng)
        x, y = A[:, 0], A[:, 1]
        X = np.outer(x, y) - np.outer(y, x)
        assert abs(gfrak(X, X)) < 1e-10 * max(1, np.max(np.abs(X))) ** 2


def test_j_matches_form():
    x, y = unit(0) + 2 * unit(1), unit(2) - unit(3)
    assert omega_pair(x, y) == x @ J @ y
    assert math.isclose(GRAM[0, 4].real, 1.0)
