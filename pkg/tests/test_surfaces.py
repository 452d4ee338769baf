import cmath

import numpy as np
import pytest

from isoq.curves import StandardCycle, WCurve, kuy_example
from isoq.errors import AtEnd, InputError
from isoq.surfaces import (
    KINDS,
    NEAR_END,
    OK,
    Grid,
    build_mesh,
    detect_ends,
    harmonicity_residual,
    second_order_report,
    tamed_point,
    target_residual,
)

ROOTS5 = [cmath.exp(2j * np.pi * k / 5) for k in range(5)]


def test_enneper_type_minimal_surface():
    rep = second_order_report(StandardCycle(), 0.5 + 0.2j, "min_r3")
    assert rep["conformal_residual"] < 1e-6 * rep["E"]
    assert abs(rep["mean_curvature"]) < 1e-3
    assert harmonicity_residual(StandardCycle(), 0.5 + 0.2j, "min_r3") < 1e-4


def test_cmc_one_cousin():
    rep = second_order_report(StandardCycle(), 1.0, "cmc1_h3")
    assert abs(rep["mean_curvature"] - 1) < 1e-3
    assert target_residual(rep["point"], "cmc1_h3") < 1e-9


def test_flat_front_is_flat():
    rep = second_order_report(kuy_example(5), 0.5 + 0.3j, "flat_h3")
    assert abs(rep["gauss_curvature"]) < 1e-2


def test_maximal_surface_is_spacelike():
    rep = second_order_report(WCurve(5, 1), 0.8 + 0.3j, "max_r12")
    assert rep["causal_character"] == "spacelike"
    assert abs(rep["mean_curvature"]) < 1e-3


def test_point_at_end():
    with pytest.raises(AtEnd):
        tamed_point(kuy_example(5), ROOTS5[2], "flat_h3")
    with pytest.raises(AtEnd):
        tamed_point(StandardCycle(), 0.0, "cmc1_h3")


def test_unknown_kind():
    with pytest.raises(InputError):
        tamed_point(StandardCycle(), 0.3, "minimal")


@pytest.mark.parametrize("kind", sorted(KINDS))
def test_points_lie_on_target(kind):
    p = tamed_point(WCurve(5, 1), 0.7 + 0.4j, kind)
    assert target_residual(p, kind) < 1e-9


def test_end_detection():
    assert detect_ends(StandardCycle(), Grid(r_out=3.0, nu=24, nv=48), "min_r3") == []
    ends = detect_ends(StandardCycle(), Grid(r_out=2.0, nu=30, nv=60), "cmc1_h3")
    assert len(ends) == 1 and abs(ends[0].center) < 1e-6
    ends = detect_ends(kuy_example(5), Grid(r_in=0.3, r_out=1.6, nu=40, nv=80), "flat_h3")
    assert len(ends) == 5
    for e in ends:
        assert min(abs(e.center - r) for r in ROOTS5) < 1e-6


def test_mesh_vertex_count():
    mesh = build_mesh(WCurve(5, 1), Grid(r_in=0.2, r_out=1.5, nu=64, nv=64), "min_r3")
    # every grid point is kept; flags mark the unusable ones
    assert len(mesh.vertices) == 4096
    assert mesh.check()
    assert mesh.vertices.shape[1] == 3


def test_mesh_flags_near_end():
    grid = Grid(r_out=1.0, nu=101, nv=16)
    mesh = build_mesh(StandardCycle(), grid, "cmc1_h3")
    # the centre row sits exactly on the end and is dropped
    assert len(mesh.vertices) == 100 * 16
    assert np.any(mesh.flags == NEAR_END)
    assert mesh.check()
    clamped = build_mesh(StandardCycle(), Grid(r_out=1.0, nu=21, nv=16), "cmc1_h3", clamp=0.99)
    assert np.any(clamped.flags == NEAR_END)


def test_super_s4_mesh_on_sphere():
    mesh = build_mesh(WCurve(5, 1), Grid(r_in=0.3, r_out=1.2, nu=16, nv=24), "super_s4")
    ok = mesh.flags == OK
    n = np.linalg.norm(mesh.vertices[ok], axis=1)
    assert np.max(np.abs(n - 1)) < 1e-9
    assert mesh.vertices.shape[1] == 5


def test_ball_view():
    mesh = build_mesh(StandardCycle(), Grid(r_in=0.5, r_out=1.5, nu=8, nv=16), "cmc1_h3", view="3d")
    ok = mesh.flags == OK
    assert mesh.vertices.shape[1] == 3
    assert np.all(np.linalg.norm(mesh.vertices[ok], axis=1) < 1)
