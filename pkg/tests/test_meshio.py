import numpy as np
import pytest

from isoq.curves import StandardCycle, WCurve
from isoq.errors import InputError
from isoq.meshio import read_ply, write_obj, write_ply
from isoq.surfaces import Grid, SurfaceMesh, build_mesh


def small_mesh():
    V = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0.5]], dtype=float)
    return SurfaceMesh(3, V, np.array([[0, 1, 2]]), np.array([0, 1, 0], dtype=np.uint8))


def test_obj_layout(tmp_path):
    p = tmp_path / "m.obj"
    write_obj(small_mesh(), p)
    data = p.read_bytes()
    assert b"\r\n" not in data
    lines = data.decode().splitlines()
    assert lines[0] == "v 0 0 0"
    assert lines[2] == "v 0 1 0.5"
    assert lines[3] == "f 1 2 3"


def test_obj_full_precision(tmp_path):
    V = np.array([[np.pi, 1 / 3, -2.0 ** -40]])
    p = tmp_path / "p.obj"
    write_obj(SurfaceMesh(3, V, np.zeros((0, 3), dtype=int), np.zeros(1, dtype=np.uint8)), p)
    vals = [float(t) for t in p.read_text().split()[1:4]]
    assert vals == list(V[0])


def test_obj_rejects_higher_dimension(tmp_path):
    m = SurfaceMesh(4, np.zeros((2, 4)), np.zeros((0, 3), dtype=int), np.zeros(2, dtype=np.uint8))
    with pytest.raises(InputError):
        write_obj(m, tmp_path / "x.obj")


@pytest.mark.parametrize("kind", ["min_r3", "cmc1_h3", "super_s4"])
def test_ply_round_trip(tmp_path, kind):
    mesh = build_mesh(WCurve(5, 1), Grid(r_in=0.3, r_out=1.2, nu=8, nv=12), kind)
    p = tmp_path / "m.ply"
    write_ply(mesh, p)
    V, flags, F = read_ply(p)
    assert V.shape == mesh.vertices.shape
    assert np.array_equal(V, mesh.vertices)
    assert np.array_equal(flags, mesh.flags)
    assert np.array_equal(F, mesh.faces)
    head = p.read_bytes().split(b"end_header\n")[0].decode()
    assert "format binary_little_endian 1.0" in head
    assert "property uchar flags" in head


def test_ply_keeps_flags(tmp_path):
    mesh = build_mesh(StandardCycle(), Grid(r_out=1.0, nu=101, nv=8), "cmc1_h3")
    p = tmp_path / "c.ply"
    write_ply(mesh, p)
    _, flags, _ = read_ply(p)
    assert flags.max() >= 1
