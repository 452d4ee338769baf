"""Mesh writers: ASCII OBJ and binary little-endian PLY with vertex flags."""

import struct

import numpy as np

from .errors import InputError


def write_obj(mesh, path):
    V = np.asarray(mesh.vertices, dtype=float)
    if V.ndim != 2 or V.shape[1] != 3:
        raise InputError(f"OBJ needs 3D vertices, got dimension {V.shape[1] if V.ndim == 2 else '?'}")
    with open(path, "w", newline="\n") as fh:
        for v in V:
            fh.write("v {:.17g} {:.17g} {:.17g}\n".format(*v))
        for f in mesh.faces:
            fh.write("f {} {} {}\n".format(*(int(k) + 1 for k in f)))


_AXES = ["x", "y", "z", "w", "v"]


def write_ply(mesh, path):
    V = np.asarray(mesh.vertices, dtype="<f8")
    dim = V.shape[1]
    flags = np.asarray(mesh.flags, dtype=np.uint8)
    head = ["ply", "format binary_little_endian 1.0", f"element vertex {len(V)}"]
    head += [f"property double {a}" for a in _AXES[:dim]]
    head += ["property uchar flags", f"element face {len(mesh.faces)}",
             "property list uchar int vertex_indices", "end_header"]
    with open(path, "wb") as fh:
        fh.write(("\n".join(head) + "\n").encode("ascii"))
        rec = struct.Struct("<" + "d" * dim + "B")
        for v, fl in zip(V, flags):
            fh.write(rec.pack(*v, int(fl)))
        face = struct.Struct("<Biii")
        for f in mesh.faces:
            fh.write(face.pack(3, *(int(k) for k in f)))


def read_ply(path):
    """Vertices, flags and faces of a file written by :func:`write_ply`."""
    with open(path, "rb") as fh:
        data = fh.read()
    end = data.index(b"end_header\n") + len(b"end_header\n")
    lines = data[:end].decode("ascii").splitlines()
    nv = nf = dim = 0
    for ln in lines:
        parts = ln.split()
        if parts[:2] == ["element", "vertex"]:
            nv = int(parts[2])
        elif parts[:2] == ["element", "face"]:
            nf = int(parts[2])
        elif parts[:2] == ["property", "double"]:
            dim += 1
    rec = struct.Struct("<" + "d" * dim + "B")
    off = end
    V, flags = [], []
    for _ in range(nv):
        *v, fl = rec.unpack_from(data, off)
        off += rec.size
        V.append(v)
        flags.append(fl)
    face = struct.Struct("<Biii")
    F = []
    for _ in range(nf):
        _, a, b, c = face.unpack_from(data, off)
        off += face.size
        F.append((a, b, c))
    return np.array(V).reshape(nv, dim), np.array(flags, dtype=np.uint8), np.array(F, dtype=int).reshape(nf, 3)


__all__ = ["write_obj", "write_ply", "read_ply"]
