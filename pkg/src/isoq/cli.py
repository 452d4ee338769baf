"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 numerical failure (and a failed
selftest).  Numbers are printed with 17 significant digits; complex
numbers as ``re+imi``.
"""

import argparse
import csv
import io
import json
import logging
import math
import os
import re
import sys
import warnings
from fractions import Fraction

from .curves import WCurve, model_from_descriptor
from .errors import CycleCurve, HeptacticPoint, InputError, IsoqError, SchemaError

log = logging.getLogger("isoq")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

_COMPLEX = re.compile(r"^\s*([+-]?[\d.]+(?:[eE][+-]?\d+)?)?\s*(?:([+-])\s*([\d.]+(?:[eE][+-]?\d+)?)?\s*\*?\s*i)?\s*$")


def parse_complex(text):
    """Parse ``1``, ``1+0i``, ``-0.5-2i``, ``i`` or ``2.5i``."""
    s = str(text).strip().replace(" ", "")
    m = re.fullmatch(r"([+-]?)([\d.]+(?:[eE][+-]?\d+)?)?\*?i", s)
    if m:  # purely imaginary
        mag = float(m.group(2)) if m.group(2) else 1.0
        return complex(0, -mag if m.group(1) == "-" else mag)
    m = _COMPLEX.match(s)
    if not m or (m.group(1) is None and m.group(2) is None):
        raise InputError(f"cannot parse complex number {text!r}")
    re_part = float(m.group(1)) if m.group(1) else 0.0
    im_part = 0.0
    if m.group(2):
        im_part = float(m.group(3)) if m.group(3) else 1.0
        if m.group(2) == "-":
            im_part = -im_part
    return complex(re_part, im_part)


def fmt_number(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, complex) or (hasattr(x, "imag") and not isinstance(x, (int, float))):
        x = complex(x)
        return f"{x.real:.17g}{x.imag:+.17g}i"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _json_value(x):
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, float):
        return x if math.isfinite(x) else fmt_number(x)
    if isinstance(x, complex) or hasattr(x, "imag"):
        return fmt_number(x)
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    if hasattr(x, "tolist"):
        return _json_value(x.tolist())
    return str(x)


def emit_table(rows, fmt="csv", out=None, header=None):
    """Write rows (dicts) as CSV or JSON to ``out`` (path, stream or stdout)."""
    if header is None:
        header = list(rows[0].keys()) if rows else []
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        if header:
            w.writerow(header)
        for r in rows:
            w.writerow([fmt_number(r.get(k)) for k in header])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps([_json_value(r) for r in rows], indent=2) + "\n"
    else:
        raise InputError(f"unknown table format {fmt!r}")
    if out is None or out == "-":
        sys.stdout.write(text)
    elif hasattr(out, "write"):
        out.write(text)
    else:
        try:
            with open(out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc}") from None


def load_descriptor(source):
    """Curve model from inline JSON, a JSON file, or a shorthand name."""
    src = str(source).strip()
    if src in ("cycle", "exceptional1"):
        data = {"type": src}
    elif src.startswith("{"):
        try:
            data = json.loads(src)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}") from None
    else:
        try:
            with open(src) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise SchemaError(f"cannot read descriptor file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}") from None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        model = model_from_descriptor(data)
    for w in caught:
        log.warning("%s", w.message)
    return model


# -- subcommands -------------------------------------------------------------------

def _points(args):
    return [parse_complex(a) for a in (args.at or ["1"])]


def _invariant_row(model, z):
    from .frames import bending, quadratic_ddelta, quartic_delta

    row = {"z": z, "delta": quartic_delta(model, z).value}
    try:
        row["ddelta"] = quadratic_ddelta(model, z).value
        row["kappa"] = bending(model, z)
    except (CycleCurve, HeptacticPoint) as exc:
        row["ddelta"] = None
        row["kappa"] = None
        log.warning("at z = %s: %s", fmt_number(z), exc)
    return row


def cmd_invariants(args):
    model = load_descriptor(args.curve)
    rows = [_invariant_row(model, z) for z in _points(args)]
    emit_table(rows, args.format, args.out, ["z", "delta", "ddelta", "kappa"])


def _parse_q(text):
    out = []
    for part in text.split(","):
        try:
            f = Fraction(part.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"cannot parse q value {part!r}") from None
        out.append(f)
    return out


def cmd_table(args):
    from .frames import bending, quadratic_ddelta, quartic_delta

    if args.table != "wcurves":
        raise InputError(f"unknown table {args.table!r}")
    rows = []
    for q in _parse_q(args.q):
        w = WCurve(q.numerator, q.denominator)
        for z in _points(args):
            d, g = quartic_delta(w, z).value, quadratic_ddelta(w, z).value
            df, gf = w.delta_formula(z), w.gamma_formula(z)
            rows.append({
                "q": str(q), "z": z, "delta": d, "delta_formula": df,
                "delta_rel_err": abs(d - df) / abs(df),
                "gamma": g, "gamma_formula": gf, "gamma_rel_err": abs(g - gf) / abs(gf),
                "kappa": bending(w, z), "kappa_formula": w.kappa_formula(),
            })
    emit_table(rows, args.format, args.out)


def _grid(args):
    from .surfaces import Grid

    return Grid(center=parse_complex(args.center), r_out=args.radius, r_in=args.r_in,
                nu=args.nu, nv=args.nv, polar=args.grid == "polar",
                width=args.width, height=args.height)


def cmd_mesh(args):
    from .meshio import write_obj, write_ply
    from .surfaces import build_mesh

    model = load_descriptor(args.curve)
    view = args.view
    if view is None:
        view = "3d" if args.out.endswith(".obj") else "raw"
    mesh = build_mesh(model, _grid(args), args.kind, near_tol=args.near_tol, clamp=args.clamp, view=view)
    if args.out.endswith(".obj"):
        write_obj(mesh, args.out)
    elif args.out.endswith(".ply"):
        write_ply(mesh, args.out)
    else:
        raise InputError("output must end in .obj or .ply")
    counts = [int((mesh.flags == k).sum()) for k in range(3)]
    print(f"vertices {len(mesh.vertices)} faces {len(mesh.faces)} ok {counts[0]} "
          f"near_end {counts[1]} singular {counts[2]} dim {mesh.dim}")


def cmd_synthesize(args):
    from .synthesis import synthesize

    model = synthesize(args.D, args.G, parse_complex(args.base))
    if args.save:
        with open(args.save, "w") as fh:
            json.dump(model.descriptor(), fh, indent=2)
    rows = [_invariant_row(model, z) for z in _points(args)]
    emit_table(rows, args.format, args.out, ["z", "delta", "ddelta", "kappa"])


def cmd_deform(args):
    from .deformation import deform4, deformation_s, verify_deformation
    from .frames import quadratic_ddelta, quartic_delta

    base = load_descriptor(args.curve)
    fh = deform4(base, args.ahat)
    rows = []
    for z in _points(args):
        rep = verify_deformation(base, fh, z)
        s = deformation_s(args.ahat, z, 2).value
        rows.append({
            "z": z, "gamma": quadratic_ddelta(base, z).value, "gamma_hat": quadratic_ddelta(fh, z).value,
            "s": s, "delta_hat": quartic_delta(fh, z).value, "epsilon": rep.epsilon,
            "orth_residual": rep.orth_residual, "contact_order": rep.contact_order,
            "r": [complex(x) for x in rep.r], "notes": "; ".join(rep.notes),
        })
    if args.format == "csv":
        for r in rows:
            r["r"] = " ".join(fmt_number(x) for x in r["r"])
    emit_table(rows, args.format, args.out)


def cmd_contact(args):
    from .frames import contact_order, osculating_cycle_model

    model = load_descriptor(args.curve)
    rows = []
    for z in _points(args):
        if args.other == "osculating":
            other, zb = osculating_cycle_model(model, z), 0j
        else:
            other = load_descriptor(args.other)
            zb = parse_complex(args.at_other) if args.at_other else z
        k = contact_order(model, other, z, maxk=args.maxk, z0_b=zb, reparametrize=not args.no_reparam)
        rows.append({"z": z, "z_other": zb, "contact_order": k})
    emit_table(rows, args.format, args.out)


def cmd_ends(args):
    from .surfaces import detect_ends

    model = load_descriptor(args.curve)
    ends = detect_ends(model, _grid(args), args.kind, near_tol=args.near_tol)
    rows = [{"center": e.center, "ratio": e.ratio, "grid_points": len(e.members)} for e in ends]
    emit_table(rows, args.format, args.out, ["center", "ratio", "grid_points"])


def cmd_selftest(args):
    from .acceptance import format_check, run_all
    from .deformation import connection_selftest

    diff, fitted = connection_selftest()
    print(f"connection check: hand-written vs pushforward max diff {diff:.3g}, fitted coefficient {fitted:.12g}")
    only = {int(k) for k in args.only.split(",")} if args.only else None
    results = run_all(only)
    for c in results:
        print(format_check(c), flush=True)
    failed = [c.number for c in results if not c.passed]
    print(f"{len(results) - len(failed)}/{len(results)} passed")
    return EXIT_OK if not failed else EXIT_NUMERIC


def _add_output(p, default_fmt="csv"):
    p.add_argument("--format", choices=["csv", "json"], default=default_fmt)
    p.add_argument("--out", default=None, help="output file (default stdout)")


def _add_grid(p):
    p.add_argument("--kind", required=True,
                   choices=["min_r3", "max_r12", "cmc1_h3", "cmc1_h12", "flat_h3", "flat_h12", "super_s4"])
    p.add_argument("--grid", choices=["polar", "cartesian"], default="polar")
    p.add_argument("--center", default="0")
    p.add_argument("--radius", type=float, default=1.0, help="outer radius of a polar grid")
    p.add_argument("--r-in", dest="r_in", type=float, default=0.0)
    p.add_argument("--width", type=float, default=2.0)
    p.add_argument("--height", type=float, default=2.0)
    p.add_argument("--nu", type=int, default=32)
    p.add_argument("--nv", type=int, default=32)
    p.add_argument("--near-tol", dest="near_tol", type=float, default=1e-3)


def build_parser():
    p = argparse.ArgumentParser(prog="isoq", description="Isotropic curves in the complex quadric.")
    p.add_argument("--order", type=int, default=None, help="frame jet order (overrides ISOQ_JET_ORDER)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("invariants", help="quartic and quadratic differentials and bending at points")
    s.add_argument("--curve", required=True)
    s.add_argument("--at", action="append")
    _add_output(s)
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("table", help="formula-vs-computed tables")
    s.add_argument("table", choices=["wcurves"])
    s.add_argument("--q", default="5,7,5/3,3/2")
    s.add_argument("--at", action="append")
    _add_output(s)
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("mesh", help="sample a tamed surface and write OBJ or PLY")
    s.add_argument("--curve", required=True)
    _add_grid(s)
    s.add_argument("--out", required=True)
    s.add_argument("--view", choices=["raw", "3d"], default=None)
    s.add_argument("--clamp", type=float, default=None, help="ball-model radius cut for H3 targets")
    s.set_defaults(func=cmd_mesh)

    s = sub.add_parser("synthesize", help="curve with prescribed differentials")
    s.add_argument("--D", required=True)
    s.add_argument("--G", required=True)
    s.add_argument("--base", default="0")
    s.add_argument("--at", action="append")
    s.add_argument("--save", default=None, help="write the curve descriptor here")
    _add_output(s)
    s.set_defaults(func=cmd_synthesize)

    s = sub.add_parser("deform", help="fourth-order deformation of a synthesized curve")
    s.add_argument("--curve", required=True)
    s.add_argument("--ahat", required=True)
    s.add_argument("--at", action="append")
    _add_output(s, "json")
    s.set_defaults(func=cmd_deform)

    s = sub.add_parser("contact", help="contact order of two curves")
    s.add_argument("--curve", required=True)
    s.add_argument("--other", required=True, help="descriptor, or 'osculating' for the osculating cycle")
    s.add_argument("--at", action="append")
    s.add_argument("--at-other", dest="at_other", default=None)
    s.add_argument("--maxk", type=int, default=8)
    s.add_argument("--no-reparam", dest="no_reparam", action="store_true")
    _add_output(s)
    s.set_defaults(func=cmd_contact)

    s = sub.add_parser("ends", help="locate ends of a tamed surface")
    s.add_argument("--curve", required=True)
    _add_grid(s)
    _add_output(s)
    s.set_defaults(func=cmd_ends)

    s = sub.add_parser("selftest", help="run the acceptance suite")
    s.add_argument("--only", default=None, help="comma-separated check numbers")
    s.set_defaults(func=cmd_selftest)
    return p


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if args.order is not None:
        if args.order < 1:
            print("error: --order must be positive", file=sys.stderr)
            return EXIT_INPUT
        os.environ["ISOQ_JET_ORDER"] = str(args.order)
    try:
        code = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IsoqError, ArithmeticError, ValueError, OverflowError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK if code is None else code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
