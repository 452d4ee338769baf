"""Numerical acceptance suite: eleven end-to-end checks with pinned tolerances.

Each check returns a :class:`Check` with a pass flag and a one-line detail
string; :func:`run_all` runs them in order.  Random inputs come from a
fixed seed so the suite is deterministic.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from .curves import Bryant, ConstantBending, Exceptional1, Goursat, Reparametrized, StandardCycle, WCurve, kuy_example
from .deformation import deform4, verify_deformation
from .errors import CycleCurve
from .expr import parse_expr
from .frames import (
    CONTACT_CAP,
    bending,
    contact_order,
    d_transform_check,
    ddelta_chart_path,
    heptactic_points,
    osculating_cycle_model,
    quadratic_ddelta,
    quartic_delta,
    r_map,
    schwarzian,
)
from .quadric import random_compact_symplectic, twistor_project
from .surfaces import Grid, detect_ends, harmonicity_residual, second_order_report
from .symplin import (
    E,
    embed_sl2,
    gram_check,
    gram_orthogonality_residual,
    random_sl2,
    random_symplectic,
    real_coords,
    spin_cover,
    symplectic_residual,
)
from .synthesis import equivalent, synthesize

SEED = 20240611


@dataclass
class Check:
    number: int
    title: str
    passed: bool
    detail: str


def _cstr(z):
    z = complex(z)
    return f"({z.real!r}+({z.imag!r})*i)"


def _annulus(rng, n, r_in=0.5, r_out=2.0):
    r = rng.uniform(r_in, r_out, n)
    t = rng.uniform(0, 2 * math.pi, n)
    return r * np.exp(1j * t)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


W_QS = [(5, 1), (7, 1), (5, 3), (3, 2)]


def check_quartic_wcurves():
    rng = np.random.default_rng(SEED)
    zs = _annulus(rng, 20)
    t0 = time.perf_counter()
    worst = 0.0
    for m, n in W_QS:
        w = WCurve(m, n)
        for z in zs:
            worst = max(worst, _rel(quartic_delta(w, z).value, w.delta_formula(z)))
    dt = time.perf_counter() - t0
    return worst <= 1e-8 and dt <= 10.0, f"max rel err {worst:.3g}, {dt:.2f} s"


def check_quadratic_wcurves():
    rng = np.random.default_rng(SEED)
    zs = _annulus(rng, 20)
    worst = 0.0
    for m, n in W_QS:
        w = WCurve(m, n)
        for z in zs:
            worst = max(worst, _rel(quadratic_ddelta(w, z).value, w.gamma_formula(z)))
    return worst <= 1e-8, f"max rel err {worst:.3g}"


def check_bending():
    errs = []
    k5 = bending(WCurve(5, 1), 1.1 + 0.2j)
    errs.append(("f5", abs(k5 - (-169 / 56)), 1e-8))
    k7 = bending(WCurve(7, 1), 0.9 - 0.4j)
    errs.append(("f7", abs(k7 - (-16 * 50 ** 2 / (9 * 2401 - 82 * 49 + 9))), 1e-8))
    for kappa in (2, -3, 0.5 + 1.2j):
        errs.append((f"kappa={kappa}", abs(bending(ConstantBending(kappa), 0.3 + 0.1j) - kappa), 1e-6))
    errs.append(("exceptional", abs(bending(Exceptional1(), 0.4) - 1), 1e-6))
    for q in (5, 7, 9):
        got = r_map(WCurve(q, 1).kappa_formula())
        errs.append((f"r_map {q}", abs(complex(got) - q), 1e-8))
    bad = [name for name, e, tol in errs if not e <= tol]
    worst = max(e for _, e, _ in errs)
    return not bad, f"max abs err {worst:.3g}" + (f"; failing {bad}" if bad else "")


def check_cycles():
    rng = np.random.default_rng(SEED)
    zs = _annulus(rng, 20)
    models = [StandardCycle()] + [Goursat(StandardCycle(), random_symplectic(rng, 0.4)) for _ in range(5)]
    worst = max(abs(quartic_delta(m, z).value) for m in models for z in zs)
    w3 = WCurve(3, 1)
    detected = w3.is_cycle
    try:
        bending(w3, 1.0)
        detected = False
    except CycleCurve:
        pass
    return worst < 1e-10 and detected, f"max |delta| {worst:.3g}, WCurve(3,1) cycle: {detected}"


def check_invariance():
    rng = np.random.default_rng(SEED)
    f5 = WCurve(5, 1)
    z0 = 0.8 + 0.3j
    d0 = quartic_delta(f5, z0).value
    g0 = quadratic_ddelta(f5, z0).value
    k0 = bending(f5, z0)
    worst_g = 0.0
    for _ in range(10):
        g = Goursat(f5, random_symplectic(rng, 0.5))
        worst_g = max(worst_g, _rel(quartic_delta(g, z0).value, d0),
                      _rel(quadratic_ddelta(g, z0).value, g0), _rel(bending(g, z0), k0))
    worst_m = 0.0
    for _ in range(5):
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        a *= 0.3
        # Moebius map fixing z0 with derivative 1/b there
        h = f"{_cstr(z0)}+(z-{_cstr(z0)})/({_cstr(a)}*(z-{_cstr(z0)})+{_cstr(b)})"
        R = Reparametrized(f5, h)
        worst_m = max(worst_m, _rel(quartic_delta(R, z0).value, d0 / b ** 4))
    ok = worst_g <= 1e-7 and worst_m <= 1e-8
    return ok, f"Goursat max rel {worst_g:.3g}, Moebius max rel {worst_m:.3g}"


def check_projective():
    rng = np.random.default_rng(SEED)
    worst_t = 0.0
    for _ in range(20):
        z0 = complex(*rng.uniform(-0.5, 0.5, 2))
        c = rng.normal(size=3) + 1j * rng.normal(size=3)
        h = parse_expr(f"z+{_cstr(0.3 * c[0])}*z^2+{_cstr(0.1 * c[1])}*z^3")
        hj, _ = h.jet(z0, 10)
        w0 = hj.value
        k = rng.normal(size=4) + 1j * rng.normal(size=4)
        Z = parse_expr(f"2+{_cstr(k[0])}*z+{_cstr(0.5 * k[1])}*z^2+{_cstr(0.2 * k[2])}*z^3+{_cstr(0.1 * k[3])}*z^4")
        Zj, _ = Z.jet(w0, 10)
        worst_t = max(worst_t, d_transform_check(Zj, hj))
    worst_s = 0.0
    for _ in range(20):
        x = random_sl2(rng)
        z0 = complex(*rng.uniform(-0.5, 0.5, 2))
        h = parse_expr(f"({_cstr(x[0, 0])}*z+{_cstr(x[0, 1])})/({_cstr(x[1, 0])}*z+{_cstr(x[1, 1])})")
        hj, _ = h.jet(z0, 8)
        worst_s = max(worst_s, abs(schwarzian(hj).value))
    worst_p = 0.0
    zs = _annulus(rng, 5)
    for m, n in W_QS:
        w = WCurve(m, n)
        for z in zs:
            worst_p = max(worst_p, _rel(ddelta_chart_path(w, z).value, quadratic_ddelta(w, z).value))
    ok = worst_t < 1e-9 and worst_s < 1e-11 and worst_p < 1e-8
    return ok, f"chart law {worst_t:.3g}, Schwarzian {worst_s:.3g}, two paths {worst_p:.3g}"


SYNTH_PAIRS = [
    ("z+2", "z+1.5"),
    ("1+0.3*z^2", "0.5-z^2"),
    ("2-z+0.5*i*z^2", "1+i*z"),
    ("3+z^3", "z^2-0.7"),
    ("1.5+0.5*i*z", "0.2*z^3+1"),
]


def check_synthesis():
    rng = np.random.default_rng(SEED)
    pts = 0.5 * np.sqrt(rng.uniform(0, 1, 6)) * np.exp(2j * math.pi * rng.uniform(0, 1, 6))
    worst = 0.0
    for D, G in SYNTH_PAIRS:
        s = synthesize(D, G)
        Dx, Gx = parse_expr(D), parse_expr(G)
        for z in pts:
            worst = max(worst, _rel(quartic_delta(s, z).value, Dx(z)),
                        _rel(quadratic_ddelta(s, z).value, Gx(z)))
    s1 = synthesize(*SYNTH_PAIRS[0])
    s2 = synthesize(*SYNTH_PAIRS[0], A0=random_symplectic(rng, 0.5))
    copies = equivalent(s1, s2, [0.1, 0.2j, -0.3 + 0.1j])
    w = WCurve(5, 1)
    sw = synthesize(f"{w.delta_formula(1.0)!r}/z^4", f"{w.gamma_formula(1.0)!r}/z^2", 1.0)
    wq = equivalent(w, sw, [1.2, 0.9 + 0.3j, 1.1 - 0.4j])
    ok = worst <= 1e-6 and copies and wq
    return ok, f"max rel err {worst:.3g}, copies equivalent: {copies}, W-curve data equivalent: {wq}"


def check_contact():
    rng = np.random.default_rng(SEED)
    f5 = WCurve(5, 1)
    orders = []
    for z in _annulus(rng, 10, 0.6, 1.8):
        orders.append(contact_order(f5, osculating_cycle_model(f5, z), z, z0_b=0))
    br = Bryant("z", "z^5+z^3")
    roots = heptactic_points(br, (0.0, 0.2, 1.0), grid=10)
    hept = []
    for z in roots:
        hept.append((abs(quartic_delta(br, z).value), contact_order(br, osculating_cycle_model(br, z), z, z0_b=0)))
    ok = all(k == 5 for k in orders) and bool(hept) and all(d < 1e-10 and k >= 6 for d, k in hept)
    detail = f"generic orders {sorted(set(orders))}; heptactic roots {len(roots)}, "
    detail += ", ".join(f"|delta|={d:.2g} order={k}" for d, k in hept[:2])
    return ok, detail


def check_deformation():
    f = synthesize("1", "0.5+0.3*z")
    fh = deform4(f, "exp(0.1*z)")
    z0 = 0.3 + 0.2j
    shift = quadratic_ddelta(fh, z0).value - quadratic_ddelta(f, z0).value
    rep = verify_deformation(f, fh, z0)
    triv = verify_deformation(f, deform4(f, "1"), z0)
    ok = (abs(shift + 0.01) <= 1e-7 and rep.orth_residual < 1e-6 and rep.contact_order == 4
          and triv.contact_order == CONTACT_CAP)
    return ok, (f"shift {shift.real:.10f}, orth {rep.orth_residual:.3g}, contact {rep.contact_order}, "
                f"trivial contact {triv.contact_order}")


def _twistor_checks(rng):
    norm_err, eq_err = 0.0, 0.0
    for _ in range(20):
        xi = rng.normal(size=4) + 1j * rng.normal(size=4)
        t = twistor_project(xi)
        norm_err = max(norm_err, abs(np.linalg.norm(t) - 1))
        A = random_compact_symplectic(rng)
        M = np.column_stack([real_coords(A @ Ek @ A.T)[0] for Ek in E])
        t2 = twistor_project(A @ xi)
        img = M @ t
        eq_err = max(eq_err, min(np.linalg.norm(t2 - img), np.linalg.norm(t2 + img)))
    return norm_err, eq_err


def check_surfaces():
    rng = np.random.default_rng(SEED)
    cyc, f5 = StandardCycle(), WCurve(5, 1)
    parts = {}
    r = second_order_report(cyc, 0.5 + 0.2j, "min_r3")
    parts["R3 conformal"] = r["conformal_residual"] < 1e-6 * r["E"]
    parts["R3 harmonic"] = harmonicity_residual(cyc, 0.5 + 0.2j, "min_r3") < 1e-4
    h = [abs(second_order_report(cyc, z, "cmc1_h3")["mean_curvature"] - 1) for z in (1.0, 0.7 + 0.3j)]
    h += [abs(second_order_report(f5, z, "cmc1_h3")["mean_curvature"] - 1) for z in (1.1 + 0.3j, 0.8 - 0.5j)]
    parts["CMC-1"] = max(h) < 1e-3
    rm = [second_order_report(cyc, z, "max_r12") for z in (0.5 + 0.2j, -0.3 + 0.6j)]
    parts["maximal"] = all(x["mean_curvature"] < 1e-3 and x["causal_character"] == "spacelike" for x in rm)
    kuy = kuy_example(5)
    K = [abs(second_order_report(kuy, z, "flat_h3")["gauss_curvature"]) for z in (0.5 + 0.2j, 1.3 - 0.4j, -0.6 + 0.1j)]
    parts["flat"] = max(K) < 1e-2
    ends = detect_ends(kuy, Grid(r_in=0.3, r_out=1.6, nu=40, nv=80), "flat_h3")
    roots = np.exp(2j * np.pi * np.arange(5) / 5)
    matched = len(ends) == 5 and all(min(abs(e.center - w) for e in ends) < 1e-6 for w in roots)
    parts["5 ends"] = matched
    norm_err, eq_err = _twistor_checks(rng)
    parts["twistor"] = norm_err < 1e-9 and eq_err < 1e-8
    bad = [k for k, v in parts.items() if not v]
    detail = f"|H-1| {max(h):.2g}, |K| {max(K):.2g}, ends {len(ends)}, twistor {norm_err:.2g}/{eq_err:.2g}"
    return not bad, detail + (f"; failing {bad}" if bad else "")


def check_groups():
    rng = np.random.default_rng(SEED)
    hom, orth = 0.0, 0.0
    for _ in range(10):
        A, B = random_symplectic(rng, 0.5), random_symplectic(rng, 0.5)
        SA, SB = spin_cover(A), spin_cover(B)
        hom = max(hom, float(np.max(np.abs(spin_cover(A @ B) - SA @ SB))))
        orth = max(orth, gram_orthogonality_residual(SA))
    mult, symp = 0.0, 0.0
    for _ in range(10):
        x, y = random_sl2(rng), random_sl2(rng)
        mult = max(mult, float(np.max(np.abs(embed_sl2(x @ y) - embed_sl2(x) @ embed_sl2(y)))))
        symp = max(symp, symplectic_residual(embed_sl2(x)))
    g = gram_check()
    ok = hom < 1e-10 and orth < 1e-10 and mult < 1e-11 and symp < 1e-11 and g < 1e-14
    return ok, f"spin hom {hom:.2g}, orth {orth:.2g}, sl2 mult {mult:.2g}, symp {symp:.2g}, Gram {g:.2g}"


CHECKS = [
    (1, "W-curve quartic differential", check_quartic_wcurves),
    (2, "W-curve quadratic differential", check_quadratic_wcurves),
    (3, "bending constants", check_bending),
    (4, "cycle detection", check_cycles),
    (5, "Goursat and reparametrization invariance", check_invariance),
    (6, "projective structure law", check_projective),
    (7, "synthesis round trip", check_synthesis),
    (8, "contact orders", check_contact),
    (9, "fourth-order deformation", check_deformation),
    (10, "surface properties", check_surfaces),
    (11, "group theory", check_groups),
]


def run_check(number):
    for k, title, fn in CHECKS:
        if k == number:
            try:
                ok, detail = fn()
            except Exception as exc:  # a crash is a failure, reported as such
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            return Check(k, title, bool(ok), detail)
    raise KeyError(number)


def run_all(numbers=None):
    return [run_check(k) for k, _, _ in CHECKS if numbers is None or k in numbers]


def format_check(c):
    return f"[{'PASS' if c.passed else 'FAIL'}] {c.number:2d} {c.title}: {c.detail}"


__all__ = ["Check", "CHECKS", "run_check", "run_all", "format_check"]
