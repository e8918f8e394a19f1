"""Command line front end.  stdout carries one JSON report; messages go to stderr."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import classify as cl
from . import isometry as iso
from . import locus as lo
from . import nets
from .germcore import GermArityError, GermParseError, NotCorankOne, corank_at_origin, jet_of, parse_germ

SCHEMA = 1

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CORANK = 3
EXIT_WRITE = 4
EXIT_UNSUPPORTED = 5
EXIT_CONTRACT = 6

LIFT_TOL = 1e-9


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def num(v):
    """JSON value for a scalar: exact rationals become "p/q" strings."""
    if isinstance(v, bool):
        return v
    if isinstance(v, (int, Fraction)):
        return str(Fraction(v))
    return float(v)


def matrix(m):
    return [[num(v) for v in row] for row in m]


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {exc.strerror}") from None


def load_germ(path: str):
    text = _read_text(path).strip()
    try:
        g = parse_germ(text)
    except GermParseError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from None
    cr = corank_at_origin(g)
    if cr != 1:
        raise CliError(EXIT_CORANK, f"{path}: corank {cr} at the origin, expected 1")
    return g


def _write(path: str, data: bytes) -> str:
    try:
        p = Path(path)
        p.write_bytes(data)
    except OSError as exc:
        raise CliError(EXIT_WRITE, f"cannot write {path}: {exc.strerror}") from None
    return str(p)


def _grid(text: str | None, cmax: float, domain: str = "cylinder") -> lo.GridSpec:
    nt, ns = 180, 90
    if text:
        try:
            a, b = text.lower().split("x")
            nt, ns = int(a), int(b)
        except ValueError:
            raise CliError(EXIT_PARSE, f"bad --grid {text!r}, expected NxM") from None
    try:
        return lo.GridSpec(nt, ns, cmax, domain)
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"bad grid: {exc}") from None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def classification_report(g) -> dict:
    j = jet_of(g)
    orbit = cl.classify_orbit(j)
    rep = {
        "germ": g.format(),
        "orbit": orbit.value,
        "normal_form": orbit.normal_form,
        "D": num(j.D),
        "alpha_rank": j.alpha_rank,
        "non_degenerate": cl.is_non_degenerate(j),
        "point_type": lo.point_type(g)[1],
    }
    try:
        rep["topological_type"] = cl.locus_type_exact(j).value
    except cl.NotSpecialClass:
        rep["topological_type"] = "NotSpecialClass"
    if j.is_exact:
        w = cl.reduce_to_orbit_normal_form(j)
        rep["witness"] = {
            "source_change": matrix(w.source_change),
            "target_change": matrix(w.target_change),
            "planar_correction": matrix(w.planar_correction),
        }
    return rep


def cmd_classify(args) -> dict:
    return classification_report(load_germ(args.germ))


def cmd_locus(args) -> dict:
    g = load_germ(args.germ)
    spec = _grid(args.grid, args.cmax)
    sample = lo.sample_singular_locus(g, spec, label=g.format())
    hull = lo.affine_hull_of_locus(g)
    rep = {
        "germ": g.format(),
        "grid": spec.describe(),
        "points": int(len(sample.points)),
        "fingerprint": sample.fingerprint,
        "affine_hull_dimension": hull.dimension,
        "point_type": lo.point_type(g)[1],
        "artifacts": [],
    }
    if args.degree is not None:
        ps = lo.default_rational_params(max(8, args.degree + 6))
        pts = lo.sample_singular_exact(g, ps, ps)
        forms = lo.vanishing_forms(pts, args.degree)
        rep["vanishing_forms"] = {"degree": args.degree, "dimension": len(forms),
                                  "basis": [f.format(lo.NORMAL_NAMES) for f in forms]}
    if args.out:
        data = lo.export_mesh(sample, args.format, g.format())
        rep["artifacts"].append(_write(args.out, data))
    return rep


def cmd_lift(args) -> dict:
    g = load_germ(args.germ)
    lift = lo.lift_to_regular(g)
    spec = _grid(args.grid, args.cmax, "sphere")
    res = lo.blowup_residual(g, spec)
    ts = lo.default_rational_params(12)
    exact = lo.blowup_residual_exact(g, ts, ts) if jet_of(g).is_exact else None
    rep = {
        "germ": g.format(),
        "lift": lift.format(),
        "lift_point_type": lo.point_type(lift)[1],
        "blowup_residual": res,
        "blowup_residual_exact": None if exact is None else num(exact),
        "grid": spec.describe(),
    }
    if res > LIFT_TOL:
        rep["contract_violation"] = True
        raise _ReportExit(rep, EXIT_CONTRACT, f"blow-up residual {res:.3g} exceeds {LIFT_TOL:g}")
    return rep


def _parse_cg(tokens, c_opt, g_opt) -> tuple[Fraction, Fraction]:
    vals = {"c": c_opt, "g": g_opt}
    for t in tokens or []:
        if "=" not in t:
            raise CliError(EXIT_PARSE, f"expected c=VALUE or g=VALUE, got {t!r}")
        k, v = t.split("=", 1)
        vals[k.strip()] = v.strip()
    try:
        return Fraction(vals["c"]), Fraction(vals["g"])
    except (TypeError, ValueError, ZeroDivisionError, KeyError):
        raise CliError(EXIT_PARSE, "label needs numeric c and g") from None


def cmd_net(args) -> dict:
    if args.net_command == "discriminant":
        try:
            n = nets.parse_net(args.net)
        except (GermParseError, nets.NetError) as exc:
            raise CliError(EXIT_PARSE, str(exc)) from None
        d = nets.discriminant_cubic(n)
        content, prim = nets.primitive_part(d)
        return {
            "net": n.format(),
            "discriminant": nets.format_cubic(d),
            "content": num(content),
            "primitive": nets.format_cubic(prim),
            "monge_point_type": nets.point_type(nets.net_to_monge(n))[1],
        }
    if args.net_command == "label":
        c, g = _parse_cg(args.params, args.c, args.g)
        return {"c": num(c), "g": num(g), "region": nets.table2_region(c, g),
                "label": nets.table2_label(c, g)}
    r = nets.verify_example44()
    inv = lambda x: {"point_type": x.point_type, "affine_hull_dimension": x.hull_dimension,
                     "degree2_forms": x.degree2_forms, "degree4_forms": x.degree4_forms}
    return {
        "chain_verified": r.chain_verified,
        "chain": [{"step": s.description, "source": matrix(s.source), "target": matrix(s.target),
                   "result": s.result.format("()"), "verified": s.verified} for s in r.chain],
        "to_F_a_error": r.fa_error,
        "discriminant_reduced": nets.format_cubic(r.discriminant_target),
        "discriminant_F_a": nets.format_cubic(r.discriminant_fa),
        "original": inv(r.original),
        "reduced": inv(r.reduced),
        "invariants_distinguish": r.invariants_distinguish,
    }


def cmd_iso(args) -> dict:
    gA, gB = load_germ(args.germ_a), load_germ(args.germ_b)
    try:
        v = iso.check_jet_isometry_equivalence(gA, gB)
        rep = {"germ_a": gA.format(), "germ_b": gB.format(), **v.to_dict()}
        if args.loci:
            rep["locus_isometries"] = [m.tolist() for m in iso.locus_isometries(gA, gB)]
        return rep
    except iso.UnsupportedOrbit as exc:
        raise CliError(EXIT_UNSUPPORTED, str(exc)) from None


class _ReportExit(Exception):
    def __init__(self, report: dict, code: int, message: str):
        self.report, self.code = report, code
        super().__init__(message)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="corank1", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="orbit, degeneracy and locus type of a germ")
    c.add_argument("germ", help="file holding a germ (x, y, f1, f2, f3); '-' for stdin")
    c.set_defaults(func=cmd_classify)

    loc = sub.add_parser("locus", help="sample the curvature locus and export a mesh")
    loc.add_argument("germ")
    loc.add_argument("--grid", help="NxM samples (theta x c), default 180x90")
    loc.add_argument("--cmax", type=float, default=10.0)
    loc.add_argument("--format", choices=("obj", "csv"), default="obj")
    loc.add_argument("--out", help="mesh output path")
    loc.add_argument("--degree", type=int, help="also fit vanishing forms of this degree")
    loc.set_defaults(func=cmd_locus)

    li = sub.add_parser("lift", help="regular lift to R^6 and the blow-up residual")
    li.add_argument("germ")
    li.add_argument("--grid")
    li.add_argument("--cmax", type=float, default=10.0)
    li.set_defaults(func=cmd_lift)

    n = sub.add_parser("net", help="nets of quadrics")
    nsub = n.add_subparsers(dest="net_command", required=True)
    d = nsub.add_parser("discriminant")
    d.add_argument("net", help="three quadratic forms, e.g. '<x^2, y^2, z^2 + 2*x*y>'")
    lab = nsub.add_parser("label")
    lab.add_argument("params", nargs="*", help="c=VALUE g=VALUE")
    lab.add_argument("--c")
    lab.add_argument("--g")
    nsub.add_parser("example44")
    n.set_defaults(func=cmd_net)

    i = sub.add_parser("iso", help="isometry equivalence of two XZ_YZ_Z2 germs")
    i.add_argument("germ_a")
    i.add_argument("germ_b")
    i.add_argument("--loci", action="store_true", help="also list the locus isometries")
    i.set_defaults(func=cmd_iso)
    return p


def _emit(report: dict, command: str) -> None:
    out = {"schema": SCHEMA, "command": command, **report}
    sys.stdout.write(json.dumps(out, indent=2, sort_keys=True) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except _ReportExit as exc:
        _emit(exc.report, args.command)
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except lo.EmptyGrid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    _emit(report, args.command)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
