"""Command-line interface.

Exit codes: 0 success, 1 mathematical validation failure, 2 I/O or format
error.  Diagnostics go to stderr; results go to stdout or ``--out``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .bilinear import ContinuousQC, extend, restrict
from .decomposition import minkowski_norm, minkowski_witness, split_pos_neg, two_copula_split
from .domination import dominate
from .errors import FormatError, IsCopula, MathError, QuasiCopulaError
from .gallery import GALLERY_NAMES, lookup
from .grid import GridFunction, equidistant_mesh, validate
from .io import (
    MASS_SCHEMA,
    dumps,
    emit_csv,
    format_decimal,
    format_rational,
    grid_to_json,
    mass_rows,
    parse_grid,
    write_json,
)
from .series import error_certificate, expand
from .span import MeshFamily, alpha_sequence, verdict

EXIT_OK, EXIT_MATH, EXIT_IO = 0, 1, 2
GALLERY_PREFIX = "gallery:"
DEFAULT_MESH = 4


class UsageError(FormatError):
    pass


def _load(source: str) -> GridFunction | ContinuousQC:
    if source.startswith(GALLERY_PREFIX):
        return lookup(source[len(GALLERY_PREFIX):])
    return parse_grid(source)


def load_discrete(source: str, mesh_n: int | None = None) -> GridFunction:
    """A grid input; continuous gallery members are restricted to an equidistant mesh."""
    obj = _load(source)
    if isinstance(obj, GridFunction):
        if mesh_n is not None:
            return restrict(extend(obj), equidistant_mesh(mesh_n))
        return obj
    return restrict(obj, equidistant_mesh(mesh_n or DEFAULT_MESH))


def load_continuous(source: str) -> ContinuousQC:
    obj = _load(source)
    if isinstance(obj, GridFunction):
        return extend(obj, name=source)
    return obj


def _emit(obj: dict, out: str | None) -> None:
    if out:
        write_json(out, obj)
    else:
        sys.stdout.write(dumps(obj))


# -- verbs ------------------------------------------------------------------


def cmd_validate(args) -> int:
    G = load_discrete(args.input, args.mesh)
    report = validate(G)
    _emit(report.as_dict(), args.out)
    return EXIT_OK if report.is_quasi_copula else EXIT_MATH


def cmd_decompose(args) -> int:
    Q = load_discrete(args.input, args.mesh)
    base = parse_grid(args.base) if args.base else None
    pair = two_copula_split(Q, base)
    _emit(
        {
            "alpha1": format_rational(pair.alpha1),
            "C1": grid_to_json(pair.C1),
            "alpha2": format_rational(pair.alpha2),
            "C2": grid_to_json(pair.C2),
        },
        args.out,
    )
    return EXIT_OK


def cmd_dominate(args) -> int:
    A = load_discrete(args.input, args.mesh)
    res = dominate(A)
    _emit(
        {
            "alpha": format_rational(res.alpha),
            "attained_by": {"strip": res.attained_by[0], "index": res.attained_by[1]},
            "lower": grid_to_json(res.lower),
            "upper": grid_to_json(res.upper),
            "witness": grid_to_json(res.witness),
        },
        args.out,
    )
    return EXIT_OK


def cmd_norm(args) -> int:
    Q = load_discrete(args.input, args.mesh)
    norm = minkowski_norm(Q)
    try:
        w = minkowski_witness(Q)
        body = {
            "norm": format_rational(w.norm),
            "s": format_rational(w.s),
            "A": grid_to_json(w.A),
            "t": format_rational(w.t),
            "B": grid_to_json(w.B),
            "is_copula": False,
        }
    except IsCopula:
        body = {
            "norm": format_rational(norm),
            "s": "1",
            "A": grid_to_json(Q),
            "t": "0",
            "B": None,
            "is_copula": True,
        }
    pos, neg = split_pos_neg(Q)
    body["total_positive_mass"] = format_rational(pos.total())
    body["total_negative_mass"] = format_rational(-neg.total())
    _emit(body, args.out)
    return EXIT_OK


def cmd_approximate(args) -> int:
    Q = load_continuous(args.input)
    series = expand(Q, args.stages)
    out = Path(args.out)
    terms = [
        {
            "stage": t.stage,
            "role": t.role,
            "gamma": format_decimal(float(t.gamma)),
            "K_n": t.K,
        }
        for t in series.terms()
    ]
    stages = [
        {
            "n": s.n,
            "alpha": format_rational(s.alpha),
            "beta": format_rational(s.beta),
        }
        for s in series.stages
    ]
    telescopes = [
        {
            "n": t.n,
            "zeta": format_rational(t.zeta),
            "xi": format_rational(t.xi),
            "K_n": K,
            "identity_error_approx": format_decimal(t.identity_error),
        }
        for t, K in zip(series.telescopes, series.K)
    ]
    manifest = {
        "target": Q.name,
        "stages": args.stages,
        "terms_total": len(series),
        "stage_coefficients": stages,
        "telescopes": telescopes,
        "terms": terms,
    }
    write_json(out / "manifest.json", manifest)
    errors = [error_certificate(Q, series, p, args.grid) for p in range(1, args.stages + 1)]
    emit_csv(
        [(e.stage, e.bound, e.measured) for e in errors],
        ("stage", "bound", "measured_sup_error"),
        out / "stage_errors.csv",
    )
    sys.stdout.write(
        dumps(
            {
                "manifest": str(out / "manifest.json"),
                "stage_errors": str(out / "stage_errors.csv"),
                "terms_total": len(series),
                "max_measured_error_approx": format_decimal(max(e.measured for e in errors)),
            }
        )
    )
    return EXIT_OK


def cmd_probe(args) -> int:
    Q = load_continuous(args.input)
    if args.family == "dyadic":
        family = MeshFamily.dyadic()
    elif args.base:
        family = MeshFamily.aligned(parse_grid(args.base).mesh)
    else:
        family = MeshFamily.aligned_to(Q)
    alphas = alpha_sequence(Q, family, args.depth)
    out = Path(args.out)
    emit_csv(
        [(a.level, a.max_gap, a.alpha, args.family) for a in alphas],
        ("level", "max_gap", "alpha_n", "family"),
        out / "probe.csv",
    )
    report = verdict(alphas)
    ev = report.evidence
    body = {
        "target": Q.name,
        "family": args.family,
        "depth": args.depth,
        "verdict": report.verdict,
        "heuristic": True,
        "alpha_estimate": format_rational(report.alpha_estimate),
        "norm_estimate": format_rational(report.norm_estimate),
        "evidence": {
            "rule": ev["rule"],
            "last_levels": ev["last_levels"],
            "last_alphas": [format_rational(a) for a in ev["last_alphas"]],
            "last_increments": [format_rational(d) for d in ev["last_increments"]],
            "sup_alpha": format_rational(ev["sup_alpha"]),
        },
    }
    write_json(out / "verdict.json", body)
    sys.stdout.write(dumps(body))
    return EXIT_OK


def cmd_gallery(args) -> int:
    if args.action == "list":
        sys.stdout.write("\n".join(GALLERY_NAMES) + "\n")
        return EXIT_OK
    if not args.name:
        raise UsageError("gallery emit needs a name")
    G = load_discrete(GALLERY_PREFIX + args.name, args.mesh)
    _emit(grid_to_json(G, args.form), args.out)
    if args.csv:
        emit_csv(mass_rows(G), MASS_SCHEMA, args.csv)
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="quasicopula",
        description="Decompose, dominate and approximate (quasi-)copulas.",
        epilog="Inputs are grid JSON files or gallery:<name> (see 'gallery list').",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True)

    def discrete(name, help_, fn):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("input", help="grid JSON path or gallery:<name>")
        sp.add_argument("--mesh", type=_positive_int, help="restrict to the n-equidistant mesh")
        sp.add_argument("--out", help="write JSON here instead of stdout")
        sp.set_defaults(func=fn)
        return sp

    discrete("validate", "check the discrete (quasi-)copula axioms", cmd_validate)
    dec = discrete("decompose", "write Q as alpha1*C1 + alpha2*C2", cmd_decompose)
    dec.add_argument("--base", help="grid JSON of a base copula with positive cells")
    discrete("dominate", "optimal mass domination constant and extremal copulas", cmd_dominate)
    discrete("norm", "exact Minkowski norm with witness", cmd_norm)

    ap = sub.add_parser("approximate", help="copula series with per-stage error certificates")
    ap.add_argument("input")
    ap.add_argument("--stages", type=_positive_int, required=True)
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--grid", type=_positive_int, default=100, help="sup-error grid resolution k")
    ap.set_defaults(func=cmd_approximate)

    pr = sub.add_parser("probe", help="strip-ratio sequence and span verdict")
    pr.add_argument("input")
    pr.add_argument("--depth", type=_positive_int, required=True)
    pr.add_argument("--family", choices=("dyadic", "aligned"), default="dyadic")
    pr.add_argument("--base", help="grid JSON whose mesh the aligned family refines")
    pr.add_argument("--out", required=True, help="output directory")
    pr.set_defaults(func=cmd_probe)

    ga = sub.add_parser("gallery", help="list or emit gallery members")
    ga.add_argument("action", choices=("list", "emit"))
    ga.add_argument("name", nargs="?")
    ga.add_argument("--mesh", type=_positive_int)
    ga.add_argument("--form", choices=("values", "mass"), default="values")
    ga.add_argument("--out")
    ga.add_argument("--csv", help="also write per-cell masses as CSV")
    ga.set_defaults(func=cmd_gallery)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help, 2 for usage errors
        return int(exc.code or 0)
    if getattr(args, "base", None) and args.verb == "probe" and args.family != "aligned":
        print("error: --base only applies to --family aligned", file=sys.stderr)
        return EXIT_IO
    try:
        return args.func(args)
    except MathError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except QuasiCopulaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH


def main() -> None:
    sys.exit(run())
