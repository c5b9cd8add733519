"""Command-line entry point: single-object queries plus the census runner.

Global flags may appear before or after the subcommand.  Every command writes
JSON (or CSV) to stdout, or to ``--out DIR`` as ``<command>.<format>``.
Exit status: 0 pass, 1 check failure, 2 config error, 3 timeout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from itertools import combinations
from pathlib import Path

from . import census
from .census import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, CensusConfig, ConfigError
from .conic import DegenerateConicError, class_record, format_point, parse_conic
from .field import FieldError, format_element, get_field, parse_element, prime_power
from .inherited import arc_report, hall_infinite_points_of, spectrum_report
from .oracles import (
    HypothesisError,
    canonical_triple,
    count_inscribed_triangles,
    count_rational_roots_nbeta,
    count_three_secant_parabolas,
    expected_triangle_count,
    nbeta_expected,
    normalize_quadratic,
    three_secant_parabola_sizes,
)
from .plane import HallPlane, incident, normalize, projective_points


def _global_flags(parser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    g = parser.add_argument_group("field and output")
    g.add_argument("--q", type=int, default=d(None), help="order q of the subfield (sets p, k)")
    g.add_argument("--p", type=int, default=d(None), help="characteristic")
    g.add_argument("--k", type=int, default=d(1), help="q = p^k")
    g.add_argument("--modulus", default=d(None),
                   help="GF(q^2) modulus as a JSON coefficient list, constant term first")
    g.add_argument("--format", choices=["json", "csv"], default=d("json"))
    g.add_argument("--out", default=d(None), help="write output files into this directory")
    g.add_argument("--jobs", type=int, default=d(1))
    g.add_argument("--no-timestamp", action="store_true", default=d(False),
                   help="omit timestamps and wall times for byte-reproducible output")
    g.add_argument("--timeout", type=float, default=d(census.DEFAULT_TIMEOUT),
                   help="per-check wall-clock budget in seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hallconics", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, help=help_, parents=[common])

    p = add("classify", "kind, infinite points and D positions of conics")
    p.add_argument("conics", nargs="+", help='e.g. "Q: 0,1,0,0,0,4" or "parabola([0,1],0,0)"')

    p = add("spectrum", "secant spectrum of conics in the Hall plane")
    p.add_argument("conics", nargs="+")

    p = add("arc", "arc, completeness and hyperoval tests for a conic's affine points")
    p.add_argument("conic")
    p.add_argument("--with-infinite", action="store_true",
                   help="add the conic's infinite points (they must lie off D)")

    p = add("sk-count", "inscribed triangles of a PG(2,q) conic on a triple of a line")
    p.add_argument("conic", help="conic with GF(q) coefficients")
    p.add_argument("--line", required=True, help="line coordinates as a JSON triple")
    p.add_argument("--triple", nargs=3, metavar="P", help="points as JSON triples")

    p = add("parabola-count", "parabolas meeting a new line exactly in a given triple (odd q)")
    p.add_argument("--points", nargs=3, metavar="P",
                   help="three affine points as JSON pairs; default the canonical triple")

    p = add("nbeta", "GF(q)-rational roots of the N_beta cubic (even q)")
    p.add_argument("betas", nargs="*", help="element literals; default every nonzero beta")

    p = add("normalform", "Moebius normal form of X^2 + beta X + gamma (even q)")
    p.add_argument("beta")
    p.add_argument("gamma")

    p = add("lines", "dump every Hall line as JSON lines")
    p.add_argument("--emit-points", action="store_true")

    p = add("census", "run a census config")
    p.add_argument("config", help="JSON config file")

    p = add("verify", "run every registered check and print a pass/fail matrix")
    p.add_argument("qs", nargs="+", type=int)

    p = add("open-question", "empirical (q, s, a3, a4) table for odd q")
    p.add_argument("qs", nargs="+", type=int)
    return parser


# -- helpers --------------------------------------------------------------------------

def _field(args):
    modulus = tuple(json.loads(args.modulus)) if args.modulus else None
    if args.q is not None:
        p, k = prime_power(args.q)
    elif args.p is not None:
        p, k = args.p, args.k
    else:
        raise ConfigError("give --q or --p/--k")
    return get_field(p, k, modulus)


def _json_arg(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"bad JSON literal {text!r}: {exc}") from None


def _point(F, text, size):
    vals = _json_arg(text)
    if not isinstance(vals, list) or len(vals) != size:
        raise ConfigError(f"expected {size} coordinates in {text!r}")
    return tuple(parse_element(F, v) for v in vals)


def _to_csv(payload) -> str:
    rows = payload if isinstance(payload, list) else [payload]
    cols: list[str] = []
    for r in rows:
        cols += [c for c in r if c not in cols]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([json.dumps(r[c], sort_keys=True) if isinstance(r.get(c), (list, dict))
                    else r.get(c, "") for c in cols])
    return buf.getvalue()


def _emit(args, payload, stdout):
    text = (json.dumps(payload, indent=1, sort_keys=True) + "\n" if args.format == "json"
            else _to_csv(payload))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}.{args.format}").write_text(text)
    else:
        stdout.write(text)


# -- commands -------------------------------------------------------------------------

def cmd_classify(args, stdout):
    F = _field(args)
    out = []
    for lit in args.conics:
        K = parse_conic(F, lit)
        rec = {"conic": lit, **class_record(K), "kind_from_quadratic_part": K.kind_from_quadratic_part()}
        if F.p != 2:
            ext, internal, on = K.classify_derivation_set()
            rec["D"] = {"external": ext, "internal": internal, "on": on}
        out.append(rec)
    _emit(args, out, stdout)
    return EXIT_OK


def cmd_spectrum(args, stdout):
    F = _field(args)
    _emit(args, [spectrum_report(parse_conic(F, lit)) for lit in args.conics], stdout)
    return EXIT_OK


def cmd_arc(args, stdout):
    F = _field(args)
    K = parse_conic(F, args.conic)
    H = HallPlane.of(F)
    inf = hall_infinite_points_of(K) if args.with_infinite else []
    rep = arc_report(K.affine_points, H, inf)
    _emit(args, {
        "inputs": {"conic": args.conic, "with_infinite": args.with_infinite},
        "size": rep.size, "is_arc": rep.is_arc, "is_complete": rep.is_complete,
        "max_collinear": rep.max_collinear, "extension_points": len(rep.extension_points),
        "hyperoval_reachable": rep.hyperoval_reachable,
    }, stdout)
    return EXIT_OK


def cmd_sk_count(args, stdout):
    F = _field(args)
    K = parse_conic(F, args.conic, subplane=True)
    r = normalize(F, _point(F, args.line, 3))
    if args.triple:
        triples = [tuple(normalize(F, _point(F, t, 3)) for t in args.triple)]
    else:
        off = [P for P in projective_points(F, subplane=True)
               if incident(F, r, P) and not K.contains(P)]
        triples = list(combinations(off, 3))
    out, ok = [], True
    for T in triples:
        res = count_inscribed_triangles(K, r, T)
        exp = expected_triangle_count(K, r, T)
        ok &= exp is None or exp == res.count
        out.append({
            "inputs": {"triple": [format_point(F, P) for P in T]},
            "count": res.count, "expected": exp,
            "witnesses": [[format_point(F, P) for P in tri] for tri in res.triangles],
        })
    _emit(args, out, stdout)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_parabola_count(args, stdout):
    F = _field(args)
    H = HallPlane.of(F)
    if args.points:
        pts = [_point(F, t, 2) for t in args.points]
        L = H.line_through(pts[0], pts[1])
        if not hasattr(L, "direction"):
            raise ConfigError("the points must lie on a new line")
    else:
        L, pts = canonical_triple(F)
    count = count_three_secant_parabolas(H, L, *pts)
    sizes = three_secant_parabola_sizes(H, L, *pts)
    _emit(args, {
        "inputs": {"points": [[format_element(F, c) for c in P] for P in pts]},
        "count": count, "expected": 3 * (F.q - 1),
        "sizes": {str(k): v for k, v in sorted(sizes.items(), key=str)},
    }, stdout)
    return EXIT_OK if count == 3 * (F.q - 1) else EXIT_FAIL


def cmd_nbeta(args, stdout):
    F = _field(args)
    betas = [parse_element(F, _json_arg(b)) for b in args.betas] or list(F.nonzero())
    out, ok = [], True
    for b in betas:
        n, e = count_rational_roots_nbeta(F, b), nbeta_expected(F, b)
        ok &= n == e
        out.append({"inputs": {"beta": format_element(F, b)}, "count": n, "expected": e})
    _emit(args, out, stdout)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_normalform(args, stdout):
    F = _field(args)
    beta = parse_element(F, _json_arg(args.beta))
    gamma = parse_element(F, _json_arg(args.gamma))
    inputs = {"beta": format_element(F, beta), "gamma": format_element(F, gamma)}
    try:
        M, w = normalize_quadratic(F, beta, gamma)
    except HypothesisError as exc:
        _emit(args, {"inputs": inputs, "error": str(exc), "condition": exc.condition}, stdout)
        return EXIT_FAIL
    verified = M.transform_quadratic(beta, gamma) == (1, w)
    _emit(args, {
        "inputs": inputs,
        "map": [format_element(F, c) for c in (M.a, M.b, M.c, M.d)],
        "w": format_element(F, w), "verified": verified,
    }, stdout)
    return EXIT_OK if verified else EXIT_FAIL


def cmd_lines(args, stdout):
    H = HallPlane.of(_field(args))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "lines.jsonl", "w") as fh:
            H.dump_lines(fh, args.emit_points)
    else:
        H.dump_lines(stdout, args.emit_points)
    return EXIT_OK


def cmd_census(args, stdout):
    config = CensusConfig.load(args.config)
    explicit = {a for a in ("out", "format", "jobs", "timeout") if getattr(args, a) != PARSER_DEFAULTS[a]}
    for name in explicit:
        setattr(config, name, getattr(args, name))
    if args.no_timestamp:
        config.timestamp = False
    results, code = census.run_census(config)
    if not config.out:
        stdout.write(census.render_results(results, config.format, config.timestamp))
    return code


def cmd_verify(args, stdout):
    summary, results = census.verify_all(args.qs, args.jobs, args.timeout, stream=stdout)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"verify.{args.format}").write_text(
            census.render_results(results, args.format, not args.no_timestamp))
    return census.exit_code(results)


def cmd_open_question(args, stdout):
    text = census.emit_open_question_table(args.qs)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "open_question.csv").write_text(text)
    else:
        stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "spectrum": cmd_spectrum,
    "arc": cmd_arc,
    "sk-count": cmd_sk_count,
    "parabola-count": cmd_parabola_count,
    "nbeta": cmd_nbeta,
    "normalform": cmd_normalform,
    "lines": cmd_lines,
    "census": cmd_census,
    "verify": cmd_verify,
    "open-question": cmd_open_question,
}

PARSER_DEFAULTS = {"out": None, "format": "json", "jobs": 1, "timeout": census.DEFAULT_TIMEOUT}


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, stdout)
    except (ConfigError, FieldError, DegenerateConicError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
