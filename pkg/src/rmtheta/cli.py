"""Command-line interface.

Exit codes: 0 success (all relations pass / decision positive / candidates
found), 1 semantic failure (a relation fails / negative decision / empty
candidate list), 2 input or usage error.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources

from . import relations as rel
from . import pipeline as pl
from .field import Field, FieldError
from .relations import RelationError
from .pipeline import PipelineError, SearchConfig


def _data_file(name: str, override_dir=None):
    if override_dir is not None:
        return open(f"{override_dir}/{name}", "r", encoding="utf-8").read()
    return (resources.files("rmtheta") / "data" / name).read_text()


def _load_field(args) -> Field:
    return Field.from_file(args.field,
                           check_irreducible=args.check_irreducible)


def _write_out(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_relations(args) -> int:
    rs = rel.relation_set(args.set)
    _write_out(args, rel.serialize_relations(rs))
    return 0


def cmd_verify(args) -> int:
    field = _load_field(args)
    point = pl.ThetaPoint4.from_file(args.point, field)
    rs = rel.relation_set(args.set)
    needs_b = any(v[0] == "b" for r in rs for v in r.variables())
    asg = point.correspondence_assignment() if needs_b else point.assignment()
    report = rel.verify(asg, rs, field)
    print("\n".join(report.lines()))
    return 0 if report.overall else 1


def cmd_thomae(args) -> int:
    field = _load_field(args)
    curve = pl.RosenhainCurve.from_file(args.curve, field)
    r = pl.thomae_squares(curve.branch_points())
    for k, v in enumerate(r, 1):
        print(f"r{k} {v}")
    return 0


def cmd_down(args) -> int:
    field = _load_field(args)
    point = pl.ThetaPoint4.from_file(args.point, field)
    data = pl.level4_to_level2(point)
    names = ("b00", "b01", "b10", "b11")
    for k in range(4):
        print(f"square {names[k]} {data.squares[k]}")
    for (i, j) in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
        print(f"product {names[i]}*{names[j]} {data.products[(i, j)]}")
    points = pl.level2_point_from_data(data)
    text = "".join(p.serialize() for p in points)
    if args.out:
        _write_out(args, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_up(args) -> int:
    field = _load_field(args)
    point = pl.ThetaPoint2.from_file(args.point, field)
    candidates = pl.level2_to_level4(point)
    blocks = []
    for k, cand in enumerate(candidates, 1):
        blocks.append(f"# candidate {k}\n" + cand.serialize())
    _write_out(args, "".join(blocks))
    print(f"{len(candidates)} candidate(s)", file=sys.stderr)
    return 0 if candidates else 1


def cmd_rosenhain(args) -> int:
    field = _load_field(args)
    point = pl.ThetaPoint2.from_file(args.point, field)
    curves = pl.rosenhain_from_level2(point)
    text = "".join(c.serialize() for c in curves)
    _write_out(args, text)
    return 0 if curves else 1


def cmd_rm_test(args) -> int:
    field = _load_field(args)
    curve = pl.RosenhainCurve.from_file(args.curve, field)
    config = SearchConfig(max_orderings=args.max_orderings,
                          max_candidates=args.max_candidates,
                          auto_extend=args.auto_extend)
    decision = pl.rm_test(curve, config)
    if decision.positive:
        print("POSITIVE")
        text = decision.witness.serialize()
        if args.out:
            _write_out(args, text)
        else:
            sys.stdout.write(text)
        return 0
    print("NEGATIVE")
    print(f"# orderings {decision.orderings_tried}"
          f" candidates {decision.candidates_checked}"
          + (" limit-reached" if decision.limit_reached else ""))
    return 1


def cmd_selftest_example(args) -> int:
    """End-to-end checks of the bundled example data (A1-A4)."""
    try:
        field_text = _data_file("example_field_p8.txt", args.data_dir)
        point_text = _data_file("example_point.txt", args.data_dir)
        curve_text = _data_file("example_curve_p8.txt", args.data_dir)
    except OSError as exc:
        print(f"missing bundled data: {exc}", file=sys.stderr)
        return 2
    field = Field.from_spec(field_text)
    point = pl.ThetaPoint4.parse(point_text, field)
    curve = pl.RosenhainCurve.parse(curve_text, field)

    # A1: the bundled point satisfies the moduli and RM relations exactly
    for set_name in ("mumford", "rm"):
        report = rel.verify(point.assignment(), rel.relation_set(set_name),
                            field)
        if not report.overall:
            failing = next(rid for rid, ok in report.entries if not ok)
            print(f"A1 FAIL: relation {failing} ({set_name}) nonzero")
            return 1
    print("A1 ok: bundled point satisfies mumford and rm exactly")

    # A2: the three explicit quadrics lie in the span of the generated set
    rm_set = rel.rm_relations()
    for quad in rel.humbert_quadrics():
        if not rel.span_contains(quad, rm_set):
            print(f"A2 FAIL: {quad.rid} outside the rational span")
            return 1
    print("A2 ok: explicit quadrics inside the rational span")

    # A3: combinatorial constants
    from .indices import admissible_triples, equivalent_triple_pairs
    checks = (
        ("|triples|", len(admissible_triples()), 256),
        ("|pairs|", len(equivalent_triple_pairs()), 1920),
        ("|bilinear|", len(rel.rm_bilinear_relations()), 24),
        ("|rm|", len(rm_set), 3),
        ("rank", rel.span_rank(rm_set), 3),
    )
    for name, got, want in checks:
        if got != want:
            print(f"A3 FAIL: {name} = {got}, expected {want}")
            return 1
    print("A3 ok: combinatorial constants match")

    # A4: Rosenhain roundtrip reproduces the bundled invariants
    data = pl.level4_to_level2(point)
    b = pl.level2_point_from_data(data)[0]
    curves = pl.rosenhain_from_level2(b)
    if not any(tuple(c.lambdas) == tuple(curve.lambdas) for c in curves):
        print("A4 FAIL: bundled invariants not among recovered curves")
        return 1
    print("A4 ok: recovered Rosenhain invariants contain the bundled triple")
    return 0


def _add_common(parser, field=False, point=False, curve=False, out=False):
    if field:
        parser.add_argument("--field", required=True, help="field file")
        parser.add_argument("--check-irreducible", action="store_true",
                            help="verify the extension modulus is irreducible")
    if point:
        parser.add_argument("--point", required=True, help="point file")
    if curve:
        parser.add_argument("--curve", required=True, help="curve file")
    if out:
        parser.add_argument("--out", default=None, help="output file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmtheta",
        description="theta relations and the genus-2 pipeline for "
                    "sqrt(3) real multiplication")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("relations", help="write a relation family")
    p.add_argument("--set", required=True, choices=rel.RELATION_SET_NAMES)
    _add_common(p, out=True)
    p.set_defaults(func=cmd_relations)

    p = sub.add_parser("verify", help="evaluate a relation family at a point")
    p.add_argument("--set", required=True, choices=rel.RELATION_SET_NAMES)
    _add_common(p, field=True, point=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("thomae", help="branch-difference products of a curve")
    _add_common(p, field=True, curve=True)
    p.set_defaults(func=cmd_thomae)

    p = sub.add_parser("down", help="level-4 point to level-2 data and point")
    _add_common(p, field=True, point=True, out=True)
    p.set_defaults(func=cmd_down)

    p = sub.add_parser("up", help="level-2 point to level-4 candidates")
    _add_common(p, field=True, point=True, out=True)
    p.set_defaults(func=cmd_up)

    p = sub.add_parser("rosenhain", help="recover Rosenhain invariants")
    _add_common(p, field=True, point=True, out=True)
    p.set_defaults(func=cmd_rosenhain)

    p = sub.add_parser("rm-test", help="decide sqrt(3) real multiplication")
    _add_common(p, field=True, curve=True, out=True)
    p.add_argument("--max-orderings", type=int, default=120)
    p.add_argument("--max-candidates", type=int, default=100000)
    p.add_argument("--auto-extend", action="store_true")
    p.set_defaults(func=cmd_rm_test)

    p = sub.add_parser("selftest-example",
                       help="run the bundled-example acceptance checks")
    p.add_argument("--data-dir", default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest_example)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FieldError, RelationError, PipelineError, OSError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
