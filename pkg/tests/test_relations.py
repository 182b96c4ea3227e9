import itertools

import pytest

import rmtheta as rt
from rmtheta.relations import (DegreeMismatch, MissingVariable, Relation,
                               RelationError, RelationSyntaxError,
                               humbert_quadrics, mumford_relations,
                               parse_relations, relation_set,
                               rm_bilinear_relations, rm_relations,
                               serialize_relations, span_contains, span_rank,
                               split_product_relation, split_square_relations,
                               verify)


def _a(i, j):
    return Relation.variable("a", i, j)


def _all_ones_assignment(field):
    asg = {("a", i, j): field.one() for i, j in
           itertools.product(range(4), repeat=2)}
    asg.update({("b", i, j): field.one() for i, j in
                itertools.product(range(4), repeat=2)})
    return asg


def test_normalize_removes_content_and_fixes_sign():
    p = 2 * _a(0, 0) ** 2 - 2 * _a(0, 1) ** 2
    n = p.normalized()
    assert n == _a(0, 0) ** 2 - _a(0, 1) ** 2
    m = (-p).normalized()
    assert m == n  # leading coefficient forced positive


def test_normalize_idempotent():
    for r in list(mumford_relations()) + list(rm_relations()):
        assert r.normalized() == r


def test_poly_arithmetic_basics():
    p = _a(0, 0) * _a(0, 1)
    assert p.degree() == 2
    assert (p - p).is_zero()
    assert (p + (-p)).is_zero()
    assert (3 * p - p) == 2 * p


def test_mumford_relations_shape():
    mum = mumford_relations()
    assert len(mum) == 26
    degrees = sorted({r.degree() for r in mum})
    assert degrees == [1, 4]
    assert sum(1 for r in mum if r.degree() == 4) == 20
    assert all(r.is_homogeneous() for r in mum)
    linear = _a(1, 1) - _a(3, 3)
    assert any(r == linear.normalized() for r in mum)


def test_mumford_all_ones_passes(F7):
    # the all-ones point is the self-product of the all-ones elliptic null,
    # so every relation vanishes there; outcome frozen from a direct run
    report = verify(_all_ones_assignment(F7), mumford_relations(), F7)
    assert report.overall


def test_bilinear_relations_shape():
    bil = rm_bilinear_relations()
    assert len(bil) == 24  # frozen generator count
    for r in bil:
        assert r.is_homogeneous() and r.degree() == 2
        for mono in r.terms:
            fams = sorted(fam for (fam, _, _), e in mono for _ in range(e))
            assert fams == ["a", "b"]  # bilinear: degree (1,1)


def test_rm_relations_shape():
    rm = rm_relations()
    assert len(rm) == 3          # frozen generator count
    assert span_rank(rm) == 3    # frozen rank
    for r in rm:
        assert r.is_homogeneous() and r.degree() == 2
        for v in r.variables():
            assert v[0] == "a"
            assert (v[1], v[2]) == min((v[1], v[2]),
                                       ((-v[1]) % 4, (-v[2]) % 4))


def test_explicit_quadrics_in_span():
    rm = rm_relations()
    for quad in humbert_quadrics():
        assert span_contains(quad, rm)


def test_rm_all_ones_outcome(F7):
    # frozen from the first run: the all-ones point satisfies the full
    # real-multiplication family as well
    report = verify(_all_ones_assignment(F7), rm_relations(), F7)
    assert report.overall


def test_split_product_relation():
    r = split_product_relation()
    assert r.degree() == 4
    vars_used = {(v[1], v[2]) for v in r.variables()}
    assert vars_used <= {(0, 0), (0, 2), (2, 0), (2, 2), (1, 1)}


def test_split_product_all_ones(F7):
    val = split_product_relation().evaluate(_all_ones_assignment(F7), F7)
    assert val.is_zero()


def test_split_square_relations():
    ss = split_square_relations()
    assert len(ss) == 20  # 7 nonlinear + 13 distinct linear identities
    want1 = (_a(1, 1) * _a(2, 2) - _a(2, 1) ** 2).normalized()
    want2 = (_a(0, 0) * _a(2, 2) - _a(2, 0) ** 2).normalized()
    keys = {r.canonical_key() for r in ss}
    assert want1.canonical_key() in keys
    assert want2.canonical_key() in keys


def test_split_square_all_ones(F7):
    report = verify(_all_ones_assignment(F7), split_square_relations(), F7)
    assert report.overall


def test_evaluate_errors(F7):
    r = _a(0, 0) - _a(0, 1)
    with pytest.raises(MissingVariable):
        r.evaluate({("a", 0, 0): F7.one()}, F7)
    assert r.evaluate({("a", 0, 0): F7.one(), ("a", 0, 1): F7.one()},
                      F7).is_zero()


def test_span_contains_basics():
    r = (_a(0, 0) ** 2 - _a(0, 1) ** 2).normalized()
    assert span_contains(r, [r])
    assert not span_contains(_a(0, 0) ** 2, [_a(0, 1) ** 2])
    with pytest.raises(DegreeMismatch):
        span_contains(_a(0, 0), [r])


def test_span_contains_linear_combination():
    r1 = _a(0, 0) ** 2 - _a(0, 1) ** 2
    r2 = _a(0, 1) ** 2 - _a(0, 2) ** 2
    target = 2 * _a(0, 0) ** 2 + _a(0, 1) ** 2 - 3 * _a(0, 2) ** 2
    assert span_contains(target, [r1, r2])
    assert not span_contains(_a(0, 0) ** 2, [r1, r2])


def test_serialize_format_example():
    r = (_a(1, 3) ** 2 - _a(1, 0) * _a(2, 1)).normalized(rid="r1")
    rs = rt.RelationSet([r], tag="demo")
    assert serialize_relations(rs) == "rel r1: +1*a(1,3)^2 -1*a(1,0)*a(2,1)\n"


def test_serialize_parse_roundtrip():
    for name in ("mumford", "rm", "rm-bilinear", "split-product",
                 "split-square"):
        rs = relation_set(name)
        text = serialize_relations(rs)
        again = parse_relations(text, tag=rs.tag)
        assert len(again) == len(rs)
        for x, y in zip(rs, again):
            assert x == y and x.rid == y.rid
        assert serialize_relations(again) == text


def test_parse_rejects_bad_index():
    with pytest.raises(RelationSyntaxError):
        parse_relations("rel r1: +1*a(4,0)\n")
    with pytest.raises(RelationSyntaxError):
        parse_relations("nonsense\n")


def test_generators_deterministic():
    a = serialize_relations(rm_relations())
    b = serialize_relations(rm_relations())
    assert a == b
    assert serialize_relations(mumford_relations()) == \
        serialize_relations(mumford_relations())


def test_relation_set_lookup():
    assert len(relation_set("mumford")) == 26
    with pytest.raises(RelationError):
        relation_set("bogus")


def test_verification_report_lines(F7):
    report = verify(_all_ones_assignment(F7), rm_relations(), F7)
    lines = report.lines()
    assert lines[-1].startswith("OVERALL PASS")
    assert len(lines) == len(rm_relations()) + 1
