import itertools

from rmtheta.indices import (ALL_INDEXES, CANONICAL_INDEXES, TWO_TORSION,
                             add_index, admissible_triples, apply_rm_matrix,
                             canonical_index, derived_triple,
                             equivalent_triple_pairs, is_admissible_triple,
                             neg_index, triple_key)


def test_neg_index_examples():
    assert neg_index((0, 0)) == (0, 0)
    assert neg_index((1, 3)) == (3, 1)
    assert neg_index((2, 2)) == (2, 2)


def test_neg_index_involution():
    for u in ALL_INDEXES:
        assert neg_index(neg_index(u)) == u


def test_apply_rm_matrix_examples():
    assert apply_rm_matrix((0, 0)) == (0, 0)
    assert apply_rm_matrix((1, 0)) == (0, 1)
    assert apply_rm_matrix((0, 1)) == (3, 0)


def test_rm_matrix_squares_to_multiplication_by_three():
    for u in ALL_INDEXES:
        assert apply_rm_matrix(apply_rm_matrix(u)) == \
            ((3 * u[0]) % 4, (3 * u[1]) % 4)


def test_canonical_index():
    assert canonical_index((3, 0)) == (1, 0)
    assert canonical_index((1, 3)) == (1, 3)
    assert len(CANONICAL_INDEXES) == 10


def test_admissibility_examples():
    assert is_admissible_triple(((0, 0), (0, 0), (0, 0)))
    assert is_admissible_triple(((2, 0), (1, 1), (1, 1)))
    assert not is_admissible_triple(((1, 0), (0, 0), (0, 0)))


def test_admissible_triples_against_brute_force():
    # independent oracle: direct scan of all 4096 triples with an inline
    # parity filter
    oracle = []
    for x, y, z in itertools.product(ALL_INDEXES, repeat=3):
        d1 = ((x[0] - 2 * y[0]) % 4, (x[1] - 2 * y[1]) % 4)
        d2 = ((x[0] + y[0] - z[0]) % 4, (x[1] + y[1] - z[1]) % 4)
        d3 = ((x[0] + y[0] + z[0]) % 4, (x[1] + y[1] + z[1]) % 4)
        if all(v[0] % 2 == 0 and v[1] % 2 == 0 for v in (d1, d2, d3)):
            oracle.append((x, y, z))
    got = admissible_triples()
    assert len(got) == 256
    assert list(got) == oracle  # same content and lexicographic order


def test_admissible_triples_first_and_membership():
    triples = admissible_triples()
    assert triples[0] == ((0, 0), (0, 0), (0, 0))
    assert all(is_admissible_triple(t) for t in triples)
    assert list(triples) == sorted(triples)


def test_equivalent_pairs_structure():
    pairs = equivalent_triple_pairs()
    assert len(pairs) == 1920  # frozen brute-force count
    for t1, t2 in pairs:
        assert t1 != t2
        assert t1[0] == t2[0]
        assert triple_key(t1) == triple_key(t2)


def test_equivalent_pairs_against_brute_force():
    groups = {}
    for t in admissible_triples():
        groups.setdefault((t[0], triple_key(t)), []).append(t)
    expected = []
    for key in sorted(groups):
        members = groups[key]
        for a, b in itertools.combinations(members, 2):
            expected.append((a, b))
    assert list(equivalent_triple_pairs()) == expected


def test_triple_key_is_derived_multiset():
    for t in admissible_triples()[:32]:
        assert triple_key(t) == tuple(sorted(derived_triple(t)))


def test_enumerations_deterministic():
    assert admissible_triples() == admissible_triples()
    assert equivalent_triple_pairs() == equivalent_triple_pairs()


def test_two_torsion_translates_stay_admissible():
    # translating y and z by the same 2-torsion element preserves the set
    for t in admissible_triples()[:64]:
        x, y, z = t
        for w in TWO_TORSION:
            assert is_admissible_triple((x, add_index(y, w), add_index(z, w)))
