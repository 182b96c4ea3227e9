"""Combinatorics of the level-4 index group (Z/4Z)^2.

Indexes are plain (i, j) tuples with components in {0,1,2,3}.  The module
provides the 2-torsion subgroup, the real-multiplication matrix action, the
set of admissible index triples behind the correspondence sums, and the
pairing of triples that share the same derived key.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

Index = tuple
Triple = tuple

ALL_INDEXES = tuple(itertools.product(range(4), repeat=2))

# the 2-torsion subgroup {0,2}^2, the summation range of the bilinear sums
TWO_TORSION = ((0, 0), (0, 2), (2, 0), (2, 2))


def add_index(u: Index, v: Index) -> Index:
    return ((u[0] + v[0]) % 4, (u[1] + v[1]) % 4)


def sub_index(u: Index, v: Index) -> Index:
    return ((u[0] - v[0]) % 4, (u[1] - v[1]) % 4)


def neg_index(u: Index) -> Index:
    return ((-u[0]) % 4, (-u[1]) % 4)


def canonical_index(u: Index) -> Index:
    """The lexicographically smaller of u and -u."""
    return min(u, neg_index(u))


# the ten canonical representatives of (Z/4Z)^2 modulo negation
CANONICAL_INDEXES = tuple(sorted({canonical_index(u) for u in ALL_INDEXES}))


def apply_rm_matrix(u: Index) -> Index:
    """Left action of the matrix (0 3; 1 0) on a column index vector."""
    return ((3 * u[1]) % 4, u[0])


def derived_triple(t: Triple) -> tuple:
    """(x-2y, x+y-z, x+y+z) for t = (x, y, z)."""
    x, y, z = t
    xy = add_index(x, y)
    return (sub_index(x, add_index(y, y)), sub_index(xy, z), add_index(xy, z))


def is_admissible_triple(t: Triple) -> bool:
    """True iff all three derived indexes lie in the 2-torsion subgroup."""
    return all(d[0] % 2 == 0 and d[1] % 2 == 0 for d in derived_triple(t))


def triple_key(t: Triple) -> tuple:
    """Multiset of the derived indexes, as a sorted tuple.

    Constant on equivalence classes: two triples are related exactly when
    their derived tuples differ by a permutation matrix.
    """
    return tuple(sorted(derived_triple(t)))


@lru_cache(maxsize=None)
def admissible_triples() -> tuple:
    """All 256 admissible triples, in lexicographic order."""
    return tuple(t for t in itertools.product(ALL_INDEXES, repeat=3)
                 if is_admissible_triple(t))


@lru_cache(maxsize=None)
def equivalent_triple_pairs() -> tuple:
    """All unordered pairs of distinct admissible triples that share the
    same first component and the same triple key, in lexicographic order."""
    groups = {}
    for t in admissible_triples():
        groups.setdefault((t[0], triple_key(t)), []).append(t)
    pairs = []
    for key in sorted(groups):
        members = groups[key]
        for a, b in itertools.combinations(members, 2):
            pairs.append((a, b))
    return tuple(pairs)
