"""Sparse multivariate polynomials over Z and the theta relation families.

Variables are pairs of a family tag and an index: ('a', i, j) denotes a
level-4 theta coordinate, ('b', i, j) its image under the intermediate
isogeny.  Relations carry exact integer coefficients; span questions are
decided over the rationals by exact row reduction.
"""

from __future__ import annotations

import math
import re
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

from .indices import (ALL_INDEXES, TWO_TORSION, add_index, apply_rm_matrix,
                      canonical_index, equivalent_triple_pairs)


class RelationError(Exception):
    pass


class MissingVariable(RelationError):
    pass


class DegreeMismatch(RelationError):
    pass


class RelationSyntaxError(RelationError, ValueError):
    pass


# variable order: a(0,0) highest, then remaining a's, then the b family
_VAR_ORDER = {("a",) + u: k for k, u in enumerate(ALL_INDEXES)}
_VAR_ORDER.update({("b",) + u: 16 + k for k, u in enumerate(ALL_INDEXES)})
_NVARS = len(_VAR_ORDER)


def _mono_degree(mono) -> int:
    return sum(e for _, e in mono)


def _mono_sort_key(mono):
    """Graded reverse-lexicographic key (descending sort puts the leading
    monomial first): total degree, then negated exponents read from the
    lowest variable up."""
    vec = [0] * _NVARS
    for v, e in mono:
        vec[_VAR_ORDER[v]] = e
    return (_mono_degree(mono), tuple(-e for e in reversed(vec)))


_EMPTY_MONO = ()


class Relation:
    """A polynomial with integer coefficients in the theta variables.

    Monomials are stored as sorted tuples of (variable, exponent) pairs with
    positive exponents.  Arithmetic is exact; `normalized` produces the
    canonical form (content one, positive leading coefficient, optional id).
    """

    __slots__ = ("terms", "rid")

    def __init__(self, terms: Optional[Mapping] = None, rid: Optional[str] = None):
        self.terms = dict(terms) if terms else {}
        self.rid = rid

    # -- construction -------------------------------------------------------

    @classmethod
    def variable(cls, family: str, i: int, j: int) -> "Relation":
        if family not in ("a", "b") or not (0 <= i <= 3 and 0 <= j <= 3):
            raise RelationError(f"bad variable {family}({i},{j})")
        return cls({(((family, i, j), 1),): 1})

    @classmethod
    def constant(cls, c: int) -> "Relation":
        return cls({_EMPTY_MONO: c} if c else {})

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(_mono_degree(m) for m in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {_mono_degree(m) for m in self.terms}
        return len(degs) <= 1

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def sorted_terms(self):
        """Terms in canonical order, leading monomial first."""
        return sorted(self.terms.items(),
                      key=lambda mc: _mono_sort_key(mc[0]), reverse=True)

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = Relation.constant(other)
        if not isinstance(other, Relation):
            return NotImplemented
        terms = dict(self.terms)
        for m, c in other.terms.items():
            nc = terms.get(m, 0) + c
            if nc:
                terms[m] = nc
            else:
                terms.pop(m, None)
        return Relation(terms)

    __radd__ = __add__

    def __neg__(self):
        return Relation({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = Relation.constant(other)
        if not isinstance(other, Relation):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return Relation()
            return Relation({m: c * other for m, c in self.terms.items()})
        if not isinstance(other, Relation):
            return NotImplemented
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                d = dict(m1)
                for v, e in m2:
                    d[v] = d.get(v, 0) + e
                m = tuple(sorted(d.items()))
                nc = out.get(m, 0) + c1 * c2
                if nc:
                    out[m] = nc
                else:
                    out.pop(m, None)
        return Relation(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise RelationError("negative polynomial power")
        r = Relation.constant(1)
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    # -- canonical form ---------------------------------------------------------

    def normalized(self, rid: Optional[str] = None) -> "Relation":
        """Canonical form: integer content one, positive leading coefficient."""
        if not self.terms:
            return Relation(rid=rid)
        g = 0
        for c in self.terms.values():
            g = math.gcd(g, abs(c))
        lead = max(self.terms, key=_mono_sort_key)
        sign = 1 if self.terms[lead] > 0 else -1
        g *= sign
        return Relation({m: c // g for m, c in self.terms.items()}, rid=rid)

    def canonical_key(self):
        return tuple(sorted(self.terms.items()))

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.canonical_key())

    # -- evaluation ----------------------------------------------------------------

    def evaluate(self, assignment: Mapping, field, _cache: Optional[dict] = None):
        """Exact value at a point given as a map variable -> FieldElement."""
        acc = field.zero()
        cache = _cache if _cache is not None else {}
        for m, c in self.terms.items():
            try:
                val = cache[m]
            except KeyError:
                val = field.one()
                for v, e in m:
                    if v not in assignment:
                        raise MissingVariable(f"no value for {_var_str(v)}")
                    val = val * assignment[v] ** e
                cache[m] = val
            acc = acc + c * val
        return acc

    # -- formatting ---------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = [f"{c:+d}"]
            for v, e in m:
                factors.append(_var_str(v) if e == 1 else f"{_var_str(v)}^{e}")
            parts.append("*".join(factors))
        return " ".join(parts)

    def __repr__(self):
        tag = f" id={self.rid}" if self.rid else ""
        return f"<Relation{tag}: {self}>"


def _var_str(v) -> str:
    return f"{v[0]}({v[1]},{v[2]})"


class RelationSet:
    """An ordered, duplicate-free collection of normalized relations."""

    __slots__ = ("relations", "tag")

    def __init__(self, relations: Sequence[Relation], tag: str):
        seen = set()
        ids = set()
        for r in relations:
            key = r.canonical_key()
            if not r.terms:
                raise RelationError("zero relation in set")
            if key in seen:
                raise RelationError("duplicate relation in set")
            if r.rid is None or r.rid in ids:
                raise RelationError("missing or duplicate relation id")
            seen.add(key)
            ids.add(r.rid)
        self.relations = tuple(relations)
        self.tag = tag

    def __iter__(self):
        return iter(self.relations)

    def __len__(self):
        return len(self.relations)

    def __getitem__(self, k):
        return self.relations[k]

    def __repr__(self):
        return f"<RelationSet {self.tag}: {len(self)} relations>"

    def serialize(self) -> str:
        return serialize_relations(self)


# ---------------------------------------------------------------------------
# relation families
# ---------------------------------------------------------------------------


def _a(i, j):
    return Relation.variable("a", i, j)


def _b_of(u):
    return Relation.variable("b", u[0], u[1])


def _a_of(u):
    return Relation.variable("a", u[0], u[1])


@lru_cache(maxsize=None)
def mumford_relations() -> RelationSet:
    """The 26 level-4 moduli relations: 20 quartics plus 6 linear identities."""
    s4 = _a(0, 0)**2 + _a(0, 2)**2 + _a(2, 0)**2 + _a(2, 2)**2
    p01 = _a(0, 0)*_a(0, 2) + _a(2, 0)*_a(2, 2)
    p10 = _a(0, 0)*_a(2, 0) + _a(0, 2)*_a(2, 2)
    p11 = _a(0, 0)*_a(2, 2) + _a(0, 2)*_a(2, 0)
    s01 = _a(0, 1)**2 + _a(2, 1)**2
    s10 = _a(1, 0)**2 + _a(1, 2)**2
    s11 = _a(1, 1)**2 + _a(1, 3)**2
    q01 = _a(0, 1)*_a(2, 1)
    q10 = _a(1, 0)*_a(1, 2)
    q11 = _a(1, 1)*_a(1, 3)

    quartics = [
        s4*p01 - 2*s01**2,
        s4*p10 - 2*s10**2,
        s4*p11 - 2*s11**2,
        p10*p11 - 4*_a(0, 1)**2*_a(2, 1)**2,
        p01*p11 - 4*_a(1, 0)**2*_a(1, 2)**2,
        p01*p10 - 4*_a(1, 1)**2*_a(1, 3)**2,
        s4*q11 - s10*s01,
        s4*q01 - s10*s11,
        s4*q10 - s01*s11,
        p11*q11 - 2*_a(0, 1)*_a(1, 0)*_a(2, 1)*_a(1, 2),
        p10*q10 - 2*q11*q01,
        p01*q01 - 2*q11*q10,
        p11*s01 - 2*q10*s11,
        p01*s11 - 2*q10*s01,
        p11*s10 - 2*q01*s11,
        p10*s11 - 2*q01*s10,
        p10*s01 - 2*q11*s10,
        p01*s10 - 2*q11*s01,
        q01*s01 - q10*s10,
        q01*s01 - q11*s11,
    ]
    linear = [
        _a(1, 1) - _a(3, 3),
        _a(1, 0) - _a(3, 0),
        _a(0, 1) - _a(0, 3),
        _a(1, 3) - _a(3, 1),
        _a(3, 2) - _a(1, 2),
        _a(2, 1) - _a(2, 3),
    ]
    rels = [r.normalized(rid=f"mum{k:02d}") for k, r in enumerate(quartics, 1)]
    rels += [r.normalized(rid=f"mumlin{k}") for k, r in enumerate(linear, 1)]
    return RelationSet(rels, tag="Mumford")


@lru_cache(maxsize=None)
def rm_bilinear_relations() -> RelationSet:
    """Bilinear correspondence relations, one per equivalent triple pair.

    For a pair (x,y1,z1) ~ (x,y2,z2) the relation equates the two sums
    of b(y+u)*a(z+u) over the 2-torsion subgroup.  Cancelling pairs and
    duplicates are dropped.
    """
    rels = []
    seen = set()
    for (t1, t2) in equivalent_triple_pairs():
        (_, y1, z1), (_, y2, z2) = t1, t2
        poly = Relation()
        for u in TWO_TORSION:
            poly = poly + _b_of(add_index(y1, u)) * _a_of(add_index(z1, u))
            poly = poly - _b_of(add_index(y2, u)) * _a_of(add_index(z2, u))
        poly = poly.normalized()
        key = poly.canonical_key()
        if poly.is_zero() or key in seen:
            continue
        seen.add(key)
        rels.append(poly.normalized(rid=f"rmb{len(rels) + 1:02d}"))
    return RelationSet(rels, tag="RMBilinear")


def _substitute_rm(poly: Relation) -> Relation:
    """Replace b(v) by a(Mv) and fold every index to its negation-canonical
    representative."""
    out = Relation()
    for m, c in poly.terms.items():
        factors = {}
        for (fam, i, j), e in m:
            u = (i, j)
            if fam == "b":
                u = apply_rm_matrix(u)
            u = canonical_index(u)
            v = ("a",) + u
            factors[v] = factors.get(v, 0) + e
        out = out + Relation({tuple(sorted(factors.items())): c})
    return out


@lru_cache(maxsize=None)
def rm_relations() -> RelationSet:
    """Quadratic relations cutting out the sqrt(3) real-multiplication locus,
    obtained from the bilinear family by the matrix substitution."""
    rels = []
    seen = set()
    for r in rm_bilinear_relations():
        poly = _substitute_rm(r).normalized()
        key = poly.canonical_key()
        if poly.is_zero() or key in seen:
            continue
        seen.add(key)
        rels.append(poly.normalized(rid=f"rm{len(rels) + 1:02d}"))
    return RelationSet(rels, tag="RM")


@lru_cache(maxsize=None)
def humbert_quadrics() -> tuple:
    """The three explicit quadrics of the sqrt(3) Humbert locus."""
    q1 = (_a(1, 3)**2 - _a(1, 0)*_a(2, 1) - _a(1, 2)*_a(0, 1) + _a(1, 1)**2)
    q2 = (-_a(0, 0)*_a(0, 2) + 2*_a(1, 0)*_a(0, 1) - _a(2, 2)*_a(2, 0)
          - _a(0, 2)*_a(2, 2) - _a(2, 0)*_a(0, 0) + 2*_a(1, 2)*_a(2, 1))
    q3 = (-_a(2, 0)**2 - 2*_a(0, 0)*_a(2, 2) - _a(0, 2)**2
          + 4*_a(1, 3)*_a(1, 1))
    return tuple(q.normalized(rid=f"humbert{k}")
                 for k, q in enumerate((q1, q2, q3), 1))


@lru_cache(maxsize=None)
def split_product_relation() -> Relation:
    """The quartic satisfied exactly by products of elliptic theta nulls."""
    r = 4*_a(1, 1)**4 - (_a(0, 0)**2 + _a(0, 2)**2 + _a(2, 0)**2
                         + _a(2, 2)**2)*_a(0, 0)*_a(2, 2)
    return r.normalized(rid="splitprod")


@lru_cache(maxsize=None)
def split_square_relations() -> RelationSet:
    """Equations of the curve of self-products E x E inside the moduli."""
    nonlinear = [
        _a(1, 1)*_a(2, 2) - _a(2, 1)**2,
        _a(1, 0)*_a(2, 1) - _a(1, 1)*_a(2, 0),
        _a(1, 0)*_a(2, 2) - _a(2, 0)*_a(2, 1),
        2*_a(1, 1)**2 - _a(0, 0)*_a(2, 0) - _a(2, 0)*_a(2, 2),
        _a(0, 0)*_a(2, 1) - _a(1, 0)*_a(2, 0),
        _a(0, 0)*_a(1, 1) - _a(1, 0)**2,
        _a(0, 0)*_a(2, 2) - _a(2, 0)**2,
    ]
    linear = [
        _a(1, 3) - _a(3, 1),
        _a(0, 3) - _a(3, 0),
        _a(2, 3) - _a(3, 2),
        _a(0, 1) - _a(1, 0),
        _a(1, 1) - _a(3, 3),
        _a(1, 3) - _a(3, 1),
        _a(0, 1) - _a(0, 3),
        _a(1, 2) - _a(3, 2),
        _a(1, 1) - _a(1, 3),
        _a(0, 2) - _a(2, 0),
        _a(1, 2) - _a(2, 1),
        _a(2, 1) - _a(2, 3),
        _a(3, 1) - _a(3, 3),
        _a(2, 1) - _a(2, 3),
        _a(0, 1) - _a(0, 3),
        _a(1, 0) - _a(3, 0),
    ]
    rels = []
    seen = set()
    for r in nonlinear + linear:
        poly = r.normalized()
        key = poly.canonical_key()
        if poly.is_zero() or key in seen:
            continue
        seen.add(key)
        kind = "sq" if poly.degree() == 2 else "sqlin"
        count = sum(1 for x in rels if x.rid.startswith(kind))
        rels.append(poly.normalized(rid=f"{kind}{count + 1:02d}"))
    return RelationSet(rels, tag="SplitSquare")


_SET_BUILDERS = {
    "mumford": mumford_relations,
    "rm": rm_relations,
    "rm-bilinear": rm_bilinear_relations,
    "split-square": split_square_relations,
}


def relation_set(name: str) -> RelationSet:
    """Look up a relation family by its command-line name."""
    if name == "split-product":
        return RelationSet([split_product_relation()], tag="SplitProduct")
    try:
        return _SET_BUILDERS[name]()
    except KeyError:
        raise RelationError(f"unknown relation set {name!r}") from None


RELATION_SET_NAMES = ("mumford", "rm", "rm-bilinear", "split-product",
                      "split-square")


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerificationReport:
    """Per-relation residual flags for one point against one relation set."""

    entries: tuple          # ((relation id, passed), ...) sorted by id
    seconds: float

    @property
    def overall(self) -> bool:
        return all(ok for _, ok in self.entries)

    def lines(self):
        out = [f"{rid} {'PASS' if ok else 'FAIL'}" for rid, ok in self.entries]
        out.append(f"OVERALL {'PASS' if self.overall else 'FAIL'}"
                   f" ({len(self.entries)} relations, {self.seconds:.3f}s)")
        return out


def verify(assignment: Mapping, relations: Iterable[Relation],
           field) -> VerificationReport:
    """Evaluate every relation at the assignment; pass means exact zero."""
    start = time.perf_counter()
    cache = {}
    entries = []
    for r in relations:
        value = r.evaluate(assignment, field, _cache=cache)
        entries.append((r.rid or str(r), value.is_zero()))
    entries.sort(key=lambda e: e[0])
    return VerificationReport(tuple(entries), time.perf_counter() - start)


# ---------------------------------------------------------------------------
# rational span
# ---------------------------------------------------------------------------


def _echelonize(rows):
    """In-place reduced row echelon form over Fraction; returns pivot columns."""
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((k for k in range(r, len(rows)) if rows[k][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][col]
        rows[r] = [x / inv for x in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][col]:
                f = rows[k][col]
                rows[k] = [x - f * y for x, y in zip(rows[k], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return pivots


def _coefficient_matrix(relations):
    monos = sorted({m for rel in relations for m in rel.terms},
                   key=_mono_sort_key)
    col = {m: k for k, m in enumerate(monos)}
    rows = []
    for rel in relations:
        row = [Fraction(0)] * len(monos)
        for m, c in rel.terms.items():
            row[col[m]] = Fraction(c)
        rows.append(row)
    return rows, col


def span_rank(relations: Iterable[Relation]) -> int:
    """Dimension of the rational span of the given relations."""
    relations = list(relations)
    if not relations:
        return 0
    rows, _ = _coefficient_matrix(relations)
    return len(_echelonize(rows))


def span_contains(target: Relation, relations: Iterable[Relation]) -> bool:
    """Exact rational membership of target in the linear span.

    All inputs must be homogeneous of one common degree.
    """
    relations = list(relations)
    degs = {r.degree() for r in relations} | {target.degree()}
    if not target.is_homogeneous() or any(not r.is_homogeneous()
                                          for r in relations):
        raise DegreeMismatch("span check requires homogeneous relations")
    if len(degs) != 1:
        raise DegreeMismatch(f"mixed degrees in span check: {sorted(degs)}")
    rows, col = _coefficient_matrix(relations + [target])
    target_row = rows.pop()
    pivots = _echelonize(rows)
    for r, c in enumerate(pivots):
        if target_row[c]:
            f = target_row[c]
            target_row = [x - f * y for x, y in zip(target_row, rows[r])]
    return not any(target_row)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

_TERM_RE = re.compile(
    r"([+-]\d+)((?:\*[ab]\(\d,\d\)(?:\^\d+)?)*)$")
_FACTOR_RE = re.compile(r"\*([ab])\((\d),(\d)\)(?:\^(\d+))?")


def serialize_relations(rs: RelationSet) -> str:
    """One relation per line: `rel <id>: <+c>*<var>[^e][*<var>[^e]]...`."""
    lines = []
    for r in rs:
        lines.append(f"rel {r.rid}: {r}")
    return "\n".join(lines) + "\n"


def parse_relations(text: str, tag: str = "parsed") -> RelationSet:
    rels = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.match(r"rel\s+(\S+):\s*(.*)$", line)
        if not m:
            raise RelationSyntaxError(f"line {lineno}: not a relation line")
        rid, body = m.group(1), m.group(2)
        terms = {}
        for token in body.split():
            tm = _TERM_RE.match(token)
            if not tm:
                raise RelationSyntaxError(
                    f"line {lineno}: bad term {token!r}")
            coeff = int(tm.group(1))
            mono = {}
            for fm in _FACTOR_RE.finditer(tm.group(2)):
                fam, i, j = fm.group(1), int(fm.group(2)), int(fm.group(3))
                if i > 3 or j > 3:
                    raise RelationSyntaxError(
                        f"line {lineno}: index out of range in {token!r}")
                e = int(fm.group(4)) if fm.group(4) else 1
                v = (fam, i, j)
                mono[v] = mono.get(v, 0) + e
            key = tuple(sorted(mono.items()))
            if key in terms:
                raise RelationSyntaxError(f"line {lineno}: repeated monomial")
            if coeff:
                terms[key] = coeff
        rels.append(Relation(terms, rid=rid))
    return RelationSet(rels, tag=tag)
