"""Genus-2 curve pipeline: Thomae products, level conversions, Rosenhain
recovery, and the real-multiplication decision test.

All operations are pure and work over any Field from `rmtheta.field`.
Square roots are the only partial step; absence of a root in the working
field is reported, never approximated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .field import Field, FieldElement, FieldMismatch
from .indices import ALL_INDEXES, apply_rm_matrix, neg_index
from .relations import mumford_relations, rm_relations


class PipelineError(Exception):
    pass


class AsymmetricPoint(PipelineError):
    pass


class ZeroPoint(PipelineError):
    pass


class NotAThetaNullPoint(PipelineError):
    pass


class InconsistentLevel2Data(PipelineError):
    pass


class AllZero(PipelineError):
    pass


class NoSquareRoots(PipelineError):
    pass


class NoLift(PipelineError):
    pass


class RepeatedBranchPoint(PipelineError):
    pass


class DegenerateThetaPoint(PipelineError):
    pass


class NoSolutionInField(PipelineError):
    pass


class InvalidRosenhain(PipelineError):
    pass


class NotEllipticThetaNull(PipelineError):
    pass


class FieldTooSmall(PipelineError):
    def __init__(self, message: str, suggested_degree: int):
        super().__init__(message)
        self.suggested_degree = suggested_degree


class PointSyntaxError(PipelineError, ValueError):
    pass


# the ten index representatives from which symmetry recovers all sixteen
REDUCED_INDEXES = ((0, 0), (0, 1), (0, 2), (1, 0), (1, 1),
                   (1, 2), (1, 3), (2, 0), (2, 1), (2, 2))

LEVEL2_INDEXES = ((0, 0), (0, 1), (1, 0), (1, 1))

_PRODUCT_KEYS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def _strip_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


class ThetaPoint4:
    """A level-4 theta null point: sixteen projective coordinates with the
    negation symmetry a_u = a_{-u}."""

    __slots__ = ("field", "coords")

    def __init__(self, field: Field, coords):
        full = {}
        for u in ALL_INDEXES:
            if u not in coords:
                raise PointSyntaxError(f"missing coordinate a{u}")
            full[u] = field.element(coords[u])
        for u in ALL_INDEXES:
            if full[u] != full[neg_index(u)]:
                raise AsymmetricPoint(
                    f"a{u} != a{neg_index(u)} breaks the negation symmetry")
        if all(full[u].is_zero() for u in ALL_INDEXES):
            raise ZeroPoint("all sixteen coordinates vanish")
        self.field = field
        self.coords = full

    @classmethod
    def from_reduced(cls, field: Field, reduced) -> "ThetaPoint4":
        """Build from the ten symmetry-reduced coordinates."""
        coords = {}
        for u in REDUCED_INDEXES:
            if u not in reduced:
                raise PointSyntaxError(f"missing reduced coordinate a{u}")
            coords[u] = reduced[u]
            coords[neg_index(u)] = reduced[u]
        return cls(field, coords)

    def __getitem__(self, u) -> FieldElement:
        return self.coords[u]

    def assignment(self) -> dict:
        return {("a", i, j): self.coords[(i, j)] for (i, j) in ALL_INDEXES}

    def correspondence_assignment(self) -> dict:
        """Family-a values plus b(v) := a(Mv), the unit-scalar substitution
        under which the bilinear family collapses onto one point."""
        asg = self.assignment()
        for u in ALL_INDEXES:
            asg[("b",) + u] = self.coords[apply_rm_matrix(u)]
        return asg

    def scaled(self, c: FieldElement) -> "ThetaPoint4":
        return ThetaPoint4(self.field,
                           {u: self.coords[u] * c for u in ALL_INDEXES})

    def is_proportional_to(self, other: "ThetaPoint4") -> bool:
        if self.field != other.field:
            raise FieldMismatch("points over different fields")
        anchor = next(u for u in ALL_INDEXES if not self.coords[u].is_zero())
        if other.coords[anchor].is_zero():
            return False
        c, d = self.coords[anchor], other.coords[anchor]
        return all(self.coords[u] * d == other.coords[u] * c
                   for u in ALL_INDEXES)

    def __eq__(self, other):
        if not isinstance(other, ThetaPoint4):
            return NotImplemented
        return self.field == other.field and all(
            self.coords[u] == other.coords[u] for u in ALL_INDEXES)

    def __hash__(self):
        return hash(tuple(self.coords[u] for u in ALL_INDEXES))

    def serialize(self, reduced: bool = True) -> str:
        idxs = REDUCED_INDEXES if reduced else ALL_INDEXES
        lines = [f"a {i} {j} {self.coords[(i, j)]}" for (i, j) in idxs]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str, field: Field) -> "ThetaPoint4":
        entries = {}
        for lineno, line in _strip_lines(text):
            parts = line.split()
            if len(parts) != 4 or parts[0] != "a":
                raise PointSyntaxError(f"line {lineno}: bad point line")
            try:
                i, j = int(parts[1]), int(parts[2])
            except ValueError:
                raise PointSyntaxError(f"line {lineno}: bad index") from None
            if not (0 <= i <= 3 and 0 <= j <= 3):
                raise PointSyntaxError(f"line {lineno}: index out of range")
            if (i, j) in entries:
                raise PointSyntaxError(f"line {lineno}: duplicate a({i},{j})")
            entries[(i, j)] = field.parse_element(parts[3])
        if len(entries) == len(REDUCED_INDEXES) and \
                set(entries) == set(REDUCED_INDEXES):
            return cls.from_reduced(field, entries)
        if len(entries) == 16:
            return cls(field, entries)
        raise PointSyntaxError(
            "point file must carry the 10 reduced or all 16 coordinates")

    @classmethod
    def from_file(cls, path, field: Field) -> "ThetaPoint4":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.parse(fh.read(), field)


class ThetaPoint2:
    """A level-2 theta null point (b00, b01, b10, b11), projective."""

    __slots__ = ("field", "coords")

    def __init__(self, field: Field, coords: Sequence):
        vals = tuple(field.element(c) for c in coords)
        if len(vals) != 4:
            raise PointSyntaxError("level-2 point needs four coordinates")
        if all(v.is_zero() for v in vals):
            raise ZeroPoint("all four coordinates vanish")
        self.field = field
        self.coords = vals

    def __getitem__(self, k) -> FieldElement:
        return self.coords[k]

    def is_proportional_to(self, other: "ThetaPoint2") -> bool:
        if self.field != other.field:
            raise FieldMismatch("points over different fields")
        anchor = next(k for k in range(4) if not self.coords[k].is_zero())
        if other.coords[anchor].is_zero():
            return False
        c, d = self.coords[anchor], other.coords[anchor]
        return all(self.coords[k] * d == other.coords[k] * c
                   for k in range(4))

    def __eq__(self, other):
        if not isinstance(other, ThetaPoint2):
            return NotImplemented
        return self.field == other.field and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def serialize(self) -> str:
        lines = [f"b {i} {j} {self.coords[k]}"
                 for k, (i, j) in enumerate(LEVEL2_INDEXES)]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str, field: Field) -> "ThetaPoint2":
        entries = {}
        for lineno, line in _strip_lines(text):
            parts = line.split()
            if len(parts) != 4 or parts[0] != "b":
                raise PointSyntaxError(f"line {lineno}: bad point line")
            try:
                i, j = int(parts[1]), int(parts[2])
            except ValueError:
                raise PointSyntaxError(f"line {lineno}: bad index") from None
            if (i, j) not in LEVEL2_INDEXES or (i, j) in entries:
                raise PointSyntaxError(f"line {lineno}: bad index b({i},{j})")
            entries[(i, j)] = field.parse_element(parts[3])
        if set(entries) != set(LEVEL2_INDEXES):
            raise PointSyntaxError("level-2 point needs b00, b01, b10, b11")
        return cls(field, tuple(entries[u] for u in LEVEL2_INDEXES))

    @classmethod
    def from_file(cls, path, field: Field) -> "ThetaPoint2":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.parse(fh.read(), field)


class Level2Data:
    """Squares and pairwise products of the four level-2 coordinates.

    The products may be absent (None) when only the squares are known, as
    happens after inverting Thomae products; extraction then has to take
    one square root per coordinate instead of one per point.
    """

    __slots__ = ("field", "squares", "products")

    def __init__(self, field: Field, squares: Sequence,
                 products: Optional[dict] = None):
        self.field = field
        self.squares = tuple(field.element(s) for s in squares)
        if len(self.squares) != 4:
            raise PointSyntaxError("need four squares")
        if products is None:
            self.products = None
        else:
            if set(products) != set(_PRODUCT_KEYS):
                raise PointSyntaxError("need all six pairwise products")
            self.products = {k: field.element(v) for k, v in products.items()}
            for (i, j) in _PRODUCT_KEYS:
                if self.squares[i] * self.squares[j] != self.products[(i, j)] ** 2:
                    raise InconsistentLevel2Data(
                        f"squares[{i}]*squares[{j}] != products[{i},{j}]^2")

    def all_zero(self) -> bool:
        if any(not s.is_zero() for s in self.squares):
            return False
        if self.products and any(not v.is_zero()
                                 for v in self.products.values()):
            return False
        return True


@dataclass(frozen=True)
class SearchConfig:
    max_orderings: int = 120
    max_candidates: int = 100000
    auto_extend: bool = False

    def __post_init__(self):
        if self.max_orderings <= 0 or self.max_candidates <= 0:
            raise ValueError("search limits must be positive")


@dataclass(frozen=True)
class Decision:
    positive: bool
    witness: Optional[ThetaPoint4]
    field: Field
    orderings_tried: int
    candidates_checked: int
    limit_reached: bool = False


class BranchPoints:
    """Five finite branch points; the sixth is fixed at infinity."""

    __slots__ = ("field", "values")

    def __init__(self, field: Field, values: Sequence):
        vals = tuple(field.element(v) for v in values)
        if len(vals) != 5:
            raise PointSyntaxError("need five finite branch points")
        for k in range(5):
            for l in range(k + 1, 5):
                if vals[k] == vals[l]:
                    raise RepeatedBranchPoint(
                        f"branch points {k + 1} and {l + 1} coincide")
        self.field = field
        self.values = vals

    def __getitem__(self, k):
        return self.values[k]


class RosenhainCurve:
    """y^2 = x(x-1)(x-l1)(x-l2)(x-l3) with invariants distinct, not in {0,1}."""

    __slots__ = ("field", "lambdas")

    def __init__(self, field: Field, lambdas: Sequence):
        vals = tuple(field.element(v) for v in lambdas)
        if len(vals) != 3:
            raise InvalidRosenhain("need three Rosenhain invariants")
        zero, one = field.zero(), field.one()
        for v in vals:
            if v == zero or v == one:
                raise InvalidRosenhain("invariant in {0, 1}")
        if len(set(vals)) != 3:
            raise InvalidRosenhain("repeated invariant")
        self.field = field
        self.lambdas = vals

    def branch_points(self) -> BranchPoints:
        return BranchPoints(self.field,
                            (self.field.zero(), self.field.one()) + self.lambdas)

    def serialize(self) -> str:
        return "rosenhain " + " ".join(str(v) for v in self.lambdas) + "\n"

    @classmethod
    def parse(cls, text: str, field: Field) -> "RosenhainCurve":
        """Curve file: `rosenhain <l1> <l2> <l3>` or `branch <e1> ... <e6>`."""
        lines = list(_strip_lines(text))
        if len(lines) != 1:
            raise PointSyntaxError("curve file must hold exactly one line")
        parts = lines[0][1].split()
        if parts[0] == "rosenhain" and len(parts) == 4:
            return cls(field, [field.parse_element(t) for t in parts[1:]])
        if parts[0] == "branch" and len(parts) == 7:
            sextet = [field.parse_element(t) for t in parts[1:]]
            e = normalize_branch_sextet(field, sextet)
            return cls(field, e.values[2:])
        raise PointSyntaxError("curve line must be `rosenhain ...` or `branch ...`")

    @classmethod
    def from_file(cls, path, field: Field) -> "RosenhainCurve":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.parse(fh.read(), field)


def normalize_branch_sextet(field: Field, sextet: Sequence) -> BranchPoints:
    """Send (e1, e2, e6) to (0, 1, infinity) by the Moebius map
    t -> (t-e1)(e2-e6) / ((t-e6)(e2-e1)); returns the five finite images."""
    e = [field.element(v) for v in sextet]
    if len(e) != 6:
        raise PointSyntaxError("need six branch points")
    for k in range(6):
        for l in range(k + 1, 6):
            if e[k] == e[l]:
                raise RepeatedBranchPoint(
                    f"branch points {k + 1} and {l + 1} coincide")
    num_scale = (e[1] - e[5]) * (e[1] - e[0]).inverse()
    imgs = [((t - e[0]) * (t - e[5]).inverse()) * num_scale for t in e[2:5]]
    return BranchPoints(field, (field.zero(), field.one()) + tuple(imgs))


# ---------------------------------------------------------------------------
# Thomae products and their inversion
# ---------------------------------------------------------------------------


def thomae_squares(e: BranchPoints):
    """The four branch-difference products whose square roots are the
    signed combinations of the level-2 coordinate squares."""
    v = e.values
    r1 = (v[0] - v[2]) * (v[0] - v[4]) * (v[1] - v[3]) * (v[2] - v[4])
    r2 = (v[0] - v[2]) * (v[0] - v[3]) * (v[1] - v[4]) * (v[2] - v[3])
    r3 = (v[0] - v[1]) * (v[0] - v[3]) * (v[1] - v[3]) * (v[2] - v[4])
    r4 = (v[0] - v[1]) * (v[0] - v[4]) * (v[1] - v[4]) * (v[2] - v[3])
    return (r1, r2, r3, r4)


def level2_squares_from_thomae(r: Sequence, field: Field):
    """All sign classes of level-2 coordinate squares consistent with the
    four products, modulo a global sign.

    Each class is (b00^2, b01^2, b10^2, b11^2) = H(s1..s4)/4 for one choice
    of signs of the square roots s_i of r_i.
    """
    roots = []
    for k, rk in enumerate(r):
        s = field.element(rk).sqrt()
        if s is None:
            raise NoSquareRoots(f"product {k + 1} has no square root")
        roots.append(s)
    inv4 = field.element(4).inverse()
    first_nonzero = next((k for k, s in enumerate(roots) if not s.is_zero()),
                         None)
    out = []
    seen = set()
    for signs in itertools.product((1, -1), repeat=4):
        if first_nonzero is not None and signs[first_nonzero] == -1:
            continue
        s = [roots[k] if signs[k] == 1 else -roots[k] for k in range(4)]
        squares = (
            (s[0] + s[1] + s[2] + s[3]) * inv4,
            (s[0] - s[1] + s[2] - s[3]) * inv4,
            (s[0] + s[1] - s[2] - s[3]) * inv4,
            (s[0] - s[1] - s[2] + s[3]) * inv4,
        )
        if squares not in seen:
            seen.add(squares)
            out.append(squares)
    return out


# ---------------------------------------------------------------------------
# level conversions
# ---------------------------------------------------------------------------


def level4_to_level2(point: ThetaPoint4) -> Level2Data:
    """Going down: squares and products of the level-2 coordinates, by the
    degree-two formulas; requires a point satisfying all 26 relations."""
    report_ok, failing = _passes_mumford(point)
    if not report_ok:
        raise NotAThetaNullPoint(f"relation {failing} fails")
    a = point.coords
    two = point.field.element(2)
    four = point.field.element(4)
    squares = (
        a[(0, 0)]**2 + a[(0, 2)]**2 + a[(2, 0)]**2 + a[(2, 2)]**2,
        two * (a[(0, 0)]*a[(0, 2)] + a[(2, 0)]*a[(2, 2)]),
        two * (a[(0, 0)]*a[(2, 0)] + a[(0, 2)]*a[(2, 2)]),
        two * (a[(0, 0)]*a[(2, 2)] + a[(0, 2)]*a[(2, 0)]),
    )
    products = {
        (0, 1): two * (a[(0, 1)]**2 + a[(2, 1)]**2),
        (0, 3): two * (a[(1, 1)]**2 + a[(1, 3)]**2),
        (0, 2): two * (a[(1, 2)]**2 + a[(1, 0)]**2),
        (1, 3): four * a[(1, 0)] * a[(1, 2)],
        (2, 3): four * a[(0, 1)] * a[(2, 1)],
        (1, 2): four * a[(1, 1)] * a[(1, 3)],
    }
    return Level2Data(point.field, squares, products)


def _passes_mumford(point: ThetaPoint4):
    asg = point.assignment()
    cache = {}
    for rel in mumford_relations():
        if not rel.evaluate(asg, point.field, _cache=cache).is_zero():
            return False, rel.rid
    return True, None


def level2_point_from_data(data: Level2Data):
    """Extract the level-2 point(s) behind a Level2Data.

    With products present the class is unique: anchor on the first index
    with a nonzero square and divide its product row by the anchor root
    (falling back to the projective rescale b ~ (q_a, prod_a1, ...) when
    the anchor square has no root in the field).  Without products every
    coordinate needs its own root, and all sign classes modulo a global
    sign are returned; classes whose roots are missing do not exist over
    the field, so the list may be empty.
    """
    if data.all_zero():
        raise AllZero("no nonzero coordinate data")
    field = data.field
    anchor = next(k for k in range(4) if not data.squares[k].is_zero())
    if data.products is not None:
        root = data.squares[anchor].sqrt()
        if root is not None:
            inv = root.inverse()
            coords = [None] * 4
            coords[anchor] = root
            for k in range(4):
                if k != anchor:
                    key = (min(anchor, k), max(anchor, k))
                    coords[k] = data.products[key] * inv
        else:
            coords = [None] * 4
            coords[anchor] = data.squares[anchor]
            for k in range(4):
                if k != anchor:
                    key = (min(anchor, k), max(anchor, k))
                    coords[k] = data.products[key]
        return [ThetaPoint2(field, coords)]
    roots = []
    for k in range(4):
        s = data.squares[k].sqrt()
        if s is None and not data.squares[k].is_zero():
            return []
        roots.append(s if s is not None else field.zero())
    free = [k for k in range(4) if k != anchor and not roots[k].is_zero()]
    points = []
    for signs in itertools.product((1, -1), repeat=len(free)):
        coords = list(roots)
        for k, sg in zip(free, signs):
            if sg == -1:
                coords[k] = -coords[k]
        points.append(ThetaPoint2(field, coords))
    return points


def level2_to_level4(point: ThetaPoint2):
    """Going up: enumerate all square-root sign choices, solve the linear
    systems, and keep every candidate that satisfies all 26 relations.

    Raises NoLift when one of the ten radicands has no root in the field;
    the surviving list is deduplicated projectively.
    """
    field = point.field
    b = point.coords
    q = [bi ** 2 for bi in b]
    inv2 = field.element(2).inverse()
    inv4 = field.element(4).inverse()
    radicands = [
        q[0] + q[1] + q[2] + q[3],
        q[0] - q[1] + q[2] - q[3],
        q[0] + q[1] - q[2] - q[3],
        q[0] - q[1] - q[2] + q[3],
        (b[1]*b[0] + b[3]*b[2]) * inv2,   # (a01+a21)^2
        (b[1]*b[0] - b[3]*b[2]) * inv2,   # (a01-a21)^2
        (b[3]*b[0] + b[1]*b[2]) * inv2,   # (a11+a13)^2
        (b[3]*b[0] - b[1]*b[2]) * inv2,   # (a11-a13)^2
        (b[2]*b[0] + b[3]*b[1]) * inv2,   # (a10+a12)^2
        (b[2]*b[0] - b[3]*b[1]) * inv2,   # (a10-a12)^2
    ]
    roots = []
    for k, rk in enumerate(radicands):
        s = rk.sqrt()
        if s is None:
            raise NoLift(f"radicand {k + 1} has no square root in the field")
        roots.append(s)
    free = [k for k in range(10) if not roots[k].is_zero()]
    if free:
        free = free[1:]  # pin the first nonzero root: global sign quotient
    mum = mumford_relations()
    candidates = []
    seen_keys = set()
    for signs in itertools.product((1, -1), repeat=len(free)):
        s = list(roots)
        for k, sg in zip(free, signs):
            if sg == -1:
                s[k] = -s[k]
        a00 = (s[0] + s[1] + s[2] + s[3]) * inv4
        a02 = (s[0] - s[1] + s[2] - s[3]) * inv4
        a20 = (s[0] + s[1] - s[2] - s[3]) * inv4
        a22 = (s[0] - s[1] - s[2] + s[3]) * inv4
        a01 = (s[4] + s[5]) * inv2
        a21 = (s[4] - s[5]) * inv2
        a11 = (s[6] + s[7]) * inv2
        a13 = (s[6] - s[7]) * inv2
        a10 = (s[8] + s[9]) * inv2
        a12 = (s[8] - s[9]) * inv2
        reduced = {(0, 0): a00, (0, 1): a01, (0, 2): a02, (1, 0): a10,
                   (1, 1): a11, (1, 2): a12, (1, 3): a13, (2, 0): a20,
                   (2, 1): a21, (2, 2): a22}
        if all(v.is_zero() for v in reduced.values()):
            continue
        cand = ThetaPoint4.from_reduced(field, reduced)
        asg = cand.assignment()
        cache = {}
        if any(not rel.evaluate(asg, field, _cache=cache).is_zero()
               for rel in mum):
            continue
        key = _projective_key(cand)
        if key not in seen_keys:
            seen_keys.add(key)
            candidates.append(cand)
    return candidates


def _projective_key(point: ThetaPoint4):
    anchor = next(u for u in ALL_INDEXES if not point.coords[u].is_zero())
    inv = point.coords[anchor].inverse()
    return tuple((point.coords[u] * inv).coeffs for u in ALL_INDEXES)


# ---------------------------------------------------------------------------
# Rosenhain recovery
# ---------------------------------------------------------------------------


def rosenhain_from_level2(point: ThetaPoint2):
    """Rosenhain triples consistent with the scale-invariant Thomae ratios
    of the level-2 point, branch assignment (0, 1, l1, l2, l3, infinity).

    Writing T1..T4 for the four signed combinations of the coordinate
    squares, the ratio system forces l1 = +-T1*T2/(T3*T4) and a quadratic
    l2^2 + (beta/alpha)*l2 + B = 0 with B = T2^2/T4^2, C = T3^2/T4^2,
    alpha = C*l1 - B, beta = B*(1+B) - C*(B + l1^2); then l3 = l1*l2/B.
    Every candidate is validated against the forward Thomae products, so
    the returned list is exactly the set of consistent nondegenerate
    curves.
    """
    field = point.field
    q = [bi ** 2 for bi in point.coords]
    T = (
        q[0] + q[1] + q[2] + q[3],
        q[0] - q[1] + q[2] - q[3],
        q[0] + q[1] - q[2] - q[3],
        q[0] - q[1] - q[2] + q[3],
    )
    for k, t in enumerate(T):
        if t.is_zero():
            raise DegenerateThetaPoint(f"combination T{k + 1} vanishes")
    Tsq = [t ** 2 for t in T]
    target = tuple(Tsq)
    inv_t3t4 = (T[2] * T[3]).inverse()
    lam1_base = T[0] * T[1] * inv_t3t4
    B = Tsq[1] * Tsq[3].inverse()
    C = Tsq[2] * Tsq[3].inverse()
    one = field.one()
    inv2 = field.element(2).inverse()
    invB = B.inverse()
    solutions = []
    seen = set()
    missing_root = False
    for sign in (1, -1):
        lam1 = lam1_base if sign == 1 else -lam1_base
        alpha = C * lam1 - B
        if alpha.is_zero():
            # the branch degenerates to l3 = l2 (or l2 = 0), never a valid curve
            continue
        beta_over_alpha = (B * (one + B) - C * (B + lam1 ** 2)) * alpha.inverse()
        disc = beta_over_alpha ** 2 - 4 * B
        root = disc.sqrt()
        if root is None:
            missing_root = True
            continue
        for pm in (1, -1):
            lam2 = (-beta_over_alpha + (root if pm == 1 else -root)) * inv2
            lam3 = lam1 * lam2 * invB
            try:
                curve = RosenhainCurve(field, (lam1, lam2, lam3))
            except InvalidRosenhain:
                continue
            r = thomae_squares(curve.branch_points())
            if not _proportional(r, target):
                continue
            key = tuple(curve.lambdas)
            if key not in seen:
                seen.add(key)
                solutions.append(curve)
    if not solutions and missing_root:
        raise NoSolutionInField("required square roots are absent")
    return solutions


def _proportional(u, v) -> bool:
    anchor = next((k for k in range(len(u)) if not u[k].is_zero()), None)
    if anchor is None:
        return all(x.is_zero() for x in v)
    if v[anchor].is_zero():
        return False
    c, d = u[anchor], v[anchor]
    return all(u[k] * d == v[k] * c for k in range(len(u)))


# ---------------------------------------------------------------------------
# real-multiplication decision test
# ---------------------------------------------------------------------------


def rm_test(curve: RosenhainCurve, config: Optional[SearchConfig] = None
            ) -> Decision:
    """Decide whether the curve's Jacobian admits the sqrt(3) structure by
    exhibiting a level-4 theta null point satisfying the moduli relations
    and the real-multiplication relations.

    Branch orderings of (0, 1, l1, l2, l3) are enumerated in lexicographic
    position order, then Thomae sign classes, then extraction sign classes,
    then lift candidates; the first witness in this serial order is
    returned.  A negative decision means no witness under the enumerated
    theta structures and limits.
    """
    if config is None:
        config = SearchConfig()
    field = curve.field
    if field.p % 3 == 0:
        raise PipelineError("the decision test needs 6 invertible")
    rm = rm_relations()
    base_values = curve.branch_points().values
    orderings = itertools.islice(
        itertools.permutations(range(5)), config.max_orderings)
    orderings_tried = 0
    candidates_checked = 0
    limit_reached = False
    for perm in orderings:
        orderings_tried += 1
        branch = BranchPoints(field, tuple(base_values[k] for k in perm))
        r = thomae_squares(branch)
        try:
            square_classes = level2_squares_from_thomae(r, field)
        except NoSquareRoots:
            continue
        for squares in square_classes:
            data = Level2Data(field, squares, products=None)
            if data.all_zero():
                continue
            for b in level2_point_from_data(data):
                try:
                    lifts = level2_to_level4(b)
                except NoLift:
                    continue
                for cand in lifts:
                    candidates_checked += 1
                    if candidates_checked > config.max_candidates:
                        limit_reached = True
                        break
                    asg = cand.assignment()
                    cache = {}
                    if all(rel.evaluate(asg, field, _cache=cache).is_zero()
                           for rel in rm):
                        return Decision(True, cand, field, orderings_tried,
                                        candidates_checked)
                if limit_reached:
                    break
            if limit_reached:
                break
        if limit_reached:
            break
    if candidates_checked == 0 and not limit_reached:
        if config.auto_extend and field.is_prime_field:
            return _rm_test_extended(curve, config)
        raise FieldTooSmall(
            "every branch ordering dies at a missing square root",
            suggested_degree=2 * field.degree)
    return Decision(False, None, field, orderings_tried, candidates_checked,
                    limit_reached)


def _rm_test_extended(curve: RosenhainCurve, config: SearchConfig) -> Decision:
    """Retry over the quadratic extension by a non-residue."""
    from . import field as field_mod
    base = curve.field
    g = base._nonresidue()[0]
    ext = field_mod.extend(base, [(-g) % base.p, 0, 1], name="t")
    lifted = RosenhainCurve(
        ext, [int(v.coeffs[0]) for v in curve.lambdas])
    inner = SearchConfig(config.max_orderings, config.max_candidates,
                         auto_extend=False)
    return rm_test(lifted, inner)


# ---------------------------------------------------------------------------
# split surfaces
# ---------------------------------------------------------------------------


def is_elliptic_theta_null(x: Sequence[FieldElement]) -> bool:
    """Check the level-4 elliptic theta null conditions: x1 = x3 and
    (x0^2 + x2^2) x0 x2 = 2 x1^4, with not all coordinates zero."""
    if len(x) != 4 or all(v.is_zero() for v in x):
        return False
    if x[1] != x[3]:
        return False
    return (x[0]**2 + x[2]**2) * x[0] * x[2] == 2 * x[1]**4


def product_point(x: Sequence, y: Sequence, field: Field) -> ThetaPoint4:
    """The level-4 theta null point of a product of elliptic curves:
    a_{ij} = x_i * y_j."""
    xs = tuple(field.element(v) for v in x)
    ys = tuple(field.element(v) for v in y)
    for name, tup in (("first", xs), ("second", ys)):
        if not is_elliptic_theta_null(tup):
            raise NotEllipticThetaNull(
                f"{name} tuple is not an elliptic theta null point")
    coords = {(i, j): xs[i] * ys[j] for (i, j) in ALL_INDEXES}
    return ThetaPoint4(field, coords)
