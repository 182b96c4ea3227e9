"""Exact arithmetic in prime fields F_p and single-step extensions F_p[x]/(f).

Coefficients are arbitrary-precision integers (gmpy2.mpz); every operation
is exact.  Towers are capped at depth one: a field is either F_p or a
degree-n extension of F_p presented by a monic modulus polynomial.
"""

from __future__ import annotations

import re
from typing import Optional, Sequence

import gmpy2
from gmpy2 import mpz


class FieldError(Exception):
    """Base class for everything raised by this module."""


class EvenCharacteristic(FieldError):
    pass


class CompositeCharacteristic(FieldError):
    pass


class NotMonic(FieldError):
    pass


class TowerTooDeep(FieldError):
    pass


class ReducibleModulus(FieldError):
    pass


class FieldMismatch(FieldError):
    pass


class DivisionByZero(FieldError, ZeroDivisionError):
    pass


class ElementSyntaxError(FieldError, ValueError):
    pass


class CoefficientCountMismatch(ElementSyntaxError):
    pass


class FieldFileError(FieldError, ValueError):
    pass


# Deterministic Miller-Rabin bases.  The first twelve are a proven witness
# set for n < 3.3 * 10^24 (covers everything below 2^64); above that we run
# the fixed 40-round schedule with the first 40 primes as bases.
_INT_TYPES = (int, type(mpz(0)))

_MR_BASES_SMALL = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_BASES_LARGE = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139,
    149, 151, 157, 163, 167, 173,
)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin primality test with a fixed, deterministic base set."""
    n = int(n)
    if n < 2:
        return False
    for q in _MR_BASES_SMALL:
        if n == q:
            return True
        if n % q == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = _MR_BASES_SMALL if n < (1 << 64) else _MR_BASES_LARGE
    for a in bases:
        x = gmpy2.powmod(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = (x * x) % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Field:
    """A prime field F_p or a single extension F_p[name]/(f).

    Instances are immutable; all cached data (Frobenius table, square-root
    setup) is derived and write-once, so unrestricted concurrent use is safe.
    """

    __slots__ = (
        "p", "degree", "modulus", "generator_name", "q",
        "_mod_tail", "_frob_powers", "_ts_data",
    )

    def __init__(self, p: int, modulus: Optional[Sequence[int]] = None,
                 generator_name: str = "x"):
        p = mpz(p)
        if p % 2 == 0:
            raise EvenCharacteristic(f"characteristic {p} is even")
        if p < 3 or not is_probable_prime(p):
            raise CompositeCharacteristic(f"characteristic {p} is not prime")
        self.p = p
        if modulus is None:
            self.degree = 1
            self.modulus = None
            self.generator_name = None
        else:
            coeffs = tuple(mpz(c) % p for c in modulus)
            if len(coeffs) < 3:
                raise FieldError("extension degree must be at least 2")
            if coeffs[-1] != 1:
                raise NotMonic("modulus polynomial must be monic")
            self.degree = len(coeffs) - 1
            self.modulus = coeffs
            self.generator_name = generator_name
        self.q = self.p ** self.degree
        # nonzero low-order modulus coefficients, used in reduction
        if self.modulus is not None:
            self._mod_tail = tuple(
                (j, c) for j, c in enumerate(self.modulus[:-1]) if c != 0)
        else:
            self._mod_tail = None
        self._frob_powers = None
        self._ts_data = None

    # -- identity ---------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Field):
            return NotImplemented
        return (self.p == other.p and self.modulus == other.modulus
                and self.generator_name == other.generator_name)

    def __hash__(self):
        return hash((int(self.p), self.modulus, self.generator_name))

    def __repr__(self):
        if self.degree == 1:
            return f"F_{self.p}"
        return f"F_{self.p}^{self.degree} = F_p[{self.generator_name}]/(f)"

    @property
    def is_prime_field(self) -> bool:
        return self.degree == 1

    # -- element construction ---------------------------------------------

    def element(self, value) -> "FieldElement":
        """Make an element from an int (constant) or coefficient sequence."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatch("element belongs to a different field")
            return value
        if isinstance(value, _INT_TYPES):
            coeffs = [mpz(value) % self.p] + [mpz(0)] * (self.degree - 1)
            return FieldElement(self, tuple(coeffs))
        coeffs = [mpz(c) % self.p for c in value]
        if len(coeffs) > self.degree:
            raise CoefficientCountMismatch(
                f"{len(coeffs)} coefficients for degree-{self.degree} field")
        coeffs += [mpz(0)] * (self.degree - len(coeffs))
        return FieldElement(self, tuple(coeffs))

    def zero(self) -> "FieldElement":
        return FieldElement(self, (mpz(0),) * self.degree)

    def one(self) -> "FieldElement":
        return self.element(1)

    def generator(self) -> "FieldElement":
        """The class of the adjoined variable (extension fields only)."""
        if self.degree == 1:
            raise FieldError("prime field has no adjoined generator")
        return FieldElement(
            self, (mpz(0), mpz(1)) + (mpz(0),) * (self.degree - 2))

    def random_element(self, rng) -> "FieldElement":
        p = int(self.p)
        return FieldElement(
            self, tuple(mpz(rng.randrange(p)) for _ in range(self.degree)))

    # -- parsing / formatting ----------------------------------------------

    _PRIME_RE = re.compile(r"-?\d+$")
    _EXT_RE = re.compile(r"\[(-?\d+(?:,-?\d+)*)\]$")

    def parse_element(self, text: str) -> "FieldElement":
        """Parse the element grammar: a decimal residue, or `[c0,c1,...]`
        with exactly one coefficient per basis vector."""
        text = text.strip()
        if self.degree == 1 and self._PRIME_RE.match(text):
            return self.element(int(text))
        m = self._EXT_RE.match(text)
        if not m:
            raise ElementSyntaxError(f"bad element literal: {text!r}")
        coeffs = [int(t) for t in m.group(1).split(",")]
        if len(coeffs) != self.degree:
            raise CoefficientCountMismatch(
                f"expected {self.degree} coefficients, got {len(coeffs)}")
        return self.element(coeffs)

    def format_element(self, a: "FieldElement") -> str:
        if a.field != self:
            raise FieldMismatch("element belongs to a different field")
        if self.degree == 1:
            return str(int(a.coeffs[0]))
        return "[" + ",".join(str(int(c)) for c in a.coeffs) + "]"

    # -- field file format ---------------------------------------------------

    def to_spec(self) -> str:
        lines = [f"prime {int(self.p)}"]
        if self.modulus is not None:
            coeffs = " ".join(str(int(c)) for c in self.modulus)
            lines.append(f"ext {self.generator_name} {coeffs}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_spec(cls, text: str, check_irreducible: bool = False) -> "Field":
        """Parse a field file: `prime <p>` then optional `ext <name> <c...>`."""
        lines = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if line:
                lines.append(line)
        if not lines:
            raise FieldFileError("empty field description")
        head = lines[0].split()
        if len(head) != 2 or head[0] != "prime":
            raise FieldFileError(f"bad field header: {lines[0]!r}")
        try:
            p = int(head[1])
        except ValueError:
            raise FieldFileError(f"bad prime literal: {head[1]!r}") from None
        base = make_prime_field(p)
        if len(lines) == 1:
            return base
        if len(lines) > 2:
            raise FieldFileError("unexpected extra lines in field file")
        ext_parts = lines[1].split()
        if len(ext_parts) < 4 or ext_parts[0] != "ext":
            raise FieldFileError(f"bad extension line: {lines[1]!r}")
        name = ext_parts[1]
        try:
            coeffs = [int(t) for t in ext_parts[2:]]
        except ValueError:
            raise FieldFileError("bad modulus coefficient") from None
        return extend(base, coeffs, name, check_irreducible=check_irreducible)

    @classmethod
    def from_file(cls, path, check_irreducible: bool = False) -> "Field":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_spec(fh.read(), check_irreducible=check_irreducible)

    # -- internal arithmetic on coefficient tuples --------------------------

    def _reduce_product(self, c: list) -> tuple:
        """Reduce a raw product coefficient list (length 2n-1) mod (p, f)."""
        n = self.degree
        p = self.p
        for i in range(2 * n - 2, n - 1, -1):
            ci = c[i]
            if ci:
                for j, fj in self._mod_tail:
                    c[i - n + j] -= ci * fj
        return tuple(ci % p for ci in c[:n])

    def _mul(self, a: tuple, b: tuple) -> tuple:
        n = self.degree
        if n == 1:
            return ((a[0] * b[0]) % self.p,)
        c = [mpz(0)] * (2 * n - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        c[i + j] += ai * bj
        return self._reduce_product(c)

    def _inv(self, a: tuple) -> tuple:
        p = self.p
        if self.degree == 1:
            if a[0] == 0:
                raise DivisionByZero("inverse of zero")
            return (gmpy2.invert(a[0], p),)
        # extended Euclid in F_p[x] against the modulus polynomial
        r0 = list(self.modulus)
        r1 = [c for c in a]
        while r1 and r1[-1] == 0:
            r1.pop()
        if not r1:
            raise DivisionByZero("inverse of zero")
        s0, s1 = [mpz(0)], [mpz(1)]
        while r1:
            q, r = _poly_divmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1, p), p)
        # r0 is a unit (gcd with an irreducible modulus)
        if len(r0) != 1:
            raise DivisionByZero("element is a zero divisor; modulus reducible?")
        c = gmpy2.invert(r0[0], p)
        out = [mpz(0)] * self.degree
        for i, si in enumerate(s0):
            out[i] = (si * c) % p
        return tuple(out)

    # -- Frobenius machinery (extensions only) -------------------------------

    def _frobenius_powers(self):
        """Cache [g^0, g^p, g^2p, ...] for g the generator class, as tuples."""
        if self._frob_powers is None:
            one = (mpz(1),) + (mpz(0),) * (self.degree - 1)
            gen = (mpz(0), mpz(1)) + (mpz(0),) * (self.degree - 2)
            gp = self._pow(gen, self.p)
            rows = [one]
            for _ in range(1, self.degree):
                rows.append(self._mul(rows[-1], gp))
            self._frob_powers = tuple(rows)
        return self._frob_powers

    def _frobenius(self, a: tuple) -> tuple:
        rows = self._frobenius_powers()
        acc = [mpz(0)] * self.degree
        for i, ci in enumerate(a):
            if ci:
                row = rows[i]
                for k in range(self.degree):
                    acc[k] += ci * row[k]
        return tuple(c % self.p for c in acc)

    def _norm(self, a: tuple):
        """Field norm down to F_p: the product of all Frobenius conjugates."""
        r = a
        b = a
        for _ in range(self.degree - 1):
            b = self._frobenius(b)
            r = self._mul(r, b)
        return r[0]

    def _pow(self, a: tuple, e) -> tuple:
        e = mpz(e)
        if self.degree == 1:
            return (gmpy2.powmod(a[0], e, self.p),)
        one = (mpz(1),) + (mpz(0),) * (self.degree - 1)
        if e == 0:
            return one
        r = one
        b = a
        while e:
            if e & 1:
                r = self._mul(r, b)
            b = self._mul(b, b)
            e >>= 1
        return r

    # -- quadratic residues --------------------------------------------------

    def _is_square(self, a: tuple) -> bool:
        # Euler criterion a^((q-1)/2) = 1; over extensions evaluated through
        # the norm, since a^((q-1)/2) = N(a)^((p-1)/2).
        if all(c == 0 for c in a):
            return True
        if self.degree == 1:
            n = a[0]
        else:
            n = self._norm(a)
        return gmpy2.powmod(n, (self.p - 1) // 2, self.p) == 1

    def _nonresidue(self) -> tuple:
        """Deterministic quadratic non-residue: small constants, then g + c."""
        one = (mpz(1),) + (mpz(0),) * (self.degree - 1)
        for c in range(2, min(int(self.p), 64)):
            cand = tuple(x * c % self.p for x in one)
            if not self._is_square(cand):
                return cand
        if self.degree > 1:
            gen = (mpz(0), mpz(1)) + (mpz(0),) * (self.degree - 2)
            for c in range(0, 4096):
                cand = (gen[0] + c,) + gen[1:]
                cand = tuple(x % self.p for x in cand)
                if not self._is_square(cand):
                    return cand
        raise FieldError("no quadratic non-residue found")

    def _ts_setup(self):
        if self._ts_data is None:
            m = self.q - 1
            s = 0
            while m % 2 == 0:
                m //= 2
                s += 1
            g = self._nonresidue()
            self._ts_data = (m, s, self._pow(g, m))
        return self._ts_data

    def _sqrt(self, a: tuple) -> Optional[tuple]:
        zero = (mpz(0),) * self.degree
        if a == zero:
            return zero
        if not self._is_square(a):
            return None
        if self.q % 4 == 3:
            return self._pow(a, (self.q + 1) // 4)
        # Tonelli-Shanks over F_q
        m, s, gm = self._ts_setup()
        one = (mpz(1),) + (mpz(0),) * (self.degree - 1)
        x = self._pow(a, (m + 1) // 2)
        t = self._mul(self._mul(x, x), self._inv(a))
        g = gm
        r = s
        while t != one:
            i = 0
            tt = t
            while tt != one:
                tt = self._mul(tt, tt)
                i += 1
            b = g
            for _ in range(r - i - 1):
                b = self._mul(b, b)
            x = self._mul(x, b)
            g = self._mul(b, b)
            t = self._mul(t, g)
            r = i
        return x


class FieldElement:
    """An element of a Field, stored as a reduced coefficient vector."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs

    # -- helpers -------------------------------------------------------------

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch("operands belong to different fields")
            return other
        if isinstance(other, _INT_TYPES):
            return self.field.element(other)
        return NotImplemented

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.field.p
        return FieldElement(self.field, tuple(
            (a + b) % p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.field.p
        return FieldElement(self.field, tuple(
            (a - b) % p for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, tuple((-a) % p for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, _INT_TYPES):
            p = self.field.p
            k = mpz(other) % p
            return FieldElement(self.field,
                                tuple((k * a) % p for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field._mul(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e):
        if not isinstance(e, _INT_TYPES):
            return NotImplemented
        if e < 0:
            return FieldElement(
                self.field, self.field._pow(self.inverse().coeffs, -e))
        return FieldElement(self.field, self.field._pow(self.coeffs, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field._inv(self.coeffs))

    # -- predicates -----------------------------------------------------------

    def is_square(self) -> bool:
        """Euler criterion: a^((q-1)/2) = 1, with 0 counted as a square."""
        return self.field._is_square(self.coeffs)

    def sqrt(self) -> Optional["FieldElement"]:
        """Canonical square root, or None if the element is a non-square.

        Of the pair {r, -r} this returns the one whose coefficient vector is
        lexicographically smaller read from the highest coefficient down.
        """
        r = self.field._sqrt(self.coeffs)
        if r is None:
            return None
        rr = FieldElement(self.field, r)
        return min(rr, -rr, key=lambda e: tuple(reversed(e.coeffs)))

    # -- identity --------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, _INT_TYPES):
            return self == self.field.element(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __str__(self):
        return self.field.format_element(self)

    def __repr__(self):
        return f"{self} in {self.field!r}"


# -- module-level constructors ---------------------------------------------


def make_prime_field(p: int) -> Field:
    """Descriptor for F_p; p must be an odd (probable) prime."""
    return Field(p)


def extend(base: Field, modulus: Sequence[int], name: str = "x",
           check_irreducible: bool = False) -> Field:
    """Descriptor for F_p[name]/(f), f given by its coefficient list (monic).

    Irreducibility of f is only verified when check_irreducible is set; the
    check is the standard gcd-with-Frobenius-powers criterion.
    """
    if not base.is_prime_field:
        raise TowerTooDeep("only one extension step over a prime field")
    field = Field(base.p, modulus, generator_name=name)
    if check_irreducible and not _is_irreducible(field.modulus, field.p):
        raise ReducibleModulus("modulus polynomial is reducible")
    return field


# -- dense polynomial helpers over F_p (used by inversion and the
#    irreducibility check; coefficient lists are little-endian) -------------


def _poly_trim(u: list) -> list:
    while u and u[-1] == 0:
        u.pop()
    return u


def _poly_sub(u: list, v: list, p) -> list:
    w = [mpz(0)] * max(len(u), len(v))
    for i, ui in enumerate(u):
        w[i] = ui
    for i, vi in enumerate(v):
        w[i] = (w[i] - vi) % p
    return _poly_trim(w)


def _poly_mul(u: list, v: list, p) -> list:
    if not u or not v:
        return []
    w = [mpz(0)] * (len(u) + len(v) - 1)
    for i, ui in enumerate(u):
        if ui:
            for j, vj in enumerate(v):
                w[i + j] = (w[i + j] + ui * vj) % p
    return _poly_trim(w)

def _poly_divmod(u: list, v: list, p):
    u = [c % p for c in u]
    q = [mpz(0)] * max(0, len(u) - len(v) + 1)
    inv_lead = gmpy2.invert(v[-1], p)
    for i in range(len(u) - len(v), -1, -1):
        t = (u[i + len(v) - 1] * inv_lead) % p
        q[i] = t
        if t:
            for j in range(len(v)):
                u[i + j] = (u[i + j] - t * v[j]) % p
    return _poly_trim(q), _poly_trim(u)


def _poly_gcd(u: list, v: list, p) -> list:
    u, v = [c % p for c in u], [c % p for c in v]
    _poly_trim(u)
    _poly_trim(v)
    while v:
        _, r = _poly_divmod(u, v, p)
        u, v = v, r
    if u:
        inv_lead = gmpy2.invert(u[-1], p)
        u = [(c * inv_lead) % p for c in u]
    return u


def _poly_powmod(base: list, e, mod: list, p) -> list:
    e = mpz(e)
    r = [mpz(1)]
    b = list(base)
    _, b = _poly_divmod(b, mod, p)
    while e:
        if e & 1:
            r = _poly_divmod(_poly_mul(r, b, p), mod, p)[1]
        b = _poly_divmod(_poly_mul(b, b, p), mod, p)[1]
        e >>= 1
    return r


def _is_irreducible(f: Sequence, p) -> bool:
    """Rabin's criterion: x^(p^n) = x mod f, and for every prime l | n the
    polynomial x^(p^(n/l)) - x is coprime to f."""
    f = [mpz(c) for c in f]
    n = len(f) - 1
    x = [mpz(0), mpz(1)]
    # prime divisors of n
    divs = []
    t = n
    d = 2
    while d * d <= t:
        if t % d == 0:
            divs.append(d)
            while t % d == 0:
                t //= d
        d += 1
    if t > 1:
        divs.append(t)
    # iterated Frobenius images of x: frob[k] = x^(p^k) mod f
    frob = x
    images = {0: x}
    for k in range(1, n + 1):
        frob = _poly_powmod(frob, p, f, p)
        images[k] = frob
    if _poly_sub(images[n], x, p):
        return False
    for l in divs:
        g = _poly_gcd(_poly_sub(images[n // l], x, p), f, p)
        if len(g) != 1:
            return False
    return True
