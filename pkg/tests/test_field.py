import random

import pytest

import rmtheta as rt
from rmtheta.field import (CoefficientCountMismatch, CompositeCharacteristic,
                           DivisionByZero, ElementSyntaxError,
                           EvenCharacteristic, Field, FieldMismatch, NotMonic,
                           ReducibleModulus, TowerTooDeep, is_probable_prime)


def test_make_prime_field_basic():
    F = rt.make_prime_field(7)
    assert F.is_prime_field and F.q == 7


def test_make_prime_field_rejects_composite():
    with pytest.raises(CompositeCharacteristic):
        rt.make_prime_field(9)
    with pytest.raises(CompositeCharacteristic):
        rt.make_prime_field(1)


def test_make_prime_field_rejects_even():
    with pytest.raises(EvenCharacteristic):
        rt.make_prime_field(2)
    with pytest.raises(EvenCharacteristic):
        rt.make_prime_field(100)


def test_example_prime_accepted(example_field):
    # the bundled 301-digit characteristic passes the primality gate
    assert example_field.p > 10**300
    assert is_probable_prime(example_field.p)


def test_extend_validations():
    F7 = rt.make_prime_field(7)
    with pytest.raises(NotMonic):
        rt.extend(F7, [1, 0, 3])
    F49 = rt.extend(F7, [1, 0, 1])
    with pytest.raises(TowerTooDeep):
        rt.extend(F49, [1, 0, 1])


def test_extend_reducible_detected_in_checking_mode():
    F3 = rt.make_prime_field(3)
    # t^2 + 2 = (t+1)(t+2) over F_3
    with pytest.raises(ReducibleModulus):
        rt.extend(F3, [2, 0, 1], check_irreducible=True)
    # t^4 + 1 = (t^2+t+2)(t^2+2t+2) over F_3
    with pytest.raises(ReducibleModulus):
        rt.extend(F3, [1, 0, 0, 0, 1], check_irreducible=True)
    # trusted when the check is off
    rt.extend(F3, [2, 0, 1], check_irreducible=False)


def test_extend_irreducible_passes_check():
    F3 = rt.make_prime_field(3)
    # exhaustive root check: t^2+1 has no root over F_3
    assert all((t * t + 1) % 3 != 0 for t in range(3))
    F9 = rt.extend(F3, [1, 0, 1], check_irreducible=True)
    assert F9.q == 9
    F7 = rt.make_prime_field(7)
    F343 = rt.extend(F7, [3, 0, 0, 1], check_irreducible=True)  # t^3+3
    assert F343.q == 343


def test_example_modulus_is_irreducible(example_field):
    coeffs = [int(c) for c in example_field.modulus]
    base = rt.make_prime_field(example_field.p)
    F = rt.extend(base, coeffs, name="x", check_irreducible=True)
    assert F.q == example_field.q


def test_basic_arithmetic_prime():
    F7 = rt.make_prime_field(7)
    assert F7.element(3) * F7.element(5) == F7.element(1)
    a = F7.element(4)
    assert a + (-a) == F7.zero()
    assert F7.element(3) - F7.element(5) == F7.element(5)


def test_basic_arithmetic_extension(F9):
    t = F9.generator()
    assert t * t == F9.element(2)  # t^2 = -1 = 2
    a = F9.element([1, 2])
    assert a + (-a) == F9.zero()
    assert (a * a.inverse()) == F9.one()


def test_field_mismatch():
    F7 = rt.make_prime_field(7)
    F11 = rt.make_prime_field(11)
    with pytest.raises(FieldMismatch):
        F7.element(1) + F11.element(1)


def test_inverse():
    F7 = rt.make_prime_field(7)
    assert F7.element(3).inverse() == F7.element(5)
    assert F7.one().inverse() == F7.one()
    with pytest.raises(DivisionByZero):
        F7.zero().inverse()


def test_pow():
    F7 = rt.make_prime_field(7)
    assert F7.element(3) ** 6 == F7.one()
    assert F7.element(3) ** 0 == F7.one()
    assert F7.element(3) ** -1 == F7.element(5)


def test_pow_extension(F9):
    t = F9.generator()
    assert t ** 8 == F9.one()
    assert t ** 0 == F9.one()


def test_frobenius_fixed_point_small_fields(F9, F25):
    # a^q = a for every a over small q
    for F in (F9, F25):
        p = int(F.p)
        for c0 in range(p):
            for c1 in range(p):
                a = F.element([c0, c1])
                assert a ** int(F.q) == a


def test_is_square_prime_examples():
    F7 = rt.make_prime_field(7)
    assert F7.element(2).is_square()
    assert not F7.element(3).is_square()
    assert F7.one().is_square()
    assert F7.zero().is_square()


def test_sqrt_examples():
    F7 = rt.make_prime_field(7)
    assert F7.element(2).sqrt() == F7.element(3)  # canonical of {3, 4}
    assert F7.element(3).sqrt() is None
    assert F7.zero().sqrt() == F7.zero()


def test_sqrt_extension_canonical(F9):
    # sqrt(2) = sqrt(-1) = +-t; the canonical pick has the smaller top
    # coefficient, so t rather than 2t
    r = F9.element(2).sqrt()
    assert r == F9.generator()
    assert r * r == F9.element(2)


def test_sqrt_agrees_with_exhaustive_search_spot():
    # includes p = 1 mod 4 (Tonelli-Shanks branch) and p = 3 mod 4
    for p in (3, 5, 13, 17, 101):
        F = rt.make_prime_field(p)
        squares = {(x * x) % p for x in range(p)}
        for a in range(p):
            elem = F.element(a)
            assert elem.is_square() == (a in squares)
            r = elem.sqrt()
            if a in squares:
                assert r is not None and r * r == elem
            else:
                assert r is None


def test_is_square_matches_euler_criterion_extension(F9, F25, F49):
    # the norm shortcut must agree with the defining power
    for F in (F9, F25, F49):
        p = int(F.p)
        exp = (int(F.q) - 1) // 2
        for c0 in range(p):
            for c1 in range(p):
                a = F.element([c0, c1])
                if a.is_zero():
                    assert a.is_square()
                    continue
                assert a.is_square() == (a ** exp == F.one())


def test_sqrt_exhaustive_extension(F9, F25):
    for F in (F9, F25):
        p = int(F.p)
        squares = set()
        for c0 in range(p):
            for c1 in range(p):
                a = F.element([c0, c1])
                squares.add((a * a).coeffs)
        for c0 in range(p):
            for c1 in range(p):
                a = F.element([c0, c1])
                r = a.sqrt()
                if a.coeffs in squares:
                    assert r is not None and r * r == a
                else:
                    assert r is None


def test_sqrt_of_squares_roundtrip_random(F49):
    rng = random.Random(7)
    for _ in range(200):
        a = F49.random_element(rng)
        r = (a * a).sqrt()
        assert r is not None and r * r == a * a
        assert r == a or r == -a


def test_parse_format_roundtrip():
    F7 = rt.make_prime_field(7)
    assert F7.parse_element("5") == F7.element(5)
    assert str(F7.element(5)) == "5"
    F343 = rt.extend(rt.make_prime_field(7), [3, 0, 0, 1])
    e = F343.parse_element("[2,0,1]")
    assert e == F343.element([2, 0, 1])
    assert str(e) == "[2,0,1]"
    assert F343.parse_element(str(e)) == e


def test_parse_errors():
    F7 = rt.make_prime_field(7)
    with pytest.raises(CoefficientCountMismatch):
        F7.parse_element("[1,2]")
    with pytest.raises(ElementSyntaxError):
        F7.parse_element("abc")
    F49 = rt.extend(F7, [1, 0, 1])
    with pytest.raises(CoefficientCountMismatch):
        F49.parse_element("[1,2,3]")
    with pytest.raises(ElementSyntaxError):
        F49.parse_element("[1, 2]")  # no spaces inside brackets


def test_field_file_roundtrip(example_field):
    spec = example_field.to_spec()
    again = Field.from_spec(spec)
    assert again == example_field
    F7 = rt.make_prime_field(7)
    assert Field.from_spec(F7.to_spec()) == F7


def test_field_file_comments():
    F = Field.from_spec("# header\nprime 7\n# trailing\n")
    assert F == rt.make_prime_field(7)


def test_field_axioms_random():
    rng = random.Random(20260810)
    F9 = rt.extend(rt.make_prime_field(3), [1, 0, 1], name="t")
    Fbig = rt.make_prime_field((1 << 89) - 1)
    for F in (rt.make_prime_field(101), F9, Fbig):
        for _ in range(500):
            a = F.random_element(rng)
            b = F.random_element(rng)
            c = F.random_element(rng)
            assert (a + b) + c == a + (b + c)
            assert a + b == b + a
            assert (a * b) * c == a * (b * c)
            assert a * b == b * a
            assert a * (b + c) == a * b + a * c
            assert a + (-a) == F.zero()
            if not b.is_zero():
                assert b * b.inverse() == F.one()


def test_element_int_interop():
    F7 = rt.make_prime_field(7)
    a = F7.element(3)
    assert 2 * a == F7.element(6)
    assert a + 5 == F7.element(1)
    assert a == 3 and a != 4
