import itertools

import pytest
from importlib import resources

import rmtheta as rt
from rmtheta.field import Field
from rmtheta.pipeline import ThetaPoint4, RosenhainCurve


def _data(name: str) -> str:
    return (resources.files("rmtheta") / "data" / name).read_text()


@pytest.fixture(scope="session")
def F7():
    return rt.make_prime_field(7)


@pytest.fixture(scope="session")
def F101():
    return rt.make_prime_field(101)


@pytest.fixture(scope="session")
def F9():
    return rt.extend(rt.make_prime_field(3), [1, 0, 1], name="t")


@pytest.fixture(scope="session")
def F25():
    return rt.extend(rt.make_prime_field(5), [2, 0, 1], name="t")


@pytest.fixture(scope="session")
def F49():
    return rt.extend(rt.make_prime_field(7), [1, 0, 1], name="t")


@pytest.fixture(scope="session")
def example_field():
    """The bundled degree-8 field of the worked example."""
    return Field.from_spec(_data("example_field_p8.txt"))


@pytest.fixture(scope="session")
def example_field_quadratic():
    return Field.from_spec(_data("example_field_p2.txt"))


@pytest.fixture(scope="session")
def example_point(example_field):
    return ThetaPoint4.parse(_data("example_point.txt"), example_field)


@pytest.fixture(scope="session")
def example_curve(example_field):
    """The bundled Rosenhain invariants embedded into the degree-8 field."""
    return RosenhainCurve.parse(_data("example_curve_p8.txt"), example_field)


@pytest.fixture(scope="session")
def example_curve_quadratic(example_field_quadratic):
    return RosenhainCurve.parse(_data("example_curve_p2.txt"),
                                example_field_quadratic)


def elliptic_tuples(field):
    """Exhaustive search for level-4 elliptic theta null tuples (x1 = x3)."""
    p = int(field.p)
    if field.degree == 1:
        elems = [field.element(k) for k in range(p)]
    else:
        elems = [field.element(list(c))
                 for c in itertools.product(range(p), repeat=field.degree)]
    out = []
    for x0 in elems:
        for x1 in elems:
            for x2 in elems:
                x = (x0, x1, x2, x1)
                if rt.is_elliptic_theta_null(x):
                    out.append(x)
    return out


def projective_tuple_classes(tuples):
    """One representative per projective class of coordinate tuples."""
    classes = {}
    for x in tuples:
        anchor = next(v for v in x if not v.is_zero())
        inv = anchor.inverse()
        key = tuple((v * inv).coeffs for v in x)
        classes.setdefault(key, x)
    return list(classes.values())
