import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubeiso.qsqrt2 import SQRT2, Poly, QSqrt2, poly_from_roots

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)
elements = st.builds(QSqrt2, rationals, rationals)


@given(elements, elements)
def test_field_operations_agree_with_floats(x, y):
    assert float(x + y) == pytest.approx(float(x) + float(y), abs=1e-9)
    assert float(x * y) == pytest.approx(float(x) * float(y), rel=1e-9, abs=1e-9)
    if x != 0:
        assert x * x.inverse() == 1
        assert (y / x) * x == y


@given(elements)
def test_sign_is_exact(x):
    s = x.sign()
    f = float(x)
    if abs(f) > 1e-9:
        assert s == (1 if f > 0 else -1)
    assert (x * x).sign() >= 0
    assert (x < 0) == (s < 0)


def test_sqrt2_squares_to_two():
    assert SQRT2 * SQRT2 == 2
    assert (3 - 2 * SQRT2).sign() == 1  # 3 > 2.828
    assert (7 - 5 * SQRT2).sign() == -1  # 7 < 7.07
    assert QSqrt2(Fraction(1414, 1000)) < SQRT2 < QSqrt2(Fraction(1415, 1000))


def test_polynomial_algebra():
    x = Poly.x()
    p = (x - SQRT2) * (x + SQRT2)
    assert p == x * x - 2
    q, r = (x**3 - 1).divmod(x - 1)
    assert q == x * x + x + 1 and r == Poly([])
    assert p(SQRT2) == 0
    assert p(x + 1) == x * x + 2 * x - 1
    assert (x**4).derivative() == 4 * x**3
    assert p(0.5) == pytest.approx(0.25 - 2)
    assert poly_from_roots(3, [1, SQRT2]) == 3 * (x - 1) * (x - SQRT2)
    assert (x**5).degree == 5


@given(elements, elements, elements)
def test_horner_matches_expanded_evaluation(a, b, c):
    p = Poly([a, b, c])
    z = QSqrt2(Fraction(1, 3), Fraction(-2, 5))
    assert p(z) == a + b * z + c * z * z


def test_zero_division():
    with pytest.raises(ZeroDivisionError):
        QSqrt2(0).inverse()
    with pytest.raises(ZeroDivisionError):
        Poly.x().divmod(Poly([]))
    assert math.isclose(float(SQRT2), math.sqrt(2))
