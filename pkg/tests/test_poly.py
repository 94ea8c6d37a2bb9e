"""Unit tests for the exact sparse polynomial arithmetic."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canardeq.errors import SingularEvaluationError
from canardeq.poly import RationalPoly

X = RationalPoly.var("x")
Y = RationalPoly.var("y")
EPS = RationalPoly.var("eps")
H = RationalPoly.var("h")


def small_polys():
    coefs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
    degrees = st.integers(min_value=0, max_value=3)
    term = st.tuples(coefs, degrees, degrees, degrees)
    return st.lists(term, min_size=0, max_size=5).map(
        lambda terms: sum(
            (RationalPoly.monomial(c, x=a, y=b, h=d) for c, a, b, d in terms),
            RationalPoly.zero(),
        )
    )


def test_constant_and_var_roundtrip():
    assert RationalPoly.constant(3).evaluate(0, 0, 1) == 3
    assert X.evaluate(Fraction(2, 3), 0, 1) == Fraction(2, 3)
    assert (X * Y).evaluate(2, 5, 1) == 10


def test_arithmetic_identities():
    p = (X + Y) ** 2
    q = X**2 + 2 * X * Y + Y**2
    assert p == q
    assert p - q == RationalPoly.zero()
    assert not (p - q)


def test_exact_rational_coefficients():
    p = Fraction(1, 3) * X + Fraction(1, 6) * X
    assert p == Fraction(1, 2) * X
    assert p.evaluate(Fraction(2), 0, 1) == 1


def test_eps_epsinv_cancellation():
    epsinv = RationalPoly.monomial(1, epsinv=1)
    assert EPS * epsinv == RationalPoly.constant(1)
    assert (EPS**2 * epsinv) == EPS


def test_diff_basics():
    p = X**3 * Y + 2 * X
    assert p.diff("x") == 3 * X**2 * Y + RationalPoly.constant(2)
    assert p.diff("y") == X**3


def test_diff_rejects_parameters():
    with pytest.raises(Exception):
        X.diff("eps")


def test_diff_matches_finite_differences():
    p = X**3 - 2 * X * Y**2 + Fraction(1, 2) * Y
    x0, y0, d = 0.7, -0.3, 1e-6
    fd = (p.evaluate(x0 + d, y0, 1.0) - p.evaluate(x0 - d, y0, 1.0)) / (2 * d)
    assert abs(p.diff("x").evaluate(x0, y0, 1.0) - fd) < 1e-8


@settings(max_examples=60, deadline=None)
@given(small_polys())
def test_mixed_partials_commute(p):
    assert p.diff("x").diff("y") == p.diff("y").diff("x")


@settings(max_examples=60, deadline=None)
@given(small_polys(), small_polys())
def test_product_rule(p, q):
    lhs = (p * q).diff("x")
    rhs = p.diff("x") * q + p * q.diff("x")
    assert lhs == rhs


def test_substitute_scalar_and_poly():
    p = X**2 - Y
    assert p.substitute("y", 3) == X**2 - RationalPoly.constant(3)
    assert p.substitute_poly("y", X).evaluate(5, 0, 1) == 20


def test_substitute_h_with_h_over_eps():
    p = H**2 * X
    q = p.substitute_h_with_h_over_eps()
    # h -> h/eps: value at eps=2, h=3 should be (3/2)^2 * x
    assert q.evaluate(4, 0, Fraction(2), Fraction(3)) == Fraction(9, 4) * 4


def test_epsinv_evaluation_singular_at_eps_zero():
    p = RationalPoly.monomial(1, x=1, epsinv=1)
    assert p.evaluate(6, 0, Fraction(1, 2)) == 12
    with pytest.raises(SingularEvaluationError):
        p.evaluate(1, 0, 0)


def test_to_lines_deterministic_and_readable():
    p = Y - X**2 + Fraction(1, 2) * EPS
    lines = p.to_lines()
    assert p.to_lines() == (Fraction(1, 2) * EPS - X**2 + Y).to_lines()
    assert any("x^2" in line for line in lines)
