#Testing script for the exact algebra layer

from fractions import Fraction

from AlgebraicArcQueries.Algebra import (DEGREE_CAP, algebraic_number, as_rational, bi_poly, compare, compare_rational,
                                         common_factor, degree_cap_exceeded, endpoint_root, eval_sign, format_rational,
                                         geometry_error, isolate_roots, not_separable, rational_between, resultant,
                                         root_multiplicity, roots_in, sign_at, simplest_between, sturm_count,
                                         uni_poly, zero_polynomial)
from pytest import raises


def sqrt_of(k):
    """The positive root of x^2 - k."""
    return isolate_roots(uni_poly([-k, 0, 1]))[1]


def test_rational_text_form():
    """Rationals are written as p/q, integers without a denominator, and parsed back from the same text.
    """
    assert format_rational(Fraction(-3, 4)) == "-3/4"
    assert format_rational(2) == "2"
    assert as_rational("6/8") == Fraction(3, 4)
    with raises(geometry_error):
        as_rational(0.5)


def test_degree_cap():
    """Polynomials above the degree cap are refused, polynomials at the cap are fine.
    """
    assert uni_poly([0] * DEGREE_CAP + [1]).degree == DEGREE_CAP
    with raises(degree_cap_exceeded):
        uni_poly([0] * (DEGREE_CAP + 1) + [1])


def test_division():
    """(x^2 - 1) / (x - 1) = x + 1 with nothing left over.
    """
    quotient, remainder = uni_poly([-1, 0, 1]).divmod(uni_poly([-1, 1]))
    assert quotient == uni_poly([1, 1])
    assert remainder.is_zero


def test_sturm_count():
    """x^2 - 2 has one root in (0, 2), none in (2, 3), and an endpoint on a root is an error.
    """
    p = uni_poly([-2, 0, 1])
    assert sturm_count(p, 0, 2) == 1
    assert sturm_count(p, -2, 2) == 2
    assert sturm_count(p, 2, 3) == 0
    with raises(endpoint_root):
        sturm_count(uni_poly([-1, 0, 1]), 1, 2)
    with raises(zero_polynomial):
        sturm_count(uni_poly([]), 0, 1)


def test_isolate_rational_roots():
    """Roots of (x - 1)(x - 2)(x - 3) come out sorted, each isolated and equal to its rational.
    """
    roots = isolate_roots(uni_poly.from_roots([3, 1, 2]))
    assert len(roots) == 3
    for root, expected in zip(roots, (1, 2, 3)):
        assert compare_rational(root, expected) == 0


def test_isolate_repeated_and_complex_roots():
    """Repeated roots are reported once and x^2 + 1 has no real root.
    """
    assert len(isolate_roots(uni_poly.from_roots([1, 1, -1]))) == 2
    assert isolate_roots(uni_poly([1, 0, 1])) == []
    with raises(zero_polynomial):
        isolate_roots(uni_poly([]))


def test_roots_in_closed_interval():
    """roots_in keeps the roots inside [lo, hi], ends included.
    """
    p = uni_poly.from_roots([0, 1, 2])
    assert len(roots_in(p, 0, 1)) == 2
    assert len(roots_in(p, Fraction(1, 2), Fraction(3, 2))) == 1
    assert roots_in(p, 3, 4) == []


def test_compare_irrationals():
    """sqrt(2) < 3/2 < sqrt(3), and sqrt(2) defined by two different polynomials compares equal.
    """
    root2, root3 = sqrt_of(2), sqrt_of(3)
    assert compare_rational(root2, Fraction(3, 2)) == -1
    assert compare_rational(root3, Fraction(3, 2)) == 1
    assert compare(root2, root3) == -1
    assert root3 > root2
    other = isolate_roots(uni_poly([-2, 0, 1]) * uni_poly([-5, 1]))[1]
    assert compare(root2, other) == 0


def test_sign_at_algebraic_point():
    """Signs of polynomials at sqrt(2) are exact, including a zero.
    """
    root2 = sqrt_of(2)
    assert sign_at(uni_poly([-2, 0, 1]), root2) == 0
    assert sign_at(uni_poly([Fraction(-3, 2), 1]), root2) == -1
    assert sign_at(uni_poly([Fraction(-7, 5), 1]), root2) == 1


def test_root_multiplicity():
    """1 is a double root of (x - 1)^2 (x + 1) and -1 a simple one.
    """
    p = uni_poly.from_roots([1, 1, -1])
    assert root_multiplicity(p, algebraic_number.rational(1)) == 2
    assert root_multiplicity(p, algebraic_number.rational(-1)) == 1
    assert root_multiplicity(p, algebraic_number.rational(0)) == 0


def test_simplest_between():
    """The Stern-Brocot walk finds the smallest denominator inside an open interval.
    """
    assert simplest_between(Fraction(1, 3), Fraction(1, 2)) == Fraction(2, 5)
    assert simplest_between(Fraction(-1, 2), Fraction(1, 3)) == 0
    assert simplest_between(Fraction(-5, 2), Fraction(-9, 4)) == Fraction(-7, 3)
    with raises(not_separable):
        simplest_between(1, 1)


def test_rational_between():
    """The separating rational lies strictly between the two numbers and equal numbers cannot be separated.
    """
    root2, root3 = sqrt_of(2), sqrt_of(3)
    q = rational_between(root2, root3)
    assert compare_rational(root2, q) < 0 < compare_rational(root3, q)
    assert rational_between(root2, root3) == q
    with raises(not_separable):
        rational_between(root2, root2)
    with raises(not_separable):
        rational_between(root3, root2)


def test_resultant_of_circle_and_line():
    """Eliminating y from the unit circle and y = x leaves a polynomial with the two roots +-1/sqrt(2).
    """
    circle = bi_poly({(2, 0): 1, (0, 2): 1, (0, 0): -1})
    line = bi_poly({(0, 1): 1, (1, 0): -1})
    roots = isolate_roots(resultant(circle, line))
    assert len(roots) == 2
    half = uni_poly([Fraction(-1, 2), 0, 1])
    assert all(sign_at(half, root) == 0 for root in roots)
    with raises(common_factor):
        resultant(circle, circle)


def test_eval_sign():
    """Signs of a bivariate polynomial at rational points, and of a univariate one at an algebraic number.
    """
    circle = bi_poly({(2, 0): 1, (0, 2): 1, (0, 0): -1})
    assert eval_sign(circle, (0, 0)) == -1
    assert eval_sign(circle, (1, 0)) == 0
    assert eval_sign(circle, ("1", "1")) == 1
    assert eval_sign(uni_poly([-3, 0, 1]), sqrt_of(2)) == -1
