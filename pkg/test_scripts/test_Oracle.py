#Testing script for the brute force reference answers

from fractions import Fraction

from AlgebraicArcQueries.Algebra import compare_rational, geometry_error
from AlgebraicArcQueries.Arcs import algebraic_arc, circle_curve, circle_domain, point2, segment_curve
from AlgebraicArcQueries.Oracle import (oracle_below_count, oracle_bichromatic_intersections, oracle_first_hit,
                                        oracle_odd_pairs, oracle_once_count, oracle_segment_count, oracle_stab_count,
                                        oracle_stab_fold, oracle_stab_report, oracle_total_intersections,
                                        promise_violated, ray_arc, run_oracle)
from AlgebraicArcQueries.Stabbing import disk_range
from pytest import raises


def three_arcs():
    """The upper radius 2 circle, y = 1 and y = x, meeting 2 + 1 + 1 times."""
    lo, hi = circle_domain(0, 4)
    return [algebraic_arc(0, circle_curve(0, 0, 4, "upper"), lo, hi),
            algebraic_arc(1, segment_curve(0, 1), -2, 2),
            algebraic_arc(2, segment_curve(1, 0), -2, 2)]


def test_below_count_is_strict():
    """Lines through the query point are not counted as below it.
    """
    lines = [algebraic_arc(k, segment_curve(0, k), None, None) for k in range(3)]
    assert oracle_below_count(lines, point2(0, Fraction(3, 2))) == 2
    assert oracle_below_count(lines, point2(5, 1)) == 1
    assert oracle_below_count(lines, point2(0, -1)) == 0


def test_disk_membership():
    """A disk contains its centre and its lower boundary, but not its upper boundary.
    """
    ranges = [disk_range(0, 0, 0, 4), disk_range(1, 1, 0, 1, weight=5)]
    assert oracle_stab_count(ranges, point2(0, 0)) == 1
    assert oracle_stab_report(ranges, point2(1, 0)) == [0, 1]
    assert oracle_stab_count(ranges, point2(0, -2)) == 1
    assert oracle_stab_count(ranges, point2(0, 2)) == 0
    assert oracle_stab_fold(ranges, point2(1, 0), lambda a, b: a + b, 0) == 6
    assert oracle_stab_fold(ranges, point2(1, 0), max, 0) == 5


def test_pairwise_totals():
    """Total, odd-pair and bichromatic counts over three arcs.
    """
    arcs = three_arcs()
    assert oracle_total_intersections(arcs) == 4
    assert oracle_odd_pairs(arcs) == 2
    assert oracle_bichromatic_intersections(arcs[1:2], [arcs[0], arcs[2]]) == 3


def test_ray_arc():
    """Rays become arcs unbounded on the side they point to; vertical rays are refused.
    """
    right = ray_arc(point2(1, 1), (2, 1))
    assert right.x_lo == 1 and right.x_hi is None
    assert right.curve.slope == Fraction(1, 2)
    left = ray_arc(point2(1, 1), (-1, 0))
    assert left.x_lo is None and left.x_hi == 1
    with raises(geometry_error):
        ray_arc(point2(0, 0), (0, 1))


def test_first_hit():
    """The first arc along the ray wins, in either direction, and a miss gives None.
    """
    arcs = [algebraic_arc(0, segment_curve(1, 0), -2, 2), algebraic_arc(1, segment_curve(-1, 1), 0, 2)]
    hit, x = oracle_first_hit(arcs, point2(-3, 0), (1, 0))
    assert hit == 0 and compare_rational(x, 0) == 0
    hit, x = oracle_first_hit(arcs, point2(3, 0), (-1, 0))
    assert hit == 1 and compare_rational(x, 1) == 0
    assert oracle_first_hit(arcs, point2(-3, 5), (1, 0)) == (None, None)


def test_first_hit_tie_goes_to_smaller_id():
    """Two arcs crossing on the ray are hit at the same point; the smaller id is reported.
    """
    arcs = [algebraic_arc(4, segment_curve(-1, 0), -1, 1), algebraic_arc(2, segment_curve(1, 0), -1, 1)]
    assert oracle_first_hit(arcs, point2(-2, 0), (1, 0))[0] == 2


def test_segment_count():
    """The closed segment from (-2, 1) to (2, 1) meets the upper circle twice, whichever end comes first.
    """
    arcs = three_arcs()[:1]
    assert oracle_segment_count(arcs, point2(-2, 1), point2(2, 1)) == 2
    assert oracle_segment_count(arcs, point2(2, 1), point2(-2, 1)) == 2
    assert oracle_segment_count(arcs, point2(0, 1), point2(2, 1)) == 1
    with raises(geometry_error):
        oracle_segment_count(arcs, point2(0, 0), point2(0, 1))


def test_once_count_promise():
    """y = x meets every other arc once, while y = 1 meets the circle twice and breaks the promise.
    """
    arcs = three_arcs()
    result = run_oracle(oracle_once_count, arcs[:2], arcs[2])
    assert result.value == 2
    assert result.cost["predicates"] == 2
    with raises(promise_violated):
        oracle_once_count(arcs[:1], arcs[1])
