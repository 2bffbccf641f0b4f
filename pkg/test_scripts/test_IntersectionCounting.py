#Testing script for offline intersection counting, query arcs meeting each arc once, and the arrangement check

from fractions import Fraction

from AlgebraicArcQueries.Arcs import algebraic_arc, circle_curve, circle_domain, parabola_curve, point2, segment_curve
from AlgebraicArcQueries.Instances import generate_arcs, generate_segments, instance_spec
from AlgebraicArcQueries.IntersectionCounting import (build_once_counter, odd_pair_count, offline_intersection_count,
                                                      promise_violated, query_once_count,
                                                      verify_pseudoseg_arrangement)
from AlgebraicArcQueries.LensCut import cut_to_pseudosegments
from AlgebraicArcQueries.Oracle import (oracle_bichromatic_intersections, oracle_odd_pairs, oracle_once_count,
                                        oracle_total_intersections, segment_arc)
from pytest import raises


def circle_and_line():
    lo, hi = circle_domain(0, 4)
    return [algebraic_arc(0, circle_curve(0, 0, 4, "upper"), lo, hi), algebraic_arc(1, segment_curve(0, 1), -2, 2)]


def test_offline_total_matches_oracle():
    """The offline total equals the sum over all pairs, for mixed families and for segments only.
    """
    for spec in (instance_spec(16, seed=21), instance_spec(30, seed=22, mix=(1, 0, 0))):
        arcs = generate_arcs(spec)
        report = offline_intersection_count(arcs, seed=3)
        assert report.total == oracle_total_intersections(arcs)
        assert report.mu >= len(arcs)


def test_offline_record():
    """The record splits the total into the three kinds of piece pairs.
    """
    arcs = generate_arcs(instance_spec(12, seed=23))
    record = offline_intersection_count(arcs, seed=1).to_record()
    assert record["total"] == record["long_long"] + record["long_short"] + record["short_short"]
    assert record["cells"] >= 1 and record["r"] >= 1


def test_offline_multiplicity_mode():
    """Counting with multiplicity agrees with the pairwise count in the same mode.
    """
    arcs = generate_arcs(instance_spec(12, seed=24))
    report = offline_intersection_count(arcs, mode="multiplicity", seed=2)
    assert report.total == oracle_total_intersections(arcs, mode="multiplicity")


def test_offline_bichromatic():
    """Only meetings between the two families are counted.
    """
    arcs = generate_arcs(instance_spec(18, seed=25))
    red, blue = arcs[:9], arcs[9:]
    report = offline_intersection_count(red, other=blue, seed=4)
    assert report.total == oracle_bichromatic_intersections(red, blue)


def test_offline_small_families():
    """No pair means no intersection.
    """
    assert offline_intersection_count([]).total == 0
    assert offline_intersection_count(circle_and_line()[:1]).total == 0
    assert offline_intersection_count(circle_and_line()).total == 2


def test_once_counter_matches_oracle():
    """Query segments meet every input segment at most once; counts agree with the brute force count.
    """
    spec = instance_spec(40, seed=26, mix=(1, 0, 0), queries=30)
    arcs = generate_arcs(spec)
    structure = build_once_counter(arcs)
    grouped = build_once_counter(arcs, leaf_size=4)
    checking = build_once_counter(arcs, debug=True)
    for p, q in generate_segments(spec):
        query = segment_arc(p, q)
        if any(arc.curve.key() == query.curve.key() for arc in arcs):
            continue
        expected = oracle_once_count(arcs, query)
        count, probes = structure.query(query)
        assert count == expected
        assert query_once_count(checking, query) == expected
        assert query_once_count(grouped, query) == expected
        assert probes >= 0


def test_once_counter_unbounded_query():
    """A whole line as query counts every segment it meets, ends included.
    """
    arcs = [algebraic_arc(k, segment_curve(0, k), -1, 1) for k in range(5)]
    query = algebraic_arc(-1, segment_curve(1, 0), None, None)
    assert query_once_count(build_once_counter(arcs), query) == 3
    query = algebraic_arc(-1, segment_curve(Fraction(1, 2), 0), 0, None)
    assert query_once_count(build_once_counter(arcs), query) == 1


def test_once_counter_promise():
    """In debug mode a query meeting some arc twice is refused.
    """
    arcs = [algebraic_arc(0, parabola_curve(1, 0, 0), -2, 2)]
    query = algebraic_arc(-1, segment_curve(0, 1), -3, 3)
    with raises(promise_violated):
        build_once_counter(arcs, debug=True).query(query)


def test_odd_pairs():
    """The endpoint parity rule agrees with counting every pair.
    """
    arcs = generate_arcs(instance_spec(20, seed=27))
    assert odd_pair_count(arcs) == oracle_odd_pairs(arcs)
    assert odd_pair_count(arcs, brute_force=True) == oracle_odd_pairs(arcs)
    assert odd_pair_count(circle_and_line()) == 0


def test_arrangement_check():
    """Segments always form a pseudo-segment arrangement; a circle and a line crossing twice do not.
    """
    segments = generate_arcs(instance_spec(20, seed=28, mix=(1, 0, 0)))
    assert verify_pseudoseg_arrangement(segments)
    assert verify_pseudoseg_arrangement(segments, brute_force=True)
    assert not verify_pseudoseg_arrangement(circle_and_line())


def tangent_family(seed):
    """Generated segments and parabolas, plus a parabola and three of its tangent lines over [-7, 7].
    """
    arcs = generate_arcs(instance_spec(14, seed=seed, mix=(1, 0, 1)))
    c = Fraction(1, 3)
    arcs.append(algebraic_arc(14, parabola_curve(1, 0, c), -7, 7))
    for k, t in enumerate((-2, Fraction(1, 2), 3)):
        arcs.append(algebraic_arc(15 + k, segment_curve(2 * t, c - t * t), -7, 7))
    return arcs


def test_offline_total_with_tangencies():
    """Tangential contacts count once each, and pieces starting on a cell's right wall are left to the next cell.
    """
    for seed in (8, 10):
        arcs = tangent_family(seed)
        expected = oracle_total_intersections(arcs)
        for cutting_seed in (0, 3):
            report = offline_intersection_count(arcs, seed=cutting_seed)
            assert report.total == expected
            assert all(cell["contacts"] <= cell["long_long"] for cell in report.cells)


def test_arrangement_check_with_tangencies():
    """A lens-cut family with tangencies still passes the arrangement check.
    """
    pieces, _, _ = cut_to_pseudosegments(tangent_family(8))
    assert odd_pair_count(pieces) == oracle_odd_pairs(pieces)
    assert verify_pseudoseg_arrangement(pieces)


def test_once_counter_groups():
    """Queries ending inside a crowded slab are answered through member groups, at a cost below the member count.
    """
    arcs = [algebraic_arc(k, segment_curve(Fraction(k % 2, 100), k), -10, 10) for k in range(300)]
    structure = build_once_counter(arcs)
    checking = build_once_counter(arcs, debug=True)
    queries = [segment_arc(point2(-3, Fraction(21, 2)), point2(4, Fraction(481, 4))),
               segment_arc(point2(-12, 0), point2(3, 40)),
               segment_arc(point2(2, 50), point2(6, Fraction(1, 2))),
               segment_arc(point2(-5, Fraction(7, 3)), point2(10, 100)),
               segment_arc(point2(-20, 1), point2(20, Fraction(2001, 10)))]
    for query in queries:
        expected = oracle_once_count(arcs, query)
        count, _ = structure.query(query)
        assert count == expected == query_once_count(checking, query)
    count, cost = structure.query(queries[0])
    assert count > 100
    assert cost < len(arcs)
