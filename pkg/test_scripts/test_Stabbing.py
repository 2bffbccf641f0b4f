#Testing script for range stabbing: counting, reporting and semigroup folds

from fractions import Fraction

from AlgebraicArcQueries.Arcs import algebraic_arc, degenerate_input, parabola_curve, point2, segment_curve
from AlgebraicArcQueries.Instances import generate_points, generate_ranges, instance_spec
from AlgebraicArcQueries.Oracle import oracle_stab_count, oracle_stab_fold, oracle_stab_report
from AlgebraicArcQueries.Stabbing import (build_stab_count, build_stab_report, decompose, disk_range,
                                          parabola_region, query_stab_count, query_stab_report,
                                          query_stab_semigroup, range_from_record, range_to_record,
                                          semialgebraic_range, trade_off_r, unsupported_parameter)
from pytest import raises


def mixed_ranges(n=12, seed=1, queries=40):
    """Generated ranges of every kind plus one unbounded below and one vertical slab."""
    spec = instance_spec(n, seed=seed, queries=queries)
    ranges = generate_ranges(spec)
    ceiling = algebraic_arc(1000, segment_curve(Fraction(1, 2), 0), -2, 2)
    ranges.append(semialgebraic_range(n, None, ceiling, -2, 2))
    ranges.append(semialgebraic_range(n + 1, None, None, Fraction(-1, 2), 3))
    return ranges, generate_points(spec)


def test_membership_conventions():
    """Ranges are closed below and on the left, open above and on the right.
    """
    region = parabola_region(0, 1, 0, 0, -1, 1, top=1)
    assert region.contains(point2(0, 0))
    assert region.contains(point2(-1, 1)) is False
    assert region.contains(point2(-1, 2)) is False
    assert region.contains(point2(-1, Fraction(1, 2))) is False
    assert region.contains(point2(Fraction(-1, 2), Fraction(1, 2)))
    assert region.contains(point2(1, Fraction(3, 2))) is False


def test_bad_ranges():
    """A lower boundary rising above the upper one, or a boundary too short for the range, is refused.
    """
    lower = algebraic_arc(0, parabola_curve(1, 0, 0), -2, 2)
    upper = algebraic_arc(1, segment_curve(0, 1), -2, 2)
    with raises(degenerate_input):
        semialgebraic_range(0, lower, upper, -2, 2)
    with raises(degenerate_input):
        semialgebraic_range(0, lower, upper, -3, 0)
    with raises(degenerate_input):
        semialgebraic_range(0, None, None, 1, 1)


def test_decompose():
    """Ranges bounded above become two signed pieces, others one.
    """
    ranges, _ = mixed_ranges()
    pieces = decompose(ranges)
    assert len(pieces) == sum(2 if rng.upper is not None else 1 for rng in ranges)
    assert sum(piece.sign for piece in pieces) == sum(1 for rng in ranges if rng.upper is None)


def test_trade_off_r():
    """The space parameter must lie at or above n^(3/2); above n^2 it is clamped.
    """
    assert trade_off_r(16, 64) == 4
    assert trade_off_r(16, 100) == 7
    assert trade_off_r(16, 10 ** 6) == 16
    with raises(unsupported_parameter):
        trade_off_r(16, 63)


def test_count_matches_oracle():
    """Stab counts equal the brute force count for every query point.
    """
    ranges, points = mixed_ranges()
    structure = build_stab_count(ranges, seed=2)
    assert structure.stats["n"] == len(ranges)
    for q in points + [point2(0, 0), point2(-2, -1)]:
        count, probes = structure.query(q)
        assert count == oracle_stab_count(ranges, q)
        assert probes >= 1


def test_count_with_space_parameter():
    """Building for a space budget m gives the same answers.
    """
    spec = instance_spec(9, seed=4, queries=30)
    ranges = generate_ranges(spec, kinds=("disk",))
    structure = build_stab_count(ranges, m=27, seed=1)
    for q in generate_points(spec):
        assert query_stab_count(structure, q) == oracle_stab_count(ranges, q)


def test_report_matches_oracle():
    """Reported ids equal the brute force ids, with and without recursion below the top level.
    """
    ranges, points = mixed_ranges(n=16, seed=3)
    for t in (None, 1, 8):
        structure = build_stab_report(ranges, t=t, seed=5)
        for q in points:
            assert query_stab_report(structure, q) == oracle_stab_report(ranges, q)


def test_semigroup_folds():
    """Sums and maxima of range weights over the stabbed ranges match the brute force fold.
    """
    ranges, points = mixed_ranges(n=10, seed=6)
    for k, rng in enumerate(ranges):
        rng.weight = k + 1
    structure = build_stab_report(ranges, t=1, seed=7)
    for q in points:
        assert structure.fold(q, lambda a, b: a + b, 0) == oracle_stab_fold(ranges, q, lambda a, b: a + b, 0)
        assert query_stab_semigroup(structure, q, max, 0) == oracle_stab_fold(ranges, q, max, 0)
    q = points[0]
    assert structure.fold(q, min, 10 ** 6, structure.weight_of) == oracle_stab_fold(ranges, q, min, 10 ** 6)


def test_range_records():
    """Records name the range type; a capped parabola region keeps its cap, unknown types are refused.
    """
    region = parabola_region(3, Fraction(1, 2), 0, -1, -1, 2, top=4)
    record = range_to_record(region)
    assert record["type"] == "parabola_region"
    assert record["params"]["top"] == "4"
    assert record["x"] == ["-1", "2"]
    rebuilt = range_from_record(record)
    assert rebuilt.contains(point2(0, 0)) and not rebuilt.contains(point2(0, 4))
    disk = range_to_record(disk_range(4, 1, 1, Fraction(1, 4)))
    assert disk["type"] == "disk" and disk["params"]["r2"] == "1/4"
    with raises(degenerate_input):
        range_from_record({"id": 1, "type": "annulus"})
