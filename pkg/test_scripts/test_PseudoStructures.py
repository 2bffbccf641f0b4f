#Testing script for envelopes, partitions, partition trees and the pseudo-segment structures

from fractions import Fraction

import numpy as np
from AlgebraicArcQueries.Algebra import compare_values
from AlgebraicArcQueries.Arcs import (ABOVE, BELOW, ON, algebraic_arc, parabola_curve, point2, point_vs_arc,
                                      segment_curve)
from AlgebraicArcQueries.Instances import generate_arcs, generate_points, generate_ranges, instance_spec
from AlgebraicArcQueries.LensCut import cut_ranges_matched, cut_to_pseudosegments
from AlgebraicArcQueries.Oracle import oracle_below_count, oracle_stab_report
from AlgebraicArcQueries.PseudoStructures import (STRATEGIES, STRICT_ABOVE, WEAK_BELOW, build_envelopes,
                                                  build_partition, build_partition_tree, not_pseudolines,
                                                  path_crossing_bound, ps_count_below, pseg_count_below,
                                                  pseudo_segment_tree, report_2pseudoseg, slab_tree,
                                                  two_pseudoseg_structure)
from pytest import raises


def random_lines(n, seed):
    rng = np.random.default_rng(seed)
    lines, keys = [], set()
    while len(lines) < n:
        m, c = Fraction(int(rng.integers(-32, 33)), 8), Fraction(int(rng.integers(-64, 65)), 8)
        if (m, c) not in keys:
            keys.add((m, c))
            lines.append(algebraic_arc(len(lines), segment_curve(m, c), None, None))
    return lines


def random_points(count, seed, extent=8):
    rng = np.random.default_rng(seed)
    return [point2(Fraction(int(rng.integers(-16 * extent, 16 * extent + 1)), 16),
                   Fraction(int(rng.integers(-16 * extent, 16 * extent + 1)), 16)) for _ in range(count)]


def test_envelopes_of_three_lines():
    """The lower envelope of y = 0, y = x and y = -x over [-1, 1] switches from y = x to y = -x at 0.
    """
    lines = [algebraic_arc(k, segment_curve(slope, 0), -1, 1) for k, slope in enumerate((0, 1, -1))]
    lower, upper = build_envelopes(lines, -1, 1)
    assert [piece.id for piece in lower.pieces] == [1, 2]
    assert [piece.id for piece in upper.pieces] == [2, 1]
    assert len(lower.breakpoints) == 1 and compare_values(lower.breakpoints[0], 0) == 0
    assert lower.piece_at(Fraction(-1, 2)).id == 1
    assert lower.piece_at(0).id == 2
    assert lower.classify(point2(Fraction(1, 2), 0)) == ABOVE
    assert upper.classify(point2(Fraction(1, 2), 0)) == BELOW
    assert lower.classify(point2(0, 0)) == ON


def test_envelope_check_rejects_lenses():
    """With checking on, two members meeting twice are reported.
    """
    arcs = [algebraic_arc(0, parabola_curve(1, 0, 0), -1, 1),
            algebraic_arc(1, segment_curve(0, Fraction(1, 2)), -1, 1)]
    with raises(not_pseudolines):
        build_envelopes(arcs, -1, 1, check=True)
    lower, _ = build_envelopes(arcs, -1, 1)
    assert [piece.id for piece in lower.pieces] == [1, 0, 1]


def test_partition_groups():
    """Both strategies split the family into r groups of near-equal size covering every line once.
    """
    lines = random_lines(40, seed=1)
    for strategy in STRATEGIES:
        groups, stats = build_partition(lines, 5, strategy, seed=2)
        assert len(groups) == 5
        assert sorted(i for group in groups for i in group) == list(range(40))
        assert max(map(len, groups)) - min(map(len, groups)) <= 1
        assert stats["max_crossed"] <= 5
    _, stats = build_partition(lines, 5, "low_crossing_path", seed=2)
    assert stats["path_crossing"] <= path_crossing_bound(40)
    with raises(ValueError):
        build_partition(lines, 5, "alphabetical")


def test_count_below_matches_oracle():
    """Partition tree counts of lines strictly below a point equal the brute force count.
    """
    lines = random_lines(40, seed=3)
    for strategy in STRATEGIES:
        root = build_partition_tree(lines, strategy=strategy, leaf_size=8, seed=4)
        assert not root.is_leaf
        for q in random_points(30, seed=5):
            count, probes = ps_count_below(root, q)
            assert count == oracle_below_count(lines, q)
            assert probes > 0


def test_weak_count_and_report():
    """Weak counts include lines through the point; reports list exactly the counted lines.
    """
    lines = random_lines(30, seed=6)
    root = build_partition_tree(lines, leaf_size=8, seed=7)
    points = random_points(20, seed=8) + [point2(0, lines[0].curve.intercept)]
    for q in points:
        weak = sum(1 for line in lines if point_vs_arc(q, line) in (ABOVE, ON))
        assert root.count(q, WEAK_BELOW)[0] == weak
        above = sorted(line.id for line in lines if point_vs_arc(q, line) == BELOW)
        assert sorted(root.report(q, STRICT_ABOVE)[0]) == above


def test_weighted_count():
    """Counts add up member weights.
    """
    lines = random_lines(20, seed=9)
    root = build_partition_tree(lines, weights=[k + 1 for k in range(20)], leaf_size=4)
    q = point2(0, 0)
    expected = sum(line.id + 1 for line in lines if point_vs_arc(q, line) == ABOVE)
    assert root.count(q)[0] == expected


def test_empty_tree():
    """An empty family has no tree and nothing below any point.
    """
    assert build_partition_tree([]) is None
    assert ps_count_below(None, point2(0, 0)) == (0, 0)


def test_slab_tree_canonical_nodes():
    """Each arc is stored at nodes whose slabs tile its x-range, and a path holds exactly the slabs around x.
    """
    arcs = [algebraic_arc(0, segment_curve(0, 0), 0, 2), algebraic_arc(1, segment_curve(0, 1), 1, 3),
            algebraic_arc(2, segment_curve(0, 2), -1, 3)]
    tree = slab_tree(arcs)
    assert tree.ends == [-1, 0, 1, 2, 3]
    for position, arc in enumerate(arcs):
        stored = sorted((node.lo, node.hi) for node in tree.nodes() if position in node.members)
        assert stored[0][0] == arc.x_lo and stored[-1][1] == arc.x_hi
        assert all(a[1] == b[0] for a, b in zip(stored, stored[1:]))
    x = Fraction(3, 2)
    path = tree.path(x)
    assert path[0] is tree.root
    assert all((node.lo is None or node.lo <= x) and (node.hi is None or x < node.hi) for node in path)


def test_pseudo_segment_counts():
    """Counts over cut pieces equal the brute-force count, at random points and at the piece ends.
    """
    spec = instance_spec(14, seed=11, queries=40)
    pieces, _, _ = cut_to_pseudosegments(generate_arcs(spec))
    ends = [point2(x, y) for piece in pieces[:12] for x in (piece.x_lo, piece.x_hi)
            for y in (Fraction(-7, 3), Fraction(1, 5), Fraction(9, 2))]
    for strategy in STRATEGIES:
        structure = pseudo_segment_tree(pieces, strategy=strategy, leaf_size=4, seed=1)
        for q in generate_points(spec) + ends:
            assert pseg_count_below(pieces, q, structure)[0] == oracle_below_count(pieces, q)


def test_pseudo_segment_ends_are_closed():
    """A point over the shared end of two pieces of one arc sees both; the tree itself stays half-open.
    """
    pieces = [algebraic_arc(0, segment_curve(0, 0), 0, 1), algebraic_arc(1, segment_curve(0, 0), 1, 2),
              algebraic_arc(2, parabola_curve(1, 0, -3), -1, 1)]
    structure = pseudo_segment_tree(pieces)
    q = point2(1, 1)
    assert pseg_count_below(pieces, q, structure)[0] == oracle_below_count(pieces, q) == 3
    assert structure.count(q)[0] == 1
    assert pseg_count_below(pieces, point2(2, 1))[0] == 1
    assert pseg_count_below(pieces, point2(Fraction(5, 2), 1))[0] == 0


def test_two_pseudoseg_report():
    """Reporting over matched boundary pieces lists the ranges holding the point.
    """
    spec = instance_spec(10, seed=12, queries=40)
    ranges = generate_ranges(spec, kinds=("disk",))
    triples = []
    for item in cut_ranges_matched(ranges):
        triples.extend((item.id, low, high) for low, high in zip(item.lower, item.upper))
    structure = two_pseudoseg_structure(triples, leaf_size=4)
    for q in generate_points(spec):
        assert report_2pseudoseg(triples, q, structure) == oracle_stab_report(ranges, q)
        assert structure.fold(q, lambda a, b: a + b, 0, lambda position: 1) == len(oracle_stab_report(ranges, q))
