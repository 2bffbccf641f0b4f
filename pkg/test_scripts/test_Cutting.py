#Testing script for cuttings and point location

from fractions import Fraction

from AlgebraicArcQueries.Arcs import ABOVE, ON, point_vs_arc
from AlgebraicArcQueries.Cutting import CELL_FACTOR, build_cutting, cutting, locate, refine_by_points
from AlgebraicArcQueries.Instances import generate_arcs, generate_points, instance_spec


def sample(n=24, seed=1, queries=40):
    spec = instance_spec(n, seed=seed, queries=queries)
    return generate_arcs(spec), generate_points(spec)


def test_crossing_bound():
    """No cell is crossed by more than n / r arcs, and the cell count stays under the quadratic bound.
    """
    arcs, _ = sample()
    for r in (2, 4):
        cut = build_cutting(arcs, r, seed=3)
        assert max(len(crossing) for crossing in cut.crossing) <= Fraction(len(arcs), r)
        assert len(cut.cells) <= CELL_FACTOR * r ** 2


def test_locate_finds_the_unique_cell():
    """Every query point lies in exactly one cell, the one locate returns.
    """
    arcs, points = sample()
    cut = build_cutting(arcs, 4, seed=3)
    for q in points:
        cell = cut.cells[locate(cut, q)]
        assert cell.contains(q)
        assert sum(1 for other in cut.cells if other.contains(q)) == 1


def test_below_counts_with_rays():
    """With upward rays at the arc ends, the arcs below a point are the cell's below count plus crossing arcs below it.
    """
    arcs, points = sample(seed=2)
    cut = build_cutting(arcs, 4, seed=5, with_rays=True)
    by_id = {arc.id: arc for arc in arcs}
    for q in points:
        if any(point_vs_arc(q, arc) == ON for arc in arcs):
            continue
        cell = cut.locate(q)
        expected = sum(1 for arc in arcs if point_vs_arc(q, arc) == ABOVE)
        crossing_below = sum(1 for id in cut.crossing[cell] if point_vs_arc(q, by_id[id]) == ABOVE)
        assert cut.below_count[cell] + crossing_below == expected


def test_r_is_clamped():
    """r above n behaves as n, and r = 1 or an empty input gives the single cell covering the plane.
    """
    arcs, _ = sample(n=6)
    assert cutting(arcs, 100).r == 6
    whole = cutting(arcs, 1)
    assert len(whole.cells) == 1
    assert whole.cells[0].bottom is None and whole.cells[0].top is None
    empty = cutting([], 3)
    assert len(empty.cells) == 1
    assert empty.crossing == [[]]


def test_refine_by_points():
    """After refinement no cell holds more than the allowed number of tagged points.
    """
    arcs, _ = sample(n=16, seed=4)
    cut = build_cutting(arcs, 2, seed=1)
    points = list({(arc.x_lo + arc.x_hi) / 2: i for i, arc in enumerate(arcs)}.items())
    refine_by_points(cut, points, 3)
    assert max(len(members) for members in cut.points_in(points).values()) <= 3


def test_dump_cells():
    """Cell records carry the x-range, the boundary ids, the crossing list and the below count.
    """
    arcs, _ = sample(n=8)
    cut = build_cutting(arcs, 2)
    records = cut.dump_cells()
    assert len(records) == len(cut.cells)
    assert set(records[0]) == {"id", "x", "bottom", "top", "crossing", "below_count"}
    assert [record["id"] for record in records] == list(range(len(records)))
