#Testing script for seeded instance generation and the JSON-lines instance files

import json
from fractions import Fraction

from AlgebraicArcQueries.Arcs import algebraic_arc, point2, segment_curve
from AlgebraicArcQueries.Instances import (generate_arcs, generate_points, generate_rays, generate_ranges,
                                           generate_segments, instance_format_error, instance_spec, read_arcs,
                                           read_queries, read_ranges, write_arcs, write_queries, write_ranges)
from AlgebraicArcQueries.Oracle import oracle_stab_report
from pytest import raises


def write_lines(path, lines):
    path.write_text("".join(json.dumps(line) + "\n" if not isinstance(line, str) else line + "\n" for line in lines))
    return path


def test_same_seed_same_bytes(tmp_path):
    """Generating twice from one seed writes byte-identical files; another seed does not.
    """
    for k, seed in enumerate((5, 5, 6)):
        write_arcs(tmp_path / f"arcs{k}.jsonl", generate_arcs(instance_spec(25, seed=seed)), seed=seed)
    first, second, third = ((tmp_path / f"arcs{k}.jsonl").read_bytes() for k in range(3))
    assert first == second
    assert first != third


def test_empty_instance(tmp_path):
    """n = 0 gives a file holding only its header line.
    """
    path = tmp_path / "empty.jsonl"
    write_arcs(path, generate_arcs(instance_spec(0, seed=1)))
    lines = path.read_text().splitlines()
    assert len(lines) == 1
    assert json.loads(lines[0]) == {"count": 0, "format": "arcs", "version": 1}
    assert read_arcs(path) == []


def test_generated_arcs():
    """Arcs get ids 0 .. n - 1, distinct curves and rational ends inside the grid.
    """
    spec = instance_spec(30, seed=2, extent=4)
    arcs = generate_arcs(spec)
    assert [arc.id for arc in arcs] == list(range(30))
    assert len({arc.curve.key() for arc in arcs}) == 30
    assert all(-8 <= arc.x_lo < arc.x_hi <= 8 for arc in arcs)
    assert {arc.kind for arc in generate_arcs(instance_spec(20, seed=2, mix=(0, 0, 1)))} == {"parabola"}


def test_query_streams():
    """Points, segments and rays are drawn from separate streams of the seed.
    """
    spec = instance_spec(10, seed=3, queries=25)
    assert generate_points(spec) == generate_points(spec)
    assert len(generate_points(spec)) == 25
    assert all(p.x != q.x for p, q in generate_segments(spec))
    assert all(direction[0] != 0 for _, direction in generate_rays(spec))
    fewer = generate_arcs(instance_spec(10, seed=3, queries=1))
    assert [arc.to_record() for arc in fewer] == [arc.to_record() for arc in generate_arcs(spec)]


def test_bad_specs():
    """Negative sizes and malformed family mixes are refused.
    """
    with raises(instance_format_error):
        instance_spec(-1)
    with raises(instance_format_error):
        instance_spec(5, mix=(1, 1))
    with raises(instance_format_error):
        instance_spec(5, mix=(0, 0, 0))


def test_arcs_read_back(tmp_path):
    """Arcs read back carry the same records, branches and exact ends included.
    """
    arcs = generate_arcs(instance_spec(20, seed=4))
    path = tmp_path / "arcs.jsonl"
    write_arcs(path, arcs)
    assert [arc.to_record() for arc in read_arcs(path)] == [arc.to_record() for arc in arcs]


def test_ranges_read_back(tmp_path):
    """Ranges read back hold the same query points.
    """
    spec = instance_spec(12, seed=5, queries=30)
    ranges = generate_ranges(spec)
    path = tmp_path / "ranges.jsonl"
    write_ranges(path, ranges)
    again = read_ranges(path)
    assert [rng.kind for rng in again] == [rng.kind for rng in ranges]
    for q in generate_points(spec):
        assert oracle_stab_report(again, q) == oracle_stab_report(ranges, q)


def test_queries_read_back(tmp_path):
    """Point, segment and ray queries keep their kind and exact coordinates.
    """
    queries = [point2(Fraction(1, 3), -2), (point2(0, 0), point2(1, Fraction(5, 2))),
               (point2(-1, 1), (Fraction(-1, 2), 3))]
    path = tmp_path / "queries.jsonl"
    write_queries(path, queries)
    again = read_queries(path)
    assert again[0] == queries[0]
    assert again[1] == queries[1]
    assert again[2][0] == queries[2][0] and again[2][1] == queries[2][1]


def test_format_errors_name_the_line(tmp_path):
    """Broken files are refused with the number of the offending line.
    """
    header = {"format": "arcs", "version": 1, "count": 1}
    good = {"id": 0, "kind": "segment", "params": {"slope": "1", "intercept": "0"}, "x": ["0", "1"]}
    cases = [
        ([header, "{not json"], 2),
        ([header, dict(good, kind="spiral")], 2),
        ([header, dict(good, x=["1", "0"])], 2),
        ([header, {"id": 0, "kind": "segment"}], 2),
        ([{"format": "ranges", "version": 1, "count": 1}, good], 1),
        ([dict(header, version=7), good], 1),
        ([dict(header, count=2), good], 1),
    ]
    for k, (lines, line) in enumerate(cases):
        path = write_lines(tmp_path / f"bad{k}.jsonl", lines)
        with raises(instance_format_error) as error:
            read_arcs(path)
        assert error.value.line == line
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    with raises(instance_format_error):
        read_arcs(empty)


def test_duplicate_ids_and_shared_curves(tmp_path):
    """Arc ids must be unique and no two arcs may overlap on one curve.
    """
    path = tmp_path / "twice.jsonl"
    write_arcs(path, [algebraic_arc(0, segment_curve(1, 0), 0, 1), algebraic_arc(0, segment_curve(2, 0), 0, 1)])
    with raises(instance_format_error):
        read_arcs(path)
    write_arcs(path, [algebraic_arc(0, segment_curve(1, 0), 0, 2), algebraic_arc(1, segment_curve(1, 0), 1, 3)])
    with raises(instance_format_error):
        read_arcs(path)
    write_arcs(path, [algebraic_arc(0, segment_curve(1, 0), 0, 1), algebraic_arc(1, segment_curve(1, 0), 2, 3)])
    assert len(read_arcs(path)) == 2
