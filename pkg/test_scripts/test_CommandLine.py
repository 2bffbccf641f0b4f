#Testing script for the arcqueries command line

import csv
import json

from AlgebraicArcQueries.CommandLine import EXIT_INPUT, EXIT_MISMATCH, EXIT_OK, build_parser, main


def json_lines(path):
    return [json.loads(line) for line in path.read_text().splitlines() if line.strip()]


def generate(tmp_path, kind, n, seed=1, name=None, *extra):
    path = tmp_path / (name or f"{kind}.jsonl")
    assert main(["--seed", str(seed), "gen", kind, "--n", str(n), "--output", str(path), *extra]) == EXIT_OK
    return path


def test_gen_is_deterministic(tmp_path):
    """The same seed writes the same bytes; n = 0 writes only the header.
    """
    first = generate(tmp_path, "arcs", 20, 3, "first.jsonl")
    second = generate(tmp_path, "arcs", 20, 3, "second.jsonl")
    assert first.read_bytes() == second.read_bytes()
    empty = generate(tmp_path, "arcs", 0, 3, "empty.jsonl")
    lines = json_lines(empty)
    assert len(lines) == 1 and lines[0]["count"] == 0 and lines[0]["format"] == "arcs"


def test_query_agrees_with_oracle(tmp_path):
    """Stab counts and reports from the structure equal the oracle answers, query by query.
    """
    ranges = generate(tmp_path, "ranges", 10, 2)
    points = generate(tmp_path, "points", 25, 4)
    for structure in ("stab-count", "stab-report"):
        answers = {}
        for oracle in (False, True):
            out = tmp_path / f"{structure}-{oracle}.jsonl"
            argv = ["--out", str(out)] + (["--oracle"] if oracle else [])
            assert main(argv + ["query", str(ranges), str(points), "--structure", structure]) == EXIT_OK
            answers[oracle] = [row["answer"] for row in json_lines(out)]
        assert len(answers[False]) == 25
        assert answers[False] == answers[True]


def test_query_csv_with_workers(tmp_path):
    """Batch answers come back in input order as CSV rows, on any number of threads.
    """
    ranges = generate(tmp_path, "ranges", 8, 5)
    points = generate(tmp_path, "points", 12, 6)
    rows = {}
    for workers in (1, 3):
        out = tmp_path / f"answers{workers}.csv"
        assert main(["--format", "csv", "--workers", str(workers), "--out", str(out), "query", str(ranges),
                     str(points), "--structure", "semigroup", "--combine", "max"]) == EXIT_OK
        with open(out, newline="") as handle:
            rows[workers] = list(csv.DictReader(handle))
    assert [row["query"] for row in rows[1]] == [str(k) for k in range(12)]
    assert rows[1] == rows[3]


def test_verify_passes(tmp_path):
    """Structures agree with the oracle on small seeded instances.
    """
    out = tmp_path / "verify.jsonl"
    argv = ["--out", str(out), "verify", "--structure", "stab-count", "--n", "8", "--queries", "10",
            "--instances", "2"]
    assert main(argv) == EXIT_OK
    rows = json_lines(out)
    assert len(rows) == 2 and all(row["mismatches"] == 0 and row["witness"] is None for row in rows)


def test_verify_with_injected_fault(tmp_path):
    """A faulty structure fails verification with a minimal witness.
    """
    out = tmp_path / "verify.jsonl"
    argv = ["--out", str(out), "verify", "--structure", "stab-count", "--inject-fault", "--n", "6", "--queries",
            "5", "--instances", "3"]
    assert main(argv) == EXIT_MISMATCH
    rows = json_lines(out)
    assert len(rows) == 1
    assert rows[0]["mismatches"] == 5
    witness = json.loads(rows[0]["witness"])
    assert len(witness["inputs"]) == 1
    assert len(witness["query"]) == 2


def test_verify_keep_going(tmp_path):
    """With --keep-going every instance is checked after the first mismatch.
    """
    out = tmp_path / "verify.jsonl"
    argv = ["--out", str(out), "verify", "--structure", "intersections", "--inject-fault", "--keep-going",
            "--n", "5", "--instances", "2"]
    assert main(argv) == EXIT_MISMATCH
    assert len(json_lines(out)) == 2


def test_verify_arc_kinds(tmp_path):
    """Pseudo-segment counts, once counts and depth cycles agree with their oracles.
    """
    for kind in ("pseg-count", "once-count", "depth-cycle"):
        out = tmp_path / f"{kind}.jsonl"
        argv = ["--out", str(out), "verify", "--structure", kind, "--n", "8", "--queries", "10", "--instances", "2"]
        assert main(argv) == EXIT_OK
        rows = json_lines(out)
        assert len(rows) == 2 and all(row["mismatches"] == 0 for row in rows)
        if kind == "depth-cycle":
            assert all(row["queries"] == 28 for row in rows)


def test_verify_arc_kinds_shrink(tmp_path):
    """Injected faults in the arc kinds shrink to one arc, or to the pair of a depth-cycle query.
    """
    for kind, size in (("pseg-count", 1), ("once-count", 1), ("depth-cycle", 2)):
        out = tmp_path / f"{kind}.jsonl"
        argv = ["--out", str(out), "verify", "--structure", kind, "--inject-fault", "--n", "6", "--queries", "5",
                "--instances", "2"]
        assert main(argv) == EXIT_MISMATCH
        rows = json_lines(out)
        assert len(rows) == 1 and rows[0]["mismatches"] > 0
        witness = json.loads(rows[0]["witness"])
        assert len(witness["inputs"]) == size
        assert len(witness["query"]) == 2
        if kind == "depth-cycle":
            assert sorted(witness["inputs"]) == sorted(witness["query"])


def test_input_errors(tmp_path):
    """Missing files, malformed records and bad arguments exit with the input error code.
    """
    points = generate(tmp_path, "points", 5)
    assert main(["lens-cut", str(tmp_path / "missing.jsonl")]) == EXIT_INPUT
    broken = tmp_path / "broken.jsonl"
    broken.write_text('{"format": "arcs", "version": 1, "count": 1}\n{"id": 0, "kind": "spiral"}\n')
    assert main(["count-intersections", str(broken)]) == EXIT_INPUT
    assert main(["rayshoot", str(generate(tmp_path, "arcs", 5)), str(points)]) == EXIT_INPUT
    assert main(["gen", "arcs"]) == EXIT_INPUT
    assert main(["--mode", "approximate", "gen", "arcs", "--output", str(tmp_path / "x.jsonl")]) == EXIT_INPUT


def test_lens_cut_and_counting(tmp_path):
    """The cut pieces verify, and the offline total matches the oracle total.
    """
    arcs = generate(tmp_path, "arcs", 12, 7)
    pieces = tmp_path / "pieces.jsonl"
    stats = tmp_path / "stats.jsonl"
    assert main(["--out", str(stats), "lens-cut", str(arcs), "--pieces", str(pieces)]) == EXIT_OK
    record = json_lines(stats)[0]
    assert record["verify"] and record["within_bound"]
    assert json_lines(pieces)[0]["count"] == record["pieces"]
    totals = []
    for oracle in ([], ["--oracle"]):
        out = tmp_path / f"total{len(oracle)}.jsonl"
        assert main(["--out", str(out)] + oracle + ["count-intersections", str(arcs)]) == EXIT_OK
        totals.append(json_lines(out)[0]["total"])
    assert totals[0] == totals[1]


def test_rayshoot_verified(tmp_path):
    """Segment counts and first hits agree with the oracle.
    """
    arcs = generate(tmp_path, "arcs", 10, 8)
    out = tmp_path / "rays.jsonl"
    for kind in ("segments", "rays"):
        queries = generate(tmp_path, kind, 15, 9)
        assert main(["--out", str(out), "rayshoot", str(arcs), str(queries), "--verify"]) == EXIT_OK
        assert len(json_lines(out)) == 15


def test_build_cutting_dump(tmp_path):
    """Building a cutting prints its statistics and dumps one record per cell.
    """
    arcs = generate(tmp_path, "arcs", 16, 10)
    out, cells = tmp_path / "stats.jsonl", tmp_path / "cells.jsonl"
    assert main(["--out", str(out), "build", str(arcs), "--structure", "cutting", "--r", "4", "--dump",
                 str(cells)]) == EXIT_OK
    stats = json_lines(out)[0]
    assert stats["structure"] == "cutting" and stats["max_crossing"] <= 4
    assert len(json_lines(cells)) == stats["cells"]


def test_bench_csv(tmp_path):
    """A single bench point writes one row under the header; an empty suite writes the header alone.
    """
    single, empty = tmp_path / "single.csv", tmp_path / "empty.csv"
    assert main(["bench", "--operation", "lens_cut", "--n", "8", "--csv", str(single)]) == EXIT_OK
    assert main(["bench", "--suite", "empty", "--csv", str(empty)]) == EXIT_OK
    assert len(single.read_text().splitlines()) == 2
    assert len(empty.read_text().splitlines()) == 1


def test_parser_defaults():
    """Global flags default to seed 0, distinct counting and JSON output.
    """
    args = build_parser().parse_args(["bench", "--csv", "out.csv"])
    assert (args.seed, args.mode, args.oracle, args.format) == (0, "distinct", False, "json")
