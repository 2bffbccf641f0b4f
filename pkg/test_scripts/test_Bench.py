#Testing script for the scaling measurements

import csv

from AlgebraicArcQueries.Bench import (COLUMNS, OPERATIONS, bench_point, crossing_within_bound, fit_exponent,
                                       plot_records, probes_non_increasing, run_point, run_suite, standard_suite,
                                       write_csv)
from pytest import approx, raises


def read_rows(path):
    with open(path, newline="") as handle:
        return list(csv.reader(handle))


def test_single_point_gives_one_row(tmp_path):
    """A suite of one point writes the header and exactly one row.
    """
    path = tmp_path / "bench.csv"
    write_csv(path, run_suite([bench_point("ps_count_below", 64, queries=10)], seed=1))
    rows = read_rows(path)
    assert rows[0] == list(COLUMNS)
    assert len(rows) == 2
    record = dict(zip(rows[0], rows[1]))
    assert record["operation"] == "ps_count_below" and record["n"] == "64"
    assert float(record["probes_median"]) > 0


def test_empty_suite_gives_header_only(tmp_path):
    """No points, no rows: only the header is written.
    """
    path = tmp_path / "empty.csv"
    write_csv(path, run_suite([]))
    assert read_rows(path) == [list(COLUMNS)]


def test_every_operation_measures():
    """Each operation fills its own columns.
    """
    record = run_point(bench_point("stab_count", 12, queries=8), seed=2)
    assert record["r"] != "" and record["cells"] != ""
    record = run_point(bench_point("lens_cut", 10), seed=2)
    assert record["mu"] >= 10 and record["cuts"] == record["mu"] - 10
    record = run_point(bench_point("partition_crossing", 64, r=8, strategy="low_crossing_path"), seed=2)
    assert crossing_within_bound([record])
    record = run_point(bench_point("rayshoot", 8, queries=5), seed=2)
    assert set(record) == set(COLUMNS)


def test_unknown_operation():
    """Only the listed operations can be measured.
    """
    with raises(ValueError):
        bench_point("sort", 10)
    assert {point.operation for point in standard_suite()} == set(OPERATIONS)


def test_fit_exponent():
    """The fitted slope of c n^k on log-log axes is k; blanks and single points give nothing to fit.
    """
    ns = [16, 32, 64, 128]
    assert fit_exponent(ns, [3 * n ** 0.5 for n in ns]) == approx(0.5)
    assert fit_exponent(ns, [n ** 2 for n in ns]) == approx(2.0)
    assert fit_exponent([16], [4]) is None
    assert fit_exponent(ns, ["", "", "", 5]) is None


def test_plot_and_checks(tmp_path):
    """The plot is written as SVG and the sweep checks read the rows.
    """
    records = [{"operation": "ps_count_below", "n": n, "probes_median": 2 * n ** 0.5, "m": "", "crossing": ""}
               for n in (64, 256, 1024)]
    sweep = [{"operation": "trade_off", "n": 64, "m": m, "probes_median": p, "crossing": ""}
             for m, p in ((512, 40), (1448, 31), (4096, 31))]
    path = tmp_path / "bench.svg"
    fits = plot_records(path, records + sweep)
    assert path.read_text().lstrip().startswith("<?xml")
    assert fits["ps_count_below"] == approx(0.5)
    assert probes_non_increasing(sweep)
    assert not probes_non_increasing(sweep + [{"operation": "trade_off", "m": 8192, "probes_median": 50}])
