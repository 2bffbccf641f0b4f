#Measured scaling: probe counts and wall times of the structures over growing inputs, written as CSV rows and
#plotted as SVG on log-log axes with fitted exponents.
import csv
import logging
import time
from fractions import Fraction
from math import ceil, sqrt

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from scipy.stats import linregress

from AlgebraicArcQueries.Algebra import geometry_error
from AlgebraicArcQueries.Arcs import algebraic_arc, segment_curve
from AlgebraicArcQueries.Instances import (generate_arcs, generate_points, generate_ranges, generate_segments,
                                          instance_spec)
from AlgebraicArcQueries.LensCut import cut_to_pseudosegments
from AlgebraicArcQueries.PseudoStructures import (build_partition, build_partition_tree, path_crossing_bound,
                                                  ps_count_below)
from AlgebraicArcQueries.RayShooting import ray_structure
from AlgebraicArcQueries.Stabbing import build_stab_count

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
COLUMNS = ("schema", "operation", "n", "r", "m", "t", "strategy", "probes_median", "probes_p95", "seconds", "mu",
           "cells", "cuts", "crossing")
OPERATIONS = ("ps_count_below", "stab_count", "rayshoot", "lens_cut", "partition_crossing", "trade_off")


class bench_point:
    """One measurement to take: an operation at a size with its parameters."""

    def __init__(self, operation, n, m=None, r=None, strategy="signature_lex", queries=50):
        if operation not in OPERATIONS:
            raise ValueError(f"Unknown bench operation {operation}.")
        self.operation = operation
        self.n = n
        self.m = m
        self.r = r
        self.strategy = strategy
        self.queries = queries


def standard_suite(queries=50):
    """Points for every measured curve at desk sizes."""
    suite = [bench_point("ps_count_below", 2 ** k, queries=queries) for k in range(9, 14)]
    suite += [bench_point("stab_count", 2 ** k, queries=queries) for k in range(8, 13)]
    suite += [bench_point("rayshoot", 2 ** k, queries=queries) for k in range(4, 8)]
    suite += [bench_point("lens_cut", 2 ** k) for k in range(4, 9)]
    suite += [bench_point("partition_crossing", 2 ** k, r=16, strategy="low_crossing_path") for k in range(6, 11)]
    n = 64
    suite += [bench_point("trade_off", n, m=ceil(n ** e), queries=queries) for e in (1.5, 1.75, 2)]
    return suite


def _record(point, probes=(), seconds=0.0, **fields):
    probes = np.asarray(probes, dtype=float)
    record = dict.fromkeys(COLUMNS, "")
    record.update(schema=SCHEMA_VERSION, operation=point.operation, n=point.n, strategy=point.strategy,
                  probes_median=float(np.median(probes)) if len(probes) else 0.0,
                  probes_p95=float(np.percentile(probes, 95)) if len(probes) else 0.0, seconds=round(seconds, 6))
    for key in ("m", "r"):
        if getattr(point, key) is not None:
            record[key] = getattr(point, key)
    record.update(fields)
    return record


def _random_lines(spec):
    """Distinct lines y = m x + c with slopes and intercepts on the instance grid."""
    rng = spec.rng(5)
    d = spec.denominator
    lines, keys = [], set()
    while len(lines) < spec.n:
        m = Fraction(int(rng.integers(-4 * d, 4 * d + 1)), d)
        c = Fraction(int(rng.integers(-spec.extent * d, spec.extent * d + 1)), d)
        if (m, c) not in keys:
            keys.add((m, c))
            lines.append(algebraic_arc(len(lines), segment_curve(m, c), None, None))
    return lines


def _timed_queries(query, queries):
    probes, skipped = [], 0
    start = time.perf_counter()
    for q in queries:
        try:
            probes.append(query(q))
        except geometry_error:
            skipped += 1
    if skipped:
        logger.debug("%d degenerate queries skipped", skipped)
    return probes, (time.perf_counter() - start) / max(1, len(probes))


def run_point(point, seed=0):
    """Measures one bench point.

    Returns:
        dict -- A row with the COLUMNS keys
    """
    spec = instance_spec(point.n, seed=seed, queries=point.queries)
    points = generate_points(spec)
    if point.operation == "ps_count_below":
        root = build_partition_tree(_random_lines(spec), strategy=point.strategy, seed=seed)
        probes, seconds = _timed_queries(lambda q: ps_count_below(root, q)[1], points)
        return _record(point, probes, seconds)
    if point.operation in ("stab_count", "trade_off"):
        structure = build_stab_count(generate_ranges(spec, kinds=("disk",)), m=point.m, seed=seed,
                                     strategy=point.strategy)
        probes, seconds = _timed_queries(lambda q: structure.query(q)[1], points)
        return _record(point, probes, seconds, r=structure.stats["r"], mu=structure.stats["mu"],
                       cells=structure.stats["cells"])
    if point.operation == "rayshoot":
        structure = ray_structure(generate_arcs(spec), strategy=point.strategy, seed=seed)
        probes, seconds = _timed_queries(lambda s: structure.count_segment(*s)[1], generate_segments(spec))
        return _record(point, probes, seconds)
    if point.operation == "lens_cut":
        start = time.perf_counter()
        pieces, _, stats = cut_to_pseudosegments(generate_arcs(spec), verify=False)
        return _record(point, seconds=time.perf_counter() - start, mu=len(pieces), cuts=stats["cuts"])
    start = time.perf_counter()
    _, stats = build_partition(_random_lines(spec), point.r or ceil(sqrt(point.n)), point.strategy, seed=seed)
    crossing = stats.get("path_crossing", stats["max_crossed"])
    return _record(point, seconds=time.perf_counter() - start, crossing=crossing)


def run_suite(suite, seed=0):
    records = []
    for point in suite:
        records.append(run_point(point, seed))
        logger.info("bench %s n=%d: median probes %s", point.operation, point.n, records[-1]["probes_median"])
    return records


def write_csv(path, records):
    """Writes the rows under the fixed header; an empty suite gives a header-only file."""
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=COLUMNS)
        writer.writeheader()
        for record in records:
            writer.writerow(record)


def fit_exponent(ns, values):
    """Slope of log(values) against log(ns), or None with fewer than two usable points."""
    pairs = [(n, v) for n, v in zip(ns, values) if n > 0 and v not in ("", None) and float(v) > 0]
    if len(pairs) < 2:
        return None
    x, y = np.log([n for n, _ in pairs]), np.log([float(v) for _, v in pairs])
    return float(linregress(x, y).slope)


def _series(records, operation, column):
    rows = sorted((r for r in records if r["operation"] == operation and r[column] not in ("", None)),
                  key=lambda r: r["n"])
    return [r["n"] for r in rows], [float(r[column]) for r in rows]


def plot_records(path, records):
    """Log-log SVG panels: query probes per operation, lens-cut growth, path crossings, and the trade-off sweep.

    Returns:
        dict -- Fitted exponent per plotted curve
    """
    fits = {}
    fig, axes = plt.subplots(2, 2, figsize=(11, 9))
    ax = axes[0][0]
    for operation in ("ps_count_below", "stab_count", "rayshoot"):
        ns, probes = _series(records, operation, "probes_median")
        if ns:
            fits[operation] = fit_exponent(ns, probes)
            ax.loglog(ns, probes, "o-", label=f"{operation} (slope {fits[operation] or 0:.2f})")
    ax.set_xlabel("n")
    ax.set_ylabel("median probes")
    ax.legend(fontsize=8)
    ax = axes[0][1]
    ns, cuts = _series(records, "lens_cut", "cuts")
    if ns:
        fits["lens_cut"] = fit_exponent(ns, cuts)
        ax.loglog(ns, [max(c, 1) for c in cuts], "o-", label="cuts")
        ax.loglog(ns, [n ** 1.5 for n in ns], "--", label="n^(3/2)")
    ax.set_xlabel("n")
    ax.set_ylabel("cuts")
    ax.legend(fontsize=8)
    ax = axes[1][0]
    ns, crossing = _series(records, "partition_crossing", "crossing")
    if ns:
        ax.loglog(ns, crossing, "o-", label="max crossing")
        ax.loglog(ns, [path_crossing_bound(n) for n in ns], "--", label="12 sqrt(n) log2(n)")
    ax.set_xlabel("n")
    ax.set_ylabel("crossed groups")
    ax.legend(fontsize=8)
    ax = axes[1][1]
    rows = sorted((r for r in records if r["operation"] == "trade_off"), key=lambda r: r["m"])
    if rows:
        ax.loglog([r["m"] for r in rows], [max(float(r["probes_median"]), 1) for r in rows], "o-")
    ax.set_xlabel("m")
    ax.set_ylabel("median probes")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return fits


def probes_non_increasing(records):
    """True when the trade-off sweep's median probes never grow with m."""
    rows = sorted((r for r in records if r["operation"] == "trade_off"), key=lambda r: r["m"])
    values = [float(r["probes_median"]) for r in rows]
    return all(b <= a for a, b in zip(values, values[1:]))


def crossing_within_bound(records):
    return all(float(r["crossing"]) <= path_crossing_bound(r["n"]) for r in records
               if r["operation"] == "partition_crossing" and r["crossing"] != "")
