#Seeded instance generation and the JSON-lines files the command line reads and writes.
#Every file starts with a header record {"format": .., "version": .., "count": ..}; each further line is one record.
import json
import logging
from fractions import Fraction
from math import ceil, floor

import numpy as np

from AlgebraicArcQueries.Algebra import as_rational, format_rational, geometry_error
from AlgebraicArcQueries.Arcs import (algebraic_arc, arc_from_record, check_distinct_curves, circle_curve,
                                      circle_domain, parabola_curve, point2, segment_curve)
from AlgebraicArcQueries.Stabbing import (disk_range, parabola_region, range_from_record, range_to_record,
                                          semialgebraic_range)

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
FAMILIES = ("segment", "circle", "parabola")
RANGE_KINDS = ("disk", "parabola_region", "sandwich")


class instance_format_error(geometry_error):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class instance_spec:
    """What to generate: sizes, the family mix and the coordinate grid.

    Arguments:
        n {int} -- Number of arcs (or ranges)

    Keyword Arguments:
        seed {int} -- Seed of numpy.random.default_rng (default: {0})
        mix {tuple} -- Fractions of segments, circles and parabolas (default: {(1/3, 1/3, 1/3)})
        extent {int} -- Coordinates are drawn from [-extent, extent] (default: {8})
        denominator {int} -- Grid denominator of drawn rationals (default: {16})
        queries {int} -- Number of queries (default: {100})
    """

    def __init__(self, n, seed=0, mix=(1, 1, 1), extent=8, denominator=16, queries=100):
        if n < 0 or queries < 0:
            raise instance_format_error("Instance sizes must be non-negative.")
        if len(mix) != len(FAMILIES) or min(mix) < 0 or sum(mix) <= 0:
            raise instance_format_error(f"The family mix needs {len(FAMILIES)} non-negative weights.")
        self.n = n
        self.seed = seed
        self.mix = np.asarray(mix, dtype=float) / sum(mix)
        self.extent = extent
        self.denominator = denominator
        self.queries = queries

    def rng(self, stream=0):
        """A generator for one stream of the instance, so arcs and queries never share draws."""
        return np.random.default_rng([self.seed, stream])

    def to_record(self):
        return {"seed": self.seed, "n": self.n, "mix": [float(w) for w in self.mix], "extent": self.extent,
                "denominator": self.denominator, "queries": self.queries}


def _rational(rng, spec, lo=None, hi=None):
    lo = -spec.extent if lo is None else lo
    hi = spec.extent if hi is None else hi
    d = spec.denominator
    return Fraction(int(rng.integers(ceil(lo * d), floor(hi * d) + 1)), d)


def _x_range(rng, spec):
    while True:
        lo, hi = sorted((_rational(rng, spec), _rational(rng, spec)))
        if lo < hi:
            return lo, hi


def _nonzero(rng, spec, bound):
    while True:
        value = _rational(rng, spec, -bound, bound)
        if value != 0:
            return value


def _draw_arc(rng, spec, id, family):
    if family == "segment":
        lo, hi = _x_range(rng, spec)
        y_lo, y_hi = _rational(rng, spec), _rational(rng, spec)
        slope = (y_hi - y_lo) / (hi - lo)
        return algebraic_arc(id, segment_curve(slope, y_lo - slope * lo), lo, hi)
    if family == "parabola":
        lo, hi = _x_range(rng, spec)
        a = _nonzero(rng, spec, 1)
        return algebraic_arc(id, parabola_curve(a, _rational(rng, spec, -2, 2), _rational(rng, spec)), lo, hi)
    cx, cy = _rational(rng, spec), _rational(rng, spec)
    r2 = _rational(rng, spec, Fraction(1, 4), spec.extent) ** 2
    lo, hi = circle_domain(cx, r2)
    branch = "upper" if rng.random() < 0.5 else "lower"
    return algebraic_arc(id, circle_curve(cx, cy, r2, branch), lo, hi)


def generate_arcs(spec):
    """Draws spec.n arcs on pairwise distinct curves; the same spec always gives the same arcs."""
    rng = spec.rng(0)
    arcs, keys = [], set()
    while len(arcs) < spec.n:
        family = FAMILIES[int(rng.choice(len(FAMILIES), p=spec.mix))]
        arc = _draw_arc(rng, spec, len(arcs), family)
        if arc.curve.key() in keys:
            continue
        keys.add(arc.curve.key())
        arcs.append(arc)
    logger.debug("generated %d arcs from seed %d", len(arcs), spec.seed)
    return arcs


def _parabola_top(a, b, c, lo, hi):
    """Largest value of the parabola over [lo, hi]."""
    values = [a * x * x + b * x + c for x in (lo, hi)]
    vertex = -b / (2 * a)
    if lo < vertex < hi:
        values.append(a * vertex * vertex + b * vertex + c)
    return max(values)


def generate_ranges(spec, kinds=RANGE_KINDS):
    """Draws spec.n ranges of the given kinds, each bounded by two arcs below and above each other."""
    rng = spec.rng(1)
    ranges = []
    for id in range(spec.n):
        kind = kinds[int(rng.integers(len(kinds)))]
        if kind == "disk":
            radius = _rational(rng, spec, Fraction(1, 4), spec.extent / 2)
            ranges.append(disk_range(id, _rational(rng, spec), _rational(rng, spec), radius * radius))
            continue
        lo, hi = _x_range(rng, spec)
        a, b, c = _nonzero(rng, spec, 1), _rational(rng, spec, -2, 2), _rational(rng, spec)
        top = _parabola_top(a, b, c, lo, hi)
        if kind == "parabola_region":
            cap = top + _rational(rng, spec, Fraction(1, 4), spec.extent) if rng.random() < 0.75 else None
            ranges.append(parabola_region(id, a, b, c, lo, hi, cap))
            continue
        lower = algebraic_arc(2 * id, parabola_curve(a, b, c), lo, hi)
        left = top + _rational(rng, spec, Fraction(1, 4), spec.extent)
        right = top + _rational(rng, spec, Fraction(1, 4), spec.extent)
        slope = (right - left) / (hi - lo)
        upper = algebraic_arc(2 * id + 1, segment_curve(slope, left - slope * lo), lo, hi)
        ranges.append(semialgebraic_range(id, lower, upper, lo, hi, kind="sandwich"))
    return ranges


def generate_points(spec, stream=2):
    rng = spec.rng(stream)
    return [point2(_rational(rng, spec), _rational(rng, spec)) for _ in range(spec.queries)]


def generate_segments(spec, stream=3):
    """Query segments with distinct abscissae at their two ends."""
    rng = spec.rng(stream)
    segments = []
    while len(segments) < spec.queries:
        p = point2(_rational(rng, spec), _rational(rng, spec))
        q = point2(_rational(rng, spec), _rational(rng, spec))
        if p.x != q.x:
            segments.append((p, q))
    return segments


def generate_rays(spec, stream=4):
    """Query rays as (origin, (dx, dy)) with dx != 0."""
    rng = spec.rng(stream)
    rays = []
    while len(rays) < spec.queries:
        origin = point2(_rational(rng, spec), _rational(rng, spec))
        dx, dy = _rational(rng, spec, -2, 2), _rational(rng, spec, -2, 2)
        if dx != 0:
            rays.append((origin, (dx, dy)))
    return rays


# records

def point_to_record(q):
    return [format_rational(q.x), format_rational(q.y)]


def point_from_record(record):
    x, y = record
    return point2(as_rational(x), as_rational(y))


def query_to_record(index, query):
    """Queries are points, segments (p, q) or rays (origin, (dx, dy))."""
    if isinstance(query, point2):
        return {"query": index, "kind": "point", "at": point_to_record(query)}
    first, second = query
    if isinstance(second, point2):
        return {"query": index, "kind": "segment", "p": point_to_record(first), "q": point_to_record(second)}
    return {"query": index, "kind": "ray", "origin": point_to_record(first),
            "direction": [format_rational(v) for v in second]}


def query_from_record(record):
    kind = record["kind"]
    if kind == "point":
        return point_from_record(record["at"])
    if kind == "segment":
        return point_from_record(record["p"]), point_from_record(record["q"])
    if kind == "ray":
        return point_from_record(record["origin"]), tuple(as_rational(v) for v in record["direction"])
    raise instance_format_error(f"Unknown query kind {kind}.")


# files

def write_records(path, format, records, **header):
    """Writes a header line and one sorted-key JSON record per line."""
    records = list(records)
    with open(path, "w") as handle:
        head = {"format": format, "version": FORMAT_VERSION, "count": len(records)}
        head.update(header)
        handle.write(json.dumps(head, sort_keys=True) + "\n")
        for record in records:
            handle.write(json.dumps(record, sort_keys=True) + "\n")


def read_records(path, format):
    """Reads the records of a JSON-lines file written by write_records.

    Raises:
        instance_format_error: Missing or foreign header, malformed lines, or a record count mismatch

    Returns:
        tuple -- (header dict, list of (line number, record))
    """
    with open(path) as handle:
        lines = [(k, line) for k, line in enumerate(handle, start=1) if line.strip()]
    if not lines:
        raise instance_format_error(f"{path} is empty; a header line is required.")
    parsed = []
    for k, line in lines:
        try:
            parsed.append((k, json.loads(line)))
        except json.JSONDecodeError as error:
            raise instance_format_error(f"not JSON ({error.msg})", k)
    (_, head), records = parsed[0], parsed[1:]
    if not isinstance(head, dict) or head.get("format") != format:
        raise instance_format_error(f"expected a {format} header", 1)
    if head.get("version") != FORMAT_VERSION:
        raise instance_format_error(f"unsupported version {head.get('version')}", 1)
    if head.get("count", len(records)) != len(records):
        raise instance_format_error(f"header promises {head['count']} records, found {len(records)}", 1)
    return head, records


def _convert(records, build):
    items = []
    for k, record in records:
        try:
            items.append(build(record))
        except instance_format_error:
            raise
        except geometry_error as error:
            raise instance_format_error(str(error), k)
        except (KeyError, ValueError, TypeError, ZeroDivisionError) as error:
            raise instance_format_error(f"malformed record ({error!r})", k)
    return items


def write_arcs(path, arcs, **header):
    write_records(path, "arcs", (arc.to_record() for arc in arcs), **header)


def read_arcs(path):
    """Reads an arcs file and rejects arcs overlapping on one curve or sharing an id."""
    _, records = read_records(path, "arcs")
    arcs = _convert(records, arc_from_record)
    if len({arc.id for arc in arcs}) != len(arcs):
        raise instance_format_error("arc ids must be unique")
    try:
        check_distinct_curves(arcs)
    except geometry_error as error:
        raise instance_format_error(str(error))
    return arcs


def write_ranges(path, ranges, **header):
    write_records(path, "ranges", (range_to_record(rng) for rng in ranges), **header)


def read_ranges(path):
    _, records = read_records(path, "ranges")
    ranges = _convert(records, range_from_record)
    if len({rng.id for rng in ranges}) != len(ranges):
        raise instance_format_error("range ids must be unique")
    return ranges


def write_queries(path, queries, **header):
    write_records(path, "queries", (query_to_record(k, query) for k, query in enumerate(queries)), **header)


def read_queries(path):
    _, records = read_records(path, "queries")
    return _convert(records, query_from_record)
