#Semialgebraic range stabbing: counting, reporting and semigroup queries.
import logging
from bisect import bisect_right
from math import ceil

import numpy as np

from AlgebraicArcQueries.Algebra import as_rational, compare_values, format_rational, geometry_error
from AlgebraicArcQueries.Arcs import (ABOVE, BELOW, ON, algebraic_arc, arc_from_record, circle_curve, circle_domain,
                                      compare_arcs_at, degenerate_input, intersection_count, parabola_curve,
                                      point_vs_arc, segment_curve)
from AlgebraicArcQueries.Cutting import _samples, cutting
from AlgebraicArcQueries.LensCut import cut_ranges_matched, cut_to_pseudosegments
from AlgebraicArcQueries.PseudoStructures import STRICT_ABOVE, WEAK_BELOW, pseudo_segment_tree, two_pseudoseg_structure

logger = logging.getLogger(__name__)

DEFAULT_REPORT_R = 4
MAX_REPORT_DEPTH = 12


class unsupported_parameter(geometry_error):
    pass


class semialgebraic_range:
    """A (2, algebraic) range: the points between a lower and an upper arc over a common x-range.

    Membership is closed on the lower boundary and the left side, open on the upper boundary and the right side.
    A missing lower (upper) arc means the range is unbounded below (above).
    """

    def __init__(self, id, lower, upper, x_lo, x_hi, weight=1, kind="sandwich"):
        self.id = id
        self.lower = lower
        self.upper = upper
        self.x_lo = as_rational(x_lo)
        self.x_hi = as_rational(x_hi)
        self.weight = weight
        self.kind = kind
        if self.x_lo >= self.x_hi:
            raise degenerate_input(f"Range {id} has an empty x-range.")
        for arc in (lower, upper):
            if arc is not None and not arc.spans(self.x_lo, self.x_hi):
                raise degenerate_input(f"Boundary arc {arc.id} of range {id} does not span [{self.x_lo}, {self.x_hi}].")
        if lower is not None and upper is not None:
            lower, upper = lower.clip(self.x_lo, self.x_hi), upper.clip(self.x_lo, self.x_hi)
            if any(compare_arcs_at(lower, upper, x) > 0 for x in _samples(self.x_lo, self.x_hi,
                                                                         intersection_count(lower, upper)[1])):
                raise degenerate_input(f"Lower boundary of range {id} rises above its upper boundary.")

    def __repr__(self):
        return f"semialgebraic_range({self.id}, {self.kind}, [{self.x_lo}, {self.x_hi}))"

    def contains(self, q):
        if not (self.x_lo <= q.x < self.x_hi):
            return False
        if self.lower is not None and point_vs_arc(q, self.lower) == BELOW:
            return False
        if self.upper is not None and point_vs_arc(q, self.upper) != BELOW:
            return False
        return True

    @property
    def arcs(self):
        return [arc for arc in (self.lower, self.upper) if arc is not None]


class signed_lower_range:
    """The region on or above an arc (or the whole slab when the arc is None) over [x_lo, x_hi), with a sign."""

    def __init__(self, boundary, sign, parent, x_lo, x_hi, weight=1):
        self.boundary = boundary
        self.sign = sign
        self.parent = parent
        self.x_lo = x_lo
        self.x_hi = x_hi
        self.weight = weight

    def contains(self, q):
        if not (self.x_lo <= q.x < self.x_hi):
            return False
        return self.boundary is None or point_vs_arc(q, self.boundary) in (ABOVE, ON)

    def __repr__(self):
        return f"signed_lower_range({'+' if self.sign > 0 else '-'}, parent={self.parent})"


def decompose(ranges):
    """Writes every range as the difference of two ranges bounded from below.

    Arguments:
        ranges {list} -- semialgebraic_range objects

    Returns:
        list -- signed_lower_range objects, two per range bounded above and one otherwise
    """
    pieces = []
    for rng in ranges:
        pieces.append(signed_lower_range(rng.lower, 1, rng.id, rng.x_lo, rng.x_hi, rng.weight))
        if rng.upper is not None:
            pieces.append(signed_lower_range(rng.upper, -1, rng.id, rng.x_lo, rng.x_hi, rng.weight))
    return pieces


def disk_range(id, cx, cy, r2, first_arc_id=None, weight=1):
    """The disk of squared radius r2 around (cx, cy), restricted to its nudged rational x-range."""
    cx, cy, r2 = as_rational(cx), as_rational(cy), as_rational(r2)
    lo, hi = circle_domain(cx, r2)
    base = 2 * id if first_arc_id is None else first_arc_id
    lower = algebraic_arc(base, circle_curve(cx, cy, r2, "lower"), lo, hi)
    upper = algebraic_arc(base + 1, circle_curve(cx, cy, r2, "upper"), lo, hi)
    return semialgebraic_range(id, lower, upper, lo, hi, weight, kind="disk")


def parabola_region(id, a, b, c, x_lo, x_hi, top=None, first_arc_id=None, weight=1):
    """The region above the parabola y = a x^2 + b x + c over [x_lo, x_hi), capped by y = top when given."""
    base = 2 * id if first_arc_id is None else first_arc_id
    lower = algebraic_arc(base, parabola_curve(a, b, c), x_lo, x_hi)
    upper = None
    if top is not None:
        upper = algebraic_arc(base + 1, segment_curve(0, top), x_lo, x_hi)
    return semialgebraic_range(id, lower, upper, x_lo, x_hi, weight, kind="parabola_region")


def range_from_record(record):
    """Builds a range from its JSON-lines record.

    Records look like {"id": 3, "type": "disk", "params": {"cx": .., "cy": .., "r2": ..}},
    {"id": 4, "type": "parabola_region", "params": {"a", "b", "c", "top"}, "x": [lo, hi]} or
    {"id": 5, "type": "sandwich", "lower": arc record, "upper": arc record, "x": [lo, hi]}.
    """
    kind = record.get("type")
    id = int(record["id"])
    weight = as_rational(record.get("weight", 1))
    params = record.get("params", {})
    if kind == "disk":
        return disk_range(id, params["cx"], params["cy"], params["r2"], weight=weight)
    if kind == "parabola_region":
        lo, hi = record["x"]
        return parabola_region(id, params["a"], params["b"], params["c"], lo, hi, params.get("top"), weight=weight)
    if kind == "sandwich":
        lo, hi = record["x"]
        lower = arc_from_record(record["lower"]) if record.get("lower") else None
        upper = arc_from_record(record["upper"]) if record.get("upper") else None
        return semialgebraic_range(id, lower, upper, lo, hi, weight, kind="sandwich")
    raise degenerate_input(f"Unknown range type {kind}.")


def range_to_record(rng):
    record = {"id": rng.id, "type": rng.kind, "x": [format_rational(rng.x_lo), format_rational(rng.x_hi)]}
    if rng.weight != 1:
        record["weight"] = format_rational(rng.weight)
    if rng.kind == "disk":
        circle = rng.lower.curve
        record["params"] = circle.params
    elif rng.kind == "parabola_region":
        record["params"] = dict(rng.lower.curve.params)
        if rng.upper is not None:
            record["params"]["top"] = format_rational(rng.upper.curve.intercept)
    else:
        record["lower"] = rng.lower.to_record() if rng.lower is not None else None
        record["upper"] = rng.upper.to_record() if rng.upper is not None else None
    return record


# counting

class _interval_counter:
    """Signed count of the x-intervals [lo, hi) holding an abscissa."""

    def __init__(self, intervals):
        starts = sorted((lo, w) for lo, _, w in intervals)
        stops = sorted((hi, w) for _, hi, w in intervals)
        self.starts = [lo for lo, _ in starts]
        self.stops = [hi for hi, _ in stops]
        self.start_weights = np.cumsum([0] + [w for _, w in starts])
        self.stop_weights = np.cumsum([0] + [w for _, w in stops])

    def __len__(self):
        return len(self.starts)

    def count(self, x):
        return int(self.start_weights[bisect_right(self.starts, x)] - self.stop_weights[bisect_right(self.stops, x)])


def _boundary_arc(arc, x_lo, x_hi, id):
    """The part of a range boundary over the range's x-range, renumbered so that id and source are both id."""
    clipped = arc.clip(x_lo, x_hi)
    return algebraic_arc(id, clipped.curve, clipped.x_lo, clipped.x_hi, clipped.space, id)


def _overlaps_open(arc, lo, hi):
    if lo is not None and arc.x_hi is not None and compare_values(arc.x_hi, lo) <= 0:
        return False
    if hi is not None and arc.x_lo is not None and compare_values(arc.x_lo, hi) >= 0:
        return False
    return True


def trade_off_r(n, m):
    """Cutting parameter ceil(m / n) for a space budget m.

    Raises:
        unsupported_parameter: m below n^(3/2)
    """
    if m < n ** 1.5:
        raise unsupported_parameter(f"Space parameter m = {m} is below n^(3/2) = {n ** 1.5:.1f}.")
    if m > n * n:
        logger.warning("space parameter m = %s is above n^2, clamped to %d", m, n * n)
        m = n * n
    return max(1, ceil(m / n))


class stab_count_structure:
    """Counts the ranges holding a query point.

    Each range is written as signed regions bounded from below. Their boundaries are lens-cut into mu
    pseudo-segments, cut with r = ceil(mu / n) (or ceil(m / n) for a space budget m) and refined until no cell
    holds more than mu / r^2 cut points. A cell keeps the signed number of boundaries passing below it and a
    weighted pseudo-segment tree over the pieces of the boundaries crossing it.

    Arguments:
        ranges {list} -- semialgebraic_range objects

    Keyword Arguments:
        m {int} -- Space parameter in [n^(3/2), n^2] (default: {None})
        seed {int} -- Seed of the cutting sample (default: {0})
        strategy {str} -- Partition strategy of the cell trees (default: {"signature_lex"})
    """

    def __init__(self, ranges, m=None, seed=0, strategy="signature_lex"):
        self.ranges = list(ranges)
        pieces = decompose(self.ranges)
        bounded = [piece for piece in pieces if piece.boundary is not None]
        self.slabs = _interval_counter([(piece.x_lo, piece.x_hi, piece.sign) for piece in pieces
                                        if piece.boundary is None])
        self.arcs = [_boundary_arc(piece.boundary, piece.x_lo, piece.x_hi, k) for k, piece in enumerate(bounded)]
        self.signs = np.array([piece.sign for piece in bounded], dtype=int)
        subarcs, plan, _ = cut_to_pseudosegments(self.arcs, verify=False)
        n = max(1, len(self.ranges))
        self.mu = len(subarcs)
        self.r = trade_off_r(n, m) if m is not None else max(1, ceil(self.mu / n))
        self.cutting = cutting(self.arcs, self.r, seed=seed, with_rays=True, strict=False)
        points = [(x, k) for k in range(len(self.arcs)) for x in plan.of(k)]
        if points:
            self.cutting.refine_by_points(points, ceil(self.mu / self.cutting.r ** 2))
        by_source = {}
        for piece in subarcs:
            by_source.setdefault(piece.source, []).append(piece)
        self.trees, self.offsets = [], []
        for cell in self.cutting.cells:
            local, weights = [], []
            for k in np.flatnonzero(self.cutting.crossing_masks[cell.id]):
                for piece in by_source[int(k)]:
                    if _overlaps_open(piece, cell.x_lo, cell.x_hi):
                        local.append(piece.clip(cell.x_lo, cell.x_hi))
                        weights.append(int(self.signs[k]))
            self.trees.append(pseudo_segment_tree(local, weights, strategy=strategy, seed=seed) if local else None)
            self.offsets.append(int(self.signs[self.cutting.below_masks[cell.id]].sum()) if len(self.arcs) else 0)
        self.stats = {"n": len(self.ranges), "arcs": len(self.arcs), "mu": self.mu, "r": self.cutting.r,
                      "cells": len(self.cutting.cells),
                      "max_crossing": max((int(mask.sum()) for mask in self.cutting.crossing_masks), default=0)}
        logger.info("stab count structure: %s", self.stats)

    def query(self, q):
        """Number of ranges holding q, with the probes spent."""
        cell = self.cutting.locate(q)
        count, probes = self.offsets[cell] + self.slabs.count(q.x), 1
        if self.trees[cell] is not None:
            more, extra = self.trees[cell].count(q, WEAK_BELOW)
            count += more
            probes += extra
        return count, probes


def build_stab_count(ranges, m=None, seed=0, strategy="signature_lex"):
    return stab_count_structure(ranges, m=m, seed=seed, strategy=strategy)


def query_stab_count(structure, q):
    return structure.query(q)[0]


# reporting and semigroup folds

BELOW_CELL, CROSSING_CELL, ABOVE_CELL, OUTSIDE_CELL = "below", "crossing", "above", "outside"


def _cell_spans(rng, cell):
    return cell.x_lo is not None and cell.x_hi is not None and rng.x_lo <= cell.x_lo and cell.x_hi <= rng.x_hi


def _cell_overlaps(rng, cell):
    return (cell.x_hi is None or rng.x_lo < cell.x_hi) and (cell.x_lo is None or cell.x_lo < rng.x_hi)


class _one_sided:
    """Ranges where a single lens-cut boundary decides membership inside a cell."""

    def __init__(self, ranges, role, seed, strategy):
        boundaries = [_boundary_arc(getattr(rng, role), rng.x_lo, rng.x_hi, k) for k, rng in enumerate(ranges)]
        pieces, _, _ = cut_to_pseudosegments(boundaries, verify=False)
        self.relation = WEAK_BELOW if role == "lower" else STRICT_ABOVE
        self.tree = pseudo_segment_tree(pieces, payloads=[ranges[piece.source].id for piece in pieces],
                                        strategy=strategy, seed=seed)

    def collect(self, q, visit_group, visit_ids):
        nodes, singles, probes = self.tree.canonical(q, self.relation)
        for node in nodes:
            visit_group(id(node), node.payloads)
        visit_ids([node.payloads[k] for node, k in singles])
        return probes


def _one_sided_or_none(ranges, role, seed, strategy):
    return _one_sided(ranges, role, seed, strategy) if ranges else None


class _base_reporter:
    """Matched lens cuts turn small range sets into lower/upper pseudo-segment pairs."""

    def __init__(self, ranges, seed, strategy):
        paired = [rng for rng in ranges if rng.lower is not None]
        self.upper_only = _one_sided_or_none([rng for rng in ranges if rng.lower is None], "upper", seed, strategy)
        triples = []
        for cut in cut_ranges_matched(paired):
            uppers = cut.upper if cut.upper is not None else [None] * len(cut.lower)
            triples.extend((cut.id, lower, upper) for lower, upper in zip(cut.lower, uppers))
        self.structure = two_pseudoseg_structure(triples, strategy=strategy, seed=seed) if triples else None

    def collect(self, q, visit_group, visit_ids):
        probes = 0
        if self.upper_only is not None:
            probes += self.upper_only.collect(q, visit_group, visit_ids)
        if self.structure is not None:
            whole, single, more = self.structure.canonical_positions(q)
            for node in whole:
                visit_group(id(node), [self.structure.triples[p][0] for p in node.payloads])
            visit_ids([self.structure.triples[p][0] for p in single])
            probes += more
        return probes


class _report_node:
    """One level of the reporting recursion over the boundaries of a range set."""

    def __init__(self, ranges, stop, r, seed, strategy, depth=0):
        self.interval_only = [rng for rng in ranges if rng.lower is None and rng.upper is None]
        ranges = [rng for rng in ranges if rng.lower is not None or rng.upper is not None]
        self.size = len(ranges)
        self.base = None
        if len(ranges) <= stop or depth >= MAX_REPORT_DEPTH:
            self.base = _base_reporter(ranges, seed, strategy)
            return
        arcs, index = [], {}
        for position, rng in enumerate(ranges):
            for role in ("lower", "upper"):
                boundary = getattr(rng, role)
                if boundary is not None:
                    index[position, role] = len(arcs)
                    arcs.append(_boundary_arc(boundary, rng.x_lo, rng.x_hi, len(arcs)))
        self.cutting = cutting(arcs, r, seed=seed, with_rays=True, strict=False)
        self.full, self.lower_side, self.upper_side, self.children = [], [], [], []
        for cell in self.cutting.cells:
            crossing = self.cutting.crossing_masks[cell.id]
            below = self.cutting.below_masks[cell.id]

            def state(position, role, missing):
                k = index.get((position, role))
                if k is None:
                    return missing
                if crossing[k]:
                    return CROSSING_CELL
                if below[k]:
                    return BELOW_CELL
                return ABOVE_CELL

            full, lower_only, upper_only, both = [], [], [], []
            for position, rng in enumerate(ranges):
                if not _cell_overlaps(rng, cell):
                    continue
                lower = state(position, "lower", BELOW_CELL)
                upper = state(position, "upper", ABOVE_CELL)
                if lower == ABOVE_CELL or upper == BELOW_CELL:
                    continue
                if lower == CROSSING_CELL and upper == CROSSING_CELL:
                    both.append(rng)
                elif lower == CROSSING_CELL:
                    lower_only.append(rng)
                elif upper == CROSSING_CELL or not _cell_spans(rng, cell):
                    # only a missing lower boundary leaves a covering range short of the cell
                    upper_only.append(rng)
                else:
                    full.append(rng)
            self.full.append([rng.id for rng in full])
            self.lower_side.append(_one_sided_or_none(lower_only, "lower", seed, strategy))
            self.upper_side.append(_one_sided_or_none(upper_only, "upper", seed, strategy))
            next_depth = depth + 1 if len(both) < len(ranges) else MAX_REPORT_DEPTH
            self.children.append(_report_node(both, stop, r, seed, strategy, next_depth) if both else None)

    def collect(self, q, visit_group, visit_ids):
        """Feeds the ranges holding q to the visitors, precombined groups where possible; returns the probes."""
        visit_ids([rng.id for rng in self.interval_only if rng.x_lo <= q.x < rng.x_hi])
        probes = len(self.interval_only)
        if self.base is not None:
            return probes + self.base.collect(q, visit_group, visit_ids)
        cell = self.cutting.locate(q)
        probes += 1
        visit_group((id(self), cell), self.full[cell])
        for side in (self.lower_side[cell], self.upper_side[cell]):
            if side is not None:
                probes += side.collect(q, visit_group, visit_ids)
        if self.children[cell] is not None:
            probes += self.children[cell].collect(q, visit_group, visit_ids)
        return probes


class stab_report_structure:
    """Reports the ranges holding a query point, and folds semigroup values over them.

    Every level cuts the range boundaries with a constant r and, per cell, stores the ranges covering the cell as
    one group, hands ranges with one crossing boundary to one-sided pseudo-segment trees and recurses on ranges
    whose two boundaries both cross. Levels stop at t^2 ranges, t = ceil(n^(1/4)), where matched lens cuts feed
    a two-level pseudo-segment structure.

    Arguments:
        ranges {list} -- semialgebraic_range objects

    Keyword Arguments:
        t {int} -- Stop parameter (default: {ceil(n ** 0.25)})
        r {int} -- Cutting parameter of every level (default: {DEFAULT_REPORT_R})
        seed {int} -- Seed of the cutting samples (default: {0})
        strategy {str} -- Partition strategy (default: {"signature_lex"})
    """

    def __init__(self, ranges, t=None, r=DEFAULT_REPORT_R, seed=0, strategy="signature_lex"):
        self.ranges = list(ranges)
        self.t = t if t is not None else ceil(max(1, len(self.ranges)) ** 0.25)
        self.r = r
        self.weights = {rng.id: rng.weight for rng in self.ranges}
        self.root = _report_node(self.ranges, self.t ** 2, r, seed, strategy)
        self._folds = {}
        logger.info("stab report structure over %d ranges, t=%d, r=%d", len(self.ranges), self.t, r)

    def report(self, q):
        """Sorted ids of the ranges holding q, with the probes spent."""
        found = []
        probes = self.root.collect(q, lambda key, ids: found.extend(ids), found.extend)
        return sorted(found), probes

    def weight_of(self, range_id):
        return self.weights[range_id]

    def fold(self, q, combine, identity, value=None):
        """Combines value(range id) over the ranges holding q without ever subtracting.

        Groups are combined once per (group, combine, identity, value) and reused, so value must be a stable
        callable such as a module-level function or a bound method.
        """
        value = self.weight_of if value is None else value
        result = identity

        def group(key, ids):
            nonlocal result
            cache_key = (key, combine, identity, value)
            if cache_key not in self._folds:
                total = identity
                for range_id in ids:
                    total = combine(total, value(range_id))
                self._folds[cache_key] = total
            result = combine(result, self._folds[cache_key])

        def singles(ids):
            nonlocal result
            for range_id in ids:
                result = combine(result, value(range_id))

        self.root.collect(q, group, singles)
        return result


def build_stab_report(ranges, t=None, r=DEFAULT_REPORT_R, seed=0, strategy="signature_lex"):
    return stab_report_structure(ranges, t=t, r=r, seed=seed, strategy=strategy)


def query_stab_report(structure, q):
    return structure.report(q)[0]


def query_stab_semigroup(structure, q, combine, identity, value=None):
    """Semigroup fold over the ranges holding q.

    Arguments:
        structure {stab_report_structure} -- Built structure
        q {point2} -- Query point
        combine {callable} -- Associative, commutative combine
        identity {object} -- Identity of combine

    Keyword Arguments:
        value {callable} -- Range id to value (default: the range weight)
    """
    return structure.fold(q, combine, identity, value)
