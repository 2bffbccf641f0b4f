#Query structures over pseudo-line and pseudo-segment families: envelopes, partitions with few crossed groups,
#partition trees for below counting and reporting, and the segment tree that turns pseudo-segments into
#pseudo-lines over canonical slabs.
import logging
from fractions import Fraction
from functools import cmp_to_key
from math import ceil, log2, sqrt

import numpy as np

from AlgebraicArcQueries.Algebra import compare_values, geometry_error, rational_inside
from AlgebraicArcQueries.Arcs import ABOVE, BELOW, ON, compare_arcs_at, intersection_count, point2, point_vs_arc
from AlgebraicArcQueries.Cutting import _inside, _samples, cutting

logger = logging.getLogger(__name__)

LEAF_SIZE = 32
DEFAULT_FANOUT = 8
STRATEGIES = ("signature_lex", "low_crossing_path")

STRICT_BELOW = "below"
WEAK_BELOW = "below_or_on"
STRICT_ABOVE = "above"


class not_pseudolines(geometry_error):
    def __init__(self, ids):
        self.ids = ids
        super().__init__(f"Arcs {ids[0]} and {ids[1]} meet more than once.")


def _relation_holds(q, arc, relation):
    side = point_vs_arc(q, arc)
    if relation == STRICT_BELOW:
        return side == ABOVE
    if relation == WEAK_BELOW:
        return side in (ABOVE, ON)
    return side == BELOW


class envelope:
    """Lower or upper envelope of arcs spanning [lo, hi]: pieces[k] is extremal between breakpoints k-1 and k."""

    def __init__(self, side, breakpoints, pieces, lo, hi):
        self.side = side
        self.breakpoints = breakpoints
        self.pieces = pieces
        self.lo = lo
        self.hi = hi

    def __repr__(self):
        return f"envelope({self.side}, {[piece.id for piece in self.pieces]})"

    def __len__(self):
        return len(self.pieces)

    def piece_at(self, x):
        lo, hi = 0, len(self.breakpoints)
        while lo < hi:
            mid = (lo + hi) // 2
            if compare_values(self.breakpoints[mid], x) <= 0:
                lo = mid + 1
            else:
                hi = mid
        return self.pieces[lo]

    def classify(self, q):
        return point_vs_arc(q, self.piece_at(q.x))


def _within(t, lo, hi):
    return (lo is None or compare_values(t, lo) >= 0) and (hi is None or compare_values(t, hi) <= 0)


def _single(side, arc, lo, hi):
    return envelope(side, [], [arc], lo, hi)


def _merge(first, second, side, check, cache):
    lo, hi = first.lo, first.hi
    breaks = sorted(first.breakpoints + second.breakpoints, key=cmp_to_key(compare_values))
    unique = []
    for b in breaks:
        if not unique or compare_values(unique[-1], b) != 0:
            unique.append(b)
    ends = [lo] + unique + [hi]
    out_breaks, out_pieces = [], []

    def emit(start, piece):
        if out_pieces and out_pieces[-1] is piece:
            return
        if out_pieces:
            out_breaks.append(start)
        out_pieces.append(piece)

    for u, v in zip(ends, ends[1:]):
        x = rational_inside(u, v)
        a, b = first.piece_at(x), second.piece_at(x)
        if a is b:
            emit(u, a)
            continue
        key = (id(a), id(b))
        if key not in cache:
            cache[key] = intersection_count(a, b)[1]
            if check and len([t for t in cache[key] if _within(t, lo, hi)]) > 1:
                raise not_pseudolines((a.id, b.id))
        inside = [t for t in cache[key] if _inside(t, u, v)]
        starts = [u] + inside
        for start, sample in zip(starts, _samples(u, v, inside)):
            s = compare_arcs_at(a, b, sample)
            emit(start, a if (s <= 0) == (side == "lower") else b)
    return envelope(side, out_breaks, out_pieces, lo, hi)


def build_envelopes(pseudolines, lo=None, hi=None, check=False):
    """Lower and upper envelopes of a family spanning a common x-interval, by divide and conquer.

    Arguments:
        pseudolines {list} -- algebraic_arc objects spanning [lo, hi]

    Keyword Arguments:
        lo {Fraction} -- Left end of the interval, the common span when None (default: {None})
        hi {Fraction} -- Right end of the interval (default: {None})
        check {bool} -- Raise not_pseudolines on a pair of pieces meeting twice (default: {False})

    Returns:
        tuple -- (lower envelope, upper envelope)
    """
    if not pseudolines:
        raise geometry_error("Envelope of an empty family.")
    cache = {}

    def build(members, side):
        if len(members) == 1:
            return _single(side, members[0], lo, hi)
        middle = len(members) // 2
        return _merge(build(members[:middle], side), build(members[middle:], side), side, check, cache)

    return build(list(pseudolines), "lower"), build(list(pseudolines), "upper")


# partitions

def signature_matrix(arcs, points):
    """+1 where the arc passes above the point, -1 where below, 0 when on it or not covering it."""
    matrix = np.zeros((len(arcs), len(points)), dtype=np.int8)
    for i, arc in enumerate(arcs):
        for k, q in enumerate(points):
            side = point_vs_arc(q, arc)
            matrix[i, k] = 1 if side == BELOW else -1 if side == ABOVE else 0
    return matrix


def cell_points(arcs, r, lo=None, hi=None, seed=0):
    """One rational point inside each cell of a cutting of the arcs, restricted to the slab [lo, hi)."""
    cut = cutting(arcs, max(1, min(len(arcs), 2 * r)), seed=seed, strict=False)
    points = []
    for cell in cut.cells:
        left = cell.x_lo if lo is None or cell.x_lo is not None and compare_values(cell.x_lo, lo) >= 0 else lo
        right = cell.x_hi if hi is None or cell.x_hi is not None and compare_values(cell.x_hi, hi) <= 0 else hi
        if left is not None and right is not None and compare_values(left, right) >= 0:
            continue
        x = rational_inside(left, right)
        bottom = None if cell.bottom is None else cell.bottom.exact_value(x)
        top = None if cell.top is None else cell.top.exact_value(x)
        points.append(point2(x, rational_inside(bottom, top)))
    return points


def _groups_crossed(matrix, groups):
    crossed = np.zeros(matrix.shape[1], dtype=int)
    for group in groups:
        rows = matrix[group]
        crossed += (rows > 0).any(axis=0) & (rows < 0).any(axis=0)
    return crossed


def _spanning_path(matrix):
    """Greedy multiplicative-weights spanning path: each step takes the lightest crossing edge, then doubles."""
    n = matrix.shape[0]
    weights = np.ones(matrix.shape[1])
    path = [0]
    unused = np.ones(n, dtype=bool)
    unused[0] = False
    crossings = np.zeros(matrix.shape[1], dtype=int)
    while unused.any():
        tail = matrix[path[-1]]
        candidates = np.flatnonzero(unused)
        crossed = (matrix[candidates] * tail) < 0
        costs = crossed @ weights
        best = int(np.argmin(costs))
        nxt = int(candidates[best])
        weights[crossed[best]] *= 2
        crossings += crossed[best]
        path.append(nxt)
        unused[nxt] = False
    return path, crossings


def build_partition(pseudolines, r, strategy="signature_lex", lo=None, hi=None, seed=0, probes=0):
    """Splits a pseudo-line family into r groups of near-equal size that few points see on both sides.

    Arguments:
        pseudolines {list} -- algebraic_arc objects spanning [lo, hi]
        r {int} -- Number of groups

    Keyword Arguments:
        strategy {str} -- signature_lex or low_crossing_path (default: {"signature_lex"})
        seed {int} -- Seed for the test-point cutting and the probes (default: {0})
        probes {int} -- Random probe points for the crossing statistics (default: {0})

    Returns:
        tuple -- (list of lists of positions, stats dict)
    """
    n = len(pseudolines)
    r = max(1, min(r, n))
    ordered = sorted(range(n), key=lambda i: pseudolines[i].id)
    points = cell_points(pseudolines, r, lo, hi, seed) if r > 1 else []
    matrix = signature_matrix(pseudolines, points)
    stats = {"n": n, "r": r, "strategy": strategy, "test_points": len(points)}
    if strategy == "signature_lex":
        order = sorted(ordered, key=lambda i: (tuple(int(v) for v in matrix[i]), pseudolines[i].id))
    elif strategy == "low_crossing_path":
        local = matrix[ordered]
        path, crossings = _spanning_path(local) if n else ([], np.zeros(0))
        order = [ordered[k] for k in path]
        stats["path_crossing"] = int(crossings.max()) if len(crossings) else 0
    else:
        raise ValueError(f"Unknown partition strategy {strategy}.")
    groups = [list(map(int, chunk)) for chunk in np.array_split(np.array(order, dtype=int), r) if len(chunk)]
    crossed = _groups_crossed(matrix, groups) if len(points) else np.zeros(1, dtype=int)
    stats["max_crossed"] = int(crossed.max())
    stats["mean_crossed"] = float(crossed.mean())
    if probes:
        probe_points = random_probes(pseudolines, probes, lo, hi, seed)
        probed = _groups_crossed(signature_matrix(pseudolines, probe_points), groups)
        stats["max_probe_crossed"] = int(probed.max())
        stats["mean_probe_crossed"] = float(probed.mean())
    return groups, stats


def random_probes(arcs, count, lo=None, hi=None, seed=0):
    """Random rational points over the arcs' bounding box."""
    rng = np.random.default_rng(seed + 1)
    finite = [v for arc in arcs for v in (arc.x_lo, arc.x_hi) if isinstance(v, Fraction)]
    left = lo if isinstance(lo, Fraction) else min(finite, default=Fraction(-1))
    right = hi if isinstance(hi, Fraction) else max(finite, default=Fraction(1))
    if left >= right:
        right = left + 1
    ys = [arc.float_y(x) for arc in arcs for x in (left, right) if arc.covers(x)]
    bottom, top = (min(ys) - 1, max(ys) + 1) if ys else (-1.0, 1.0)
    points = []
    for _ in range(count):
        x = left + (right - left) * Fraction(int(rng.integers(0, 2 ** 20)), 2 ** 20)
        y = Fraction(bottom) + Fraction(top - bottom) * Fraction(int(rng.integers(0, 2 ** 20)), 2 ** 20)
        points.append(point2(x, y.limit_denominator(2 ** 30)))
    return points


# partition trees

class partition_node:
    """A node of a partition tree: members with weights, their envelopes, and child groups."""

    def __init__(self, members, weights, payloads, lo, hi, strategy, fanout, leaf_size, seed, check):
        self.members = members
        self.weights = weights
        self.payloads = payloads
        self.total = sum(weights)
        self.lower, self.upper = build_envelopes(members, lo, hi, check)
        self.children = []
        self._folds = {}
        if len(members) > leaf_size:
            r = max(2, min(fanout, ceil(len(members) / leaf_size)))
            groups, self.stats = build_partition(members, r, strategy, lo, hi, seed)
            if len(groups) > 1:
                self.children = [partition_node([members[i] for i in group], [weights[i] for i in group],
                                                [payloads[i] for i in group], lo, hi, strategy, fanout, leaf_size,
                                                seed, check) for group in groups]

    @property
    def is_leaf(self):
        return not self.children

    def _all_none(self, q, relation):
        """(all members satisfy the relation, no member does), from two envelope searches."""
        upper, lower = self.upper.classify(q), self.lower.classify(q)
        if relation == STRICT_BELOW:
            return upper == ABOVE, lower in (BELOW, ON)
        if relation == WEAK_BELOW:
            return upper in (ABOVE, ON), lower == BELOW
        return lower == BELOW, upper in (ABOVE, ON)

    def canonical(self, q, relation):
        """Splits the members satisfying the relation at q into whole nodes and single positions.

        Returns:
            tuple -- (list of partition_node, list of (node, position), probes)
        """
        nodes, singles = [], []
        probes = 0
        pending = [self]
        while pending:
            node = pending.pop()
            probes += 2
            every, none = node._all_none(q, relation)
            if every:
                nodes.append(node)
            elif none:
                continue
            elif node.is_leaf:
                probes += len(node.members)
                singles.extend((node, k) for k, arc in enumerate(node.members) if _relation_holds(q, arc, relation))
            else:
                pending.extend(node.children)
        return nodes, singles, probes

    def count(self, q, relation=STRICT_BELOW):
        nodes, singles, probes = self.canonical(q, relation)
        return sum(node.total for node in nodes) + sum(node.weights[k] for node, k in singles), probes

    def report(self, q, relation=STRICT_BELOW):
        nodes, singles, probes = self.canonical(q, relation)
        found = [payload for node in nodes for payload in node.all_payloads()]
        found.extend(node.payloads[k] for node, k in singles)
        return found, probes

    def all_payloads(self):
        return list(self.payloads)

    def fold(self, combine, identity, value):
        """Precombined value of every payload below this node, cached per semigroup."""
        key = (combine, identity, value)
        if key not in self._folds:
            result = identity
            for payload in self.payloads:
                result = combine(result, value(payload))
            self._folds[key] = result
        return self._folds[key]


def build_partition_tree(pseudolines, weights=None, payloads=None, lo=None, hi=None, strategy="signature_lex",
                         fanout=DEFAULT_FANOUT, leaf_size=LEAF_SIZE, seed=0, check=False):
    """Partition tree over a pseudo-line family spanning [lo, hi].

    Keyword Arguments:
        weights {list} -- Per-arc weights for counting (default: all 1)
        payloads {list} -- Per-arc values reported by queries (default: arc ids)
        strategy {str} -- Partition strategy (default: {"signature_lex"})
        leaf_size {int} -- Largest node answered by scanning (default: {LEAF_SIZE})

    Returns:
        partition_node -- The root, or None for an empty family
    """
    if not pseudolines:
        return None
    weights = [1] * len(pseudolines) if weights is None else list(weights)
    payloads = [arc.id for arc in pseudolines] if payloads is None else list(payloads)
    return partition_node(list(pseudolines), weights, payloads, lo, hi, strategy, fanout, leaf_size, seed, check)


def ps_count_below(root, q):
    """Number of pseudo-lines strictly below q, with the number of probes spent.

    Returns:
        tuple -- (count, probes)
    """
    if root is None:
        return 0, 0
    return root.count(q, STRICT_BELOW)


# segment trees over pseudo-segments

class _segment_node:
    def __init__(self, first, last, lo, hi):
        self.first = first
        self.last = last
        self.lo = lo
        self.hi = hi
        self.left = self.right = None
        self.members = []
        self.tree = None


class slab_tree:
    """A segment tree over the elementary slabs cut out by the arc endpoints.

    Every arc is stored at the canonical nodes covering its half-open x-range [x_lo, x_hi); a node's slab is the
    union of its elementary slabs, unbounded at the two outermost ones.
    """

    def __init__(self, arcs):
        self.arcs = list(arcs)
        ends = sorted((v for arc in self.arcs for v in (arc.x_lo, arc.x_hi) if v is not None),
                      key=cmp_to_key(compare_values))
        self.ends = []
        for v in ends:
            if not self.ends or compare_values(self.ends[-1], v) != 0:
                self.ends.append(v)
        self.root = self._build(0, len(self.ends))
        for position, arc in enumerate(self.arcs):
            first = 0 if arc.x_lo is None else self._position(arc.x_lo) + 1
            last = len(self.ends) if arc.x_hi is None else self._position(arc.x_hi)
            self._insert(self.root, first, last, position)

    def _position(self, value):
        lo, hi = 0, len(self.ends)
        while lo < hi:
            mid = (lo + hi) // 2
            if compare_values(self.ends[mid], value) < 0:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def _slab_of(self, x):
        """Index of the elementary slab [ends[k-1], ends[k]) holding x."""
        lo, hi = 0, len(self.ends)
        while lo < hi:
            mid = (lo + hi) // 2
            if compare_values(self.ends[mid], x) <= 0:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def _build(self, first, last):
        lo = None if first == 0 else self.ends[first - 1]
        hi = None if last == len(self.ends) else self.ends[last]
        node = _segment_node(first, last, lo, hi)
        if first < last:
            middle = (first + last) // 2
            node.left = self._build(first, middle)
            node.right = self._build(middle + 1, last)
        return node

    def _insert(self, node, first, last, position):
        if last < node.first or node.last < first or first > last:
            return
        if first <= node.first and node.last <= last:
            node.members.append(position)
            return
        self._insert(node.left, first, last, position)
        self._insert(node.right, first, last, position)

    def nodes(self):
        """Every node, parents before children."""
        found, pending = [], [self.root]
        while pending:
            node = pending.pop()
            if node is not None:
                found.append(node)
                pending.extend((node.right, node.left))
        return found

    def path(self, x):
        """Nodes whose slab holds x, root first."""
        k = self._slab_of(x)
        node, found = self.root, []
        while node is not None:
            found.append(node)
            if node.left is None:
                break
            node = node.left if k <= node.left.last else node.right
        return found


class pseudo_segment_tree(slab_tree):
    """Pseudo-segments stored at canonical slabs, where each node's members are pseudo-lines.

    A pseudo-segment covers the half-open x-range [x_lo, x_hi), so pieces cut from one arc never count twice.
    count_closed adds the pieces ending exactly at q.x for callers that treat every range as closed.
    """

    def __init__(self, arcs, weights=None, payloads=None, strategy="signature_lex", fanout=DEFAULT_FANOUT,
                 leaf_size=LEAF_SIZE, seed=0, check=False):
        super().__init__(arcs)
        self.weights = [1] * len(self.arcs) if weights is None else list(weights)
        self.payloads = [arc.id for arc in self.arcs] if payloads is None else list(payloads)
        self.closing = {}
        for position, arc in enumerate(self.arcs):
            if arc.x_hi is not None:
                self.closing.setdefault(self._position(arc.x_hi), []).append(position)
        for node in self.nodes():
            if node.members:
                clipped = [self.arcs[i].clip(node.lo, node.hi) for i in node.members]
                node.tree = build_partition_tree(clipped, [self.weights[i] for i in node.members],
                                                 [self.payloads[i] for i in node.members], node.lo, node.hi,
                                                 strategy, fanout, leaf_size, seed, check)

    def canonical(self, q, relation=STRICT_BELOW):
        nodes, singles, probes = [], [], 0
        for node in self.path(q.x):
            if node.tree is None:
                continue
            more_nodes, more_singles, more = node.tree.canonical(q, relation)
            nodes.extend(more_nodes)
            singles.extend(more_singles)
            probes += more
        return nodes, singles, probes

    def count(self, q, relation=STRICT_BELOW):
        nodes, singles, probes = self.canonical(q, relation)
        return sum(node.total for node in nodes) + sum(node.weights[k] for node, k in singles), probes

    def count_closed(self, q, relation=STRICT_BELOW):
        count, probes = self.count(q, relation)
        k = self._position(q.x)
        if k < len(self.ends) and compare_values(self.ends[k], q.x) == 0:
            for position in self.closing.get(k, ()):
                probes += 1
                if _relation_holds(q, self.arcs[position], relation):
                    count += self.weights[position]
        return count, probes

    def report(self, q, relation=STRICT_BELOW):
        nodes, singles, probes = self.canonical(q, relation)
        found = [payload for node in nodes for payload in node.payloads]
        found.extend(node.payloads[k] for node, k in singles)
        return found, probes


def pseg_count_below(pseudosegments, q, structure=None):
    """Number of pseudo-segments strictly below q over their closed x-ranges.

    A point at a cut abscissa sees both pieces meeting there, as a brute-force count over the pieces does.

    Returns:
        tuple -- (count, probes)
    """
    structure = pseudo_segment_tree(pseudosegments) if structure is None else structure
    return structure.count_closed(q, STRICT_BELOW)


class two_pseudoseg_structure:
    """Reporting structure for ranges bounded by a lower and an upper pseudo-segment over a shared x-range.

    Primary partition trees on the lower pieces hand every fully covered group to a secondary partition tree on
    the matching upper pieces. A missing upper piece stands for a range unbounded above.
    """

    def __init__(self, triples, strategy="signature_lex", leaf_size=LEAF_SIZE, seed=0):
        self.triples = list(triples)
        lowers = [lower for _, lower, _ in self.triples]
        self.segments = pseudo_segment_tree(lowers, payloads=list(range(len(self.triples))), strategy=strategy,
                                            leaf_size=leaf_size, seed=seed)
        self.secondary = {}
        self.strategy = strategy
        self.leaf_size = leaf_size
        self.seed = seed
        for node in self.segments.nodes():
            if node.tree is not None:
                self._attach(node, node.tree)

    def _attach(self, segment, node):
        uppers, payloads, unbounded = [], [], []
        for position in node.payloads:
            upper = self.triples[position][2]
            if upper is None:
                unbounded.append(position)
            else:
                uppers.append(upper.clip(segment.lo, segment.hi))
                payloads.append(position)
        tree = build_partition_tree(uppers, payloads=payloads, lo=segment.lo, hi=segment.hi,
                                    strategy=self.strategy, leaf_size=self.leaf_size, seed=self.seed)
        self.secondary[id(node)] = (tree, unbounded)
        for child in node.children:
            self._attach(segment, child)

    def canonical_positions(self, q):
        """(partition nodes wholly inside the answer, loose triple positions, probes)."""
        nodes, singles, probes = self.segments.canonical(q, WEAK_BELOW)
        whole, single = [], []
        for node in nodes:
            tree, unbounded = self.secondary[id(node)]
            single.extend(unbounded)
            if tree is None:
                continue
            more_nodes, more_singles, more = tree.canonical(q, STRICT_ABOVE)
            whole.extend(more_nodes)
            single.extend(n.payloads[k] for n, k in more_singles)
            probes += more
        for node, k in singles:
            position = node.payloads[k]
            upper = self.triples[position][2]
            probes += 1
            if upper is None or point_vs_arc(q, upper) == BELOW:
                single.append(position)
        return whole, single, probes

    def report(self, q):
        """Ids of the ranges holding q, with the probes spent."""
        whole, single, probes = self.canonical_positions(q)
        positions = [p for node in whole for p in node.payloads] + single
        return sorted(self.triples[p][0] for p in positions), probes

    def fold(self, q, combine, identity, value):
        """Combines value(position) over the ranges holding q using per-node precombined values."""
        whole, single, _ = self.canonical_positions(q)
        result = identity
        for node in whole:
            result = combine(result, node.fold(combine, identity, value))
        for position in single:
            result = combine(result, value(position))
        return result


def report_2pseudoseg(triples, q, structure=None):
    structure = two_pseudoseg_structure(triples) if structure is None else structure
    return structure.report(q)[0]


def path_crossing_bound(n):
    return 12 * sqrt(n) * log2(n)
