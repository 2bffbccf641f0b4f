#Ray shooting amid arcs: counting the intersections of a query segment with the arcs, and the first arc hit by a ray.
#A segment count is the difference of two rightward ray counts. Slabs lying wholly right of the ray origin are
#answered in the dual plane, partial slabs by a case analysis on the ends of each arc piece.
#Large partial slabs nest the case analysis: wall order, then side of the origin, kappa membership and slope.
import logging
from fractions import Fraction
from functools import cmp_to_key

from AlgebraicArcQueries.Algebra import as_rational, compare_values, geometry_error
from AlgebraicArcQueries.Arcs import (ABOVE, ON, algebraic_arc, compare_arcs_at, derivative_curve, dual_of_end,
                                      dual_region_curve, intersection_points, point2, point_vs_arc, segment_curve,
                                      slope_sign, tangent_locus)
from AlgebraicArcQueries.LensCut import cut_joint_three_spaces, cut_to_pseudosegments
from AlgebraicArcQueries.Oracle import ray_arc
from AlgebraicArcQueries.PseudoStructures import (LEAF_SIZE, STRICT_ABOVE, STRICT_BELOW, WEAK_BELOW,
                                                  pseudo_segment_tree, slab_tree)

logger = logging.getLogger(__name__)

FIRST_HIT_DIRECT = 8
MAX_BISECTION = 96


class vertical_query(geometry_error):
    pass


class query_through_vertex(geometry_error):
    """The query line passes through an arc end, a slab wall point of an arc, or touches an arc."""

    def __init__(self, arc_id):
        self.arc_id = arc_id
        super().__init__(f"Query passes through a vertex of arc {arc_id}; perturb the query and retry.")


def _line(m, c):
    return algebraic_arc(-1, segment_curve(m, c), None, None)


def _convex_side(arc, m, c):
    """The arc and the line (m, c), both mirrored when the arc is concave."""
    if arc.convexity < 0:
        return arc.reflected(), -m, -c
    return arc, m, c


def _kappa_side(a, m, c):
    """Where the line y = m x + c lies against kappa(a) for an arc that is convex or straight.

    Returns:
        int -- 1 when the line crosses the interior of kappa(a), 0 when it passes through an end of the arc or
        touches it, -1 when it misses kappa(a)
    """
    line = _line(m, c)
    ends = [compare_arcs_at(line, a, x) for x in (a.x_lo, a.x_hi)]
    if 0 in ends:
        return 0
    if max(ends) > 0:
        return 1
    if a.convexity <= 0:
        return -1
    if slope_sign(a, a.x_lo, m) > 0 or slope_sign(a, a.x_hi, m) < 0:
        return -1
    return -tangent_locus(a).sign_against(as_rational(m), as_rational(c))


def line_arc_count_via_kappa(arc, m, c):
    """Intersections of the line y = m x + c with an arc, from kappa membership and the two end rays.

    A line meets a convex arc as often as it meets the boundary of kappa, minus the upward end rays it crosses.
    Concave arcs are mirrored first. A tangency counts twice.

    Raises:
        query_through_vertex: The line passes through an end of the arc
    """
    a, m, c = _convex_side(arc, as_rational(m), as_rational(c))
    line = _line(m, c)
    ends = [compare_arcs_at(line, a, x) for x in (a.x_lo, a.x_hi)]
    if 0 in ends:
        raise query_through_vertex(arc.source)
    return 2 * (_kappa_side(a, m, c) >= 0) - sum(1 for s in ends if s > 0)


def in_kappa_dual(arc, m, c):
    """True when the dual point (m, c) lies on or above the boundary of kappa*(arc)."""
    m = as_rational(m)
    for piece in dual_region_curve(arc):
        if piece.x_lo is not None and compare_values(m, piece.x_lo) < 0:
            continue
        if piece.x_hi is not None and compare_values(m, piece.x_hi) >= 0:
            continue
        return point_vs_arc(point2(m, c), piece) in (ABOVE, ON)
    return False


def classify_partial(piece, origin, m, c):
    """Case and intersection count for a rightward ray starting inside the x-range of a convex or straight piece.

    Only meetings in [origin.x, piece.x_hi) count. With the ray ending below the piece at its right end, an origin
    above the piece gives case A (one meeting) and an origin below it gives case C, two meetings exactly when the
    line reaches into kappa(piece) to the right of the origin. With the ray ending above, an origin below the
    piece gives case B (one meeting).

    Arguments:
        piece {algebraic_arc} -- Convex or straight, with origin.x strictly inside its x-range
        origin {point2} -- Start of the ray, on the line y = m x + c

    Raises:
        query_through_vertex: The ray meets the piece at its right end, starts on it, or touches it

    Returns:
        tuple -- (case name or None, count)
    """
    right = compare_arcs_at(_line(m, c), piece, piece.x_hi)
    if right == 0:
        raise query_through_vertex(piece.source)
    return _case(piece, origin, m, c, right > 0)


def _case(piece, origin, m, c, ends_above):
    side = point_vs_arc(origin, piece)
    if side == ON:
        raise query_through_vertex(piece.source)
    if ends_above:
        return ("B", 1) if side != ABOVE else (None, 0)
    if side == ABOVE:
        return "A", 1
    kappa = _kappa_side(piece, m, c)
    if kappa == 0:
        raise query_through_vertex(piece.source)
    if kappa < 0:
        return None, 0
    # the meetings lie right of the origin when the piece is flatter than the line there
    if point_vs_arc(point2(origin.x, m), derivative_curve(piece)) == ABOVE:
        return "C", 2
    return None, 0


def _region_tree(pieces, payloads, strategy, seed, leaf_size=LEAF_SIZE):
    """Pseudo-segment tree over the lens-cut boundaries of the kappa* regions, reporting one payload per piece."""
    boundaries = []
    for piece, payload in zip(pieces, payloads):
        for part in dual_region_curve(piece):
            boundaries.append(algebraic_arc(len(boundaries), part.curve, part.x_lo, part.x_hi, part.space, payload))
    cut, _, stats = cut_to_pseudosegments(boundaries, verify=False)
    logger.debug("kappa boundaries: %d pieces, %d cuts", stats["pieces"], stats["cuts"])
    return pseudo_segment_tree(cut, payloads=[part.source for part in cut], strategy=strategy, leaf_size=leaf_size,
                               seed=seed)


def _reject(tree, q, source=None):
    touching = min(set(tree.report(q, WEAK_BELOW)[0]) - set(tree.report(q, STRICT_BELOW)[0]))
    raise query_through_vertex(touching if source is None else source(touching))


class _kappa_group:
    """Convex or straight arc pieces answering line intersection counts through the dual plane.

    The count over the group is twice the number of kappa* regions holding the dual point of the line, minus the
    number of piece ends below the line. Both are below counts in the dual plane: once over the lens-cut boundaries
    of the kappa* regions, once over the dual lines of the distinct piece ends. Small groups are tested piece by
    piece.
    """

    def __init__(self, pieces, strategy="signature_lex", seed=0, leaf_size=LEAF_SIZE):
        self.pieces = pieces
        self.regions = self.ends = None
        if len(pieces) <= leaf_size:
            return
        try:
            self.regions = _region_tree(pieces, [piece.source for piece in pieces], strategy, seed)
            self.ends = self._end_tree(strategy, seed)
        except geometry_error as error:
            logger.debug("dual structure over %d pieces skipped: %s", len(pieces), error)
            self.regions = self.ends = None

    def _end_tree(self, strategy, seed):
        def order(first, second):
            (x, a), (y, b) = first, second
            return compare_values(x, y) or compare_arcs_at(a, b, x)

        points = sorted(((x, piece) for piece in self.pieces for x in (piece.x_lo, piece.x_hi)), key=cmp_to_key(order))
        lines, weights = [], []
        for k, point in enumerate(points):
            if k and order(points[k - 1], point) == 0:
                weights[-1] += 1
                continue
            x, piece = point
            dual = dual_of_end(piece, x)
            lines.append(algebraic_arc(len(lines), dual.curve, None, None, dual.space, piece.source))
            weights.append(1)
        return pseudo_segment_tree(lines, weights=weights, payloads=[line.source for line in lines],
                                   strategy=strategy, seed=seed)

    @staticmethod
    def _below(tree, q):
        """Weighted count strictly below q, rejecting a q on any member."""
        strict, probes = tree.count(q, STRICT_BELOW)
        weak, more = tree.count(q, WEAK_BELOW)
        if weak != strict:
            _reject(tree, q)
        return strict, weak, probes + more

    def count(self, m, c):
        """Intersections of the line y = m x + c with the group, with the probes spent."""
        if self.regions is None:
            return sum(line_arc_count_via_kappa(piece, m, c) for piece in self.pieces), len(self.pieces)
        q = point2(m, c)
        _, inside, probes = self._below(self.regions, q)
        below, _, more = self._below(self.ends, q)
        return 2 * inside - below, probes + more


def _bisect(length, predicate):
    lo, hi = 0, length
    while lo < hi:
        middle = (lo + hi) // 2
        if predicate(middle):
            lo = middle + 1
        else:
            hi = middle
    return lo


class _range_node:
    def __init__(self, first, last):
        self.first = first
        self.last = last
        self.left = self.right = None
        self.tree = None


class _case_structure:
    """Ray meetings with convex or straight pieces spanning one slab, sorted by their height at the right wall.

    The pieces are cut jointly until any two meet at most once as curves, as derivative curves and as dual curves.
    A binary tree over the wall order hands the pieces below the line at the wall (case B) and those above it
    (cases A and C) out as canonical ranges, each holding a pseudo-segment tree over the cuts of its pieces. Case A
    counts the pieces below the origin and case B those above it. For case C the partition nodes of pieces above
    the origin carry a tree over their kappa* boundaries, whose partition nodes in turn carry a tree over the
    derivative curves, counting the pieces flatter than the line at the origin. Both are built on first use. Ranges
    and sets of at most leaf_size pieces are tested piece by piece.

    Raises:
        geometry_error: Two pieces overlap on one curve
    """

    def __init__(self, pieces, strategy="signature_lex", seed=0, leaf_size=LEAF_SIZE):
        self.pieces = pieces
        self.strategy, self.seed, self.leaf_size = strategy, seed, leaf_size
        labelled = [piece.clip(None, None, id=k) for k, piece in enumerate(pieces)]
        cut, plan, stats = cut_joint_three_spaces(labelled)
        logger.debug("case structure: %d pieces, %d cuts", stats["pieces"], stats["cuts"])
        self.parts, start = [], 0
        for k in range(len(pieces)):
            stop = start + len(plan.of(k)) + 1
            self.parts.append(cut[start:stop])
            start = stop
        self._duals, self._tangents = {}, {}
        self.root = self._build(0, len(pieces))

    def _build(self, first, last):
        node = _range_node(first, last)
        if last - first <= self.leaf_size:
            return node
        positions = range(first, last)
        node.tree = pseudo_segment_tree([part for k in positions for part in self.parts[k]],
                                        payloads=[k for k in positions for _ in self.parts[k]],
                                        strategy=self.strategy, leaf_size=self.leaf_size, seed=self.seed)
        middle = (first + last) // 2
        node.left, node.right = self._build(first, middle), self._build(middle, last)
        return node

    def _ranges(self, node, strict):
        """Canonical nodes of [0, strict) and [strict, k), with whether the ray ends above their pieces."""
        if node.last <= strict or node.first >= strict or node.tree is None:
            return [(node, node.last <= strict)]
        return self._ranges(node.left, strict) + self._ranges(node.right, strict)

    def count(self, origin, m, c, strict):
        """Meetings in [origin.x, hi) of the ray from origin along y = m x + c, given the pieces below it at hi.

        Raises:
            query_through_vertex: The ray starts on a piece or its line touches one

        Returns:
            tuple -- (count, probes)
        """
        count, probes = 0, 0
        if self.root.tree is not None:
            weak, cost = self.root.tree.count(origin, WEAK_BELOW)
            below, more = self.root.tree.count(origin, STRICT_BELOW)
            probes += cost + more
            if weak != below:
                _reject(self.root.tree, origin, lambda k: self.pieces[k].source)
        for node, ends_above in self._ranges(self.root, strict):
            if node.tree is None:
                for k in range(node.first, node.last):
                    count += _case(self.pieces[k], origin, m, c, k < strict)[1]
                probes += node.last - node.first
            elif ends_above:
                more, cost = node.tree.count(origin, STRICT_ABOVE)
                count += more
                probes += cost
            else:
                more, cost = node.tree.count(origin, STRICT_BELOW)
                twice, extra = self._enclosed(node.tree, origin, m, c)
                count += more + twice
                probes += cost + extra
        return count, probes

    def _enclosed(self, tree, origin, m, c):
        """Case C meetings: pieces above the origin, whose kappa the line enters, flatter than it at the origin."""
        nodes, singles, probes = tree.canonical(origin, STRICT_ABOVE)
        count = 0
        for node in nodes:
            more, cost = self._through_kappa(node, origin, m, c)
            count += more
            probes += cost
        for node, k in singles:
            count += _case(self.pieces[node.payloads[k]], origin, m, c, False)[1]
            probes += 1
        return count, probes

    def _through_kappa(self, node, origin, m, c):
        key = id(node)
        if key not in self._duals:
            # a line meets a straight piece at most once
            curved = [k for k in node.payloads if self.pieces[k].convexity > 0]
            self._duals[key] = (curved, self._tree(curved, lambda ks: _region_tree(
                [self.pieces[k] for k in ks], ks, self.strategy, self.seed, self.leaf_size)))
        curved, tree = self._duals[key]
        if tree is None:
            return sum(_case(self.pieces[k], origin, m, c, False)[1] for k in curved), len(curved)
        q = point2(m, c)
        nodes, singles, probes = tree.canonical(q, STRICT_BELOW)
        weak, more = tree.count(q, WEAK_BELOW)
        probes += more
        if weak != sum(n.total for n in nodes) + len(singles):
            _reject(tree, q, lambda k: self.pieces[k].source)
        slope = point2(origin.x, m)
        count = 0
        for inside in nodes:
            more, cost = self._flatter(inside, slope)
            count += 2 * more
            probes += cost
        for inside, k in singles:
            count += 2 * (point_vs_arc(slope, derivative_curve(self.pieces[inside.payloads[k]])) == ABOVE)
            probes += 1
        return count, probes

    def _flatter(self, node, slope):
        """Pieces of a dual partition node whose slope at slope.x is below slope.y."""
        key = id(node)
        if key not in self._tangents:
            self._tangents[key] = self._tree(node.payloads, lambda ks: pseudo_segment_tree(
                [derivative_curve(part) for k in ks for part in self.parts[k]],
                payloads=[k for k in ks for _ in self.parts[k]], strategy=self.strategy, leaf_size=self.leaf_size,
                seed=self.seed))
        tree = self._tangents[key]
        if tree is None:
            flatter = sum(point_vs_arc(slope, derivative_curve(self.pieces[k])) == ABOVE for k in node.payloads)
            return flatter, len(node.payloads)
        return tree.count(slope, STRICT_BELOW)

    def _tree(self, positions, build):
        if len(positions) <= self.leaf_size:
            return None
        try:
            return build(list(positions))
        except geometry_error as error:
            logger.debug("nested tree over %d pieces skipped: %s", len(positions), error)
            return None


class ray_structure(slab_tree):
    """Segment intersection counting and first-hit queries over a set of arcs.

    Arcs sit at the canonical nodes of a segment tree over their endpoint abscissae. A rightward ray from o meets
    every node slab in one of two ways: the slab lies wholly right of o, where the whole subtree is answered by
    the line through the ray in the dual plane, or the slab holds o, where the member pieces are classified by the
    ray's height at the right wall, the side of o, and for the pieces the line may cross twice, kappa membership
    and the slope at o. Nodes with more than leaf_size members per orientation answer the classification through
    a nested case structure, smaller ones piece by piece. Concave pieces are mirrored into a parallel convex family.

    Arguments:
        arcs {list} -- algebraic_arc objects with rational ends

    Keyword Arguments:
        strategy {str} -- Partition strategy of the dual structures (default: {"signature_lex"})
        seed {int} -- Seed of the dual structures (default: {0})
        leaf_size {int} -- Largest group answered piece by piece (default: {LEAF_SIZE})
    """

    def __init__(self, arcs, strategy="signature_lex", seed=0, leaf_size=LEAF_SIZE):
        super().__init__(arcs)
        self.stats = {"n": len(self.arcs), "nodes": 0, "dual_groups": 0, "direct_groups": 0, "case_structures": 0}
        nodes = self.nodes()
        reach = {}
        for node in reversed(nodes):
            below = set(node.members)
            for child in (node.left, node.right):
                if child is not None:
                    below |= reach[id(child)]
            reach[id(node)] = below
            node.groups = self._groups(node, below, strategy, seed, leaf_size) if below and node.lo is not None else ()
            node.orders = self._orders(node, strategy, seed, leaf_size) if node.members else ()
        self.stats["nodes"] = len(nodes)
        logger.debug("ray structure: %s", self.stats)

    def _groups(self, node, positions, strategy, seed, leaf_size):
        convex, concave = [], []
        for position in sorted(positions):
            piece = self.arcs[position].clip(node.lo, node.hi)
            if piece.convexity < 0:
                concave.append(piece.reflected())
            else:
                convex.append(piece)
        groups = []
        for pieces, flip in ((convex, 1), (concave, -1)):
            if pieces:
                group = _kappa_group(pieces, strategy, seed, leaf_size)
                self.stats["dual_groups" if group.regions is not None else "direct_groups"] += 1
                groups.append((group, flip))
        return groups

    def _orders(self, node, strategy, seed, leaf_size):
        """Member pieces per orientation sorted by their height at the right wall, with their case structure."""
        orders = []
        for flip in (1, -1):
            pieces = [self.arcs[p].clip(node.lo, node.hi) for p in node.members]
            pieces = [piece if flip > 0 else piece.reflected() for piece in pieces
                      if (piece.convexity < 0) == (flip < 0)]
            if not pieces:
                continue
            wall = node.hi
            pieces.sort(key=cmp_to_key(lambda a, b: compare_arcs_at(a, b, wall)))
            cases = None
            if len(pieces) > leaf_size:
                try:
                    cases = _case_structure(pieces, strategy, seed, leaf_size)
                    self.stats["case_structures"] += 1
                except geometry_error as error:
                    logger.debug("case structure over %d pieces skipped: %s", len(pieces), error)
            orders.append((pieces, flip, cases))
        return orders

    def _partial(self, node, origin, m, c):
        """Meetings of the ray from origin with the members of a node whose slab holds origin.x."""
        count, probes = 0, 0
        for pieces, flip, cases in node.orders:
            o, slope, intercept = point2(origin.x, flip * origin.y), flip * m, flip * c
            line = _line(slope, intercept)
            # pieces below the line at the right wall come first
            strict = _bisect(len(pieces), lambda k: compare_arcs_at(pieces[k], line, node.hi) < 0)
            weak = _bisect(len(pieces), lambda k: compare_arcs_at(pieces[k], line, node.hi) <= 0)
            probes += 2 * len(pieces).bit_length()
            if weak != strict:
                raise query_through_vertex(pieces[strict].source)
            if cases is not None:
                more, cost = cases.count(o, slope, intercept, strict)
                count += more
                probes += cost
                continue
            for k, piece in enumerate(pieces):
                count += _case(piece, o, slope, intercept, k < strict)[1]
                probes += 1
        return count, probes

    def _ray(self, origin, m, c):
        """Meetings of the rightward ray from origin along the line y = m x + c, with the probes spent."""
        count, probes = 0, 0
        pending = [self.root]
        while pending:
            node = pending.pop()
            if node is None:
                continue
            if node.hi is not None and compare_values(node.hi, origin.x) <= 0:
                continue
            if node.lo is not None and compare_values(node.lo, origin.x) >= 0:
                for group, flip in node.groups:
                    more, cost = group.count(flip * m, flip * c)
                    count += more
                    probes += cost
                continue
            if node.members:
                more, cost = self._partial(node, origin, m, c)
                count += more
                probes += cost
            pending.extend((node.left, node.right))
        return count, probes

    def count_segment(self, p, q):
        """Meetings of the closed segment pq with the arcs, with the probes spent.

        Raises:
            vertical_query: p and q share their abscissa
            query_through_vertex: The segment's line passes through an arc end or a wall point of an arc, touches
            an arc, or the segment ends on an arc
        """
        p, q = point2(p.x, p.y), point2(q.x, q.y)
        if p.x == q.x:
            raise vertical_query("Vertical query segments are not supported.")
        if p.x > q.x:
            p, q = q, p
        m = (q.y - p.y) / (q.x - p.x)
        c = p.y - m * p.x
        start, probes = self._ray(p, m, c)
        stop, more = self._ray(q, m, c)
        return start - stop, probes + more

    def _direct(self, arcs, origin, direction):
        ray = ray_arc(origin, direction)
        rightward = direction[0] > 0
        best_id, best_x = None, None
        for arc in sorted(arcs, key=lambda arc: arc.id):
            points = intersection_points(ray, arc)
            if not points:
                continue
            x = points[0][0] if rightward else points[-1][0]
            if best_x is None or (compare_values(x, best_x) < 0 if rightward else compare_values(x, best_x) > 0):
                best_id, best_x = arc.id, x
        return best_id, len(arcs)

    def first_hit(self, origin, direction):
        """The first arc hit by a ray, ties going to the smallest id, with the probes spent.

        The hit is bracketed by bisecting a rational ray parameter t with segment counts over [o, o + t d], until
        the bracket holds few meetings inside one elementary slab. The arcs meeting that slab are then tested
        directly. Queries whose segments pass through a vertex are answered by testing every arc.

        Arguments:
            origin {point2} -- Start of the ray
            direction {tuple} -- (dx, dy) with dx != 0

        Raises:
            vertical_query: dx is 0

        Returns:
            tuple -- (arc id or None, probes)
        """
        dx, dy = (as_rational(v) for v in direction)
        if dx == 0:
            raise vertical_query("Vertical query rays are not supported.")
        if not self.ends:
            return None, 0
        far = self.ends[-1] if dx > 0 else self.ends[0]
        reach = (far - origin.x) / dx + 1
        if reach <= 0:
            return None, 0

        def at(t):
            return point2(origin.x + t * dx, origin.y + t * dy)

        try:
            hits, probes = self.count_segment(origin, at(reach))
            if hits == 0:
                return None, probes
            lo, hi = Fraction(0), reach
            for _ in range(MAX_BISECTION):
                left, right = sorted((at(lo).x, at(hi).x))
                if hits <= FIRST_HIT_DIRECT and self._slab_of(left) == self._slab_of(right):
                    break
                middle = (lo + hi) / 2
                found, more = self.count_segment(origin, at(middle))
                probes += more
                if found:
                    hi, hits = middle, found
                else:
                    lo = middle
        except query_through_vertex as error:
            logger.debug("first hit falls back to a full scan: %s", error)
            best, more = self._direct(self.arcs, origin, (dx, dy))
            return best, more
        left, right = sorted((at(lo).x, at(hi).x))
        if self._slab_of(left) == self._slab_of(right):
            candidates = [self.arcs[p] for node in self.path(left) for p in node.members]
        else:
            candidates = [arc for arc in self.arcs if arc.covers(left) or arc.covers(right)
                          or compare_values(left, arc.x_lo) < 0 < compare_values(right, arc.x_lo)]
        best, more = self._direct(candidates, origin, (dx, dy))
        return best, probes + more


def build_ray_structure(arcs, strategy="signature_lex", seed=0):
    return ray_structure(arcs, strategy=strategy, seed=seed)


def count_segment_intersections(structure, p, q):
    return structure.count_segment(p, q)[0]


def first_hit(structure, origin, direction):
    return structure.first_hit(origin, direction)[0]
