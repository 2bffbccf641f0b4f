#Brute force reference answers for every query the package supports.
#These are deliberately slow linear scans and pairwise loops; the structures are checked against them.
from collections import Counter
from itertools import combinations

from AlgebraicArcQueries.Algebra import compare, geometry_error
from AlgebraicArcQueries.Arcs import ABOVE, algebraic_arc, intersection_count, point_vs_arc, segment_curve


class promise_violated(geometry_error):
    pass


class oracle_result:
    """An oracle answer together with the number of predicate evaluations spent on it."""

    def __init__(self, value, cost):
        self.value = value
        self.cost = cost

    def __repr__(self):
        return f"oracle_result({self.value}, {dict(self.cost)})"


def _tick(cost, amount=1):
    if cost is not None:
        cost["predicates"] += amount


def oracle_below_count(lines, q, cost=None):
    """Number of arcs strictly below the point q."""
    _tick(cost, len(lines))
    return sum(1 for line in lines if point_vs_arc(q, line) == ABOVE)


def oracle_stab_count(ranges, q, cost=None):
    _tick(cost, len(ranges))
    return sum(1 for rng in ranges if rng.contains(q))


def oracle_stab_report(ranges, q, cost=None):
    _tick(cost, len(ranges))
    return sorted(rng.id for rng in ranges if rng.contains(q))


def oracle_stab_fold(ranges, q, combine, identity, value=lambda rng: rng.weight, cost=None):
    """Folds the values of the stabbed ranges with an associative, commutative combine."""
    result = identity
    for rng in ranges:
        _tick(cost)
        if rng.contains(q):
            result = combine(result, value(rng))
    return result


def oracle_total_intersections(arcs, mode="distinct", cost=None):
    """Sum of intersection_count over all unordered pairs."""
    total = 0
    for a, b in combinations(arcs, 2):
        _tick(cost)
        total += intersection_count(a, b, mode)[0]
    return total


def oracle_bichromatic_intersections(red, blue, mode="distinct", cost=None):
    total = 0
    for a in red:
        for b in blue:
            _tick(cost)
            total += intersection_count(a, b, mode)[0]
    return total


def oracle_odd_pairs(arcs, mode="distinct", cost=None):
    """Number of pairs meeting an odd number of times."""
    odd = 0
    for a, b in combinations(arcs, 2):
        _tick(cost)
        odd += intersection_count(a, b, mode)[0] % 2
    return odd


def ray_arc(origin, direction, id=-1):
    """The ray from origin along direction as an arc unbounded on one side.

    Raises:
        geometry_error: For vertical rays
    """
    dx, dy = direction
    if dx == 0:
        raise geometry_error("Vertical rays cannot be represented as arcs.")
    slope = dy / dx
    line = segment_curve(slope, origin.y - slope * origin.x)
    if dx > 0:
        return algebraic_arc(id, line, origin.x, None)
    return algebraic_arc(id, line, None, origin.x)


def oracle_first_hit(arcs, origin, direction, cost=None):
    """First arc hit by a ray, ties going to the smallest id.

    Arguments:
        arcs {list} -- algebraic_arc objects
        origin {point2} -- Start of the ray
        direction {tuple} -- (dx, dy) with dx != 0

    Returns:
        tuple -- (arc id or None, hit abscissa as algebraic_number or None)
    """
    ray = ray_arc(origin, direction)
    rightward = direction[0] > 0
    best_id, best_x = None, None
    for arc in sorted(arcs, key=lambda arc: arc.id):
        _tick(cost)
        _, abscissae = intersection_count(ray, arc)
        if not abscissae:
            continue
        x = abscissae[0] if rightward else abscissae[-1]
        if best_x is None:
            best_id, best_x = arc.id, x
            continue
        order = compare(x, best_x)
        if (order < 0 if rightward else order > 0):
            best_id, best_x = arc.id, x
    return best_id, best_x


def segment_arc(p, q, id=-1):
    """The closed segment pq as an arc.

    Raises:
        geometry_error: For vertical segments
    """
    if p.x == q.x:
        raise geometry_error("Vertical query segments are not supported.")
    if p.x > q.x:
        p, q = q, p
    slope = (q.y - p.y) / (q.x - p.x)
    return algebraic_arc(id, segment_curve(slope, p.y - slope * p.x), p.x, q.x)


def oracle_segment_count(arcs, p, q, mode="distinct", cost=None):
    """Total number of intersections between the closed segment pq and the arcs."""
    segment = segment_arc(p, q)
    total = 0
    for arc in arcs:
        _tick(cost)
        total += intersection_count(segment, arc, mode)[0]
    return total


def oracle_once_count(arcs, query, mode="distinct", cost=None):
    """Intersections between a query arc and arcs it is promised to meet at most once each.

    Raises:
        promise_violated: Some arc meets the query more than once
    """
    total = 0
    for arc in arcs:
        _tick(cost)
        count = intersection_count(query, arc, mode)[0]
        if count > 1:
            raise promise_violated(f"Query arc meets arc {arc.id} {count} times.")
        total += count
    return total


def run_oracle(oracle, *args, **kwargs):
    """Runs an oracle and returns its answer with the predicate cost."""
    cost = Counter()
    value = oracle(*args, cost=cost, **kwargs)
    return oracle_result(value, cost)
