#Cutting arcs into pseudo-segments, families where every pair meets at most once.
#Cuts are rationals chosen strictly between consecutive intersections of a pair and before any other event on
#the cut arc, so no intersection ever lands on a cut and total intersection counts are preserved.
import logging
from functools import cmp_to_key
from itertools import combinations

import networkx as nx

from AlgebraicArcQueries.Algebra import as_algebraic, compare, compare_values, rational_between
from AlgebraicArcQueries.Arcs import (DUAL, PRIMAL, TANGENT, algebraic_arc, derivative_curve, derived_curve,
                                      intersection_count, same_curve, slope_at, slope_compare, tangent_locus,
                                      vertical_tangent)

logger = logging.getLogger(__name__)

STRATEGIES = ("smaller_id", "most_lensed")


class cut_plan:
    """Rational cut abscissae per arc id, with where each cut came from."""

    def __init__(self):
        self.cuts = {}
        self.provenance = []

    def add(self, arc_id, x, pair, lens, space=PRIMAL):
        self.cuts.setdefault(arc_id, []).append(x)
        self.cuts[arc_id].sort()
        self.provenance.append({"arc": arc_id, "x": x, "pair": pair, "lens": lens, "space": space})

    def of(self, arc_id):
        return self.cuts.get(arc_id, [])

    def __len__(self):
        return sum(len(xs) for xs in self.cuts.values())


def _sorted_unique(numbers):
    ordered = sorted(numbers, key=cmp_to_key(compare_values))
    unique = []
    for number in ordered:
        if not unique or compare_values(unique[-1], number) != 0:
            unique.append(number)
    return unique


def _has_cut_between(cuts, lo, hi):
    return any(compare_values(lo, x) < 0 < compare_values(hi, x) for x in cuts)


def _cut_after(lo, hi, events):
    """Simplest rational after lo and before both hi and the first event following lo."""
    stop = hi
    for event in events:
        if compare_values(event, lo) > 0:
            if compare_values(event, stop) < 0:
                stop = event
            break
    return rational_between(as_algebraic(lo), as_algebraic(stop))


def pairwise_abscissae(arcs, mode="distinct", skip_coincident=False):
    """Intersection abscissae for every unordered pair of positions that meet at all.

    Coincident curves raise same_curve unless skip_coincident is set, in which case the pair is left out.
    """
    found = {}
    for (i, a), (j, b) in combinations(enumerate(arcs), 2):
        try:
            abscissae = intersection_count(a, b, mode)[1]
        except same_curve:
            if not skip_coincident:
                raise
            continue
        if abscissae:
            found[(i, j)] = abscissae
    return found


def _targets(arcs, lens_pairs, strategy):
    """Position of the arc that gets cut, per lens pair."""
    if strategy == "smaller_id":
        return {pair: min(pair, key=lambda i: arcs[i].id) for pair in lens_pairs}
    if strategy != "most_lensed":
        raise ValueError(f"Unknown cut strategy {strategy}.")
    graph = nx.Graph()
    for (i, j), abscissae in lens_pairs.items():
        graph.add_edge(i, j, weight=len(abscissae) - 1)
    targets = {}
    while graph.number_of_edges():
        node = max(graph.degree(weight="weight"), key=lambda item: (item[1], -arcs[item[0]].id))[0]
        for other in graph.neighbors(node):
            targets[(min(node, other), max(node, other))] = node
        graph.remove_node(node)
    return targets


def plan_cuts(arcs, abscissae=None, strategy="smaller_id", events=None, plan=None, space=PRIMAL):
    """Plans cuts separating every pair of consecutive intersections.

    Arguments:
        arcs {list} -- algebraic_arc objects

    Keyword Arguments:
        abscissae {dict} -- (i, j) -> sorted intersection abscissae, computed when missing (default: {None})
        strategy {str} -- smaller_id or most_lensed (default: {"smaller_id"})
        events {dict} -- position -> abscissae a cut on that arc must avoid (default: every intersection)
        plan {cut_plan} -- Plan to extend (default: {None})

    Returns:
        cut_plan -- Cuts keyed by arc id
    """
    abscissae = pairwise_abscissae(arcs) if abscissae is None else abscissae
    plan = cut_plan() if plan is None else plan
    lens_pairs = {pair: xs for pair, xs in abscissae.items() if len(xs) >= 2}
    if events is None:
        events = {}
        for (i, j), xs in abscissae.items():
            events.setdefault(i, []).extend(xs)
            events.setdefault(j, []).extend(xs)
    events = {i: _sorted_unique(xs) for i, xs in events.items()}
    for pair, target in sorted(_targets(arcs, lens_pairs, strategy).items()):
        arc = arcs[target]
        xs = lens_pairs[pair]
        for lens, (lo, hi) in enumerate(zip(xs, xs[1:])):
            if _has_cut_between(plan.of(arc.id), lo, hi):
                continue
            x = _cut_after(lo, hi, events.get(target, []))
            plan.add(arc.id, x, (arcs[pair[0]].id, arcs[pair[1]].id), lens, space)
    return plan


def apply_cuts(arcs, plan, first_id=0):
    """Splits every arc at its planned cuts; pieces get fresh sequential ids and remember their source."""
    pieces = []
    next_id = first_id
    for arc in arcs:
        ends = [arc.x_lo] + plan.of(arc.id) + [arc.x_hi]
        for lo, hi in zip(ends, ends[1:]):
            pieces.append(algebraic_arc(next_id, arc.curve, lo, hi, arc.space, arc.source))
            next_id += 1
    return pieces


def verify_pseudosegments(arcs, mode="distinct"):
    """Checks that every pair meets at most once.

    Returns:
        tuple -- (True, None) or (False, (id, id)) for the first violating pair
    """
    for a, b in combinations(arcs, 2):
        if intersection_count(a, b, mode)[0] > 1:
            return False, (a.id, b.id)
    return True, None


def cut_to_pseudosegments(arcs, strategy="smaller_id", mode="distinct", verify=True):
    """Cuts an arc family into pseudo-segments.

    Arguments:
        arcs {list} -- algebraic_arc objects on pairwise distinct curves

    Keyword Arguments:
        strategy {str} -- Which arc of a lens pair is cut (default: {"smaller_id"})
        mode {str} -- distinct or multiplicity, used for the verification and the stats (default: {"distinct"})
        verify {bool} -- Verify the output family (default: {True})

    Raises:
        same_curve: Two arcs overlap on one curve

    Returns:
        tuple -- (subarcs, cut_plan, stats dict)
    """
    abscissae = pairwise_abscissae(arcs)
    plan = plan_cuts(arcs, abscissae, strategy)
    pieces = apply_cuts(arcs, plan)
    stats = {"n": len(arcs), "pairs": len(abscissae),
             "lenses": sum(len(xs) - 1 for xs in abscissae.values() if len(xs) >= 2),
             "cuts": len(plan), "pieces": len(pieces)}
    if verify:
        stats["verify"], witness = verify_pseudosegments(pieces, mode)
        if witness is not None:
            logger.error("pieces %s still meet more than once", witness)
    logger.info("lens cut: %d arcs, %d lenses, %d cuts", len(arcs), stats["lenses"], stats["cuts"])
    return pieces, plan, stats


class cut_range:
    """A range with its lower and upper boundaries cut at the same abscissae."""

    def __init__(self, range, cuts, lower, upper):
        self.range = range
        self.cuts = cuts
        self.lower = lower
        self.upper = upper

    @property
    def id(self):
        return self.range.id

    def __repr__(self):
        return f"cut_range({self.range.id}, cuts={len(self.cuts)})"


def cut_ranges_matched(ranges, strategy="smaller_id"):
    """Lens-cuts the lower and the upper boundaries of ranges and mirrors every cut onto the partner boundary.

    Arguments:
        ranges {list} -- semialgebraic_range objects

    Returns:
        list -- cut_range objects, in input order
    """
    lowers = [rng.lower.clip(rng.x_lo, rng.x_hi) for rng in ranges if rng.lower is not None]
    uppers = [rng.upper.clip(rng.x_lo, rng.x_hi) for rng in ranges if rng.upper is not None]
    owner_lower = [rng for rng in ranges if rng.lower is not None]
    owner_upper = [rng for rng in ranges if rng.upper is not None]
    events = {}
    family_cuts = []
    for family, owners in ((lowers, owner_lower), (uppers, owner_upper)):
        abscissae = pairwise_abscissae(family)
        for (i, j), xs in abscissae.items():
            events.setdefault(owners[i].id, []).extend(xs)
            events.setdefault(owners[j].id, []).extend(xs)
        family_cuts.append((family, owners, abscissae))
    shared = {}
    for family, owners, abscissae in family_cuts:
        local_events = {i: events.get(owners[i].id, []) for i in range(len(family))}
        owner_of = {arc.id: owner for arc, owner in zip(family, owners)}
        plan = plan_cuts(family, abscissae, strategy, events=local_events)
        for entry in plan.provenance:
            shared.setdefault(owner_of[entry["arc"]].id, set()).add(entry["x"])
    result = []
    next_id = 0
    for rng in ranges:
        cuts = sorted(shared.get(rng.id, ()))
        ends = [rng.x_lo] + cuts + [rng.x_hi]
        pieces = []
        for boundary in (rng.lower, rng.upper):
            if boundary is None:
                pieces.append(None)
                continue
            family = []
            for lo, hi in zip(ends, ends[1:]):
                family.append(algebraic_arc(next_id, boundary.curve, lo, hi, boundary.space, boundary.id))
                next_id += 1
            pieces.append(family)
        result.append(cut_range(rng, cuts, pieces[0], pieces[1]))
    logger.info("matched cuts on %d ranges: %d cut abscissae", len(ranges), sum(len(r.cuts) for r in result))
    return result


def dual_arc(a):
    """The tangent-line locus of a convex or concave primal arc as an arc in dual space, None for segments."""
    locus = tangent_locus(a)
    if locus is None:
        return None
    s1, s2 = slope_at(a, a.x_lo), slope_at(a, a.x_hi)
    if compare(s1, s2) > 0:
        s1, s2 = s2, s1
    return algebraic_arc(a.id, derived_curve(DUAL, locus, source_kind=a.kind), s1, s2, DUAL, a.source)


def _x_with_slope_between(a, m_lo, m_hi, avoid):
    """A rational x in the arc's range whose slope lies strictly between m_lo and m_hi and that hits no event."""
    lo, hi = a.x_lo, a.x_hi
    increasing = compare(slope_at(a, lo), slope_at(a, hi)) < 0
    while True:
        x = (lo + hi) / 2
        slope = slope_at(a, x)
        below, above = compare(slope, m_lo) <= 0, compare(slope, m_hi) >= 0
        if not below and not above:
            if not any(compare_values(x, event) == 0 for event in avoid):
                return x
            hi = x
            continue
        # move towards larger slopes when the slope is too small
        if below == increasing:
            lo = x
        else:
            hi = x


def cut_joint_three_spaces(arcs, strategy="smaller_id"):
    """Cuts arcs until every pair meets at most once as curves, as derivative curves and as dual curves.

    Dual crossings are common tangent lines; they are cut in slope space and mapped back to a primal abscissa of
    the cut arc through its monotone slope.

    Returns:
        tuple -- (subarcs, cut_plan, stats dict)
    """
    primal = pairwise_abscissae(arcs)
    tangents = [derivative_curve(a) for a in arcs]
    tangent = pairwise_abscissae(tangents, skip_coincident=True)
    events = {}
    for table in (primal, tangent):
        for (i, j), xs in table.items():
            events.setdefault(i, []).extend(xs)
            events.setdefault(j, []).extend(xs)
    plan = plan_cuts(arcs, primal, strategy, events=events, space=PRIMAL)
    plan = plan_cuts(arcs, tangent, strategy, events=events, plan=plan, space=TANGENT)
    duals = [dual_arc(a) for a in arcs]
    dual_lenses = 0
    for (i, a), (j, b) in combinations(enumerate(arcs), 2):
        if duals[i] is None or duals[j] is None:
            continue
        try:
            ms = intersection_count(duals[i], duals[j])[1]
        except same_curve:
            continue
        if len(ms) < 2:
            continue
        dual_lenses += len(ms) - 1
        target = min((i, j), key=lambda k: arcs[k].id)
        arc = arcs[target]
        for lens, (m_lo, m_hi) in enumerate(zip(ms, ms[1:])):
            existing = plan.of(arc.id)
            if any(compare(m_lo, s) < 0 < compare(m_hi, s) for s in (slope_at(arc, x) for x in existing)):
                continue
            x = _x_with_slope_between(arc, m_lo, m_hi, events.get(target, []))
            plan.add(arc.id, x, (a.id, b.id), lens, DUAL)
    pieces = apply_cuts(arcs, plan)
    stats = {"n": len(arcs), "cuts": len(plan), "pieces": len(pieces),
             "primal_lenses": sum(len(xs) - 1 for xs in primal.values()),
             "tangent_lenses": sum(len(xs) - 1 for xs in tangent.values()), "dual_lenses": dual_lenses}
    stats["verify"] = verify_three_spaces(pieces)[0]
    return pieces, plan, stats


def verify_three_spaces(arcs):
    """Checks the at-most-once condition as curves, derivative curves and dual curves.

    Arcs of equal shape (parallel segments, translated parabolas) share their derivative curve; such pairs are
    left out of the tangent and dual checks, as they are when the cuts are planned.

    Raises:
        same_curve: Two of the arcs overlap on one primal curve

    Returns:
        tuple -- (True, None) or (False, (space, id, id))
    """
    for space, family in ((PRIMAL, arcs), (TANGENT, [derivative_curve(a) for a in arcs]),
                          (DUAL, [dual_arc(a) for a in arcs])):
        present = [f for f in family if f is not None]
        for (i, j), xs in pairwise_abscissae(present, skip_coincident=space != PRIMAL).items():
            if len(xs) > 1:
                return False, (space, present[i].id, present[j].id)
    return True, None


def depth_cycle_witness(a, b):
    """True when the arcs, lifted by their slopes, swap their slope order between two common points.

    The slope order is read with slope_compare at every intersection abscissa, the ends of the overlap and
    tangencies included. Crossings in opposite directions give the swap. A point where the slopes agree, or where
    an arc turns vertical, is a contact of the lifted arcs and swaps the order on its own.
    """
    abscissae = intersection_count(a, b)[1]
    if len(abscissae) < 2:
        return False
    directions = set()
    for x in abscissae:
        try:
            order = slope_compare(a, b, x)
        except vertical_tangent:
            order = 0
        directions.update((order,) if order else (-1, 1))
    return directions >= {-1, 1}
