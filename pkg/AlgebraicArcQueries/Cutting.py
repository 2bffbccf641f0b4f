#Cuttings of arc sets into trapezoidal cells with crossing lists, below counts and point location.
#Cells are stored per vertical slab: each slab keeps its spanning boundary arcs in vertical order, and slab
#pieces with equal (bottom, top) boundaries are merged into one trapezoid across walls unless a cut separates them.
import logging
from bisect import bisect_right, insort
from fractions import Fraction
from functools import cmp_to_key
from math import ceil, log

import numpy as np

from AlgebraicArcQueries.Algebra import bracket, compare_values, format_rational, geometry_error, rational_inside
from AlgebraicArcQueries.Arcs import ABOVE, BELOW, ON, compare_arcs_at, intersection_count, point_vs_arc

logger = logging.getLogger(__name__)

MAX_REFINEMENT_ROUNDS = 10
SAMPLE_CONSTANT = 2
CELL_FACTOR = 64


class trapezoid:
    """A cell [x_lo, x_hi) x [bottom, top): bottom-inclusive, top-exclusive, None meaning unbounded."""

    def __init__(self, id, x_lo, x_hi, bottom, top, key):
        self.id = id
        self.x_lo = x_lo
        self.x_hi = x_hi
        self.bottom = bottom
        self.top = top
        self.key = key

    def __repr__(self):
        bottom = "-inf" if self.bottom is None else self.bottom.id
        top = "+inf" if self.top is None else self.top.id
        return f"trapezoid({self.id}, [{self.x_lo}, {self.x_hi}), bottom={bottom}, top={top})"

    def contains(self, q):
        if self.x_lo is not None and q.x < self.x_lo:
            return False
        if self.x_hi is not None and q.x >= self.x_hi:
            return False
        if self.bottom is not None and point_vs_arc(q, self.bottom) not in (ABOVE, ON):
            return False
        return self.top is None or point_vs_arc(q, self.top) == BELOW


class _slab:
    def __init__(self, lo, hi, boundaries, pieces=None):
        self.lo = lo
        self.hi = hi
        self.boundaries = list(boundaries)
        self.pieces = pieces
        self.crossing = None
        self.below = None

    def reset(self):
        self.crossing = self.below = None


def _inside(value, lo, hi):
    if lo is not None and compare_values(value, lo) <= 0:
        return False
    if hi is not None and compare_values(value, hi) >= 0:
        return False
    return True


def _samples(lo, hi, abscissae):
    """One rational inside each open gap between lo, the sorted abscissae and hi."""
    ends = [lo] + list(abscissae) + [hi]
    return [rational_inside(u, v) for u, v in zip(ends, ends[1:])]


def _format_wall(x):
    return None if x is None else format_rational(x)


def _first_false(length, predicate):
    lo, hi = 0, length
    while lo < hi:
        mid = (lo + hi) // 2
        if predicate(mid):
            lo = mid + 1
        else:
            hi = mid
    return lo


class cutting:
    """A decomposition of the plane into trapezoids, each crossed by at most n/r of the arcs.

    Arguments:
        arcs {list} -- x-monotone algebraic_arc objects
        r {int} -- Cutting parameter, clamped to [1, n]

    Keyword Arguments:
        seed {int} -- Seed for the random sample (default: {0})
        with_rays {bool} -- Treat arcs as extended by upward vertical rays at their ends (default: {False})
        sample_constant {int} -- Sample size factor c in c r log(r + 1) (default: {SAMPLE_CONSTANT})
        strict {bool} -- Raise when refinement cannot meet the crossing bound, else only warn (default: {True})
    """

    def __init__(self, arcs, r, seed=0, with_rays=False, sample_constant=SAMPLE_CONSTANT, strict=True):
        self.arcs = list(arcs)
        n = len(self.arcs)
        self.r = max(1, min(int(r), max(n, 1)))
        self.cap = Fraction(n, self.r)
        self.with_rays = with_rays
        self.strict = strict
        self.walls = []
        self.slabs = [_slab(None, None, [])]
        self.cuts = set()
        self.pairs = {}
        self.stats = {"rounds": 0, "promotions": 0, "slices": 0, "sample": 0}
        self.rng = np.random.default_rng(seed)
        self._sample_decomposition(sample_constant)
        self._refine()
        logger.info("cutting of %d arcs with r=%d: %d cells after %d rounds", n, self.r, len(self.cells),
                    self.stats["rounds"])
        if len(self.cells) > CELL_FACTOR * self.r ** 2:
            logger.warning("cutting has %d cells, more than %d r^2", len(self.cells), CELL_FACTOR)

    def _abscissae(self, i, j):
        key = (i, j) if i < j else (j, i)
        if key not in self.pairs:
            self.pairs[key] = intersection_count(self.arcs[key[0]], self.arcs[key[1]])[1]
        return self.pairs[key]

    def _sample_decomposition(self, sample_constant):
        n = len(self.arcs)
        if n == 0 or self.r == 1:
            self._assemble()
            return
        size = min(n, ceil(sample_constant * self.r * log(self.r + 1)))
        sample = sorted(int(i) for i in self.rng.choice(n, size=size, replace=False))
        self.stats["sample"] = size
        walls = set()
        events = []
        for i in sample:
            for end in (self.arcs[i].x_lo, self.arcs[i].x_hi):
                if end is not None:
                    walls.update(bracket(end))
        for k, i in enumerate(sample):
            for j in sample[k + 1:]:
                for x in self._abscissae(i, j):
                    walls.update(bracket(x))
                    events.append((x, i, j))
        for wall in sorted(walls):
            self._add_wall(wall)
        for slab in self.slabs:
            clashes = [(a, b) for x, a, b in events if _inside(x, slab.lo, slab.hi)]
            accepted = []
            for i in sample:
                if not self.arcs[i].spans(slab.lo, slab.hi):
                    continue
                if any((a == i and b in accepted) or (b == i and a in accepted) for a, b in clashes):
                    continue
                accepted.append(i)
            x = rational_inside(slab.lo, slab.hi)
            order = cmp_to_key(lambda i, j: compare_arcs_at(self.arcs[i], self.arcs[j], x))
            slab.boundaries = sorted(accepted, key=order)
        self._assemble()

    def _add_wall(self, wall):
        index = bisect_right(self.walls, wall)
        if index > 0 and self.walls[index - 1] == wall:
            return False
        slab = self.slabs[index]
        left = _slab(slab.lo, wall, slab.boundaries, slab.pieces)
        right = _slab(wall, slab.hi, slab.boundaries, slab.pieces)
        self.slabs[index:index + 1] = [left, right]
        insort(self.walls, wall)
        return True

    def _slab_index(self, x):
        return bisect_right(self.walls, x)

    # per-slab crossing structure

    def _side_flags(self, i, j, slab):
        """Whether arc i has points strictly above and strictly below boundary j inside the open slab."""
        arc = self.arcs[i]
        lo = slab.lo if arc.x_lo is None or slab.lo is not None and compare_values(slab.lo, arc.x_lo) >= 0 else arc.x_lo
        hi = slab.hi if arc.x_hi is None or slab.hi is not None and compare_values(slab.hi, arc.x_hi) <= 0 else arc.x_hi
        inside = [x for x in self._abscissae(i, j) if _inside(x, lo, hi)]
        above = below = False
        for x in _samples(lo, hi, inside):
            s = compare_arcs_at(arc, self.arcs[j], x)
            above = above or s > 0
            below = below or s < 0
        return above, below

    def _cell_of_point(self, i, x, slab):
        """Slab piece holding the point of arc i above x."""
        arc = self.arcs[i]
        return _first_false(len(slab.boundaries),
                            lambda k: compare_arcs_at(arc, self.arcs[slab.boundaries[k]], x) >= 0)

    def _fill_slab(self, slab):
        n = len(self.arcs)
        boundaries = slab.boundaries
        count = len(boundaries) + 1
        slab.crossing = np.zeros((count, n), dtype=bool)
        slab.below = np.zeros((count, n), dtype=bool)
        members = set(boundaries)
        for position, j in enumerate(boundaries):
            slab.below[position + 1:, j] = True
        for i, arc in enumerate(self.arcs):
            if i in members:
                continue
            if arc.x_hi is not None and slab.lo is not None and compare_values(arc.x_hi, slab.lo) <= 0:
                continue
            if arc.x_lo is not None and slab.hi is not None and compare_values(arc.x_lo, slab.hi) >= 0:
                continue
            flags = {}

            def side(k):
                if k not in flags:
                    flags[k] = self._side_flags(i, boundaries[k], slab)
                return flags[k]

            # the graph crosses exactly the pieces first_below..last_above
            last_above = _first_false(len(boundaries), lambda k: side(k)[0])
            first_below = _first_false(len(boundaries), lambda k: not side(k)[1])
            if first_below <= last_above:
                slab.crossing[first_below:last_above + 1, i] = True
            if arc.spans(slab.lo, slab.hi):
                slab.below[last_above + 1:, i] = True
            elif self.with_rays:
                for end in (arc.x_lo, arc.x_hi):
                    if end is not None and _inside(end, slab.lo, slab.hi):
                        slab.crossing[self._cell_of_point(i, end, slab):, i] = True

    def _assemble(self):
        """Merges slab pieces into trapezoids and collects crossing lists and below counts."""
        n = len(self.arcs)
        cells, crossing, below_all, below_any = [], [], [], []
        previous = {}
        for slab in self.slabs:
            if slab.crossing is None:
                self._fill_slab(slab)
            keys = [None] + slab.boundaries + [None]
            slab.pieces = []
            current = {}
            for k in range(len(slab.boundaries) + 1):
                key = (keys[k], keys[k + 1])
                cell = previous.get(key)
                if cell is not None and (slab.lo, key) not in self.cuts:
                    cells[cell].x_hi = slab.hi
                    crossing[cell] |= slab.crossing[k]
                    below_all[cell] &= slab.below[k]
                    below_any[cell] |= slab.below[k]
                else:
                    cell = len(cells)
                    bottom = None if key[0] is None else self.arcs[key[0]]
                    top = None if key[1] is None else self.arcs[key[1]]
                    cells.append(trapezoid(cell, slab.lo, slab.hi, bottom, top, key))
                    crossing.append(slab.crossing[k].copy())
                    below_all.append(slab.below[k].copy())
                    below_any.append(slab.below[k].copy())
                current[key] = cell
                slab.pieces.append(cell)
            previous = current
        if self.with_rays:
            # an arc ending on an inner wall below the cell changes its contribution there
            for cell in range(len(cells)):
                crossing[cell] |= below_any[cell] & ~below_all[cell]
        for cell in range(len(cells)):
            below_all[cell] &= ~crossing[cell]
        self.cells = cells
        self.crossing_masks = crossing if cells else [np.zeros(n, dtype=bool)]
        self.crossing = [[self.arcs[i].id for i in np.flatnonzero(mask)] for mask in crossing]
        self.below_masks = below_all
        self.below_count = [int(mask.sum()) for mask in below_all]

    # refinement

    def _overfull(self):
        return [cell for cell in self.cells if self.crossing_masks[cell.id].sum() > self.cap]

    def _members(self, cell):
        return [int(i) for i in np.flatnonzero(self.crossing_masks[cell.id])]

    def _promotable(self, cell):
        """Crossing arcs spanning the cell that meet neither of its boundaries inside it."""
        found = []
        for i in self._members(cell):
            if not self.arcs[i].spans(cell.x_lo, cell.x_hi):
                continue
            if any(j is not None and any(_inside(x, cell.x_lo, cell.x_hi) for x in self._abscissae(i, j))
                   for j in cell.key):
                continue
            found.append(i)
        return found

    def _promote(self, cell, i):
        for slab in self.slabs:
            if slab.pieces is None or cell.id not in slab.pieces:
                continue
            bottom, top = cell.key
            position = len(slab.boundaries) if top is None else slab.boundaries.index(top)
            slab.boundaries.insert(position, i)
            slab.reset()
        self.stats["promotions"] += 1

    def _slice_candidates(self, cell):
        """Rational walls strictly inside the cell's x-range at ends and crossings of the arcs involved."""
        members = self._members(cell)
        sides = [j for j in cell.key if j is not None]
        walls = set()
        for i in members:
            for end in (self.arcs[i].x_lo, self.arcs[i].x_hi):
                if end is not None and _inside(end, cell.x_lo, cell.x_hi):
                    walls.update(bracket(end))
        for k, i in enumerate(members):
            for j in members[k + 1:] + sides:
                for x in self._abscissae(i, j):
                    if _inside(x, cell.x_lo, cell.x_hi):
                        walls.update(bracket(x))
        return sorted(w for w in walls if _inside(w, cell.x_lo, cell.x_hi))

    def _slice(self, cell, walls):
        for wall in walls:
            self._add_wall(wall)
            self.cuts.add((wall, cell.key))
        self.stats["slices"] += len(walls)

    def _split_one(self, cell):
        promotable = self._promotable(cell)
        if promotable:
            x = rational_inside(cell.x_lo, cell.x_hi)
            promotable.sort(key=cmp_to_key(lambda i, j: compare_arcs_at(self.arcs[i], self.arcs[j], x)))
            self._promote(cell, promotable[len(promotable) // 2])
            return True
        walls = self._slice_candidates(cell)
        if walls:
            self._slice(cell, [walls[len(walls) // 2]])
            return True
        return False

    def _split_all(self, cell):
        walls = self._slice_candidates(cell)
        if walls:
            self._slice(cell, walls)
        return bool(walls)

    def _refine(self):
        for _ in range(MAX_REFINEMENT_ROUNDS):
            overfull = self._overfull()
            if not overfull:
                return
            self.stats["rounds"] += 1
            if not any([self._split_one(cell) for cell in overfull]):
                break
            self._assemble()
        # deterministic slicing at every event, then promotion inside the thin cells
        while True:
            overfull = self._overfull()
            if not overfull:
                return
            self.stats["rounds"] += 1
            progress = any([self._split_all(cell) for cell in overfull])
            if not progress:
                progress = any([self._split_one(cell) for cell in overfull])
            if not progress:
                break
            self._assemble()
        worst = max(int(mask.sum()) for mask in self.crossing_masks)
        if self.strict:
            raise geometry_error(f"A cell is crossed by {worst} arcs, more than n/r = {self.cap}.")
        logger.warning("a cell is crossed by %d arcs, more than n/r = %s", worst, self.cap)

    def locate(self, q):
        """Id of the unique cell containing the rational point q."""
        slab = self.slabs[self._slab_index(q.x)]
        k = _first_false(len(slab.boundaries),
                         lambda k: point_vs_arc(q, self.arcs[slab.boundaries[k]]) in (ABOVE, ON))
        return slab.pieces[k]

    def points_in(self, points):
        """Maps each cell id to the tagged points (x, arc index) whose arc point lies in it."""
        found = {}
        for x, i in points:
            slab = self.slabs[self._slab_index(x)]
            found.setdefault(slab.pieces[self._cell_of_point(i, x, slab)], []).append((x, i))
        return found

    def refine_by_points(self, points, cap):
        """Slices cells until each holds at most cap of the tagged points.

        Points sharing an abscissa cannot be separated by a vertical wall and stay together.

        Arguments:
            points {list} -- (x, arc index) pairs with rational x inside the arc's range
            cap {int} -- Points allowed per cell

        Returns:
            cutting -- self, refined in place
        """
        cap = max(1, int(cap))
        for cell_id, members in self.points_in(points).items():
            if len(members) <= cap:
                continue
            cell = self.cells[cell_id]
            xs = sorted(x for x, _ in members)
            walls, taken = [], 0
            for k, x in enumerate(xs):
                if taken >= cap and x != xs[k - 1] and _inside(x, cell.x_lo, cell.x_hi):
                    walls.append(x)
                    taken = 0
                taken += 1
            self._slice(cell, walls)
        self._assemble()
        logger.debug("refined by %d points to %d cells", len(points), len(self.cells))
        return self

    def dump_cells(self):
        """JSON-ready records of every cell."""
        return [{"id": cell.id,
                 "x": [_format_wall(cell.x_lo), _format_wall(cell.x_hi)],
                 "bottom": None if cell.bottom is None else cell.bottom.id,
                 "top": None if cell.top is None else cell.top.id,
                 "crossing": self.crossing[cell.id],
                 "below_count": self.below_count[cell.id]} for cell in self.cells]


def build_cutting(arcs, r, seed=0, with_rays=False):
    return cutting(arcs, r, seed=seed, with_rays=with_rays)


def locate(cut, q):
    return cut.locate(q)


def refine_by_points(cut, points, cap):
    return cut.refine_by_points(points, cap)
