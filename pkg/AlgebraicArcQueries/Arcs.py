#Curve families, x-monotone arcs and the exact predicates on them.
#Every arc is the graph of a branch function f(x) = (P(x) + K(x) * sqrt(Q(x))) / Dn(x) with Q >= 0 and Dn > 0
#on its x-range.
#Primal segments, circles and parabolas, their derivative curves and their dual curves all fit this form.
import logging
from fractions import Fraction
from math import isqrt, sqrt

from AlgebraicArcQueries.Algebra import (algebraic_number, as_float, as_rational, bi_poly, common_factor,
                                         compare_values, format_rational, geometry_error, isolate_roots,
                                         rational_between, resultant, root_multiplicity, roots_in, sign, sign_at,
                                         uni_poly)

logger = logging.getLogger(__name__)

ABOVE = "above"
ON = "on"
BELOW = "below"
OUTSIDE = "outside_x_range"

LT, EQ, GT = -1, 0, 1

PRIMAL, DUAL, TANGENT = "primal", "dual", "tangent"

# circle domains are pulled inwards by this fraction of the radius at each side
CIRCLE_NUDGE = Fraction(1, 64)

_ONE = uni_poly([1])
_ZERO = uni_poly([])
_X = uni_poly([0, 1])


class same_curve(geometry_error):
    def __init__(self, ids):
        self.ids = tuple(ids)
        super().__init__(f"Arcs {self.ids} overlap on the same curve.")


class degenerate_input(geometry_error):
    pass


class vertical_tangent(geometry_error):
    pass


def sign_radical(evaluate, A, U=_ZERO, Qa=_ONE, V=_ZERO, Qb=_ONE):
    """Exact sign of A + U*sqrt(Qa) + V*sqrt(Qb) at a point, given a sign oracle for polynomials.

    Qa and Qb are assumed nonnegative at the point.

    Arguments:
        evaluate {function} -- Maps a uni_poly to its sign at the point
        A {uni_poly} -- Rational part

    Keyword Arguments:
        U, Qa, V, Qb {uni_poly} -- The two radical terms (default: absent)

    Returns:
        int -- -1, 0 or 1
    """
    def two_terms(a, u, q):
        s_a, s_u = evaluate(a), evaluate(u)
        if s_u == 0 or evaluate(q) == 0:
            return s_a
        if s_a == 0 or s_a == s_u:
            return s_u
        gap = evaluate(a * a - u * u * q)
        if gap > 0:
            return s_a
        if gap < 0:
            return s_u
        return 0

    s_x = two_terms(A, U, Qa)
    s_y = evaluate(V) if evaluate(Qb) != 0 else 0
    if s_y == 0:
        return s_x
    if s_x == 0 or s_x == s_y:
        return s_y
    gap = two_terms(A * A + U * U * Qa - V * V * Qb, 2 * A * U, Qa)
    if gap > 0:
        return s_x
    if gap < 0:
        return s_y
    return 0


def _rational_evaluator(x):
    return lambda p: p.sign_at(x)


def _algebraic_evaluator(x):
    if isinstance(x, algebraic_number):
        return lambda p: sign_at(p, x)
    return _rational_evaluator(x)


class branch_function:
    """The function (P + K * sqrt(Q)) / Dn describing one x-monotone branch."""

    def __init__(self, P, K=_ZERO, Q=_ONE, Dn=_ONE):
        self.P, self.K, self.Q, self.Dn = P, K, Q, Dn
        self._derivative = None
        if K.is_zero:
            self.Q = _ONE

    @property
    def is_polynomial(self):
        return self.K.is_zero and self.Dn.degree == 0

    def key(self):
        return (self.P.coefficients, self.K.coefficients, self.Q.coefficients, self.Dn.coefficients)

    def defined_at(self, x):
        return self.Q(x) >= 0 and self.Dn(x) > 0

    def value(self, x):
        """Exact value at a rational x when the radical vanishes, otherwise None."""
        if self.K.is_zero or self.K(x) == 0 or self.Q(x) == 0:
            return self.P(x) / self.Dn(x)
        radicand = self.Q(x)
        root = _rational_sqrt(radicand)
        if root is None:
            return None
        return (self.P(x) + self.K(x) * root) / self.Dn(x)

    def exact_value(self, x):
        """The value at a rational x as an algebraic number."""
        value = self.value(x)
        if value is not None:
            return algebraic_number.rational(value)
        # y = (p + k sqrt(q)) / dn, so (y dn - p)^2 = k^2 q with y dn - p of the sign of k
        p, k, q, dn = self.P(x), self.K(x), self.Q(x), self.Dn(x)
        defining = uni_poly([p * p - k * k * q, -2 * p * dn, dn * dn])
        for root in isolate_roots(defining):
            if sign_radical(_algebraic_evaluator(root), uni_poly([-p, dn])) == sign(k):
                return root
        raise geometry_error(f"No value found at {x}.")

    def float_value(self, x):
        x = float(x)
        q = max(float(self.Q(Fraction(x))), 0.0) if not self.K.is_zero else 0.0
        return (float(self.P(Fraction(x))) + float(self.K(Fraction(x))) * sqrt(q)) / float(self.Dn(Fraction(x)))

    def sign_against(self, x, y):
        """Sign of f(x) - y at rational x and y."""
        return sign_radical(_rational_evaluator(x), self.P - self.Dn * y, self.K, self.Q)

    def difference(self, other):
        """Terms (A, U, Qa, V, Qb) with sign(A + U sqrt(Qa) + V sqrt(Qb)) = sign(self - other)."""
        A = self.P * other.Dn - other.P * self.Dn
        U = self.K * other.Dn
        V = -(other.K * self.Dn)
        Qa, Qb = self.Q, other.Q
        if U.is_zero:
            U, Qa, V, Qb = V, Qb, _ZERO, _ONE
        if not V.is_zero and Qa == Qb:
            U, V, Qb = U + V, _ZERO, _ONE
        if U.is_zero:
            Qa = _ONE
        return A, U, Qa, V, Qb

    def sign_minus(self, other, x):
        """Sign of self(x) - other(x) where x is a rational or an algebraic number."""
        A, U, Qa, V, Qb = self.difference(other)
        return sign_radical(_algebraic_evaluator(x), A, U, Qa, V, Qb)

    def derivative(self):
        P, K, Q, Dn = self.P, self.K, self.Q, self.Dn
        if K.is_zero:
            return branch_function(P.derivative() * Dn - P * Dn.derivative(), Dn=Dn * Dn)
        numerator_p = 2 * Q * (P.derivative() * Dn - P * Dn.derivative())
        numerator_k = 2 * Q * K.derivative() * Dn + K * Q.derivative() * Dn - 2 * Q * K * Dn.derivative()
        return branch_function(numerator_p, numerator_k, Q, 2 * Q * Dn * Dn)

    def reflected(self):
        return branch_function(-self.P, -self.K, self.Q, self.Dn)


def _rational_sqrt(q):
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def elimination_polynomial(A, U, Qa, V, Qb):
    """A polynomial vanishing wherever A + U sqrt(Qa) + V sqrt(Qb) does, obtained by squaring out the radicals."""
    if U.is_zero:
        return A
    if V.is_zero:
        return A * A - U * U * Qa
    if A.is_zero:
        return U * U * Qa - V * V * Qb
    T = V * V * Qb - A * A - U * U * Qa
    return T * T - 4 * A * A * U * U * Qa


class segment_curve:
    kind = "segment"
    convexity = 0

    def __init__(self, slope, intercept):
        self.slope, self.intercept = as_rational(slope), as_rational(intercept)
        self.function = branch_function(uni_poly.linear(self.slope, self.intercept))
        self.implicit = bi_poly({(0, 1): 1, (1, 0): -self.slope, (0, 0): -self.intercept})
        self.orientation = 1
        self.branch = None

    @property
    def params(self):
        return {"slope": format_rational(self.slope), "intercept": format_rational(self.intercept)}

    def key(self):
        return (self.kind, self.slope, self.intercept)

    def domain_contains(self, x):
        return True


class parabola_curve:
    kind = "parabola"

    def __init__(self, a, b, c):
        self.a, self.b, self.c = as_rational(a), as_rational(b), as_rational(c)
        if self.a == 0:
            raise degenerate_input("A parabola needs a nonzero leading coefficient.")
        self.function = branch_function(uni_poly([self.c, self.b, self.a]))
        self.implicit = bi_poly({(0, 1): 1, (2, 0): -self.a, (1, 0): -self.b, (0, 0): -self.c})
        self.orientation = 1
        self.branch = None
        self.convexity = sign(self.a)

    @property
    def params(self):
        return {"a": format_rational(self.a), "b": format_rational(self.b), "c": format_rational(self.c)}

    def key(self):
        return (self.kind, self.a, self.b, self.c)

    def domain_contains(self, x):
        return True


class circle_curve:
    """One branch of the circle (x - cx)^2 + (y - cy)^2 = r2."""
    kind = "circle"

    def __init__(self, cx, cy, r2, branch):
        self.cx, self.cy, self.r2 = as_rational(cx), as_rational(cy), as_rational(r2)
        if self.r2 <= 0:
            raise degenerate_input(f"Circle with squared radius {self.r2}.")
        if branch not in ("upper", "lower"):
            raise degenerate_input(f"Unknown circle branch {branch}.")
        self.branch = branch
        self.orientation = 1 if branch == "upper" else -1
        radicand = uni_poly([self.r2 - self.cx ** 2, 2 * self.cx, -1])
        self.function = branch_function(uni_poly([self.cy]), uni_poly([self.orientation]), radicand)
        self.implicit = bi_poly({(2, 0): 1, (1, 0): -2 * self.cx, (0, 2): 1, (0, 1): -2 * self.cy,
                                 (0, 0): self.cx ** 2 + self.cy ** 2 - self.r2})
        # the upper branch is concave, the lower one convex
        self.convexity = -self.orientation

    @property
    def params(self):
        return {"cx": format_rational(self.cx), "cy": format_rational(self.cy), "r2": format_rational(self.r2)}

    def key(self):
        return (self.kind, self.cx, self.cy, self.r2, self.branch)

    def domain_contains(self, x):
        return (x - self.cx) ** 2 < self.r2


class derived_curve:
    """A curve living in dual or tangent space, described directly by its branch function."""

    def __init__(self, space, function, implicit=None, convexity=0, source_kind=None):
        self.space = space
        self.kind = f"{space}_{source_kind}" if source_kind else space
        self.function = function
        self.implicit = implicit
        self.convexity = convexity
        self.orientation = 1
        self.branch = None

    @property
    def params(self):
        return {"P": [format_rational(c) for c in self.function.P.coefficients],
                "K": [format_rational(c) for c in self.function.K.coefficients],
                "Q": [format_rational(c) for c in self.function.Q.coefficients],
                "Dn": [format_rational(c) for c in self.function.Dn.coefficients]}

    def key(self):
        return (self.kind,) + self.function.key()

    def domain_contains(self, x):
        return self.function.defined_at(x)


class point2:
    def __init__(self, x, y):
        self.x = as_rational(x)
        self.y = as_rational(y)

    def __eq__(self, other):
        return isinstance(other, point2) and self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __repr__(self):
        return f"point2({format_rational(self.x)}, {format_rational(self.y)})"


class algebraic_arc:
    """An x-monotone arc: the graph of a curve's branch function over [x_lo, x_hi].

    The bounds are rationals for input arcs. Arcs in dual space may carry algebraic bounds, and pseudo-lines
    use None for an unbounded side.
    """

    def __init__(self, id, curve, x_lo, x_hi, space=PRIMAL, source=None):
        """Initializes the arc.

        Arguments:
            id {int} -- Identifier, unique within an input set
            curve {segment_curve, circle_curve, parabola_curve, derived_curve} -- The supporting curve
            x_lo {Fraction, algebraic_number, None} -- Left end
            x_hi {Fraction, algebraic_number, None} -- Right end

        Keyword Arguments:
            space {str} -- primal, dual or tangent (default: {PRIMAL})
            source {int} -- Id of the input arc this piece was cut from (default: {id})

        Raises:
            degenerate_input: Empty x-range, or an end outside the curve's domain
        """
        self.id = id
        self.curve = curve
        self.x_lo = x_lo if x_lo is None or isinstance(x_lo, algebraic_number) else as_rational(x_lo)
        self.x_hi = x_hi if x_hi is None or isinstance(x_hi, algebraic_number) else as_rational(x_hi)
        self.space = space
        self.source = id if source is None else source
        if self.x_lo is not None and self.x_hi is not None and compare_values(self.x_lo, self.x_hi) >= 0:
            raise degenerate_input(f"Arc {id} has an empty x-range.")
        for end in (self.x_lo, self.x_hi):
            if isinstance(end, Fraction) and not curve.domain_contains(end):
                raise degenerate_input(f"Arc {id} reaches outside the domain of its {curve.kind}.")

    @property
    def function(self):
        return self.curve.function

    @property
    def kind(self):
        return self.curve.kind

    @property
    def convexity(self):
        return self.curve.convexity

    def __repr__(self):
        return f"algebraic_arc({self.id}, {self.curve.kind}, [{self.x_lo}, {self.x_hi}])"

    def covers(self, x):
        """True when x lies in the closed x-range."""
        if self.x_lo is not None and compare_values(x, self.x_lo) < 0:
            return False
        if self.x_hi is not None and compare_values(x, self.x_hi) > 0:
            return False
        return True

    def spans(self, lo, hi):
        """True when [lo, hi] lies inside the x-range (None meaning unbounded)."""
        if self.x_lo is not None and (lo is None or compare_values(lo, self.x_lo) < 0):
            return False
        if self.x_hi is not None and (hi is None or compare_values(hi, self.x_hi) > 0):
            return False
        return True

    def sign_against(self, x, y):
        return self.function.sign_against(x, y)

    def value(self, x):
        return self.function.value(x)

    def exact_value(self, x):
        return self.function.exact_value(as_rational(x))

    def float_y(self, x):
        return self.function.float_value(as_float(x))

    def clip(self, lo, hi, id=None):
        """Returns the piece of this arc over [lo, hi] intersected with its range."""
        if lo is None or self.x_lo is not None and compare_values(lo, self.x_lo) < 0:
            lo = self.x_lo
        if hi is None or self.x_hi is not None and compare_values(hi, self.x_hi) > 0:
            hi = self.x_hi
        return algebraic_arc(self.id if id is None else id, self.curve, lo, hi, self.space, self.source)

    def reflected(self):
        """Mirror image under y -> -y, on a curve of the same family where there is one."""
        curve = self.curve
        if curve.kind == "segment":
            mirror = segment_curve(-curve.slope, -curve.intercept)
        elif curve.kind == "parabola":
            mirror = parabola_curve(-curve.a, -curve.b, -curve.c)
        elif curve.kind == "circle":
            mirror = circle_curve(curve.cx, -curve.cy, curve.r2, "lower" if curve.branch == "upper" else "upper")
        else:
            mirror = derived_curve(self.space, self.function.reflected(), convexity=-self.convexity,
                                   source_kind=self.kind)
        return algebraic_arc(self.id, mirror, self.x_lo, self.x_hi, self.space, self.source)

    def to_record(self):
        record = {"id": self.id, "kind": self.curve.kind, "params": self.curve.params,
                  "x": [format_rational(self.x_lo), format_rational(self.x_hi)]}
        if self.curve.branch is not None:
            record["branch"] = self.curve.branch
        if self.source != self.id:
            record["source"] = self.source
        return record


def point_vs_arc(q, a):
    """Classifies a rational point against an arc.

    Arguments:
        q {point2} -- The query point
        a {algebraic_arc} -- The arc

    Returns:
        str -- ABOVE, ON, BELOW or OUTSIDE
    """
    if not a.covers(q.x):
        return OUTSIDE
    s = a.sign_against(q.x, q.y)
    if s > 0:
        return BELOW
    if s < 0:
        return ABOVE
    return ON


def compare_arcs_at(a, b, x):
    """Sign of a(x) - b(x), for x rational or algebraic inside both ranges."""
    return a.function.sign_minus(b.function, x)


def _overlap(a, b):
    lo = a.x_lo if b.x_lo is None or a.x_lo is not None and compare_values(a.x_lo, b.x_lo) >= 0 else b.x_lo
    hi = a.x_hi if b.x_hi is None or a.x_hi is not None and compare_values(a.x_hi, b.x_hi) <= 0 else b.x_hi
    if lo is not None and hi is not None and compare_values(lo, hi) > 0:
        return None
    return lo, hi


def _within(root, lo, hi):
    if lo is not None and compare_values(root, lo) < 0:
        return False
    if hi is not None and compare_values(root, hi) > 0:
        return False
    return True


def _candidate_roots(R, lo, hi):
    if R.degree < 1:
        return []
    if isinstance(lo, Fraction) and isinstance(hi, Fraction):
        return roots_in(R, lo, hi)
    return [root for root in isolate_roots(R) if _within(root, lo, hi)]


def intersection_count(a, b, mode="distinct", method="elimination"):
    """Counts the points shared by the graphs of two arcs over the overlap of their x-ranges.

    Returns:
        tuple -- (count, sorted list of abscissae as algebraic_number)
    """
    points = intersection_points(a, b, mode, method)
    return sum(weight for _, weight in points), [x for x, _ in points]


def intersection_points(a, b, mode="distinct", method="elimination"):
    """The points shared by the graphs of two arcs, each with its weight in the given mode.

    Candidates are the real roots of an elimination polynomial (or of the resultant of the implicit equations),
    and each candidate is certified by the exact sign of a(x) - b(x) at that root.

    Arguments:
        a {algebraic_arc} -- First arc
        b {algebraic_arc} -- Second arc

    Keyword Arguments:
        mode {str} -- "distinct" counts points, "multiplicity" counts root multiplicities (default: {"distinct"})
        method {str} -- "elimination" or "resultant" (primal arcs only) (default: {"elimination"})

    Raises:
        same_curve: The arcs overlap on one curve

    Returns:
        list -- (abscissa as algebraic_number, weight) pairs in increasing order of abscissa
    """
    window = _overlap(a, b)
    if window is None:
        return []
    lo, hi = window
    terms = a.function.difference(b.function)
    R = elimination_polynomial(*terms)
    if R.is_zero:
        if lo is not None and hi is not None and compare_values(lo, hi) == 0:
            # contiguous pieces of one curve only touch at a shared end
            return []
        raise same_curve((a.id, b.id))
    implicit = a.curve.implicit is not None and b.curve.implicit is not None
    if method == "resultant" and implicit and a.space == b.space == PRIMAL:
        try:
            R = resultant(a.curve.implicit, b.curve.implicit)
        except common_factor:
            pass
    points = []
    for root in _candidate_roots(R, lo, hi):
        if sign_radical(_algebraic_evaluator(root), *terms) != 0:
            continue
        points.append((root, root_multiplicity(R, root) if mode == "multiplicity" else 1))
    if len(points) > 4:
        raise geometry_error(f"Arcs {a.id} and {b.id} meet {len(points)} times, more than the degree bound allows.")
    return points


def slope_sign(a, x0, m):
    """Sign of (slope of a at x0) - m for a rational x0 in the arc's range."""
    derivative = derivative_function(a)
    return derivative.sign_against(as_rational(x0), as_rational(m))


def derivative_function(a):
    function = a.function
    if function._derivative is None:
        function._derivative = function.derivative()
    return function._derivative


def slope_compare(a, b, x0):
    """Compares the slopes of two arcs at x0.

    Arguments:
        a {algebraic_arc} -- First arc
        b {algebraic_arc} -- Second arc
        x0 {Fraction, algebraic_number} -- An abscissa inside both ranges

    Raises:
        vertical_tangent: x0 is outside a range, or one of the arcs turns vertical there

    Returns:
        int -- LT, EQ or GT
    """
    if not (a.covers(x0) and b.covers(x0)):
        raise vertical_tangent(f"Slope comparison at {x0} outside the ranges of arcs {a.id} and {b.id}.")
    x0 = x0 if isinstance(x0, algebraic_number) else as_rational(x0)
    evaluate = _algebraic_evaluator(x0)
    for arc in (a, b):
        if evaluate(derivative_function(arc).Dn) == 0:
            raise vertical_tangent(f"Arc {arc.id} turns vertical at {x0}.")
    return derivative_function(a).sign_minus(derivative_function(b), x0)


def derivative_curve(a):
    """The arc {(x, f'(x))} in tangent space over the same x-range."""
    function = derivative_function(a)
    curve = a.curve
    if curve.kind == "segment":
        implicit = bi_poly({(0, 1): 1, (0, 0): -curve.slope})
    elif curve.kind == "parabola":
        implicit = bi_poly({(0, 1): 1, (1, 0): -2 * curve.a, (0, 0): -curve.b})
    elif curve.kind == "circle":
        # (1 + s^2)(x - cx)^2 = s^2 r2
        cx, r2 = curve.cx, curve.r2
        implicit = bi_poly({(2, 0): 1, (1, 0): -2 * cx, (0, 0): cx * cx, (2, 2): 1, (1, 2): -2 * cx,
                            (0, 2): cx * cx - r2})
    else:
        implicit = None
    tangent = derived_curve(TANGENT, function, implicit, source_kind=curve.kind)
    return algebraic_arc(a.id, tangent, a.x_lo, a.x_hi, TANGENT, a.source)


def _endpoint_line(a, x):
    # dual of the pencil of lines through (x, f(x)): c = f(x) - x m, as a function of m
    f = a.function
    y = f.value(x)
    if y is not None:
        return branch_function(uni_poly([y, -x]))
    P = uni_poly([f.P(x) / f.Dn(x), -x])
    return branch_function(P, uni_poly([f.K(x) / f.Dn(x)]), uni_poly([f.Q(x)]))


def dual_of_end(a, x):
    """The lines through the point (x, a(x)), as one pseudo-line c = a(x) - x m in dual space."""
    curve = derived_curve(DUAL, _endpoint_line(a, x), source_kind="pencil")
    return algebraic_arc(a.id, curve, None, None, DUAL, a.source)


def tangent_locus(a):
    """Intercept of the tangent line of slope m as a branch function of m, for primal convex or concave curves."""
    curve = a.curve
    if curve.kind == "parabola":
        # c = c0 - (m - b)^2 / (4a)
        k = 1 / (4 * curve.a)
        return branch_function(uni_poly([curve.c - curve.b ** 2 * k, 2 * curve.b * k, -k]))
    if curve.kind == "circle":
        # c = cy - cx m + orientation * sqrt(r2 (1 + m^2))
        return branch_function(uni_poly([curve.cy, -curve.cx]), uni_poly([curve.orientation]),
                               uni_poly([curve.r2, 0, curve.r2]))
    return None


def slope_at(a, x):
    """The slope at rational x as an algebraic number (exact for rational slopes)."""
    derivative, x = derivative_function(a), as_rational(x)
    if derivative.Dn(x) == 0:
        raise vertical_tangent(f"Arc {a.id} turns vertical at {x}.")
    try:
        return derivative.exact_value(x)
    except geometry_error:
        raise vertical_tangent(f"No slope found for arc {a.id} at {x}.")


def dual_region_curve(a):
    """Boundary pieces of the dual region of kappa(a), the region above the arc between its upward end rays.

    A line y = m x + c meets kappa(a) exactly when the dual point (m, c) lies on or above the returned curve,
    which is c = min over the arc of (f(x) - m x). For a convex arc the pieces are the dual of the left end pencil,
    the tangent locus between the end slopes and the dual of the right end pencil. For a concave arc (and for
    segments) the minimum is attained at an end, so the pieces are the two end pencils split where they cross.

    Arguments:
        a {algebraic_arc} -- A primal arc with rational ends

    Returns:
        list -- algebraic_arc pieces in dual space, ordered by m, half-open on the right
    """
    left, right = _endpoint_line(a, a.x_lo), _endpoint_line(a, a.x_hi)
    left_curve = derived_curve(DUAL, left, source_kind="pencil")
    right_curve = derived_curve(DUAL, right, source_kind="pencil")
    if a.convexity > 0:
        s1, s2 = slope_at(a, a.x_lo), slope_at(a, a.x_hi)
        locus = derived_curve(DUAL, tangent_locus(a), convexity=-1, source_kind=a.kind)
        return [algebraic_arc(a.id, left_curve, None, s1, DUAL, a.source),
                algebraic_arc(a.id, locus, s1, s2, DUAL, a.source),
                algebraic_arc(a.id, right_curve, s2, None, DUAL, a.source)]
    # the pencils cross at the chord slope; below it the left end gives the minimum
    chord = _chord_slope(a)
    return [algebraic_arc(a.id, left_curve, None, chord, DUAL, a.source),
            algebraic_arc(a.id, right_curve, chord, None, DUAL, a.source)]


def _chord_slope(a):
    f = a.function
    x1, x2 = a.x_lo, a.x_hi
    y1, y2 = f.value(x1), f.value(x2)
    if y1 is not None and y2 is not None:
        return algebraic_number.rational((y2 - y1) / (x2 - x1))
    # slope of the chord is the root of L_left(m) = L_right(m)
    left, right = _endpoint_line(a, x1), _endpoint_line(a, x2)
    terms = left.difference(right)
    R = elimination_polynomial(*terms)
    for root in isolate_roots(R):
        if sign_radical(_algebraic_evaluator(root), *terms) == 0:
            return root
    raise geometry_error(f"Chord slope of arc {a.id} not found.")


def in_dual_region(a, m, c):
    """True when the line y = m x + c meets kappa(a), decided directly in the primal plane."""
    m, c = as_rational(m), as_rational(c)
    line = branch_function(uni_poly([c, m]))
    for x in (a.x_lo, a.x_hi):
        if line.sign_minus(a.function, x) >= 0:
            return True
    if a.convexity <= 0:
        return False
    # between the ends the gap line - f is concave, maximal where the slope equals m
    if slope_sign(a, a.x_lo, m) > 0 or slope_sign(a, a.x_hi, m) < 0:
        return False
    return tangent_locus(a).sign_against(m, c) <= 0


def split_x_monotone(raw, first_id=0):
    """Splits a raw curve description into x-monotone arcs with rational ends.

    Arguments:
        raw {dict} -- {"kind": "segment"|"circle"|"parabola", "params": {...}, "x": [lo, hi], "branch": ...}.
            Segments may give endpoints x1, y1, x2, y2 instead of slope and intercept. A circle arc given by
            "from" and "to", two rational points on the circle, runs counter-clockwise between them and is split
            at the leftmost and rightmost points of the circle. Otherwise "x" cuts a vertical slab out of the
            circle: both branches over it are produced unless "branch" picks one, and without "x" the slab is
            the whole circle.

    Keyword Arguments:
        first_id {int} -- Id given to the first produced arc (default: {0})

    Raises:
        degenerate_input: Zero radius, zero length, vertical segment, an empty range or an end off the circle

    Returns:
        list -- algebraic_arc objects
    """
    kind = raw.get("kind")
    params = raw.get("params", {})
    if kind == "segment":
        if "x1" in params:
            x1, y1, x2, y2 = (as_rational(params[key]) for key in ("x1", "y1", "x2", "y2"))
            if x1 == x2:
                raise degenerate_input("Vertical or zero-length segment." if y1 != y2 else "Zero-length segment.")
            if x1 > x2:
                x1, y1, x2, y2 = x2, y2, x1, y1
            slope = (y2 - y1) / (x2 - x1)
            return [algebraic_arc(first_id, segment_curve(slope, y1 - slope * x1), x1, x2)]
        lo, hi = (as_rational(v) for v in raw["x"])
        if lo >= hi:
            raise degenerate_input("Zero-length segment.")
        return [algebraic_arc(first_id, segment_curve(params["slope"], params["intercept"]), lo, hi)]
    if kind == "parabola":
        lo, hi = (as_rational(v) for v in raw["x"])
        return [algebraic_arc(first_id, parabola_curve(params["a"], params["b"], params["c"]), lo, hi)]
    if kind == "circle":
        cx, cy, r2 = (as_rational(params[key]) for key in ("cx", "cy", "r2"))
        if r2 <= 0:
            raise degenerate_input("Circle with zero radius.")
        left, right = circle_domain(cx, r2)
        if "from" in raw:
            pieces = _angular_pieces(cx, cy, r2, raw["from"], raw["to"], left, right)
            return [algebraic_arc(first_id + i, circle_curve(cx, cy, r2, branch), lo, hi)
                    for i, (branch, lo, hi) in enumerate(pieces)]
        if "x" in raw:
            lo, hi = (as_rational(v) for v in raw["x"])
            lo, hi = max(lo, left), min(hi, right)
        else:
            lo, hi = left, right
        if lo >= hi:
            raise degenerate_input("Circle arc with an empty x-range.")
        branches = [raw["branch"]] if raw.get("branch") else ["upper", "lower"]
        return [algebraic_arc(first_id + i, circle_curve(cx, cy, r2, branch), lo, hi)
                for i, branch in enumerate(branches)]
    raise degenerate_input(f"Unknown curve kind {kind}.")


def _angular_pieces(cx, cy, r2, start, stop, left, right):
    """(branch, lo, hi) pieces of the counter-clockwise walk from start to stop, within [left, right].

    The walk runs leftwards over the upper branch and rightwards over the lower one. Equal start and stop give
    the whole circle.
    """
    ends = []
    for point in (start, stop):
        x, y = (as_rational(v) for v in point)
        if (x - cx) ** 2 + (y - cy) ** 2 != r2:
            raise degenerate_input(f"Point ({x}, {y}) is not on the circle.")
        ends.append(("upper" if y > cy or y == cy and x > cx else "lower", min(max(x, left), right)))
    (first, x_start), (last, x_stop) = ends
    other = "lower" if first == "upper" else "upper"
    if first == last and (x_stop < x_start if first == "upper" else x_stop > x_start):
        pieces = [(first, min(x_start, x_stop), max(x_start, x_stop))]
    else:
        pieces = [(first, left, x_start) if first == "upper" else (first, x_start, right)]
        if first == last:
            pieces.append((other, left, right))
            pieces.append((first, x_stop, right) if first == "upper" else (first, left, x_stop))
        else:
            pieces.append((last, left, x_stop) if last == "lower" else (last, x_stop, right))
    pieces = [piece for piece in pieces if piece[1] < piece[2]]
    if not pieces:
        raise degenerate_input("Circle arc with an empty x-range.")
    return pieces


def circle_domain(cx, r2):
    """Rational x-range of a circle shrunk inwards so that no end has a vertical tangent."""
    squared = uni_poly([cx * cx - r2, -2 * cx, 1])
    inner = uni_poly([cx * cx - r2 * (1 - CIRCLE_NUDGE) ** 2, -2 * cx, 1])
    outer_left, outer_right = isolate_roots(squared)
    inner_left, inner_right = isolate_roots(inner)
    return rational_between(outer_left, inner_left), rational_between(inner_right, outer_right)


def arc_from_record(record):
    """Builds an arc from its JSON-lines record."""
    kind = record["kind"]
    params = record["params"]
    lo, hi = (as_rational(v) for v in record["x"])
    if kind == "segment":
        curve = segment_curve(params["slope"], params["intercept"])
    elif kind == "parabola":
        curve = parabola_curve(params["a"], params["b"], params["c"])
    elif kind == "circle":
        curve = circle_curve(params["cx"], params["cy"], params["r2"], record.get("branch", "upper"))
    else:
        raise degenerate_input(f"Unknown curve kind {kind}.")
    return algebraic_arc(int(record["id"]), curve, lo, hi, source=int(record.get("source", record["id"])))


def check_distinct_curves(arcs):
    """Rejects input sets where two arcs overlap on one curve.

    Raises:
        same_curve: Lists the ids of every offending arc
    """
    by_curve = {}
    for arc in arcs:
        by_curve.setdefault(arc.curve.key(), []).append(arc)
    offending = []
    for group in by_curve.values():
        group = sorted(group, key=lambda arc: arc.x_lo)
        reach = group[0]
        for arc in group[1:]:
            if compare_values(arc.x_lo, reach.x_hi) < 0:
                offending.extend([reach.id, arc.id])
            if compare_values(arc.x_hi, reach.x_hi) > 0:
                reach = arc
    if offending:
        raise same_curve(sorted(set(offending)))
