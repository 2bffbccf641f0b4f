#This module is the exact arithmetic kernel. Every geometric predicate in the package ends up here.
import logging
from fractions import Fraction
from math import floor

import sympy as sp

logger = logging.getLogger(__name__)

# Curves in scope are of total degree at most 4, so resultants never exceed this
DEGREE_CAP = 16

_X, _Y = sp.symbols("x y")


class geometry_error(ValueError):
    """Base class for every error raised by the package."""


class zero_polynomial(geometry_error):
    pass


class endpoint_root(geometry_error):
    pass


class common_factor(geometry_error):
    pass


class not_separable(geometry_error):
    pass


class degree_cap_exceeded(geometry_error):
    pass


def as_rational(value):
    """Converts ints, Fractions and "p/q" strings to a Fraction.

    Arguments:
        value {int, str, Fraction} -- The value to convert

    Returns:
        Fraction -- The exact value
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise geometry_error(f"Refusing to convert the float {value} to an exact rational.")
    return Fraction(value)


def format_rational(q):
    """Serialises a rational as "p/q", or "p" when the denominator is one."""
    q = as_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def sign(value):
    if value > 0:
        return 1
    if value < 0:
        return -1
    return 0


def _to_sympy_rational(q):
    return sp.Rational(q.numerator, q.denominator)


def _from_sympy_rational(c):
    c = sp.Rational(c)
    return Fraction(int(c.p), int(c.q))


class uni_poly:
    """A univariate polynomial with rational coefficients, lowest degree first.

    Instances are immutable. The Sturm sequence is computed on first use and cached.
    """

    def __init__(self, coefficients):
        """Initializes the polynomial and strips trailing zero coefficients.

        Arguments:
            coefficients {list} -- Coefficients, lowest degree first

        Raises:
            degree_cap_exceeded: When the degree is larger than DEGREE_CAP
        """
        coefficients = [as_rational(c) for c in coefficients]
        while coefficients and coefficients[-1] == 0:
            coefficients.pop()
        self.coefficients = tuple(coefficients)
        if self.degree > DEGREE_CAP:
            raise degree_cap_exceeded(f"Polynomial of degree {self.degree} exceeds the cap of {DEGREE_CAP}.")
        self._sturm = None

    @classmethod
    def constant(cls, c):
        return cls([c])

    @classmethod
    def linear(cls, slope, intercept):
        return cls([intercept, slope])

    @classmethod
    def from_roots(cls, roots, leading=1):
        """Builds leading * prod(x - root).

        Arguments:
            roots {list} -- Rational roots, repeated for multiplicity

        Keyword Arguments:
            leading {Fraction} -- The leading coefficient (default: {1})
        """
        p = cls([leading])
        for root in roots:
            p = p * cls([-as_rational(root), 1])
        return p

    @classmethod
    def from_sympy(cls, poly):
        poly = sp.Poly(poly, _X, domain=sp.QQ)
        return cls([_from_sympy_rational(c) for c in reversed(poly.all_coeffs())])

    def to_sympy(self):
        if self.is_zero:
            return sp.Poly(0, _X, domain=sp.QQ)
        return sp.Poly([_to_sympy_rational(c) for c in reversed(self.coefficients)], _X, domain=sp.QQ)

    @property
    def degree(self):
        """Returns the degree, with -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    @property
    def is_zero(self):
        return len(self.coefficients) == 0

    @property
    def leading(self):
        return self.coefficients[-1] if self.coefficients else Fraction(0)

    def __call__(self, x):
        result = Fraction(0)
        for c in reversed(self.coefficients):
            result = result * x + c
        return result

    def __eq__(self, other):
        if not isinstance(other, uni_poly):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return f"uni_poly({[format_rational(c) for c in self.coefficients]})"

    def __add__(self, other):
        other = _coerce(other)
        size = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (Fraction(0),) * (size - len(self.coefficients))
        b = other.coefficients + (Fraction(0),) * (size - len(other.coefficients))
        return uni_poly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return uni_poly([-c for c in self.coefficients])

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if self.is_zero or other.is_zero:
            return uni_poly([])
        product = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                product[i + j] += a * b
        return uni_poly(product)

    __rmul__ = __mul__

    def __pow__(self, exponent):
        result = uni_poly([1])
        for _ in range(exponent):
            result = result * self
        return result

    def derivative(self):
        return uni_poly([i * c for i, c in enumerate(self.coefficients)][1:])

    def divmod(self, other):
        """Polynomial long division.

        Returns:
            tuple -- (quotient, remainder)
        """
        if other.is_zero:
            raise zero_polynomial("Division by the zero polynomial.")
        remainder = list(self.coefficients)
        quotient = [Fraction(0)] * max(len(remainder) - other.degree, 1)
        while len(remainder) - 1 >= other.degree and any(remainder):
            shift = len(remainder) - 1 - other.degree
            factor = remainder[-1] / other.leading
            quotient[shift] = factor
            for i, c in enumerate(other.coefficients):
                remainder[i + shift] -= factor * c
            remainder.pop()
            while remainder and remainder[-1] == 0:
                remainder.pop()
        return uni_poly(quotient), uni_poly(remainder)

    def sign_at(self, x):
        return sign(self(x))

    @property
    def sturm_sequence(self):
        if self._sturm is None:
            if self.is_zero:
                raise zero_polynomial("The zero polynomial has no Sturm sequence.")
            sequence = [self, self.derivative()]
            while not sequence[-1].is_zero:
                sequence.append(-sequence[-2].divmod(sequence[-1])[1])
            self._sturm = tuple(sequence[:-1])
        return self._sturm

    def sign_variations(self, x):
        signs = [s for s in (p.sign_at(x) for p in self.sturm_sequence) if s != 0]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    def root_bound(self):
        """Cauchy bound: every real root lies strictly inside (-bound, bound)."""
        if self.degree < 1:
            return Fraction(1)
        return 1 + max(abs(c / self.leading) for c in self.coefficients[:-1])


def _coerce(value):
    if isinstance(value, uni_poly):
        return value
    return uni_poly([value])


class bi_poly:
    """A bivariate polynomial stored as {(x-degree, y-degree): coefficient}."""

    def __init__(self, coefficients):
        self.coefficients = {key: as_rational(c) for key, c in coefficients.items() if c != 0}

    @classmethod
    def from_sympy(cls, expression):
        poly = sp.Poly(expression, _X, _Y, domain=sp.QQ)
        return cls({monomial: _from_sympy_rational(c) for monomial, c in poly.terms()})

    def to_sympy(self):
        terms = (_to_sympy_rational(c) * _X ** i * _Y ** j for (i, j), c in self.coefficients.items())
        expression = sum(terms, sp.Integer(0))
        return sp.Poly(expression, _X, _Y, domain=sp.QQ)

    @property
    def is_zero(self):
        return not self.coefficients

    @property
    def total_degree(self):
        return max((i + j for i, j in self.coefficients), default=-1)

    def __call__(self, x, y):
        return sum((c * x ** i * y ** j for (i, j), c in self.coefficients.items()), Fraction(0))

    def __repr__(self):
        return f"bi_poly({ {key: format_rational(c) for key, c in sorted(self.coefficients.items())} })"


class algebraic_number:
    """A real root of a squarefree rational polynomial together with an isolating interval.

    Either lo == hi and the defining polynomial vanishes there, or the polynomial changes sign between lo and hi
    and has no other root in [lo, hi].
    """

    def __init__(self, defining, lo, hi):
        self.defining = defining
        self.lo = as_rational(lo)
        self.hi = as_rational(hi)

    @classmethod
    def rational(cls, q):
        q = as_rational(q)
        return cls(uni_poly([-q, 1]), q, q)

    @property
    def is_exact(self):
        return self.lo == self.hi

    def __repr__(self):
        if self.is_exact:
            return f"algebraic_number({format_rational(self.lo)})"
        return f"algebraic_number(root of {self.defining} in [{format_rational(self.lo)}, {format_rational(self.hi)}])"

    def __float__(self):
        return float((self.lo + self.hi) / 2)

    def refine(self):
        """Returns the same root with an isolating interval half as wide (or exact)."""
        if self.is_exact:
            return self
        mid = (self.lo + self.hi) / 2
        s_mid = self.defining.sign_at(mid)
        if s_mid == 0:
            return algebraic_number(self.defining, mid, mid)
        if s_mid == self.defining.sign_at(self.lo):
            return algebraic_number(self.defining, mid, self.hi)
        return algebraic_number(self.defining, self.lo, mid)

    def refine_to(self, width):
        number = self
        while number.hi - number.lo > width:
            number = number.refine()
        return number

    def __lt__(self, other):
        return compare(self, other) < 0

    def __gt__(self, other):
        return compare(self, other) > 0


def gcd(p, q):
    """Monic greatest common divisor, computed with sympy over QQ."""
    if p.is_zero:
        return q
    if q.is_zero:
        return p
    return uni_poly.from_sympy(sp.gcd(p.to_sympy(), q.to_sympy()))


def squarefree(p):
    """Returns the squarefree part of p.

    Raises:
        zero_polynomial: When p is zero
    """
    if p.is_zero:
        raise zero_polynomial("The zero polynomial has no squarefree part.")
    if p.degree < 2:
        return p
    return uni_poly.from_sympy(p.to_sympy().sqf_part())


def sturm_count(p, lo, hi):
    """Counts the distinct real roots of p in the open interval (lo, hi).

    Arguments:
        p {uni_poly} -- A nonzero polynomial
        lo {Fraction} -- Left end, not a root of p
        hi {Fraction} -- Right end, not a root of p

    Raises:
        zero_polynomial: p is zero
        endpoint_root: p vanishes at lo or hi, the caller has to move the endpoint

    Returns:
        int -- Number of distinct roots
    """
    if p.is_zero:
        raise zero_polynomial("Cannot count the roots of the zero polynomial.")
    lo, hi = as_rational(lo), as_rational(hi)
    if p(lo) == 0 or p(hi) == 0:
        raise endpoint_root(f"{p} vanishes at an endpoint of [{lo}, {hi}].")
    if lo >= hi:
        return 0
    return p.sign_variations(lo) - p.sign_variations(hi)


def _split_point(p, lo, hi):
    # A squarefree polynomial has at most degree roots, so one of these candidates is not a root
    for k in range(1, p.degree + 3):
        for candidate in ((lo + hi) / 2, lo + (hi - lo) * Fraction(k, p.degree + 3)):
            if p(candidate) != 0:
                return candidate
    raise endpoint_root("No split point found.")


def isolate_roots(p):
    """Isolates every distinct real root of p.

    Arguments:
        p {uni_poly} -- A nonzero polynomial

    Returns:
        list -- algebraic_number objects sorted by value with pairwise disjoint intervals
    """
    if p.is_zero:
        raise zero_polynomial("The zero polynomial has infinitely many roots.")
    core = squarefree(p)
    if core.degree < 1:
        return []
    bound = core.root_bound()
    roots = []
    pending = [(-bound, bound)]
    while pending:
        lo, hi = pending.pop()
        count = sturm_count(core, lo, hi)
        if count == 0:
            continue
        if count == 1:
            roots.append(algebraic_number(core, lo, hi))
            continue
        mid = _split_point(core, lo, hi)
        pending.append((lo, mid))
        pending.append((mid, hi))
    roots.sort(key=lambda root: root.lo)
    return roots


def roots_in(p, lo, hi):
    """Returns the distinct roots of p lying in the closed interval [lo, hi], sorted."""
    lo, hi = as_rational(lo), as_rational(hi)
    found = []
    for root in isolate_roots(p):
        if root.hi < lo or root.lo > hi:
            continue
        if compare_rational(root, lo) >= 0 and compare_rational(root, hi) <= 0:
            found.append(root)
    return found


def compare_rational(a, q):
    """Compares an algebraic number with a rational. Returns -1, 0 or 1."""
    q = as_rational(q)
    while True:
        if a.is_exact:
            return sign(a.lo - q)
        if q <= a.lo:
            # the root is never at lo unless exact, so a > q
            return 1
        if q >= a.hi:
            return -1
        s_q = a.defining.sign_at(q)
        if s_q == 0:
            return 0
        return -1 if s_q == a.defining.sign_at(a.hi) else 1


def _contains_root_of(g, a):
    if a.is_exact:
        return g(a.lo) == 0
    # g divides the defining polynomial, so it has at most the one root of a inside the interval
    return g.sign_at(a.lo) * g.sign_at(a.hi) < 0


def compare(a, b):
    """Exact comparison of two algebraic numbers.

    Returns:
        int -- -1, 0 or 1
    """
    common = None
    while True:
        if a.is_exact:
            return -compare_rational(b, a.lo)
        if b.is_exact:
            return compare_rational(a, b.lo)
        # inexact roots lie strictly inside their intervals
        if a.hi <= b.lo:
            return -1
        if b.hi <= a.lo:
            return 1
        if common is None:
            common = gcd(a.defining, b.defining)
        if common.degree >= 1 and _contains_root_of(common, a) and _contains_root_of(common, b):
            lo, hi = min(a.lo, b.lo), max(a.hi, b.hi)
            if sturm_count(common, lo, hi) == 1:
                return 0
        a, b = a.refine(), b.refine()


def sign_at(p, a):
    """Exact sign of the polynomial p at the algebraic number a.

    Arguments:
        p {uni_poly} -- Polynomial to evaluate
        a {algebraic_number} -- Evaluation point

    Returns:
        int -- -1, 0 or 1
    """
    if p.is_zero:
        return 0
    if a.is_exact:
        return p.sign_at(a.lo)
    if p.degree < 1:
        return sign(p.leading)
    common = gcd(p, a.defining)
    if common.degree >= 1 and _contains_root_of(common, a):
        return 0
    core = squarefree(p)
    while True:
        if a.is_exact:
            return p.sign_at(a.lo)
        if core(a.lo) != 0 and core(a.hi) != 0 and sturm_count(core, a.lo, a.hi) == 0:
            return p.sign_at(a.lo)
        a = a.refine()


def root_multiplicity(p, a):
    """Multiplicity of the algebraic number a as a root of p (0 when it is not a root)."""
    multiplicity = 0
    while not p.is_zero and sign_at(p, a) == 0:
        multiplicity += 1
        p = p.derivative()
    return multiplicity


def _simplest_positive(lo, hi):
    # simplest rational in the open interval (lo, hi), 0 <= lo < hi, hi None means +infinity
    whole = floor(lo)
    if hi is None or whole + 1 < hi:
        return Fraction(whole + 1)
    inner_lo = 1 / (hi - whole)
    inner_hi = None if lo == whole else 1 / (lo - whole)
    return whole + 1 / _simplest_positive(inner_lo, inner_hi)


def simplest_between(lo, hi):
    """Smallest-denominator rational in the open interval (lo, hi), found with a Stern-Brocot walk."""
    lo, hi = as_rational(lo), as_rational(hi)
    if lo >= hi:
        raise not_separable(f"Empty interval ({lo}, {hi}).")
    if lo < 0 < hi:
        return Fraction(0)
    if hi <= 0:
        return -_simplest_positive(-hi, -lo)
    return _simplest_positive(lo, hi)


def rational_between(a, b):
    """Returns a deterministic rational q with a < q < b.

    Arguments:
        a {algebraic_number} -- Smaller number
        b {algebraic_number} -- Larger number

    Raises:
        not_separable: a and b are the same number, or a > b

    Returns:
        Fraction -- The separating rational with the smallest denominator in the gap
    """
    order = compare(a, b)
    if order == 0:
        raise not_separable(f"{a} and {b} are the same number.")
    if order > 0:
        raise not_separable(f"{a} is larger than {b}.")
    while not a.hi < b.lo:
        a, b = a.refine(), b.refine()
    return simplest_between(a.hi, b.lo)


def resultant(f, g, eliminate="y"):
    """Resultant of two bivariate polynomials with respect to one variable.

    Arguments:
        f {bi_poly} -- First polynomial
        g {bi_poly} -- Second polynomial

    Keyword Arguments:
        eliminate {str} -- The variable to eliminate, "x" or "y" (default: {"y"})

    Raises:
        zero_polynomial: Either input is zero
        common_factor: f and g share a nonconstant factor

    Returns:
        uni_poly -- The resultant as a polynomial in the remaining variable
    """
    if f.is_zero or g.is_zero:
        raise zero_polynomial("Resultant of the zero polynomial.")
    F, G = f.to_sympy(), g.to_sympy()
    if sp.Poly(sp.gcd(F, G), _X, _Y).total_degree() > 0:
        raise common_factor(f"{f} and {g} share a common factor.")
    variable, keep = (_Y, _X) if eliminate == "y" else (_X, _Y)
    value = sp.resultant(F.as_expr(), G.as_expr(), variable)
    value = sp.expand(value).subs(keep, _X)
    result = uni_poly.from_sympy(value)
    logger.debug("resultant of degree %s eliminating %s", result.degree, eliminate)
    return result


def eval_sign(p, point):
    """Exact sign of a polynomial at a point.

    Arguments:
        p {uni_poly, bi_poly} -- The polynomial
        point {Fraction, tuple, point2} -- A rational for uni_poly, an (x, y) pair or point for bi_poly

    Returns:
        int -- -1, 0 or 1
    """
    if isinstance(p, uni_poly):
        if isinstance(point, algebraic_number):
            return sign_at(p, point)
        return p.sign_at(as_rational(point))
    x, y = (point.x, point.y) if hasattr(point, "x") else point
    return sign(p(as_rational(x), as_rational(y)))


def compare_values(a, b):
    """Compares two values that are each a Fraction or an algebraic_number.

    Returns:
        int -- -1, 0 or 1
    """
    if isinstance(a, algebraic_number):
        if isinstance(b, algebraic_number):
            return compare(a, b)
        return compare_rational(a, b)
    if isinstance(b, algebraic_number):
        return -compare_rational(b, a)
    return sign(a - b)


def as_float(value):
    if isinstance(value, algebraic_number):
        return float(value.refine_to(Fraction(1, 2 ** 40)))
    return float(value)


def as_algebraic(value):
    if isinstance(value, algebraic_number):
        return value
    return algebraic_number.rational(value)


def rational_inside(lo, hi):
    """A rational strictly between lo and hi, where either end may be None (infinite)."""
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        hi = as_algebraic(hi)
        return Fraction(floor(hi.lo) - 1)
    if hi is None:
        lo = as_algebraic(lo)
        return Fraction(floor(lo.hi) + 1)
    return rational_between(as_algebraic(lo), as_algebraic(hi))


def bracket(value, width=Fraction(1, 2 ** 16)):
    """Rational walls hugging a value: the value itself when rational, else the ends of a tight isolating interval."""
    if isinstance(value, Fraction):
        return [value]
    if value.is_exact:
        return [value.lo]
    value = value.refine_to(width)
    if value.is_exact:
        return [value.lo]
    return [value.lo, value.hi]
