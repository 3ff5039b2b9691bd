"""Coefficient domains: exact fields, complex floats, and truncated power series.

A *domain* object bundles the arithmetic of one scalar kind.  Elements are
plain Python values (``Fraction`` for the rationals, ``int`` for prime
fields, ``complex`` for floats, :class:`TruncatedSeries` for the local
ring), so hot loops pay no wrapper overhead.  All higher layers
(polynomials, matrices, bases) are parameterized by a domain and only ever
call the methods defined here.

The truncated series ring models a local ring with residue field k: an
element of ``k[[v_1..v_m]]`` kept modulo all monomials of total degree
greater than the precision ``N``.  Units are exactly the elements with
nonzero constant term, and the order of vanishing (valuation) is observable
up to ``N``; beyond that only the lower bound ``AtLeast(N+1)`` is known.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NotAUnit, ShapeError, UnsupportedScalar


class AtLeast:
    """Lower bound returned when a valuation exceeds the observable precision."""

    __slots__ = ("bound",)

    def __init__(self, bound: int):
        self.bound = bound

    def __eq__(self, other):
        return isinstance(other, AtLeast) and self.bound == other.bound

    def __hash__(self):
        return hash(("AtLeast", self.bound))

    def __repr__(self):
        return f"AtLeast({self.bound})"


class RationalField:
    """The field of arbitrary-precision rationals."""

    kind = "QQ"
    is_field = True
    is_exact = True
    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def div(self, a, b):
        if b == 0:
            raise NotAUnit("division by zero in QQ")
        return a / b

    def inv(self, a):
        if a == 0:
            raise NotAUnit("zero is not invertible in QQ")
        return 1 / Fraction(a)

    def is_zero(self, a):
        return a == 0

    def eq(self, a, b):
        return a == b

    def from_int(self, k):
        return Fraction(k)

    def from_fraction(self, q):
        return Fraction(q)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


QQ = RationalField()


class PrimeField:
    """Integers modulo a prime p < 2**31; elements are ints in [0, p)."""

    is_field = True
    is_exact = True

    def __init__(self, p: int):
        if p < 2 or p >= 2**31:
            raise ValueError("prime modulus must satisfy 2 <= p < 2^31")
        for d in range(2, min(p, 1 << 16)):
            if d * d > p:
                break
            if p % d == 0:
                raise ValueError(f"{p} is not prime")
        self.p = p
        self.kind = f"GF({p})"
        self.zero = 0
        self.one = 1 % p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise NotAUnit(f"zero is not invertible in GF({self.p})")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return (a * self.inv(b)) % self.p

    def is_zero(self, a):
        return a % self.p == 0

    def eq(self, a, b):
        return (a - b) % self.p == 0

    def from_int(self, k):
        return k % self.p

    def from_fraction(self, q):
        q = Fraction(q)
        if q.denominator % self.p == 0:
            raise NotAUnit(f"denominator {q.denominator} vanishes in GF({self.p})")
        return (q.numerator * pow(q.denominator, self.p - 2, self.p)) % self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return self.kind


class ComplexField:
    """Complex double floats with an absolute tolerance for zero tests.

    Arithmetic is plain IEEE ``complex``; only :meth:`is_zero` and
    :meth:`eq` consult the tolerance.  Exact structural zeros (used when
    normalizing polynomial term maps) remain ``0j``.
    """

    kind = "CC"
    is_field = True
    is_exact = False
    zero = 0j
    one = 1 + 0j

    def __init__(self, tolerance: float = 1e-9):
        self.tolerance = float(tolerance)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def div(self, a, b):
        if b == 0:
            raise NotAUnit("division by exact zero in CC")
        return a / b

    def inv(self, a):
        if a == 0:
            raise NotAUnit("exact zero is not invertible in CC")
        return 1 / a

    def is_zero(self, a):
        return abs(a) <= self.tolerance

    def eq(self, a, b):
        return abs(a - b) <= self.tolerance

    def from_int(self, k):
        return complex(k)

    def from_fraction(self, q):
        q = Fraction(q)
        return complex(q.numerator / q.denominator)

    def __eq__(self, other):
        return isinstance(other, ComplexField) and other.tolerance == self.tolerance

    def __hash__(self):
        return hash(("CC", self.tolerance))

    def __repr__(self):
        return f"CC(tol={self.tolerance})"


class TruncatedSeries:
    """An element of k[[v_1..v_m]] modulo all terms of total degree > N.

    ``coeffs`` maps exponent tuples (total degree <= N) to nonzero base-field
    scalars.  Instances are immutable by convention and always belong to a
    :class:`SeriesRing`, which performs all arithmetic.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        self.coeffs = coeffs

    def __eq__(self, other):
        return isinstance(other, TruncatedSeries) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        if not self.coeffs:
            return "TruncatedSeries(0)"
        parts = [f"{c}*v^{e}" for e, c in sorted(self.coeffs.items(), key=_series_sort_key)]
        return "TruncatedSeries(" + " + ".join(parts) + ")"


def _series_sort_key(item):
    e = item[0]
    return (sum(e), e)


class SeriesRing:
    """Arithmetic of truncated power series over an exact base field.

    The ring is ``base[[v_1..v_m]]`` truncated past total degree
    ``precision``; truncation is by total degree, matching the powers of the
    maximal ideal used by valuation bookkeeping.
    """

    is_field = False
    is_exact = True

    def __init__(self, base, num_vars: int, precision: int = 8):
        if not getattr(base, "is_exact", False) or not base.is_field:
            raise UnsupportedScalar("series coefficients must be an exact field")
        if num_vars < 1:
            raise ValueError("need at least one deformation variable")
        if precision < 0:
            raise ValueError("precision must be non-negative")
        self.base = base
        self.num_vars = num_vars
        self.precision = precision
        self.kind = f"{base.kind}[[v1..v{num_vars}]]/deg>{precision}"
        self.zero = TruncatedSeries({})
        zero_exp = (0,) * num_vars
        self.one = TruncatedSeries({zero_exp: base.one})
        self._zero_exp = zero_exp

    # -- construction ---------------------------------------------------

    def from_coeffs(self, coeffs: dict) -> TruncatedSeries:
        """Build a series from an exponent->scalar map, validating shape."""
        out = {}
        for exp, c in coeffs.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != self.num_vars or any(e < 0 for e in exp):
                raise ShapeError(f"bad series exponent {exp} for {self.num_vars} variables")
            if sum(exp) > self.precision:
                continue
            if not self.base.is_zero(c):
                out[exp] = c
        return TruncatedSeries(out)

    def from_int(self, k):
        return self.from_base(self.base.from_int(k))

    def from_fraction(self, q):
        return self.from_base(self.base.from_fraction(q))

    def from_base(self, c) -> TruncatedSeries:
        """Embed a base-field constant."""
        if self.base.is_zero(c):
            return self.zero
        return TruncatedSeries({self._zero_exp: c})

    def variable(self, i: int) -> TruncatedSeries:
        """The generator v_{i+1}."""
        if not 0 <= i < self.num_vars:
            raise ShapeError(f"no deformation variable with index {i}")
        if self.precision < 1:
            return self.zero
        exp = tuple(1 if j == i else 0 for j in range(self.num_vars))
        return TruncatedSeries({exp: self.base.one})

    def monomial(self, exp, c=None) -> TruncatedSeries:
        exp = tuple(exp)
        if c is None:
            c = self.base.one
        return self.from_coeffs({exp: c})

    # -- ring operations -------------------------------------------------

    def _check(self, a: TruncatedSeries):
        if not isinstance(a, TruncatedSeries):
            raise ShapeError(f"expected TruncatedSeries, got {type(a).__name__}")
        return a

    def add(self, a, b):
        self._check(a), self._check(b)
        out = dict(a.coeffs)
        base = self.base
        for exp, c in b.coeffs.items():
            s = base.add(out.get(exp, base.zero), c)
            if base.is_zero(s):
                out.pop(exp, None)
            else:
                out[exp] = s
        return TruncatedSeries(out)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        self._check(a)
        base = self.base
        return TruncatedSeries({exp: base.neg(c) for exp, c in a.coeffs.items()})

    def mul(self, a, b):
        self._check(a), self._check(b)
        base = self.base
        cap = self.precision
        out: dict = {}
        for ea, ca in a.coeffs.items():
            da = sum(ea)
            for eb, cb in b.coeffs.items():
                if da + sum(eb) > cap:
                    continue
                exp = tuple(x + y for x, y in zip(ea, eb))
                prod = base.mul(ca, cb)
                s = base.add(out.get(exp, base.zero), prod)
                if base.is_zero(s):
                    out.pop(exp, None)
                else:
                    out[exp] = s
        return TruncatedSeries(out)

    def scale(self, c, a):
        """Multiply by a base-field scalar."""
        self._check(a)
        base = self.base
        if base.is_zero(c):
            return self.zero
        return TruncatedSeries({exp: base.mul(c, x) for exp, x in a.coeffs.items()})

    def is_zero(self, a):
        self._check(a)
        return not a.coeffs

    def eq(self, a, b):
        return self._check(a).coeffs == self._check(b).coeffs

    def constant_term(self, a):
        self._check(a)
        return a.coeffs.get(self._zero_exp, self.base.zero)

    def is_unit(self, a):
        return not self.base.is_zero(self.constant_term(a))

    def inv(self, a):
        """Inverse of a unit, by the geometric series for 1/(c - n) = c^{-1}/(1 - n/c)."""
        self._check(a)
        c0 = self.constant_term(a)
        if self.base.is_zero(c0):
            raise NotAUnit("series with zero constant term is not invertible")
        c0inv = self.base.inv(c0)
        # a = c0*(1 - t) with val(t) >= 1, so 1/a = c0^{-1} * sum t^k up to precision.
        t = self.neg(self.scale(c0inv, a))
        t = self.add(t, self.one)
        acc = self.one
        out = self.one
        for _ in range(self.precision):
            acc = self.mul(acc, t)
            if not acc.coeffs:
                break
            out = self.add(out, acc)
        return self.scale(c0inv, out)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def valuation(self, a):
        """Smallest total degree carrying a nonzero coefficient, or AtLeast(N+1)."""
        self._check(a)
        if not a.coeffs:
            return AtLeast(self.precision + 1)
        return min(sum(exp) for exp in a.coeffs)

    def homogeneous_part(self, a, d: int) -> dict:
        """Exponent->scalar map of the total-degree-d terms."""
        self._check(a)
        return {exp: c for exp, c in a.coeffs.items() if sum(exp) == d}

    def truncate(self, a, new_precision: int) -> TruncatedSeries:
        """Forget all terms of total degree > new_precision (shape unchanged)."""
        self._check(a)
        return TruncatedSeries(
            {exp: c for exp, c in a.coeffs.items() if sum(exp) <= new_precision}
        )

    def map_to(self, other: "SeriesRing", a):
        """Reinterpret in another series ring with the same variable count."""
        if other.num_vars != self.num_vars:
            raise ShapeError("deformation variable counts differ")
        return other.from_coeffs(dict(self._check(a).coeffs))

    # -- misc -------------------------------------------------------------

    def residue(self, a):
        """Constant term, as an element of the base field (reduction modulo m)."""
        return self.constant_term(a)

    def __eq__(self, other):
        return (
            isinstance(other, SeriesRing)
            and other.base == self.base
            and other.num_vars == self.num_vars
            and other.precision == self.precision
        )

    def __hash__(self):
        return hash(("SeriesRing", self.base, self.num_vars, self.precision))

    def __repr__(self):
        return self.kind
