"""Multivariate polynomials over any scalar domain; order ideals and borders.

Monomials are plain exponent tuples (one non-negative int per variable).  A
polynomial stores a map from exponent tuples to nonzero scalars together
with its ambient variable count and coefficient domain.  Canonical term
order for printing and hashing is graded lexicographic (total degree first,
then lex on the exponents), which keeps every emitted byte reproducible.
"""

from __future__ import annotations

from .errors import ShapeError

Exponent = tuple
Monomial = Exponent  # a monomial is its exponent tuple

# ---------------------------------------------------------------------------
# monomial helpers (exponent tuples)
# ---------------------------------------------------------------------------


def monomial_one(nvars: int) -> Exponent:
    return (0,) * nvars


def monomial_mul(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def monomial_divides(a: Exponent, b: Exponent) -> bool:
    """True iff x^a divides x^b."""
    return all(x <= y for x, y in zip(a, b))


def monomial_div(b: Exponent, a: Exponent) -> Exponent:
    """Exponent of x^b / x^a; caller guarantees divisibility."""
    return tuple(y - x for x, y in zip(a, b))


def monomial_degree(a: Exponent) -> int:
    return sum(a)


def grlex_key(a: Exponent):
    """Sort key for graded lexicographic order (bigger key = bigger monomial)."""
    return (sum(a), a)


def grevlex_key(a: Exponent):
    """Sort key for graded reverse lexicographic order."""
    return (sum(a), tuple(-e for e in reversed(a)))


def lex_key(a: Exponent):
    return a


ORDER_KEYS = {"grevlex": grevlex_key, "grlex": grlex_key, "lex": lex_key}


def order_key(order: str):
    try:
        return ORDER_KEYS[order]
    except KeyError:
        raise ShapeError(f"unknown monomial order {order!r}") from None


def _strict_zero(domain, c) -> bool:
    """Structural zero test: exact zero only, so tiny float coefficients survive."""
    if getattr(domain, "is_exact", True):
        return domain.is_zero(c)
    return c == domain.zero


def monomials_of_degree(nvars: int, d: int):
    """All exponent tuples in nvars variables of total degree exactly d."""
    if nvars == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(nvars - 1, d - first):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


class Polynomial:
    """A multivariate polynomial: {exponent tuple: nonzero scalar} over a domain.

    Instances are immutable by convention; all operations return new objects.
    Structural zeros are never stored (for inexact domains only *exact*
    zeros are dropped, so tiny coefficients survive arithmetic untouched).
    """

    __slots__ = ("domain", "nvars", "terms")

    def __init__(self, domain, nvars: int, terms: dict):
        self.domain = domain
        self.nvars = nvars
        self.terms = terms

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_terms(cls, domain, nvars: int, terms: dict) -> "Polynomial":
        """Normalize: validate exponents, drop structural zeros."""
        out = {}
        for exp, c in terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars or any(e < 0 for e in exp):
                raise ShapeError(f"bad exponent {exp} for {nvars} variables")
            if not _strict_zero(domain, c):
                out[exp] = c
        return cls(domain, nvars, out)

    @classmethod
    def zero(cls, domain, nvars: int) -> "Polynomial":
        return cls(domain, nvars, {})

    @classmethod
    def constant(cls, domain, nvars: int, c) -> "Polynomial":
        if _strict_zero(domain, c):
            return cls(domain, nvars, {})
        return cls(domain, nvars, {monomial_one(nvars): c})

    @classmethod
    def one(cls, domain, nvars: int) -> "Polynomial":
        return cls(domain, nvars, {monomial_one(nvars): domain.one})

    @classmethod
    def variable(cls, domain, nvars: int, i: int) -> "Polynomial":
        if not 0 <= i < nvars:
            raise ShapeError(f"no variable with index {i} among {nvars}")
        exp = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(domain, nvars, {exp: domain.one})

    @classmethod
    def monomial(cls, domain, nvars: int, exp, c=None) -> "Polynomial":
        exp = tuple(exp)
        if len(exp) != nvars:
            raise ShapeError(f"bad exponent {exp} for {nvars} variables")
        if c is None:
            c = domain.one
        return cls.from_terms(domain, nvars, {exp: c})

    # -- shape ------------------------------------------------------------

    def _compat(self, other: "Polynomial"):
        if self.nvars != other.nvars or self.domain != other.domain:
            raise ShapeError("polynomials live in different ambients")

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def constant_coefficient(self):
        return self.terms.get(monomial_one(self.nvars), self.domain.zero)

    def sorted_terms(self, order: str = "grlex", reverse: bool = True):
        """Terms as (exponent, coeff) pairs, by default biggest first."""
        key = order_key(order)
        return sorted(self.terms.items(), key=lambda kv: key(kv[0]), reverse=reverse)

    def leading_monomial(self, order: str = "grevlex") -> Exponent:
        key = order_key(order)
        return max(self.terms, key=key)

    def leading_coefficient(self, order: str = "grevlex"):
        return self.terms[self.leading_monomial(order)]

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._compat(other)
        dom = self.domain
        out = dict(self.terms)
        for exp, c in other.terms.items():
            s = dom.add(out.get(exp, dom.zero), c)
            if _strict_zero(dom, s):
                out.pop(exp, None)
            else:
                out[exp] = s
        return Polynomial(dom, self.nvars, out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __neg__(self) -> "Polynomial":
        dom = self.domain
        return Polynomial(dom, self.nvars, {e: dom.neg(c) for e, c in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._compat(other)
        dom = self.domain
        out: dict = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                exp = monomial_mul(ea, eb)
                s = dom.add(out.get(exp, dom.zero), dom.mul(ca, cb))
                if _strict_zero(dom, s):
                    out.pop(exp, None)
                else:
                    out[exp] = s
        return Polynomial(dom, self.nvars, out)

    def scale(self, c) -> "Polynomial":
        dom = self.domain
        if _strict_zero(dom, c):
            return Polynomial(dom, self.nvars, {})
        return Polynomial(dom, self.nvars, {e: dom.mul(c, x) for e, x in self.terms.items()})

    def mul_monomial(self, exp: Exponent, c=None) -> "Polynomial":
        dom = self.domain
        if c is None:
            c = dom.one
        out = {}
        for e, x in self.terms.items():
            prod = dom.mul(c, x)
            if not _strict_zero(dom, prod):
                out[monomial_mul(e, exp)] = prod
        return Polynomial(dom, self.nvars, out)

    def evaluate(self, point):
        """Evaluate at a point (scalars of the same domain)."""
        if len(point) != self.nvars:
            raise ShapeError(f"point has {len(point)} coordinates, need {self.nvars}")
        dom = self.domain
        acc = dom.zero
        for exp, c in self.terms.items():
            term = c
            for e, x in zip(exp, point):
                for _ in range(e):
                    term = dom.mul(term, x)
            acc = dom.add(acc, term)
        return acc

    def map_coefficients(self, fn, new_domain) -> "Polynomial":
        """Apply fn to every coefficient, landing in new_domain."""
        return Polynomial.from_terms(
            new_domain, self.nvars, {e: fn(c) for e, c in self.terms.items()}
        )

    # -- comparisons / hashing --------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.nvars == other.nvars
            and self.domain == other.domain
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        from .sysio import format_polynomial

        return f"Polynomial({format_polynomial(self)})"


# ---------------------------------------------------------------------------
# order ideals and borders
# ---------------------------------------------------------------------------


def is_closed_by_division(monomials) -> bool:
    """True iff every divisor of every member is a member.

    Checking one-step divisors suffices: divisibility chains descend one
    variable at a time.
    """
    mset = set(monomials)
    if not mset:
        return True
    for exp in mset:
        for i, e in enumerate(exp):
            if e > 0:
                down = exp[:i] + (e - 1,) + exp[i + 1 :]
                if down not in mset:
                    return False
    return True


class OrderIdeal:
    """A finite division-closed monomial set containing 1, with its border.

    The border consists of the monomials one variable-step outside the set;
    it is where rewriting rules live.
    """

    __slots__ = ("nvars", "monomials", "_members", "_border")

    def __init__(self, nvars: int, monomials):
        mono = {tuple(m) for m in monomials}
        if not mono:
            raise ShapeError("order ideal must be nonempty")
        for m in mono:
            if len(m) != nvars or any(e < 0 for e in m):
                raise ShapeError(f"bad monomial {m} for {nvars} variables")
        if monomial_one(nvars) not in mono:
            raise ShapeError("order ideal must contain the monomial 1")
        if not is_closed_by_division(mono):
            raise ShapeError("monomial set is not closed by division")
        self.nvars = nvars
        self.monomials = tuple(sorted(mono, key=grlex_key))
        self._members = frozenset(mono)
        self._border = None

    def __len__(self):
        return len(self.monomials)

    def __contains__(self, exp):
        return tuple(exp) in self._members

    @property
    def border(self):
        """Monomials (X_1*B  u ... u X_n*B) minus B, sorted graded-lex."""
        if self._border is None:
            mset = self._members
            out = set()
            for m in self.monomials:
                for i in range(self.nvars):
                    up = m[:i] + (m[i] + 1,) + m[i + 1 :]
                    if up not in mset:
                        out.add(up)
            self._border = tuple(sorted(out, key=grlex_key))
        return self._border

    def __eq__(self, other):
        return isinstance(other, OrderIdeal) and self.monomials == other.monomials

    def __hash__(self):
        return hash(self.monomials)

    def __repr__(self):
        return f"OrderIdeal({list(self.monomials)})"


class PolynomialRing:
    """Domain adapter: polynomials in n variables over a scalar domain.

    Lets generic ring algorithms (matrix products, division-free
    characteristic polynomials) run with polynomial entries.
    """

    is_field = False

    def __init__(self, domain, nvars: int):
        self.domain = domain
        self.nvars = nvars
        self.is_exact = getattr(domain, "is_exact", True)
        self.kind = f"{domain.kind}[x1..x{nvars}]"
        self.zero = Polynomial.zero(domain, nvars)
        self.one = Polynomial.one(domain, nvars)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def is_zero(self, a):
        return a.is_zero()

    def eq(self, a, b):
        return a == b

    def from_int(self, k):
        return Polynomial.constant(self.domain, self.nvars, self.domain.from_int(k))

    def __eq__(self, other):
        return (
            isinstance(other, PolynomialRing)
            and other.domain == self.domain
            and other.nvars == self.nvars
        )

    def __hash__(self):
        return hash(("PolynomialRing", self.domain, self.nvars))

    def __repr__(self):
        return self.kind
