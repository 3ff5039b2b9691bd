"""Border bases: rewriting rules on an order ideal, multiplication matrices,
the commutation certificate, and normal forms through the matrix
representation.

A border basis is an order ideal B plus one rewriting rule per border
monomial, each rule expressing that monomial as a combination of B.  The
rules induce one multiplication matrix per variable; the quotient they
present is a free module with basis B exactly when those matrices pairwise
commute, and "certified" below always means that commutation has been
checked for the basis's scalar kind.

Normal forms are computed by evaluating the polynomial on the matrices and
applying it to the coordinate vector of 1 (term rewriting by border rules
need not terminate in general; the matrix route is canonical and total).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import linalg
from .errors import RequiresCertifiedBasis, ShapeError
from .groebner import GroebnerBasis, quotient_staircase, reduce_with_quotients
from .polynomials import OrderIdeal, Polynomial, monomial_one


@dataclass
class CommutationWitness:
    """A failed commutation: matrices i and j disagree at `entry` with value."""

    i: int
    j: int
    entry: tuple
    value: object

    def __bool__(self):
        return False


class Certified:
    """Successful commutation check."""

    def __bool__(self):
        return True

    def __repr__(self):
        return "Certified"


CERTIFIED = Certified()


class BorderBasis:
    """Order ideal + rewriting rules, over any supported scalar domain.

    ``rules[beta]`` is the coefficient row of the border monomial ``beta``
    on the basis monomials, in the order ``order_ideal.monomials``.
    """

    def __init__(self, order_ideal: OrderIdeal, rules: dict, domain, certified: bool = False):
        self.order_ideal = order_ideal
        self.domain = domain
        monos = order_ideal.monomials
        border = order_ideal.border
        if set(rules) != set(border):
            raise ShapeError("need exactly one rule per border monomial")
        fixed = {}
        for beta, row in rules.items():
            row = list(row)
            if len(row) != len(monos):
                raise ShapeError(f"rule row for {beta} has wrong length")
            fixed[beta] = row
        self.rules = fixed
        self.certified = certified
        self._matrices = None
        self._monomial_vectors = None

    # -- basic accessors ---------------------------------------------------

    @property
    def nvars(self):
        return self.order_ideal.nvars

    @property
    def dimension(self):
        return len(self.order_ideal)

    def basis_index(self):
        return {m: i for i, m in enumerate(self.order_ideal.monomials)}

    def rule_polynomial(self, beta) -> Polynomial:
        """The relation x^beta - sum(u_{beta,alpha} x^alpha)."""
        dom = self.domain
        terms = {tuple(beta): dom.one}
        for alpha, c in zip(self.order_ideal.monomials, self.rules[tuple(beta)]):
            if not dom.is_zero(c):
                terms[alpha] = dom.neg(c)
        return Polynomial.from_terms(dom, self.nvars, terms)

    def rule_polynomials(self):
        return [self.rule_polynomial(beta) for beta in self.order_ideal.border]

    # -- multiplication matrices -------------------------------------------

    def multiplication_matrices(self) -> "MultiplicationMatrices":
        """One matrix per variable: column at x^alpha is x_i * x^alpha on B."""
        if self._matrices is not None:
            return self._matrices
        dom = self.domain
        monos = self.order_ideal.monomials
        index = self.basis_index()
        d = len(monos)
        mats = []
        for i in range(self.nvars):
            mat = linalg.zeros(dom, d, d)
            for col, alpha in enumerate(monos):
                up = alpha[:i] + (alpha[i] + 1,) + alpha[i + 1 :]
                if up in index:
                    mat[index[up]][col] = dom.one
                else:
                    for row, c in enumerate(self.rules[up]):
                        mat[row][col] = c
            mats.append(mat)
        self._matrices = MultiplicationMatrices(
            matrices=mats, order_ideal=self.order_ideal, domain=dom
        )
        return self._matrices

    def certify(self):
        """Run the commutation check and flip the certified flag on success."""
        result = commutation_check(self.multiplication_matrices())
        self.certified = bool(result)
        return result

    # -- normal form ---------------------------------------------------------

    def normal_form(self, p: Polynomial) -> list:
        """Coordinates of p's image in the quotient, on the basis monomials.

        Evaluates p on the multiplication matrices applied to the coordinate
        vector of 1; requires a certified basis (otherwise the value would
        depend on the evaluation path).
        """
        if not self.certified:
            raise RequiresCertifiedBasis("normal_form needs a certified border basis")
        if p.nvars != self.nvars:
            raise ShapeError("polynomial has the wrong number of variables")
        dom = self.domain
        mats = self.multiplication_matrices().matrices
        d = self.dimension
        if self._monomial_vectors is None:
            one_vec = [dom.zero] * d
            one_vec[self.basis_index()[monomial_one(self.nvars)]] = dom.one
            self._monomial_vectors = {monomial_one(self.nvars): one_vec}
        cache = self._monomial_vectors

        def vec(exp):
            v = cache.get(exp)
            if v is not None:
                return v
            i = next(k for k, e in enumerate(exp) if e > 0)
            down = exp[:i] + (exp[i] - 1,) + exp[i + 1 :]
            v = linalg.mat_vec(dom, mats[i], vec(down))
            cache[exp] = v
            return v

        out = [dom.zero] * d
        for exp, c in p.terms.items():
            w = vec(exp)
            for k in range(d):
                if not dom.is_zero(w[k]):
                    out[k] = dom.add(out[k], dom.mul(c, w[k]))
        return out

    def map_coefficients(self, fn, new_domain) -> "BorderBasis":
        """Push the rule table through a scalar map (base change)."""
        new_rules = {
            beta: [fn(c) for c in row] for beta, row in self.rules.items()
        }
        return BorderBasis(self.order_ideal, new_rules, new_domain, certified=False)

    def to_json_dict(self) -> dict:
        """Canonical JSON form: order ideal exponents + rule rows."""
        from .sysio import format_monomial, scalar_to_json

        return {
            "orderIdeal": [list(m) for m in self.order_ideal.monomials],
            "rules": {
                format_monomial(beta): [scalar_to_json(self.domain, c) for c in row]
                for beta, row in sorted(
                    self.rules.items(), key=lambda kv: (sum(kv[0]), kv[0])
                )
            },
        }

    def __eq__(self, other):
        return (
            isinstance(other, BorderBasis)
            and self.order_ideal == other.order_ideal
            and self.domain == other.domain
            and all(
                all(self.domain.eq(a, b) for a, b in zip(row, other.rules[beta]))
                for beta, row in self.rules.items()
            )
        )

    def __repr__(self):
        return (
            f"BorderBasis(dim={self.dimension}, nvars={self.nvars}, "
            f"certified={self.certified})"
        )


@dataclass
class MultiplicationMatrices:
    """The per-variable multiplication matrices on a fixed basis enumeration."""

    matrices: list
    order_ideal: OrderIdeal
    domain: object

    @property
    def dimension(self):
        return len(self.order_ideal)

    @property
    def nvars(self):
        return len(self.matrices)


def commutation_check(mm: MultiplicationMatrices):
    """Certified when all pairwise commutators vanish (exactly for exact
    scalars, entrywise below the domain tolerance for floats); otherwise the
    first offending pair with a nonzero commutator entry."""
    dom = mm.domain
    mats = mm.matrices
    for j in range(len(mats)):
        for i in range(j):
            ab = linalg.mat_mul(dom, mats[i], mats[j])
            ba = linalg.mat_mul(dom, mats[j], mats[i])
            for r in range(len(ab)):
                for c in range(len(ab)):
                    delta = dom.sub(ab[r][c], ba[r][c])
                    if not dom.is_zero(delta):
                        return CommutationWitness(i=i, j=j, entry=(r, c), value=delta)
    return CERTIFIED


def from_groebner(gb: GroebnerBasis) -> BorderBasis:
    """Border basis of a zero-dimensional quotient: basis = staircase, rules =
    normal forms of the border monomials.  The result is certified (a genuine
    quotient algebra always passes commutation)."""
    staircase = quotient_staircase(gb)
    oi = staircase.order_ideal
    dom = gb.domain
    index = {m: i for i, m in enumerate(oi.monomials)}
    rules = {}
    for beta in oi.border:
        mono = Polynomial.monomial(dom, gb.nvars, beta)
        _, r = reduce_with_quotients(mono, gb.generators, gb.order)
        row = [dom.zero] * len(oi)
        for exp, c in r.terms.items():
            row[index[exp]] = c
        rules[beta] = row
    bb = BorderBasis(oi, rules, dom, certified=False)
    result = bb.certify()
    if not result:  # pragma: no cover - impossible for a true quotient
        raise AssertionError(f"quotient matrices failed to commute: {result}")
    return bb
