"""Buchberger's algorithm with cofactor tracking, staircases, and a
truncation-based local multiplicity.

This module is the package's independent exact oracle: everything the
border-basis and lifting pipelines produce gets cross-checked against it on
small instances.  It insists on exact field scalars and favors clarity over
speed (plain Buchberger, first criterion only).

Cofactors express every basis element as an explicit combination of the
input system, which is what turns an ideal-membership test into a usable
certificate downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotZeroDimensional, OriginNotAZero, UnsupportedScalar
from .polynomials import (
    OrderIdeal,
    Polynomial,
    monomial_degree,
    monomial_div,
    monomial_divides,
    monomial_mul,
    monomial_one,
    monomials_of_degree,
    order_key,
)


@dataclass
class GroebnerBasis:
    """A reduced basis plus, per element, its expression in the input system."""

    generators: list
    order: str
    cofactors: list  # cofactors[i][j]: coefficient of input_system[j] in generators[i]
    input_system: list

    @property
    def domain(self):
        return self.generators[0].domain

    @property
    def nvars(self):
        return self.generators[0].nvars

    def leading_monomials(self):
        return [g.leading_monomial(self.order) for g in self.generators]

    def verify_cofactors(self) -> bool:
        """Expand every stored combination and compare with the basis element."""
        for g, row in zip(self.generators, self.cofactors):
            acc = Polynomial.zero(g.domain, g.nvars)
            for c, f in zip(row, self.input_system):
                acc = acc + c * f
            if acc != g:
                return False
        return True


@dataclass
class StaircaseBasis:
    """Standard monomials of a zero-dimensional ideal, as an order ideal."""

    order_ideal: OrderIdeal

    @property
    def dimension(self) -> int:
        return len(self.order_ideal)


def _require_exact_field(polys):
    dom = polys[0].domain
    if not (getattr(dom, "is_exact", False) and dom.is_field):
        raise UnsupportedScalar("the oracle works over exact fields only")
    return dom


def reduce_with_quotients(f: Polynomial, basis: list, order: str = "grevlex"):
    """Multivariate division: f = sum q_i * basis_i + r, no term of r
    divisible by any leading monomial of the basis.

    Returns (quotients, remainder).  Deterministic: always rewrites the
    largest reducible term by the first matching divisor.
    """
    dom = f.domain
    nvars = f.nvars
    key = order_key(order)
    lead = [(g.leading_monomial(order), g.leading_coefficient(order)) for g in basis]
    quotients = [Polynomial.zero(dom, nvars) for _ in basis]
    remainder = Polynomial.zero(dom, nvars)
    work = f
    while not work.is_zero():
        # largest term still in play
        exp = max(work.terms, key=key)
        coeff = work.terms[exp]
        for i, (lm, lc) in enumerate(lead):
            if monomial_divides(lm, exp):
                factor = dom.div(coeff, lc)
                shift = monomial_div(exp, lm)
                quotients[i] = quotients[i] + Polynomial.monomial(dom, nvars, shift, factor)
                work = work - basis[i].mul_monomial(shift, factor)
                break
        else:
            remainder = remainder + Polynomial.monomial(dom, nvars, exp, coeff)
            work = work - Polynomial.monomial(dom, nvars, exp, coeff)
    return quotients, remainder


def normal_form(f: Polynomial, gb: GroebnerBasis) -> Polynomial:
    """Remainder of f modulo the reduced basis (the canonical representative)."""
    _, r = reduce_with_quotients(f, gb.generators, gb.order)
    return r


def _s_poly_parts(f, g, order):
    lmf, lmg = f.leading_monomial(order), g.leading_monomial(order)
    lcm = tuple(max(a, b) for a, b in zip(lmf, lmg))
    uf = monomial_div(lcm, lmf)
    ug = monomial_div(lcm, lmg)
    dom = f.domain
    cf = dom.inv(f.leading_coefficient(order))
    cg = dom.inv(g.leading_coefficient(order))
    return (uf, cf), (ug, cg), lcm


def buchberger(system: list, order: str = "grevlex") -> GroebnerBasis:
    """Reduced basis of the ideal generated by `system`, with cofactors.

    The reduced basis is unique for the monomial order, so the result does
    not depend on the input order of the generators.
    """
    if not system:
        raise ValueError("empty input system")
    dom = _require_exact_field(system)
    nvars = system[0].nvars
    zero = Polynomial.zero(dom, nvars)

    basis = []  # list of (poly, cofactor row)
    for j, f in enumerate(system):
        if f.is_zero():
            continue
        row = [zero] * len(system)
        row[j] = Polynomial.one(dom, nvars)
        basis.append((f, row))
    if not basis:
        raise ValueError("all input generators are zero")

    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]
    while pairs:
        i, j = pairs.pop(0)
        f, frow = basis[i]
        g, grow = basis[j]
        lmf = f.leading_monomial(order)
        lmg = g.leading_monomial(order)
        # first criterion: coprime leading monomials reduce to zero
        if all(a == 0 or b == 0 for a, b in zip(lmf, lmg)):
            continue
        (uf, cf), (ug, cg), _ = _s_poly_parts(f, g, order)
        s = f.mul_monomial(uf, cf) - g.mul_monomial(ug, cg)
        srow = [
            a.mul_monomial(uf, cf) - b.mul_monomial(ug, cg) for a, b in zip(frow, grow)
        ]
        quotients, r = reduce_with_quotients(s, [b[0] for b in basis], order)
        if r.is_zero():
            continue
        rrow = srow
        for q, (_, brow) in zip(quotients, basis):
            if q.is_zero():
                continue
            rrow = [a - q * b for a, b in zip(rrow, brow)]
        lc = r.leading_coefficient(order)
        lcinv = dom.inv(lc)
        r = r.scale(lcinv)
        rrow = [a.scale(lcinv) for a in rrow]
        basis.append((r, rrow))
        new = len(basis) - 1
        pairs.extend((k, new) for k in range(new))

    return _reduce_basis(basis, system, order)


def _reduce_basis(basis, system, order) -> GroebnerBasis:
    """Minimize then fully inter-reduce, keeping the cofactor rows exact."""
    dom = basis[0][0].domain

    # drop members whose leading monomial is divisible by another's
    kept = list(basis)
    changed = True
    while changed:
        changed = False
        for i, (g, _) in enumerate(kept):
            lm = g.leading_monomial(order)
            for j, (h, _) in enumerate(kept):
                if i != j and monomial_divides(h.leading_monomial(order), lm):
                    kept.pop(i)
                    changed = True
                    break
            if changed:
                break

    # tail-reduce each element by the others
    final = []
    for i, (g, grow) in enumerate(kept):
        others = [kept[j] for j in range(len(kept)) if j != i]
        quotients, r = reduce_with_quotients(g, [o[0] for o in others], order)
        rrow = grow
        for q, (_, orow) in zip(quotients, others):
            if q.is_zero():
                continue
            rrow = [a - q * b for a, b in zip(rrow, orow)]
        lc = r.leading_coefficient(order)
        lcinv = dom.inv(lc)
        final.append((r.scale(lcinv), [a.scale(lcinv) for a in rrow]))

    final.sort(key=lambda item: order_key(order)(item[0].leading_monomial(order)))
    return GroebnerBasis(
        generators=[g for g, _ in final],
        order=order,
        cofactors=[row for _, row in final],
        input_system=list(system),
    )


def quotient_staircase(gb: GroebnerBasis) -> StaircaseBasis:
    """Order ideal of standard monomials; raises when infinite."""
    return staircase_from_leading_monomials(gb.nvars, gb.leading_monomials())


def staircase_from_leading_monomials(nvars: int, leads: list) -> StaircaseBasis:
    """Standard monomials below a set of leading monomials (shared by the
    exact and the numeric pipelines)."""
    if any(monomial_degree(lm) == 0 for lm in leads):
        # unit ideal: zero ring, no monomial basis
        raise NotZeroDimensional("ideal is the whole ring (quotient is zero)")
    for i in range(nvars):
        if not any(all(lm[j] == 0 for j in range(nvars) if j != i) for lm in leads):
            raise NotZeroDimensional(
                f"no pure power of variable {i + 1} among the leading monomials"
            )
    # BFS from 1: the standard monomials are closed by division
    start = monomial_one(nvars)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for m in frontier:
            for i in range(nvars):
                up = m[:i] + (m[i] + 1,) + m[i + 1 :]
                if up in seen:
                    continue
                if any(monomial_divides(lm, up) for lm in leads):
                    continue
                seen.add(up)
                nxt.append(up)
        frontier = nxt
    return StaircaseBasis(OrderIdeal(nvars, seen))


def membership_certificate(p: Polynomial, system: list, order: str = "grevlex"):
    """Cofactors c_i with p = sum c_i * system_i, or None when p is not a member."""
    _require_exact_field(system)
    gb = buchberger(system, order)
    quotients, r = reduce_with_quotients(p, gb.generators, order)
    if not r.is_zero():
        return None
    dom = p.domain
    out = [Polynomial.zero(dom, p.nvars) for _ in system]
    for q, row in zip(quotients, gb.cofactors):
        if q.is_zero():
            continue
        out = [a + q * b for a, b in zip(out, row)]
    return out


@dataclass
class TruncationMultiplicity:
    """Stabilized local dimension at the origin plus where it stabilized."""

    r: int
    stabilized_at: int


def local_multiplicity_truncation(
    system: list, nmax: int = 12, order: str = "grevlex"
) -> TruncationMultiplicity | None:
    """Dimension of the quotient by (ideal + all monomials of degree N) for
    growing N; the common value of two consecutive N is the multiplicity of
    the origin.  Returns None when no stabilization occurs by nmax (the
    origin is not isolated at this budget).
    """
    dom = _require_exact_field(system)
    nvars = system[0].nvars
    for f in system:
        if not dom.is_zero(f.constant_coefficient()):
            raise OriginNotAZero("a generator has nonzero constant term")
    prev = None
    for n in range(1, nmax + 1):
        gens = list(system) + [
            Polynomial.monomial(dom, nvars, e) for e in monomials_of_degree(nvars, n)
        ]
        gb = buchberger(gens, order)
        try:
            dim = quotient_staircase(gb).dimension
        except NotZeroDimensional:  # pragma: no cover - cannot happen: contains m^n
            raise
        if prev is not None and dim == prev:
            return TruncationMultiplicity(r=dim, stabilized_at=n)
        prev = dim
    return None
