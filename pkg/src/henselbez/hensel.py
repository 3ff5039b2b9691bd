"""Order-by-order lifting of a residual border basis along a coefficient
deformation with truncated-power-series coefficients.

Pipeline: the residual system is localized at the origin (an idempotent
splits off the local factor when the residual quotient is not already
local); each residual rewriting rule is certified to lie in the residual
ideal and lifted to a combination H of the deformed generators; dividing
the H's by a candidate rule table yields remainder rows whose vanishing
characterizes the lifted rules; the candidate is corrected order by order
in the deformation variables with the exact residual Jacobian, computed
once by dual-number division passes.  The final division also yields the
quotient matrix whose determinant is the localization denominator
certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .borderbasis import BorderBasis, from_groebner
from .errors import (
    NotSimpleZero,
    NotZeroDimensional,
    OriginNotAZero,
    ResidualMismatch,
    ShapeError,
)
from .groebner import buchberger, membership_certificate
from .localzero import (
    _joint_nilpotent_kernel,
    _try_global_matrices,
    idempotent_polynomial,
    split_idempotent,
)
from .polynomials import (
    OrderIdeal,
    Polynomial,
    PolynomialRing,
    grlex_key,
    monomial_degree,
    monomial_div,
    monomial_divides,
    monomials_of_degree,
)
from .scalars import AtLeast, SeriesRing


class DeformedSystem:
    """Polynomial generators with truncated-series coefficients.

    The residual system (constant terms in the deformation variables) must
    vanish at the origin; that is where the lifting happens.
    """

    def __init__(self, generators: list, ring: SeriesRing, nvars: int):
        if not generators:
            raise ShapeError("empty deformed system")
        for g in generators:
            if g.domain != ring or g.nvars != nvars:
                raise ShapeError("generator does not match the declared ambient")
        self.generators = list(generators)
        self.ring = ring
        self.nvars = nvars
        base = ring.base
        for f in self.residual():
            if not base.is_zero(f.constant_coefficient()):
                raise OriginNotAZero("a residual generator has nonzero constant term")

    @property
    def num_deformation_vars(self):
        return self.ring.num_vars

    @property
    def precision(self):
        return self.ring.precision

    def residual(self) -> list:
        """Constant-term images of the generators over the residue field."""
        base = self.ring.base
        return [
            g.map_coefficients(self.ring.residue, base) for g in self.generators
        ]

    def truncated(self, new_precision: int) -> "DeformedSystem":
        """The same system at a lower working precision."""
        if new_precision > self.ring.precision:
            raise ShapeError("cannot raise precision of an existing system")
        ring = SeriesRing(self.ring.base, self.ring.num_vars, new_precision)
        gens = [
            g.map_coefficients(lambda s: ring.from_coeffs(dict(s.coeffs)), ring)
            for g in self.generators
        ]
        return DeformedSystem(gens, ring, self.nvars)


@dataclass
class LocalizationData:
    """How the residual quotient was localized at the origin."""

    residual_system: list
    r: int
    nil_index: int
    idempotent: Polynomial | None  # None: residual quotient already local
    report: object = None

    @property
    def is_identity(self):
        return self.idempotent is None


@dataclass
class DivisionResult:
    """Quotients and remainder row of one border division."""

    quotients: dict  # border monomial -> Polynomial over the scalar ring
    remainder_row: list  # coefficients on the order ideal monomials


@dataclass
class LiftedBorderBasis:
    """A lifted rule table together with its certificates."""

    base: BorderBasis  # over the series ring
    residual: BorderBasis  # over the residue field
    quotients_q: dict  # (beta, beta') -> Polynomial over the series ring
    det_s: Polynomial  # the quotient-matrix determinant, over the series ring
    precision: int
    localization: LocalizationData
    system: DeformedSystem


@dataclass
class VerificationReport:
    """Outcome of the five lift checks; carries pass/fail per item."""

    generators_reduce_to_zero: bool
    matrices_commute: bool
    residual_matches: bool
    det_unit_at_origin: bool
    rank_witness: bool
    det_one_mod_m_everywhere: bool  # informational; holds in the residually local case
    precision: int
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return (
            self.generators_reduce_to_zero
            and self.matrices_commute
            and self.residual_matches
            and self.det_unit_at_origin
            and self.rank_witness
        )

    def to_json_dict(self):
        return {
            "generatorsReduceToZero": self.generators_reduce_to_zero,
            "matricesCommute": self.matrices_commute,
            "residualMatches": self.residual_matches,
            "detUnitAtOrigin": self.det_unit_at_origin,
            "rankWitness": self.rank_witness,
            "detOneModMEverywhere": self.det_one_mod_m_everywhere,
            "precision": self.precision,
            "passed": self.passed,
        }


# ---------------------------------------------------------------------------
# localization of the residual system
# ---------------------------------------------------------------------------


def localize_residual(residual_system: list, order: str = "grevlex"):
    """Certified border basis of the local factor at the origin, plus the
    idempotent data needed to certify rule membership.

    When the residual quotient is local the global border basis is returned
    unchanged; otherwise the quotient is split by the idempotent and the
    local factor is presented by the ideal augmented with the power of the
    maximal ideal given by the nilpotency index.
    """
    dom = residual_system[0].domain
    for f in residual_system:
        if not dom.is_zero(f.constant_coefficient()):
            raise OriginNotAZero("a residual generator has nonzero constant term")
    built = _try_global_matrices(residual_system, order)
    if built is None:
        raise NotZeroDimensional(
            "residual quotient is infinite-dimensional; cannot localize"
        )
    bb, mm = built
    d = mm.dimension
    kern = _joint_nilpotent_kernel(dom, mm.matrices, d)
    r = len(kern)
    if r == 0:
        raise OriginNotAZero("origin carries no local factor")
    if r == d:
        # already local: every variable acts nilpotently
        report = split_idempotent(residual_system)
        loc = LocalizationData(
            residual_system=list(residual_system),
            r=r,
            nil_index=report.nil_index,
            idempotent=None,
            report=report,
        )
        return bb, loc
    report = split_idempotent(residual_system)
    nvars = residual_system[0].nvars
    augmented = list(residual_system) + [
        Polynomial.monomial(dom, nvars, e)
        for e in monomials_of_degree(nvars, report.nil_index)
    ]
    bb0 = from_groebner(buchberger(augmented, order))
    if bb0.dimension != report.r:
        raise NotZeroDimensional(
            "local presentation dimension disagrees with the idempotent rank"
        )
    loc = LocalizationData(
        residual_system=list(residual_system),
        r=report.r,
        nil_index=report.nil_index,
        idempotent=idempotent_polynomial(report),
        report=report,
    )
    return bb0, loc


# ---------------------------------------------------------------------------
# membership lifts
# ---------------------------------------------------------------------------


def build_h(system: DeformedSystem, bb0: BorderBasis, loc: LocalizationData) -> dict:
    """For each border monomial, a combination of the deformed generators
    whose residual is the (idempotent-times-)rule it lifts.

    Residual membership is certified through the cofactor-tracking oracle;
    failure means the rule table does not belong to the residual ideal.
    """
    ring = system.ring
    k = ring.base
    nvars = system.nvars
    out = {}
    for beta in bb0.order_ideal.border:
        target = bb0.rule_polynomial(beta)
        if loc.idempotent is not None:
            target = loc.idempotent * target
        cert = membership_certificate(target, loc.residual_system)
        if cert is None:
            raise ResidualMismatch(
                f"residual rule for border monomial {beta} is not in the residual ideal"
            )
        h = Polynomial.zero(ring, nvars)
        for c, gen in zip(cert, system.generators):
            lifted = c.map_coefficients(ring.from_base, ring)
            h = h + lifted * gen
        out[beta] = h
    return out


# ---------------------------------------------------------------------------
# border division
# ---------------------------------------------------------------------------


def _border_index(exp, members):
    """Distance of a monomial to the order ideal: |exp| minus the largest
    degree of a member dividing it (0 exactly on members)."""
    best = 0
    for b in members:
        if monomial_divides(b, exp):
            db = monomial_degree(b)
            if db > best:
                best = db
    return monomial_degree(exp) - best


def divide_by_candidate(
    h: Polynomial,
    rules: dict,
    order_ideal: OrderIdeal,
    divisor_tiebreak: str = "small",
    support_hint=None,
) -> DivisionResult:
    """Rewrite h by the candidate rule table until it is supported on the
    order ideal, returning the quotients and the remainder row.

    Strategy: always rewrite a monomial of maximal border index (ties:
    graded-lex-largest), factored through a border divisor of maximal
    degree (ties by lex; provably terminating for any rule table supported
    on the order ideal).

    The rewrite sequence is driven by monomial support only, never by
    coefficient values: zero entries are carried along, and rewriting a
    border monomial inserts slots for every basis monomial.  The division is
    therefore one fixed polynomial map in the rule entries over the support
    closure, which is what makes its dual-number derivative the exact
    linearization used by the lifting loop.  ``support_hint`` enlarges the
    starting support (so runs over a residue ring retrace the parent ring's
    steps).  The reassembly identity
    h = sum(quotient * rule polynomial) + remainder is asserted before
    returning.
    """
    dom = h.domain
    nvars = h.nvars
    members = order_ideal.monomials
    member_set = set(members)
    border = order_ideal.border
    index_of = {m: i for i, m in enumerate(members)}

    quotients = {beta: Polynomial.zero(dom, nvars) for beta in border}
    work = dict(h.terms)
    for exp in support_hint or ():
        work.setdefault(exp, dom.zero)
    ind_cache: dict = {}

    def ind(exp):
        v = ind_cache.get(exp)
        if v is None:
            v = _border_index(exp, members)
            ind_cache[exp] = v
        return v

    while True:
        target = None
        target_key = None
        for exp in work:
            if exp in member_set:
                continue
            key = (ind(exp), grlex_key(exp))
            if target_key is None or key > target_key:
                target, target_key = exp, key
        if target is None:
            break
        coeff = work.pop(target)
        want_deg = monomial_degree(target) - ind(target) + 1
        candidates = [
            beta
            for beta in border
            if monomial_degree(beta) == want_deg and monomial_divides(beta, target)
        ]
        # existence is guaranteed: peel one variable off a maximal-degree member divisor
        beta = min(candidates) if divisor_tiebreak == "small" else max(candidates)
        shift = monomial_div(target, beta)
        if not dom.is_zero(coeff):
            quotients[beta] = quotients[beta] + Polynomial.monomial(
                dom, nvars, shift, coeff
            )
        for alpha, u in zip(members, rules[beta]):
            exp = tuple(s + a for s, a in zip(shift, alpha))
            work[exp] = dom.add(work.get(exp, dom.zero), dom.mul(coeff, u))

    row = [dom.zero] * len(members)
    for exp, c in work.items():
        row[index_of[exp]] = c

    # reassembly identity must hold exactly at the working truncation
    check = Polynomial.from_terms(dom, nvars, work)
    for beta in border:
        q = quotients[beta]
        if q.is_zero():
            continue
        hb = _rule_polynomial(dom, nvars, order_ideal, rules, beta)
        check = check + q * hb
    if check != h:
        raise AssertionError("border division reassembly identity failed")

    return DivisionResult(quotients=quotients, remainder_row=row)


def _rule_polynomial(dom, nvars, order_ideal, rules, beta):
    terms = {beta: dom.one}
    for alpha, u in zip(order_ideal.monomials, rules[beta]):
        if not dom.is_zero(u):
            prev = terms.get(alpha, dom.zero)
            terms[alpha] = dom.sub(prev, u)
    return Polynomial.from_terms(dom, nvars, terms)


# ---------------------------------------------------------------------------
# the lift
# ---------------------------------------------------------------------------


def lift_border_basis(
    system: DeformedSystem,
    bb0: BorderBasis,
    loc: LocalizationData,
    precision: int | None = None,
    divisor_tiebreak: str = "small",
) -> LiftedBorderBasis:
    """Unique rule table over the series ring reducing every lifted
    combination to zero, found by order-by-order correction with the exact
    residual Jacobian.

    The residual rule table is the start point; each correction is the
    homogeneous next-order part of the remainder pushed through the inverse
    Jacobian, so the remainder valuation rises by one per round until the
    truncation order is exhausted and the remainder vanishes identically.
    """
    if precision is not None and precision != system.precision:
        system = system.truncated(precision)
    ring = system.ring
    k = ring.base
    nvars = system.nvars
    oi = bb0.order_ideal
    border = oi.border
    members = oi.monomials

    h_table = build_h(system, bb0, loc)
    supports = {beta: frozenset(h_table[beta].terms) for beta in border}

    unknowns = [(beta, j) for beta in border for j in range(len(members))]
    slot = {key: idx for idx, key in enumerate(unknowns)}

    jac = _residual_jacobian(bb0, h_table, supports, divisor_tiebreak)
    jac_inv = linalg.invert(k, jac)
    if jac_inv is None:
        raise NotSimpleZero(
            "residual Jacobian of the remainder system is singular at the start table"
        )

    # current rule table over the series ring, seeded with the residual rules
    rules = {
        beta: [ring.from_base(c) for c in bb0.rules[beta]] for beta in border
    }

    def remainder_rows():
        return {
            beta: divide_by_candidate(
                h_table[beta], rules, oi, divisor_tiebreak, supports[beta]
            ).remainder_row
            for beta in border
        }

    for order_d in range(1, ring.precision + 1):
        rows = remainder_rows()
        if all(ring.is_zero(c) for row in rows.values() for c in row):
            break
        # the remainder valuation must have reached the current order
        int_vals = [
            v
            for row in rows.values()
            for v in (ring.valuation(c) for c in row)
            if not isinstance(v, AtLeast)
        ]
        if int_vals and min(int_vals) < order_d:
            raise AssertionError(
                f"remainder valuation {min(int_vals)} below the current order {order_d}"
            )
        # collect homogeneous degree-d parts per deformation exponent
        rhs: dict = {}
        for beta in border:
            for j, c in enumerate(rows[beta]):
                for vexp, coeff in ring.homogeneous_part(c, order_d).items():
                    rhs.setdefault(vexp, [k.zero] * len(unknowns))[
                        slot[(beta, j)]
                    ] = coeff
        for vexp, vec in rhs.items():
            delta = linalg.mat_vec(k, jac_inv, vec)
            mono = ring.monomial(vexp)
            for idx, (beta, j) in enumerate(unknowns):
                if k.is_zero(delta[idx]):
                    continue
                corr = ring.scale(k.neg(delta[idx]), mono)
                rules[beta][j] = ring.add(rules[beta][j], corr)

    # final division: remainders must vanish identically at the truncation
    final = {
        beta: divide_by_candidate(
            h_table[beta], rules, oi, divisor_tiebreak, supports[beta]
        )
        for beta in border
    }
    for beta in border:
        if not all(ring.is_zero(c) for c in final[beta].remainder_row):
            raise AssertionError("lift failed to close at the working precision")

    lifted = BorderBasis(oi, rules, ring, certified=False)
    lifted.certify()

    quotients_q = {
        (beta, beta2): final[beta].quotients[beta2] for beta in border for beta2 in border
    }
    det_s = _quotient_determinant(ring, border, quotients_q, nvars)
    return LiftedBorderBasis(
        base=lifted,
        residual=bb0,
        quotients_q=quotients_q,
        det_s=det_s,
        precision=ring.precision,
        localization=loc,
        system=system,
    )


def _residual_jacobian(bb0, h_table, supports, divisor_tiebreak):
    """Exact derivative of the residual remainder rows in the rule unknowns,
    one dual-number division pass per unknown.

    Each pass retraces the same support-driven rewrite sequence as the
    series-level divisions (via the support hint), so the derivative is the
    exact linearization of the lifting loop's remainder map.
    """
    k = bb0.domain
    oi = bb0.order_ideal
    border = oi.border
    members = oi.monomials
    dual = SeriesRing(k, 1, 1)
    eps = dual.variable(0)
    ring = next(iter(h_table.values())).domain

    h_residual = {
        beta: h_table[beta].map_coefficients(
            lambda s: dual.from_base(ring.residue(s)), dual
        )
        for beta in border
    }

    unknowns = [(beta, j) for beta in border for j in range(len(members))]
    n_unknowns = len(unknowns)
    jac = [[k.zero] * n_unknowns for _ in range(n_unknowns)]
    slot = {key: idx for idx, key in enumerate(unknowns)}

    base_rules = {
        beta: [dual.from_base(c) for c in bb0.rules[beta]] for beta in border
    }
    for col, (beta0, j0) in enumerate(unknowns):
        rules = {beta: list(row) for beta, row in base_rules.items()}
        rules[beta0][j0] = dual.add(rules[beta0][j0], eps)
        for beta in border:
            res = divide_by_candidate(
                h_residual[beta], rules, oi, divisor_tiebreak, supports[beta]
            )
            for j, c in enumerate(res.remainder_row):
                d = c.coeffs.get((1,), k.zero)
                if not k.is_zero(d):
                    jac[slot[(beta, j)]][col] = d
    return jac


def _quotient_determinant(ring, border, quotients_q, nvars):
    polyring = PolynomialRing(ring, nvars)
    size = len(border)
    mat = [
        [quotients_q[(border[i], border[j])] for j in range(size)] for i in range(size)
    ]
    return linalg.determinant(polyring, mat)


# ---------------------------------------------------------------------------
# verification and diagnostics
# ---------------------------------------------------------------------------


def verify_lift(lift: LiftedBorderBasis, system: DeformedSystem | None = None) -> VerificationReport:
    """The five certificates of a lifted rule table, each to the working
    precision: generators reduce to zero, matrices commute, the residual
    table is reproduced, the quotient determinant is a unit at the origin,
    and the basis coordinates witness the free rank."""
    if system is None:
        system = lift.system
    ring = lift.base.domain
    k = ring.base
    details: dict = {}

    # (a) every deformed generator has normal form zero under the lifted rules
    gen_zero = True
    if not lift.base.certified:
        gen_zero = False
    else:
        for g in system.generators:
            nf = lift.base.normal_form(g)
            if not all(ring.is_zero(c) for c in nf):
                gen_zero = False
                break
    details["generators"] = gen_zero

    # (b) commutation of the lifted multiplication matrices
    commute = bool(lift.base.certify())

    # (c) the lifted table reduces to the residual one
    residual_ok = True
    for beta, row in lift.base.rules.items():
        target = lift.residual.rules[beta]
        for c, c0 in zip(row, target):
            if not k.eq(ring.residue(c), c0):
                residual_ok = False

    # (d) determinant of the quotient matrix: unit at the origin, residually 1
    s0 = lift.det_s.constant_coefficient()
    det_unit = k.eq(ring.residue(s0), k.one)
    one_mod_m = det_unit
    for exp, c in lift.det_s.terms.items():
        if monomial_degree(exp) > 0 and not k.is_zero(ring.residue(c)):
            one_mod_m = False

    # (e) free-rank witness: basis monomials map to the coordinate vectors
    rank_ok = lift.base.certified and lift.residual.dimension == len(
        lift.base.order_ideal
    )
    if rank_ok:
        for idx, alpha in enumerate(lift.base.order_ideal.monomials):
            nf = lift.base.normal_form(
                Polynomial.monomial(ring, system.nvars, alpha)
            )
            for j, c in enumerate(nf):
                want = ring.one if j == idx else ring.zero
                if not ring.eq(c, want):
                    rank_ok = False

    return VerificationReport(
        generators_reduce_to_zero=gen_zero,
        matrices_commute=commute,
        residual_matches=residual_ok,
        det_unit_at_origin=det_unit,
        rank_witness=rank_ok,
        det_one_mod_m_everywhere=one_mod_m,
        precision=lift.precision,
        details=details,
    )


@dataclass
class CharPolyReport:
    """Characteristic polynomial of one lifted multiplication matrix."""

    variable: int
    coefficients: list  # mu_j for j = 1..r, over the series ring
    residual_is_pure_power: bool
    valuations: list  # int or AtLeast per coefficient
    valuation_at_least_one: bool
    valuation_at_least_j: list  # informational flags


def char_poly_diagnostics(lift: LiftedBorderBasis) -> list:
    """Per variable: characteristic polynomial of the lifted matrix, its
    residual shape (must be the pure power), and the deformation-order of
    each coefficient (at least one asserted; at least j reported only)."""
    ring = lift.base.domain
    k = ring.base
    mm = lift.base.multiplication_matrices()
    r = mm.dimension
    out = []
    for i, mat in enumerate(mm.matrices):
        coeffs = linalg.charpoly(ring, mat)  # [1, mu_1, ..., mu_r]
        mus = coeffs[1:]
        residual_pure = all(k.is_zero(ring.residue(mu)) for mu in mus)
        vals = [ring.valuation(mu) for mu in mus]
        ge1 = all(isinstance(v, AtLeast) or v >= 1 for v in vals)
        gej = [
            isinstance(v, AtLeast) or v >= (j + 1) for j, v in enumerate(vals)
        ]
        out.append(
            CharPolyReport(
                variable=i,
                coefficients=mus,
                residual_is_pure_power=residual_pure,
                valuations=vals,
                valuation_at_least_one=ge1,
                valuation_at_least_j=gej,
            )
        )
    return out
