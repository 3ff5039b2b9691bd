"""Series lifting: division, membership lifts, the order-by-order solve,
verification, and characteristic-polynomial diagnostics."""

from fractions import Fraction

import pytest

from conftest import deformed_poly, qq_poly
from henselbez.errors import ResidualMismatch
from henselbez.hensel import (
    DeformedSystem,
    build_h,
    char_poly_diagnostics,
    divide_by_candidate,
    lift_border_basis,
    localize_residual,
    verify_lift,
)
from henselbez.polynomials import OrderIdeal, Polynomial
from henselbez.scalars import QQ, AtLeast, SeriesRing


def _system(gens_terms, nvars, mvars, precision):
    ring = SeriesRing(QQ, mvars, precision)
    gens = [deformed_poly(t, ring, nvars) for t in gens_terms]
    return DeformedSystem(gens, ring, nvars)


def _lift(system):
    bb0, loc = localize_residual(system.residual())
    return lift_border_basis(system, bb0, loc), bb0, loc


def _series_map(ring, row):
    return [dict(c.coeffs) for c in row]


# ---------------------------------------------------------------------------
# division
# ---------------------------------------------------------------------------


def test_division_single_step():
    oi = OrderIdeal(1, [(0,), (1,)])
    u0, u1 = Fraction(3), Fraction(5)
    rules = {(2,): [u0, u1]}
    res = divide_by_candidate(qq_poly({(2,): 1}, 1), rules, oi)
    assert res.quotients[(2,)] == qq_poly({(0,): 1}, 1)
    assert res.remainder_row == [u0, u1]


def test_division_two_steps_by_hand():
    # x^3 = x * x^2 -> quotient x + u1, remainder (u1*u0, u0 + u1^2)
    oi = OrderIdeal(1, [(0,), (1,)])
    u0, u1 = Fraction(3), Fraction(5)
    rules = {(2,): [u0, u1]}
    res = divide_by_candidate(qq_poly({(3,): 1}, 1), rules, oi)
    assert res.quotients[(2,)] == qq_poly({(1,): 1, (0,): u1}, 1)
    assert res.remainder_row == [u1 * u0, u0 + u1 * u1]


def test_division_of_supported_polynomial_is_identity():
    oi = OrderIdeal(1, [(0,), (1,)])
    rules = {(2,): [Fraction(1), Fraction(2)]}
    h = qq_poly({(0,): 7, (1,): -2}, 1)
    res = divide_by_candidate(h, rules, oi)
    assert res.quotients[(2,)].is_zero()
    assert res.remainder_row == [Fraction(7), Fraction(-2)]


def test_division_reassembles_for_degree_raising_rules():
    # rules may rewrite toward larger monomials; the index strategy still
    # terminates and the reassembly identity is asserted internally
    oi = OrderIdeal(2, [(0, 0), (0, 1), (0, 2)])
    z = Fraction(0)
    rules = {
        (1, 0): [z, z, Fraction(1)],  # x -> y^2
        (1, 1): [z, Fraction(1), z],  # xy -> y
        (1, 2): [Fraction(1), z, z],  # xy^2 -> 1
        (0, 3): [z, z, Fraction(1)],  # y^3 -> y^2
    }
    res = divide_by_candidate(qq_poly({(2, 0): 1}, 2), rules, oi)
    assert len(res.remainder_row) == 3


# ---------------------------------------------------------------------------
# membership lifts
# ---------------------------------------------------------------------------


def test_build_h_single_generator():
    system = _system([{(2,): {(0,): 1}, (1,): {(1,): -1}}], 1, 1, 4)
    bb0, loc = localize_residual(system.residual())
    h = build_h(system, bb0, loc)
    assert set(h) == {(2,)}
    assert h[(2,)] == system.generators[0]


def test_build_h_lifts_cross_certificates():
    system = _system(
        [
            {(2, 0): {(0, 0): 1}, (0, 3): {(0, 0): -1}, (0, 0): {(1, 0): 1}},
            {(0, 2): {(0, 0): 1}, (0, 0): {(0, 1): 1}},
        ],
        2,
        2,
        4,
    )
    bb0, loc = localize_residual(system.residual())
    h = build_h(system, bb0, loc)
    # the rule for x^2 lifts the certificate x^2 = 1*(x^2-y^3) + y*(y^2)
    f1, f2 = system.generators
    y = Polynomial.variable(system.ring, 2, 1)
    assert h[(2, 0)] == f1 + y * f2


def test_build_h_rejects_foreign_rules():
    system = _system([{(2,): {(0,): 1}}], 1, 1, 4)
    oi = OrderIdeal(1, [(0,)])
    from henselbez.borderbasis import BorderBasis
    from henselbez.hensel import LocalizationData

    fake = BorderBasis(oi, {(1,): [Fraction(0)]}, QQ, certified=True)
    loc = LocalizationData(
        residual_system=system.residual(), r=1, nil_index=1, idempotent=None
    )
    with pytest.raises(ResidualMismatch):
        build_h(system, fake, loc)


# ---------------------------------------------------------------------------
# localization
# ---------------------------------------------------------------------------


def test_localize_residual_cubic():
    bb0, loc = localize_residual([qq_poly({(2,): 1, (3,): -1}, 1)])
    assert bb0.order_ideal.monomials == ((0,), (1,))
    assert bb0.rules[(2,)] == [Fraction(0), Fraction(0)]
    assert not loc.is_identity
    assert loc.idempotent == qq_poly({(0,): 1, (2,): -1}, 1)
    assert loc.r == 2


def test_localize_residual_identity_case():
    bb0, loc = localize_residual([qq_poly({(2, 0): 1}, 2), qq_poly({(0, 2): 1}, 2)])
    assert loc.is_identity
    assert bb0.dimension == 4


def test_localize_residual_simple_zero():
    bb0, loc = localize_residual([qq_poly({(2,): 1, (1,): -1}, 1)])
    assert bb0.order_ideal.monomials == ((0,),)
    assert bb0.rules[(1,)] == [Fraction(0)]
    assert loc.r == 1


# ---------------------------------------------------------------------------
# lifting
# ---------------------------------------------------------------------------


def test_lift_exact_finite_rule():
    system = _system([{(2,): {(0,): 1}, (1,): {(1,): -1}}], 1, 1, 8)
    lift, _, _ = _lift(system)
    ring = system.ring
    u0, u1 = lift.base.rules[(2,)]
    assert ring.is_zero(u0)
    assert u1 == ring.variable(0)
    assert verify_lift(lift).passed


def test_lift_two_variable_shift():
    system = _system(
        [
            {(2, 0): {(0, 0): 1}, (0, 0): {(1, 0): 1}},
            {(0, 2): {(0, 0): 1}, (0, 0): {(0, 1): 1}},
        ],
        2,
        2,
        6,
    )
    lift, _, _ = _lift(system)
    ring = system.ring
    v1 = ring.variable(0)
    v2 = ring.variable(1)
    monos = lift.base.order_ideal.monomials
    idx = {m: i for i, m in enumerate(monos)}

    def only(beta, mono, value):
        row = lift.base.rules[beta]
        assert row[idx[mono]] == value
        assert all(ring.is_zero(c) for i, c in enumerate(row) if i != idx[mono])

    only((2, 0), (0, 0), ring.neg(v1))
    only((0, 2), (0, 0), ring.neg(v2))
    only((2, 1), (0, 1), ring.neg(v1))
    only((1, 2), (1, 0), ring.neg(v2))
    assert verify_lift(lift).passed


def _oracle_cubic_series(precision):
    """Independent fixed point of the rewriting x^2 <- x*(rule) + v, with
    plain coefficient lists over Fraction."""
    n = precision

    def mul(a, b):
        out = [Fraction(0)] * (n + 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if i + j <= n:
                    out[i + j] += x * y
        return out

    def add(a, b):
        return [x + y for x, y in zip(a, b)]

    v = [Fraction(0)] * (n + 1)
    v[1] = Fraction(1)
    u1 = [Fraction(0)] * (n + 1)
    u0 = [Fraction(0)] * (n + 1)
    for _ in range(4 * n + 8):
        u1, u0 = add(u0, mul(u1, u1)), add(v, mul(u1, u0))
    assert u1 == add(u0, mul(u1, u1))
    assert u0 == add(v, mul(u1, u0))
    return u0, u1


def test_lift_cubic_matches_fixed_point_oracle():
    precision = 8
    system = _system(
        [{(2,): {(0,): 1}, (3,): {(0,): -1}, (0,): {(1,): -1}}], 1, 1, precision
    )
    lift, _, _ = _lift(system)
    u0, u1 = lift.base.rules[(2,)]
    oracle_u0, oracle_u1 = _oracle_cubic_series(precision)
    for k in range(precision + 1):
        assert u0.coeffs.get((k,), Fraction(0)) == oracle_u0[k]
        assert u1.coeffs.get((k,), Fraction(0)) == oracle_u1[k]
    assert verify_lift(lift).passed


def test_lift_multivariate_nonlocal_residual():
    # residual {x^2 - x^3, y^2} has zeros away from the origin as well
    system = _system(
        [
            {(2, 0): {(0, 0): 1}, (3, 0): {(0, 0): -1}, (0, 1): {(1, 0): 1}},
            {(0, 2): {(0, 0): 1}, (1, 0): {(0, 1): -1}},
        ],
        2,
        2,
        5,
    )
    bb0, loc = localize_residual(system.residual())
    assert not loc.is_identity
    assert loc.r == 4
    lift = lift_border_basis(system, bb0, loc)
    report = verify_lift(lift)
    assert report.passed


def test_lift_rejects_incompatible_extra_generator():
    # an extra generator outside the flat deformation is caught by the
    # generator-reduction check, not silently absorbed
    system = _system(
        [
            {(2,): {(0,): 1}, (1,): {(1,): -1}},
            {(3,): {(0,): 1}},
        ],
        1,
        1,
        6,
    )
    lift, _, _ = _lift(system)
    report = verify_lift(lift)
    assert not report.generators_reduce_to_zero
    assert not report.passed


def test_lift_unique_across_division_tiebreaks():
    system = _system(
        [
            {(2, 0): {(0, 0): 1}, (0, 3): {(0, 0): -1}, (0, 0): {(1, 0): 1}},
            {(0, 2): {(0, 0): 1}, (0, 0): {(0, 1): 1}},
        ],
        2,
        2,
        5,
    )
    bb0, loc = localize_residual(system.residual())
    lift_a = lift_border_basis(system, bb0, loc, divisor_tiebreak="small")
    lift_b = lift_border_basis(system, bb0, loc, divisor_tiebreak="large")
    assert lift_a.base == lift_b.base


def test_lift_truncation_consistency():
    full = _system(
        [{(2,): {(0,): 1}, (3,): {(0,): -1}, (0,): {(1,): -1}}], 1, 1, 8
    )
    lift_full, _, _ = _lift(full)
    lift_small, _, _ = _lift(full.truncated(4))
    for beta, row in lift_small.base.rules.items():
        for c_small, c_full in zip(row, lift_full.base.rules[beta]):
            truncated = {e: v for e, v in c_full.coeffs.items() if sum(e) <= 4}
            assert truncated == c_small.coeffs


def test_verify_detects_corrupted_coefficient():
    system = _system([{(2,): {(0,): 1}, (1,): {(1,): -1}}], 1, 1, 6)
    lift, _, _ = _lift(system)
    ring = system.ring
    bad_rules = {b: list(row) for b, row in lift.base.rules.items()}
    bad_rules[(2,)][0] = ring.add(bad_rules[(2,)][0], ring.variable(0))
    from henselbez.borderbasis import BorderBasis

    lift.base = BorderBasis(lift.base.order_ideal, bad_rules, ring)
    report = verify_lift(lift)
    assert not report.generators_reduce_to_zero or not report.matrices_commute
    assert not report.passed


def test_det_s_residually_one_in_local_case():
    system = _system(
        [
            {(2, 0): {(0, 0): 1}, (0, 0): {(1, 0): 1}},
            {(0, 2): {(0, 0): 1}, (0, 0): {(0, 1): 1}},
        ],
        2,
        2,
        4,
    )
    lift, _, _ = _lift(system)
    report = verify_lift(lift)
    assert report.det_unit_at_origin
    assert report.det_one_mod_m_everywhere


def test_det_s_unit_at_origin_in_nonlocal_case():
    system = _system(
        [{(2,): {(0,): 1}, (3,): {(0,): -1}, (0,): {(1,): -1}}], 1, 1, 6
    )
    lift, _, _ = _lift(system)
    report = verify_lift(lift)
    assert report.det_unit_at_origin
    assert not report.det_one_mod_m_everywhere  # the idempotent twists the rows


# ---------------------------------------------------------------------------
# characteristic-polynomial diagnostics
# ---------------------------------------------------------------------------


def test_charpoly_pure_shift():
    system = _system([{(2,): {(0,): 1}, (0,): {(1,): 1}}], 1, 1, 6)
    lift, _, _ = _lift(system)
    (diag,) = char_poly_diagnostics(lift)
    ring = system.ring
    # T^2 + v: mu_1 = 0, mu_2 = v
    assert ring.is_zero(diag.coefficients[0])
    assert diag.coefficients[1] == ring.variable(0)
    assert diag.residual_is_pure_power
    assert diag.valuations == [AtLeast(7), 1]
    assert diag.valuation_at_least_one


def test_charpoly_linear_rule():
    system = _system([{(2,): {(0,): 1}, (1,): {(1,): -1}}], 1, 1, 6)
    lift, _, _ = _lift(system)
    (diag,) = char_poly_diagnostics(lift)
    assert diag.valuations == [1, AtLeast(7)]
    assert diag.residual_is_pure_power


def test_charpoly_no_deformation_is_pure_power():
    system = _system(
        [{(2, 0): {(0,): 1}}, {(0, 2): {(0,): 1}}], 2, 1, 4
    )
    lift, _, _ = _lift(system)
    for diag in char_poly_diagnostics(lift):
        assert diag.residual_is_pure_power
        assert all(isinstance(v, AtLeast) for v in diag.valuations)
