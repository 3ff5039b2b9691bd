"""Acceptance suite: one test per criterion, each at its stated tolerance
and runtime budget, printing one PASS line when it holds.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.
"""

import json
import random
import time
from fractions import Fraction

import pytest

from conftest import cc_poly, deformed_poly, qq_poly, random_poly, random_zero_dim_system
from henselbez.borderbasis import BorderBasis, from_groebner
from henselbez.cli import main as cli_main
from henselbez.continuity import (
    PerturbationExperiment,
    cluster_charpoly_bound,
    local_bezout_count,
    univariate_continuity,
)
from henselbez.groebner import (
    buchberger,
    local_multiplicity_truncation,
    normal_form,
    quotient_staircase,
)
from henselbez.hensel import (
    DeformedSystem,
    char_poly_diagnostics,
    lift_border_basis,
    localize_residual,
    verify_lift,
)
from henselbez.localzero import multiplicity_at_origin, stickelberger_decompose
from henselbez.polynomials import Polynomial
from henselbez.scalars import QQ, AtLeast, ComplexField, SeriesRing


def _report(criterion, detail):
    print(f"[criterion {criterion}] PASS: {detail}")


def _deformed(gens_terms, nvars, mvars, precision):
    ring = SeriesRing(QQ, mvars, precision)
    return DeformedSystem(
        [deformed_poly(t, ring, nvars) for t in gens_terms], ring, nvars
    )


CORPUS_DEFORMATIONS = {
    "shift": ([{(2,): {(0,): 1}, (1,): {(1,): -1}}], 1, 1, 8),
    "cubic": ([{(2,): {(0,): 1}, (3,): {(0,): -1}, (0,): {(1,): -1}}], 1, 1, 8),
    "two_vars": (
        [
            {(2, 0): {(0, 0): 1}, (0, 0): {(1, 0): 1}},
            {(0, 2): {(0, 0): 1}, (0, 0): {(0, 1): 1}},
        ],
        2,
        2,
        6,
    ),
    "cusp_pair": (
        [
            {(2, 0): {(0, 0): 1}, (0, 3): {(0, 0): -1}, (0, 0): {(1, 0): 1}},
            {(0, 2): {(0, 0): 1}, (0, 0): {(0, 1): 1}},
        ],
        2,
        2,
        6,
    ),
    "nonlocal_pair": (
        [
            {(2, 0): {(0, 0): 1}, (3, 0): {(0, 0): -1}, (0, 1): {(1, 0): 1}},
            {(0, 2): {(0, 0): 1}, (1, 0): {(0, 1): -1}},
        ],
        2,
        2,
        5,
    ),
}


def _corpus_lifts():
    for name, spec in CORPUS_DEFORMATIONS.items():
        system = _deformed(*spec)
        bb0, loc = localize_residual(system.residual())
        yield name, system, lift_border_basis(system, bb0, loc)


def test_criterion_1_border_basis_correctness():
    """50 random zero-dimensional systems: exact commutation and agreement
    of matrix normal forms with the oracle on 100 random polynomials each."""
    budget = 60.0
    start = time.time()
    rng = random.Random(12345)
    for _ in range(50):
        nvars = rng.choice([1, 2, 2, 3, 3])
        system = random_zero_dim_system(rng, nvars, max_degree=3)
        gb = buchberger(system)
        bb = from_groebner(gb)
        assert bb.certified  # exact commutation, zero tolerance
        for _ in range(100):
            p = random_poly(rng, nvars, 3, max_terms=5)
            coords = bb.normal_form(p)
            as_poly = Polynomial.from_terms(
                QQ, nvars, {m: c for m, c in zip(bb.order_ideal.monomials, coords)}
            )
            assert as_poly == normal_form(p, gb)
    elapsed = time.time() - start
    assert elapsed < budget
    _report(1, f"50 systems x 100 normal forms, exact agreement, {elapsed:.1f}s")


def test_criterion_2_commutation_criterion_both_directions():
    """20 mutations of each of 10 certified bases either break commutation
    or define a quotient of unchanged dimension (verified via the oracle)."""
    rng = random.Random(98765)
    bases = []
    while len(bases) < 10:
        nvars = rng.randint(2, 3)
        bb = from_groebner(buchberger(random_zero_dim_system(rng, nvars)))
        if bb.dimension >= 2:
            bases.append(bb)
    holds = 0
    trials = 0
    for bb in bases:
        betas = sorted(bb.rules)
        for _ in range(20):
            trials += 1
            beta = rng.choice(betas)
            slot = rng.randrange(bb.dimension)
            rules = {b: list(row) for b, row in bb.rules.items()}
            rules[beta][slot] += Fraction(rng.randint(1, 4), rng.randint(1, 3))
            candidate = BorderBasis(bb.order_ideal, rules, QQ)
            if not candidate.certify():
                holds += 1
                continue
            gb = buchberger(candidate.rule_polynomials())
            if quotient_staircase(gb).dimension == bb.dimension:
                holds += 1
    assert trials == 200 and holds == trials
    _report(2, f"disjunction held in {holds}/{trials} mutation trials")


def test_criterion_3_multiplicity_agreement():
    """Eigenspace multiplicity equals the truncation oracle exactly on the
    fixed corpus and on 20 random isolated-origin systems."""
    corpus = [
        ([qq_poly({(2, 0): 1}, 2), qq_poly({(0, 2): 1}, 2)], 4),
        ([qq_poly({(2, 0): 1, (0, 3): -1}, 2), qq_poly({(0, 2): 1}, 2)], 4),
        ([qq_poly({(2,): 1, (3,): -1}, 1)], 2),
        ([qq_poly({(1,): 1}, 1)], 1),
    ]
    for system, expected in corpus:
        assert multiplicity_at_origin(system) == expected
        est = local_multiplicity_truncation(system)
        assert est is not None and est.r == expected
    rng = random.Random(777)
    for _ in range(20):
        nvars = rng.randint(1, 3)
        max_degree = 3 if nvars <= 2 else 2
        system = random_zero_dim_system(rng, nvars, max_degree, origin_zero=True)
        r = multiplicity_at_origin(system)
        est = local_multiplicity_truncation(system, nmax=r + 2)
        assert est is not None and est.r == r
    _report(3, "corpus and 20 random systems agree exactly")


def _oracle_cubic_series(precision):
    """Fixed point of the symbolic rewrite x^2 <- x*(rule) + v over plain
    coefficient lists (independent of the package's series type)."""
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
    assert u1 == add(u0, mul(u1, u1)) and u0 == add(v, mul(u1, u0))
    return u0, u1


def test_criterion_4_hensel_lift_golden():
    """The cubic deformation at precision 8 matches the independently
    computed fixed-point series coefficient-for-coefficient; all five lift
    checks pass; under 5 seconds."""
    budget = 5.0
    start = time.time()
    spec = CORPUS_DEFORMATIONS["cubic"]
    system = _deformed(*spec)
    bb0, loc = localize_residual(system.residual())
    lift = lift_border_basis(system, bb0, loc)
    u0, u1 = lift.base.rules[(2,)]
    oracle_u0, oracle_u1 = _oracle_cubic_series(8)
    for k in range(9):
        assert u0.coeffs.get((k,), Fraction(0)) == oracle_u0[k]
        assert u1.coeffs.get((k,), Fraction(0)) == oracle_u1[k]
    # leading coefficients, frozen from the oracle (Fuss-Catalan numbers)
    assert [oracle_u1[k] for k in range(1, 5)] == [1, 2, 7, 30]
    assert [oracle_u0[k] for k in range(1, 5)] == [1, 1, 3, 12]
    report = verify_lift(lift)
    assert report.generators_reduce_to_zero
    assert report.matrices_commute
    assert report.residual_matches
    assert report.det_unit_at_origin
    assert report.rank_witness
    elapsed = time.time() - start
    assert elapsed < budget
    _report(4, f"rule series match the oracle through order 8, {elapsed:.2f}s")


def test_criterion_5_lift_verification_identity():
    """Every deformed generator of every corpus deformation reduces to the
    zero vector under the lifted rules at full precision, exactly."""
    for name, system, lift in _corpus_lifts():
        ring = lift.base.domain
        for g in system.generators:
            coords = lift.base.normal_form(g)
            assert all(ring.is_zero(c) for c in coords), name
    _report(5, f"{len(CORPUS_DEFORMATIONS)} deformations reduce to zero exactly")


def test_criterion_6_residual_characteristic_polynomials():
    """Every lifted matrix has residual characteristic polynomial equal to
    the pure power, and every coefficient has deformation order >= 1."""
    for name, system, lift in _corpus_lifts():
        for diag in char_poly_diagnostics(lift):
            assert diag.residual_is_pure_power, name
            assert diag.valuation_at_least_one, name
            for v in diag.valuations:
                assert isinstance(v, AtLeast) or v >= 1
    _report(6, "all residual characteristic polynomials are pure powers")


def test_criterion_7_univariate_continuity():
    """Y^3 - Y^2 at eps 0.3, delta 1e-6: 500 seeded trials, every one with
    2 roots near 0 and 1 near 1; under 10 seconds."""
    budget = 10.0
    start = time.time()
    p = cc_poly({(3,): 1, (2,): -1}, 1)
    report = univariate_continuity(p, epsilon=0.3, delta=1e-6, trials=500, seed=424242)
    assert report.verdict
    by_center = dict(zip((round(c.real) for c in report.center), report.expected))
    assert by_center == {0: 2, 1: 1}
    for trial in report.trials:
        assert trial.per_disc_counts == report.expected
    elapsed = time.time() - start
    assert elapsed < budget
    _report(7, f"500/500 trials preserved (2 near 0, 1 near 1), {elapsed:.1f}s")


@pytest.mark.parametrize(
    "name,terms,nvars,point,r,eps,delta",
    [
        ("squares", [{(2, 0): 1}, {(0, 2): 1}], 2, (0j, 0j), 4, 0.1, 1e-4),
        (
            "cusp",
            [{(2, 0): 1, (0, 3): -1}, {(0, 2): 1}],
            2,
            (0j, 0j),
            4,
            0.2,
            1e-6,
        ),
        ("cubic", [{(2,): 1, (3,): -1}], 1, (0j,), 2, 0.1, 1e-6),
    ],
)
def test_criterion_8_local_bezout_count(name, terms, nvars, point, r, eps, delta):
    """200 trials per system: the multiplicities inside the polydisc sum to
    the unperturbed multiplicity in every trial, and the cluster
    characteristic-polynomial bounds hold; under 60 seconds each."""
    budget = 60.0
    start = time.time()
    system = [cc_poly(t, nvars) for t in terms]
    exp = PerturbationExperiment(
        base_system=system,
        base_point=point,
        r=r,
        epsilon=eps,
        delta=delta,
        trials=200,
        seed=1234,
    )
    report = local_bezout_count(exp)
    assert report.verdict
    conserved = sum(1 for t in report.trials if t.sum_inside == r)
    assert conserved == 200
    for i in range(nvars):
        assert cluster_charpoly_bound(report, i)
    elapsed = time.time() - start
    assert elapsed < budget
    _report(8, f"{name}: 200/200 trials conserved r={r}, bounds hold, {elapsed:.1f}s")


def test_criterion_9_stickelberger_conservation():
    """On every numeric decomposition the multiplicities sum exactly to the
    quotient dimension."""
    checked = 0
    rng = random.Random(3141)
    cc = ComplexField()
    from henselbez.borderbasis import MultiplicationMatrices

    for _ in range(15):
        nvars = rng.randint(1, 2)
        bb = from_groebner(buchberger(random_zero_dim_system(rng, nvars)))
        mats = [
            [[complex(x) for x in row] for row in m]
            for m in bb.multiplication_matrices().matrices
        ]
        zeros = stickelberger_decompose(
            MultiplicationMatrices(mats, bb.order_ideal, cc),
            seed=rng.randint(0, 10**6),
        )
        assert sum(z.multiplicity for z in zeros) == bb.dimension
        checked += 1
    # and across perturbation trials, against the perturbed dimension
    exp = PerturbationExperiment(
        base_system=[cc_poly({(2, 0): 1}, 2), cc_poly({(0, 2): 1}, 2)],
        base_point=(0j, 0j),
        r=4,
        epsilon=0.1,
        delta=1e-4,
        trials=20,
        seed=55,
    )
    for trial in local_bezout_count(exp).trials:
        assert sum(z.multiplicity for z in trial.zeros) == trial.global_sum
        checked += 1
    _report(9, f"{checked} decompositions conserve the dimension exactly")


def test_criterion_10_cli_determinism(tmp_path, capsys):
    """Five repetitions of every subcommand with fixed seeds produce
    byte-identical JSON."""
    (tmp_path / "x2y2.txt").write_text("QQ 2 0\nx^2\ny^2\n")
    (tmp_path / "cubic.txt").write_text("QQ[[v]] 1 1 8\nx^2 - x^3 - v\n")
    commands = [
        ["borderbasis", str(tmp_path / "x2y2.txt")],
        ["multiplicity", str(tmp_path / "x2y2.txt")],
        ["split", str(tmp_path / "x2y2.txt")],
        ["lift", "--input", str(tmp_path / "cubic.txt"), "--precision", "6"],
        ["verify", "--input", str(tmp_path / "cubic.txt"), "--precision", "6"],
        [
            "count",
            "--system",
            str(tmp_path / "x2y2.txt"),
            "--eps",
            "0.1",
            "--delta",
            "1e-4",
            "--trials",
            "5",
            "--seed",
            "2718",
        ],
        ["oracle", "multiplicity", str(tmp_path / "x2y2.txt")],
    ]
    for argv in commands:
        outputs = set()
        for _ in range(5):
            code = cli_main(argv)
            out = capsys.readouterr().out
            assert code == 0
            json.loads(out)  # well-formed
            outputs.add(out.encode("utf-8"))
        assert len(outputs) == 1, argv
    _report(10, f"{len(commands)} subcommands byte-identical across 5 runs")
