"""Shared builders for the test suite."""

import random
from fractions import Fraction

import pytest

from henselbez.polynomials import Polynomial, monomials_of_degree
from henselbez.scalars import QQ, ComplexField, SeriesRing


def qq_poly(terms, nvars):
    """Polynomial over QQ from an {exponent: number} map."""
    return Polynomial.from_terms(
        QQ, nvars, {tuple(e): Fraction(c) for e, c in terms.items()}
    )


def cc_poly(terms, nvars, tol=1e-9):
    dom = ComplexField(tol)
    return Polynomial.from_terms(
        dom, nvars, {tuple(e): complex(c) for e, c in terms.items()}
    )


def deformed_poly(terms, ring, nvars):
    """Polynomial over a series ring from {xexp: {vexp: number}}."""
    out = {}
    for xexp, series in terms.items():
        out[tuple(xexp)] = ring.from_coeffs(
            {tuple(ve): Fraction(c) for ve, c in series.items()}
        )
    return Polynomial.from_terms(ring, nvars, out)


def random_rational(rng, bound=4):
    num = rng.randint(-bound, bound)
    den = rng.randint(1, bound)
    return Fraction(num, den)


def random_poly(rng, nvars, max_degree, max_terms=6, include_constant=True):
    """Random nonzero polynomial over QQ."""
    while True:
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            deg = rng.randint(0 if include_constant else 1, max_degree)
            choices = list(monomials_of_degree(nvars, deg))
            exp = rng.choice(choices)
            terms[exp] = terms.get(exp, Fraction(0)) + random_rational(rng)
        p = Polynomial.from_terms(QQ, nvars, terms)
        if not p.is_zero():
            return p


def random_zero_dim_system(rng, nvars, max_degree=3, origin_zero=False):
    """One generator per variable, each led by a pure power, so the quotient
    is finite; with origin_zero the lower-order part has no constant term."""
    system = []
    for i in range(nvars):
        d = rng.randint(1, max_degree)
        lead = tuple(d if j == i else 0 for j in range(nvars))
        terms = {lead: Fraction(1)}
        for _ in range(rng.randint(0, 4)):
            deg = rng.randint(0 if not origin_zero else 1, max(d - 1, 1 if origin_zero else 0))
            if deg >= d:
                continue
            if deg == 0 and origin_zero:
                continue
            exp = rng.choice(list(monomials_of_degree(nvars, deg)))
            terms[exp] = terms.get(exp, Fraction(0)) + random_rational(rng)
        if terms.get(lead) == 0:
            terms[lead] = Fraction(1)
        system.append(Polynomial.from_terms(QQ, nvars, terms))
    return system


@pytest.fixture
def rng():
    return random.Random(20240817)


def series_ring(num_vars=1, precision=8):
    return SeriesRing(QQ, num_vars, precision)
