"""Numeric root-continuity laboratory over complex floating point.

Univariate: roots of a monic polynomial, recomputed under random coefficient
perturbations, are counted inside fixed discs around the unperturbed roots.
Multivariate: a perturbed polynomial system is solved through a
pivot-tolerant numeric Buchberger run and the joint-eigenvalue
decomposition; the multiplicities of the zeros inside a polydisc around the
distinguished point are summed and compared with the multiplicity of the
unperturbed point.

Perturbations are uniform samples from a delta-disc applied to every
coefficient up to each generator's degree, so the leading structure is not
protected; trials that degenerate (no finite quotient, failed commutation,
unresolvable clusters) are resampled within a fixed budget and reported.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .borderbasis import BorderBasis, MultiplicationMatrices
from .errors import (
    AmbiguousClusters,
    DegenerateSystem,
    DiscsOverlap,
    NotZeroDimensional,
    ShapeError,
)
from .localzero import (
    DEFAULT_CLUSTER_GAP,
    ZeroWithMultiplicity,
    _link_clusters,
    relative_residual,
    stickelberger_decompose,
)
from .polynomials import (
    OrderIdeal,
    Polynomial,
    grevlex_key,
    monomial_degree,
    monomials_of_degree,
)

INFINITY_TOL = 1e-8
from .scalars import ComplexField

RESAMPLE_BUDGET_FACTOR = 10
COMMUTATION_GATE = 1e-8
RESIDUAL_GATE = 1e-6
DEFAULT_PIVOT_TOL = 1e-10


@dataclass
class PerturbationExperiment:
    """A seeded local root-count conservation experiment."""

    base_system: list  # Polynomials over a ComplexField domain
    base_point: tuple
    r: int
    epsilon: float
    delta: float
    trials: int
    seed: int
    cluster_gap: float = DEFAULT_CLUSTER_GAP
    pivot_tol: float = DEFAULT_PIVOT_TOL

    def __post_init__(self):
        if self.epsilon <= 0 or self.delta < 0:
            raise ShapeError("need epsilon > 0 and delta >= 0")


@dataclass
class TrialRecord:
    """One perturbation trial: the zeros found and the disc bookkeeping."""

    index: int
    zeros: list
    sum_inside: int
    global_sum: int
    resamples: int = 0
    per_disc_counts: list | None = None

    def to_json_dict(self):
        return {
            "trial": self.index,
            "zeros": [z.to_json_dict() for z in self.zeros],
            "sumInside": self.sum_inside,
            "globalSum": self.global_sum,
            "resamples": self.resamples,
            **(
                {"perDiscCounts": self.per_disc_counts}
                if self.per_disc_counts is not None
                else {}
            ),
        }


@dataclass
class CountReport:
    """Aggregate of all trials of one experiment."""

    kind: str
    expected: int | list
    epsilon: float
    delta: float
    seed: int
    center: tuple | list
    trials: list = field(default_factory=list)
    verdict: bool = True
    resamples_total: int = 0

    def to_json_dict(self):
        return {
            "kind": self.kind,
            "expected": self.expected,
            "eps": self.epsilon,
            "delta": self.delta,
            "seed": self.seed,
            "center": _points_to_json(self.center),
            "trials": [t.to_json_dict() for t in self.trials],
            "resamplesTotal": self.resamples_total,
            "verdict": "PASS" if self.verdict else "FAIL",
        }


def _points_to_json(pts):
    if isinstance(pts, tuple):
        return [[complex(c).real, complex(c).imag] for c in pts]
    return [[[complex(c).real, complex(c).imag] for c in p] for p in pts]


def _thread_count():
    try:
        return max(1, int(os.environ.get("HENSELBEZ_THREADS", "1")))
    except ValueError:
        return 1


def _disc_sample(rng, radius):
    """Uniform sample from the closed complex disc of the given radius."""
    r = radius * math.sqrt(rng.uniform(0.0, 1.0))
    theta = rng.uniform(0.0, 2.0 * math.pi)
    return r * complex(math.cos(theta), math.sin(theta))


# ---------------------------------------------------------------------------
# univariate continuity
# ---------------------------------------------------------------------------


def companion_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots of a monic polynomial given by ascending coefficients
    [a_0, ..., a_{d-1}, 1], as companion-matrix eigenvalues."""
    d = len(coeffs) - 1
    if d == 0:
        return np.array([], dtype=complex)
    if d == 1:
        return np.array([-coeffs[0]], dtype=complex)
    comp = np.zeros((d, d), dtype=complex)
    comp[1:, :-1] = np.eye(d - 1)
    comp[:, -1] = -np.asarray(coeffs[:-1], dtype=complex)
    return np.linalg.eigvals(comp)


def _ascending_coeffs(p: Polynomial) -> np.ndarray:
    if p.nvars != 1:
        raise ShapeError("univariate continuity needs a one-variable polynomial")
    d = p.total_degree()
    if d < 1:
        raise ShapeError("need degree at least 1")
    out = np.zeros(d + 1, dtype=complex)
    for (e,), c in p.terms.items():
        out[e] = complex(c)
    lead = out[d]
    if abs(lead - 1.0) > 1e-12:
        raise ShapeError("polynomial must be monic")
    return out


def univariate_continuity(
    p: Polynomial,
    epsilon: float,
    delta: float,
    trials: int,
    seed: int,
    cluster_gap: float = DEFAULT_CLUSTER_GAP,
) -> CountReport:
    """Perturb the non-leading coefficients inside the delta-disc and check
    that every disc around a distinct root keeps its root count.

    The distinct roots and their multiplicities come from clustering the
    companion eigenvalues of the unperturbed polynomial; the eps-discs must
    be pairwise disjoint.
    """
    coeffs = _ascending_coeffs(p)
    base_roots = companion_roots(coeffs)
    clusters = _link_clusters(base_roots, cluster_gap)
    centers = [complex(np.mean(base_roots[idx])) for idx in clusters]
    mults = [len(idx) for idx in clusters]
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            if abs(centers[i] - centers[j]) < 2.0 * epsilon:
                raise DiscsOverlap(
                    f"roots {centers[i]} and {centers[j]} have overlapping eps-discs"
                )

    report = CountReport(
        kind="univariate",
        expected=mults,
        epsilon=epsilon,
        delta=delta,
        seed=seed,
        center=tuple(centers),
    )
    d = len(coeffs) - 1
    for t in range(trials):
        rng = np.random.default_rng([seed & 0x7FFFFFFF, t])
        perturbed = coeffs.copy()
        for k in range(d):
            perturbed[k] += _disc_sample(rng, delta)
        roots = companion_roots(perturbed)
        counts = [0] * len(centers)
        zeros = []
        for root in roots:
            dists = [abs(root - c) for c in centers]
            j = int(np.argmin(dists))
            if dists[j] < epsilon:
                counts[j] += 1
                zeros.append(ZeroWithMultiplicity(point=(complex(root),), multiplicity=1))
        ok = counts == mults
        record = TrialRecord(
            index=t,
            zeros=zeros,
            sum_inside=sum(counts),
            global_sum=d,
            per_disc_counts=counts,
        )
        report.trials.append(record)
        if not ok:
            report.verdict = False
    return report


# ---------------------------------------------------------------------------
# numeric elimination (Macaulay nullspace)
# ---------------------------------------------------------------------------
#
# The perturbed systems mix scales badly (tiny leading coefficients create
# zeros near infinity), so sequential term rewriting amplifies rounding
# multiplicatively.  One orthogonal elimination of the Macaulay matrix is
# backward stable instead: its nullspace carries the functionals of the
# quotient, a division-closed row selection gives the quotient basis, and
# every border rule is a single linear solve against that basis.


def _macaulay_nullspace(system, t, ptol):
    """Monomials of degree <= t and an orthonormal basis of the functionals
    annihilating every generator multiple of degree <= t."""
    nvars = system[0].nvars
    monos = []
    for d in range(t + 1):
        monos.extend(sorted(monomials_of_degree(nvars, d), key=grevlex_key))
    index = {m: i for i, m in enumerate(monos)}
    rows = []
    for f in system:
        df = f.total_degree()
        if df > t:
            continue
        for d in range(t - df + 1):
            for shift in monomials_of_degree(nvars, d):
                row = np.zeros(len(monos), dtype=complex)
                for e, c in f.terms.items():
                    row[index[tuple(a + b for a, b in zip(shift, e))]] = complex(c)
                rows.append(row)
    if not rows:
        return monos, np.eye(len(monos), dtype=complex)
    mat = np.array(rows)
    _, svals, vh = np.linalg.svd(mat)
    smax = svals[0] if len(svals) else 0.0
    cutoff = ptol * max(smax, 1.0e-300)
    nkeep = int(np.sum(svals > cutoff))
    kernel = vh[nkeep:].conj().T  # columns: orthonormal kernel functionals
    return monos, kernel


def _select_quotient_basis(monos, kernel, max_degree, floor=1e-10):
    """Greedy division-closed row selection, best-conditioned first.

    Walks the candidate monomials (all one-step divisors already selected),
    always taking the row with the largest component orthogonal to the
    selected span; gives up when no candidate clears the floor.
    """
    index = {m: i for i, m in enumerate(monos)}
    dim = kernel.shape[1]
    nvars = len(monos[0])
    selected: list = []
    selected_set = set()
    qbasis: list = []
    candidates = {(0,) * nvars}
    while len(selected) < dim:
        best = None
        best_score = floor
        best_res = None
        for m in sorted(candidates, key=grevlex_key):
            if monomial_degree(m) > max_degree:
                continue
            v = kernel[index[m]].copy()
            for q in qbasis:
                v -= np.vdot(q, v) * q
            score = float(np.linalg.norm(v))
            if score > best_score:
                best, best_score, best_res = m, score, v
        if best is None:
            raise NotZeroDimensional(
                "no well-conditioned division-closed quotient basis"
            )
        candidates.discard(best)
        selected.append(best)
        selected_set.add(best)
        qbasis.append(best_res / np.linalg.norm(best_res))
        for i in range(nvars):
            up = best[:i] + (best[i] + 1,) + best[i + 1 :]
            downs = [
                up[:k] + (up[k] - 1,) + up[k + 1 :]
                for k in range(nvars)
                if up[k] > 0
            ]
            if all(d in selected_set for d in downs):
                candidates.add(up)
    return selected


def numeric_border_basis(system: list, domain: ComplexField, ptol: float = DEFAULT_PIVOT_TOL):
    """Border basis of a numerically zero-dimensional complex system, via
    Macaulay elimination with the relative pivot tolerance.

    The working degree grows from the generic bound until the nullspace
    dimension stabilizes across two consecutive degrees.
    """
    nvars = system[0].nvars
    degrees = [g.total_degree() for g in system]
    if any(d < 1 for d in degrees):
        raise NotZeroDimensional("constant generator (unit ideal or zero)")
    t0 = max(max(degrees), sum(degrees) - nvars + 1, 1)
    chosen = None
    for t in range(t0, t0 + 4):
        monos_lo, kern_lo = _macaulay_nullspace(system, t, ptol)
        monos_hi, kern_hi = _macaulay_nullspace(system, t + 1, ptol)
        if kern_lo.shape[1] >= 1 and kern_lo.shape[1] == kern_hi.shape[1]:
            chosen = (t, monos_hi, kern_hi)
            break
    if chosen is None:
        raise NotZeroDimensional("nullspace dimension did not stabilize")
    t, monos, kernel = chosen
    index = {m: i for i, m in enumerate(monos)}
    selected = _select_quotient_basis(monos, kernel, max_degree=t)
    oi = OrderIdeal(nvars, selected)
    nb = np.array([kernel[index[m]] for m in oi.monomials])
    rules = {}
    for beta in oi.border:
        coords = np.linalg.solve(nb.T, kernel[index[beta]])
        rules[beta] = [complex(c) for c in coords]
    return BorderBasis(oi, rules, domain, certified=False)


def _random_unitary(rng, size: int) -> np.ndarray:
    gauss = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    q, r = np.linalg.qr(gauss)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def _chart_system(system, degrees, unitary, domain):
    """The system rewritten in a random projective chart.

    Each generator is homogenized to its degree, the homogeneous coordinates
    are mixed by the unitary, and the first new coordinate is set to one.
    In the new chart every zero is O(1) with probability one, which keeps
    the elimination well conditioned even when tiny leading perturbations
    push zeros of the original chart out toward infinity.
    """
    n = system[0].nvars
    forms = []
    for j in range(n + 1):
        terms = {(0,) * n: complex(unitary[j, 0])}
        for k in range(n):
            e = tuple(1 if t == k else 0 for t in range(n))
            terms[e] = complex(unitary[j, k + 1])
        forms.append(Polynomial.from_terms(domain, n, terms))
    out = []
    for g, d in zip(system, degrees):
        acc = Polynomial.zero(domain, n)
        for e, c in g.terms.items():
            term = Polynomial.constant(domain, n, complex(c))
            for _ in range(d - monomial_degree(e)):
                term = term * forms[0]
            for j, ej in enumerate(e):
                for _ in range(ej):
                    term = term * forms[j + 1]
            acc = acc + term
        out.append(acc)
    return out


def _map_back(unitary, point):
    """Original affine coordinates of a chart zero, or None at infinity."""
    w = np.concatenate(([1.0 + 0j], np.asarray(point, dtype=complex)))
    z = unitary @ w
    if abs(z[0]) <= INFINITY_TOL * np.linalg.norm(z):
        return None
    return tuple(complex(c) for c in z[1:] / z[0])


def _commutation_scale_ok(mm: MultiplicationMatrices) -> bool:
    mats = [np.array(m, dtype=complex) for m in mm.matrices]
    for j in range(len(mats)):
        for i in range(j):
            lhs = mats[i] @ mats[j] - mats[j] @ mats[i]
            scale = 1.0 + np.linalg.norm(mats[i], np.inf) * np.linalg.norm(
                mats[j], np.inf
            )
            if np.max(np.abs(lhs)) > COMMUTATION_GATE * scale:
                return False
    return True


# ---------------------------------------------------------------------------
# local root-count conservation
# ---------------------------------------------------------------------------


def _perturb(system, degrees, rng, delta, domain):
    out = []
    for g, d in zip(system, degrees):
        terms = dict(g.terms)
        for deg in range(d + 1):
            for e in monomials_of_degree(g.nvars, deg):
                terms[e] = terms.get(e, 0j) + _disc_sample(rng, delta)
        out.append(Polynomial.from_terms(domain, g.nvars, terms))
    return out


def _run_trial(exp: PerturbationExperiment, domain, degrees, t: int):
    """One perturbation trial with resampling; returns a TrialRecord."""
    budget = RESAMPLE_BUDGET_FACTOR
    bezout = math.prod(degrees)
    for attempt in range(budget):
        rng = np.random.default_rng([exp.seed & 0x7FFFFFFF, t, attempt])
        perturbed = _perturb(exp.base_system, degrees, rng, exp.delta, domain)
        unitary = _random_unitary(rng, exp.base_system[0].nvars + 1)
        chart = _chart_system(perturbed, degrees, unitary, domain)
        try:
            bb = numeric_border_basis(chart, domain, exp.pivot_tol)
            if bb.dimension != bezout:
                continue
            mm = bb.multiplication_matrices()
            if not _commutation_scale_ok(mm):
                continue
            chart_zeros = stickelberger_decompose(
                mm,
                seed=(exp.seed * 1000003 + t * 1009 + attempt) & 0x7FFFFFFF,
                cluster_gap=exp.cluster_gap,
                system=chart,
            )
        except (NotZeroDimensional, AmbiguousClusters, np.linalg.LinAlgError):
            continue
        if any(z.residual > RESIDUAL_GATE for z in chart_zeros):
            continue
        zeros = []
        healthy = True
        for z in chart_zeros:
            point = _map_back(unitary, z.point)
            if point is None:
                continue  # a zero of the projective closure, not an affine one
            residual = max(relative_residual(g, point) for g in perturbed)
            if residual > RESIDUAL_GATE:
                healthy = False
                break
            zeros.append(
                ZeroWithMultiplicity(
                    point=point, multiplicity=z.multiplicity, residual=residual
                )
            )
        if not healthy:
            continue
        zeros.sort(key=lambda z: tuple((c.real, c.imag) for c in z.point))
        inside = 0
        for z in zeros:
            if all(
                abs(c - p) < exp.epsilon for c, p in zip(z.point, exp.base_point)
            ):
                inside += z.multiplicity
        return TrialRecord(
            index=t,
            zeros=zeros,
            sum_inside=inside,
            global_sum=sum(z.multiplicity for z in zeros),
            resamples=attempt,
        )
    raise DegenerateSystem(
        f"trial {t} kept degenerating after {budget} resamples"
    )


def local_bezout_count(exp: PerturbationExperiment) -> CountReport:
    """Per trial: solve the perturbed system numerically and sum the
    multiplicities of its zeros inside the polydisc around the base point;
    the verdict passes when every trial conserves the expected count."""
    domain = exp.base_system[0].domain
    if getattr(domain, "is_exact", True):
        raise ShapeError("local_bezout_count expects a complex-float system")
    for g in exp.base_system:
        res = relative_residual(g, exp.base_point)
        if res > RESIDUAL_GATE:
            raise ShapeError(f"base point is not a zero (residual {res:.2e})")
    degrees = [g.total_degree() for g in exp.base_system]

    report = CountReport(
        kind="local_bezout",
        expected=exp.r,
        epsilon=exp.epsilon,
        delta=exp.delta,
        seed=exp.seed,
        center=tuple(exp.base_point),
    )
    threads = _thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(
                pool.map(
                    lambda t: _run_trial(exp, domain, degrees, t), range(exp.trials)
                )
            )
    else:
        records = [_run_trial(exp, domain, degrees, t) for t in range(exp.trials)]
    for rec in records:
        report.trials.append(rec)
        report.resamples_total += rec.resamples
        if rec.sum_inside != exp.r:
            report.verdict = False
    return report


def cluster_charpoly_bound(report: CountReport, var_index: int) -> bool:
    """Coefficient bounds of the in-disc cluster polynomial in one variable:
    |coefficient of T^(r-j)| <= binomial(r, j) * eps^j for every trial.

    Assumes the report's center is the origin and every trial conserved the
    count (the product over in-disc zeros is then monic of degree r).
    """
    eps = report.epsilon
    for rec in report.trials:
        coords = []
        for z in rec.zeros:
            if all(abs(c - p) < eps for c, p in zip(z.point, report.center)):
                coords.extend([complex(z.point[var_index])] * z.multiplicity)
        poly = np.array([1.0 + 0j])
        for root in coords:
            poly = np.convolve(poly, np.array([1.0 + 0j, -root]))
        r = len(coords)
        for j in range(1, r + 1):
            if abs(poly[j]) > math.comb(r, j) * (eps**j) + 1e-12:
                return False
    return True
