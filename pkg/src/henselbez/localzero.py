"""Analysis of the residual algebra at the origin: local multiplicity,
idempotent splitting of the local factor, and the joint-eigenvalue
decomposition of a finite quotient into zeros with multiplicities.

Over an exact field, the local factor at the origin is the joint
generalized 0-eigenspace of the multiplication matrices; its dimension is
the multiplicity, and the projector onto it along the span of the matrix
images is multiplication by an idempotent of the quotient.  Over complex
floats, a seeded generic combination of the matrices separates the zeros,
whose coordinates are recovered on cluster-invariant subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import schur

from . import linalg
from .borderbasis import BorderBasis, MultiplicationMatrices, from_groebner
from .errors import (
    AmbiguousClusters,
    NotIsolated,
    NotZeroDimensional,
    OriginNotAZero,
    UnsupportedScalar,
)
from .groebner import buchberger, local_multiplicity_truncation
from .polynomials import Polynomial


@dataclass
class LocalFactorReport:
    """Idempotent splitting data of the local factor at the origin."""

    r: int
    idempotent_coords: list
    nil_index: int
    local_basis_rows: list
    order_ideal: object
    domain: object


@dataclass
class ZeroWithMultiplicity:
    """A numeric zero (cluster center) with its algebraic multiplicity."""

    point: tuple
    multiplicity: int
    residual: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "point": [[z.real, z.imag] for z in self.point],
            "multiplicity": self.multiplicity,
            "residual": self.residual,
        }


def _check_origin_is_zero(system):
    dom = system[0].domain
    for f in system:
        if not dom.is_zero(f.constant_coefficient()):
            raise OriginNotAZero("a generator has nonzero constant term")


def _try_global_matrices(system, order="grevlex"):
    """(border basis, matrices) of the full quotient, or None if not 0-dim."""
    try:
        bb = from_groebner(buchberger(system, order))
    except NotZeroDimensional:
        return None
    return bb, bb.multiplication_matrices()


def _joint_nilpotent_kernel(dom, mats, power):
    """Basis of the intersection of the kernels of each matrix to the given power."""
    stacked = []
    for m in mats:
        stacked.extend(linalg.mat_pow(dom, m, power))
    return linalg.nullspace(dom, stacked)


def multiplicity_at_origin(system: list, nmax: int = 12) -> int:
    """Dimension of the joint generalized 0-eigenspace of the multiplication
    matrices (the local multiplicity of the origin).

    Falls back to the truncation oracle when the global quotient is not
    finite-dimensional but the origin is still isolated.
    """
    _check_origin_is_zero(system)
    built = _try_global_matrices(system)
    if built is None:
        est = local_multiplicity_truncation(system, nmax=nmax)
        if est is None:
            raise NotIsolated("origin is not isolated (no stabilization)")
        return est.r
    _, mm = built
    dom = mm.domain
    d = mm.dimension
    kern = _joint_nilpotent_kernel(dom, mm.matrices, d)
    r = len(kern)
    if r == 0:
        raise OriginNotAZero("origin carries no local factor")
    return r


def split_idempotent(system: list) -> LocalFactorReport:
    """Projector data of the local factor at the origin, exactly over the field.

    The joint generalized 0-eigenspace V and the sum W of the images of the
    powered matrices satisfy quotient = V + W (direct); the projector onto V
    along W is multiplication by the idempotent e returned here (as its
    coordinate vector on the quotient basis).
    """
    _check_origin_is_zero(system)
    built = _try_global_matrices(system)
    if built is None:
        raise NotZeroDimensional(
            "idempotent splitting needs a finite-dimensional global quotient"
        )
    bb, mm = built
    dom = mm.domain
    d = mm.dimension
    powered = [linalg.mat_pow(dom, m, d) for m in mm.matrices]
    v_basis = linalg.nullspace(dom, [row for m in powered for row in m])
    r = len(v_basis)
    if r == 0:
        raise OriginNotAZero("origin carries no local factor")
    # column space of [M_1^d | ... | M_n^d]
    concat = [sum((m[i] for m in powered), []) for i in range(d)]
    w_basis = linalg.column_space_basis(dom, concat)
    if len(v_basis) + len(w_basis) != d:
        raise NotIsolated("kernel/image decomposition failed to split the quotient")
    cols = [list(col) for col in v_basis] + [list(col) for col in w_basis]
    change = [[cols[j][i] for j in range(d)] for i in range(d)]  # columns -> matrix
    change_inv = linalg.invert(dom, change)
    if change_inv is None:
        raise NotIsolated("kernel/image bases are not independent")
    diag = linalg.zeros(dom, d, d)
    for i in range(r):
        diag[i][i] = dom.one
    projector = linalg.mat_mul(dom, change, linalg.mat_mul(dom, diag, change_inv))

    index = bb.basis_index()
    one_col = index[(0,) * bb.nvars]
    e_coords = [projector[i][one_col] for i in range(d)]

    # the projector must be multiplication by e: rebuild it from the coordinates
    mult_e = _element_multiplication_matrix(dom, mm, e_coords, bb)
    if not linalg.mat_eq(dom, mult_e, projector):
        raise NotIsolated("projector is not a module endomorphism")

    nil_index = _nilpotency_index(dom, mm.matrices, v_basis)
    return LocalFactorReport(
        r=r,
        idempotent_coords=e_coords,
        nil_index=nil_index,
        local_basis_rows=v_basis,
        order_ideal=bb.order_ideal,
        domain=dom,
    )


def _element_multiplication_matrix(dom, mm, coords, bb: BorderBasis):
    """Matrix of multiplication by the element with the given coordinates."""
    monos = bb.order_ideal.monomials
    d = len(monos)
    out = linalg.zeros(dom, d, d)
    cache = {}

    def monomial_matrix(exp):
        m = cache.get(exp)
        if m is not None:
            return m
        if sum(exp) == 0:
            m = linalg.identity(dom, d)
        else:
            i = next(k for k, e in enumerate(exp) if e > 0)
            down = exp[:i] + (exp[i] - 1,) + exp[i + 1 :]
            m = linalg.mat_mul(dom, mm.matrices[i], monomial_matrix(down))
        cache[exp] = m
        return m

    for c, mono in zip(coords, monos):
        if dom.is_zero(c):
            continue
        mmat = monomial_matrix(mono)
        for i in range(d):
            for j in range(d):
                out[i][j] = dom.add(out[i][j], dom.mul(c, mmat[i][j]))
    return out


def _nilpotency_index(dom, mats, v_basis):
    """Smallest N with (ideal generated by the variables)^N zero on the factor."""
    space = [list(v) for v in v_basis]
    n = 0
    while space:
        n += 1
        nxt = []
        for m in mats:
            for v in space:
                nxt.append(linalg.mat_vec(dom, m, v))
        # reduce to a basis; empty when everything collapsed to zero
        if not nxt:
            break
        reduced, pivots = linalg.rref(dom, nxt)
        space = [reduced[i] for i in range(len(pivots))]
        if not pivots:
            space = []
    return n


def idempotent_polynomial(report: LocalFactorReport) -> Polynomial:
    """The idempotent as a polynomial in the ambient variables."""
    terms = {}
    for c, mono in zip(report.idempotent_coords, report.order_ideal.monomials):
        if not report.domain.is_zero(c):
            terms[mono] = c
    return Polynomial.from_terms(report.domain, report.order_ideal.nvars, terms)


# ---------------------------------------------------------------------------
# numeric joint-eigenvalue decomposition
# ---------------------------------------------------------------------------

# Engineering constants for the numeric decomposition; the cluster gap is
# relative per pair of eigenvalues, and two clusters closer than
# AMBIGUITY_FACTOR times the link threshold trigger a reseeded retry.
DEFAULT_CLUSTER_GAP = 1e-6
AMBIGUITY_FACTOR = 10.0
MAX_SEED_RETRIES = 5
GAP_LADDER_RUNGS = 6
DEFAULT_RESIDUAL_TOL = 1e-6


@dataclass
class _ClusterDiagnostics:
    centers: list = field(default_factory=list)
    min_separation: float = 0.0
    threshold: float = 0.0


def _link_clusters(values: np.ndarray, gap: float):
    """Group eigenvalues transitively by |a-b| <= gap*max(1,|a|,|b|)."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            thr = gap * max(1.0, abs(values[i]), abs(values[j]))
            if abs(values[i] - values[j]) <= thr:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _cluster_separation_ok(values: np.ndarray, clusters, gap: float):
    """Reject when two clusters nearly touch (within the safety factor)."""
    for a in range(len(clusters)):
        for b in range(a + 1, len(clusters)):
            for i in clusters[a]:
                for j in clusters[b]:
                    thr = AMBIGUITY_FACTOR * gap * max(1.0, abs(values[i]), abs(values[j]))
                    if abs(values[i] - values[j]) < thr:
                        return False, abs(values[i] - values[j]), thr
    return True, None, None


def stickelberger_decompose(
    mm: MultiplicationMatrices,
    seed: int = 0,
    cluster_gap: float = DEFAULT_CLUSTER_GAP,
    system=None,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
) -> list:
    """Zeros with multiplicities from the joint eigenstructure of commuting
    complex matrices.

    A seeded generic combination of the matrices is diagonalized; its
    eigenvalue clusters identify the zeros, each coordinate is read off the
    restriction of the corresponding matrix to the cluster-invariant
    subspace, and the cluster size is the multiplicity.  Multiplicities
    always sum to the quotient dimension.  Retries with fresh seeds on
    ambiguous clusterings, raising after MAX_SEED_RETRIES.
    """
    dom = mm.domain
    if getattr(dom, "is_exact", True):
        raise UnsupportedScalar("joint-eigenvalue decomposition needs complex floats")
    mats = [np.array(m, dtype=complex) for m in mm.matrices]
    d = mm.dimension
    n = len(mats)
    last_exc = None
    for attempt in range(MAX_SEED_RETRIES):
        rng = np.random.default_rng([seed & 0x7FFFFFFF, attempt])
        angles = rng.uniform(0.0, 2.0 * np.pi, size=n)
        coeffs = np.exp(1j * angles)
        combo = sum(c * m for c, m in zip(coeffs, mats))
        values = np.linalg.eigvals(combo)
        # a multiple zero splits its eigenvalue at roughly the backward
        # error to the power 1/multiplicity, which can dwarf the base gap;
        # widen the clustering until the extracted points actually
        # annihilate the system (first rung wins, so genuinely distinct
        # zeros are never merged when a finer clustering already works)
        for rung in range(GAP_LADDER_RUNGS):
            gap = cluster_gap * (10.0**rung)
            if gap > 0.5:
                break
            outcome = _extract_at_gap(mats, combo, values, gap, d)
            if outcome is None:
                continue
            zeros = outcome
            if system is not None:
                for zw in zeros:
                    zw.residual = max(
                        relative_residual(f, zw.point) for f in system
                    )
                if any(zw.residual > residual_tol for zw in zeros):
                    last_exc = AmbiguousClusters(
                        "cluster centers fail the residual test",
                        diagnostics={
                            "gap": gap,
                            "worst": max(z.residual for z in zeros),
                            "seed": seed,
                            "attempt": attempt,
                        },
                    )
                    continue
            zeros.sort(key=lambda z: tuple((c.real, c.imag) for c in z.point))
            return zeros
    raise last_exc if last_exc is not None else AmbiguousClusters(
        "no clustering produced consistent zeros",
        diagnostics={"seed": seed},
    )


def _extract_at_gap(mats, combo, values, gap, d):
    """Zeros from one clustering rung, or None when the clustering is not
    usable (near-touching clusters or subspace dimension mismatch)."""
    clusters = _link_clusters(values, gap)
    ok, _, _ = _cluster_separation_ok(values, clusters, gap)
    if not ok:
        return None
    zeros = []
    for idx_list in clusters:
        target = values[idx_list]

        def select(lam, target=target, thr_gap=gap):
            return bool(
                np.min(np.abs(target - lam))
                <= thr_gap * AMBIGUITY_FACTOR * max(1.0, abs(lam))
            )

        _, z, sdim = schur(combo, output="complex", sort=select)
        if sdim != len(idx_list):
            return None
        basis = z[:, :sdim]
        point = []
        for m in mats:
            restricted = basis.conj().T @ m @ basis
            point.append(complex(np.trace(restricted)) / sdim)
        zeros.append(
            ZeroWithMultiplicity(point=tuple(point), multiplicity=len(idx_list))
        )
    total = sum(z.multiplicity for z in zeros)
    if total != d:  # pragma: no cover - clusters partition the spectrum
        raise AssertionError("multiplicities do not sum to the dimension")
    return zeros


def decomposition_to_json(zeros: list, total_dim: int) -> dict:
    """Canonical JSON form of one decomposition: the zeros with their
    multiplicities plus the quotient dimension they sum to."""
    return {
        "zeros": [z.to_json_dict() for z in zeros],
        "totalDim": total_dim,
    }


def relative_residual(f: Polynomial, point) -> float:
    """|f(point)| relative to the largest term magnitude (1 floor)."""
    value = 0j
    scale = 1.0
    for exp, c in f.terms.items():
        term = complex(c)
        for e, x in zip(exp, point):
            term *= complex(x) ** e
        value += term
        scale = max(scale, abs(term))
    return abs(value) / scale
