"""Dense linear algebra over an arbitrary scalar domain.

Matrices are lists of row lists.  Field domains get Gaussian elimination
(rank, nullspace, inverse, solving); any commutative-ring domain gets
products, powers, and the division-free characteristic polynomial
(Berkowitz), which is what makes exact computations over truncated series
and over polynomial rings possible.
"""

from __future__ import annotations

from .errors import ShapeError

Matrix = list


def zeros(dom, rows: int, cols: int) -> Matrix:
    return [[dom.zero] * cols for _ in range(rows)]


def identity(dom, n: int) -> Matrix:
    out = zeros(dom, n, n)
    for i in range(n):
        out[i][i] = dom.one
    return out


def mat_copy(a: Matrix) -> Matrix:
    return [row[:] for row in a]


def mat_add(dom, a: Matrix, b: Matrix) -> Matrix:
    return [[dom.add(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(dom, a: Matrix, b: Matrix) -> Matrix:
    return [[dom.sub(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_mul(dom, a: Matrix, b: Matrix) -> Matrix:
    n, k = len(a), len(b)
    if k and len(a[0]) != k:
        raise ShapeError("matrix shapes do not match")
    m = len(b[0]) if b else 0
    out = zeros(dom, n, m)
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            c = ai[t]
            if dom.is_zero(c):
                continue
            bt = b[t]
            for j in range(m):
                if not dom.is_zero(bt[j]):
                    oi[j] = dom.add(oi[j], dom.mul(c, bt[j]))
    return out


def mat_vec(dom, a: Matrix, v: list) -> list:
    out = [dom.zero] * len(a)
    for i, row in enumerate(a):
        acc = dom.zero
        for c, x in zip(row, v):
            if not (dom.is_zero(c) or dom.is_zero(x)):
                acc = dom.add(acc, dom.mul(c, x))
        out[i] = acc
    return out


def mat_pow(dom, a: Matrix, e: int) -> Matrix:
    out = identity(dom, len(a))
    base = a
    while e:
        if e & 1:
            out = mat_mul(dom, out, base)
        base = mat_mul(dom, base, base) if e > 1 else base
        e >>= 1
    return out


def mat_eq(dom, a: Matrix, b: Matrix) -> bool:
    return all(dom.eq(x, y) for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def is_zero_matrix(dom, a: Matrix) -> bool:
    return all(dom.is_zero(x) for row in a for x in row)


# ---------------------------------------------------------------------------
# elimination over a field
# ---------------------------------------------------------------------------


def rref(dom, a: Matrix):
    """Reduced row echelon form. Returns (rows, pivot column indices)."""
    m = mat_copy(a)
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if not dom.is_zero(m[i][c]):
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = dom.inv(m[r][c])
        m[r] = [dom.mul(inv, x) for x in m[r]]
        for i in range(nrows):
            if i != r and not dom.is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [dom.sub(x, dom.mul(f, y)) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(dom, a: Matrix) -> int:
    return len(rref(dom, a)[1])


def nullspace(dom, a: Matrix) -> list:
    """Basis vectors (as lists) of the right kernel."""
    if not a:
        return []
    ncols = len(a[0])
    m, pivots = rref(dom, a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [dom.zero] * ncols
        v[fc] = dom.one
        for r, pc in enumerate(pivots):
            v[pc] = dom.neg(m[r][fc])
        basis.append(v)
    return basis


def column_space_basis(dom, a: Matrix) -> list:
    """Columns of `a` (as vectors) forming a basis of the column space."""
    if not a:
        return []
    m, pivots = rref(dom, a)
    return [[row[c] for row in a] for c in pivots]


def invert(dom, a: Matrix):
    """Inverse matrix, or None when singular."""
    n = len(a)
    aug = [row[:] + iden_row for row, iden_row in zip(a, identity(dom, n))]
    m, pivots = rref(dom, aug)
    if pivots[:n] != list(range(n)):
        return None
    return [row[n:] for row in m[:n]]


def solve(dom, a: Matrix, b: list):
    """Solve a*x = b for square invertible a; None when singular."""
    n = len(a)
    aug = [row[:] + [bv] for row, bv in zip(a, b)]
    m, pivots = rref(dom, aug)
    if len(pivots) < n or pivots[:n] != list(range(n)):
        return None
    return [m[i][n] for i in range(n)]


# ---------------------------------------------------------------------------
# division-free characteristic polynomial (any commutative ring)
# ---------------------------------------------------------------------------


def charpoly(dom, a: Matrix) -> list:
    """Coefficients [1, c_{n-1}, ..., c_0] of det(T*I - A), via Berkowitz.

    Works over any commutative ring domain (no divisions), in O(n^4) ring
    operations.
    """
    n = len(a)
    if n == 0:
        return [dom.one]
    vec = [dom.one, dom.neg(a[0][0])]
    for r in range(1, n):
        row = a[r][:r]
        col = [a[i][r] for i in range(r)]
        diag = a[r][r]
        # Toeplitz column: [1, -a_rr, -row.col, -row.M.col, -row.M^2.col, ...]
        t = [dom.one, dom.neg(diag)]
        w = col
        for k in range(r):
            acc = dom.zero
            for x, y in zip(row, w):
                acc = dom.add(acc, dom.mul(x, y))
            t.append(dom.neg(acc))
            if k < r - 1:
                w = [
                    _dot(dom, a[i][:r], w)
                    for i in range(r)
                ]
        new = []
        for i in range(r + 2):
            acc = dom.zero
            for j in range(len(vec)):
                if 0 <= i - j < len(t):
                    acc = dom.add(acc, dom.mul(t[i - j], vec[j]))
            new.append(acc)
        vec = new
    return vec


def _dot(dom, xs, ys):
    acc = dom.zero
    for x, y in zip(xs, ys):
        acc = dom.add(acc, dom.mul(x, y))
    return acc


def determinant(dom, a: Matrix):
    """det(A) over any commutative ring, read off the characteristic polynomial."""
    n = len(a)
    p0 = charpoly(dom, a)[-1]
    return p0 if n % 2 == 0 else dom.neg(p0)
