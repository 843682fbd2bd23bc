"""Dual-lane linear algebra kernel.

Structural decisions (rank, regularity, multiplicities, definiteness
signatures) run over exact rationals when the operands carry Fraction
payloads; analytic quantities run in floating point.  Exact matrices are
nested tuples of Fraction; float matrices are numpy arrays.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

FracMat = tuple  # tuple of tuples of Fraction


# ---------------------------------------------------------------------------
# exact (Fraction) lane
# ---------------------------------------------------------------------------

def fmat(rows) -> FracMat:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def fmat_to_np(m: FracMat) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in m], dtype=float)


def feye(n: int) -> FracMat:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def fzeros(r: int, c: int) -> FracMat:
    return tuple(tuple(Fraction(0) for _ in range(c)) for _ in range(r))


def fadd(a: FracMat, b: FracMat) -> FracMat:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def fsub(a: FracMat, b: FracMat) -> FracMat:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def fscale(a: FracMat, c) -> FracMat:
    c = Fraction(c)
    return tuple(tuple(c * x for x in row) for row in a)


def fmul(a: FracMat, b: FracMat) -> FracMat:
    bt = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def ftranspose(a: FracMat) -> FracMat:
    return tuple(zip(*a))


def ftrace_prod(a: FracMat, b: FracMat) -> Fraction:
    # tr(a b) for symmetric a, b; works for any square pair
    return sum(a[i][j] * b[j][i] for i in range(len(a)) for j in range(len(a)))


def fdet(a: FracMat) -> Fraction:
    """Bareiss fraction-free determinant."""
    n = len(a)
    if n == 0:
        return Fraction(1)
    m = [list(row) for row in a]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
            m[i][k] = Fraction(0)
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _frref(a: FracMat):
    """Reduced row echelon form; returns (rref rows, pivot columns)."""
    m = [list(row) for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def frank(a: FracMat) -> int:
    return len(_frref(a)[1])


def fnullspace(a: FracMat) -> list:
    """Basis of the right kernel, as tuples of Fractions."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    m, pivots = _frref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][fc]
        basis.append(tuple(v))
    return basis


def fsolve(a: FracMat, b) -> tuple | None:
    """Solve a x = b exactly; returns None when singular/inconsistent."""
    n = len(a)
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(a, b)]
    m, pivots = _frref(tuple(tuple(r) for r in aug))
    if len(pivots) != len([p for p in pivots if p < n]):
        return None
    x = [Fraction(0)] * n
    for r, pc in enumerate(pivots):
        if pc == n:
            return None  # inconsistent
        x[pc] = m[r][n]
    if frank(a) < n:
        # underdetermined: still return the particular solution
        pass
    return tuple(x)


def finverse(a: FracMat) -> FracMat:
    n = len(a)
    aug = tuple(tuple(list(row) + [Fraction(int(i == j)) for j in range(n)]) for i, row in enumerate(a))
    m, pivots = _frref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return tuple(tuple(row[n:]) for row in m[:n])


def fcharpoly(a: FracMat) -> list:
    """Coefficients of det(lambda I - a), highest degree first (monic)."""
    # Faddeev-LeVerrier: exact and allocation-free enough for n <= 6
    n = len(a)
    coeffs = [Fraction(1)]
    m = fzeros(n, n)
    c = Fraction(1)
    for k in range(1, n + 1):
        m = fmul(a, m)
        m = tuple(tuple(m[i][j] + (c if i == j else 0) for j in range(n)) for i in range(n))
        c = Fraction(-1, k) * sum(fmul(a, m)[i][i] for i in range(n))
        coeffs.append(c)
    return coeffs


def pencil_poly_exact(a: FracMat, b: FracMat) -> list:
    """Coefficients of det(a - lambda*b), highest degree first, exact.

    Computed by interpolation at lambda = 0, 1, ..., n so every evaluation is
    a Bareiss determinant.
    """
    n = len(a)
    nodes = [Fraction(k) for k in range(n + 1)]
    vals = [fdet(fsub(a, fscale(b, t))) for t in nodes]
    # Newton -> monomial coefficients
    coef = _interp_poly(nodes, vals)
    # strip (numerically exact) leading zeros
    while len(coef) > 1 and coef[0] == 0:
        coef = coef[1:]
    return coef


def _interp_poly(xs, ys):
    """Exact Lagrange interpolation; returns coefficients highest-first."""
    n = len(xs)
    coef = [Fraction(0)] * n
    for i in range(n):
        # basis polynomial prod_{j != i} (x - xj) / (xi - xj)
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            basis = _poly_mul(basis, [Fraction(1), -xs[j]])
            denom *= xs[i] - xs[j]
        w = ys[i] / denom
        basis = [w * c for c in basis]
        basis = [Fraction(0)] * (n - len(basis)) + basis
        coef = [c + d for c, d in zip(coef, basis)]
    return coef


def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def real_rooted_signature(coeffs) -> tuple:
    """(#positive, #negative, #zero) roots of a REAL-ROOTED monic-ish poly.

    Exact Descartes count: for real-rooted polynomials the number of positive
    roots equals the number of sign changes.  Coefficients highest-first.
    """
    c = list(coeffs)
    while c and c[0] == 0:
        c = c[1:]
    if not c:
        raise ValueError("zero polynomial")
    zeros = 0
    while c and c[-1] == 0:
        c = c[:-1]
        zeros += 1
    signs = [1 if x > 0 else -1 for x in c if x != 0]
    pos = sum(1 for i in range(len(signs) - 1) if signs[i] != signs[i + 1])
    neg = len(c) - 1 - pos
    return pos, neg, zeros


def fsym_signature(a: FracMat) -> tuple:
    """(#pos, #neg, #zero) eigenvalues of an exact symmetric matrix."""
    return real_rooted_signature(fcharpoly(a))


# ---------------------------------------------------------------------------
# float lane
# ---------------------------------------------------------------------------

def sym(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def np_rank(a: np.ndarray, eps_rank: float) -> int:
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > eps_rank * s[0]))


def np_nullspace(a: np.ndarray, eps_rank: float) -> np.ndarray:
    """Orthonormal basis of the right kernel, columns."""
    if a.size == 0:
        return np.eye(a.shape[1])
    u, s, vt = np.linalg.svd(a)
    tol = eps_rank * (s[0] if s.size else 1.0)
    r = int(np.sum(s > tol))
    return vt[r:].T


def pencil_poly_float(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Coefficients of det(a - lambda*b), highest-first, by interpolation."""
    n = a.shape[0]
    nodes = np.arange(n + 1, dtype=float)
    scale = max(np.abs(b).max(), 1.0)
    vals = np.array([np.linalg.det(a - t * b) for t in nodes])
    coef = np.polyfit(nodes, vals, n) if n > 0 else np.array([vals[0]])
    del scale
    return coef


def cluster_values(vals, rel_gap: float):
    """Group nearby numbers; returns list of (representative, count).

    Values may be real or complex; two values merge when their distance is
    below rel_gap * (1 + max magnitude of the set).
    """
    vals = list(vals)
    scale = 1.0 + max((abs(v) for v in vals), default=0.0)
    groups: list[list] = []
    for v in sorted(vals, key=lambda z: (np.real(z), np.imag(z))):
        for g in groups:
            if abs(v - g[0]) <= rel_gap * scale:
                g.append(v)
                break
        else:
            groups.append([v])
    return [(complex(np.mean(g)), len(g)) for g in groups]
