"""Symmetric matrix pencils (A, B): regularity, generalized eigenvalues
(including infinity), Moebius transforms, and congruence canonical forms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from . import linalg as la
from .config import DEFAULT_TOL, ToleranceConfig
from .core import SymMatrix
from .errors import (DegenerateCoefficients, InconclusiveNumeric,
                     JordanFailure, RegularPencil, SingularPencil)

INF = float("inf")

# relative gap below which float eigenvalues coalesce into one class
COALESCE_GAP = 1e-7


@dataclass(frozen=True)
class Pencil:
    A: SymMatrix
    B: SymMatrix

    def __post_init__(self):
        if self.A.n != self.B.n:
            raise ValueError("pencil matrices must share a dimension")

    @property
    def n(self) -> int:
        return self.A.n

    @property
    def exact(self) -> bool:
        return self.A.exact and self.B.exact

    def member(self, lam) -> SymMatrix:
        """The pencil member A - lam*B (B itself for lam = infinity)."""
        if lam == INF:
            return -self.B
        if self.exact and isinstance(lam, (int, Fraction)):
            return SymMatrix(la.fsub(self.A.frac, la.fscale(self.B.frac, lam)))
        return SymMatrix(self.A.data - float(lam) * self.B.data)


@dataclass(frozen=True)
class GeneralizedEigenvalue:
    """One eigenvalue class: a real, the upper-half representative of a
    conjugate pair, or infinity."""

    value: object  # float | Fraction | complex (Im>0) | INF
    mult: int

    @property
    def is_real(self) -> bool:
        return not isinstance(self.value, complex) and self.value != INF

    @property
    def is_inf(self) -> bool:
        return self.value == INF

    def as_float(self):
        if isinstance(self.value, complex):
            return self.value
        return float(self.value)


@dataclass
class EigenStructure:
    regular: bool
    eigenvalues: list = field(default_factory=list)  # GeneralizedEigenvalue
    numerically_certified: bool = False

    def total_multiplicity(self) -> int:
        return sum(e.mult if e.is_real or e.is_inf else 2 * e.mult for e in self.eigenvalues)

    def distinct_real_or_inf(self) -> list:
        return [e for e in self.eigenvalues if e.is_real or e.is_inf]

    def nonreal(self) -> list:
        return [e for e in self.eigenvalues if isinstance(e.value, complex)]


def pencil_poly(p: Pencil, tol: ToleranceConfig = DEFAULT_TOL):
    """Coefficients of det(A - lambda B), highest-degree first.

    Exact Fractions when the pencil is exact, floats otherwise; in the float
    lane, coefficients below eps_rank relative to the largest are zeroed.
    """
    if p.exact:
        return la.pencil_poly_exact(p.A.frac, p.B.frac)
    coef = la.pencil_poly_float(p.A.data, p.B.data)
    scale = float(np.max(np.abs(coef))) if coef.size else 0.0
    if scale == 0.0:
        return [0.0]
    coef = np.where(np.abs(coef) > tol.eps_rank * scale, coef, 0.0)
    i = 0
    while i < len(coef) - 1 and coef[i] == 0.0:
        i += 1
    return list(coef[i:])


def is_regular(p: Pencil, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff det(A - lambda B) is not identically zero."""
    coef = pencil_poly(p, tol)
    return any(c != 0 for c in coef)


def generalized_eigenvalues(p: Pencil, tol: ToleranceConfig = DEFAULT_TOL) -> EigenStructure:
    """All roots of det(A - lambda B) with multiplicities, plus infinity with
    multiplicity n - deg."""
    if not is_regular(p, tol):
        raise SingularPencil("pencil is singular; every lambda degenerates")
    coef = pencil_poly(p, tol)
    deg = len(coef) - 1
    n = p.n
    eigs: list[GeneralizedEigenvalue] = []
    certified = True
    if deg > 0:
        if p.exact:
            lam = sympy.Symbol("lam")
            poly = sympy.Poly(sum(sympy.Rational(c) * lam ** (deg - i) for i, c in enumerate(coef)), lam)
            real_roots = poly.real_roots()
            groups: dict = {}
            for r in real_roots:
                groups[r] = groups.get(r, 0) + 1
            used = 0
            for r, m in sorted(groups.items(), key=lambda kv: sympy.Float(kv[0])):
                val = Fraction(str(r)) if r.is_rational else float(r.evalf(30))
                eigs.append(GeneralizedEigenvalue(val, m))
                used += m
            nonreal_count = deg - used
            if nonreal_count:
                croots = np.roots([float(c) for c in coef])
                cvals = [z for z in croots if z.imag > 1e-12 * (1 + abs(z))]
                for rep, m in la.cluster_values(cvals, COALESCE_GAP):
                    eigs.append(GeneralizedEigenvalue(complex(rep.real, abs(rep.imag)), m))
                certified = True  # count certified exactly; values numeric
        else:
            roots = np.roots(coef)
            scale = 1.0 + max((abs(z) for z in roots), default=0.0)
            reals = [z.real for z in roots if abs(z.imag) <= COALESCE_GAP * scale]
            upper = [z for z in roots if z.imag > COALESCE_GAP * scale]
            for v, m in la.cluster_values(reals, COALESCE_GAP):
                eigs.append(GeneralizedEigenvalue(float(v.real), m))
            for z, m in la.cluster_values(upper, COALESCE_GAP):
                eigs.append(GeneralizedEigenvalue(complex(z.real, abs(z.imag)), m))
            certified = False
    if deg < n:
        eigs.append(GeneralizedEigenvalue(INF, n - deg))
    eigs.sort(key=_eig_sort_key)
    return EigenStructure(regular=True, eigenvalues=eigs, numerically_certified=not certified)


def _eig_sort_key(e: GeneralizedEigenvalue):
    if e.is_inf:
        return (2, 0.0, 0.0)
    if isinstance(e.value, complex):
        return (1, e.value.real, e.value.imag)
    return (0, float(e.value), 0.0)


def mobius_transform(p: Pencil, pc, q, r, s) -> Pencil:
    """(A, B) -> (pA + qB, rA + sB); eigenvalues map by (p*lam + q)/(r*lam + s)."""
    det = pc * s - q * r
    if det == 0:
        raise DegenerateCoefficients("ps - qr must be nonzero")
    if p.exact and all(isinstance(c, (int, Fraction)) for c in (pc, q, r, s)):
        a = la.fadd(la.fscale(p.A.frac, pc), la.fscale(p.B.frac, q))
        b = la.fadd(la.fscale(p.A.frac, r), la.fscale(p.B.frac, s))
        return Pencil(SymMatrix(a), SymMatrix(b))
    a = float(pc) * p.A.data + float(q) * p.B.data
    b = float(r) * p.A.data + float(s) * p.B.data
    return Pencil(SymMatrix(a), SymMatrix(b))


def mobius_value(lam, pc, q, r, s):
    """Image of an eigenvalue under (p*lam+q)/(r*lam+s), infinity included."""
    if lam == INF:
        if r == 0:
            return INF
        return Fraction(pc, r) if all(isinstance(c, (int, Fraction)) for c in (pc, r)) else pc / r
    den = r * lam + s
    if den == 0:
        return INF
    return (pc * lam + q) / den


# ---------------------------------------------------------------------------
# congruence normal form (regular pencils)
# ---------------------------------------------------------------------------

@dataclass
class NormalFormBlock:
    eigenvalue: object        # float | Fraction | complex | INF (original pencil)
    size: int
    rows: tuple               # slice of indices in the transformed coordinates


@dataclass
class CongruenceNormalForm:
    Q: np.ndarray             # invertible; Q^T A Q, Q^T B Q block-diagonal
    A0: SymMatrix
    B0: SymMatrix
    blocks: list              # NormalFormBlock, canonically ordered
    shift: object             # the c with B + cA invertible
    numerically_certified: bool = False

    def block_sizes(self) -> list:
        return sorted(b.size for b in self.blocks)


def _find_shift(p: Pencil, tol: ToleranceConfig):
    """c with B + cA invertible; regularity guarantees one among any n+1
    distinct values, searched over 0, 1, -1, 2, -2, ... up to 4n."""
    n = p.n
    for k in range(0, 4 * n + 1):
        for c in ([0] if k == 0 else [k, -k]):
            if p.exact:
                m = la.fadd(p.B.frac, la.fscale(p.A.frac, c))
                if la.fdet(m) != 0:
                    return c
            else:
                m = p.B.data + c * p.A.data
                s = np.linalg.svd(m, compute_uv=False)
                if s[-1] > tol.eps_rank * max(s[0], 1.0):
                    return c
    raise SingularPencil("no invertible member found; pencil is singular")


def _orig_eigenvalue(mu, c):
    """Map an eigenvalue mu of (B+cA)^{-1} A back to the lambda convention of
    det(A - lambda B): lambda = mu / (1 - c mu), with mu = 1/c mapping to inf
    and mu = 0 to 0."""
    if isinstance(mu, complex):
        den = 1 - c * mu
        return complex(mu / den)
    mu = Fraction(mu) if isinstance(mu, (int, Fraction)) else mu
    den = 1 - c * mu
    if den == 0:
        return INF
    return mu / den


def congruence_normal_form(p: Pencil, tol: ToleranceConfig = DEFAULT_TOL) -> CongruenceNormalForm:
    """Simultaneous block-diagonalization of a regular symmetric pencil.

    Q comes from the Jordan decomposition of (B + cA)^{-1} A; the block
    multiset (eigenvalue, size) is canonical: sorted by (Re, Im, size) with
    infinity last.
    """
    if not is_regular(p, tol):
        raise SingularPencil("normal form requires a regular pencil")
    c = _find_shift(p, tol)
    if p.exact:
        try:
            return _normal_form_exact(p, c, tol)
        except _IrrationalEigenvalues:
            pass
    return _normal_form_float(p, c, tol)


class _IrrationalEigenvalues(Exception):
    pass


def _rat2frac(x) -> Fraction:
    r = sympy.Rational(x)
    return Fraction(int(r.p), int(r.q))


def _normal_form_exact(p: Pencil, c, tol: ToleranceConfig) -> CongruenceNormalForm:
    bc = la.fadd(p.B.frac, la.fscale(p.A.frac, c))
    m = la.fmul(la.finverse(bc), p.A.frac)
    ms = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in m])
    evs = ms.eigenvals()
    if any(not v.is_rational for v in evs):
        raise _IrrationalEigenvalues
    pm, jm = ms.jordan_form(calc_transform=True)
    qf = tuple(tuple(_rat2frac(x) for x in row) for row in pm.tolist())
    q = la.fmat_to_np(qf)
    blocks = _read_blocks_from_jordan(jm, c)
    a0 = SymMatrix(la.fmul(la.ftranspose(qf), la.fmul(p.A.frac, qf)))
    b0 = SymMatrix(la.fmul(la.ftranspose(qf), la.fmul(p.B.frac, qf)))
    return CongruenceNormalForm(Q=q, A0=a0, B0=b0, blocks=_sort_blocks(blocks), shift=c)


def _read_blocks_from_jordan(jm, c):
    n = jm.shape[0]
    blocks = []
    start = 0
    while start < n:
        size = 1
        while start + size < n and jm[start + size - 1, start + size] == 1:
            size += 1
        mu = _rat2frac(jm[start, start])
        blocks.append(NormalFormBlock(_orig_eigenvalue(mu, c), size, tuple(range(start, start + size))))
        start += size
    return blocks


def _sort_blocks(blocks):
    def key(b):
        v = b.eigenvalue
        if v == INF:
            return (1, 0.0, 0.0, b.size)
        if isinstance(v, complex):
            return (0, v.real, v.imag, b.size)
        return (0, float(v), 0.0, b.size)
    return sorted(blocks, key=key)


def _normal_form_float(p: Pencil, c, tol: ToleranceConfig) -> CongruenceNormalForm:
    n = p.n
    bc = p.B.data + float(c) * p.A.data
    m = np.linalg.solve(bc, p.A.data)
    w = np.linalg.eigvals(m)
    clusters = la.cluster_values(w, max(COALESCE_GAP, tol.eps_rank * 10))
    q_cols = []
    blocks = []
    pos = 0
    for mu, mult in clusters:
        real_mu = abs(mu.imag) <= COALESCE_GAP * (1 + abs(mu))
        muv = mu.real if real_mu else mu
        chains = _jordan_chains(m, muv, mult, tol)
        if chains is None:
            raise JordanFailure("defective eigenvalue clustering failed; retry exact mode")
        for chain in chains:
            size = len(chain)
            for v in chain:
                q_cols.append(np.real_if_close(v, 1e6))
            lam = _orig_eigenvalue_float(muv, float(c), tol)
            blocks.append(NormalFormBlock(lam, size, tuple(range(pos, pos + size))))
            pos += size
    q = np.column_stack(q_cols)
    if np.max(np.abs(np.imag(q))) > 1e-6:
        raise JordanFailure("complex Jordan basis for a symmetric pencil")
    q = np.real(q)
    a0 = SymMatrix(la.sym(q.T @ p.A.data @ q))
    b0 = SymMatrix(la.sym(q.T @ p.B.data @ q))
    return CongruenceNormalForm(Q=q, A0=a0, B0=b0, blocks=_sort_blocks(blocks), shift=c,
                                numerically_certified=True)


def _orig_eigenvalue_float(mu, c, tol):
    if isinstance(mu, complex):
        return complex(mu / (1 - c * mu))
    den = 1 - c * mu
    if abs(den) <= tol.eps_rank * (1 + abs(c * mu)):
        return INF
    return mu / den


def _jordan_chains(m: np.ndarray, mu, mult: int, tol: ToleranceConfig):
    """Jordan chains of m for the eigenvalue cluster mu (algebraic mult given).

    Returns a list of chains, each ordered [v_1, ..., v_k] with
    (m - mu) v_1 = 0 and (m - mu) v_{j+1} = v_j.
    """
    n = m.shape[0]
    a = m - (mu * np.eye(n) if not isinstance(mu, complex) else mu * np.eye(n, dtype=complex))
    # generalized kernels
    kernels = [np.zeros((n, 0))]
    power = np.eye(n, dtype=a.dtype)
    for k in range(1, mult + 1):
        power = power @ a
        kernels.append(la.np_nullspace(power, tol.eps_rank * 10))
        if kernels[-1].shape[1] >= mult:
            break
    dims = [k.shape[1] for k in kernels]
    height = len(kernels) - 1
    if dims[-1] != mult:
        return None
    # number of chains of length >= k is dims[k] - dims[k-1]
    chains = []
    used = np.zeros((n, 0), dtype=a.dtype)
    for k in range(height, 0, -1):
        want = (dims[k] - dims[k - 1]) - sum(1 for ch in chains if len(ch) >= k)
        for _ in range(max(0, want)):
            top = _fresh_vector(kernels[k], np.column_stack([kernels[k - 1], used]) if kernels[k - 1].size or used.size else None, tol)
            if top is None:
                return None
            chain = [top]
            for _j in range(k - 1):
                chain.append(a @ chain[-1])
            chain.reverse()
            chains.append(chain)
            used = np.column_stack([used] + [c.reshape(-1, 1) for c in chain])
    if sum(len(c) for c in chains) != mult:
        return None
    return chains


def _fresh_vector(space: np.ndarray, avoid, tol: ToleranceConfig):
    """A unit vector in col(space) independent from col(avoid)."""
    if space.shape[1] == 0:
        return None
    if avoid is None or avoid.shape[1] == 0:
        return space[:, 0]
    qa, _ = np.linalg.qr(avoid)
    best, best_res = None, 0.0
    for j in range(space.shape[1]):
        v = space[:, j]
        res = v - qa @ (qa.conj().T @ v)
        r = np.linalg.norm(res)
        if r > best_res:
            best, best_res = res / r, r
    if best_res <= tol.eps_rank * 100:
        return None
    return best


# ---------------------------------------------------------------------------
# singular normal form
# ---------------------------------------------------------------------------

@dataclass
class SingularNormalForm:
    Q: object                 # np.ndarray, columns (V1 | V2 | V3); exact tuple when available
    n1: int
    n2: int
    n3: int
    A1: SymMatrix
    B1: SymMatrix
    B2: object                # n1 x n2 array (exact tuple or ndarray)
    B3: SymMatrix


def singular_normal_form(p: Pencil, tol: ToleranceConfig = DEFAULT_TOL) -> SingularNormalForm:
    """Kernel-splitting congruence for singular symmetric pencils.

    Q^T A Q = diag(A1, 0, 0) and Q^T B Q = [[B1, B2, 0], [B2^T, 0, 0],
    [0, 0, B3]] with A1 and B3 invertible.  Constructed from ker(A): B
    restricted to ker(A) splits into a nondegenerate part (B3) and its
    radical (the zero middle block); the A-regular complement is corrected to
    be B-orthogonal to the B3 part.
    """
    if is_regular(p, tol):
        raise RegularPencil("singular normal form requires a singular pencil")
    if p.exact:
        return _snf_exact(p)
    return _snf_float(p, tol)


def _snf_exact(p: Pencil) -> SingularNormalForm:
    n = p.n
    a, b = p.A.frac, p.B.frac
    ker = la.fnullspace(a)                      # basis of ker A, k vectors
    k = len(ker)
    kermat = tuple(ker)                         # rows are kernel vectors
    # B restricted to ker A
    m = tuple(tuple(sum(u[i] * b[i][j] * 1 for i in range(n)) for j in range(n)) for u in kermat)
    mk = tuple(tuple(sum(m[r][j] * v[j] for j in range(n)) for v in kermat) for r in range(k))
    rad = la.fnullspace(mk)                     # radical of B|_K in K-coordinates
    n2 = len(rad)
    n3 = k - n2
    # complement of the radical inside K: columns of the rref pivot structure
    rad_rows = tuple(rad)
    comp_idx = _complement_indices(rad_rows, k)
    v2 = [tuple(sum(r[j] * kermat[j][i] for j in range(k)) for i in range(n)) for r in rad_rows]
    v3 = [kermat[j] for j in comp_idx]
    # A-regular complement W: basis completing ker A to R^n
    w = _complete_basis(kermat, n)
    n1 = len(w)
    # correct W to be B-orthogonal to V3: w -> w - V3 B3^{-1} V3^T B w
    if n3:
        b3 = tuple(tuple(_bilinear(b, u, v) for v in v3) for u in v3)
        b3inv = la.finverse(b3)
        neww = []
        for wv in w:
            rhs = [_bilinear(b, v, wv) for v in v3]
            coeffs = [sum(b3inv[i][j] * rhs[j] for j in range(n3)) for i in range(n3)]
            neww.append(tuple(wv[i] - sum(coeffs[j] * v3[j][i] for j in range(n3)) for i in range(n)))
        w = neww
        b3m = SymMatrix(b3)
    else:
        b3m = SymMatrix(la.fzeros(0, 0)) if n3 == 0 else None
    cols = list(w) + list(v2) + list(v3)
    q = tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))
    a1 = tuple(tuple(_bilinear(a, u, v) for v in w) for u in w)
    b1 = tuple(tuple(_bilinear(b, u, v) for v in w) for u in w)
    b2 = tuple(tuple(_bilinear(b, u, v) for v in v2) for u in w)
    return SingularNormalForm(Q=la.fmat_to_np(q), n1=n1, n2=n2, n3=n3,
                              A1=SymMatrix(a1), B1=SymMatrix(b1), B2=b2, B3=b3m)


def _bilinear(mat, u, v):
    n = len(mat)
    return sum(u[i] * mat[i][j] * v[j] for i in range(n) for j in range(n))


def _complement_indices(rows, k):
    """Indices of coordinate vectors completing the row space to R^k."""
    if not rows:
        return list(range(k))
    _, pivots = la._frref(tuple(rows))
    return [j for j in range(k) if j not in pivots]


def _complete_basis(vectors, n):
    """Coordinate vectors extending `vectors` to a basis of R^n (exact)."""
    rows = list(vectors)
    out = []
    for j in range(n):
        e = tuple(Fraction(int(i == j)) for i in range(n))
        if la.frank(tuple(rows + [e])) > len(rows):
            rows.append(e)
            out.append(e)
    return out


def _snf_float(p: Pencil, tol: ToleranceConfig) -> SingularNormalForm:
    n = p.n
    a, b = p.A.data, p.B.data
    ker = la.np_nullspace(a, tol.eps_rank)          # n x k
    k = ker.shape[1]
    mk = ker.T @ b @ ker
    rad = la.np_nullspace(mk, tol.eps_rank)         # k x n2
    n2 = rad.shape[1]
    v2 = ker @ rad
    comp = la.np_nullspace(rad.T, tol.eps_rank)     # k x n3
    v3 = ker @ comp
    n3 = v3.shape[1]
    w = la.np_nullspace(ker.T, tol.eps_rank)        # n x n1, complement of ker A
    n1 = w.shape[1]
    if n3:
        b3 = v3.T @ b @ v3
        w = w - v3 @ np.linalg.solve(b3, v3.T @ b @ w)
        b3m = SymMatrix(la.sym(b3))
    else:
        b3m = SymMatrix(np.zeros((0, 0)))
    q = np.column_stack([w, v2, v3]) if n else np.zeros((0, 0))
    a1 = SymMatrix(la.sym(w.T @ a @ w))
    b1 = SymMatrix(la.sym(w.T @ b @ w))
    b2 = w.T @ b @ v2
    return SingularNormalForm(Q=q, n1=n1, n2=n2, n3=n3, A1=a1, B1=b1, B2=b2, B3=b3m)


# ---------------------------------------------------------------------------
# pseudo-generalized eigenvalues (singular pencils)
# ---------------------------------------------------------------------------

def pseudo_generalized_eigenvalues(p: Pencil, tol: ToleranceConfig = DEFAULT_TOL):
    """Values lambda where rank(lambda*A - B) drops below its maximum r.

    Includes infinity (rank(A) < r) by convention.  Exact mode computes the
    gcd of the r x r minors; float mode intersects root sets of randomized
    rank-r compressions.  Returns (values, r).
    """
    if p.exact:
        return _pseudo_exact(p)
    return _pseudo_float(p, tol)


def _pseudo_exact(p: Pencil):
    t = sympy.Symbol("t")
    n = p.n
    m = sympy.Matrix([[sympy.Rational(p.A.frac[i][j]) * t - sympy.Rational(p.B.frac[i][j])
                       for j in range(n)] for i in range(n)])
    r = m.rank()
    if r == 0:
        return [], 0
    minors = _minor_polys(m, r, t)
    g = sympy.Poly(0, t)
    for mm in minors:
        g = sympy.gcd(g, sympy.Poly(mm, t))
        if g.is_one:
            break
    vals = []
    if not g.is_one and g.degree() > 0:
        for root, mult in sympy.roots(g, t).items():
            if root.is_real:
                vals.append(Fraction(str(root)) if root.is_rational else float(root.evalf(30)))
            elif sympy.im(root) > 0:
                vals.append(complex(root.evalf(30)))
    a_rank = la.frank(p.A.frac)
    if a_rank < r:
        vals.append(INF)
    return sorted(vals, key=lambda v: (2, 0.0) if v == INF else ((1, abs(v)) if isinstance(v, complex) else (0, float(v)))), r


def _minor_polys(m, r, t):
    import itertools
    n = m.shape[0]
    out = []
    for rows in itertools.combinations(range(n), r):
        for cols in itertools.combinations(range(n), r):
            out.append(m[rows, cols].det(method="berkowitz").expand())
    return out


def _pseudo_float(p: Pencil, tol: ToleranceConfig):
    n = p.n
    rng = np.random.default_rng(tol.seed + 12345)
    probes = [0.318, -1.414, 2.236, -3.162, 0.577]
    r = max(la.np_rank(t * p.A.data - p.B.data, tol.eps_rank) for t in probes)
    if r == 0:
        return [], 0
    root_sets = []
    for trial in range(3):
        u = np.linalg.qr(rng.standard_normal((n, r)))[0]
        v = np.linalg.qr(rng.standard_normal((n, r)))[0]
        # det(u^T (tA - B) v): degree <= r polynomial by interpolation
        nodes = np.arange(r + 1, dtype=float) * 0.7 - 1.0
        vals = [np.linalg.det(u.T @ (t * p.A.data - p.B.data) @ v) for t in nodes]
        coef = np.polyfit(nodes, vals, r)
        roots = np.roots(coef) if np.max(np.abs(coef)) > 0 else []
        root_sets.append(list(roots))
    vals = []
    scale = 1.0 + max((abs(z) for z in root_sets[0]), default=0.0)
    for z in root_sets[0]:
        if all(any(abs(z - w) <= 1e-5 * scale for w in rs) for rs in root_sets[1:]):
            if la.np_rank(z.real * p.A.data - p.B.data, tol.eps_rank) < r or abs(z.imag) > 1e-7 * scale:
                if abs(z.imag) <= 1e-7 * scale:
                    vals.append(float(z.real))
                elif z.imag > 0:
                    vals.append(complex(z))
    if la.np_rank(p.A.data, tol.eps_rank) < r:
        vals.append(INF)
    merged = []
    for v in vals:
        if not any((v == INF and w == INF) or (v != INF and w != INF and abs(complex(v) - complex(w)) <= 1e-6 * scale) for w in merged):
            merged.append(v)
    return sorted(merged, key=lambda v: (2, 0.0) if v == INF else ((1, abs(v)) if isinstance(v, complex) else (0, float(v)))), r
