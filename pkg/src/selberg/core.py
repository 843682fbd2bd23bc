"""Points of P(n), the Selberg invariant, group action, flat coordinates.

P(n) is modeled by unit-determinant positive definite symmetric matrices.
Matrices carry a float64 mirror always, plus an exact Fraction payload when
constructed from rationals; structural predicates prefer the exact payload.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import scipy.linalg

from . import linalg as la
from .config import DEFAULT_TOL, ToleranceConfig
from .errors import DimensionMismatch, EqualPoints, SemidefiniteNormal


def _to_fraction_rows(rows):
    out = []
    ok = True
    for row in rows:
        r = []
        for x in row:
            if isinstance(x, Fraction):
                r.append(x)
            elif isinstance(x, int):
                r.append(Fraction(x))
            elif isinstance(x, str):
                r.append(Fraction(x))
            elif isinstance(x, float) and float(x).is_integer():
                r.append(Fraction(int(x)))
            else:
                ok = False
                break
        if not ok:
            break
        out.append(tuple(r))
    return tuple(out) if ok else None


class SymMatrix:
    """Real symmetric n x n matrix; the normal-vector type for hyperplanes."""

    __slots__ = ("n", "data", "frac")

    def __init__(self, rows, exact: bool | None = None):
        if isinstance(rows, SymMatrix):
            self.n, self.data, self.frac = rows.n, rows.data, rows.frac
            return
        frac = None
        if not isinstance(rows, np.ndarray) and exact is not False:
            frac = _to_fraction_rows(rows)
        if frac is not None:
            n = len(frac)
            if any(len(r) != n for r in frac):
                raise ValueError("matrix must be square")
            # symmetrize exactly
            frac = tuple(tuple((frac[i][j] + frac[j][i]) / 2 for j in range(n)) for i in range(n))
            data = la.fmat_to_np(frac)
        else:
            data = np.asarray(rows, dtype=float)
            if data.ndim != 2 or data.shape[0] != data.shape[1]:
                raise ValueError("matrix must be square")
            data = la.sym(data)
            n = data.shape[0]
        self.n = n
        self.data = data
        self.frac = frac

    @property
    def exact(self) -> bool:
        return self.frac is not None

    def __neg__(self) -> "SymMatrix":
        if self.frac is not None:
            return SymMatrix(tuple(tuple(-x for x in r) for r in self.frac))
        return SymMatrix(-self.data)

    def scaled(self, c) -> "SymMatrix":
        if self.frac is not None and isinstance(c, (int, Fraction)):
            return SymMatrix(la.fscale(self.frac, c))
        return SymMatrix(self.data * float(c))

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.frac is not None:
            return all(x == 0 for r in self.frac for x in r)
        return bool(np.all(np.abs(self.data) <= tol))

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def __repr__(self) -> str:
        return f"SymMatrix({self.data.tolist()})"


def signature(s: SymMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> tuple:
    """(#positive, #negative, #zero) eigenvalues, exact when possible."""
    if s.frac is not None:
        return la.fsym_signature(s.frac)
    w = np.linalg.eigvalsh(s.data)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    pos = int(np.sum(w > tol.eps_def * scale))
    neg = int(np.sum(w < -tol.eps_def * scale))
    return pos, neg, s.n - pos - neg


def is_indefinite(s: SymMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    pos, neg, _ = signature(s, tol)
    return pos > 0 and neg > 0


class SpdPoint:
    """A point of P(n): positive definite, determinant one.

    Float mode stores the det-1 representative.  When the input is rational,
    the exact matrix is kept as a projective representative together with the
    positive scale relating it to the det-1 mirror; downstream predicates are
    scale-covariant.
    """

    __slots__ = ("n", "m", "data")

    def __init__(self, rows, tol: ToleranceConfig = DEFAULT_TOL, _skip_checks: bool = False):
        m = rows if isinstance(rows, SymMatrix) else SymMatrix(rows)
        self.n = m.n
        self.m = m  # projective representative (exact when available)
        if not _skip_checks:
            w = np.linalg.eigvalsh(m.data)
            scale = max(1.0, float(np.max(np.abs(w))))
            if w[0] <= tol.eps_def * scale:
                raise ValueError("matrix is not positive definite")
        if m.frac is not None:
            d = la.fdet(m.frac)
            if d <= 0:
                raise ValueError("matrix has nonpositive determinant")
            logdet = math.log(d.numerator) - math.log(d.denominator)
        else:
            sign, logdet = np.linalg.slogdet(m.data)
            if sign <= 0:
                raise ValueError("matrix has nonpositive determinant")
        self.data = m.data * math.exp(-logdet / self.n)  # det-1 float mirror

    @property
    def frac(self):
        return self.m.frac

    @property
    def exact(self) -> bool:
        return self.m.frac is not None

    def inverse(self) -> SymMatrix:
        """Inverse of the det-1 representative (exact payload when rational).

        In exact mode the payload is the inverse of the projective
        representative, i.e. a positive multiple of the det-1 inverse.
        """
        if self.exact:
            return SymMatrix(la.finverse(self.frac))
        return SymMatrix(np.linalg.inv(self.data))

    def __repr__(self) -> str:
        return f"SpdPoint({self.data.tolist()})"


class GroupElement:
    """An SL(n,R) matrix acting on P(n) by congruence g.X = g^T X g."""

    __slots__ = ("n", "data", "frac")

    def __init__(self, rows, check: bool = True):
        frac = None
        if not isinstance(rows, np.ndarray):
            frac = _to_fraction_rows(rows)
        if frac is not None:
            data = la.fmat_to_np(frac)
        else:
            data = np.asarray(rows, dtype=float)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError("matrix must be square")
        self.n = data.shape[0]
        self.data = data
        self.frac = frac
        if check:
            if frac is not None:
                if la.fdet(frac) != 1:
                    raise ValueError("determinant must be 1")
            elif abs(np.linalg.det(data) - 1.0) > 1e-10:
                raise ValueError("determinant must be 1")

    @property
    def exact(self) -> bool:
        return self.frac is not None

    def inv(self) -> "GroupElement":
        if self.frac is not None:
            return GroupElement(la.finverse(self.frac), check=False)
        return GroupElement(np.linalg.inv(self.data), check=False)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        if self.frac is not None and other.frac is not None:
            return GroupElement(la.fmul(self.frac, other.frac), check=False)
        return GroupElement(self.data @ other.data, check=False)

    def __repr__(self) -> str:
        return f"GroupElement({self.data.tolist()})"


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def _check_dims(x, y) -> None:
    if x.n != y.n:
        raise DimensionMismatch(f"dimensions differ: {x.n} vs {y.n}")


def selberg(x: SpdPoint, y: SpdPoint):
    """Selberg invariant s(X,Y) = tr(X^{-1} Y); >= n, = n iff X = Y."""
    _check_dims(x, y)
    if x.exact and y.exact:
        xinv = la.finverse(x.frac)
        sx = la.fdet(x.frac)
        sy = la.fdet(y.frac)
        val = la.ftrace_prod(xinv, y.frac)
        # rescale the projective representatives to det 1:
        # (x/sx^{1/n})^{-1} (y/sy^{1/n}) = (sx/sy)^{1/n} x^{-1} y
        ratio = (float(sx) / float(sy)) ** (1.0 / x.n)
        return float(val) * ratio
    return float(np.trace(np.linalg.solve(x.data, y.data)))


def riemannian_distance(x: SpdPoint, y: SpdPoint) -> float:
    """Riemannian distance sqrt(sum_i log^2(lambda_i)), lambda_i eig of X^{-1}Y."""
    _check_dims(x, y)
    w = scipy.linalg.eigvalsh(y.data, x.data)
    return float(np.sqrt(np.sum(np.log(w) ** 2)))


def spd_power(x: SpdPoint, k: int) -> SpdPoint:
    """Integer power X^k, exact when X is (powers of a symmetric matrix are
    symmetric and stay in P(n))."""
    if k < 1:
        raise ValueError("power must be a positive integer")
    if x.exact:
        acc = x.frac
        for _ in range(k - 1):
            acc = la.fmul(acc, x.frac)
        return SpdPoint(acc, _skip_checks=True)
    acc = np.linalg.matrix_power(x.data, k)
    return SpdPoint(la.sym(acc), _skip_checks=True)


def act(g: GroupElement, x: SpdPoint) -> SpdPoint:
    """Congruence action g.X = g^T X g; preserves P(n)."""
    _check_dims(g, x)
    if g.frac is not None and x.exact:
        gf = g.frac
        return SpdPoint(la.fmul(la.ftranspose(gf), la.fmul(x.frac, gf)), _skip_checks=True)
    return SpdPoint(la.sym(g.data.T @ x.data @ g.data), _skip_checks=True)


def bisector_normal(x: SpdPoint, y: SpdPoint) -> SymMatrix:
    """Normal of Bis(X,Y) oriented so {tr(A Z) >= 0} = {s(X,Z) <= s(Y,Z)}.

    A = Y^{-1} - X^{-1} with det-1 representatives; in exact mode the payload
    is a positive rational multiple of that matrix.
    """
    _check_dims(x, y)
    if x.exact and y.exact:
        # use projective representatives with positive rational weights:
        # det(x)^{1/n} x_frac^{-1} approximates the det-1 inverse up to the
        # common positive factor (det(x) det(y))^{-1/n}; multiply through by
        # lcm-style rational weights to stay exact.
        dx = la.fdet(x.frac)
        dy = la.fdet(y.frac)
        # (y/dy^{1/n})^{-1} - (x/dx^{1/n})^{-1} = dy^{1/n} y^{-1} - dx^{1/n} x^{-1}
        # Positive rescale by (dx dy)^{... } keeps exactness only when the
        # n-th roots are rational; otherwise fall back to the equal-dets case.
        if dx == dy:
            a = la.fsub(la.finverse(y.frac), la.finverse(x.frac))
            s = SymMatrix(a)
            if not s.is_zero():
                return s
            raise EqualPoints("points coincide")
    a = np.linalg.inv(y.data) - np.linalg.inv(x.data)
    s = SymMatrix(la.sym(a))
    if np.max(np.abs(s.data)) <= 1e-14 * max(1.0, np.max(np.abs(x.data))):
        raise EqualPoints("points coincide")
    return s


def flat_coordinates(y: SpdPoint, x: SpdPoint):
    """g with g.Y = I and g.X diagonal; Y^{1/2} g is special orthogonal.

    Returns (g, d) where d is the diagonal SpdPoint g.X.  When Y = I and X is
    already diagonal the frame is the identity (no hidden permutation);
    otherwise eigenvalues come in ascending order with deterministically
    sign-fixed eigenvectors.
    """
    _check_dims(x, y)
    yd = y.data
    if np.allclose(yd, np.eye(y.n), atol=1e-14) and np.allclose(x.data, np.diag(np.diag(x.data)), atol=1e-14):
        g = np.eye(y.n)
        return GroupElement(g, check=False), SpdPoint(x.data, _skip_checks=True)
    w, u = np.linalg.eigh(yd)
    ysqrt_inv = u @ np.diag(w ** -0.5) @ u.T
    mid = la.sym(ysqrt_inv @ x.data @ ysqrt_inv)
    dvals, q = np.linalg.eigh(mid)
    # deterministic sign fix: largest-magnitude component positive
    for j in range(q.shape[1]):
        k = int(np.argmax(np.abs(q[:, j])))
        if q[k, j] < 0:
            q[:, j] = -q[:, j]
    if np.linalg.det(ysqrt_inv @ q) < 0:
        q[:, 0] = -q[:, 0]
    g = ysqrt_inv @ q
    d = SpdPoint(np.diag(dvals), _skip_checks=True)
    return GroupElement(g, check=False), d


def so_frame(y: SpdPoint, g: GroupElement) -> np.ndarray:
    """The special-orthogonal frame Y^{1/2} g attached to flat coordinates."""
    w, u = np.linalg.eigh(y.data)
    ysqrt = u @ np.diag(w ** 0.5) @ u.T
    return ysqrt @ g.data


def act_on_normal(g: GroupElement, a: SymMatrix) -> SymMatrix:
    """Pushforward of a hyperplane normal: g.(A^perp) = ((g^{-1})^T A g^{-1})^perp."""
    gi = g.inv()
    if gi.frac is not None and a.frac is not None:
        return SymMatrix(la.fmul(la.ftranspose(gi.frac), la.fmul(a.frac, gi.frac)))
    return SymMatrix(la.sym(gi.data.T @ a.data @ gi.data))


def rescale_pow2(a: SymMatrix) -> SymMatrix:
    """Positive power-of-two rescaling bringing the Frobenius norm into
    [1, 2); exactness of rational payloads is preserved, and the hyperplane
    and its co-orientation are unchanged."""
    nrm = a.norm()
    if nrm == 0 or not np.isfinite(nrm):
        return a
    e = math.floor(math.log2(nrm))
    if e == 0:
        return a
    if a.frac is not None:
        return a.scaled(Fraction(1, 2 ** e) if e > 0 else Fraction(2 ** (-e)))
    return a.scaled(2.0 ** (-e))


def require_indefinite(a: SymMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> SymMatrix:
    if a.is_zero():
        raise SemidefiniteNormal("zero normal vector")
    if not is_indefinite(a, tol):
        raise SemidefiniteNormal("normal is semi-definite; its locus in P(n) is empty")
    return a
