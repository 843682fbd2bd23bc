"""Definiteness of symmetric-matrix collections, hyperplane intersection
decisions, sample points in plane intersections, and the sufficient
bisector-disjointness certificate."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from . import linalg as la
from .config import DEFAULT_TOL, ToleranceConfig
from .core import (SpdPoint, SymMatrix, flat_coordinates, selberg, signature,
                   so_frame)
from .errors import ChamberViolation, InconclusiveNumeric
from .pencil import INF, Pencil, is_regular, pencil_poly, singular_normal_form


class Definiteness:
    DEFINITE = "Definite"
    SEMIDEFINITE_ONLY = "SemidefiniteOnly"
    INDEFINITE = "Indefinite"


@dataclass
class DefinitenessVerdict:
    kind: str
    witness: np.ndarray | None = None    # coefficients c with sum c_i A_i >= 0 (or > 0)


@dataclass(frozen=True)
class Chamber:
    """A truncated cone of the model flat: entries below 1 exactly on the
    index set, with log-ratio at least t."""

    subset: frozenset
    t: float
    n: int

    def __post_init__(self):
        if not (0.0 < self.t < 1.0):
            raise ValueError("t must lie in (0, 1)")
        if not self.subset or len(self.subset) >= self.n:
            raise ValueError("subset must be proper and nonempty")

    def complement(self) -> "Chamber":
        return Chamber(frozenset(range(self.n)) - self.subset, self.t, self.n)


def chamber_membership(d: SpdPoint, ch: Chamber) -> bool:
    """True iff the diagonal point lies in the truncated cone of its chamber."""
    x = np.diag(d.data)
    if not np.allclose(d.data, np.diag(x), atol=1e-12):
        raise ValueError("point must be diagonal")
    logs = np.log(x)
    for i in range(ch.n):
        inside = i in ch.subset
        if inside and not x[i] < 1.0:
            return False
        if not inside and not x[i] > 1.0:
            return False
    return float(np.min(np.abs(logs)) / np.max(np.abs(logs))) >= ch.t


# ---------------------------------------------------------------------------
# vectorization of Sym_n with the trace inner product
# ---------------------------------------------------------------------------

def _triu_weights(n):
    w = np.full(n * (n + 1) // 2, math.sqrt(2.0))
    pos = 0
    for i in range(n):
        w[pos] = 1.0
        pos += n - i
    return w


def sym_to_vec(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    return m[np.triu_indices(n)] * _triu_weights(n)


def vec_to_sym(v: np.ndarray, n: int) -> np.ndarray:
    iu = np.triu_indices(n)
    vals = v / _triu_weights(n)
    m = np.zeros((n, n))
    m[iu] = vals
    return m + m.T - np.diag(np.diag(m))


def orthocomplement_basis(mats, n: int, tol: ToleranceConfig = DEFAULT_TOL):
    """Orthonormal basis (as matrices) of the trace-orthogonal complement of
    span(mats) inside Sym_n.  Rows are normalized so mixed-scale inputs do
    not skew the rank threshold."""
    rows = []
    for m in mats:
        v = sym_to_vec(m.data if isinstance(m, SymMatrix) else np.asarray(m, float))
        nv = np.linalg.norm(v)
        if nv > 0:
            rows.append(v / nv)
    if rows:
        null = la.np_nullspace(np.array(rows), tol.eps_rank)
    else:
        null = np.eye(n * (n + 1) // 2)
    return [vec_to_sym(null[:, j], n) for j in range(null.shape[1])]


# ---------------------------------------------------------------------------
# searches over spans of symmetric matrices
# ---------------------------------------------------------------------------

def _independent_subset(mats, tol: ToleranceConfig):
    """Indices of a maximal linearly independent subfamily (unit rows)."""
    rows = []
    kept = []
    for i, m in enumerate(mats):
        v = sym_to_vec(m.data)
        nv = np.linalg.norm(v)
        if nv == 0:
            continue
        cand = rows + [v / nv]
        if np.linalg.matrix_rank(np.array(cand), tol=tol.eps_rank * 10) == len(cand):
            rows.append(cand[-1])
            kept.append(i)
    return kept


def _softmin_eig_ascent(basis, tol: ToleranceConfig, seeds=None):
    """Maximize the smallest eigenvalue of a unit-scale combination of the
    basis matrices; returns (c, value).

    Solved as the small semidefinite program max t s.t. sum c_i B_i - t I
    psd with the trace normalization tr(sum c_i B_i) = 1, by damped-Newton
    barrier path-following (the objective of interest is the optimal t,
    whose sign decides whether the span meets the PD cone).  Seeds are used
    to warm-start the path when they are strictly feasible.
    """
    c, t = _max_slack_sdp(basis, tol, seeds)
    if c is None or t is None:
        return None, -np.inf
    nc = np.linalg.norm(c)
    if nc == 0:
        return None, -np.inf
    c = c / nc
    m = sum(ci * bi for ci, bi in zip(c, basis))
    return c, float(np.linalg.eigvalsh(m)[0])


# |t| below this band cannot be sign-trusted in double precision; such
# probes re-run the path at high precision, warm-started from the float
# solution
ESCALATION_BAND = 3e-11


def _max_slack_sdp(blocks, tol: ToleranceConfig, seeds=None, rows=None,
                   stop_at=None):
    """Path-following solver for max t s.t. M(c) >= t I and R c >= t 1,
    normalized by tr(M(c)) + sum(R c) = 1.

    blocks are the matrix parts of the basis directions; rows (m x l) carry
    scalar slack constraints that ride along as one-dimensional blocks.
    stop_at short-circuits the path once t certifies that level (used by
    pure feasibility probes).
    """
    l = len(blocks)
    r = np.zeros((0, l)) if rows is None else np.asarray(rows, float)
    nvec = np.array([np.trace(b) for b in blocks]) + r.sum(axis=0)
    nn = float(np.linalg.norm(nvec))
    if nn < 1e-12:
        return None, None   # every combination is traceless: no PD member
    c0 = nvec / (nvec @ nvec)
    znull = la.np_nullspace(nvec.reshape(1, -1) / nn, 1e-14)   # l x (l-1)
    best = None
    starts = [c0]
    for s in (seeds or []):
        s = np.asarray(s, float)
        tr_s = float(s @ nvec)
        if abs(tr_s) > 1e-12 * max(1.0, float(np.linalg.norm(s)) * nn):
            starts.append(s / tr_s)
            break   # the path is a convex method; one warm start suffices
    for cstart in starts:
        res = _barrier_path(blocks, r, cstart, znull, tol, stop_at)
        if res is not None and (best is None or res[1] > best[1]):
            best = res
            if best[1] > 10 * tol.eps_def:
                break
    if best is None:
        return None, None
    if abs(best[1]) < ESCALATION_BAND:
        refined = _barrier_path_mp(blocks, r, best[0], znull, best[1])
        if refined is not None:
            best = refined
    return best


def _barrier_path(blocks, rows, c0, znull, tol: ToleranceConfig, stop_at=None):
    """Damped-Newton barrier path in double precision."""
    dim = blocks[0].shape[0]
    kfree = znull.shape[1]
    m = rows.shape[0]
    bt = np.stack(blocks)                       # l x dim x dim
    bzt = np.tensordot(znull.T, bt, axes=1)     # kfree x dim x dim
    rz = rows @ znull if m else np.zeros((0, kfree))
    eye = np.eye(dim)

    def assemble(c):
        return np.tensordot(c, bt, axes=1)

    def strictly_feasible(mat, sig):
        if m and sig.min() <= 0:
            return False
        try:
            np.linalg.cholesky(mat)
            return True
        except np.linalg.LinAlgError:
            return False

    c = np.asarray(c0, float)
    w0 = np.linalg.eigvalsh(assemble(c))
    sig0 = rows @ c if m else np.array([])
    lam0 = min(float(w0[0]), float(sig0.min()) if m else np.inf)
    t = lam0 - max(1.0, abs(lam0))
    y = np.zeros(kfree)
    mu = max(1.0, abs(t))
    prev_t = None
    for _outer in range(70):
        for _newton in range(10):
            cc = c0 + znull @ y if kfree else c0
            s = assemble(cc) - t * eye
            w, v = np.linalg.eigh(s)
            sig = (rows @ cc - t) if m else np.array([])
            if w[0] <= 0 or (m and sig.min() <= 0):
                break
            sinv = la.sym(v @ ((1.0 / w)[:, None] * v.T))
            inv_sig = 1.0 / sig if m else sig
            gy = -np.tensordot(bzt, sinv, axes=([1, 2], [0, 1]))
            if m:
                gy -= rz.T @ inv_sig
            gt = float(np.trace(sinv)) - 1.0 / mu
            if m:
                gt += float(inv_sig.sum())
            grad = np.concatenate([gy, [gt]])
            sb = np.tensordot(bzt, sinv, axes=([2], [0]))     # k x dim x dim
            h = np.zeros((kfree + 1, kfree + 1))
            h[:kfree, :kfree] = np.einsum("aij,bji->ab", sb, sb)
            if m:
                h[:kfree, :kfree] += (rz.T * inv_sig ** 2) @ rz
            s2 = sinv @ sinv
            hct = -np.tensordot(bzt, s2, axes=([1, 2], [0, 1]))
            if m:
                hct -= rz.T @ (inv_sig ** 2)
            h[:kfree, kfree] = h[kfree, :kfree] = hct
            h[kfree, kfree] = float(np.sum(sinv * sinv.T)) + \
                (float((inv_sig ** 2).sum()) if m else 0.0)
            try:
                step = np.linalg.solve(h + 1e-13 * np.trace(h) / (kfree + 1) * np.eye(kfree + 1), -grad)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(h, -grad, rcond=None)[0]
            ndec = float(np.sqrt(max(0.0, -grad @ step)))
            alpha = 1.0 if ndec <= 0.25 else 1.0 / (1.0 + ndec)
            accepted = None
            for _ in range(60):
                y2 = y + alpha * step[:kfree]
                t2 = t + alpha * step[kfree]
                cc2 = c0 + znull @ y2 if kfree else c0
                m2 = assemble(cc2) - t2 * eye
                sig2 = (rows @ cc2 - t2) if m else np.array([])
                if np.isfinite(m2).all() and strictly_feasible(m2, sig2):
                    accepted = (y2, t2)
                    break
                alpha *= 0.5
            if accepted is None:
                break
            y, t = accepted
            if stop_at is not None and t > stop_at:
                cc = c0 + znull @ y if kfree else c0
                return cc, float(t)
            if ndec <= 0.25:
                break   # centered enough for this rung
        if mu < 1e-13:
            break
        if prev_t is not None and abs(t - prev_t) < 1e-15 * max(1.0, abs(t)) and mu < 1e-6:
            break
        prev_t = t
        mu *= 0.2
    cc = c0 + znull @ y if kfree else c0
    return cc, float(t)


def _barrier_path_mp(blocks, rows, c_warm, znull, t_hint):
    """High-precision continuation of the barrier path for verdicts inside
    the double-precision noise band; warm-started from the float solution."""
    import mpmath as mp
    dim = blocks[0].shape[0]
    kfree = znull.shape[1]
    l = len(blocks)
    m = rows.shape[0]
    with mp.workdps(40):
        bm = [mp.matrix(b.tolist()) for b in blocks]
        rm = [[mp.mpf(rows[i, j]) for j in range(l)] for i in range(m)]
        zm = [[mp.mpf(znull[i, j]) for j in range(kfree)] for i in range(l)]
        bz = []
        for j in range(kfree):
            acc = mp.zeros(dim)
            for i, b in enumerate(bm):
                if zm[i][j]:
                    acc += zm[i][j] * b
            bz.append(acc)
        rzm = [[sum(rm[k][i] * zm[i][j] for i in range(l)) for j in range(kfree)]
               for k in range(m)]

        def assemble(cvec):
            acc = mp.zeros(dim)
            for ci, b in zip(cvec, bm):
                acc += ci * b
            return acc

        def slacks(cvec):
            return [sum(rm[k][i] * cvec[i] for i in range(l)) for k in range(m)]

        c0 = [mp.mpf(x) for x in c_warm.tolist()]
        w0 = mp.eigsy(assemble(c0), eigvals_only=True)
        lam0 = min(w0)
        if m:
            lam0 = min(lam0, min(slacks(c0)))
        t = lam0 - max(abs(mp.mpf(t_hint)) * 100, mp.mpf(10) ** -9)
        y = [mp.mpf(0)] * kfree
        mu = max(abs(mp.mpf(t_hint)) * 100, mp.mpf(10) ** -9)
        for _outer in range(40):
            for _newton in range(30):
                cc = [c0[i] + sum(zm[i][j] * y[j] for j in range(kfree)) for i in range(l)]
                s = assemble(cc) - t * mp.eye(dim)
                ew, eq = mp.eigsy(s)
                sig = [sv - t for sv in slacks(cc)]
                if min(ew) <= 0 or (m and min(sig) <= 0):
                    break
                sinv = eq * mp.diag([1 / wv for wv in ew]) * eq.T
                inv_sig = [1 / sv for sv in sig]
                grad = []
                for j in range(kfree):
                    gyj = -_mp_dot(sinv, bz[j])
                    gyj -= sum(rzm[k][j] * inv_sig[k] for k in range(m))
                    grad.append(gyj)
                gt = _mp_trace(sinv) - 1 / mu + sum(inv_sig)
                grad.append(gt)
                sb = [sinv * bzj for bzj in bz]
                h = mp.zeros(kfree + 1)
                for i in range(kfree):
                    for j in range(i, kfree):
                        v = _mp_dot_mat(sb[i], sb[j])
                        v += sum(rzm[k][i] * rzm[k][j] * inv_sig[k] ** 2 for k in range(m))
                        h[i, j] = h[j, i] = v
                s2 = sinv * sinv
                for i in range(kfree):
                    v = -_mp_dot(s2, bz[i]) - sum(rzm[k][i] * inv_sig[k] ** 2 for k in range(m))
                    h[i, kfree] = h[kfree, i] = v
                h[kfree, kfree] = _mp_dot_mat(sinv, sinv) + sum(iv ** 2 for iv in inv_sig)
                try:
                    step = mp.lu_solve(h, mp.matrix([-g for g in grad]))
                except Exception:
                    break
                alpha = mp.mpf(1)
                accepted = None
                for _ in range(80):
                    y2 = [y[j] + alpha * step[j] for j in range(kfree)]
                    t2 = t + alpha * step[kfree]
                    cc2 = [c0[i] + sum(zm[i][j] * y2[j] for j in range(kfree)) for i in range(l)]
                    w2 = mp.eigsy(assemble(cc2) - t2 * mp.eye(dim), eigvals_only=True)
                    sig2 = [sv - t2 for sv in slacks(cc2)]
                    if min(w2) > 0 and (not m or min(sig2) > 0):
                        accepted = (y2, t2)
                        break
                    alpha /= 2
                if accepted is None:
                    break
                y, t = accepted
                ndec = mp.sqrt(max(mp.mpf(0), -sum(g * st for g, st in zip(grad, step))))
                if ndec * alpha < mp.mpf(10) ** -20:
                    break
            if mu < mp.mpf(10) ** -26:
                break
            mu /= 5
        cc = [c0[i] + sum(zm[i][j] * y[j] for j in range(kfree)) for i in range(l)]
        return np.array([float(x) for x in cc]), float(t)


def _mp_trace(a):
    return sum(a[i, i] for i in range(a.rows))


def _mp_dot(a, b):
    n = a.rows
    return sum(a[i, j] * b[j, i] for i in range(n) for j in range(n))


def _mp_dot_mat(a, b):
    n = a.rows
    return sum(a[i, j] * b[j, i] for i in range(n) for j in range(n))


def max_slack_over_slice(blocks, rows, tol: ToleranceConfig = DEFAULT_TOL, seeds=None,
                         stop_at=None):
    """Public probe: (c, t) maximizing min(lambda_min(M(c)), slacks(c)).

    t > FEASIBILITY_FLOOR certifies a strictly feasible point of the slice;
    verdicts inside the double-precision band re-run at high precision, and
    stop_at short-circuits as soon as t certifies that level.
    """
    return _max_slack_sdp(blocks, tol, seeds=seeds, rows=rows, stop_at=stop_at)


def _det_ascent(basis, c0, tol: ToleranceConfig):
    """Polish a PD coefficient vector toward the interior critical point of
    det on the unit sphere (the gradient uses the adjugate)."""
    mats = basis
    c = np.array(c0, dtype=float)
    c /= np.linalg.norm(c)

    def assemble(cc):
        return sum(ci * bi for ci, bi in zip(cc, mats))

    base = np.linalg.det(assemble(c))
    for _ in range(tol.max_iter):
        m = assemble(c)
        w, v = np.linalg.eigh(m)
        if w[0] <= 0:
            break
        adj = v @ np.diag(np.prod(w) / w) @ v.T
        grad = np.array([float(np.trace(adj @ bi)) for bi in mats])
        grad -= c * float(grad @ c)
        gn = np.linalg.norm(grad)
        if gn < 1e-11 * max(1.0, abs(base)):
            break
        step = 0.25
        improved = False
        while step > 1e-12:
            cand = c + step * grad / gn
            cand /= np.linalg.norm(cand)
            mm = assemble(cand)
            if np.linalg.eigvalsh(mm)[0] > 0 and np.linalg.det(mm) > base:
                c, base = cand, np.linalg.det(mm)
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return c


FEASIBILITY_FLOOR = 1e-14   # smallest certifiable slack after escalation


def pd_in_span(mats, tol: ToleranceConfig = DEFAULT_TOL, seeds=None):
    """Search for a positive definite element of span(mats).

    Returns (coeffs, matrix, best_min_eig): coeffs indexes the INPUT list
    (zeros on dependent entries) and is None when no PD combination exists;
    best_min_eig is the maximum of the smallest eigenvalue over unit-norm
    combinations, certified by the barrier path (with a high-precision rerun
    when the verdict falls inside the double-precision noise band).
    """
    mats = [SymMatrix(m) for m in mats]
    idx = [i for i, m in enumerate(mats) if not m.is_zero(1e-300)]
    if not idx:
        return None, None, -np.inf
    sub = [mats[i] for i in idx]
    keep_local = _independent_subset(sub, tol)
    keep = [idx[j] for j in keep_local]
    norms = [np.linalg.norm(mats[i].data) for i in keep]
    basis = [mats[i].data / nm for i, nm in zip(keep, norms)]

    def lift(c):
        out = np.zeros(len(mats))
        for i, ci, nm in zip(keep, c, norms):
            out[i] = ci / nm
        return out

    if len(basis) == 1:
        w = np.linalg.eigvalsh(basis[0])
        if w[0] > FEASIBILITY_FLOOR:
            return lift([1.0]), basis[0], float(w[0])
        if -w[-1] > FEASIBILITY_FLOOR:
            return lift([-1.0]), -basis[0], float(-w[-1])
        return None, None, float(max(w[0], -w[-1]))
    c, t = _max_slack_sdp(basis, tol, seeds)
    if c is None or t is None:
        return None, None, -np.inf
    nc = float(np.linalg.norm(c))
    if nc == 0:
        return None, None, -np.inf
    cu = c / nc
    m = sum(ci * bi for ci, bi in zip(cu, basis))
    val = float(np.linalg.eigvalsh(m)[0])
    if t > FEASIBILITY_FLOOR:
        if val > tol.eps_def:
            cu = _det_ascent(basis, cu, tol)
            m = sum(ci * bi for ci, bi in zip(cu, basis))
        return lift(cu), m, max(val, t / max(nc, 1.0))
    return (None, None, val)


def collection_definiteness(mats, tol: ToleranceConfig = DEFAULT_TOL) -> DefinitenessVerdict:
    """Definite / SemidefiniteOnly / Indefinite for span{A_i}.

    Definite: the span contains a positive definite element (even the Satake
    closures of the hyperplanes are disjoint).  SemidefiniteOnly: a nonzero
    positive semidefinite combination exists but no definite one (the open
    loci are disjoint, the closures touch).  Indefinite: the hyperplanes meet
    in P(n).  Exact pairs are decided structurally; otherwise the concave
    maximum of the smallest eigenvalue over the coefficient ball decides,
    with boundary contact classified within eps_def.
    """
    mats = [SymMatrix(m) for m in mats]
    nz = [m for m in mats if not m.is_zero(1e-300)]
    if not nz:
        raise ValueError("collection must have nonzero span")
    if len(_independent_subset(nz, tol)) == 1:
        m = nz[0]
        pos, neg, zero = signature(m, tol)
        c = np.zeros(len(mats))
        c[[i for i, mm in enumerate(mats) if mm is m][0]] = 1.0 if pos else -1.0
        if pos and neg:
            return DefinitenessVerdict(Definiteness.INDEFINITE)
        if zero == 0:
            return DefinitenessVerdict(Definiteness.DEFINITE, c)
        return DefinitenessVerdict(Definiteness.SEMIDEFINITE_ONLY, c)
    if len(mats) == 2 and all(m.exact for m in mats):
        disjoint, combo, strict = _pair_disjointness_exact(mats[0], mats[1])
        if not disjoint:
            return DefinitenessVerdict(Definiteness.INDEFINITE)
        kind = Definiteness.DEFINITE if strict else Definiteness.SEMIDEFINITE_ONLY
        return DefinitenessVerdict(kind, combo)
    c, m, val = pd_in_span(mats, tol)
    if c is not None and val > tol.eps_def:
        return DefinitenessVerdict(Definiteness.DEFINITE, c)
    if c is not None or val >= -tol.eps_def:
        # boundary contact: the best combination is semidefinite within
        # tolerance (or strictly positive yet below the definiteness margin)
        if c is None:
            idx = [i for i, mm in enumerate(mats) if not mm.is_zero(1e-300)]
            sub = [mats[i] for i in idx]
            keep_local = _independent_subset(sub, tol)
            keep = [idx[j] for j in keep_local]
            norms = [np.linalg.norm(mats[i].data) for i in keep]
            basis = [mats[i].data / nm for i, nm in zip(keep, norms)]
            cb, _val = _softmin_eig_ascent(basis, tol)
            c = np.zeros(len(mats))
            for i, ci, nm in zip(keep, cb, norms):
                c[i] = ci / nm
        return DefinitenessVerdict(Definiteness.SEMIDEFINITE_ONLY, c)
    return DefinitenessVerdict(Definiteness.INDEFINITE)


# ---------------------------------------------------------------------------
# hyperplane pair disjointness
# ---------------------------------------------------------------------------

@dataclass
class IntersectionResult:
    verdict: str                       # "Disjoint" | "Intersecting"
    witness_point: SpdPoint | None     # common point when intersecting
    witness_combo: np.ndarray | None   # (x, y): x*A + y*B psd when disjoint
    strict: bool = False               # the witness combination is definite


def hyperplanes_intersect(a, b, tol: ToleranceConfig = DEFAULT_TOL,
                          want_point: bool = True) -> IntersectionResult:
    """Decide whether A^perp and B^perp meet in P(n), with a certificate.

    Singular pencils are first reduced by the kernel-splitting congruence
    (both orientations); a nonzero cross block on both sides forces
    intersection, otherwise the regular core decides.  Regular pencils are
    settled by a certified sweep of the pencil line: the signature of
    A - lambda*B is constant between consecutive real eigenvalues, so probing
    every gap, every real eigenvalue, and B itself finds a semidefinite
    member exactly when one exists, which happens iff the hyperplanes are
    disjoint.
    """
    a, b = SymMatrix(a), SymMatrix(b)
    p = Pencil(a, b)
    if is_regular(p, tol):
        disjoint, combo, strict = (_pair_disjointness_exact(a, b) if p.exact
                                   else _pair_disjointness_float(p, tol))
    else:
        res = _singular_disjointness(p, tol)
        if res is None:
            raise InconclusiveNumeric("singular reduction failed; rerun exact")
        disjoint, combo, strict = res
    if disjoint:
        return IntersectionResult("Disjoint", None, combo, strict)
    pt = planes_meet_sample([a, b], tol) if want_point else None
    return IntersectionResult("Intersecting", pt, None)


def _singular_disjointness(p: Pencil, tol: ToleranceConfig):
    snf = singular_normal_form(p, tol)
    b2_zero = _block_zero(snf.B2, tol)
    snf_sw = singular_normal_form(Pencil(p.B, p.A), tol)
    a2_zero = _block_zero(snf_sw.B2, tol)
    if not b2_zero and not a2_zero:
        return (False, None, False)
    if b2_zero:
        core = Pencil(_embed_core(snf.A1, snf.n3), _core_b(snf.B1, snf.B3))
        res = (_pair_disjointness_exact(core.A, core.B) if core.exact
               else _pair_disjointness_float(core, tol))
    else:
        core = Pencil(_embed_core(snf_sw.A1, snf_sw.n3), _core_b(snf_sw.B1, snf_sw.B3))
        res = (_pair_disjointness_exact(core.A, core.B) if core.exact
               else _pair_disjointness_float(core, tol))
        if res[1] is not None:
            res = (res[0], np.array([res[1][1], res[1][0]]), res[2])
    disjoint, combo, strict = res
    return (disjoint, combo, False)   # zero blocks forbid a strict lift


def _block_zero(b2, tol: ToleranceConfig) -> bool:
    if isinstance(b2, tuple):
        return all(x == 0 for row in b2 for x in row)
    return b2.size == 0 or float(np.max(np.abs(b2))) <= tol.eps_rank * 10


def _embed_core(a1: SymMatrix, n3: int) -> SymMatrix:
    n1 = a1.n
    if a1.exact:
        rows = [[a1.frac[i][j] if i < n1 and j < n1 else Fraction(0)
                 for j in range(n1 + n3)] for i in range(n1 + n3)]
        return SymMatrix(rows)
    m = np.zeros((n1 + n3, n1 + n3))
    m[:n1, :n1] = a1.data
    return SymMatrix(m)


def _core_b(b1: SymMatrix, b3: SymMatrix) -> SymMatrix:
    n1, n3 = b1.n, b3.n
    if b1.exact and (n3 == 0 or b3.exact):
        rows = [[Fraction(0)] * (n1 + n3) for _ in range(n1 + n3)]
        for i in range(n1):
            for j in range(n1):
                rows[i][j] = b1.frac[i][j]
        for i in range(n3):
            for j in range(n3):
                rows[n1 + i][n1 + j] = b3.frac[i][j]
        return SymMatrix(rows)
    m = np.zeros((n1 + n3, n1 + n3))
    m[:n1, :n1] = b1.data
    if n3:
        m[n1:, n1:] = b3.data
    return SymMatrix(m)


def _pair_disjointness_exact(a: SymMatrix, b: SymMatrix):
    """Certified sweep for an exact regular pencil.

    Isolates the real roots of det(A - lambda*B) with exact rational
    separators and probes each gap (plus B at infinity) for a definite
    member; signatures are exact.  Root points are probed only where a
    semidefinite-only contact is possible: at a root of multiplicity m, the
    negative-eigenvalue count can reach zero only if it is equal in both
    adjacent gaps and at most m (eigenvalue branches vanish to integer
    order, so a simple root always crosses).  Returns (disjoint, (x, y),
    strict).
    """
    n = a.n
    coef = la.pencil_poly_exact(a.frac, b.frac)
    lam = sympy.Symbol("lam")
    poly = sympy.Poly(sum(sympy.Rational(c.numerator, c.denominator) * lam ** (len(coef) - 1 - i)
                          for i, c in enumerate(coef)), lam)
    best = None
    # the member at infinity
    pos, neg, zero = la.fsym_signature(b.frac)
    if pos == 0 or neg == 0:
        combo = np.array([0.0, 1.0]) if pos else np.array([0.0, -1.0])
        if zero == 0:
            return (True, combo, True)
        best = (True, combo, False)
    probes, roots = _rational_separators(poly)
    sigs = []
    for q in probes:
        m = la.fsub(a.frac, la.fscale(b.frac, q))
        sig = la.fsym_signature(m)
        sigs.append(sig)
        pos, neg, zero = sig
        if zero == 0 and (pos == 0 or neg == 0):
            sign = 1.0 if pos else -1.0
            return (True, np.array([sign, -sign * float(q)]), True)
    mults = {}
    for r in poly.real_roots():
        mults[r] = mults.get(r, 0) + 1
    for i, r in enumerate(roots):
        if best is not None:
            break
        m = mults[r]
        left, right = sigs[i], sigs[i + 1]
        psd_possible = left[1] == right[1] and left[1] <= m
        nsd_possible = left[0] == right[0] and left[0] <= m
        if not (psd_possible or nsd_possible):
            continue
        if r.is_rational:
            q = Fraction(int(r.p), int(r.q))
            mm = la.fsub(a.frac, la.fscale(b.frac, q))
            pos, neg, zero = la.fsym_signature(mm)
            if (pos == 0 or neg == 0) and zero < n:
                sign = 1.0 if pos else -1.0
                best = (True, np.array([sign, -sign * float(q)]), False)
        else:
            best = _algebraic_root_semidefinite(a, b, r)
    return best if best is not None else (False, None, False)


def _rational_separators(poly):
    """(gap probes, real roots) for an exact univariate polynomial: exact
    rationals strictly between consecutive real roots plus flanking probes."""
    uniq = []
    for r in poly.real_roots():
        if not uniq or r != uniq[-1]:
            uniq.append(r)
    if not uniq:
        return [Fraction(0)], []
    # exact isolating intervals with rational endpoints (public API); refine
    # until pairwise disjoint so that midpoints are certified separators
    eps = sympy.Rational(1, 2)
    for _ in range(80):
        ivs = [iv for iv, _m in poly.intervals(eps=eps)]
        if all(ivs[i][1] < ivs[i + 1][0] for i in range(len(ivs) - 1)):
            break
        eps /= 16
    probes = [sympy.Rational(ivs[0][0]) - 1]
    for i in range(len(ivs) - 1):
        probes.append((sympy.Rational(ivs[i][1]) + sympy.Rational(ivs[i + 1][0])) / 2)
    probes.append(sympy.Rational(ivs[-1][1]) + 1)
    probes = [Fraction(int(q.p), int(q.q)) for q in probes]
    return probes, uniq


def _algebraic_root_semidefinite(a: SymMatrix, b: SymMatrix, root):
    """Semidefiniteness of A - r*B at an irrational real algebraic root r.

    Characteristic-polynomial coefficients are computed symbolically in the
    pencil parameter and reduced modulo the minimal polynomial of r, so each
    sign is the exact sign of a low-degree polynomial evaluated at r (zero
    iff the remainder vanishes identically).  Descartes counting is exact
    because all eigenvalues are real.
    """
    n = a.n
    t = sympy.Symbol("t")
    x = sympy.Symbol("x")
    m = sympy.Matrix([[sympy.Rational(a.frac[i][j].numerator, a.frac[i][j].denominator)
                       - t * sympy.Rational(b.frac[i][j].numerator, b.frac[i][j].denominator)
                       for j in range(n)] for i in range(n)])
    cp = m.charpoly(x).all_coeffs()          # polynomials in t, highest x-power first
    minpoly = sympy.Poly(root.poly if hasattr(root, "poly") else sympy.minimal_polynomial(root, t), t)
    signs_tail_first = []
    zeros_trailing = 0
    seen_nonzero = False
    for c in reversed(cp):
        rem = sympy.rem(sympy.Poly(c, t), minpoly, t)
        rem_poly = sympy.Poly(rem, t)
        if rem_poly.is_zero:
            cs = 0
        else:
            cs = _poly_sign_at_root(rem_poly, root)
        if cs == 0 and not seen_nonzero:
            zeros_trailing += 1
            continue
        seen_nonzero = True
        signs_tail_first.append(cs)
    signs = [s for s in reversed(signs_tail_first) if s != 0]
    pos = sum(1 for i in range(len(signs) - 1) if signs[i] != signs[i + 1])
    neg = (n - zeros_trailing) - pos
    if (pos == 0 or neg == 0) and zeros_trailing < n:
        sign = 1.0 if pos else -1.0
        rf = float(root.evalf(30))
        return (True, np.array([sign, -sign * rf]), False)
    return None


def _poly_sign_at_root(rem_poly, root) -> int:
    """Sign of a nonzero polynomial (degree < deg minpoly) at the algebraic
    root; certified by escalating-precision evaluation, which terminates
    because the value cannot be zero."""
    expr = rem_poly.as_expr()
    t = rem_poly.gens[0]
    for prec in (30, 60, 120, 240, 480):
        v = expr.subs(t, root).evalf(prec)
        if v.is_comparable and abs(v) > sympy.Float(10) ** (-(prec - 10)):
            return 1 if v > 0 else -1
    raise InconclusiveNumeric("sign of algebraic value could not be certified")


def _pair_disjointness_float(p: Pencil, tol: ToleranceConfig):
    """Float-lane sweep mirroring the exact referee."""
    a, b = p.A.data, p.B.data
    n = p.n
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1.0)
    best = None

    def classify(m):
        w = np.linalg.eigvalsh(m)
        ms = max(float(np.max(np.abs(w))), 1e-30)
        pos = int(np.sum(w > tol.eps_def * ms))
        neg = int(np.sum(w < -tol.eps_def * ms))
        return pos, neg, n - pos - neg

    pos, neg, zero = classify(b)
    if pos == 0 or neg == 0:
        combo = np.array([0.0, 1.0]) if pos else np.array([0.0, -1.0])
        if zero == 0:
            return (True, combo, True)
        best = (True, combo, False)
    coef = pencil_poly(p, tol)
    roots = np.roots(coef) if len(coef) > 1 else np.array([])
    rscale = 1.0 + max((abs(z) for z in roots), default=0.0)
    reals = sorted(z.real for z in roots if abs(z.imag) <= 1e-7 * rscale)
    merged = []
    for v in reals:
        if not merged or abs(v - merged[-1]) > 1e-9 * rscale:
            merged.append(v)
    probes = []
    if merged:
        probes.append(merged[0] - 1.0 - 0.1 * rscale)
        for i in range(len(merged) - 1):
            probes.append(0.5 * (merged[i] + merged[i + 1]))
        probes.append(merged[-1] + 1.0 + 0.1 * rscale)
    else:
        probes.append(0.0)
    for q in probes:
        pos, neg, zero = classify(a - q * b)
        if zero == 0 and (pos == 0 or neg == 0):
            sign = 1.0 if pos else -1.0
            return (True, np.array([sign, -sign * q]), True)
    for r in merged:
        pos, neg, zero = classify(a - r * b)
        if (pos == 0 or neg == 0) and zero < n:
            sign = 1.0 if pos else -1.0
            if best is None:
                best = (True, np.array([sign, -sign * r]), False)
    return best if best is not None else (False, None, False)


# ---------------------------------------------------------------------------
# sample points in plane intersections
# ---------------------------------------------------------------------------

def planes_meet_sample(mats, tol: ToleranceConfig = DEFAULT_TOL,
                       extra_seeds=None) -> SpdPoint | None:
    """A positive definite point trace-orthogonal to every input, or None.

    The intersection of the hyperplanes equals span(B_1, ..., B_m) cap P(n)
    for an orthocomplement basis B_i; a PD element is searched as the global
    maximizer of the smallest eigenvalue (a concave problem) and polished to
    an interior critical point of the determinant.
    """
    mats = [SymMatrix(m) for m in mats]
    n = mats[0].n if mats else 0
    basis = orthocomplement_basis(mats, n, tol)
    if not basis:
        return None
    c, m, _val = pd_in_span([SymMatrix(bm) for bm in basis], tol, seeds=extra_seeds)
    if c is None:
        return None
    m = la.sym(m)
    # projection cleanup: strip residual components along the inputs
    for a0 in mats:
        an = a0.data / np.linalg.norm(a0.data)
        m = la.sym(m - an * np.trace(an @ m))
    if np.linalg.eigvalsh(m)[0] <= 0:
        return None
    return SpdPoint(m, _skip_checks=True)


# ---------------------------------------------------------------------------
# sufficient bisector disjointness
# ---------------------------------------------------------------------------

def bisectors_disjoint_sufficient(x: SpdPoint, y: SpdPoint, z: SpdPoint,
                                  t: float, subset,
                                  tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Certify Bis(X,Y) cap Bis(Y,Z) = empty from chamber data.

    Maps Y to the identity and X, Z to the model flat; requires the diagonal
    images to lie in opposite truncated chambers (ChamberViolation otherwise).
    theta is the maximum angle between matched frame columns and L the smaller
    Selberg invariant from Y; frames are matched over axis relabelings and
    paired sign flips consistent with the requested chamber data, and any
    consistent arrangement satisfying the certificate inequality certifies.
    True certifies disjointness; False is uninformative.
    """
    n = x.n
    ch = Chamber(frozenset(subset), float(t), n)
    gx, dx = flat_coordinates(y, x)
    gz, dz = flat_coordinates(y, z)
    qx = so_frame(y, gx)
    qz = so_frame(y, gz)
    arr_x = _chamber_arrangements(dx, qx, ch)
    arr_z = _chamber_arrangements(dz, qz, ch.complement())
    if not arr_x or not arr_z:
        raise ChamberViolation("diagonal images do not lie in the requested chambers")
    ll = min(selberg(y, x), selberg(y, z))
    for qx2 in arr_x:
        for qz2 in arr_z:
            theta = _max_column_angle(qx2, qz2)
            if _certificate_inequality(theta, ll, float(t), n):
                return True
    return False


def _chamber_arrangements(d: SpdPoint, q: np.ndarray, ch: Chamber):
    """Frames (columns permuted, with paired sign fixes) whose permuted
    diagonal lies in the truncated chamber."""
    n = ch.n
    vals = np.diag(d.data)
    out = []
    for perm in itertools.permutations(range(n)):
        pv = vals[list(perm)]
        ok = all((pv[i] < 1.0) == (i in ch.subset) and pv[i] != 1.0 for i in range(n))
        if ok:
            logs = np.abs(np.log(pv))
            ok = float(np.min(logs) / np.max(logs)) >= ch.t
        if not ok:
            continue
        out.append(_align_signs(q[:, list(perm)]))
    return out


def _align_signs(q: np.ndarray) -> np.ndarray:
    """Flip column signs pairwise (det-preserving) to favor a nonnegative
    diagonal."""
    q = q.copy()
    neg = [j for j in range(q.shape[1]) if q[j, j] < 0]
    for a, b in zip(neg[0::2], neg[1::2]):
        q[:, a] = -q[:, a]
        q[:, b] = -q[:, b]
    return q


def _max_column_angle(qa: np.ndarray, qb: np.ndarray) -> float:
    d = np.clip(np.sum(qa * qb, axis=0), -1.0, 1.0)
    return float(np.max(np.arccos(d)))


def _certificate_inequality(theta: float, ll: float, t: float, n: int) -> bool:
    root = math.sqrt(max(n - 2, 0))
    den = math.cos(theta) - root * math.sin(theta)
    if den <= 0 or ll <= 1.0:
        return False
    lhs = (1.0 + root * math.sin(theta)) / den
    rhs = math.sqrt(t) * ((ll - 1.0) / (n - 1.0)) ** (t / 2.0)
    return lhs <= rhs


def scan_chambers(x: SpdPoint, y: SpdPoint, z: SpdPoint,
                  tol: ToleranceConfig = DEFAULT_TOL, t_grid=None):
    """Search all proper subsets and a t-grid for a certifying chamber pair.

    Returns (t, subset) on success, None otherwise.
    """
    n = x.n
    if t_grid is None:
        t_grid = [k / 20.0 for k in range(19, 0, -1)]
    subsets = []
    for r in range(1, n):
        subsets += [frozenset(c) for c in itertools.combinations(range(n), r)]
    for t in t_grid:
        for sub in subsets:
            try:
                if bisectors_disjoint_sufficient(x, y, z, t, sub, tol):
                    return t, sub
            except ChamberViolation:
                continue
    return None
