"""Word-ball enumeration, Dirichlet-Selberg domains, commuting-subgroup
classification with sidedness prediction, facet-existence witnesses, and
Schottky certification."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from . import linalg as la
from .config import DEFAULT_TOL, ToleranceConfig
from .core import (GroupElement, SpdPoint, SymMatrix, act,
                   bisector_normal, rescale_pow2)
from .errors import (BadSpectrum, EpsilonOutOfRange, GenericityViolation,
                     NotAbelian, NotOrthogonal, PreconditionFail,
                     StabilizerHit, UnitModulusEigenvalue, UnsupportedRank)
from .facelattice import FaceLattice, build_lattice
from .intersect import Definiteness, collection_definiteness, hyperplanes_intersect


# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Word:
    """Reduced word over labeled generators: ((label, exponent_sign), ...)."""

    letters: tuple

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        out = []
        for label, runs in itertools.groupby(self.letters):
            k = sum(1 for _ in runs)
            e = label[1] * k
            out.append(label[0] if e == 1 else f"{label[0]}^{e}")
        return "*".join(out)

    def __len__(self) -> int:
        return len(self.letters)


@dataclass
class GeneratorSet:
    n: int
    generators: list            # list of (label, GroupElement)

    def __post_init__(self):
        labels = [lab for lab, _g in self.generators]
        if len(set(labels)) != len(labels):
            raise ValueError("generator labels must be unique")
        for _lab, g in self.generators:
            if g.n != self.n:
                raise ValueError("generator dimension mismatch")


def _matrix_key(g: GroupElement, tol: float = 1e-10):
    if g.frac is not None:
        return ("x",) + tuple(x for row in g.frac for x in row)
    return ("f",) + tuple(np.round(g.data / tol).astype(np.int64).ravel().tolist())


def word_ball(gens: GeneratorSet, length: int, tol: ToleranceConfig = DEFAULT_TOL):
    """All group elements represented by reduced words of length <= l.

    Deduplicated by matrix equality (exact entries when available, entrywise
    1e-10 otherwise); the identity is excluded and the shortest word is kept
    per element.
    """
    if length < 1:
        raise ValueError("ball radius must be at least 1")
    letters = []
    for lab, g in gens.generators:
        letters.append(((lab, 1), g))
        letters.append(((lab, -1), g.inv()))
    seen = {_matrix_key(GroupElement(np.eye(gens.n), check=False)): None}
    out = []
    frontier = [(Word(()), GroupElement(np.eye(gens.n), check=False))]
    for _depth in range(length):
        nxt = []
        for w, m in frontier:
            last = w.letters[-1] if w.letters else None
            for letter, g in letters:
                if last is not None and last[0] == letter[0] and last[1] == -letter[1]:
                    continue  # not reduced
                w2 = Word(w.letters + (letter,))
                m2 = m @ g
                key = _matrix_key(m2)
                nxt.append((w2, m2))
                if key not in seen:
                    seen[key] = w2
                    out.append((m2, w2))
        frontier = nxt
    return out


def exponent_window(g: GroupElement, h: GroupElement | None, radius: int):
    """Commuting-pair enumeration g^i h^j over the box |i|, |j| <= radius
    (h omitted: the cyclic ball g^i, 1 <= |i| <= radius).  Returns
    (element, (i, j)) pairs without the identity."""
    pows_g = _power_table(g, radius)
    if h is None:
        order = sorted((i for i in range(-radius, radius + 1) if i != 0),
                       key=lambda i: (abs(i), -np.sign(i)))
        return [(pows_g[i], (i,)) for i in order]
    pows_h = _power_table(h, radius)
    idx = [(i, j) for i in range(-radius, radius + 1) for j in range(-radius, radius + 1)
           if (i, j) != (0, 0)]
    idx.sort(key=lambda ij: (abs(ij[0]) + abs(ij[1]), ij))
    return [(pows_g[i] @ pows_h[j], (i, j)) for i, j in idx]


def _power_table(g: GroupElement, radius: int):
    tab = {0: GroupElement(np.eye(g.n), check=False) if g.frac is None
              else GroupElement(la.feye(g.n), check=False)}
    for i in range(1, radius + 1):
        tab[i] = tab[i - 1] @ g
    gi = g.inv()
    for i in range(1, radius + 1):
        tab[-i] = tab[-(i - 1)] @ gi
    return tab


# ---------------------------------------------------------------------------
# Dirichlet-Selberg domains
# ---------------------------------------------------------------------------

@dataclass
class DSResult:
    lattice: FaceLattice
    labels: dict               # id(normal SymMatrix) -> label

    def facet_labels(self):
        out = []
        for f in self.lattice.facets():
            a = next(iter(f.face_set))
            out.append(self.labels.get(id(a)))
        return out

    def ridge_label_pairs(self):
        """Labels of the two facets through each codimension-2 face."""
        top_dim = self.lattice.top.dim
        facets = {id(f): next(iter(f.face_set)) for f in self.lattice.facets()}
        pairs = []
        for f in self.lattice.faces:
            if f.dim != top_dim - 2:
                continue
            supp = [g for g in self.lattice.faces
                    if f in g.pos and g.dim == top_dim - 1]
            labs = sorted(self.labels.get(id(next(iter(g.face_set)))) for g in supp)
            if len(labs) == 2:
                pairs.append(tuple(labs))
        return sorted(pairs)


def dirichlet_selberg(x: SpdPoint, elems, tol: ToleranceConfig = DEFAULT_TOL) -> DSResult:
    """Partial Dirichlet-Selberg domain for the listed elements, centered at
    a point not fixed by any of them.

    elems: iterable of GroupElement or (GroupElement, label) pairs.
    """
    pairs = []
    for e in elems:
        if isinstance(e, tuple):
            pairs.append(e)
        else:
            pairs.append((e, str(len(pairs))))
    normals = []
    labels = {}
    seen = set()
    for g, lab in pairs:
        key = _matrix_key(g)
        if key in seen:
            continue
        seen.add(key)
        gx = act(g, x)
        if np.max(np.abs(gx.data - x.data)) <= 1e-12 * max(1.0, float(np.max(np.abs(x.data)))):
            raise StabilizerHit(f"element {lab} fixes the center")
        a = rescale_pow2(bisector_normal(x, gx))
        normals.append(a)
        labels[id(a)] = lab
    lat = build_lattice(x, normals, tol)
    return DSResult(lat, labels)


# ---------------------------------------------------------------------------
# commuting-subgroup classification (n = 3, positive real spectra)
# ---------------------------------------------------------------------------

class AbelianKind:
    C1, C2, C3, C3P, C4 = "C1", "C2", "C3", "C3prime", "C4"
    G1, G1P, G2, G3, G4 = "G1", "G1prime", "G2", "G3", "G4"


FINITELY_SIDED = {AbelianKind.C1, AbelianKind.C3, AbelianKind.C4,
                  AbelianKind.G1, AbelianKind.G3}
INFINITELY_SIDED = {AbelianKind.C2, AbelianKind.C3P, AbelianKind.G1P,
                    AbelianKind.G2, AbelianKind.G4}


@dataclass
class AbelianType:
    kind: str
    conjugator: np.ndarray          # Q with Q^{-1} g Q in table shape
    params: dict = field(default_factory=dict)


def classify_abelian(gens: GeneratorSet, tol: ToleranceConfig = DEFAULT_TOL) -> AbelianType:
    """Table row of a discrete commuting subgroup of SL(3,R) whose generators
    have positive real eigenvalues, with a conjugator realizing the shape."""
    if gens.n != 3:
        raise UnsupportedRank("classification applies to n = 3")
    mats = [g for _lab, g in gens.generators]
    if len(mats) not in (1, 2):
        raise UnsupportedRank("classification covers 1 or 2 generators")
    for g in mats:
        w = np.linalg.eigvals(g.data)
        if np.max(np.abs(np.imag(w))) > 1e-9 or np.min(np.real(w)) <= 0:
            raise BadSpectrum("generators must have positive real eigenvalues")
    if len(mats) == 2:
        g1, g2 = mats[0].data, mats[1].data
        if np.max(np.abs(g1 @ g2 - g2 @ g1)) > 1e-9 * max(1.0, np.max(np.abs(g1 @ g2))):
            raise NotAbelian("generators do not commute")
    if len(mats) == 1:
        return _classify_cyclic(mats[0])
    return _classify_two_generated(mats[0], mats[1])


def _is_unipotent(m: np.ndarray) -> bool:
    w = np.linalg.eigvals(m)
    return bool(np.max(np.abs(w - 1.0)) < 1e-7)


def _nilpotent_rank(m: np.ndarray) -> int:
    return int(np.linalg.matrix_rank(m - np.eye(3), tol=1e-9))


def _is_diagonalizable(m: np.ndarray) -> bool:
    w = np.linalg.eigvals(m)
    w = np.real(w)
    for val in w:
        alg = int(np.sum(np.abs(w - val) < 1e-7 * (1 + abs(val))))
        geo = 3 - int(np.linalg.matrix_rank(m - val * np.eye(3), tol=1e-9))
        if geo < alg:
            return False
    return True


def _classify_cyclic(g: GroupElement) -> AbelianType:
    m = g.data
    if _is_unipotent(m):
        r = _nilpotent_rank(m)
        if r == 0:
            raise BadSpectrum("identity generates a trivial group")
        if r == 1:
            q = _jordan2_frame(m, 1.0)
            return AbelianType(AbelianKind.C1, q)
        q = _jordan3_frame(m)
        return AbelianType(AbelianKind.C2, q)
    if _is_diagonalizable(m):
        w, v = _real_eig(m)
        if np.min(np.abs(w - 1.0)) < 1e-9:
            # order as (e^s, e^{-s}, 1)
            iz = int(np.argmin(np.abs(w - 1.0)))
            rest = [i for i in range(3) if i != iz]
            rest.sort(key=lambda i: -w[i])
            order = [rest[0], rest[1], iz]
            q = v[:, order]
            s = math.log(w[rest[0]])
            return AbelianType(AbelianKind.C3P, q, {"s": s})
        order = np.argsort(-w)
        q = v[:, order]
        r, s, t = (math.log(w[i]) for i in order)
        return AbelianType(AbelianKind.C3, q, {"r": r, "s": s, "t": t})
    # non-diagonalizable, non-unipotent: eigenvalues (mu, mu, mu^-2)
    w = np.sort(np.real(np.linalg.eigvals(m)))
    mu = w[2] if abs(w[1] - w[2]) < abs(w[0] - w[1]) else w[0]
    q = _jordan2_frame(m, mu)
    return AbelianType(AbelianKind.C4, q, {"t": math.log(mu)})


def _real_eig(m: np.ndarray):
    w, v = np.linalg.eig(m)
    return np.real(w), np.real(v)


def _jordan2_frame(m: np.ndarray, mu: float) -> np.ndarray:
    """Q for a 2-block at mu plus a simple eigenvalue: Q^{-1} m Q =
    [[mu,1,0],[0,mu,0],[0,0,nu]]."""
    nmat = m - mu * np.eye(3)
    # generalized eigenspace of mu is 2-dim: kernel of nmat^2 restricted
    k2 = _nullspace(nmat @ nmat)
    if k2.shape[1] < 2:
        raise BadSpectrum("expected a two-dimensional generalized eigenspace")
    k2 = k2[:, :2]
    # chain vector: u in k2 with nmat u != 0
    u = None
    for j in range(k2.shape[1]):
        if np.linalg.norm(nmat @ k2[:, j]) > 1e-9:
            u = k2[:, j]
            break
    if u is None:
        u = k2[:, 0] + k2[:, 1]
        if np.linalg.norm(nmat @ u) <= 1e-9:
            raise BadSpectrum("generator is diagonalizable after all")
    e1 = nmat @ u
    others = _nullspace(m - _other_eigval(m, mu) * np.eye(3))
    e3 = others[:, 0]
    q = np.column_stack([e1, u, e3])
    return q / np.cbrt(np.linalg.det(q))


def _other_eigval(m: np.ndarray, mu: float) -> float:
    w = np.real(np.linalg.eigvals(m))
    idx = int(np.argmax(np.abs(w - mu)))
    return float(w[idx])


def _jordan3_frame(m: np.ndarray) -> np.ndarray:
    nmat = m - np.eye(3)
    n2 = nmat @ nmat
    u = None
    for j in range(3):
        if np.linalg.norm(n2[:, j]) > 1e-9:
            u = np.eye(3)[:, j]
            break
    if u is None:
        raise BadSpectrum("expected a full Jordan block")
    q = np.column_stack([n2 @ u, nmat @ u, u])
    return q / np.cbrt(np.linalg.det(q))


def _nullspace(m: np.ndarray) -> np.ndarray:
    return la.np_nullspace(m, 1e-9)


def _classify_two_generated(g1: GroupElement, g2: GroupElement) -> AbelianType:
    m1, m2 = g1.data, g2.data
    uni1, uni2 = _is_unipotent(m1), _is_unipotent(m2)
    if uni1 and uni2:
        r1, r2 = _nilpotent_rank(m1), _nilpotent_rank(m2)
        if max(r1, r2) == 2:
            base = m1 if r1 == 2 else m2
            q = _jordan3_frame(base)
            return AbelianType(AbelianKind.G2, q)
        im1 = _colspace(m1 - np.eye(3))
        im2 = _colspace(m2 - np.eye(3))
        joint = np.column_stack([im1, im2])
        dim_img = int(np.linalg.matrix_rank(joint, tol=1e-9))
        if dim_img == 1:
            q = _g1_frame(m1, m2)
            return AbelianType(AbelianKind.G1, q)
        q = _g1prime_frame(m1, m2)
        return AbelianType(AbelianKind.G1P, q)
    diag1, diag2 = _is_diagonalizable(m1), _is_diagonalizable(m2)
    if diag1 and diag2:
        q = _simultaneous_diag_frame(m1, m2)
        return AbelianType(AbelianKind.G3, q)
    base = m1 if not diag1 else m2
    w = np.sort(np.real(np.linalg.eigvals(base)))
    mu = w[2] if abs(w[1] - w[2]) < abs(w[0] - w[1]) else w[0]
    q = _jordan2_frame(base, mu)
    return AbelianType(AbelianKind.G4, q)


def _colspace(m: np.ndarray) -> np.ndarray:
    u, s, _vt = np.linalg.svd(m)
    r = int(np.sum(s > 1e-9 * max(s[0], 1.0)))
    return u[:, :r]


def _g1_frame(m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """Both unipotent with a shared one-dimensional image: shape
    [[1,k,l],[0,1,0],[0,0,1]]."""
    v = _colspace(m1 - np.eye(3))[:, 0]
    # (m_i - I) = v phi_i for linear functionals phi_i; build the dual pair
    phi1 = v @ (m1 - np.eye(3))
    phi2 = v @ (m2 - np.eye(3))
    phi1 = phi1 / (v @ v)
    phi2 = phi2 / (v @ v)
    gram = np.array([[phi1 @ phi1, phi1 @ phi2], [phi2 @ phi1, phi2 @ phi2]])
    rhs = np.linalg.solve(gram, np.eye(2))
    e2 = rhs[0, 0] * phi1 + rhs[1, 0] * phi2
    e3 = rhs[0, 1] * phi1 + rhs[1, 1] * phi2
    q = np.column_stack([v, e2, e3])
    return q / np.cbrt(np.linalg.det(q))


def _g1prime_frame(m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """Both unipotent with a shared two-dimensional kernel: shape
    [[1,0,l],[0,1,k],[0,0,1]]."""
    cands = [np.eye(3)[:, j] for j in range(3)]
    cands += [cands[0] + cands[1], cands[0] + cands[2], cands[1] + cands[2],
              cands[0] + cands[1] + cands[2]]
    for u in cands:
        w1 = (m1 - np.eye(3)) @ u
        w2 = (m2 - np.eye(3)) @ u
        q = np.column_stack([w2, w1, u])
        if abs(np.linalg.det(q)) > 1e-9:
            return q / np.cbrt(np.linalg.det(q))
    raise NotAbelian("generators do not span independent translation directions")


def _orth_complement(b: np.ndarray) -> np.ndarray:
    return la.np_nullspace(b.T, 1e-9)


def _intersect_spaces(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Intersection of two column spans."""
    na = _orth_complement(a)
    nb = _orth_complement(b)
    return la.np_nullspace(np.column_stack([na, nb]).T, 1e-9)


def _simultaneous_diag_frame(m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    w, v = _real_eig(m1)
    order = np.argsort(-w)
    w, v = w[order], v[:, order]
    # refine within repeated eigenvalue blocks using m2
    q = v.copy()
    i = 0
    while i < 3:
        j = i
        while j + 1 < 3 and abs(w[j + 1] - w[i]) <= 1e-7 * (1 + abs(w[i])):
            j += 1
        if j > i:
            block = v[:, i:j + 1]
            mm = np.linalg.pinv(block) @ m2 @ block
            _w2, v2 = _real_eig(mm)
            q[:, i:j + 1] = block @ v2
        i = j + 1
    return q / np.cbrt(np.linalg.det(q))


def predict_sidedness(t: AbelianType) -> str:
    """FinitelySided for C1/C3/C4/G1/G3; InfinitelySidedGeneric otherwise."""
    return "FinitelySided" if t.kind in FINITELY_SIDED else "InfinitelySidedGeneric"


# ---------------------------------------------------------------------------
# facet-existence witnesses (infinitely-sided families)
# ---------------------------------------------------------------------------

def witness_generator(kind: str, param: float = math.log(2.0)):
    """The one-parameter (or two-parameter) family g used by each witness."""
    if kind == AbelianKind.C2:
        def g(k):
            return np.array([[1.0, k, k * (k + 1) / 2.0], [0.0, 1.0, k], [0.0, 0.0, 1.0]])
        return g
    if kind == AbelianKind.C3P:
        def g(k):
            return np.diag([math.exp(param * k), math.exp(-param * k), 1.0])
        return g
    if kind == AbelianKind.G1P:
        def g(k, l):
            return np.array([[1.0, 0.0, l], [0.0, 1.0, k], [0.0, 0.0, 1.0]])
        return g
    if kind == "Heisenberg":
        def g(k, l, m):
            return np.array([[1.0, m, k * m + l], [0.0, 1.0, k], [0.0, 0.0, 1.0]])
        return g
    raise ValueError(f"unknown witness kind {kind}")


def _sg_value(gmat: np.ndarray, x: SpdPoint, a: np.ndarray) -> float:
    gx = gmat.T @ x.data @ gmat
    return float(np.trace(np.linalg.solve(gx, a)))


def facet_witness(kind: str, x: SpdPoint, target, eps: float = 0.1,
                  param: float = math.log(2.0), window: int = 50,
                  tol: ToleranceConfig = DEFAULT_TOL) -> SymMatrix:
    """A positive definite A whose orbit function s(g(.)X, A) attains its
    lattice minimum exactly at 0 and the target exponents, certifying the
    facet for g(target) in the Dirichlet-Selberg domain DS(X, <g>).

    Entries follow the leading-coefficient matching of the respective family;
    the last diagonal entry normalizes det(A) = 1, which makes A positive
    definite whenever the second leading minor is positive.
    """
    xinv = np.linalg.inv(x.data)

    def xi(i, j):
        return float(xinv[i - 1, j - 1])

    if kind == AbelianKind.C2:
        k0 = int(target if not isinstance(target, (tuple, list)) else target[0])
        if k0 == 0:
            raise ValueError("target exponent must be nonzero")
        a = _quartic_witness(x, k0)
        _check_scan(kind, x, a, (k0,), window, param)
        return SymMatrix(a)

    if kind == AbelianKind.C3P:
        k0 = int(target if not isinstance(target, (tuple, list)) else target[0])
        if k0 == 0:
            raise ValueError("target exponent must be nonzero")
        if abs(xi(1, 3) * xi(2, 3)) < 1e-12:
            raise GenericityViolation("witness needs x^13 x^23 != 0")
        mu = math.exp(param * k0)
        a11 = mu ** 2 / xi(1, 1)
        a12 = 0.0
        a22 = 1.0 / xi(2, 2)
        a23 = -(mu + 1.0) / xi(2, 3)
        a13 = -mu * (mu + 1.0) / xi(1, 3)
        a = _complete_det1([[a11, a12, a13], [a12, a22, a23]])
        _check_scan(kind, x, a, (k0,), window, param)
        return SymMatrix(a)

    if kind in (AbelianKind.G1P, "Heisenberg"):
        k0, l0 = (int(target[0]), int(target[1]))
        if math.gcd(abs(k0), abs(l0)) != 1:
            raise GenericityViolation("target exponents must be coprime")
        if kind == "Heisenberg":
            if abs(xi(2, 3)) > 1e-12:
                raise GenericityViolation("Heisenberg witness needs x^23 = 0")
            ratio = xi(1, 2) / xi(2, 2)
            lo, hi = sorted(((ratio - 0.5) * k0, (ratio + 0.5) * k0))
            if not (lo < l0 < hi):
                raise GenericityViolation(
                    "target exponents fall outside the admissible window for this center")
        e = float(eps)
        for _ in range(40):
            a = _ellipse_witness(xinv, k0, l0, e, heisenberg=(kind == "Heisenberg"))
            if a is not None and _scan_ok(kind, x, a, (k0, l0), 10, param):
                _check_scan(kind, x, a, (k0, l0), 10, param)
                return SymMatrix(a)
            e *= 0.5
        raise EpsilonOutOfRange("no epsilon in the searched window certifies the witness")

    raise ValueError(f"unknown witness kind {kind}")


def _quartic_witness(x: SpdPoint, k0: int) -> np.ndarray:
    """A with s(g(k).X, A) = k^2 (k - k0)^2 + const for the full Jordan-block
    family, by matching the k^4..k^1 coefficients.

    Each coefficient is linear in the entries of A (the orbit Gram matrix has
    unit determinant, so its inverse is polynomial in k); the resulting
    4 x 5 system has a one-dimensional kernel used to push the leading 2 x 2
    minor positive, and det(A) = 1 then forces positive definiteness.
    """
    g = witness_generator(AbelianKind.C2)
    nodes = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    pairs = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2)]
    cols = []
    for i, j in pairs:
        e = np.zeros((3, 3))
        e[i, j] = e[j, i] = 1.0
        vals = [np.trace(np.linalg.solve(g(k).T @ x.data @ g(k), e)) for k in nodes]
        cols.append(np.polyfit(nodes, vals, 4))
    coeff = np.array(cols).T[:4]          # rows k^4, k^3, k^2, k^1
    rhs = np.array([1.0, -2.0 * k0, float(k0 * k0), 0.0])
    sol, _res, rank, _sv = np.linalg.lstsq(coeff, rhs, rcond=None)
    if rank < 4:
        raise GenericityViolation("coefficient system is rank-deficient")
    null = np.linalg.svd(coeff)[2][-1]
    if abs(null[3]) > 1e-12:
        null = null * np.sign(null[3])
    step = 1.0
    for _ in range(80):
        a11, a12, a13, a22, a23 = sol
        if a11 > 0 and a11 * a22 - a12 ** 2 > 1.0:
            return _complete_det1([[a11, a12, a13], [a12, a22, a23]])
        sol = sol + step * null
        step *= 2.0
    raise EpsilonOutOfRange("could not reach a positive leading minor")


def _ellipse_witness(xinv: np.ndarray, k0: int, l0: int, eps: float,
                     heisenberg: bool) -> np.ndarray | None:
    def xi(i, j):
        return float(xinv[i - 1, j - 1])

    a11 = eps ** 2 * l0 ** 2 + k0 ** 2
    a12 = -(1.0 - eps ** 2) * k0 * l0
    a22 = eps ** 2 * k0 ** 2 + l0 ** 2
    dd = a11 * a22 - a12 ** 2
    if dd <= 0:
        return None
    kc_shift = 0.0 if heisenberg else xi(2, 3) / xi(3, 3)
    lc_shift = xi(1, 3) / xi(3, 3)
    u = dd * (k0 / 2.0 - kc_shift)
    v = dd * (l0 / 2.0 - lc_shift)
    mat = np.array([[a11, -a12], [-a12, a22]])
    sol = np.linalg.solve(mat, np.array([u, v]))
    a23, a13 = float(sol[0]), float(sol[1])
    a = _complete_det1([[a11, a12, a13], [a12, a22, a23]])
    if heisenberg:
        mc = (a12 * xi(2, 2) + a11 * xi(1, 2)) / (a11 * xi(2, 2))
        if abs(mc) >= 0.5:
            return None
    return a


def _complete_det1(rows2) -> np.ndarray:
    """Fill a33 so the symmetric completion has determinant one."""
    (a11, a12, a13), (_a21, a22, a23) = rows2
    minor2 = a11 * a22 - a12 ** 2
    if minor2 <= 0:
        raise EpsilonOutOfRange("leading 2x2 minor is not positive")
    rest = a11 * a23 ** 2 - 2.0 * a12 * a13 * a23 + a22 * a13 ** 2
    a33 = (1.0 + rest) / minor2
    return np.array([[a11, a12, a13], [a12, a22, a23], [a13, a23, a33]])


def witness_scan(kind: str, x: SpdPoint, a: np.ndarray, window: int,
                 param: float = math.log(2.0)):
    """Lattice argmins of s(g(.)X, A) over the symmetric window."""
    g = witness_generator(kind, param)
    vals = {}
    if kind in (AbelianKind.C2, AbelianKind.C3P):
        for k in range(-window, window + 1):
            vals[(k,)] = _sg_value(g(k), x, a)
    elif kind == AbelianKind.G1P:
        for k in range(-window, window + 1):
            for l in range(-window, window + 1):
                vals[(k, l)] = _sg_value(g(k, l), x, a)
    else:  # Heisenberg
        for k in range(-window, window + 1):
            for l in range(-window, window + 1):
                for m in range(-2, 3):
                    vals[(k, l, m)] = _sg_value(g(k, l, m), x, a)
    lo = min(vals.values())
    cut = lo + 1e-7 * max(1.0, abs(lo))
    return sorted(key for key, v in vals.items() if v <= cut)


def _scan_ok(kind, x, a, target, window, param) -> bool:
    mins = witness_scan(kind, x, a, window, param)
    want = _expected_minima(kind, target)
    return mins == want


def _check_scan(kind, x, a, target, window, param) -> None:
    mins = witness_scan(kind, x, a, window, param)
    want = _expected_minima(kind, target)
    if mins != want:
        raise EpsilonOutOfRange(f"orbit scan minima {mins} differ from {want}")


def _expected_minima(kind, target):
    if kind in (AbelianKind.C2, AbelianKind.C3P):
        return sorted([(0,), (int(target[0]),)])
    if kind == AbelianKind.G1P:
        return sorted([(0, 0), (int(target[0]), int(target[1]))])
    return sorted([(0, 0, 0), (int(target[0]), int(target[1]), 0)])


# ---------------------------------------------------------------------------
# Schottky machinery
# ---------------------------------------------------------------------------

def invariant_subspaces(a: GroupElement, tol: ToleranceConfig = DEFAULT_TOL):
    """Dimensions and bases of the expanding/contracting subspaces of A^T."""
    w = np.linalg.eigvals(a.data)
    if np.min(np.abs(np.abs(w) - 1.0)) < 1e-9:
        raise UnitModulusEigenvalue("an eigenvalue has unit modulus")
    t, z, sdim = scipy.linalg.schur(a.data.T, output="real",
                                    sort=lambda re, im: re * re + im * im > 1.0)
    plus = z[:, :sdim]
    t2, z2, sdim2 = scipy.linalg.schur(a.data.T, output="real",
                                       sort=lambda re, im: re * re + im * im < 1.0)
    minus = z2[:, :sdim2]
    return sdim, sdim2, plus, minus


def schottky_power(gens: GeneratorSet, m_max: int = 64,
                   tol: ToleranceConfig = DEFAULT_TOL):
    """Smallest M <= m_max with all pairs of the 2k power-bisector normals
    pairwise Definite, or None.

    Requires even n, half-dimensional expanding/contracting subspaces, and
    pairwise disjointness of all of them.
    """
    n = gens.n
    if n % 2:
        raise PreconditionFail("even dimension required")
    spaces = []
    for _lab, g in gens.generators:
        dp, dm, plus, minus = invariant_subspaces(g, tol)
        if dp != n // 2 or dm != n // 2:
            raise PreconditionFail("subspaces must be half-dimensional")
        spaces += [plus, minus]
    for i in range(len(spaces)):
        for j in range(i + 1, len(spaces)):
            cat = np.column_stack([spaces[i], spaces[j]])
            if np.linalg.matrix_rank(cat, tol=1e-9) < n:
                raise PreconditionFail("expanding/contracting subspaces are not disjoint")
    for m in range(1, m_max + 1):
        if _pairwise_definite_at(gens, m, tol):
            return m
    return None


def _power_normals(gens: GeneratorSet, m: int):
    out = []
    for _lab, g in gens.generators:
        for mat in (np.linalg.matrix_power(g.data, m), np.linalg.matrix_power(g.data, -m)):
            out.append(SymMatrix(np.linalg.inv(mat.T @ mat) - np.eye(gens.n)))
    return out


def _pairwise_definite_at(gens: GeneratorSet, m: int, tol: ToleranceConfig) -> bool:
    normals = _power_normals(gens, m)
    for a, b in itertools.combinations(normals, 2):
        if collection_definiteness([a, b], tol).kind != Definiteness.DEFINITE:
            return False
    return True


def schottky_certify(x: SpdPoint, gens: GeneratorSet,
                     tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff DS(X, {g_i^{+-1}}) is 2k-sided and ridge-free, with every
    facet bisector keeping the center and all other facets on its positive
    side."""
    elems = []
    for lab, g in gens.generators:
        elems.append((g, lab))
        elems.append((g.inv(), lab + "^-1"))
    ds = dirichlet_selberg(x, elems, tol)
    lat = ds.lattice
    k = len(gens.generators)
    facets = lat.facets()
    if len(facets) != 2 * k or len(lat.faces) != 1 + 2 * k:
        return False
    top_dim = lat.top.dim
    if any(f.dim < top_dim - 1 for f in lat.faces if f is not lat.top):
        return False
    normals = [next(iter(f.face_set)) for f in facets]
    for i, a in enumerate(normals):
        for j, b in enumerate(normals):
            if i >= j:
                continue
            if hyperplanes_intersect(a, b, tol, want_point=False).verdict != "Disjoint":
                return False
    for i, a in enumerate(normals):
        for j, f in enumerate(facets):
            if i == j:
                continue
            s = float(np.trace(a.data @ f.sample.data))
            if s <= 0:
                return False
    return True


# ---------------------------------------------------------------------------
# integer rotation stabilizer and limit half-spaces
# ---------------------------------------------------------------------------

def so3_integer_points():
    """The 24 signed permutation matrices of determinant one (SO(3) cap
    SL(3,Z))."""
    out = []
    for perm in itertools.permutations(range(3)):
        p = np.zeros((3, 3))
        for i, j in enumerate(perm):
            p[i, j] = 1.0
        for signs in itertools.product((1.0, -1.0), repeat=3):
            m = p * np.array(signs)[:, None]
            if abs(np.linalg.det(m) - 1.0) < 1e-9:
                out.append(GroupElement(m.astype(int).tolist(), check=False))
    return out


def sl3z_limit_halfspaces(e: SymMatrix, stab, tol: ToleranceConfig = DEFAULT_TOL):
    """First-order normals E - gamma^T E gamma of the stabilizer half-spaces
    at a center degenerating to the identity along I + eps*E; identity and
    E-commuting elements drop out."""
    out = []
    for g in stab:
        gd = g.data
        if np.max(np.abs(gd.T @ gd - np.eye(3))) > 1e-9:
            raise NotOrthogonal("stabilizer elements must be orthogonal")
        if e.exact and g.frac is not None:
            cand = SymMatrix(la.fsub(e.frac, la.fmul(la.ftranspose(g.frac),
                                                     la.fmul(e.frac, g.frac))))
        else:
            cand = SymMatrix(e.data - gd.T @ e.data @ gd)
        if not cand.is_zero(1e-12):
            out.append(cand)
    return out
