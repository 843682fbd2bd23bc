"""Pair-type classification and the invariant angle function for co-oriented
hyperplanes, plus closed-form cosine oracles for 3, 4, and 5 distinct real
eigenvalues."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .core import SymMatrix, require_indefinite
from .errors import UndefinedAngle, UnknownSingular, UnsupportedK
from .pencil import (COALESCE_GAP, INF, Pencil, generalized_eigenvalues,
                     is_regular, pseudo_generalized_eigenvalues)


@dataclass(frozen=True)
class CoorientedHyperplane:
    """A hyperplane A^perp = {X : tr(AX) = 0} with a chosen normal sign.

    The normal must be indefinite, otherwise the locus in P(n) is empty and
    the constructor rejects it.  Positive rescaling gives the same co-oriented
    hyperplane; negation flips the co-orientation.
    """

    normal: SymMatrix

    def __post_init__(self):
        require_indefinite(self.normal)

    def __neg__(self) -> "CoorientedHyperplane":
        return CoorientedHyperplane(-self.normal)


class PairKind:
    NONREAL = "NonrealSpectrum"           # type (1)
    REAL_MANY = "RealAtLeast3Distinct"    # type (2)
    REAL_FEW = "RealAtMost2Distinct"      # type (3)
    SINGULAR = "SingularPencil"           # singular, too few pseudo-eigenvalues


@dataclass
class PairType:
    kind: str
    eigenvalues: list = field(default_factory=list)   # relevant value payload
    pseudo: bool = False                              # classified via pseudo-eigenvalues


def _distinct_classes(values, gap=COALESCE_GAP):
    """Collapse near-equal reals into classes (floats only); exact values
    compare exactly."""
    out = []
    for v in values:
        if v == INF:
            if INF not in out:
                out.append(INF)
            continue
        if isinstance(v, (int,)) or hasattr(v, "denominator"):
            if v not in out:
                out.append(v)
            continue
        scale = 1.0 + abs(v)
        if not any(w != INF and not isinstance(w, complex) and abs(float(w) - v) <= gap * scale for w in out):
            out.append(v)
    return out


def pair_type(s1: CoorientedHyperplane, s2: CoorientedHyperplane,
              tol: ToleranceConfig = DEFAULT_TOL) -> PairType:
    """Type (1)/(2)/(3) by the spectrum of the pencil of normals; singular
    pencils are classified by pseudo-generalized eigenvalues when they carry
    enough of them."""
    p = Pencil(s1.normal, s2.normal)
    if is_regular(p, tol):
        es = generalized_eigenvalues(p, tol)
        nonreal = es.nonreal()
        if nonreal:
            return PairType(PairKind.NONREAL, [e.value for e in nonreal])
        reals = _distinct_classes([e.value for e in es.distinct_real_or_inf()])
        if len(reals) >= 3:
            return PairType(PairKind.REAL_MANY, reals)
        return PairType(PairKind.REAL_FEW, reals)
    vals, _r = pseudo_generalized_eigenvalues(p, tol)
    nonreal = [v for v in vals if isinstance(v, complex)]
    if nonreal:
        return PairType(PairKind.NONREAL, nonreal, pseudo=True)
    reals = _distinct_classes([v for v in vals if not isinstance(v, complex)])
    if len(reals) >= 3:
        return PairType(PairKind.REAL_MANY, reals, pseudo=True)
    return PairType(PairKind.SINGULAR, reals, pseudo=True)


def _cos_from_cyclic_sums(lams) -> float:
    """cos(theta) for ascending distinct reals via the cyclic sums, with the
    index convention lam_{k+1} := lam_1."""
    k = len(lams)
    s1 = s2 = s3 = 0.0
    for i in range(k):
        a, b = lams[i], lams[(i + 1) % k]
        d = b - a
        s1 += 1.0 / d
        s2 += (b + a) / d
        s3 += (b + a) ** 2 / d
    return s2 / math.sqrt(s1 * s3)


def _cos_with_infinity(lams_finite) -> float:
    """The lam_k -> infinity limit of the cyclic-sum formula; lams_finite is
    the ascending list of the finite eigenvalues."""
    m = len(lams_finite)          # = k - 1
    s1 = s2 = s3 = 0.0
    for i in range(m - 1):
        a, b = lams_finite[i], lams_finite[i + 1]
        d = b - a
        s1 += 1.0 / d
        s2 += (b + a) / d
        s3 += (b * b - b * a + a * a) / d
    return s2 / math.sqrt(s1 * 4.0 * s3)


def invariant_angle(s1: CoorientedHyperplane, s2: CoorientedHyperplane,
                    tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """The invariant angle in [0, pi].

    Nonreal spectrum: mean |arg| over the upper-half representatives.  At
    least three distinct real-or-infinity eigenvalues: arccos of the cyclic
    sums (the explicit limit form when infinity occurs).  Raises
    UndefinedAngle for type (3) and UnknownSingular for singular pencils with
    too few real pseudo-eigenvalues.
    """
    pt = pair_type(s1, s2, tol)
    return _angle_from_type(pt)


def _angle_from_type(pt: PairType) -> float:
    if pt.kind == PairKind.NONREAL:
        args = [abs(np.angle(complex(v))) for v in pt.eigenvalues]
        return float(sum(args) / len(args))
    if pt.kind == PairKind.REAL_MANY:
        vals = pt.eigenvalues
        has_inf = INF in vals
        finite = sorted(float(v) for v in vals if v != INF)
        c = _cos_with_infinity(finite) if has_inf else _cos_from_cyclic_sums(finite)
        c = min(1.0, max(-1.0, c))
        return math.acos(c)
    if pt.kind == PairKind.REAL_FEW:
        raise UndefinedAngle("at most 2 distinct real eigenvalues: no invariant angle exists")
    raise UnknownSingular("singular pencil with too few pseudo-eigenvalues; existence unclear")


def appendix_cos_oracle(k: int, lams) -> float:
    """Closed-form cos(theta) for k = 3, 4, 5 ascending distinct reals.

    Independent of the cyclic-sum route: evaluates the per-k polynomial
    expressions directly.
    """
    lams = [float(x) for x in lams]
    if sorted(lams) != lams or len(set(lams)) != len(lams):
        raise ValueError("eigenvalues must be strictly ascending")
    if k != len(lams):
        raise ValueError("k must match the number of eigenvalues")
    if k == 3:
        l1, l2, l3 = lams
        num = (l1 * l1 * l2 + l2 * l2 * l3 + l3 * l3 * l1
               + l1 * l2 * l2 + l2 * l3 * l3 + l3 * l1 * l1
               - 6 * l1 * l2 * l3)
        f1 = l1 * l1 + l2 * l2 + l3 * l3 - l1 * l2 - l2 * l3 - l3 * l1
        f2 = (l1 * l1 * l2 * l2 + l2 * l2 * l3 * l3 + l3 * l3 * l1 * l1
              - l1 * l1 * l2 * l3 - l2 * l2 * l3 * l1 - l3 * l3 * l1 * l2)
        return num / (2.0 * math.sqrt(f1 * f2))
    if k == 4:
        l1, l2, l3, l4 = lams
        num = l4 * l2 - l3 * l1
        f1 = l4 - l3 + l2 - l1
        f2 = l4 * l3 * l2 - l4 * l3 * l1 + l4 * l2 * l1 - l3 * l2 * l1
        return num / math.sqrt(f1 * f2)
    if k == 5:
        def cyc(expr):
            tot = 0.0
            for sh in range(5):
                l = [lams[(i + sh) % 5] for i in range(5)]
                tot += expr(*l)
            return tot

        num = cyc(lambda a, b, c, d, e:
                  3 * a * a * b * c * d + 3 * a * b * c * d * d
                  - a * a * c * c * d - a * a * c * d * d
                  - a * b * b * c * d - a * b * c * c * d)
        num -= 10 * lams[0] * lams[1] * lams[2] * lams[3] * lams[4]
        f1 = cyc(lambda a, b, c, d, e:
                 a * a * b * c + a * b * c * c + a * a * c * d
                 - a * a * c * c - a * b * c * d - a * b * b * c)
        f2 = cyc(lambda a, b, c, d, e:
                 a * a * b * b * c * d + a * a * b * c * d * d + a * b * c * c * d * d
                 - a * b * b * c * c * d - a * a * b * b * d * d - a * a * b * c * d * e)
        return num / (2.0 * math.sqrt(f1 * f2))
    raise UnsupportedK(f"no closed form for k = {k}")
