"""Incremental face-poset construction for finitely-sided convex polyhedra
in P(n).

The lattice is built one half-space at a time.  Each insertion classifies
every face against the new half-space (six relative positions), splits the
crossing faces, deletes the outside ones, rebuilds the strict-containment
sets, regenerates sample points, and prunes normals that no longer support a
facet.  Faces and normals are tracked by object identity, so index drift
cannot occur; indices are materialized only on export.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .config import DEFAULT_TOL, ToleranceConfig
from .core import SpdPoint, SymMatrix
from .errors import InconclusiveNumeric, SeedNotInterior
from .intersect import (FEASIBILITY_FLOOR, max_slack_over_slice,
                        orthocomplement_basis, pd_in_span, sym_to_vec,
                        vec_to_sym)

P_IN = 1   # face inside the boundary hyperplane
P_INT = 2  # face in the open half-space
P_TOUCH = 3
P_OUT = 4
P_GRAZE = 5
P_CROSS = 6


@dataclass(eq=False)
class Face:
    face_set: set            # set of SymMatrix objects (normals whose planes contain the face)
    pos: set = field(default_factory=set)   # Faces strictly contained in this one
    sample: SpdPoint | None = None
    dim: int = -1

    def __hash__(self):
        return id(self)


class FaceLattice:
    """Face poset of an intersection of half-spaces {tr(A_i Y) >= 0}."""

    def __init__(self, n: int, seed: SpdPoint, tol: ToleranceConfig = DEFAULT_TOL):
        self.n = n
        self.tol = tol
        self.normals: list[SymMatrix] = []
        top = Face(face_set=set(), sample=seed, dim=n * (n + 1) // 2 - 1)
        self.faces: list[Face] = [top]
        self.audit_log: list[str] = []

    # -- basic queries ------------------------------------------------------

    @property
    def top(self) -> Face:
        return self.faces[0]

    def facets(self) -> list[Face]:
        return [f for f in self.faces if len(f.face_set) == 1]

    def faces_of_dim(self, d: int) -> list[Face]:
        return [f for f in self.faces if f.dim == d]

    def face_index_sets(self):
        """Sorted 0-based index tuples into self.normals, one per face."""
        order = {id(a): i for i, a in enumerate(self.normals)}
        return [tuple(sorted(order[id(a)] for a in f.face_set)) for f in self.faces]

    # -- span helpers ---------------------------------------------------------

    def _span_rank(self, mats) -> int:
        mats = list(mats)
        if not mats:
            return 0
        if all(m.exact for m in mats):
            rows = tuple(_frac_vec(m) for m in mats)
            return la.frank(rows)
        rows = np.array([sym_to_vec(m.data) for m in mats])
        return la.np_rank(rows, self.tol.eps_rank)

    def _in_span(self, mats, a: SymMatrix) -> bool:
        base = self._span_rank(mats)
        return self._span_rank(list(mats) + [a]) == base

    def _tangent_basis(self, face: Face, extra=()):
        eqs = list(face.face_set) + list(extra)
        return orthocomplement_basis(eqs, self.n, self.tol)

    # -- sample machinery ----------------------------------------------------

    def _slack_scale(self, a: SymMatrix, x: SpdPoint) -> float:
        return float(np.linalg.norm(a.data) * np.linalg.norm(x.data))

    def _relint_point(self, eqs, seeds=()) -> SpdPoint | None:
        """Strictly feasible point of {tr(EY)=0 for E in eqs} cap
        {tr(AY) > 0 for retained A}: constraint slacks ride along the
        smallest-eigenvalue maximization as scalar blocks, so the barrier
        path decides feasibility."""
        basis = orthocomplement_basis(list(eqs), self.n, self.tol)
        if not basis:
            return None
        rows = []
        for a in self.normals:
            r = np.array([np.trace(a.data @ b) for b in basis])
            nr = np.linalg.norm(r)
            if nr > self.tol.eps_rank * max(1.0, np.linalg.norm(a.data)):
                rows.append(r / nr)
        rows = np.array(rows) if rows else None
        seed_vecs = []
        for s in seeds:
            if s is None:
                continue
            v = np.array([np.trace(b @ s.data) for b in basis])
            if np.linalg.norm(v) > 1e-12:
                seed_vecs.append(v / np.linalg.norm(v))
        c, t = max_slack_over_slice(basis, rows, self.tol, seeds=seed_vecs,
                                    stop_at=1e-4)
        if c is None or t is None or t <= FEASIBILITY_FLOOR:
            return None
        x = la.sym(sum(ci * b for ci, b in zip(c, basis)))
        if np.linalg.eigvalsh(x)[0] <= 0:
            return None
        return SpdPoint(x, _skip_checks=True)

    def _project_to_plane(self, x: SpdPoint, eqs) -> SpdPoint | None:
        """Trace-orthogonal projection of a point onto the plane of eqs."""
        basis = orthocomplement_basis(list(eqs), self.n, self.tol)
        if not basis:
            return None
        v = sum(b * np.trace(b @ x.data) for b in basis)
        v = la.sym(v)
        if np.linalg.eigvalsh(v)[0] <= 1e-14:
            return None
        return SpdPoint(v, _skip_checks=True)

    def _push_sample(self, face: Face, anchor: SpdPoint) -> SpdPoint | None:
        """Relative-interior point of a half-plane face from its minimal
        face's sample: step along a tangent direction of span(face), halving
        epsilon until every strict inequality clears with slack."""
        basis = self._tangent_basis(face)
        xinv = np.linalg.inv(anchor.data)
        dirs = []
        for b in basis:
            t = b - anchor.data * (np.trace(xinv @ b) / self.n)
            if np.linalg.norm(t) > 1e-12:
                dirs.append(t / np.linalg.norm(t))
        scale = float(np.linalg.norm(anchor.data))
        for d in dirs:
            for sgn in (1.0, -1.0):
                eps = scale / 64.0
                for _ in range(40):
                    cand = SpdPoint(la.sym(anchor.data + sgn * eps * d), _skip_checks=True) \
                        if np.linalg.eigvalsh(anchor.data + sgn * eps * d)[0] > 0 else None
                    if cand is not None and self._face_sample_valid(face, cand):
                        return cand
                    eps *= 0.5
        return None

    def _face_sample_valid(self, face: Face, x: SpdPoint,
                           slack_floor: float | None = None) -> bool:
        """PD, on the face's plane, strictly inside every constraint that is
        not degenerate on that plane.

        slack_floor overrides the eps_geom target for razor-thin faces whose
        certified maximum slack falls below it; signs stay reliable well
        above the 1e-14 noise floor.
        """
        w = np.linalg.eigvalsh(x.data)
        floor_pd = slack_floor if slack_floor is not None else self.tol.eps_def
        if w[0] <= floor_pd * max(1.0, w[-1]):
            return False
        basis = self._tangent_basis(face)
        slack = slack_floor if slack_floor is not None else self.tol.eps_geom
        for a in face.face_set:
            if abs(np.trace(a.data @ x.data)) > self.tol.eps_geom * self._slack_scale(a, x):
                return False
        for a in self.normals:
            if a in face.face_set:
                continue
            row = np.array([np.trace(a.data @ b) for b in basis])
            if np.linalg.norm(row) <= self.tol.eps_rank * 10 * max(1.0, np.linalg.norm(a.data)):
                continue  # constraint degenerates on the plane
            if np.trace(a.data @ x.data) <= slack * self._slack_scale(a, x):
                return False
        return True

    # -- insertion ------------------------------------------------------------

    def add_halfspace(self, a_l: SymMatrix) -> None:
        """Intersect the polyhedron with {tr(A_l Y) >= 0} and update all data."""
        if not isinstance(a_l, SymMatrix):
            a_l = SymMatrix(a_l)
        if a_l.is_zero(1e-300):
            raise ValueError("half-space normal must be nonzero")
        self.normals.append(a_l)
        order = sorted(self.faces, key=lambda f: f.dim)
        position: dict[Face, int] = {}
        probe_points: dict[Face, SpdPoint] = {}
        for f in order:
            if not f.pos:
                position[f] = self._position_minimal(f, a_l, probe_points)
            else:
                position[f] = self._position_dispatch(f, a_l, position, probe_points)
        self._apply_positions(a_l, position, probe_points)
        self._prune_nonfacets()

    def _position_minimal(self, f: Face, a_l: SymMatrix, probe_points) -> int:
        if self._in_span(f.face_set, a_l):
            f.face_set.add(a_l)
            return P_IN
        if f.dim == 0:
            # the plane is a single point: crossing is impossible
            return P_INT if np.trace(a_l.data @ f.sample.data) > 0 else P_OUT
        pt = self._boundary_probe(f, a_l)
        if pt is not None:
            probe_points[f] = pt
            return P_CROSS
        return P_INT if np.trace(a_l.data @ f.sample.data) > 0 else P_OUT

    def _boundary_probe(self, f: Face, a_l: SymMatrix) -> SpdPoint | None:
        """A strictly feasible point of span(F) cap bd(H_l), or None."""
        eqs = list(f.face_set) + [a_l]
        proj = self._project_to_plane(f.sample, eqs) if f.sample is not None else None
        seeds = [proj]
        for g in f.pos:
            if g.sample is not None:
                seeds.append(self._project_to_plane(g.sample, eqs))
        return self._relint_point(eqs, seeds=[s for s in seeds if s is not None])

    def _position_dispatch(self, f: Face, a_l: SymMatrix, position, probe_points) -> int:
        sub = [position[g] for g in f.pos]
        if any(p == P_CROSS for p in sub):
            return P_CROSS
        has_in = any(p in (P_INT, P_TOUCH) for p in sub)
        has_out = any(p in (P_OUT, P_GRAZE) for p in sub)
        if has_in and has_out:
            return P_CROSS
        if any(p in (P_IN, P_TOUCH, P_GRAZE) for p in sub):
            if self._in_span(f.face_set, a_l):
                f.face_set.add(a_l)
                return P_IN
            s = np.trace(a_l.data @ f.sample.data)
            return P_TOUCH if s > 0 else P_GRAZE
        # every proper face strictly inside (or strictly outside)
        inside = all(p == P_INT for p in sub)
        pt = self._boundary_probe(f, a_l)
        if pt is not None:
            probe_points[f] = pt
            return P_CROSS
        return P_INT if inside else P_OUT

    def _apply_positions(self, a_l: SymMatrix, position, probe_points) -> None:
        hats: dict[Face, Face] = {}
        for f in list(self.faces):
            if position[f] == P_CROSS:
                hat = Face(face_set=set(f.face_set) | {a_l}, dim=f.dim - 1)
                hats[f] = hat
        # containment sets: crossing proper faces stay (trimmed in place) and
        # additionally contribute their boundary sections
        for f in list(self.faces):
            p = position[f]
            keep = {g for g in f.pos if position[g] in (P_IN, P_INT, P_TOUCH, P_CROSS)}
            sections = {hats[g] for g in f.pos if position[g] == P_CROSS}
            if p in (P_IN, P_INT, P_TOUCH):
                f.pos = keep | sections
            elif p == P_CROSS:
                hat = hats[f]
                hat.pos = {g for g in f.pos if position[g] == P_IN} | sections
                f.pos = keep | sections | {hat}
        # delete faces outside the half-space
        self.faces = [f for f in self.faces if position[f] in (P_IN, P_INT, P_TOUCH, P_CROSS)]
        self.faces.extend(sorted(hats.values(), key=lambda h: h.dim))
        # samples, ascending dimension so proper-face samples are ready
        hat_src = {id(h): f for f, h in hats.items()}
        for f in sorted(self.faces, key=lambda ff: ff.dim):
            if id(f) in hat_src:
                self._sample_for_hat(f, probe_points.get(hat_src[id(f)]))
            elif position.get(f) == P_CROSS:
                self._sample_for_trimmed(f, hats[f])
        self._audit_samples()

    def _sample_for_hat(self, hat: Face, probe: SpdPoint | None) -> None:
        if not hat.pos:
            if probe is not None:
                hat.sample = probe
                return
            hat.sample = self._relint_point(list(hat.face_set))
            if hat.sample is None:
                raise InconclusiveNumeric("no sample for a minimal section face")
            return
        props = [g.sample for g in hat.pos if g.sample is not None]
        if len(hat.pos) >= 2:
            bary = SpdPoint(la.sym(sum(p.data / np.linalg.norm(p.data) for p in props)),
                            _skip_checks=True)
            if self._face_sample_valid(hat, bary):
                hat.sample = bary
                return
        elif len(hat.pos) == 1:
            anchor = next(iter(hat.pos)).sample
            pushed = self._push_sample(hat, anchor)
            if pushed is not None:
                hat.sample = pushed
                return
        # the barrier search certifies strict feasibility beyond what float
        # re-measurement can confirm on razor-thin faces; trust its verdict
        candidate = self._relint_point(list(hat.face_set),
                                       seeds=[self._project_to_plane(p, list(hat.face_set)) for p in props])
        if candidate is None:
            raise InconclusiveNumeric("no relative-interior sample for a section face")
        hat.sample = candidate

    def _sample_for_trimmed(self, f: Face, hat: Face) -> None:
        if f.sample is not None and self._face_sample_valid(f, f.sample):
            return
        props = [g.sample for g in f.pos if g.sample is not None]
        if len(f.pos) >= 2:
            bary = SpdPoint(la.sym(sum(p.data / np.linalg.norm(p.data) for p in props)),
                            _skip_checks=True)
            if self._face_sample_valid(f, bary):
                f.sample = bary
                return
        anchor = hat.sample
        if anchor is not None:
            pushed = self._push_sample(f, anchor)
            if pushed is not None:
                f.sample = pushed
                return
        candidate = self._relint_point(list(f.face_set),
                                       seeds=[self._project_to_plane(p, list(f.face_set)) for p in props])
        if candidate is None:
            raise InconclusiveNumeric("no relative-interior sample for a trimmed face")
        f.sample = candidate

    def _audit_samples(self) -> None:
        for f in self.faces:
            if f.sample is None:
                raise InconclusiveNumeric("face left without a sample point")

    # -- step (10): normal pruning -------------------------------------------

    def _prune_nonfacets(self) -> None:
        supported = set()
        for f in self.faces:
            if len(f.face_set) == 1:
                supported.add(next(iter(f.face_set)))
        # keep normals listed in face sets consistent under removal
        for a in list(self.normals):
            if a in supported:
                continue
            self.normals.remove(a)
            for f in self.faces:
                if a in f.face_set:
                    old_rank = self._span_rank(f.face_set)
                    f.face_set.discard(a)
                    if self._span_rank(f.face_set) != old_rank:
                        rebuilt = self._maximal_face_set(f)
                        if self._span_rank(rebuilt) != old_rank:
                            self.audit_log.append("span lost while pruning a redundant normal")
                            raise InconclusiveNumeric("pruning broke a face span")
                        f.face_set = rebuilt
                        self.audit_log.append("face set rebuilt after pruning")

    def _maximal_face_set(self, f: Face) -> set:
        """All retained normals whose hyperplane contains span(F)."""
        basis = self._tangent_basis(f)
        out = set()
        for a in self.normals:
            if all(abs(np.trace(a.data @ b)) <= self.tol.eps_rank * 10 * max(1.0, np.linalg.norm(a.data))
                   for b in basis):
                out.add(a)
        return out

    # -- exports ---------------------------------------------------------------

    def to_lists(self):
        """The four output lists: retained normals, per-face index sets,
        strict-containment sets, samples (1-based face and normal indices)."""
        nidx = {id(a): i + 1 for i, a in enumerate(self.normals)}
        fidx = {id(f): j + 1 for j, f in enumerate(self.faces)}
        l_face = [sorted(nidx[id(a)] for a in f.face_set) for f in self.faces]
        l_pos = [sorted(fidx[id(g)] for g in f.pos) for f in self.faces]
        l_samp = [f.sample.data.tolist() for f in self.faces]
        a_list = [a.data.tolist() for a in self.normals]
        return a_list, l_face, l_pos, l_samp

    def to_json(self) -> str:
        a_list, l_face, l_pos, l_samp = self.to_lists()
        return json.dumps({"n": self.n, "A": a_list, "L_face": l_face,
                           "L_pos": l_pos, "L_samp": l_samp}, indent=1)

    def covers(self):
        """Hasse covering pairs (face j covers face l), 0-based indices."""
        fidx = {id(f): j for j, f in enumerate(self.faces)}
        out = []
        for f in self.faces:
            for g in f.pos:
                if not any(g in h.pos for h in f.pos):
                    out.append((fidx[id(f)], fidx[id(g)]))
        return sorted(out)

    def to_dot(self) -> str:
        nidx = {id(a): i + 1 for i, a in enumerate(self.normals)}
        lines = ["digraph poset {", "  rankdir=BT;"]
        for j, f in enumerate(self.faces):
            label = "P" if not f.face_set else \
                "{" + ",".join(str(i) for i in sorted(nidx[id(a)] for a in f.face_set)) + "}"
            lines.append(f'  f{j} [label="{label} (dim {f.dim})"];')
        for up, down in self.covers():
            lines.append(f"  f{down} -> f{up};")
        lines.append("}")
        return "\n".join(lines)


def from_lists(n: int, a_list, l_face, l_pos, l_samp, tol: ToleranceConfig = DEFAULT_TOL) -> FaceLattice:
    """Rebuild a lattice object from exported lists."""
    lat = FaceLattice.__new__(FaceLattice)
    lat.n = n
    lat.tol = tol
    lat.audit_log = []
    lat.normals = [SymMatrix(a) for a in a_list]
    faces = []
    for fs, samp in zip(l_face, l_samp):
        faces.append(Face(face_set={lat.normals[i - 1] for i in fs},
                          sample=SpdPoint(np.asarray(samp), _skip_checks=True)))
    for f, ps in zip(faces, l_pos):
        f.pos = {faces[j - 1] for j in ps}
    for f in faces:
        basis = orthocomplement_basis(list(f.face_set), n, tol)
        f.dim = len(basis) - 1
    lat.faces = faces
    return lat


def build_lattice(seed: SpdPoint, normals, tol: ToleranceConfig = DEFAULT_TOL) -> FaceLattice:
    """Fold the half-spaces {tr(A_i Y) >= 0} over a strictly interior seed."""
    normals = [a if isinstance(a, SymMatrix) else SymMatrix(a) for a in normals]
    for a in normals:
        s = np.trace(a.data @ seed.data)
        if s <= tol.eps_geom * np.linalg.norm(a.data) * np.linalg.norm(seed.data):
            raise SeedNotInterior("seed must satisfy tr(A_i X) > 0 strictly for every normal")
    lat = FaceLattice(seed.n, seed, tol)
    for a in normals:
        lat.add_halfspace(a)
    return lat


def _frac_vec(m: SymMatrix):
    n = m.n
    out = []
    for i in range(n):
        for j in range(i, n):
            out.append(m.frac[i][j] if i == j else 2 * m.frac[i][j])
    return tuple(out)
