"""The universal space ``U(G, C)`` as a cell complex of parabolic cosets.

A cell is a pair ``(face f, coset g G_f)`` where ``G_f`` is the standard
parabolic subgroup generated by ``s(f)``.  Cell ``(f', c')`` lies in the
closure of ``(f, c)`` when ``f'`` is a face of ``f`` and ``c`` is contained
in ``c'``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .chamber import Equipment, FacePoset, validate_equipment, validate_face_poset
from .classify import classify_system
from .core import restrict
from .geomrep import ChamberGraph, enumerate_group, tits_generators


class BudgetExhausted(RuntimeError):
    pass


class TruncatedComplexError(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    face: int
    coset: int
    dim: int
    rep: int  # chamber-graph index of the shortlex-least coset element
    boundary: bool


@dataclass
class CellComplex:
    poset: FacePoset
    equipment: Equipment
    graph: ChamberGraph
    cells: list
    coset_of: dict  # face -> array over group elements of coset ids (-1 unknown)
    cell_index: dict  # (face, coset) -> cell id
    incidence: list  # (lower cell, upper cell) pairs
    action: np.ndarray  # generator x chamber cell -> chamber cell, -1 outside
    truncated: bool
    ball_radius: int | None = None
    _chamber_cells: list = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return self.poset.dimension

    def cells_of_dim(self, d: int):
        return [i for i, c in enumerate(self.cells) if c.dim == d]

    def counts(self):
        """Number of cells per dimension, from 0 up to the top dimension."""
        out = [0] * (self.dimension + 1)
        for c in self.cells:
            out[c.dim] += 1
        return out

    def chamber_cells(self):
        """Chamber cell ids, indexed by group element."""
        return self._chamber_cells

    def chamber_adjacency(self):
        """Map wall cell -> list of chamber cells incident to it."""
        top = self.dimension
        walls = {}
        for lo, hi in self.incidence:
            if self.cells[hi].dim == top and self.cells[lo].dim == top - 1:
                walls.setdefault(lo, []).append(hi)
        return walls

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "truncated": self.truncated,
            "counts": self.counts(),
            "cells": [
                {"id": i, "face": c.face, "coset": c.coset, "dim": c.dim,
                 "rep": list(self.graph.words[c.rep]), "boundary": c.boundary}
                for i, c in enumerate(self.cells)
            ],
            "incidence": [list(p) for p in self.incidence],
            "action": [[int(x) for x in row] for row in self.action],
        }

    def to_dot(self) -> str:
        lines = ["graph chambers {"]
        for cell in self._chamber_cells:
            if cell >= 0:
                w = self.graph.words[self.cells[cell].rep]
                lines.append(f'  {cell} [label="{"".join(f"s{k}" for k in w) or "e"}"];')
        for wall, ch in sorted(self.chamber_adjacency().items()):
            if len(ch) == 2:
                lines.append(f'  {ch[0]} -- {ch[1]} [label="{self.cells[wall].face}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _parabolic_matrices(eq: Equipment, gens, subset):
    """Matrices (full Tits representation) of the parabolic on ``subset``."""
    if not subset:
        return [np.eye(eq.matrix.rank)]
    idx = sorted(subset)
    sub = enumerate_group(restrict(eq.matrix, idx))
    if not sub.complete:
        raise BudgetExhausted(f"parabolic on {idx} did not close")
    mats = []
    for word in sub.words:
        M = np.eye(eq.matrix.rank)
        for k in word:
            M = M @ gens[idx[k]]
        mats.append(M)
    return mats


def build_universal_space(
    poset: FacePoset, eq: Equipment, ball_radius=None, budget: int = 200_000
) -> CellComplex:
    """Cells ``(face, coset)`` of ``U(G, C)``; a ball of words if G is infinite."""
    prep = validate_face_poset(poset)
    if not prep.ok:
        raise ValueError("invalid face poset: " + "; ".join(prep.errors))
    erep = validate_equipment(poset, eq)
    if not erep.ok:
        raise ValueError("invalid equipment: " + "; ".join(erep.errors))

    finite = classify_system(eq.matrix).verdict == "finite"
    if finite:
        graph = enumerate_group(eq.matrix, budget=budget)
        if not graph.complete:
            raise BudgetExhausted(f"group enumeration exceeded budget {budget}")
        truncated = False
    else:
        if ball_radius is None:
            raise ValueError("infinite group: ball_radius is required")
        graph = enumerate_group(eq.matrix, budget=budget, max_len=ball_radius)
        if graph.radius_complete < ball_radius:
            raise BudgetExhausted(f"ball of radius {ball_radius} exceeded budget {budget}")
        truncated = True

    gens = tits_generators(eq.matrix)
    n = poset.dimension
    N = len(graph)
    max_codim = max(f.codim for f in poset.faces)
    cells, cell_index, coset_of = [], {}, {}
    for k, face in enumerate(poset.faces):
        subset = eq.face_generators(poset, k)
        para = _parabolic_matrices(eq, gens, subset)
        assign = np.full(N, -1, dtype=np.int64)
        n_cosets = 0
        for g in range(N):
            if assign[g] >= 0:
                continue
            partial = False
            Mg = graph.matrices[g]
            for Mw in para:
                h = graph.lookup(Mg @ Mw)
                if h is None:
                    partial = True
                else:
                    assign[h] = n_cosets
            boundary = truncated and (
                partial or graph.lengths[g] >= ball_radius - max_codim
            )
            cell_index[(k, n_cosets)] = len(cells)
            cells.append(Cell(k, n_cosets, n - face.codim, g, bool(boundary)))
            n_cosets += 1
        coset_of[k] = assign

    incidence = []
    for cid, cell in enumerate(cells):
        walls = poset.faces[cell.face].walls
        for k2, f2 in enumerate(poset.faces):
            if k2 != cell.face and walls < f2.walls:
                lower = cell_index[(k2, int(coset_of[k2][cell.rep]))]
                incidence.append((lower, cid))
    incidence.sort()

    top = poset.chamber_index()
    chamber_cells = [cell_index[(top, int(coset_of[top][g]))] for g in range(N)]
    action = np.full((eq.matrix.rank, N), -1, dtype=np.int64)
    for s in range(eq.matrix.rank):
        for g in range(N):
            sg = int(graph.left[s, g])
            if sg >= 0:
                action[s, g] = chamber_cells[sg]
    return CellComplex(
        poset=poset,
        equipment=eq,
        graph=graph,
        cells=cells,
        coset_of=coset_of,
        cell_index=cell_index,
        incidence=incidence,
        action=action,
        truncated=truncated,
        ball_radius=ball_radius,
        _chamber_cells=chamber_cells,
    )


@dataclass
class ManifoldReport:
    wall_cells: list = field(default_factory=list)
    action_defined: list = field(default_factory=list)
    free: list = field(default_factory=list)
    transitive: list = field(default_factory=list)
    connected: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not any(
            (self.wall_cells, self.action_defined, self.free, self.transitive, self.connected)
        )

    def to_json(self) -> dict:
        checks = {
            "wall_cells": self.wall_cells,
            "action_defined": self.action_defined,
            "free": self.free,
            "transitive": self.transitive,
            "connected": self.connected,
        }
        return {
            "passed": self.passed,
            "checks": {k: {"passed": not v, "witnesses": v[:20]} for k, v in checks.items()},
        }


def _components(nodes, edges):
    adj = {v: [] for v in nodes}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen, comps = set(), []
    for v in nodes:
        if v in seen:
            continue
        comp, queue = [], deque([v])
        seen.add(v)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def check_manifold_and_action(cx: CellComplex) -> ManifoldReport:
    rep = ManifoldReport()
    top = cx.dimension
    adjacency = cx.chamber_adjacency()
    for cid in cx.cells_of_dim(top - 1):
        if cx.cells[cid].boundary:
            continue
        k = len(adjacency.get(cid, ()))
        if k != 2:
            rep.wall_cells.append({"cell": cid, "chambers": k})

    chambers = cx.chamber_cells()
    elem_of = {c: g for g, c in enumerate(chambers)}
    interior = [c for c in chambers if not cx.cells[c].boundary]
    rank = cx.action.shape[0]
    for s in range(rank):
        for g, c in enumerate(chambers):
            if cx.cells[c].boundary:
                continue
            img = int(cx.action[s, g])
            if img < 0:
                rep.action_defined.append({"generator": s, "chamber": c, "image": None})
            elif int(cx.action[s, elem_of[img]]) != c:
                rep.action_defined.append({"generator": s, "chamber": c, "image": img})
            elif img == c:
                rep.free.append({"generator": s, "chamber": c})

    base = chambers[0]
    hit = {}
    for g, word in enumerate(cx.graph.words):
        c = base
        for s in reversed(word):
            c = int(cx.action[s, elem_of[c]])
            if c < 0:
                break
        if c < 0:
            continue
        if c in hit:
            rep.free.append({"elements": [hit[c], g], "chamber": c})
        else:
            hit[c] = g
    for c in interior:
        if c not in hit:
            rep.transitive.append({"chamber": c})

    if not cx.truncated:
        perms = [np.array([elem_of[int(x)] for x in cx.action[s]]) for s in range(rank)]
        group = _permutation_closure(perms, len(chambers))
        if group is None or group != len(chambers):
            rep.free.append({"permutation_group_order": group, "chambers": len(chambers)})

    edges = [(a, b) for a, b in (tuple(v) for v in adjacency.values() if len(v) == 2)]
    comps = _components(chambers, edges)
    if len(comps) != 1:
        rep.connected.append({"components": len(comps)})
    return rep


def _permutation_closure(perms, n, cap=100_000):
    """Order of the permutation group generated by ``perms`` (None past ``cap``)."""
    ident = np.arange(n)
    seen = {ident.tobytes()}
    queue = deque([ident])
    while queue:
        p = queue.popleft()
        for q in perms:
            r = q[p]
            key = r.tobytes()
            if key not in seen:
                if len(seen) >= cap:
                    return None
                seen.add(key)
                queue.append(r)
    return len(seen)


def dissecting_components(cx: CellComplex, s: int) -> int:
    """Components of the chamber graph after cutting the walls fixed by generator ``s``."""
    chambers = cx.chamber_cells()
    elem_of = {c: g for g, c in enumerate(chambers)}
    edges = []
    for wall, pair in cx.chamber_adjacency().items():
        if len(pair) != 2:
            continue
        a, b = pair
        if int(cx.action[s, elem_of[a]]) == b:
            continue
        edges.append((a, b))
    return len(_components(chambers, edges))


def euler_characteristic(cx: CellComplex) -> int:
    if cx.truncated:
        raise TruncatedComplexError("Euler characteristic needs a complete complex")
    return sum((-1) ** c.dim for c in cx.cells)
