"""Recognition of finite and affine Coxeter systems.

Each connected component of the diagram is matched by diagram isomorphism
against catalogs of the irreducible finite and affine types.  The Gram
signature is computed as an independent oracle and any disagreement raises
:class:`ClassificationMismatch`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (
    INF,
    CoxeterDiagram,
    CoxeterMatrix,
    connected_components,
    diagrams_isomorphic,
    format_entry,
)
from .geomrep import gram_matrix

GRAM_TOL = 1e-8


class ClassificationMismatch(RuntimeError):
    """Catalog matching and Gram signature disagree."""


class NotFiniteError(ValueError):
    pass


FINITE_FAMILIES = {"A", "B", "D", "E6", "E7", "E8", "F4", "H3", "H4", "G2", "I2"}


@dataclass(frozen=True)
class ComponentLabel:
    """Type of one irreducible component.

    ``family`` is a finite family name, ``"affine-X"`` for an affine type
    (``X`` in A, B, C, D, E6, E7, E8, F4, G2), or ``"indefinite"``.
    ``l`` is the type index (rank for finite types, rank - 1 for affine
    types); ``m`` is the dihedral parameter.
    """

    family: str
    l: int | None = None
    m: float | None = None
    alias: str | None = None

    def __post_init__(self):
        f, l = self.family, self.l
        if f == "A" and (l is None or l < 1):
            raise ValueError("A_l needs l >= 1")
        if f == "B" and (l is None or l < 2):
            raise ValueError("B_l needs l >= 2")
        if f == "D" and (l is None or l < 4):
            raise ValueError("D_l needs l >= 4")
        if f == "I2" and (self.m is None or (self.m != INF and self.m < 3)):
            raise ValueError("I2(m) needs m >= 3")

    @property
    def kind(self) -> str:
        if self.family in FINITE_FAMILIES:
            return "finite"
        if self.family.startswith("affine-"):
            return "affine"
        return "indefinite"

    @property
    def name(self) -> str:
        f = self.family
        if f == "I2":
            return f"I2({format_entry(self.m)})"
        if f in ("A", "B", "D"):
            return f"{f}{self.l}"
        if f.startswith("affine-"):
            base = f[len("affine-"):]
            return f"~{base}" if base[-1].isdigit() else f"~{base}{self.l}"
        return f

    def order(self) -> int:
        """Order of the finite group of this type."""
        f, l = self.family, self.l
        if f == "A":
            return math.factorial(l + 1)
        if f == "B":
            return 2**l * math.factorial(l)
        if f == "D":
            return 2 ** (l - 1) * math.factorial(l)
        if f == "I2":
            return 2 * int(self.m)
        fixed = {"E6": 51840, "E7": 2903040, "E8": 696729600, "F4": 1152,
                 "H3": 120, "H4": 14400, "G2": 12}
        if f in fixed:
            return fixed[f]
        raise NotFiniteError(f"{self.name} is not a finite type")

    def to_json(self) -> dict:
        out = {"family": self.family, "name": self.name, "kind": self.kind}
        if self.l is not None:
            out["l"] = self.l
        if self.m is not None:
            out["m"] = format_entry(self.m) if self.m == INF else self.m
        if self.alias:
            out["alias"] = self.alias
        return out


# --- catalog diagrams --------------------------------------------------------

def _path(labels):
    return [(k, k + 1, m) for k, m in enumerate(labels)]


def _diagram(rank, edges) -> CoxeterDiagram:
    return CoxeterDiagram(tuple(range(rank)), tuple(e for e in edges if e[2] != 2))


def _arms(lengths):
    """Star with centre 0 and arms of the given lengths, all labels 3."""
    edges, nxt = [], 1
    for a in lengths:
        prev = 0
        for _ in range(a):
            edges.append((prev, nxt, 3))
            prev, nxt = nxt, nxt + 1
    return nxt, edges


def diagram_A(l):
    return _diagram(l, _path([3] * (l - 1)))


def diagram_B(l):
    return _diagram(l, _path([3] * (l - 2) + [4]))


def diagram_D(l):
    return _diagram(l, _path([3] * (l - 2)) + [(l - 3, l - 1, 3)])


def diagram_E(l):
    return _diagram(l, _path([3] * (l - 2)) + [(2, l - 1, 3)])


def diagram_F4():
    return _diagram(4, _path([3, 4, 3]))


def diagram_H(l):
    return _diagram(l, _path([5] + [3] * (l - 2)))


def diagram_I2(m):
    return _diagram(2, [(0, 1, m)])


def affine_A(l):
    if l == 1:
        return _diagram(2, [(0, 1, INF)])
    return _diagram(l + 1, _path([3] * l) + [(0, l, 3)])


def affine_B(l):
    # fork 0,1 -> 2, path to l-1, then a 4 to l
    return _diagram(l + 1, [(0, 2, 3), (1, 2, 3)] + [(k, k + 1, 3) for k in range(2, l - 1)]
                    + [(l - 1, l, 4)])


def affine_C(l):
    return _diagram(l + 1, _path([4] + [3] * (l - 2) + [4]))


def affine_D(l):
    return _diagram(l + 1, [(0, 2, 3), (1, 2, 3)] + [(k, k + 1, 3) for k in range(2, l - 2)]
                    + [(l - 2, l - 1, 3), (l - 2, l, 3)])


def affine_E(l):
    arms = {6: (2, 2, 2), 7: (3, 3, 1), 8: (5, 2, 1)}[l]
    rank, edges = _arms(arms)
    return _diagram(rank, edges)


def affine_F4():
    return _diagram(5, _path([3, 3, 4, 3]))


def affine_G2():
    return _diagram(3, _path([3, 6]))


def _finite_catalog(rank):
    out = [(ComponentLabel("A", rank), diagram_A(rank))]
    if rank >= 2:
        out.append((ComponentLabel("B", rank), diagram_B(rank)))
    if rank >= 4:
        out.append((ComponentLabel("D", rank), diagram_D(rank)))
    if rank in (6, 7, 8):
        out.append((ComponentLabel(f"E{rank}"), diagram_E(rank)))
    if rank == 4:
        out.append((ComponentLabel("F4"), diagram_F4()))
    if rank in (3, 4):
        out.append((ComponentLabel(f"H{rank}"), diagram_H(rank)))
    return out


def _affine_catalog(rank):
    l = rank - 1
    out = []
    if l >= 1:
        out.append((ComponentLabel("affine-A", l), affine_A(l)))
    if l >= 3:
        out.append((ComponentLabel("affine-B", l), affine_B(l)))
    if l >= 2:
        out.append((ComponentLabel("affine-C", l), affine_C(l)))
    if l >= 4:
        out.append((ComponentLabel("affine-D", l), affine_D(l)))
    if l in (6, 7, 8):
        out.append((ComponentLabel(f"affine-E{l}", l), affine_E(l)))
    if l == 4:
        out.append((ComponentLabel("affine-F4", l), affine_F4()))
    if l == 2:
        out.append((ComponentLabel("affine-G2", l), affine_G2()))
    return out


def _invariant(d: CoxeterDiagram):
    return tuple(sorted(d.signature(v) for v in d.vertices))


@lru_cache(maxsize=None)
def _catalog_index(rank):
    """Catalog keyed by vertex-signature multiset, plus the edge counts and
    labels that occur at this rank (cheap rejection before any search)."""
    index = {}
    edge_counts, labels = set(), set()
    for label, d in _finite_catalog(rank) + _affine_catalog(rank):
        index.setdefault(_invariant(d), []).append((label, d))
        edge_counts.add(len(d.edges))
        labels.update(m for *_, m in d.edges)
    return index, frozenset(edge_counts), frozenset(labels)


def catalog(rank: int):
    """All catalog ``(label, diagram)`` pairs of a given rank (rank-2 dihedral ones excluded)."""
    return _finite_catalog(rank) + _affine_catalog(rank)


def label_component(d: CoxeterDiagram) -> ComponentLabel:
    """Combinatorial type of a connected diagram."""
    if d.rank == 1:
        return ComponentLabel("A", 1)
    if d.rank == 2:
        m = d.label(d.vertices[0], d.vertices[1])
        if m == INF:
            return ComponentLabel("affine-A", 1)
        named = {3: ComponentLabel("A", 2, alias="I2(3)"),
                 4: ComponentLabel("B", 2, alias="I2(4)"),
                 6: ComponentLabel("G2", alias="I2(6)")}
        return named.get(m, ComponentLabel("I2", m=m))
    index, edge_counts, labels = _catalog_index(d.rank)
    if len(d.edges) not in edge_counts or any(m not in labels for *_, m in d.edges):
        return ComponentLabel("indefinite")
    for label, cand in index.get(_invariant(d), ()):
        if diagrams_isomorphic(d, cand) is not None:
            return label
    return ComponentLabel("indefinite")


def gram_kind(matrix: CoxeterMatrix, tol: float = GRAM_TOL) -> str:
    """Signature verdict for a connected matrix: finite / affine / indefinite."""
    ev = np.linalg.eigvalsh(gram_matrix(matrix))
    if ev[0] > tol:
        return "finite"
    if ev[0] >= -tol and (len(ev) == 1 or ev[1] > tol):
        return "affine"
    return "indefinite"


@dataclass(frozen=True)
class ClassificationReport:
    components: tuple  # (ComponentLabel, original vertex tuple) pairs
    verdict: str
    order: int | None

    @property
    def labels(self):
        return [lab for lab, _ in self.components]

    def to_json(self) -> dict:
        return {
            "components": [
                dict(lab.to_json(), generators=list(vs)) for lab, vs in self.components
            ],
            "verdict": self.verdict,
            "order": None if self.order is None else str(self.order),
        }


def _verdict(kinds) -> str:
    infinite = [k for k in kinds if k != "finite"]
    if not infinite:
        return "finite"
    if all(k == "affine" for k in infinite):
        return "affine"
    if all(k == "indefinite" for k in infinite):
        return "indefinite"
    return "mixed"


def classify_system(matrix: CoxeterMatrix, check: bool = True) -> ClassificationReport:
    """Label every component of the diagram and give an overall verdict.

    With ``check`` the Gram signature of each component is compared with its
    label and a mismatch raises :class:`ClassificationMismatch`.
    """
    comps = []
    for comp, vmap in connected_components(matrix.diagram()):
        label = label_component(comp)
        if check:
            sub = comp.to_matrix()
            oracle = gram_kind(sub)
            if oracle != label.kind:
                raise ClassificationMismatch(
                    f"component {vmap} matched {label.name} ({label.kind}) but the Gram "
                    f"signature says {oracle}"
                )
        comps.append((label, vmap))
    verdict = _verdict([lab.kind for lab, _ in comps])
    order = None
    if verdict == "finite":
        order = 1
        for lab, _ in comps:
            order *= lab.order()
    return ClassificationReport(tuple(comps), verdict, order)


def finite_group_order(matrix: CoxeterMatrix) -> int:
    report = classify_system(matrix)
    if report.verdict != "finite":
        raise NotFiniteError(f"group is not finite (verdict {report.verdict})")
    return report.order


def is_finite(matrix: CoxeterMatrix) -> bool:
    return classify_system(matrix, check=False).verdict == "finite"
