"""Coxeter matrices and Coxeter diagrams.

A Coxeter matrix is stored as a tuple of tuples whose entries are Python
ints or :data:`INF` (``math.inf``).  The text format uses ``0`` for an
infinite entry; internally ``0`` never appears.
"""
from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

INF = math.inf

DEFAULT_MAX_RANK = 12


class CoxeterMatrixError(ValueError):
    """Base class for invalid Coxeter matrix input."""


class RaggedRowsError(CoxeterMatrixError):
    pass


class NotSymmetricError(CoxeterMatrixError):
    pass


class DiagonalError(CoxeterMatrixError):
    pass


class OffDiagonalError(CoxeterMatrixError):
    pass


class EntryParseError(CoxeterMatrixError):
    pass


def _normalize_entry(value):
    if type(value) is int and value > 0:
        return value
    if value == 0 or value == "inf" or value == INF or value is None:
        return INF
    if isinstance(value, bool):
        raise EntryParseError(f"not an integer entry: {value!r}")
    if isinstance(value, float):
        if not value.is_integer():
            raise EntryParseError(f"non-integer entry {value!r}")
        return int(value)
    if isinstance(value, int):
        return value
    raise EntryParseError(f"not an integer entry: {value!r}")


def format_entry(m) -> str:
    return "inf" if m == INF else str(m)


@dataclass(frozen=True)
class CoxeterMatrix:
    """Validated Coxeter matrix.

    ``labels`` records, for each row, the index of the generator it came from
    in the matrix this one was restricted from (identity for fresh matrices).
    """

    entries: tuple
    labels: tuple = field(default=())

    def __post_init__(self):
        rows = tuple(
            tuple(v if type(v) is int and v > 0 else _normalize_entry(v) for v in row)
            for row in self.entries
        )
        n = len(rows)
        if n == 0:
            raise CoxeterMatrixError("empty matrix")
        for i, row in enumerate(rows):
            if len(row) != n:
                raise RaggedRowsError(f"row {i} has {len(row)} entries, expected {n}")
        for i in range(n):
            if rows[i][i] != 1:
                raise DiagonalError(f"m[{i}][{i}] = {format_entry(rows[i][i])}, expected 1")
        for i in range(n):
            ri = rows[i]
            for j in range(i + 1, n):
                a, b = ri[j], rows[j][i]
                if a != b:
                    raise NotSymmetricError(
                        f"m[{i}][{j}] = {format_entry(a)} but m[{j}][{i}] = {format_entry(b)}"
                    )
                if a < 2:
                    raise OffDiagonalError(f"m[{i}][{j}] = {a} < 2")
        labels = tuple(self.labels) if self.labels else tuple(range(n))
        if len(labels) != n:
            raise CoxeterMatrixError("labels length does not match rank")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "labels", labels)

    @property
    def rank(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def is_infinite_entry(self, i: int, j: int) -> bool:
        return self.entries[i][j] == INF

    def pairs(self):
        """Yield ``(i, j, m_ij)`` for ``i < j``."""
        e = self.entries
        n = len(e)
        for i in range(n):
            for j in range(i + 1, n):
                yield i, j, e[i][j]

    def to_text(self) -> str:
        return "; ".join(
            " ".join("0" if m == INF else str(m) for m in row) for row in self.entries
        )

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "entries": [[format_entry(m) if m == INF else m for m in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data) -> "CoxeterMatrix":
        if isinstance(data, str):
            return parse_coxeter_matrix(data)
        if isinstance(data, dict):
            data = data["entries"]
        return cls(tuple(tuple(row) for row in data))

    def diagram(self) -> "CoxeterDiagram":
        e = self.entries
        n = len(e)
        edges = tuple((i, j, e[i][j]) for i in range(n) for j in range(i + 1, n) if e[i][j] >= 3)
        return CoxeterDiagram._trusted(tuple(range(n)), edges)

    def __str__(self):
        return self.to_text()


def parse_coxeter_matrix(text: str) -> CoxeterMatrix:
    """Parse rows separated by ``;`` or newlines, entries by whitespace.

    >>> parse_coxeter_matrix("1 0; 0 1")[0, 1]
    inf
    """
    rows = []
    for chunk in re.split(r"[;\n]", text):
        chunk = chunk.strip()
        if not chunk:
            continue
        row = []
        for tok in chunk.split():
            try:
                row.append(int(tok))
            except ValueError:
                raise EntryParseError(f"not an integer: {tok!r}") from None
        rows.append(row)
    if not rows:
        raise CoxeterMatrixError("empty matrix text")
    widths = {len(r) for r in rows}
    if len(widths) > 1 or len(rows) != len(rows[0]):
        raise RaggedRowsError(f"rows have lengths {[len(r) for r in rows]} for {len(rows)} rows")
    return CoxeterMatrix(tuple(tuple(r) for r in rows))


def from_upper(rank: int, upper: Sequence) -> CoxeterMatrix:
    """Build a matrix from its strict upper triangle in row-major order."""
    upper = [v if type(v) is int and v > 0 else _normalize_entry(v) for v in upper]
    if len(upper) != rank * (rank - 1) // 2:
        raise RaggedRowsError(f"{len(upper)} upper-triangle entries for rank {rank}")
    for v in upper:
        if v < 2:
            raise OffDiagonalError(f"off-diagonal entry {v} < 2")
    rows = [[1] * rank for _ in range(rank)]
    it = iter(upper)
    for i in range(rank):
        for j in range(i + 1, rank):
            rows[i][j] = rows[j][i] = next(it)
    out = object.__new__(CoxeterMatrix)
    object.__setattr__(out, "entries", tuple(tuple(r) for r in rows))
    object.__setattr__(out, "labels", tuple(range(rank)))
    return out


def restrict(matrix: CoxeterMatrix, subset: Iterable[int]) -> CoxeterMatrix:
    """Principal submatrix on ``subset`` (sorted).

    The result's ``labels`` map its rows back to ``matrix.labels``.
    """
    idx = sorted(set(subset))
    if not idx:
        raise ValueError("cannot restrict to an empty generator subset")
    for i in idx:
        if not 0 <= i < matrix.rank:
            raise ValueError(f"generator {i} out of range for rank {matrix.rank}")
    rows = tuple(tuple(matrix.entries[i][j] for j in idx) for i in idx)
    return CoxeterMatrix(rows, tuple(matrix.labels[i] for i in idx))


@dataclass(frozen=True)
class CoxeterDiagram:
    """Vertices plus labelled edges ``(i, j, m)`` with ``m >= 3``."""

    vertices: tuple
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        norm = []
        for i, j, m in self.edges:
            if m != INF and m < 3:
                raise ValueError(f"edge ({i}, {j}) with label {m} < 3")
            a, b = (i, j) if i < j else (j, i)
            norm.append((a, b, m))
        object.__setattr__(self, "edges", tuple(sorted(norm)))
        self._index()

    def _index(self):
        object.__setattr__(self, "_labels", {(a, b): m for a, b, m in self.edges})
        adj = {v: [] for v in self.vertices}
        for a, b, _ in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        object.__setattr__(self, "_adj", adj)

    @classmethod
    def _trusted(cls, vertices: tuple, edges: tuple) -> "CoxeterDiagram":
        # edges already normalized: a < b, sorted, labels >= 3
        out = object.__new__(cls)
        object.__setattr__(out, "vertices", vertices)
        object.__setattr__(out, "edges", edges)
        out._index()
        return out

    @property
    def rank(self) -> int:
        return len(self.vertices)

    def label(self, u, v):
        """Coxeter label between two vertices; 2 when no edge, 1 on the diagonal."""
        if u == v:
            return 1
        key = (u, v) if u < v else (v, u)
        return self._labels.get(key, 2)

    def neighbours(self, u):
        return self._adj[u]

    def degree(self, u) -> int:
        return len(self._adj[u])

    def signature(self, u):
        return (len(self._adj[u]), tuple(sorted(self.label(u, v) for v in self._adj[u])))

    def to_matrix(self) -> CoxeterMatrix:
        vs = self.vertices
        rows = tuple(tuple(self.label(a, b) for b in vs) for a in vs)
        return CoxeterMatrix(rows, vs)

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [[a, b, format_entry(m) if m == INF else m] for a, b, m in self.edges],
        }

    def to_dot(self, name: str = "coxeter") -> str:
        lines = [f"graph {name} {{"]
        for v in self.vertices:
            lines.append(f'  {v} [label="s{v}"];')
        for a, b, m in self.edges:
            if m == 3:
                lines.append(f"  {a} -- {b};")
            else:
                lines.append(f'  {a} -- {b} [label="{format_entry(m)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def connected_components(diagram: CoxeterDiagram):
    """Split a diagram into connected components.

    Returns a list of ``(component, vertex_map)`` where ``component`` has
    vertices ``0..k-1`` and ``vertex_map[local] = original vertex``.
    Components are ordered by their smallest original vertex.
    """
    seen = set()
    out = []
    adj = diagram._adj
    for start in diagram.vertices:
        if start in seen:
            continue
        comp = []
        stack = [start]
        seen.add(start)
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(comp) == diagram.rank and diagram.vertices == tuple(range(diagram.rank)):
            out.append((diagram, tuple(range(diagram.rank))))
            continue
        comp.sort()
        local = {v: k for k, v in enumerate(comp)}
        edges = tuple(
            (local[a], local[b], m) for a, b, m in diagram.edges if a in local
        )
        out.append((CoxeterDiagram._trusted(tuple(range(len(comp))), edges), tuple(comp)))
    return out


def diagrams_isomorphic(d1: CoxeterDiagram, d2: CoxeterDiagram, max_rank: int = DEFAULT_MAX_RANK):
    """Lexicographically least label-preserving bijection ``d1 -> d2``, or None.

    The bijection is returned as a dict from vertices of ``d1`` to vertices
    of ``d2``; "least" compares the image tuple taken in ``d1.vertices`` order.
    """
    if d1.rank != d2.rank or len(d1.edges) != len(d2.edges):
        return None
    if d1.rank > max_rank:
        raise ValueError(f"rank {d1.rank} exceeds isomorphism search cap {max_rank}")
    sig1 = [d1.signature(v) for v in d1.vertices]
    sig2 = [d2.signature(v) for v in d2.vertices]
    if sorted(sig1) != sorted(sig2):
        return None
    if sorted(m for *_, m in d1.edges) != sorted(m for *_, m in d2.edges):
        return None

    vs1, vs2 = d1.vertices, sorted(d2.vertices)
    sig2_of = dict(zip(d2.vertices, sig2))
    image: list = []
    used = set()

    def extend(k):
        if k == len(vs1):
            return True
        u = vs1[k]
        for v in vs2:
            if v in used or sig2_of[v] != sig1[k]:
                continue
            if any(d1.label(u, vs1[p]) != d2.label(v, image[p]) for p in range(k)):
                continue
            image.append(v)
            used.add(v)
            if extend(k + 1):
                return True
            image.pop()
            used.discard(v)
        return False

    if extend(0):
        return dict(zip(vs1, image))
    return None


def _sort_key(m):
    return m if m != INF else 10**9


def canonical_form(matrix: CoxeterMatrix, max_rank: int = DEFAULT_MAX_RANK):
    """Permutation-invariant key: least upper triangle over all relabelings.

    Returns ``(key, permutation)`` where ``permutation[new] = old``.
    """
    n = matrix.rank
    if n > max_rank:
        raise ValueError(f"rank {n} exceeds canonical-form cap {max_rank}")
    best = None
    best_perm = None
    e = matrix.entries
    for perm in itertools.permutations(range(n)):
        key = tuple(_sort_key(e[perm[i]][perm[j]]) for i in range(n) for j in range(i + 1, n))
        if best is None or key < best:
            best, best_perm = key, perm
    return best, best_perm


def permute(matrix: CoxeterMatrix, perm: Sequence[int]) -> CoxeterMatrix:
    """Matrix with rows/cols reordered so that new index ``k`` is old ``perm[k]``."""
    e = matrix.entries
    return CoxeterMatrix(tuple(tuple(e[a][b] for b in perm) for a in perm))


def dumps(obj) -> str:
    """Deterministic JSON used by every dump in the package."""
    return json.dumps(obj, sort_keys=True, indent=2)
