"""Tits geometric representation and exact enumeration of Coxeter groups.

Group elements are matrices in the Tits representation.  Matrix entries are
snapped onto a growing table of values already seen, so two products that
agree to 1e-9 end up bit-for-bit identical and can be hashed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import INF, CoxeterMatrix

ENTRY_TOL = 1e-9
QUANTUM = 1e-6


class IncompleteGraphError(RuntimeError):
    """A walk or check needed elements that were never enumerated."""


def gram_matrix(matrix: CoxeterMatrix) -> np.ndarray:
    """Cosine form ``B_ij = -cos(pi / m_ij)``; ``m = inf`` gives ``-1``."""
    n = matrix.rank
    B = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            m = matrix.entries[i][j]
            B[i, j] = -1.0 if m == INF else -math.cos(math.pi / m)
    # cos(pi/2) is 6e-17 in floating point
    B[np.abs(B) < 1e-15] = 0.0
    return B


def signature(gram: np.ndarray, tol: float = 1e-9):
    """Inertia ``(n_pos, n_zero, n_neg)`` of a symmetric form."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    ev = np.linalg.eigvalsh(np.asarray(gram, dtype=float))
    pos = int(np.sum(ev > tol))
    neg = int(np.sum(ev < -tol))
    return pos, len(ev) - pos - neg, neg


def tits_generators(matrix: CoxeterMatrix) -> list:
    """Matrices of ``sigma_i(e_j) = e_j - 2 B(e_i, e_j) e_i``."""
    B = gram_matrix(matrix)
    n = matrix.rank
    gens = []
    for i in range(n):
        s = np.eye(n)
        s[i, :] -= 2.0 * B[i, :]
        gens.append(s)
    return gens


class _Snapper:
    """Maps floats onto canonical representatives within ``ENTRY_TOL``."""

    def __init__(self):
        self._buckets: dict = {}
        self._ids: list = []

    def _find(self, x):
        q = int(round(x / QUANTUM))
        for k in (q, q - 1, q + 1):
            for cid in self._buckets.get(k, ()):
                if abs(self._ids[cid] - x) <= ENTRY_TOL:
                    return cid
        return None

    def snap(self, x: float):
        cid = self._find(x)
        if cid is None:
            cid = len(self._ids)
            self._ids.append(x)
            self._buckets.setdefault(int(round(x / QUANTUM)), []).append(cid)
        return cid

    def value(self, cid):
        return self._ids[cid]

    def key(self, M: np.ndarray, add: bool = True):
        """Return ``(key, snapped matrix)``; ``key`` is None on a miss when ``add`` is False."""
        ids = []
        for x in M.ravel():
            cid = self.snap(x) if add else self._find(x)
            if cid is None:
                return None, M
            ids.append(cid)
        snapped = np.array([self._ids[c] for c in ids]).reshape(M.shape)
        return tuple(ids), snapped


@dataclass
class ChamberGraph:
    """Elements enumerated as chambers, with generator-labelled edges.

    ``right[g, s]`` is the index of ``g s`` and ``left[s, g]`` the index of
    ``s g``; ``-1`` means the product lies outside the enumerated set.
    """

    matrix: CoxeterMatrix
    words: list
    lengths: np.ndarray
    matrices: np.ndarray
    right: np.ndarray
    left: np.ndarray
    complete: bool
    radius_complete: float
    _snapper: _Snapper = field(repr=False, default=None)
    _index: dict = field(repr=False, default=None)

    def __len__(self):
        return len(self.words)

    @property
    def rank(self) -> int:
        return self.matrix.rank

    @property
    def max_length(self) -> int:
        return int(self.lengths.max())

    def lookup(self, M: np.ndarray):
        """Index of the element with matrix ``M``, or None."""
        key, _ = self._snapper.key(M, add=False)
        if key is None:
            return None
        return self._index.get(key)

    def walk(self, word, start: int = 0) -> int:
        g = start
        for s in word:
            nxt = int(self.right[g, s])
            if nxt < 0:
                raise IncompleteGraphError(
                    f"word {tuple(word)} leaves the enumerated set at generator {s}"
                )
            g = nxt
        return g

    def inverse(self, g: int) -> int:
        return self.walk(tuple(reversed(self.words[g])))

    def multiply(self, g: int, h: int) -> int:
        return self.walk(self.words[h], start=g)

    def in_positive(self, g: int, s: int) -> bool:
        """Whether ``g`` lies in ``P_s^+``, i.e. ``l(s g) > l(g)``."""
        sg = int(self.left[s, g])
        if sg >= 0:
            return bool(self.lengths[sg] > self.lengths[g])
        if self.lengths[g] <= self.radius_complete:
            return True
        raise IncompleteGraphError(f"cannot decide descent of element {g} at generator {s}")

    def descent_sets(self):
        return [
            frozenset(s for s in range(self.rank) if not self.in_positive(g, s))
            for g in range(len(self))
        ]

    def to_json(self) -> dict:
        return {
            "matrix": self.matrix.to_json(),
            "complete": self.complete,
            "order": len(self) if self.complete else None,
            "elements": [
                {"index": i, "word": list(w), "length": int(self.lengths[i])}
                for i, w in enumerate(self.words)
            ],
            "edges": [[int(x) for x in row] for row in self.right],
        }

    def to_dot(self) -> str:
        lines = ["graph chambers {"]
        for i, w in enumerate(self.words):
            lab = "".join(f"s{k}" for k in w) or "e"
            lines.append(f'  {i} [label="{lab}"];')
        for g in range(len(self)):
            for s in range(self.rank):
                h = int(self.right[g, s])
                if h > g:
                    lines.append(f'  {g} -- {h} [label="{s}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def enumerate_group(matrix: CoxeterMatrix, budget: int = 100_000, max_len=None) -> ChamberGraph:
    """Breadth-first closure of the Tits generators.

    Elements are discovered in shortlex order of their canonical words.  The
    result is ``complete`` iff the closure finished within ``budget`` elements
    and ``max_len``.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    gens = tits_generators(matrix)
    n = matrix.rank
    snap = _Snapper()
    key, ident = snap.key(np.eye(n))
    index = {key: 0}
    words = [()]
    lengths = [0]
    mats = [ident]
    right_rows = []
    truncated = False
    radius_complete = INF
    i = 0
    while i < len(words):
        g = mats[i]
        row = []
        for s in range(n):
            key, prod = snap.key(g @ gens[s])
            j = index.get(key)
            if j is None:
                can_grow = len(words) < budget and (max_len is None or lengths[i] < max_len)
                if can_grow:
                    j = len(words)
                    index[key] = j
                    words.append(words[i] + (s,))
                    lengths.append(lengths[i] + 1)
                    mats.append(prod)
                else:
                    j = -1
                    if not truncated:
                        truncated = True
                        radius_complete = lengths[i]
            row.append(j)
        right_rows.append(row)
        i += 1
    matrices = np.array(mats)
    right = np.array(right_rows, dtype=np.int64).reshape(len(words), n)
    left = np.full((n, len(words)), -1, dtype=np.int64)
    for s in range(n):
        for g in range(len(words)):
            key, _ = snap.key(gens[s] @ matrices[g], add=False)
            if key is not None:
                left[s, g] = index.get(key, -1)
    return ChamberGraph(
        matrix=matrix,
        words=words,
        lengths=np.array(lengths, dtype=np.int64),
        matrices=matrices,
        right=right,
        left=left,
        complete=not truncated,
        radius_complete=radius_complete,
        _snapper=snap,
        _index=index,
    )


@dataclass(frozen=True)
class ElementInfo:
    index: int
    word: tuple
    length: int
    positive: tuple  # positive[s] is True iff the element lies in P_s^+


def element_calculus(graph: ChamberGraph, word) -> ElementInfo:
    """Element reached from the identity by ``word``, with its length and descents."""
    for s in word:
        if not 0 <= s < graph.rank:
            raise ValueError(f"generator {s} out of range")
    g = graph.walk(word)
    pos = tuple(graph.in_positive(g, s) for s in range(graph.rank))
    return ElementInfo(g, graph.words[g], int(graph.lengths[g]), pos)


def order_of_element(graph: ChamberGraph, g: int):
    """Least ``k >= 1`` with ``g^k = e``; ``math.inf`` if the powers leave the graph."""
    M = graph.matrices[g]
    P = M.copy()
    limit = len(graph) + 1
    for k in range(1, limit + 1):
        idx = graph.lookup(P)
        if idx is None:
            return INF
        if idx == 0:
            return k
        P = P @ M
    return INF


@dataclass
class BourbakiReport:
    intersection_ok: bool
    partition_ok: bool
    exchange_ok: bool
    witnesses: dict

    @property
    def passed(self) -> bool:
        return self.intersection_ok and self.partition_ok and self.exchange_ok


def bourbaki_property_check(graph: ChamberGraph, positive=None) -> BourbakiReport:
    """Exhaustively check the three ``P_s^+`` properties on a complete graph.

    ``positive`` optionally replaces the sets ``P_s^+`` (list of sets of
    element indices, one per generator), which is how corrupted inputs are
    exercised.
    """
    if not graph.complete:
        raise IncompleteGraphError("Bourbaki properties need a complete chamber graph")
    n, N = graph.rank, len(graph)
    if positive is None:
        positive = [{g for g in range(N) if graph.in_positive(g, s)} for s in range(n)]
    positive = [set(p) for p in positive]
    wit = {"intersection": [], "partition": [], "exchange": []}

    common = set(range(N))
    for p in positive:
        common &= p
    if common != {0}:
        wit["intersection"] = sorted(common ^ {0})

    everything = set(range(N))
    for s in range(n):
        neg = {int(graph.left[s, g]) for g in positive[s]}
        overlap = positive[s] & neg
        missing = everything - (positive[s] | neg)
        for g in sorted(overlap | missing):
            wit["partition"].append({"generator": s, "element": g})

    for s in range(n):
        for g in positive[s]:
            for t in range(n):
                gt = int(graph.right[g, t])
                if gt in positive[s]:
                    continue
                # s = g t g^-1  <=>  s g = g t
                if int(graph.left[s, g]) != gt:
                    wit["exchange"].append({"s": s, "element": g, "t": t})

    return BourbakiReport(
        intersection_ok=not wit["intersection"],
        partition_ok=not wit["partition"],
        exchange_ok=not wit["exchange"],
        witnesses=wit,
    )
