"""Coxeter equipments of the n-simplex.

Walls of the n-simplex meet pairwise, so an equipment is a rank ``n+1``
Coxeter matrix all of whose maximal standard parabolics are finite.
"""
from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from functools import lru_cache

from .classify import classify_system, is_finite
from .core import INF, CoxeterMatrix, canonical_form, format_entry, from_upper, restrict

KINDS = ("spherical", "affine", "hyperbolic-type")


@dataclass(frozen=True)
class SimplexEquipmentRecord:
    matrix: CoxeterMatrix
    kind: str
    key: tuple  # canonical upper triangle, inf encoded as 10**9
    components: tuple  # component names, e.g. ("~A2",)

    @property
    def n(self) -> int:
        return self.matrix.rank - 1

    def labels(self) -> tuple:
        """Sorted off-diagonal entries; ``(p, q, r)`` for triangles."""
        return tuple(sorted((m for _, _, m in self.matrix.pairs()), key=_order_key))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "kind": self.kind,
            "matrix": self.matrix.to_json(),
            "labels": [format_entry(m) if m == INF else m for m in self.labels()],
            "components": list(self.components),
        }


def _order_key(m):
    return 10**9 if m == INF else m


@lru_cache(maxsize=None)
def _finite_upper(rank, upper):
    return is_finite(from_upper(rank, upper))


def _maximal_parabolics_finite(matrix: CoxeterMatrix) -> bool:
    n = matrix.rank
    for drop in range(n):
        keep = [i for i in range(n) if i != drop]
        sub = restrict(matrix, keep)
        upper = tuple(sub.entries[i][j] for i in range(n - 1) for j in range(i + 1, n - 1))
        if not _finite_upper(n - 1, upper):
            return False
    return True


def enumerate_simplex_equipments(n: int, m_max: int, allow_infinity=None) -> list:
    """All equipments of the n-simplex with labels up to ``m_max``, one per diagram class.

    ``allow_infinity`` defaults to True only for ``n == 1``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if m_max < 2:
        raise ValueError("m_max must be >= 2")
    if allow_infinity is None:
        allow_infinity = n == 1
    rank = n + 1
    values = list(range(2, m_max + 1)) + ([INF] if allow_infinity else [])
    n_pairs = rank * (rank - 1) // 2
    out = []
    for upper in itertools.product(values, repeat=n_pairs):
        matrix = from_upper(rank, upper)
        key, _ = canonical_form(matrix)
        if key != tuple(_order_key(m) for m in upper):
            continue  # not the canonical representative of its class
        if not _maximal_parabolics_finite(matrix):
            continue
        report = classify_system(matrix)
        kind = {"finite": "spherical", "affine": "affine"}.get(report.verdict, "hyperbolic-type")
        if kind != "spherical":
            infinite = [lab for lab in report.labels if lab.kind != "finite"]
            if len(infinite) != 1:
                raise RuntimeError(
                    f"{matrix.to_text()} has {len(infinite)} infinite components, expected 1"
                )
        out.append(SimplexEquipmentRecord(matrix, kind, key, tuple(l.name for l in report.labels)))
    out.sort(key=lambda r: (KINDS.index(r.kind), r.key))
    return out


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "kind", "labels", "components", "matrix"])
    for r in records:
        w.writerow([
            r.n,
            r.kind,
            " ".join(format_entry(m) for m in r.labels()),
            " ".join(r.components),
            r.matrix.to_text(),
        ])
    return buf.getvalue()
