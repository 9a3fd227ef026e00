"""Combinatorial manifolds with corners and their Coxeter equipments.

A :class:`FacePoset` lists faces by the set of walls containing them.  Two
different faces may share a wall set (two walls meeting in two corners), so
faces are addressed by position in ``faces``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import INF, CoxeterMatrix, format_entry, restrict
from .classify import classify_system


class EquipmentError(ValueError):
    """The universal equipment cannot be formed from the given labels."""


@dataclass(frozen=True)
class Face:
    walls: frozenset
    codim: int
    name: str = ""

    def to_json(self) -> dict:
        out = {"walls": sorted(self.walls), "codim": self.codim}
        if self.name:
            out["name"] = self.name
        return out


@dataclass
class Report:
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "errors": list(self.errors)}


@dataclass(frozen=True)
class FacePoset:
    dimension: int
    n_walls: int
    faces: tuple

    def __post_init__(self):
        object.__setattr__(
            self,
            "faces",
            tuple(f if isinstance(f, Face) else Face(frozenset(f[0]), f[1]) for f in self.faces),
        )

    @property
    def walls(self):
        return range(self.n_walls)

    def chamber_index(self) -> int:
        for k, f in enumerate(self.faces):
            if f.codim == 0:
                return k
        raise ValueError("poset has no chamber face")

    def wall_face(self, w: int) -> int:
        for k, f in enumerate(self.faces):
            if f.codim == 1 and f.walls == {w}:
                return k
        raise ValueError(f"wall {w} has no codimension-1 face")

    def faces_of_codim(self, k: int):
        return [i for i, f in enumerate(self.faces) if f.codim == k]

    def contains(self, small: int, big: int) -> bool:
        """Whether face ``small`` lies in the closure of face ``big``."""
        return self.faces[big].walls <= self.faces[small].walls

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "walls": self.n_walls,
            "faces": [f.to_json() for f in self.faces],
        }

    @classmethod
    def from_json(cls, data) -> "FacePoset":
        faces = tuple(
            Face(frozenset(f["walls"]), int(f.get("codim", len(f["walls"]))), f.get("name", ""))
            for f in data["faces"]
        )
        return cls(int(data["dimension"]), int(data["walls"]), faces)


def simplex_poset(n: int) -> FacePoset:
    """Face poset of the n-simplex; wall ``i`` is the facet opposite vertex ``i``."""
    if n < 1:
        raise ValueError("simplex dimension must be >= 1")
    faces = []
    for k in range(n + 1):
        for ws in itertools.combinations(range(n + 1), k):
            faces.append(Face(frozenset(ws), k))
    return FacePoset(n, n + 1, tuple(faces))


def interval_poset() -> FacePoset:
    return simplex_poset(1)


def cube_poset(k: int) -> FacePoset:
    """Face poset of ``[0,1]^k``; walls ``2i`` and ``2i+1`` are ``x_i = 0`` and ``x_i = 1``."""
    if k < 1:
        raise ValueError("cube dimension must be >= 1")
    faces = []
    for r in range(k + 1):
        for coords in itertools.combinations(range(k), r):
            for sides in itertools.product((0, 1), repeat=r):
                faces.append(Face(frozenset(2 * c + s for c, s in zip(coords, sides)), r))
    return FacePoset(k, 2 * k, tuple(faces))


def validate_face_poset(poset: FacePoset) -> Report:
    rep = Report()
    chambers = [i for i, f in enumerate(poset.faces) if f.codim == 0]
    if len(chambers) != 1:
        rep.errors.append(f"expected exactly one codimension-0 face, found {len(chambers)}")
    for i, f in enumerate(poset.faces):
        if f.codim != len(f.walls):
            rep.errors.append(
                f"face {i} declared codimension {f.codim} but lies in {len(f.walls)} walls"
            )
        if f.codim > poset.dimension:
            rep.errors.append(f"face {i} has codimension {f.codim} > dimension {poset.dimension}")
        bad = [w for w in f.walls if not 0 <= w < poset.n_walls]
        if bad:
            rep.errors.append(f"face {i} uses unknown walls {bad}")
    for w in poset.walls:
        n = sum(1 for f in poset.faces if f.codim == 1 and f.walls == {w})
        if n != 1:
            rep.errors.append(f"wall {w} has {n} codimension-1 faces, expected 1")
    if chambers and poset.faces[chambers[0]].walls:
        rep.errors.append("the chamber face must have an empty wall set")
    declared = {f.walls for f in poset.faces}
    for i, f in enumerate(poset.faces):
        if f.codim < 2 or f.codim != len(f.walls):
            continue
        # near a corner the chamber looks like a quadrant: every sub-intersection is a face
        for sub in itertools.combinations(sorted(f.walls), f.codim - 1):
            if frozenset(sub) not in declared:
                rep.errors.append(f"face {i} lies in walls {sorted(sub)} with no declared face")
    return rep


def _check_valid(poset):
    rep = validate_face_poset(poset)
    if not rep.ok:
        raise ValueError("invalid face poset: " + "; ".join(rep.errors))


@dataclass(frozen=True)
class Equipment:
    """Wall map ``s: W -> S`` into the generators of ``matrix``."""

    matrix: CoxeterMatrix
    wall_map: tuple

    def __post_init__(self):
        object.__setattr__(self, "wall_map", tuple(int(x) for x in self.wall_map))

    def face_generators(self, poset: FacePoset, face: int) -> frozenset:
        """Generator subset ``s(f)`` spanning the face group of ``face``."""
        return frozenset(self.wall_map[w] for w in poset.faces[face].walls)

    def to_json(self) -> dict:
        return {"matrix": self.matrix.to_json(), "wall_map": list(self.wall_map)}

    @classmethod
    def from_json(cls, data) -> "Equipment":
        return cls(CoxeterMatrix.from_json(data["matrix"]), tuple(data["wall_map"]))


def natural_equipment(poset: FacePoset, matrix: CoxeterMatrix) -> Equipment:
    """Wall ``i`` goes to generator ``i``."""
    if matrix.rank != poset.n_walls:
        raise ValueError(f"rank {matrix.rank} != number of walls {poset.n_walls}")
    return Equipment(matrix, tuple(range(poset.n_walls)))


def _parabolic_is_finite(matrix, subset) -> bool:
    if not subset:
        return True
    return classify_system(restrict(matrix, subset)).verdict == "finite"


def validate_equipment(poset: FacePoset, eq: Equipment) -> Report:
    rep = Report()
    n = eq.matrix.rank
    if len(eq.wall_map) != poset.n_walls:
        rep.errors.append(f"wall map has {len(eq.wall_map)} entries for {poset.n_walls} walls")
        return rep
    bad = [s for s in eq.wall_map if not 0 <= s < n]
    if bad:
        rep.errors.append(f"wall map uses unknown generators {sorted(set(bad))}")
        return rep
    missing = sorted(set(range(n)) - set(eq.wall_map))
    if missing:
        rep.errors.append(f"wall map is not surjective; generators {missing} are never hit")
    for i, f in enumerate(poset.faces):
        if f.codim < 1:
            continue
        gens = eq.face_generators(poset, i)
        if not _parabolic_is_finite(eq.matrix, gens):
            rep.errors.append(f"face {i} (walls {sorted(f.walls)}) has infinite group on {sorted(gens)}")
    for i, fi in enumerate(poset.faces):
        for j, fj in enumerate(poset.faces):
            if i != j and poset.contains(i, j):
                if not eq.face_generators(poset, j) <= eq.face_generators(poset, i):
                    rep.errors.append(f"face map not order-reversing on faces {i} <= {j}")
    return rep


AngleLabels = dict  # codimension-2 face index -> n >= 2


def _wall_pair_labels(poset: FacePoset, angles: AngleLabels):
    """Map each meeting wall pair to its angle label, checking consistency."""
    pairs = {}
    for k in poset.faces_of_codim(2):
        if k not in angles:
            raise EquipmentError(f"codimension-2 face {k} has no angle label")
        n = angles[k]
        if n == INF or int(n) != n or n < 2:
            raise EquipmentError(f"angle label {n!r} at face {k} is not an integer >= 2")
        key = tuple(sorted(poset.faces[k].walls))
        if key in pairs and pairs[key] != n:
            raise EquipmentError(
                f"walls {key} meet in several codimension-2 faces with labels "
                f"{pairs[key]} and {n}"
            )
        pairs[key] = int(n)
    return pairs


def universal_equipment(poset: FacePoset, angles: AngleLabels) -> Equipment:
    """One generator per wall; angle labels become matrix entries.

    Walls sharing no face get ``inf``.
    """
    _check_valid(poset)
    pairs = _wall_pair_labels(poset, angles)
    n = poset.n_walls
    rows = [[1] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in pairs:
                m = pairs[(i, j)]
            elif any({i, j} <= f.walls for f in poset.faces):
                raise EquipmentError(f"walls {i} and {j} meet but share no codimension-2 face")
            else:
                m = INF
            rows[i][j] = rows[j][i] = m
    eq = Equipment(CoxeterMatrix(tuple(tuple(r) for r in rows)), tuple(range(n)))
    rep = validate_equipment(poset, eq)
    if not rep.ok:
        raise EquipmentError("universal equipment is not a Coxeter equipment: " + "; ".join(rep.errors))
    return eq


def is_admissible(poset: FacePoset, angles: AngleLabels, eq: Equipment) -> Report:
    """Every codimension-2 corner of angle pi/n must map to a product of order n."""
    rep = Report()
    for k in poset.faces_of_codim(2):
        wi, wj = sorted(poset.faces[k].walls)
        n = angles.get(k)
        if n is None:
            rep.errors.append(f"codimension-2 face {k} has no angle label")
            continue
        si, sj = eq.wall_map[wi], eq.wall_map[wj]
        if si == sj:
            rep.errors.append(
                f"walls {wi} and {wj} meet at face {k} but map to the same generator {si}"
            )
            continue
        m = eq.matrix[si, sj]
        if m != n:
            rep.errors.append(
                f"face {k}: angle pi/{n} but s{si} s{sj} has order {format_entry(m)}"
            )
    return rep


def uniform_labels(poset: FacePoset, n: int) -> AngleLabels:
    return {k: n for k in poset.faces_of_codim(2)}


def labels_from_list(poset: FacePoset, values) -> AngleLabels:
    """Assign labels to codimension-2 faces in poset order."""
    idx = poset.faces_of_codim(2)
    values = list(values)
    if len(values) == 1:
        values = values * len(idx)
    if len(values) != len(idx):
        raise ValueError(f"{len(values)} labels given for {len(idx)} codimension-2 faces")
    return dict(zip(idx, values))
