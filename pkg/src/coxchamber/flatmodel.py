"""Flat models: discrete reflection groups on the line, the plane and flat tori.

Isometries are affine maps ``x -> A x + b``.  On a torus ``R^d / L`` the
translation part is reduced into the fundamental cell of ``L`` (columns of
the lattice matrix).  Dirichlet domains are computed by clipping a working
disc with half-planes; torus chambers come from cutting the fundamental cell
along every mirror of the group and gluing pieces across the cell boundary.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .geomrep import _Snapper

ISO_TOL = 1e-9
REGULAR_TOL = 1e-6
HAUSDORFF_TOL = 1e-6


class NonDiscreteError(RuntimeError):
    """Orbit enumeration exceeded its cap."""


class RegularityError(ValueError):
    """The base point lies on (or within tolerance of) a mirror."""


class UnstableDomainError(RuntimeError):
    """The Dirichlet domain changed between radius r-1 and r."""


class IrrationalMirrorError(ValueError):
    """A mirror does not descend to the torus."""


# --- isometries ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Isometry:
    """``x -> linear @ x + shift``; works in any dimension (1 and 2 are used)."""

    linear: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.linear, dtype=float))
        b = np.atleast_1d(np.asarray(self.shift, dtype=float))
        if A.shape != (len(b), len(b)):
            raise ValueError(f"linear part {A.shape} does not match shift {b.shape}")
        if not np.allclose(A.T @ A, np.eye(len(b)), atol=ISO_TOL):
            raise ValueError("linear part is not orthogonal")
        object.__setattr__(self, "linear", A)
        object.__setattr__(self, "shift", b)

    @classmethod
    def identity(cls, dim: int) -> "Isometry":
        return cls(np.eye(dim), np.zeros(dim))

    @property
    def dim(self) -> int:
        return len(self.shift)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return self.linear @ x + self.shift
        return x @ self.linear.T + self.shift

    def __matmul__(self, other: "Isometry") -> "Isometry":
        """Composition ``self o other``."""
        return Isometry(self.linear @ other.linear, self.linear @ other.shift + self.shift)

    def inverse(self) -> "Isometry":
        At = self.linear.T
        return Isometry(At, -At @ self.shift)

    def reduced(self, lattice) -> "Isometry":
        if lattice is None:
            return self
        return Isometry(self.linear, reduce_point(self.shift, lattice))

    def is_close(self, other: "Isometry", lattice=None, tol: float = ISO_TOL) -> bool:
        if not np.allclose(self.linear, other.linear, atol=tol):
            return False
        d = self.shift - other.shift
        if lattice is not None:
            d = _lattice_residual(d, lattice)
        return bool(np.all(np.abs(d) <= tol))

    def is_identity(self, lattice=None, tol: float = ISO_TOL) -> bool:
        return self.is_close(Isometry.identity(self.dim), lattice, tol)

    def to_json(self) -> dict:
        return {"linear": _rounded(self.linear), "shift": _rounded(self.shift)}


Isometry2 = Isometry


def _rounded(a, digits: int = 12):
    return np.round(np.asarray(a, dtype=float), digits).tolist()


def reflection(normal, offset: float = 0.0) -> Isometry:
    """Reflection in the hyperplane ``normal . x = offset``."""
    n = np.atleast_1d(np.asarray(normal, dtype=float))
    norm = np.linalg.norm(n)
    if norm == 0:
        raise ValueError("mirror normal must be nonzero")
    u = n / norm
    return Isometry(np.eye(len(u)) - 2.0 * np.outer(u, u), 2.0 * (offset / norm) * u)


def translation(v) -> Isometry:
    v = np.atleast_1d(np.asarray(v, dtype=float))
    return Isometry(np.eye(len(v)), v)


def _lattice_coords(x, lattice):
    return np.linalg.solve(lattice, x)


def _lattice_residual(x, lattice):
    """Distance-like residual of ``x`` from the nearest lattice vector."""
    c = _lattice_coords(x, lattice)
    return lattice @ (c - np.round(c))


def reduce_point(x, lattice):
    """Representative of ``x`` in the half-open fundamental cell ``L [0,1)^d``."""
    c = _lattice_coords(np.asarray(x, dtype=float), lattice)
    c = c - np.floor(c + 1e-9)
    c[np.abs(c) < 1e-12] = 0.0
    return lattice @ c


# --- balls of group elements ---------------------------------------------------

@dataclass
class FlatGroupBall:
    generators: tuple
    elements: list
    words: list
    lengths: np.ndarray
    radius: int
    lattice: np.ndarray | None
    complete: bool  # no element beyond the radius exists
    _snapper: _Snapper = field(repr=False, default=None)
    _index: dict = field(repr=False, default=None)

    def __len__(self):
        return len(self.elements)

    @property
    def dim(self) -> int:
        return self.generators[0].dim

    def _key(self, g: Isometry, add: bool):
        flat = np.concatenate([g.linear.ravel(), g.shift])
        key, snapped = self._snapper.key(flat, add=add)
        return key, snapped

    def lookup(self, g: Isometry):
        """Index of ``g`` (reduced mod the lattice in torus mode) or None."""
        key, _ = self._key(g.reduced(self.lattice), add=False)
        if key is None:
            return None
        return self._index.get(key)

    def multiply(self, i: int, j: int):
        return self.lookup(self.elements[i] @ self.elements[j])

    def inverse(self, i: int):
        return self.lookup(self.elements[i].inverse())

    def orbit(self, x0) -> np.ndarray:
        return np.array([g(x0) for g in self.elements])

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "complete": self.complete,
            "size": len(self),
            "elements": [
                dict(g.to_json(), word=list(w), length=int(l))
                for g, w, l in zip(self.elements, self.words, self.lengths)
            ],
        }


def flat_group_ball(generators, radius: int, lattice=None, cap: int = 50_000) -> FlatGroupBall:
    """Elements of word length at most ``radius``, each with its shortlex-least word."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    gens = tuple(generators)
    if not gens:
        raise ValueError("at least one generator is required")
    dim = gens[0].dim
    L = None if lattice is None else np.atleast_2d(np.asarray(lattice, dtype=float))
    ball = FlatGroupBall(gens, [], [], np.zeros(0, dtype=np.int64), radius, L, False,
                         _Snapper(), {})

    def add(g, word):
        g = g.reduced(L)
        key, snapped = ball._key(g, add=True)
        if key in ball._index:
            return False
        ball._index[key] = len(ball.elements)
        ball.elements.append(Isometry(snapped[: dim * dim].reshape(dim, dim), snapped[dim * dim:]))
        ball.words.append(word)
        return True

    add(Isometry.identity(dim), ())
    lengths = [0]
    complete = True
    i = 0
    while i < len(ball.elements):
        g, w = ball.elements[i], ball.words[i]
        for s, h in enumerate(gens):
            prod = g @ h
            if lengths[i] >= radius:
                if ball.lookup(prod) is None:
                    complete = False
                continue
            if add(prod, w + (s,)):
                lengths.append(lengths[i] + 1)
                if len(ball.elements) > cap:
                    raise NonDiscreteError(
                        f"more than {cap} elements within radius {radius}; input may be non-discrete"
                    )
        i += 1
    ball.lengths = np.array(lengths, dtype=np.int64)
    ball.complete = complete
    return ball


# --- convex clipping -------------------------------------------------------------

def _clip(verts, tags, normal, c, new_tag, eps=1e-12):
    """Clip a convex polygon to ``normal . y <= c``.

    ``tags[i]`` labels the edge from ``verts[i]`` to ``verts[i+1]``; the new
    edge (if any) gets ``new_tag``.
    """
    k = len(verts)
    vals = verts @ normal - c
    if np.all(vals <= eps):
        return verts, tags
    if np.all(vals >= -eps):
        return verts[:0], []
    out_v, out_t = [], []
    for i in range(k):
        j = (i + 1) % k
        a, b = verts[i], verts[j]
        fa, fb = vals[i], vals[j]
        ina, inb = fa <= eps, fb <= eps
        if ina:
            out_v.append(a)
            out_t.append(tags[i])
            if not inb:
                t = fa / (fa - fb)
                out_v.append(a + t * (b - a))
                out_t.append(new_tag)
        elif inb:
            t = fa / (fa - fb)
            out_v.append(a + t * (b - a))
            out_t.append(tags[i])
    return _dedupe(np.array(out_v), out_t)


def _dedupe(verts, tags, tol=1e-9):
    keep_v, keep_t = [], []
    k = len(verts)
    for i in range(k):
        if np.linalg.norm(verts[i] - verts[(i + 1) % k]) > tol:
            keep_v.append(verts[i])
            keep_t.append(tags[i])
    if not keep_v:
        return verts[:0], []
    return np.array(keep_v), keep_t


def _area(verts) -> float:
    if len(verts) < 3:
        return 0.0
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _point_polygon_distance(p, verts) -> float:
    """Distance from ``p`` to a convex CCW polygon (0 inside)."""
    k = len(verts)
    inside = True
    best = math.inf
    for i in range(k):
        a, b = verts[i], verts[(i + 1) % k]
        e = b - a
        if e[0] * (p[1] - a[1]) - e[1] * (p[0] - a[0]) < -1e-14:
            inside = False
        t = np.clip(np.dot(p - a, e) / np.dot(e, e), 0.0, 1.0)
        best = min(best, float(np.linalg.norm(p - (a + t * e))))
    return 0.0 if inside else best


# --- Dirichlet domains -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DirichletPolygon:
    """Dirichlet domain of a base point.

    In dimension 2 ``vertices`` is a CCW polygon and ``tags[i]`` is the ball
    element whose central line carries the edge ``v_i -> v_{i+1}`` (None for
    the working disc).  In dimension 1 the vertices are ``[lo, hi]`` and the
    tags label those endpoints.
    """

    base: np.ndarray
    vertices: np.ndarray
    tags: tuple
    work_radius: float

    @property
    def dim(self) -> int:
        return len(self.base)

    def edge_lengths(self):
        if self.dim == 1:
            return [math.inf, math.inf]
        v = self.vertices
        return [float(np.linalg.norm(v[(i + 1) % len(v)] - v[i])) for i in range(len(v))]

    def neighbors(self, min_length: float = 1e-9) -> tuple:
        """Tags of edges of positive length, sorted."""
        return tuple(sorted({t for t, l in zip(self.tags, self.edge_lengths())
                             if t is not None and l > min_length}))

    @property
    def bounded(self) -> bool:
        return all(t is not None for t in self.tags)

    def contains(self, p, tol: float = 1e-9) -> bool:
        p = np.atleast_1d(np.asarray(p, dtype=float))
        if self.dim == 1:
            return self.vertices[0, 0] - tol <= p[0] <= self.vertices[1, 0] + tol
        return _point_polygon_distance(p, self.vertices) <= tol

    def image(self, g: Isometry) -> np.ndarray:
        """Vertices of ``g . D`` (orientation not normalized)."""
        return g(self.vertices)

    def to_json(self) -> dict:
        return {
            "base": _rounded(self.base),
            "vertices": _rounded(self.vertices),
            "tags": [None if t is None else int(t) for t in self.tags],
            "bounded": self.bounded,
            "neighbors": [int(t) for t in self.neighbors()],
        }


def _domain_from_points(p, points, tags, work_radius, n_disc=256) -> DirichletPolygon:
    p = np.asarray(p, dtype=float)
    d = np.linalg.norm(points - p, axis=1) if len(points) else np.zeros(0)
    order = np.argsort(d, kind="stable")
    if len(p) == 1:
        lo, hi, tlo, thi = p[0] - work_radius, p[0] + work_radius, None, None
        for k in order:
            q, m = points[k][0], 0.5 * (points[k][0] + p[0])
            if q > p[0] and m < hi:
                hi, thi = m, tags[k]
            elif q < p[0] and m > lo:
                lo, tlo = m, tags[k]
        return DirichletPolygon(p, np.array([[lo], [hi]]), (tlo, thi), work_radius)
    ang = 2 * np.pi * np.arange(n_disc) / n_disc
    verts = p + work_radius * np.column_stack([np.cos(ang), np.sin(ang)])
    vtags = [None] * n_disc
    reach = work_radius
    for k in order:
        if d[k] / 2 > reach + 1e-12:
            break  # no further bisector can meet the polygon
        q = points[k]
        normal = q - p
        c = 0.5 * (q @ q - p @ p)
        verts, vtags = _clip(verts, vtags, normal, c, tags[k])
        reach = float(np.max(np.linalg.norm(verts - p, axis=1)))
    return DirichletPolygon(p, verts, tuple(vtags), work_radius)


def _check_regular(ball, x0):
    for i, g in enumerate(ball.elements):
        if i and np.linalg.norm(g(x0) - x0) < 2 * REGULAR_TOL:
            raise RegularityError(
                f"base point {x0.tolist()} is fixed (to tolerance) by element {ball.words[i]}"
            )


def dirichlet_domain(ball: FlatGroupBall, x0, work_radius: float = 10.0,
                     check_stable: bool = True) -> DirichletPolygon:
    """``{y : d(y, x0) <= d(y, g x0)}`` over the non-identity ball elements."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if ball.lattice is not None:
        raise ValueError("Dirichlet domains are computed in the universal cover; pass a plane ball")
    _check_regular(ball, x0)
    pts = ball.orbit(x0)
    idx = np.arange(1, len(ball))
    dom = _domain_from_points(x0, pts[idx], list(idx), work_radius)
    if check_stable and not ball.complete and ball.radius >= 1:
        inner = idx[ball.lengths[idx] <= ball.radius - 1]
        smaller = _domain_from_points(x0, pts[inner], list(inner), work_radius)
        if set(smaller.neighbors()) != set(dom.neighbors()):
            raise UnstableDomainError(
                f"edge tags changed between radius {ball.radius - 1} and {ball.radius}"
            )
    return dom


def hausdorff(a, b) -> float:
    """Hausdorff distance between two convex polygons (or two intervals)."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape[1] == 1:
        return float(max(abs(a[:, 0].min() - b[:, 0].min()), abs(a[:, 0].max() - b[:, 0].max())))
    a, b = _ccw(a), _ccw(b)
    da = max(_point_polygon_distance(p, b) for p in a)
    db = max(_point_polygon_distance(p, a) for p in b)
    return max(da, db)


def _ccw(verts):
    return verts if _area(verts) >= 0 else verts[::-1]


@dataclass
class EquivarianceReport:
    checked: int
    max_distance: float
    failures: list  # (element index, distance)

    @property
    def passed(self) -> bool:
        return not self.failures


def equivariance_check(ball: FlatGroupBall, x0, check_radius=None, work_radius: float = 10.0,
                       tol: float = HAUSDORFF_TOL) -> EquivarianceReport:
    """Compare ``g . D(x0)`` with ``D(g x0)`` for elements up to ``check_radius``.

    Both domains are computed from the orbit of ``x0`` under the whole ball,
    so ``check_radius`` should leave a margin below ``ball.radius``.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if check_radius is None:
        check_radius = ball.radius - 2
    _check_regular(ball, x0)
    pts = ball.orbit(x0)
    tags = list(range(len(ball)))
    base = None
    failures, worst, n = [], 0.0, 0
    for g in range(len(ball)):
        if ball.lengths[g] > check_radius:
            continue
        others = [k for k in tags if k != g]
        dom = _domain_from_points(pts[g], pts[others], others, work_radius)
        if g == 0:
            base = dom
        dist = hausdorff(base.image(ball.elements[g]), dom.vertices)
        worst = max(worst, dist)
        n += 1
        if dist >= tol:
            failures.append((g, dist))
    return EquivarianceReport(n, worst, failures)


# --- Poincare neighbors ------------------------------------------------------------

@dataclass
class PoincareReport:
    neighbors: tuple
    checked: int
    failures: list  # element indices not regenerated

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self, ball=None) -> dict:
        words = (lambda g: list(ball.words[g])) if ball is not None else (lambda g: g)
        return {
            "passed": self.passed,
            "neighbors": [words(g) for g in self.neighbors],
            "checked": self.checked,
            "failures": [words(g) for g in self.failures[:20]],
        }


def poincare_neighbor_check(ball: FlatGroupBall, x0, neighbors=None,
                            work_radius: float = 10.0) -> PoincareReport:
    """Check that the Dirichlet neighbors of ``x0`` regenerate the ball.

    Every element of word length at most ``radius - 2`` must be reachable
    from the identity by multiplying with neighbors and their inverses
    without leaving the ball.  ``neighbors`` overrides the computed set.
    """
    if neighbors is None:
        neighbors = dirichlet_domain(ball, x0, work_radius).neighbors()
    neighbors = tuple(sorted(neighbors))
    steps = set(neighbors)
    for n in neighbors:
        inv = ball.inverse(n)
        if inv is not None:
            steps.add(inv)
    steps = sorted(steps)
    reached = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for h in frontier:
            for s in steps:
                k = ball.multiply(h, s)
                if k is not None and k not in reached:
                    reached.add(k)
                    nxt.append(k)
        frontier = nxt
    targets = [g for g in range(len(ball)) if ball.lengths[g] <= ball.radius - 2]
    failures = [g for g in targets if g not in reached]
    return PoincareReport(neighbors, len(targets), failures)


# --- torus scenes --------------------------------------------------------------------

def _reflection_normal(A):
    """Unit normal if ``A`` is a linear reflection, else None."""
    d = len(A)
    if not np.allclose(A, A.T, atol=ISO_TOL) or not np.allclose(A @ A, np.eye(d), atol=ISO_TOL):
        return None
    w, V = np.linalg.eigh(A)
    if np.sum(w < 0) != 1:
        return None
    u = V[:, int(np.argmin(w))]
    nz = np.flatnonzero(np.abs(u) > 1e-9)
    return -u if u[nz[0]] < 0 else u


@dataclass(frozen=True)
class FixedSet:
    """Lift of a reflection's fixed set: ``normal . x`` in ``offset + spacing Z``.

    ``spacing`` is None for a single hyperplane (plane scenes).
    """

    element: int
    normal: tuple
    offset: float
    spacing: float | None

    def offsets_in(self, lo: float, hi: float, tol: float = 1e-9):
        if self.spacing is None:
            return [self.offset] if lo - tol <= self.offset <= hi + tol else []
        k0 = math.ceil((lo - tol - self.offset) / self.spacing)
        out = []
        k = k0
        while self.offset + k * self.spacing <= hi + tol:
            out.append(self.offset + k * self.spacing)
            k += 1
        return out

    def to_json(self) -> dict:
        return {
            "element": self.element,
            "normal": _rounded(self.normal),
            "offset": round(self.offset, 12),
            "spacing": None if self.spacing is None else round(self.spacing, 12),
        }


def _torus_fixed_set(g: Isometry, lattice, element: int, search: int = 6):
    u = _reflection_normal(g.linear)
    if u is None:
        return None
    d = len(u)
    offs = []
    for k in itertools.product(range(-search, search + 1), repeat=d):
        lam = lattice @ np.array(k, dtype=float)
        r = g.shift - lam
        if np.linalg.norm(r - u * (u @ r)) < 1e-9:
            offs.append(float(u @ (lam - g.shift)) / 2)
    if not offs:
        return None  # glide reflection: no fixed points
    offs = sorted(offs)
    distinct = [offs[0]] + [b for a, b in zip(offs, offs[1:]) if b - a > 1e-9]
    if len(distinct) < 2:
        raise IrrationalMirrorError(f"cannot determine the period of the fixed set of element {element}")
    step = min(b - a for a, b in zip(distinct, distinct[1:]))
    # refine the period over the whole range found
    spacing = (distinct[-1] - distinct[0]) / round((distinct[-1] - distinct[0]) / step)
    offset = distinct[0] - spacing * math.floor(distinct[0] / spacing + 1e-9)
    if abs(offset - spacing) < 1e-9 or abs(offset) < 1e-12:
        offset = 0.0
    return FixedSet(element, tuple(float(x) for x in u), float(offset), float(spacing))


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.parent[max(a, b)] = min(a, b)


@dataclass
class TorusScene:
    """Chamber complex of a reflection arrangement on a torus (or a plane window).

    ``pieces`` are convex cells of the fundamental cell cut along all mirrors;
    ``piece_chamber`` glues them into chambers.  ``adjacency`` lists
    ``(chamber, chamber, reflection ids, facet midpoint)``; reflection ids index
    ``reflections``.  ``action[g, c]`` is the chamber ``g . c`` (torus only).
    """

    name: str
    lattice: np.ndarray | None
    mirrors: tuple
    group: FlatGroupBall | None
    generator_reflections: tuple  # mirror k -> reflection id
    reflections: tuple
    pieces: list
    piece_chamber: list
    adjacency: list
    action: np.ndarray | None

    @property
    def dim(self) -> int:
        return self.mirrors[0].dim

    @property
    def n_chambers(self) -> int:
        return max(self.piece_chamber) + 1 if self.piece_chamber else 0

    def group_order(self):
        return None if self.group is None else len(self.group)

    def action_report(self) -> dict:
        if self.action is None:
            return {"free": None, "transitive": None, "stabilizers": None}
        n = self.n_chambers
        fixed = [(g, c) for g in range(1, len(self.action)) for c in range(n)
                 if self.action[g, c] == c]
        orbit = set(int(x) for x in self.action[:, 0])
        return {
            "free": not fixed,
            "transitive": len(orbit) == n,
            "stabilizers": [[int(g), int(c)] for g, c in fixed[:20]],
        }

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "dimension": self.dim,
            "lattice": None if self.lattice is None else _rounded(self.lattice),
            "mirrors": [m.to_json() for m in self.mirrors],
            "group_order": self.group_order(),
            "reflections": [r.to_json() for r in self.reflections],
            "generator_reflections": list(self.generator_reflections),
            "chambers": self.n_chambers,
            "pieces": [{"vertices": _rounded(p), "chamber": c}
                       for p, c in zip(self.pieces, self.piece_chamber)],
            "adjacency": sorted({(a, b, tuple(sorted(r))) for a, b, r, _ in self.adjacency}),
            "action": self.action_report(),
        }
        out["adjacency"] = [[a, b, list(r)] for a, b, r in out["adjacency"]]
        return out


def _reflection_ids_at(point, reflections, isos, lattice, tol=1e-7):
    out = []
    for k, r in enumerate(reflections):
        g = isos[k]
        d = g(point) - point
        if lattice is not None:
            d = _lattice_residual(d, lattice)
        if np.linalg.norm(d) < tol:
            out.append(k)
    return frozenset(out)


def _cut_cells(dim, region, reflections, lattice):
    """Convex pieces of ``region`` cut by every lifted mirror."""
    if dim == 1:
        lo, hi = region
        cuts = {lo, hi}
        for r in reflections:
            for c in r.offsets_in(lo, hi):
                cuts.add(c * r.normal[0])
        pts = sorted(cuts)
        merged = [pts[0]]
        for x in pts[1:]:
            if x - merged[-1] > 1e-9:
                merged.append(x)
        return [np.array([[a], [b]]) for a, b in zip(merged, merged[1:])]
    pieces = [region]
    for r in reflections:
        u = np.array(r.normal)
        proj = region @ u
        for c in r.offsets_in(float(proj.min()), float(proj.max())):
            nxt = []
            for verts in pieces:
                tags = [None] * len(verts)
                for sgn in (1.0, -1.0):
                    v, _ = _clip(verts, tags, sgn * u, sgn * c, None)
                    if len(v) >= 3 and abs(_area(v)) > 1e-12:
                        nxt.append(v)
            pieces = nxt
    return pieces


def _facets(piece):
    if piece.shape[1] == 1:
        return [piece[0], piece[1]]
    k = len(piece)
    return [0.5 * (piece[i] + piece[(i + 1) % k]) for i in range(k)]


def _facet_key(x, lattice):
    if lattice is not None:
        c = _lattice_coords(x, lattice)
        c = c - np.floor(c + 1e-9)
        c[np.abs(c) < 1e-9] = 0.0
    else:
        c = x
    return tuple(int(round(v * 1e7)) for v in c)


def _interior_point(piece):
    return piece.mean(axis=0)


def _locate(x, pieces, tol=1e-9):
    for k, p in enumerate(pieces):
        if p.shape[1] == 1:
            if p[0, 0] - tol <= x[0] <= p[1, 0] + tol:
                return k
        elif _point_polygon_distance(x, _ccw(p)) <= tol:
            return k
    return None


def torus_scene(lattice, mirrors, name: str = "", window: float = 2.0,
                cap: int = 10_000) -> TorusScene:
    """Chambers of the arrangement of every reflection of the generated group.

    With ``lattice=None`` the scene is the plane (or line) window
    ``[-window, window]^d`` cut by the given mirrors only, and no action is
    computed.
    """
    mirrors = tuple(mirrors)
    if not mirrors:
        raise ValueError("at least one mirror is required")
    dim = mirrors[0].dim
    for m in mirrors:
        if m.dim != dim or _reflection_normal(m.linear) is None:
            raise ValueError("mirrors must be reflections of a common dimension")
        if not np.allclose(m(m(np.zeros(dim))), np.zeros(dim), atol=ISO_TOL):
            raise ValueError("mirror is not an involution")
    if lattice is None:
        reflections, isos = [], []
        gen_refl = []
        for k, m in enumerate(mirrors):
            u = _reflection_normal(m.linear)
            off = float(u @ m.shift) / 2
            for j, r in enumerate(reflections):
                if m.is_close(isos[j]):
                    gen_refl.append(j)
                    break
            else:
                gen_refl.append(len(reflections))
                reflections.append(FixedSet(k, tuple(u), off, None))
                isos.append(m)
        if dim == 1:
            region = (-window, window)
        else:
            region = window * np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
        group = None
        L = None
    else:
        L = np.atleast_2d(np.asarray(lattice, dtype=float))
        if L.shape != (dim, dim) or abs(np.linalg.det(L)) < 1e-12:
            raise ValueError("lattice must be a nonsingular d x d basis")
        Linv = np.linalg.inv(L)
        for k, m in enumerate(mirrors):
            M = Linv @ m.linear @ L
            if not np.allclose(M, np.round(M), atol=1e-9):
                raise IrrationalMirrorError(f"mirror {k} does not preserve the lattice")
        group = flat_group_ball(mirrors, radius=cap, lattice=L, cap=cap)
        if not group.complete:
            raise NonDiscreteError("group generated on the torus is not finite")
        reflections, isos = [], []
        for i, g in enumerate(group.elements):
            fs = _torus_fixed_set(g, L, i)
            if fs is not None:
                reflections.append(fs)
                isos.append(g)
        by_element = {r.element: k for k, r in enumerate(reflections)}
        gen_refl = [by_element[group.lookup(m)] for m in mirrors]
        if dim == 1:
            region = (0.0, float(L[0, 0])) if L[0, 0] > 0 else (float(L[0, 0]), 0.0)
        else:
            region = np.array([[0.0, 0.0], L[:, 0], L[:, 0] + L[:, 1], L[:, 1]])
            region = _ccw(region)

    pieces = _cut_cells(dim, region, reflections, L)
    uf = _UnionFind(len(pieces))
    by_key = {}
    for k, p in enumerate(pieces):
        for m in _facets(p):
            by_key.setdefault(_facet_key(m, L), []).append((k, m))
    walls = []
    for key in sorted(by_key):
        entries = by_key[key]
        if len(entries) == 1:
            continue  # window boundary
        if len(entries) != 2:
            raise RuntimeError(f"facet {key} is shared by {len(entries)} pieces")
        (a, m), (b, _) = entries
        refl = _reflection_ids_at(m, reflections, isos, L)
        if refl:
            walls.append((a, b, refl, m))
        else:
            uf.union(a, b)
    roots = sorted({uf.find(k) for k in range(len(pieces))})
    rid = {r: i for i, r in enumerate(roots)}
    piece_chamber = [rid[uf.find(k)] for k in range(len(pieces))]
    adjacency = [(min(piece_chamber[a], piece_chamber[b]), max(piece_chamber[a], piece_chamber[b]),
                  refl, m) for a, b, refl, m in walls]

    action = None
    if group is not None:
        n = len(roots)
        rep = {}
        for k, p in enumerate(pieces):
            c = piece_chamber[k]
            if c not in rep or _size(p) > _size(pieces[rep[c]]):
                rep[c] = k
        action = np.full((len(group), n), -1, dtype=np.int64)
        for gi, g in enumerate(group.elements):
            for c in range(n):
                x = reduce_point(g(_interior_point(pieces[rep[c]])), L)
                k = _locate(x, pieces)
                if k is None:
                    raise RuntimeError(f"image of chamber {c} under element {gi} not located")
                action[gi, c] = piece_chamber[k]
    return TorusScene(name, L, mirrors, group, tuple(gen_refl), tuple(reflections),
                      pieces, piece_chamber, adjacency, action)


def _size(p):
    if p.shape[1] == 1:
        return float(p[1, 0] - p[0, 0])
    return abs(_area(p))


def _components(n, edges):
    uf = _UnionFind(n)
    for a, b in edges:
        uf.union(a, b)
    return len({uf.find(k) for k in range(n)})


@dataclass(frozen=True)
class DissectingResult:
    reflection: int
    components: int

    @property
    def dissecting(self) -> bool:
        return self.components == 2

    def to_json(self) -> dict:
        return {"reflection": self.reflection, "components": self.components,
                "dissecting": self.dissecting}


def dissecting_check(scene: TorusScene, index: int, by: str = "mirror") -> DissectingResult:
    """Cut chamber adjacencies across the fixed set of one reflection.

    ``index`` is a mirror number (``by="mirror"``) or a reflection id
    (``by="reflection"``).
    """
    rid = scene.generator_reflections[index] if by == "mirror" else index
    edges = [(a, b) for a, b, refl, _ in scene.adjacency if rid not in refl]
    return DissectingResult(rid, _components(scene.n_chambers, edges))


@dataclass
class RelationResult:
    identity: bool
    isometry: Isometry

    def to_json(self) -> dict:
        return {"identity": self.identity, "isometry": self.isometry.to_json()}


def relation_check(scene_or_ball, word) -> RelationResult:
    """Compose the 0-based generator ``word`` and compare with the identity."""
    if isinstance(scene_or_ball, TorusScene):
        gens, L = scene_or_ball.mirrors, scene_or_ball.lattice
    else:
        gens, L = scene_or_ball.generators, scene_or_ball.lattice
    g = Isometry.identity(gens[0].dim)
    for s in word:
        if not 0 <= s < len(gens):
            raise ValueError(f"generator {s} out of range")
        g = g @ gens[s]
    g = g.reduced(L)
    return RelationResult(g.is_identity(L), g)


def same_isometry(scene: TorusScene, i: int, j: int) -> bool:
    return scene.mirrors[i].is_close(scene.mirrors[j], scene.lattice)


# --- named scenes --------------------------------------------------------------------

SQRT2, SQRT3 = math.sqrt(2.0), math.sqrt(3.0)
ALPHA1 = np.array([SQRT2, 0.0])
ALPHA2 = np.array([-1.0 / SQRT2, math.sqrt(1.5)])


def _axis_mirrors(offsets):
    return [reflection([1.0, 0.0], offsets[0]), reflection([0.0, 1.0], offsets[1]),
            reflection([1.0, 0.0], offsets[2]), reflection([0.0, 1.0], offsets[3])]


def scene_square_2z() -> TorusScene:
    """Torus R^2/(2Z)^2 with mirrors s1: x=0, s2: y=0, s3: x=1/2, s4: y=1/2."""
    return torus_scene(2.0 * np.eye(2), _axis_mirrors([0, 0, 0.5, 0.5]), name="square-2z")


def scene_square_z() -> TorusScene:
    """Torus R^2/Z^2 with the same four mirror lines; s1 = s3 and s2 = s4 there."""
    return torus_scene(np.eye(2), _axis_mirrors([0, 0, 0.5, 0.5]), name="square-z")


def scene_su3() -> TorusScene:
    """Torus R^2 / Z{a1, a2} with the three A2 root mirrors through 0."""
    L = np.column_stack([ALPHA1, ALPHA2])
    mirrors = [reflection(ALPHA1), reflection(ALPHA2), reflection(ALPHA1 + ALPHA2)]
    return torus_scene(L, mirrors, name="su3")


def scene_su2() -> TorusScene:
    """Circle R/Z with the reflection x -> -x (fixed points 0 and 1/2)."""
    return torus_scene(np.array([[1.0]]), [reflection([1.0], 0.0)], name="su2")


TORUS_SCENES = {
    "square-2z": scene_square_2z,
    "square-z": scene_square_z,
    "su3": scene_su3,
    "su2": scene_su2,
}


@dataclass(frozen=True)
class Scenario:
    """A Dirichlet scenario: mirrors in the plane (or line) and a base point."""

    name: str
    mirrors: tuple  # (normal, offset) pairs
    base_point: tuple
    radius: int = 6

    def isometries(self):
        return [reflection(n, c) for n, c in self.mirrors]

    def ball(self, radius=None, cap: int = 50_000) -> FlatGroupBall:
        return flat_group_ball(self.isometries(), self.radius if radius is None else radius, cap=cap)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "mirrors": [{"normal": list(n), "offset": c} for n, c in self.mirrors],
            "base_point": list(self.base_point),
            "radius": self.radius,
        }

    @classmethod
    def from_json(cls, data) -> "Scenario":
        mirrors = tuple((tuple(float(x) for x in m["normal"]), float(m.get("offset", 0.0)))
                        for m in data["mirrors"])
        return cls(data.get("name", ""), mirrors, tuple(float(x) for x in data["base_point"]),
                   int(data.get("radius", 6)))


SCENARIOS = {
    # right isosceles triangle (0,0), (1,0), (1,1): angles pi/4, pi/2, pi/4
    "tri244": Scenario("tri244", (((0.0, 1.0), 0.0), ((1.0, 0.0), 1.0), ((-1.0, 1.0), 0.0)),
                       (0.7, 0.2)),
    # triangle (0,0), (1,0), (1, sqrt 3): angles pi/3, pi/2, pi/6
    "tri236": Scenario("tri236", (((0.0, 1.0), 0.0), ((1.0, 0.0), 1.0), ((-SQRT3, 1.0), 0.0)),
                       (0.7, 0.3)),
    "a2-linear": Scenario("a2-linear", ((tuple(ALPHA1), 0.0), (tuple(ALPHA2), 0.0)),
                          (1.0, 0.3)),
    "mirror-pair": Scenario("mirror-pair", (((1.0,), 0.0), ((1.0,), 1.0)), (0.3,), 2),
}
EUCLIDEAN_SCENARIOS = ("tri244", "tri236")


# --- lattices of SU(n) ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WeightLatticeData:
    """Root lattice, analytically integral lattice and weight lattice of SU(n).

    Bases are the columns of ``n x (n-1)`` matrices in the trace-zero
    hyperplane of ``R^n``.
    """

    n: int
    root_basis: np.ndarray
    anal_basis: np.ndarray
    alg_basis: np.ndarray
    cartan: np.ndarray
    index_anal: int
    index_alg: int
    weyl_order: int

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "root_basis": _rounded(self.root_basis.T),
            "anal_basis": _rounded(self.anal_basis.T),
            "alg_basis": _rounded(self.alg_basis.T),
            "cartan": self.cartan.astype(int).tolist(),
            "index_anal": self.index_anal,
            "index_alg": self.index_alg,
            "weyl_order": self.weyl_order,
            "simply_connected": bool(np.allclose(self.anal_basis, self.alg_basis)),
        }


def lattice_contains(basis, vectors, tol: float = 1e-9) -> bool:
    """Whether every column of ``vectors`` is an integer combination of ``basis``."""
    coeffs, *_ = np.linalg.lstsq(basis, vectors, rcond=None)
    if not np.allclose(basis @ coeffs, vectors, atol=tol):
        return False
    return bool(np.allclose(coeffs, np.round(coeffs), atol=1e-7))


def _index(sub, sup) -> int:
    """``|sup / sub|`` from the ratio of Gram determinants."""
    ratio = np.linalg.det(sub.T @ sub) / np.linalg.det(sup.T @ sup)
    return int(round(math.sqrt(ratio)))


def su_torus_data(n: int) -> WeightLatticeData:
    if n < 2:
        raise ValueError("SU(n) needs n >= 2")
    e = np.eye(n)
    roots = np.column_stack([e[i] - e[i + 1] for i in range(n - 1)])
    weights = np.column_stack([e[: i + 1].sum(axis=0) - (i + 1) / n for i in range(n - 1)])
    cartan = np.round(2 * roots.T @ roots / np.diag(roots.T @ roots)[None, :])
    # SU(n) is simply connected: the analytically integral lattice is the weight lattice
    anal = weights.copy()
    return WeightLatticeData(
        n=n,
        root_basis=roots,
        anal_basis=anal,
        alg_basis=weights,
        cartan=cartan,
        index_anal=_index(roots, anal),
        index_alg=_index(roots, weights),
        weyl_order=math.factorial(n),
    )


# --- SVG -------------------------------------------------------------------------------

def _svg(shapes, bounds, size=400):
    (x0, y0), (x1, y1) = bounds
    span = max(x1 - x0, y1 - y0) or 1.0
    scale = size / span

    def tx(p):
        return (p[0] - x0) * scale, (y1 - p[1]) * scale

    body = []
    for kind, data, attrs in shapes:
        if kind == "poly":
            pts = " ".join(f"{a:.3f},{b:.3f}" for a, b in (tx(p) for p in data))
            body.append(f'<polygon points="{pts}" {attrs}/>')
        elif kind == "line":
            (a, b), (c, d) = tx(data[0]), tx(data[1])
            body.append(f'<line x1="{a:.3f}" y1="{b:.3f}" x2="{c:.3f}" y2="{d:.3f}" {attrs}/>')
        elif kind == "text":
            a, b = tx(data[0])
            body.append(f'<text x="{a:.3f}" y="{b:.3f}" font-size="12" {attrs}>{data[1]}</text>')
    w = (x1 - x0) * scale
    h = (y1 - y0) * scale
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}">\n'
            + "\n".join(body) + "\n</svg>\n")


def _as_plane(verts):
    verts = np.asarray(verts, dtype=float)
    if verts.shape[1] == 1:
        return np.column_stack([verts[:, 0], np.zeros(len(verts))])
    return verts


def dirichlet_svg(dom: DirichletPolygon, ball: FlatGroupBall | None = None) -> str:
    v = _as_plane(dom.vertices)
    lo, hi = v.min(axis=0) - 0.5, v.max(axis=0) + 0.5
    shapes = [("poly", v, 'fill="#cde" stroke="black" stroke-width="1"')]
    if dom.dim == 2:
        for i, t in enumerate(dom.tags):
            if t is None:
                continue
            a, b = v[i], v[(i + 1) % len(v)]
            d = (b - a) / (np.linalg.norm(b - a) or 1.0)
            shapes.append(("line", (a - 10 * d, b + 10 * d), 'stroke="#c33" stroke-dasharray="4"'))
    base = _as_plane(dom.base[None, :])[0]
    shapes.append(("text", (base, "x0"), ""))
    if ball is not None:
        for p in _as_plane(ball.orbit(dom.base)):
            if np.all(p >= lo) and np.all(p <= hi):
                shapes.append(("text", (p, "."), ""))
    return _svg(shapes, (lo, hi))


def scene_svg(scene: TorusScene) -> str:
    allv = np.vstack([_as_plane(p) for p in scene.pieces])
    lo, hi = allv.min(axis=0) - 0.1, allv.max(axis=0) + 0.1
    shapes = []
    for p, c in zip(scene.pieces, scene.piece_chamber):
        q = _as_plane(p)
        if len(q) == 2:
            q = np.array([q[0] + [0, -0.05], q[1] + [0, -0.05], q[1] + [0, 0.05], q[0] + [0, 0.05]])
        hue = (c * 47) % 360
        shapes.append(("poly", q, f'fill="hsl({hue},60%,80%)" stroke="black" stroke-width="0.5"'))
        shapes.append(("text", (q.mean(axis=0), str(c)), 'text-anchor="middle"'))
    return _svg(shapes, (lo, hi))
