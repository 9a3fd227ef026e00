import math

import numpy as np
import pytest

from coxchamber.flatmodel import (
    EUCLIDEAN_SCENARIOS,
    SCENARIOS,
    IrrationalMirrorError,
    Isometry,
    NonDiscreteError,
    RegularityError,
    Scenario,
    UnstableDomainError,
    dirichlet_domain,
    dirichlet_svg,
    dissecting_check,
    equivariance_check,
    flat_group_ball,
    hausdorff,
    lattice_contains,
    poincare_neighbor_check,
    reduce_point,
    reflection,
    relation_check,
    same_isometry,
    scene_square_2z,
    scene_square_z,
    scene_su2,
    scene_su3,
    scene_svg,
    su_torus_data,
    torus_scene,
    translation,
)

from oracles import convex_polygon_area, weight_cosets_brute


# --- isometries -------------------------------------------------------------------------

def test_reflection_basics():
    r = reflection([0.0, 2.0], 1.0)  # line y = 1/2
    assert np.allclose(r([3.0, 0.0]), [3.0, 1.0])
    assert (r @ r).is_identity()
    assert np.allclose(r.inverse().linear, r.linear)


def test_composition_order():
    t = translation([1.0, 0.0])
    r = reflection([1.0, 0.0], 0.0)
    x = np.array([0.25, 0.0])
    # (t @ r)(x) = t(r(x))
    assert np.allclose((t @ r)(x), t(r(x)))
    assert np.allclose((t @ r)(x), [0.75, 0.0])


def test_parallel_mirrors_give_translation():
    a, b = reflection([1.0, 0.0], 0.0), reflection([1.0, 0.0], 0.5)
    g = a @ b
    assert np.allclose(g.linear, np.eye(2)) and np.allclose(g.shift, [-1.0, 0.0])
    assert not g.is_identity()
    assert g.is_identity(np.eye(2))
    assert not g.is_identity(2 * np.eye(2))


def test_reduce_point():
    L = np.column_stack([[1.0, 0.0], [0.5, 1.0]])
    p = reduce_point([2.3, 1.5], L)
    c = np.linalg.solve(L, p)
    assert np.all(c >= -1e-12) and np.all(c < 1)
    diff = np.linalg.solve(L, np.array([2.3, 1.5]) - p)
    assert np.allclose(diff, np.round(diff))


def test_isometry_shape_validation():
    with pytest.raises(ValueError):
        Isometry(np.eye(2), np.zeros(3))


# --- balls --------------------------------------------------------------------------------

def test_line_ball():
    ball = SCENARIOS["mirror-pair"].ball()
    assert len(ball) == 5 and not ball.complete


def test_ball_independent_of_generator_order():
    sc = SCENARIOS["tri244"]
    gens = sc.isometries()
    a = flat_group_ball(gens, 5)
    b = flat_group_ball(gens[::-1], 5)
    assert len(a) == len(b)
    pa = {tuple(np.round(p, 8)) for p in a.orbit(sc.base_point)}
    pb = {tuple(np.round(p, 8)) for p in b.orbit(sc.base_point)}
    assert pa == pb


def test_finite_plane_group_completes():
    ball = SCENARIOS["a2-linear"].ball(radius=10)
    assert ball.complete and len(ball) == 6
    r = relation_check(ball, [0, 1, 0, 1, 0, 1])
    assert r.identity


def test_ball_lookup_and_multiply():
    ball = SCENARIOS["tri244"].ball(radius=4)
    for i in range(len(ball)):
        j = ball.inverse(i)
        if j is not None:
            assert ball.multiply(i, j) == 0


# --- Dirichlet domains ------------------------------------------------------------------

def test_line_domain_is_unit_interval():
    sc = SCENARIOS["mirror-pair"]
    dom = dirichlet_domain(sc.ball(), sc.base_point)
    assert np.allclose(sorted(dom.vertices[:, 0]), [0.0, 1.0])
    assert dom.bounded


@pytest.mark.parametrize("name,area,corners", [
    ("tri244", 0.5, [(0, 0), (1, 0), (1, 1)]),
    ("tri236", math.sqrt(3) / 2, [(0, 0), (1, 0), (1, math.sqrt(3))]),
])
def test_triangle_domains(name, area, corners):
    sc = SCENARIOS[name]
    ball = sc.ball()
    dom = dirichlet_domain(ball, sc.base_point)
    assert dom.bounded
    assert convex_polygon_area(dom.vertices) == pytest.approx(area, abs=1e-9)
    assert hausdorff(dom.vertices, np.array(corners, dtype=float)) < 1e-9
    # the three mirrors are the only neighbors
    assert sorted(ball.words[g] for g in dom.neighbors()) == [(0,), (1,), (2,)]


def test_linear_wedge_domain():
    sc = SCENARIOS["a2-linear"]
    ball = sc.ball(radius=10)
    dom = dirichlet_domain(ball, sc.base_point)
    assert not dom.bounded
    assert dom.contains(sc.base_point)
    assert len(dom.neighbors()) == 2
    # a 60-degree wedge with apex at the origin, cut off by the working disc
    v = dom.vertices
    assert np.min(np.linalg.norm(v, axis=1)) < 1e-9
    far = v[np.linalg.norm(v, axis=1) > 1e-9]
    ang = np.degrees(np.arctan2(far[:, 1], far[:, 0]))
    assert ang.max() - ang.min() == pytest.approx(60.0, abs=1e-6)


def test_regularity_rejected():
    sc = SCENARIOS["tri244"]
    with pytest.raises(RegularityError):
        dirichlet_domain(sc.ball(radius=3), (0.5, 0.0))


def test_unstable_domain_detected():
    sc = SCENARIOS["tri244"]
    with pytest.raises(UnstableDomainError):
        dirichlet_domain(sc.ball(radius=1), (0.9, 0.05))


def test_domains_tile_by_area():
    sc = SCENARIOS["tri244"]
    ball = sc.ball()
    dom = dirichlet_domain(ball, sc.base_point)
    # images of the domain under the 8 elements of the point group at the origin cover the square
    pts = np.array([[0.3, 0.7], [-0.5, 0.2], [0.1, -0.9], [-0.6, -0.6]])
    covered = [any(dom.contains(ball.elements[g].inverse()(p)) for g in range(len(ball))) for p in pts]
    assert all(covered)


@pytest.mark.parametrize("name", EUCLIDEAN_SCENARIOS)
def test_equivariance(name):
    sc = SCENARIOS[name]
    ball = sc.ball(radius=8)
    rep = equivariance_check(ball, sc.base_point, check_radius=6)
    assert rep.passed and rep.checked > 20 and rep.max_distance < 1e-6


@pytest.mark.parametrize("name", EUCLIDEAN_SCENARIOS)
def test_poincare(name):
    sc = SCENARIOS[name]
    ball = sc.ball()
    rep = poincare_neighbor_check(ball, sc.base_point)
    assert rep.passed and rep.checked > 0


def test_poincare_negative_control():
    sc = SCENARIOS["tri244"]
    ball = sc.ball()
    nb = dirichlet_domain(ball, sc.base_point).neighbors()
    rep = poincare_neighbor_check(ball, sc.base_point, neighbors=nb[:-1])
    assert not rep.passed and rep.failures


def test_scenario_json_roundtrip():
    for sc in SCENARIOS.values():
        assert Scenario.from_json(sc.to_json()) == sc


# --- torus scenes ----------------------------------------------------------------------

def test_square_2z():
    sc = scene_square_2z()
    assert sc.group_order() == 16 and sc.n_chambers == 16
    rep = sc.action_report()
    assert rep["free"] and rep["transitive"]
    assert relation_check(sc, [0, 2, 0, 2]).identity
    assert relation_check(sc, [1, 3, 1, 3]).identity
    assert not relation_check(sc, [0, 2]).identity
    assert not same_isometry(sc, 0, 2)


def test_square_z_mirrors_coincide():
    sc = scene_square_z()
    assert sc.group_order() == 4 and sc.n_chambers == 4
    assert same_isometry(sc, 0, 2) and same_isometry(sc, 1, 3)
    assert relation_check(sc, [0, 2]).identity


def test_su3_scene():
    sc = scene_su3()
    assert sc.group_order() == 6 and sc.n_chambers == 6
    rep = sc.action_report()
    assert rep["free"] and rep["transitive"]
    # on the torus no root mirror separates the chambers
    assert [dissecting_check(sc, k).components for k in range(3)] == [1, 1, 1]


def test_su2_circle():
    sc = scene_su2()
    assert sc.n_chambers == 2
    assert dissecting_check(sc, 0).dissecting


def test_plane_single_mirror_dissects():
    sc = torus_scene(None, [reflection([1.0, 0.0], 0.3)])
    assert sc.n_chambers == 2 and sc.action is None
    assert dissecting_check(sc, 0).components == 2


def test_irrational_mirror_rejected():
    m = reflection([math.cos(0.3), math.sin(0.3)], 0.0)
    with pytest.raises(IrrationalMirrorError):
        torus_scene(np.eye(2), [m])


def test_non_discrete_detected():
    # reflections in x = 0 and x = 1/3 on the line generate a finite group mod Z,
    # but mod sqrt(2) Z the translation by 2/3 has infinite order
    gens = [reflection([1.0], 0.0), reflection([1.0], 1.0 / 3.0)]
    with pytest.raises(NonDiscreteError):
        torus_scene(np.array([[math.sqrt(2)]]), gens, cap=200)


def test_scene_json_and_svg():
    sc = scene_su3()
    data = sc.to_json()
    assert data["chambers"] == 6 and data["action"]["free"]
    assert scene_svg(sc).startswith("<svg")
    s = SCENARIOS["tri244"]
    assert "<polygon" in dirichlet_svg(dirichlet_domain(s.ball(), s.base_point))


# --- lattices ------------------------------------------------------------------------

@pytest.mark.parametrize("n", range(2, 7))
def test_su_lattice_indices(n):
    d = su_torus_data(n)
    assert d.index_alg == d.index_anal == n
    assert round(np.linalg.det(d.cartan)) == n
    assert weight_cosets_brute(n) == n
    assert lattice_contains(d.alg_basis, d.root_basis)
    assert not lattice_contains(d.root_basis, d.alg_basis)
    assert d.weyl_order == math.factorial(n)


def test_su_lattice_rejects_small_n():
    with pytest.raises(ValueError):
        su_torus_data(1)
