"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line; the lines are
repeated in the terminal summary.  Reference values come from the
independent oracles in ``oracles.py``.
"""
import itertools
import math
import time
from fractions import Fraction

import numpy as np

from coxchamber.chamber import interval_poset, natural_equipment, simplex_poset
from coxchamber.classify import _finite_catalog, classify_system, finite_group_order
from coxchamber.core import INF, from_upper, parse_coxeter_matrix
from coxchamber.flatmodel import (
    EUCLIDEAN_SCENARIOS,
    SCENARIOS,
    dissecting_check,
    equivariance_check,
    poincare_neighbor_check,
    relation_check,
    same_isometry,
    scene_square_2z,
    scene_square_z,
    scene_su2,
    scene_su3,
    su_torus_data,
)
from coxchamber.geomrep import bourbaki_property_check, enumerate_group
from coxchamber.simplex import enumerate_simplex_equipments
from coxchamber.vinberg import (
    build_universal_space,
    check_manifold_and_action,
    dissecting_components,
    euler_characteristic,
)

from oracles import (
    batched_gram_verdicts,
    closure_order,
    connected_upper,
    cosine_forms,
    dihedral_gens,
    path_rows,
    signed_permutation_gens,
    text_matrix,
    transposed_tits_gens,
    transposition_matrices,
    weight_cosets_brute,
)

VERDICTS = ("finite", "affine", "indefinite")


def test_criterion_1_classifier_matches_gram(acceptance):
    start = time.perf_counter()
    values = [2, 3, 4, 5, 6, 7, 8, INF]
    total, mismatches = 0, []
    for rank in range(1, 5):
        uppers = [u for u in itertools.product(values, repeat=rank * (rank - 1) // 2)
                  if connected_upper(u, rank)]
        expected = batched_gram_verdicts(cosine_forms(uppers, rank))
        for u, e in zip(uppers, expected):
            got = classify_system(from_upper(rank, u), check=False).verdict
            if got != VERDICTS[e]:
                mismatches.append((rank, u, got, VERDICTS[e]))
        total += len(uppers)
    elapsed = time.perf_counter() - start
    acceptance(1, not mismatches and elapsed < 10.0,
               f"{total} connected matrices, {len(mismatches)} mismatches, {elapsed:.2f}s (< 10s)")


def _order_cases():
    cases = []
    for n in range(1, 5):  # A1..A4
        cases.append((f"A{n}", text_matrix(path_rows([3] * (n - 1))), transposition_matrices(n + 1)))
    for n in range(2, 5):  # B2..B4
        rows = path_rows([3] * (n - 2) + [4])
        cases.append((f"B{n}", text_matrix(rows), signed_permutation_gens(n)))
    d4 = [[1, 3, 2, 2], [3, 1, 3, 3], [2, 3, 1, 2], [2, 3, 2, 1]]
    cases.append(("D4", text_matrix(d4), signed_permutation_gens(4, even=True)))
    f4 = path_rows([3, 4, 3])
    cases.append(("F4", text_matrix(f4), transposed_tits_gens(f4)))
    h3 = path_rows([5, 3])
    cases.append(("H3", text_matrix(h3), transposed_tits_gens(h3)))
    for m in range(3, 9):
        cases.append((f"I2({m})", text_matrix(path_rows([m])), dihedral_gens(m)))
    for k in range(1, 5):
        rows = [[1 if i == j else 2 for j in range(k)] for i in range(k)]
        signs = [np.diag([-1.0 if i == j else 1.0 for i in range(k)]) for j in range(k)]
        cases.append((f"A1^{k}", text_matrix(rows), signs))
    return cases


def test_criterion_2_group_orders(acceptance):
    start = time.perf_counter()
    bad, details = [], []
    for name, text, gens in _order_cases():
        m = parse_coxeter_matrix(text)
        g = enumerate_group(m)
        oracle = closure_order(gens)
        formula = finite_group_order(m)
        if not (g.complete and len(g) == formula == oracle):
            bad.append((name, len(g), formula, oracle))
        details.append((oracle, name))
    elapsed = time.perf_counter() - start
    largest = max(details)
    acceptance(2, not bad and elapsed < 60.0,
               f"{len(details)} groups, {len(bad)} disagreements with the closure oracle, "
               f"largest {largest[1]}={largest[0]}, {elapsed:.2f}s (< 60s)")


def test_criterion_3_bourbaki(acceptance):
    groups = []
    for rank in range(1, 10):
        for label, diagram in _finite_catalog(rank):
            if label.order() <= 120:
                groups.append((label.name, diagram.to_matrix()))
    for m in range(5, 61):  # remaining dihedral groups of order <= 120
        groups.append((f"I2({m})", parse_coxeter_matrix(f"1 {m}; {m} 1")))
    failed = []
    for name, matrix in groups:
        g = enumerate_group(matrix)
        if not (g.complete and len(g) <= 120 and bourbaki_property_check(g).passed):
            failed.append(name)
    acceptance(3, not failed,
               f"{len(groups)} catalog groups of order <= 120 checked, failures: {failed or 'none'}")


def _dissects_all(cx):
    return all(dissecting_components(cx, s) == 2 for s in range(cx.equipment.matrix.rank))


def test_criterion_4_universal_spaces(acceptance):
    problems = []
    interval = interval_poset()
    for m in range(2, 7):
        cx = build_universal_space(interval, natural_equipment(interval, parse_coxeter_matrix(f"1 {m}; {m} 1")))
        if cx.counts()[1] != 2 * m or euler_characteristic(cx) != 0:
            problems.append(f"I2({m}) counts {cx.counts()}")
        if not check_manifold_and_action(cx).passed or not _dissects_all(cx):
            problems.append(f"I2({m}) checks")
    d2 = simplex_poset(2)
    cx = build_universal_space(d2, natural_equipment(d2, parse_coxeter_matrix("1 3 2; 3 1 3; 2 3 1")))
    if cx.counts() != [14, 36, 24] or euler_characteristic(cx) != 2:
        problems.append(f"A3 counts {cx.counts()}")
    if not check_manifold_and_action(cx).passed or not _dissects_all(cx):
        problems.append("A3 checks")
    d3 = simplex_poset(3)
    a4 = parse_coxeter_matrix(text_matrix(path_rows([3, 3, 3])))
    cx = build_universal_space(d3, natural_equipment(d3, a4))
    if euler_characteristic(cx) != 0:
        problems.append(f"A4 chi {euler_characteristic(cx)}")
    if not check_manifold_and_action(cx).passed or not _dissects_all(cx):
        problems.append("A4 checks")
    acceptance(4, not problems,
               "I2(2..6) 2m chambers chi 0; A3 24/36/14 chi 2; A4 chi 0; "
               f"manifold and dissecting checks; problems: {problems or 'none'}")


def test_criterion_5_simplex_enumeration(acceptance):
    start = time.perf_counter()
    recs = enumerate_simplex_equipments(2, 6)
    elapsed = time.perf_counter() - start
    affine = {r.labels() for r in recs if r.kind == "affine"}
    spherical_bad = [r.labels() for r in recs if r.kind == "spherical"
                     and sum(Fraction(1, p) for p in r.labels()) <= 1]
    ok = affine == {(3, 3, 3), (2, 4, 4), (2, 3, 6)} and not spherical_bad and elapsed < 5.0
    acceptance(5, ok, f"affine {sorted(affine)}, {len(spherical_bad)} bad spherical records, "
                      f"{len(recs)} records in {elapsed:.2f}s (< 5s)")


def test_criterion_6_poincare(acceptance):
    start = time.perf_counter()
    sc = SCENARIOS["tri244"]
    ball = sc.ball(radius=6)
    rng = np.random.default_rng(20261015)
    points = []
    while len(points) < 10:
        # uniform in the triangle (0,0), (1,0), (1,1), away from its edges
        x, y = rng.uniform(0, 1, size=2)
        if y < x and min(y, 1 - x, x - y) > 1e-3:
            points.append((x, y))
    failures, checked = 0, 0
    for p in points:
        rep = poincare_neighbor_check(ball, p)
        failures += len(rep.failures)
        checked += rep.checked
    elapsed = time.perf_counter() - start
    acceptance(6, failures == 0 and elapsed < 30.0,
               f"10 base points, {checked} interior elements checked, {failures} failures, "
               f"{elapsed:.2f}s (< 30s)")


def test_criterion_7_equivariance(acceptance):
    parts, ok = [], True
    for name in EUCLIDEAN_SCENARIOS:
        sc = SCENARIOS[name]
        shipped = sc.ball()
        # domains come from the orbit under a ball two steps larger
        rep = equivariance_check(sc.ball(radius=sc.radius + 2), sc.base_point,
                                 check_radius=sc.radius)
        ok = ok and rep.passed and rep.checked == len(shipped) and rep.max_distance < 1e-6
        parts.append(f"{name}: {rep.checked}/{len(shipped)} elements, max {rep.max_distance:.1e}")
    acceptance(7, ok, "; ".join(parts))


def test_criterion_8_torus(acceptance):
    left, right, su3, su2 = scene_square_2z(), scene_square_z(), scene_su3(), scene_su2()
    lrep, srep = left.action_report(), su3.action_report()
    checks = {
        "left (s1s3)^2": relation_check(left, [0, 2, 0, 2]).identity,
        "left (s2s4)^2": relation_check(left, [1, 3, 1, 3]).identity,
        "left order 16 = chambers": left.group_order() == 16 == left.n_chambers,
        "left free transitive": lrep["free"] and lrep["transitive"],
        "right s1=s3, s2=s4": same_isometry(right, 0, 2) and same_isometry(right, 1, 3),
        "su3 6 chambers": su3.n_chambers == 6,
        "su3 free transitive": srep["free"] and srep["transitive"],
        "su3 non-dissecting": all(
            not dissecting_check(su3, r, by="reflection").dissecting
            for r in range(len(su3.reflections))
        ),
        "su2 dissecting": all(
            dissecting_check(su2, r, by="reflection").dissecting
            for r in range(len(su2.reflections))
        ),
    }
    failed = [k for k, v in checks.items() if not v]
    acceptance(8, not failed, f"{len(checks)} torus checks, failed: {failed or 'none'}")


def test_criterion_9_lattices(acceptance):
    rows = []
    for n in range(2, 7):
        d = su_torus_data(n)
        det = round(float(np.linalg.det(d.cartan)))
        rows.append((n, d.index_alg, det, weight_cosets_brute(n)))
    ok = all(idx == det == brute for _, idx, det, brute in rows)
    acceptance(9, ok, "index = det(Cartan) = brute count for n=2..6: "
                      + ", ".join(f"{n}:{i}" for n, i, _, _ in rows))
