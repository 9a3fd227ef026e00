import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coxchamber.classify import (
    ComponentLabel,
    NotFiniteError,
    _affine_catalog,
    _finite_catalog,
    classify_system,
    finite_group_order,
    gram_kind,
    is_finite,
)
from coxchamber.core import INF, from_upper, parse_coxeter_matrix, permute
from coxchamber.geomrep import enumerate_group

from oracles import cosine_form, gram_verdict


def names(report):
    return [lab.name for lab in report.labels]


def test_a2():
    r = classify_system(parse_coxeter_matrix("1 3; 3 1"))
    assert r.verdict == "finite" and names(r) == ["A2"] and r.order == 6
    assert r.labels[0].alias == "I2(3)"


def test_affine_triangle():
    r = classify_system(parse_coxeter_matrix("1 3 3; 3 1 3; 3 3 1"))
    assert r.verdict == "affine" and names(r) == ["~A2"] and r.order is None


def test_hyperbolic_triangle():
    r = classify_system(parse_coxeter_matrix("1 2 3; 2 1 7; 3 7 1"))
    assert r.verdict == "indefinite"


def test_g2_and_dihedral_names():
    assert names(classify_system(parse_coxeter_matrix("1 6; 6 1"))) == ["G2"]
    assert names(classify_system(parse_coxeter_matrix("1 5; 5 1"))) == ["I2(5)"]
    assert names(classify_system(parse_coxeter_matrix("1 0; 0 1"))) == ["~A1"]


def test_mixed_verdict():
    # affine ~A1 next to an indefinite triangle
    m = parse_coxeter_matrix(
        "1 0 2 2 2; 0 1 2 2 2; 2 2 1 2 3; 2 2 2 1 7; 2 2 3 7 1"
    )
    r = classify_system(m)
    assert r.verdict == "mixed"
    assert sorted(lab.kind for lab in r.labels) == ["affine", "indefinite"]


def test_finite_product_order():
    m = parse_coxeter_matrix("1 4 2 2; 4 1 2 2; 2 2 1 3; 2 2 3 1")
    assert finite_group_order(m) == 8 * 6
    assert classify_system(m).to_json()["order"] == "48"


def test_order_errors():
    with pytest.raises(NotFiniteError):
        finite_group_order(parse_coxeter_matrix("1 0; 0 1"))
    assert not is_finite(parse_coxeter_matrix("1 3 3; 3 1 3; 3 3 1"))


@pytest.mark.parametrize(
    "family,l,m",
    [("A", 0, None), ("B", 1, None), ("D", 3, None), ("I2", None, 2)],
)
def test_label_constraints(family, l, m):
    with pytest.raises(ValueError):
        ComponentLabel(family, l, m)


@pytest.mark.parametrize("text,expected", [
    ("1", 2),
    ("1 7; 7 1", 14),
    ("1 3 2; 3 1 3; 2 3 1", 24),
])
def test_small_orders(text, expected):
    assert finite_group_order(parse_coxeter_matrix(text)) == expected


@pytest.mark.parametrize("rank", range(1, 10))
def test_catalog_entries_agree_with_gram(rank):
    for label, d in _finite_catalog(rank):
        assert gram_kind(d.to_matrix()) == "finite", label.name
        assert classify_system(d.to_matrix()).labels[0].name == label.name
    for label, d in _affine_catalog(rank):
        assert gram_kind(d.to_matrix()) == "affine", label.name
        assert classify_system(d.to_matrix()).labels[0] == label


def test_exceptional_orders():
    e6 = _finite_catalog(6)[-1][1].to_matrix()
    assert finite_group_order(e6) == 51840
    d4 = _finite_catalog(4)[2][1].to_matrix()
    assert finite_group_order(d4) == len(enumerate_group(d4)) == 192


entry = st.sampled_from([2, 3, 4, 5, 6, 7, 8, INF])


@st.composite
def matrices(draw, max_rank=5):
    n = draw(st.integers(1, max_rank))
    upper = draw(st.lists(entry, min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    return n, upper


@settings(max_examples=300, deadline=None)
@given(matrices())
def test_verdict_matches_gram_componentwise(data):
    n, upper = data
    m = from_upper(n, upper)
    report = classify_system(m, check=False)
    for label, vs in report.components:
        idx = list(vs)
        B = cosine_form(upper, n)[np.ix_(idx, idx)]
        assert gram_verdict(B) == label.kind
    finite = gram_verdict(cosine_form(upper, n)) == "finite"
    assert (report.verdict == "finite") == finite


@settings(max_examples=60, deadline=None)
@given(matrices(max_rank=4), st.randoms(use_true_random=False))
def test_classification_invariant_under_relabelling(data, rnd):
    n, upper = data
    m = from_upper(n, upper)
    perm = list(range(n))
    rnd.shuffle(perm)
    a, b = classify_system(m), classify_system(permute(m, perm))
    assert a.verdict == b.verdict and a.order == b.order
    assert sorted(l.name for l in a.labels) == sorted(l.name for l in b.labels)


@settings(max_examples=40, deadline=None)
@given(matrices(max_rank=4))
def test_order_matches_enumeration(data):
    n, upper = data
    m = from_upper(n, upper)
    if not is_finite(m):
        return
    order = finite_group_order(m)
    if order <= 2000:
        g = enumerate_group(m)
        assert g.complete and len(g) == order


def test_factorial_formula_a_series():
    for l in range(1, 7):
        assert ComponentLabel("A", l).order() == math.factorial(l + 1)
