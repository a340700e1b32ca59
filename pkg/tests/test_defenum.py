import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from enriques_lattices import intmat
from enriques_lattices.defenum import (
    IndefiniteError,
    QuadForm,
    TooManyVectors,
    aut_order,
    automorphism_group,
    is_isometric,
    root_halfcount,
    roots,
    short_vectors,
    theta_prefix,
)
from enriques_lattices.lattice import Lattice, make_named, parse_lattice
from tests.oracles import aut_order_bruteforce, box_vectors


def random_unimodular(n, rng, steps=12):
    t = intmat.identity(n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-1, 1])
        t[i] = [a + c * b for a, b in zip(t[i], t[j])]
    return t


def transformed(lat, rng):
    t = random_unimodular(lat.rank, rng)
    return Lattice(intmat.congruent(t, lat.matrix()))


def test_short_vector_examples():
    assert short_vectors(make_named("E8(-1)"), -2, "half") == 120
    assert short_vectors(make_named("<-2>"), -2, "half") == 1
    assert short_vectors(make_named("D8(-1)"), -2, "count") == 112
    assert short_vectors(make_named("E8"), 2, "count") == 240
    assert short_vectors(make_named("E8"), -2, "count") == 0
    assert theta_prefix(make_named("E8")) == (240, 2160, 6720, 17520)


def test_short_vectors_rejects_indefinite():
    with pytest.raises(IndefiniteError):
        short_vectors(make_named("U"), 2)


def test_limit_raises():
    with pytest.raises(TooManyVectors):
        QuadForm(make_named("E8").matrix()).vectors_up_to(4, limit=100)


def box_volume(g, top=8):
    ginv = np.linalg.inv(np.array(g, dtype=float))
    return np.prod([2 * np.floor(np.sqrt(top * ginv[i, i]) + 1e-9) + 1 for i in range(len(g))])


def random_even_form(rng, n):
    """Random even positive definite form whose norm-8 scan box is small."""
    while True:
        b = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        g = (2 * np.array(b) @ np.array(b).T).tolist()
        if intmat.det(g) != 0 and box_volume(g) <= 20000:
            return g


@given(st.integers(0, 10**6), st.integers(1, 5))
def test_short_vectors_match_box_scan(seed, n):
    rng = random.Random(seed)
    g = random_even_form(rng, n) if n > 1 or rng.random() < 0.5 else [[2 * rng.randint(1, 4)]]
    lat = Lattice(g)
    listed = set(short_vectors(lat, 2, "list"))
    for k in range(1, 9):
        ref = box_vectors(g, k)
        assert short_vectors(lat, k, "count") == len(ref)
        assert set(short_vectors(lat, k, "list")) == set(ref)
    assert all(tuple(-a for a in v) in listed for v in listed)


@pytest.mark.parametrize("name,half", [("<-4>+E8(-1)", 120), ("<-2>+E8(-1)", 121), ("D9(-1)", 72)])
def test_root_halfcount_examples(name, half):
    lat = parse_lattice(name)
    assert root_halfcount(lat) == half
    assert 2 * half == short_vectors(lat, -2, "count")


def test_root_halfcount_needs_negative_definite():
    with pytest.raises(IndefiniteError):
        root_halfcount(make_named("E8"))


# |Aut| values frozen from the backtracking engine; small ones are also
# recomputed by brute force below.
AUT_ORDERS = {
    "<-2>": 2,
    "A2(-1)": 12,
    "A3": 48,
    "D4": 1152,
    "E6": 103680,
    "E7": 2903040,
    "E8(-1)": 696729600,
    "D9(-1)": 185794560,
    "<-4>+E8(-1)": 1393459200,
}


@pytest.mark.parametrize("name,order", sorted(AUT_ORDERS.items()))
def test_aut_orders(name, order):
    lat = parse_lattice(name)
    grp = automorphism_group(lat)
    assert grp.order == order
    for g in grp.generators:
        assert intmat.congruent([list(r) for r in g], lat.matrix()) == lat.matrix()


@pytest.mark.parametrize("name", ["A2", "A3", "A1+A1", "A1+A2", "<4>+A1"])
def test_aut_order_bruteforce(name):
    lat = parse_lattice(name)
    assert aut_order(lat) == aut_order_bruteforce(lat.matrix())


@pytest.mark.parametrize("name", ["A2(-1)+E7(-1)", "D9(-1)", "<-6>+E8(-1)", "D4+A3"])
def test_isometry_under_basis_change(name):
    rng = random.Random(name)
    lat = parse_lattice(name)
    b = transformed(lat, rng)
    c = transformed(lat, rng)
    w_ab = is_isometric(lat, b)
    w_bc = is_isometric(b, c)
    assert w_ab.check() and w_bc.check()
    assert w_ab.inverse().check()
    assert w_ab.compose(w_bc).check()
    assert is_isometric(lat, lat).check()
    assert theta_prefix(b) == theta_prefix(lat)
    assert aut_order(b) == aut_order(lat)


def test_non_isometric():
    assert is_isometric(parse_lattice("<-4>+E8(-1)"), parse_lattice("D9(-1)")) is None
    assert is_isometric(parse_lattice("A2+E7"), parse_lattice("A1+E8")) is None


def test_roots_closed_under_negation():
    r = roots(make_named("D5"), half=False)
    s = {tuple(v) for v in r.tolist()}
    assert all(tuple(-a for a in v) in s for v in s)
    assert len(s) == 2 * len(roots(make_named("D5")))


def test_genus_class_generators_preserve_gram(genus):
    for d in (2, 5):
        for c in genus(d).classes:
            for g in c.aut_generators:
                assert intmat.congruent([list(r) for r in g], c.representative.matrix()) == \
                    c.representative.matrix()
            assert c.aut_order % 2 == 0


def test_isometry_is_equivalence_on_genus_classes(genus):
    rng = random.Random(5)
    for d in range(2, 11):
        classes = [c.representative for c in genus(d).classes]
        for lat in classes:
            other = transformed(lat, rng)
            w = is_isometric(lat, other)
            assert w is not None and w.check() and w.inverse().check()
        for i, a in enumerate(classes):
            for b in classes[:i]:
                assert is_isometric(a, b) is None
