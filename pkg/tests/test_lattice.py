import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from enriques_lattices import intmat
from enriques_lattices.discform import discriminant_form
from enriques_lattices.lattice import (
    Lattice,
    LatticeError,
    direct_sum,
    divisor,
    dual,
    enriques_embeddings,
    is_primitive,
    l_ev,
    l_odd,
    make_named,
    orth_complement,
    parse_lattice,
    rescale,
)
from enriques_lattices.defenum import is_isometric
from tests.oracles import det_gauss, signature_eig

NAMED = ["U", "U(2)", "U(-3)", "A1", "A2", "A5", "D4", "D9(-1)", "E6", "E7", "E8", "E8(-1)",
         "E8(-2)", "<-4>", "<6>", "M", "N", "L_K3"]


@pytest.mark.parametrize("name", NAMED)
def test_named_invariants_against_oracles(name):
    lat = make_named(name)
    assert lat.det == det_gauss(lat.gram)
    assert lat.signature == signature_eig(lat.gram)
    assert lat.is_even
    assert discriminant_form(lat).order == abs(lat.det)


def test_named_examples():
    u = make_named("U")
    assert (u.rank, u.det, u.signature, u.is_even) == (2, -1, (1, 1), True)
    n = make_named("N")
    assert (n.rank, n.signature, n.det) == (12, (2, 10), 1024)
    e = make_named("E8(-1)")
    assert (e.rank, e.det, e.signature) == (8, 1, (0, 8))
    assert make_named("L_K3").rank == 22 and make_named("L_K3").det == -1
    assert make_named("E", 8, -1) == e
    assert make_named("M").det == -1024


def test_direct_sum_examples():
    assert direct_sum(make_named("U"), make_named("U")).det == 1
    s = direct_sum(make_named("<-4>"), make_named("E8(-1)"))
    assert (s.rank, s.det) == (9, -4)
    t = direct_sum(make_named("A2(-1)"), make_named("E7(-1)"))
    assert t.rank == 9 and abs(t.det) == 6 and t.det == -6


def test_rescale_examples():
    assert rescale(make_named("U"), 2).det == -4
    assert rescale(make_named("E8(-1)"), 2).det == 2**8


def test_rescaled_dual_of_n():
    lat = dual(make_named("N")).scaled(2).to_integral()
    ref = parse_lattice("U+U(2)+E8(-1)")
    assert lat.signature == (2, 10) and abs(lat.det) == 4 and lat.is_even
    assert abs(ref.det) == 4 and ref.signature == (2, 10)


def test_dual_examples():
    assert dual(make_named("U")).gram == ((0, 1), (1, 0))
    assert dual(make_named("<-4>")).gram == ((Fraction(-1, 4),),)
    assert dual(make_named("U(2)")).gram == ((0, Fraction(1, 2)), (Fraction(1, 2), 0))


@pytest.mark.parametrize("name", ["U", "A3", "D4(-1)", "N", "<6>"])
def test_dual_of_dual(name):
    lat = make_named(name)
    inv = dual(lat).gram
    assert intmat.inverse_fraction(inv) == [list(r) for r in lat.gram]


@given(st.sampled_from(["U", "A2", "E8(-1)", "<-4>"]), st.integers(-4, 4), st.integers(-4, 4))
def test_rescale_composes(name, m, n):
    if m == 0 or n == 0:
        return
    lat = make_named(name)
    assert rescale(lat, m * n).gram == rescale(rescale(lat, m), n).gram


def test_divisor_and_primitive():
    n = make_named("N")
    assert divisor(l_odd(), n) == 1
    assert divisor(l_ev(), n) == 2
    assert is_primitive(l_odd(), n)
    u = make_named("U")
    assert divisor([1, 0], u) == 1
    assert is_primitive([1, 5], u)
    assert not is_primitive([2, 4], u)


def test_orth_complement_examples():
    l0 = parse_lattice("U+E8(-1)")
    h = [1, 2] + [0] * 8
    comp = orth_complement(h, l0)
    assert is_isometric(comp, parse_lattice("<-4>+E8(-1)")).check()
    assert orth_complement([1, 1], make_named("U")).gram == ((-2,),)
    with pytest.raises(LatticeError):
        orth_complement([1, 0], make_named("U"))
    with pytest.raises(LatticeError):
        orth_complement([2, 2], make_named("U"))


@given(st.integers(1, 12), st.lists(st.integers(-2, 2), min_size=8, max_size=8), st.integers(-3, 3))
def test_complement_determinant_in_unimodular(a, r, b):
    l0 = parse_lattice("U+E8(-1)")
    h = [a, b] + r
    if intmat.vec_gcd(h) != 1 or l0.norm(h) <= 0:
        return
    comp = orth_complement(h, l0)
    assert abs(comp.det) == l0.norm(h)


def test_embeddings():
    emb_m, emb_n, rho = enriques_embeddings()
    k3 = make_named("L_K3").matrix()
    assert intmat.congruent(emb_m, k3) == rescale(parse_lattice("U+E8(-1)"), 2).matrix()
    assert intmat.congruent(emb_n, k3) == make_named("N").matrix()
    assert intmat.matmul(rho, rho) == intmat.identity(22)
    assert intmat.congruent(rho, k3) == k3
    # M is the +1 and N the -1 eigenlattice, mutually orthogonal
    assert intmat.matmul(emb_m, rho) == emb_m
    assert intmat.matmul(emb_n, rho) == [[-x for x in row] for row in emb_n]
    cross = intmat.matmul(intmat.matmul(emb_m, k3), intmat.transpose(emb_n))
    assert not any(any(row) for row in cross)


def test_validation_and_json_round_trip():
    with pytest.raises(LatticeError):
        Lattice([[1, 2], [3, 4]])
    with pytest.raises(LatticeError):
        Lattice([[1, 1], [1, 1]])
    with pytest.raises(LatticeError):
        make_named("<3>")
    with pytest.raises(LatticeError):
        make_named("Q7")
    lat = make_named("D5")
    assert Lattice.from_json(json.loads(json.dumps(lat.to_json()))) == lat
    assert parse_lattice("[[2,-1],[-1,2]]") == make_named("A2")


@given(st.integers(0, 10_000))
def test_signature_of_random_symmetric(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            m[i][j] = m[j][i] = rng.randint(-5, 5)
    if det_gauss(m) == 0:
        return
    assert Lattice(m).signature == signature_eig(m)
