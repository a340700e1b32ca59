import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from enriques_lattices.discform import (
    DiscFormError,
    F2QuadraticSpace,
    GroupOnDisc,
    O_PLUS_10_2,
    count_isotropy,
    d_m_space,
    d_n_space,
    discriminant_form,
    f2_isometry,
    group_order,
    induced_on_disc,
    is_identity_on_disc,
    reflection,
    same_disc_form,
    signature_mod8,
    transvection_group,
    FiniteQuadraticForm,
)
from enriques_lattices.lattice import LatticeError, l_ev, make_named, parse_lattice
from tests.oracles import f2_group_order_bruteforce

NAMED = ["U", "U(2)", "<2>", "<-4>", "<6>", "A1", "A2", "A2(-1)", "A3", "A7", "D4", "D5", "D9(-1)",
         "E6", "E7", "E7(-1)", "E8(-1)", "E8(-2)", "M", "N", "L_K3", "<-4>+E8(-1)",
         "A2(-1)+E7(-1)", "U+U(2)+E8(-1)", "U(3)", "A2(2)"]


@pytest.mark.parametrize("name", NAMED)
def test_order_and_milgram(name):
    lat = parse_lattice(name)
    form = discriminant_form(lat)
    assert form.order == abs(lat.det)
    p, m = lat.signature
    assert signature_mod8(form) == (p - m) % 8


@pytest.mark.parametrize("name", ["A3", "D5", "<-4>+E8(-1)", "A2(-1)+E7(-1)", "U(3)"])
def test_quadratic_form_axioms(name):
    form = discriminant_form(parse_lattice(name))
    els = list(form.elements())
    for x in els:
        neg = tuple((-a) % d for a, d in zip(x, form.divisors))
        assert form.q(neg) == form.q(x)
        assert 0 <= form.q(x) < 2
        for y in els:
            s = tuple((a + b) % d for a, b, d in zip(x, y, form.divisors))
            assert (form.q(s) - form.q(x) - form.q(y) - 2 * form.b(x, y)) % 2 == 0
            assert 0 <= form.b(x, y) < 1


def test_examples():
    assert discriminant_form(make_named("U")).order == 1
    dn = discriminant_form(make_named("N"))
    assert dn.divisors == (2,) * 10 and dn.is_two_elementary
    assert count_isotropy(dn) == (527, 496)
    assert sum(count_isotropy(dn)) + 1 == 1024
    assert count_isotropy(discriminant_form(make_named("U"))) == (0, 0)
    for d in (1, 2, 5, 21):
        form = discriminant_form(parse_lattice(f"<{-2 * d}>+E8(-1)"))
        assert form.divisors == ((2 * d,) if d > 0 else ())
        assert form.q((1,)) == Fraction(-1, 2 * d) % 2


def test_same_disc_form_examples():
    dm, dn = discriminant_form(make_named("M")), discriminant_form(make_named("N"))
    assert same_disc_form(dm, dn)
    u2 = discriminant_form(make_named("U(2)"))
    assert same_disc_form(u2, u2)
    assert not same_disc_form(discriminant_form(make_named("<-4>")), discriminant_form(make_named("<-6>")))
    assert not same_disc_form(discriminant_form(make_named("<-4>")), discriminant_form(make_named("<4>")))
    assert not same_disc_form(u2, discriminant_form(parse_lattice("A1+A1")))


def test_json_round_trip():
    form = discriminant_form(parse_lattice("A2(-1)+E7(-1)"))
    back = FiniteQuadraticForm.from_json(form.to_json())
    assert back.divisors == form.divisors and back.qmat == form.qmat


def test_induced_on_disc_examples():
    n = make_named("N")
    form = discriminant_form(n)
    r = [1, -1] + [0] * 10  # e - f in U has norm -2
    assert n.norm(r) == -2
    assert is_identity_on_disc(induced_on_disc(reflection(n, r), n, form))
    assert is_identity_on_disc(induced_on_disc([[int(i == j) for j in range(12)] for i in range(12)], n, form))
    s = induced_on_disc(reflection(n, l_ev()), n, form)
    assert not is_identity_on_disc(s)
    sq = (np.array(s) @ np.array(s)) % 2
    assert np.array_equal(sq, np.eye(10, dtype=int))
    # an involution fixing a hyperplane pointwise: rank of (s - 1) is one
    assert np.linalg.matrix_rank((np.array(s) - np.eye(10, dtype=int)) % 2) == 1
    with pytest.raises(LatticeError):
        reflection(make_named("U"), [1, 2])  # norm 4, pairs to 1 with f


def test_transvections_exhaustive():
    sp = d_n_space()
    pts = sp.points()
    for v in sp.nonisotropic():
        t = np.array(sp.transvection(v))
        assert np.array_equal((t @ t) % 2, np.eye(10, dtype=int))
        img = (pts @ t) % 2
        perp = np.array([sp.b(p, v) == 0 for p in pts.tolist()])
        assert np.array_equal(img[perp], pts[perp])
        assert sp.preserves(t)


def test_space_invariants():
    sp = d_n_space()
    assert len(sp.nonisotropic()) == 496
    assert sp.arf() == 0
    m = f2_isometry(d_m_space(), sp)
    assert m is not None


def test_group_orders():
    sp = d_n_space()
    assert group_order(GroupOnDisc(sp, ())) == 1
    v = sp.nonisotropic()[0]
    assert group_order(transvection_group(sp, [v])) == 2
    assert group_order(transvection_group(sp)) == O_PLUS_10_2 == 2**21 * 3**5 * 5**2 * 7 * 17 * 31


def test_small_group_orders_against_closure():
    form = discriminant_form(parse_lattice("U(2)+D4"))
    sp = F2QuadraticSpace.from_form(form)
    vecs = sp.nonisotropic()
    rng = random.Random(3)
    for k in (1, 2, 3, len(vecs)):
        chosen = rng.sample(vecs, k)
        grp = transvection_group(sp, chosen)
        assert group_order(grp) == f2_group_order_bruteforce(grp.generators, sp.dim)


@given(st.integers(0, 10**6))
def test_order_invariant_under_generator_products(seed):
    rng = random.Random(seed)
    sp = d_n_space()
    vecs = rng.sample(sp.nonisotropic(), 4)
    gens = [np.array(sp.transvection(v)) for v in vecs]
    base = group_order(GroupOnDisc(sp, tuple(map(lambda g: tuple(map(tuple, g.tolist())), gens))))
    # replace the generators by products that generate the same group
    mixed = [gens[0]] + [(gens[i] @ gens[i - 1]) % 2 for i in range(1, len(gens))]
    rng.shuffle(mixed)
    mixed_t = tuple(tuple(map(tuple, g.tolist())) for g in mixed)
    assert group_order(GroupOnDisc(sp, mixed_t)) == base


def test_rejects_non_isometry():
    sp = d_n_space()
    bad = [[int(i == j) for j in range(10)] for i in range(10)]
    bad[0][1] = 1
    with pytest.raises(DiscFormError):
        group_order(GroupOnDisc(sp, (tuple(map(tuple, bad)),)))
