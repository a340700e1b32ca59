import json
from fractions import Fraction

import pytest

from enriques_lattices.acceptance import REFERENCE_TABLE
from enriques_lattices.defenum import is_isometric
from enriques_lattices.discform import discriminant_form, same_disc_form
from enriques_lattices.genus import (
    CACHE_SCHEMA,
    InvariantViolation,
    admissible_lines,
    cache_path,
    enumerate_genus,
    enumerate_genus_cached,
    genus_table,
    kneser_neighbor,
    line_orbits,
    load_enumeration,
    save_enumeration,
    seed_lattice,
)
from enriques_lattices.lattice import Lattice, make_named, parse_lattice


def test_seed_lattice():
    lat = seed_lattice(3)
    assert (lat.rank, lat.det, lat.is_even, lat.is_negative_definite) == (9, -6, True, True)
    with pytest.raises(ValueError):
        seed_lattice(0)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_e8_neighbours_are_e8(p):
    e8 = make_named("E8")
    lines = admissible_lines(e8.matrix(), p)
    assert len(lines)
    for line in lines[:: max(1, len(lines) // 5)]:
        nb = kneser_neighbor(e8.matrix(), p, line)
        assert nb.det == 1 and nb.is_even
        assert is_isometric(nb, e8) is not None


@pytest.mark.parametrize("d,p", [(2, 3), (3, 5), (5, 3), (6, 5)])
def test_neighbour_step_invariants(d, p):
    seed = seed_lattice(d)
    pos = [[-x for x in row] for row in seed.gram]
    ref = discriminant_form(seed)
    for line in admissible_lines(pos, p)[:40]:
        nb = kneser_neighbor(pos, p, line)
        neg = Lattice([[-x for x in row] for row in nb.gram])
        assert neg.det == seed.det and neg.is_even
        assert same_disc_form(discriminant_form(neg), ref)


def test_line_orbits_partition_lines():
    pos = [[-x for x in row] for row in seed_lattice(2).gram]
    from enriques_lattices.defenum import automorphism_group
    gens = automorphism_group(Lattice(pos)).generators
    orbits = line_orbits(pos, 3, gens)
    assert sum(size for _, _, size in orbits) == len(admissible_lines(pos, 3))


def test_d4_reaches_d9(genus):
    classes = genus(2).classes
    assert [c.root_halfcount for c in classes] == [120, 72]
    assert is_isometric(classes[1].representative, parse_lattice("D9(-1)")) is not None


@pytest.mark.parametrize("d", range(1, 22))
def test_table_rows(genus, d):
    e = genus(d)
    expected = REFERENCE_TABLE.get(d, [121])
    assert e.half_counts == expected
    assert e.closed
    ref = discriminant_form(seed_lattice(d))
    for c in e.classes:
        rep = c.representative
        assert rep.rank == 9 and rep.det == -2 * d and rep.is_even and rep.is_negative_definite
        assert same_disc_form(discriminant_form(rep), ref)
    assert e.classes[0].root_halfcount == (121 if d == 1 else 120)
    assert e.edges_checked > 0


def test_row_format(genus):
    assert genus(3).row() == "3: [120, 66]"
    assert genus(12).row() == "12: [120, 56, 39, 29]"
    assert genus(20).row() == "20: [120, 63, 56, 36, 31, 28, 20]"


def test_genus_table_function():
    assert genus_table(1, 2) == ["1: [121]", "2: [120, 72]"]


@pytest.mark.parametrize("d", range(1, 9))
def test_mass_independent_of_primes(genus, d):
    masses = {P: enumerate_genus(d, primes=P).empirical_mass for P in [(2,), (3,)]}
    masses[(2, 3)] = genus(d).empirical_mass
    assert len(set(masses.values())) == 1
    assert genus(d).empirical_mass == sum(Fraction(1, c.aut_order) for c in genus(d).classes)


@pytest.mark.parametrize("d", [5, 8, 11])
def test_shuffled_traversal_gives_same_result(genus, d):
    a = enumerate_genus(d, seed=11)
    assert json.dumps(a.to_json()) == json.dumps(genus(d).to_json())


def test_budget():
    from enriques_lattices.genus import BudgetExceeded
    with pytest.raises(BudgetExceeded):
        enumerate_genus(17, budget_secs=0.01)


def test_cache_round_trip(tmp_path, genus):
    e = genus(7)
    path = save_enumeration(e, tmp_path)
    assert path == cache_path(tmp_path, 7)
    data = json.loads(path.read_text())
    assert data["schema"] == CACHE_SCHEMA and data["d"] == 7
    assert set(data["classes"][0]) >= {"gram", "aut_order", "root_halfcount"}
    back = load_enumeration(7, tmp_path, primes=(2, 3))
    assert back.to_json() == e.to_json()
    assert enumerate_genus_cached(7, tmp_path).to_json() == e.to_json()


def _tamper(tmp_path, genus, mutate):
    save_enumeration(genus(6), tmp_path)
    path = cache_path(tmp_path, 6)
    data = json.loads(path.read_text())
    mutate(data)
    path.write_text(json.dumps(data))
    with pytest.raises(InvariantViolation) as info:
        load_enumeration(6, tmp_path)
    return str(info.value)


def test_tampered_cache_is_rejected(tmp_path, genus):
    def flip(data):
        data["classes"][1]["gram"][3][3] ^= 2

    def asym(data):
        data["classes"][1]["gram"][0][1] += 1

    def roots(data):
        data["classes"][2]["root_halfcount"] += 1

    def aut(data):
        data["classes"][0]["aut_order"] //= 2

    def dup(data):
        data["classes"][2] = dict(data["classes"][1])

    msg = _tamper(tmp_path, genus, flip)
    assert any(word in msg for word in ("determinant", "even", "negative definite"))
    assert "Gram" in _tamper(tmp_path, genus, asym)
    assert "root half-count" in _tamper(tmp_path, genus, roots)
    assert "automorphism order" in _tamper(tmp_path, genus, aut)
    assert "isometric" in _tamper(tmp_path, genus, dup)


def test_stale_cache_is_ignored(tmp_path, genus):
    save_enumeration(genus(4), tmp_path)
    path = cache_path(tmp_path, 4)
    data = json.loads(path.read_text())
    data["schema"] = CACHE_SCHEMA + 1
    path.write_text(json.dumps(data))
    assert load_enumeration(4, tmp_path) is None
    assert load_enumeration(4, tmp_path / "missing") is None


def test_env_overrides_cache_dir(tmp_path, monkeypatch, genus):
    env_dir = tmp_path / "env"
    monkeypatch.setenv("ENRIQUES_CACHE", str(env_dir))
    enumerate_genus_cached(2, tmp_path / "flag")
    assert cache_path(env_dir, 2).exists()
    assert not cache_path(tmp_path / "flag", 2).exists()
