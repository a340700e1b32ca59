"""Genus enumeration for negative definite even lattices by Kneser neighbours.

The traversal starts from <-2d> + E8(-1), walks p-neighbours for the
requested primes and keeps one representative per isometry class.  Work is
done on the positive definite form -gram throughout; stored
representatives are negative definite.
"""

from __future__ import annotations

import json
import logging
import os
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import intmat
from .defenum import (
    automorphism_group,
    find_isometry_prepared,
    prepare,
    QuadForm,
)
from .discform import discriminant_form, same_disc_form
from .lattice import Lattice, LatticeError, direct_sum, make_named

log = logging.getLogger(__name__)

CACHE_SCHEMA = 1
THETA_DEPTH = 8
CERTIFICATE = "closure-certified, not mass-certified"


class GenusError(RuntimeError):
    pass


class BudgetExceeded(GenusError):
    pass


class InvariantViolation(GenusError):
    pass


def seed_lattice(d: int) -> Lattice:
    if d < 1:
        raise ValueError("d must be positive")
    return direct_sum(make_named(f"<{-2 * d}>"), make_named("E8(-1)"), name=f"<-{2 * d}>+E8(-1)")


# ---------------------------------------------------------------------------
# neighbours


def _inv_mod(a, p):
    return pow(int(a) % p, -1, p)


def kneser_neighbor(lat, p: int, v, check: bool = True) -> Lattice:
    """The p-neighbour L' = L_v + Z v'/p of an even lattice.

    ``lat`` is a Lattice (any sign) or Gram matrix.  ``v`` must pair
    nontrivially with L mod p and satisfy q(v) = v^2/2 = 0 mod p; it is
    adjusted by p*L so that v'^2 is divisible by 2p^2.  The result is on an
    HNF basis of L'.
    """
    gram = lat.matrix() if isinstance(lat, Lattice) else [list(r) for r in lat]
    n = len(gram)
    v = [int(x) for x in v]
    gv = intmat.matvec(gram, v)
    if all(x % p == 0 for x in gv):
        raise LatticeError("neighbour vector pairs trivially with the lattice mod p")
    norm = sum(a * b for a, b in zip(v, gv))
    if norm % 2:
        raise LatticeError("lattice is not even")
    k = next(i for i, x in enumerate(gv) if x % p)
    if p == 2:
        if norm % 4:
            raise LatticeError("neighbour vector is not isotropic mod 2")
        want = (norm // 4) % 2
    else:
        if norm % p:
            raise LatticeError("neighbour vector is not isotropic mod p")
        want = (-(norm // p) * _inv_mod(2, p)) % p
    t = (want * _inv_mod(gv[k], p)) % p
    v2 = list(v)
    v2[k] += p * t
    norm2 = sum(a * b for a, b in zip(v2, intmat.matvec(gram, v2)))
    if norm2 % (2 * p * p):
        raise AssertionError("neighbour lift failed")
    # generators of p * L', in coordinates of L
    inv = _inv_mod(gv[k], p)
    gens = []
    for i in range(n):
        row = [0] * n
        if i == k:
            row[k] = p * p
        else:
            row[i] = p
            row[k] = -p * ((gv[i] * inv) % p)
        gens.append(row)
    gens.append(v2)
    basis = intmat.row_basis(gens)
    if len(basis) != n:
        raise AssertionError("neighbour basis has the wrong rank")
    g2 = intmat.congruent(basis, gram)
    out = []
    for row in g2:
        if any(x % (p * p) for x in row):
            raise AssertionError("neighbour is not integral")
        out.append([x // (p * p) for x in row])
    result = Lattice(out, None)
    if check:
        if result.det != Lattice(gram).det:
            raise InvariantViolation("neighbour changed the determinant")
        if not result.is_even:
            raise InvariantViolation("neighbour is not even")
    return result


def _lines(n, p):
    """Representatives of the lines of F_p^n, first nonzero coordinate 1."""
    out = []
    for lead in range(n):
        tail = n - lead - 1
        rest = np.array(np.meshgrid(*([np.arange(p)] * tail), indexing="ij")).reshape(tail, -1).T \
            if tail else np.zeros((1, 0), dtype=np.int64)
        block = np.zeros((len(rest), n), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1:] = rest
        out.append(block)
    return np.concatenate(out)


def _encode(vecs, p):
    n = vecs.shape[1]
    w = p ** np.arange(n, dtype=np.int64)
    return vecs @ w


def _normalize(vecs, p):
    vecs = vecs % p
    nz = vecs != 0
    lead = np.argmax(nz, axis=1)
    lead_val = vecs[np.arange(len(vecs)), lead]
    inv = np.array([0] + [pow(a, -1, p) for a in range(1, p)], dtype=np.int64)
    return (vecs * inv[lead_val][:, None]) % p


def admissible_lines(gram, p):
    """Lines v mod p giving p-neighbours: (v, L) != 0 mod p and v^2 = 0 mod 2p (mod 4 if p = 2)."""
    lines, ok = _lines_with_mask(gram, p)
    return lines[ok]


def _lines_with_mask(gram, p):
    g = np.array(gram, dtype=np.int64)
    lines = _lines(len(gram), p)
    gv = (lines @ g) % p
    pairs = np.any(gv != 0, axis=1)
    norms = np.einsum("ij,jk,ik->i", lines, g, lines)
    mod = 4 if p == 2 else 2 * p
    iso = norms % mod == 0
    return lines, pairs & iso


def line_orbits(gram, p, generators):
    """Orbit representatives (smallest index) of admissible lines under Aut."""
    lines, ok = _lines_with_mask(gram, p)
    n = len(gram)
    codes = _encode(lines, p)
    lookup = np.full(p ** n, -1, dtype=np.int64)
    lookup[codes] = np.arange(len(lines))
    rows, cols = [], []
    for gen in generators:
        gm = np.array(gen, dtype=np.int64)
        img = _normalize(lines @ gm, p)
        idx = lookup[_encode(img, p)]
        if np.any(idx < 0):
            raise AssertionError("generator does not permute lines")
        rows.append(np.arange(len(lines)))
        cols.append(idx)
    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(len(lines), len(lines)))
        _, labels = connected_components(graph, directed=True, connection="weak")
    else:
        labels = np.arange(len(lines))
    reps = {}
    for i in np.nonzero(ok)[0]:
        lab = labels[i]
        if lab not in reps:
            reps[lab] = i
    sizes = np.bincount(labels)
    return [(int(i), lines[i].tolist(), int(sizes[labels[i]]))
            for i in sorted(reps.values())]


# ---------------------------------------------------------------------------
# class records


@dataclass
class GenusClass:
    representative: Lattice
    aut_order: int
    root_halfcount: int
    fingerprint: tuple  # (|det|, full counts at norms 2, 4, 6, 8)
    discovery: tuple | None = None  # (prime, parent index, line) or None for the seed
    aut_generators: tuple = field(default=(), repr=False)

    @property
    def rank(self):
        return self.representative.rank

    def to_json(self) -> dict:
        return {
            "gram": self.representative.matrix(),
            "aut_order": self.aut_order,
            "root_halfcount": self.root_halfcount,
            "fingerprint": list(self.fingerprint),
        }


@dataclass
class GenusEnumeration:
    d: int
    classes: list
    primes_used: list
    closed: bool
    empirical_mass: Fraction
    certificate: str = CERTIFICATE
    edges_checked: int = 0

    @property
    def half_counts(self):
        return [c.root_halfcount for c in self.classes]

    def row(self) -> str:
        return f"{self.d}: [{', '.join(str(n) for n in self.half_counts)}]"

    def to_json(self) -> dict:
        return {
            "schema": CACHE_SCHEMA,
            "d": self.d,
            "primes": list(self.primes_used),
            "classes": [c.to_json() for c in self.classes],
            "closed": self.closed,
            "mass": [self.empirical_mass.numerator, self.empirical_mass.denominator],
        }


class _Record:
    """Working data for one class during the traversal (positive form)."""

    def __init__(self, gram_pos, discovery):
        t, g = intmat.reduce_gram(gram_pos)
        self.gram = g
        self.discovery = discovery
        self.form = QuadForm(g)
        self.prepared = prepare(g)
        self.roots = None
        self._theta = None
        self.aut = None

    @property
    def root_halfcount(self):
        if self.roots is None:
            vecs, norms = self.form.vectors_up_to(2)
            self.roots = int(np.count_nonzero(norms == 2))
        return self.roots

    @property
    def theta(self):
        if self._theta is None:
            counts = self.form.count_norms(THETA_DEPTH)
            self._theta = tuple(counts[k - 1] for k in range(2, THETA_DEPTH + 1, 2))
        return self._theta

    def automorphisms(self):
        if self.aut is None:
            self.aut = automorphism_group(None, prepared=self.prepared)
        return self.aut


def _theta_quick(rec: _Record, depth):
    counts = rec.form.count_norms(depth)
    return tuple(counts[k - 1] for k in range(2, depth + 1, 2))


class _Store:
    """Class store with fingerprint buckets; the only writer during traversal."""

    def __init__(self, det):
        self.det = det
        self.records = []
        self.by_roots = {}

    def find(self, rec: _Record):
        """Index of a stored class isometric to ``rec``, or None."""
        same = self.by_roots.get(rec.root_halfcount, [])
        if not same:
            return None
        if len(same) > 0:
            th = _theta_quick(rec, 4)
            same = [i for i in same if self.records[i].theta[:2] == th]
        for i in same:
            if find_isometry_prepared(self.records[i].prepared, rec.prepared) is not None:
                return i
        return None

    def add(self, rec: _Record):
        self.records.append(rec)
        self.by_roots.setdefault(rec.root_halfcount, []).append(len(self.records) - 1)
        return len(self.records) - 1


def enumerate_genus(d: int, primes=(2, 3), seed: int | None = None,
                    budget_secs: float | None = None, start: Lattice | None = None,
                    expected_classes: int | None = None) -> GenusEnumeration:
    """All isometry classes in the genus of <-2d> + E8(-1).

    Classes are closed under p-neighbours for every prime in ``primes``.
    ``seed`` shuffles the order in which neighbour lines are processed; it
    does not affect the result.  Output is sorted by descending root
    half-count, then by theta prefix and automorphism order.
    """
    if not primes:
        raise ValueError("need at least one prime")
    t0 = time.monotonic()
    lat0 = start if start is not None else seed_lattice(d)
    if not lat0.is_even or not lat0.is_negative_definite:
        raise GenusError("seed must be even and negative definite")
    ref_form = discriminant_form(lat0)
    det = lat0.det
    rng = random.Random(seed) if seed is not None else None

    def check_budget():
        if budget_secs is not None and time.monotonic() - t0 > budget_secs:
            raise BudgetExceeded(f"d={d}: budget of {budget_secs}s exhausted")

    def in_genus(lat_neg: Lattice) -> bool:
        return same_disc_form(discriminant_form(lat_neg), ref_form)

    store = _Store(det)
    store.add(_Record([[-x for x in row] for row in lat0.gram], None))
    queue = 0
    edges = 0
    while queue < len(store.records):
        rec = store.records[queue]
        aut = rec.automorphisms()
        for p in primes:
            orbits = line_orbits(rec.gram, p, aut.generators)
            order = list(range(len(orbits)))
            if rng is not None:
                rng.shuffle(order)
            pending = []  # (line index, record) of classes new in this batch
            for k in order:
                check_budget()
                idx, line, _ = orbits[k]
                nb_pos = kneser_neighbor(rec.gram, p, line)
                nb_neg = Lattice([[-x for x in row] for row in nb_pos.gram])
                edges += 1
                divides = det % p == 0
                if divides:
                    if not in_genus(nb_neg):
                        continue
                elif not in_genus(nb_neg):
                    raise InvariantViolation(f"{p}-neighbour left the genus")
                cand = _Record(nb_pos.matrix(), (p, queue, tuple(line)))
                if store.find(cand) is not None:
                    continue
                hit = None
                for j, (other_idx, other) in enumerate(pending):
                    if other.root_halfcount == cand.root_halfcount and \
                            find_isometry_prepared(other.prepared, cand.prepared) is not None:
                        hit = j
                        break
                if hit is None:
                    pending.append((idx, cand))
                elif idx < pending[hit][0]:
                    pending[hit] = (idx, cand)
            for _, cand in sorted(pending, key=lambda x: x[0]):
                store.add(cand)
                log.info("d=%d: class %d found (%d root pairs) via p=%d from class %d",
                         d, len(store.records) - 1, cand.root_halfcount, p, queue)
        queue += 1
        if expected_classes is not None and len(store.records) > expected_classes:
            raise GenusError(f"d={d}: more classes than expected")

    classes = []
    mass = Fraction(0)
    for rec in store.records:
        aut = rec.automorphisms()
        rep = Lattice([[-x for x in row] for row in rec.gram], None)
        _check_class(rep, ref_form, det)
        gens = tuple(tuple(tuple(r) for r in g) for g in aut.generators)
        classes.append(GenusClass(rep, aut.order, rec.root_halfcount,
                                  (abs(det),) + rec.theta, rec.discovery, gens))
        mass += Fraction(1, aut.order)
    classes = sort_classes(classes)
    return GenusEnumeration(d, classes, list(primes), True, mass, edges_checked=edges)


def sort_classes(classes):
    return sorted(classes, key=lambda c: (-c.root_halfcount, tuple(-x for x in c.fingerprint[1:]),
                                          -c.aut_order, c.representative.gram))


def _check_class(rep: Lattice, ref_form, det):
    if rep.det != det or not rep.is_even or not rep.is_negative_definite:
        raise InvariantViolation("class representative has wrong rank/det/parity/sign")
    if not same_disc_form(discriminant_form(rep), ref_form):
        raise InvariantViolation("class representative has the wrong discriminant form")


def genus_table(d_min: int, d_max: int, **kwargs):
    rows = []
    for d in range(d_min, d_max + 1):
        rows.append(enumerate_genus(d, **kwargs).row())
    return rows


# ---------------------------------------------------------------------------
# JSON cache


def cache_path(cache_dir, d: int) -> Path:
    return Path(cache_dir) / f"genus_d{d}.json"


def resolve_cache_dir(cache_dir=None):
    """ENRIQUES_CACHE wins over an explicit directory."""
    return os.environ.get("ENRIQUES_CACHE") or cache_dir


def save_enumeration(result: GenusEnumeration, cache_dir) -> Path:
    path = cache_path(cache_dir, result.d)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(result.to_json(), indent=1))
    os.replace(tmp, path)
    return path


def enumeration_from_json(data: dict, replay: bool = True) -> GenusEnumeration:
    """Rebuild an enumeration; with ``replay`` every stored invariant is recomputed.

    Raises InvariantViolation naming the first invariant that fails.
    """
    d = int(data["d"])
    seed = seed_lattice(d)
    ref_form = discriminant_form(seed)
    classes = []
    for k, entry in enumerate(data["classes"]):
        try:
            rep = Lattice(entry["gram"])
        except LatticeError as exc:
            raise InvariantViolation(f"class {k}: Gram matrix invalid ({exc})") from exc
        aut_generators = ()
        fingerprint = tuple(entry.get("fingerprint", ()))
        if replay:
            if rep.rank != seed.rank:
                raise InvariantViolation(f"class {k}: rank differs from the seed")
            if rep.det != seed.det:
                raise InvariantViolation(f"class {k}: determinant differs from the seed")
            if not rep.is_even:
                raise InvariantViolation(f"class {k}: lattice is not even")
            if not rep.is_negative_definite:
                raise InvariantViolation(f"class {k}: lattice is not negative definite")
            if not same_disc_form(discriminant_form(rep), ref_form):
                raise InvariantViolation(f"class {k}: discriminant form differs from the seed")
            rec = _Record([[-x for x in row] for row in rep.gram], None)
            if rec.root_halfcount != entry["root_halfcount"]:
                raise InvariantViolation(f"class {k}: root half-count mismatch")
            aut = rec.automorphisms()
            if aut.order != entry["aut_order"]:
                raise InvariantViolation(f"class {k}: automorphism order mismatch")
            if fingerprint and fingerprint != (abs(seed.det),) + rec.theta:
                raise InvariantViolation(f"class {k}: theta fingerprint mismatch")
            aut_generators = tuple(tuple(tuple(r) for r in g) for g in aut.generators)
        classes.append(GenusClass(rep, int(entry["aut_order"]), int(entry["root_halfcount"]),
                                  fingerprint, None, aut_generators))
    if replay:
        _check_distinct(classes)
    mass = sum((Fraction(1, c.aut_order) for c in classes), Fraction(0))
    if "mass" in data and Fraction(*data["mass"]) != mass:
        raise InvariantViolation("stored mass differs from the class list")
    return GenusEnumeration(d, classes, list(data["primes"]), bool(data["closed"]), mass)


def _check_distinct(classes):
    recs = [prepare([[-x for x in row] for row in c.representative.gram]) for c in classes]
    for i in range(len(classes)):
        for j in range(i):
            a, b = classes[i], classes[j]
            if a.root_halfcount != b.root_halfcount or a.fingerprint != b.fingerprint:
                continue
            if find_isometry_prepared(recs[j], recs[i]) is not None:
                raise InvariantViolation(f"classes {j} and {i} are isometric")


def load_enumeration(d: int, cache_dir, primes=None):
    """Cached enumeration for ``d`` or None if absent or stale."""
    path = cache_path(cache_dir, d)
    if not path.exists():
        return None
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvariantViolation(f"{path}: cache file is not valid JSON") from exc
    if data.get("schema") != CACHE_SCHEMA or data.get("d") != d:
        return None
    if primes is not None and sorted(data.get("primes", [])) != sorted(primes):
        return None
    return enumeration_from_json(data)


def enumerate_genus_cached(d: int, cache_dir=None, **kwargs) -> GenusEnumeration:
    """enumerate_genus backed by the JSON cache (if a directory is configured)."""
    cache_dir = resolve_cache_dir(cache_dir)
    if cache_dir is None:
        return enumerate_genus(d, **kwargs)
    primes = kwargs.get("primes", (2, 3))
    hit = load_enumeration(d, cache_dir, primes)
    if hit is not None:
        return hit
    result = enumerate_genus(d, **kwargs)
    save_enumeration(result, cache_dir)
    return result
