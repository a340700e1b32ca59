"""Reflection-class counts and the weight bound for polarized Enriques moduli.

For a polarization h in U + E8(-1) with h^2 = 2d the relevant lattice is
h^perp, an element of the genus of <-2d> + E8(-1).  Its roots give
reflections whose classes modulo 2 h^perp count the non-conjugate even
-4-reflections R; R >= 25 forces negative Kodaira dimension.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import intmat
from .defenum import IndefiniteError, QuadForm, is_isometric, positive_gram, roots
from .discform import (
    F2QuadraticSpace,
    GroupOnDisc,
    discriminant_form,
    f2_isometry,
    _f2_inverse,
    _f2_mul,
)
from .genus import GenusClass, enumerate_genus
from .lattice import (
    Lattice,
    LatticeError,
    direct_sum,
    enriques_embeddings,
    is_primitive,
    make_named,
    orth_complement,
    parse_lattice,
)

# constants of the two reflective forms and the discriminant quadratic space
CANONICAL_WEIGHT = 10     # weight per k of the pluricanonical forms (dim D_N)
MINUS2_WEIGHT = 4         # weight of the -2-reflective form
MINUS4_WEIGHT = 124       # weight of the -4-reflective cusp form
NONISOTROPIC_COUNT = 496  # nonisotropic vectors of (F2^10, q+)


class Verdict(str, enum.Enum):
    NEGATIVE_KODAIRA = "NegativeKodaira"
    INCONCLUSIVE = "Inconclusive"


def reflection_classes(lat: Lattice) -> int:
    """Number of +-root pairs of ``lat`` modulo 2*lat."""
    if not lat.is_negative_definite:
        raise IndefiniteError("expected a negative definite lattice")
    if not lat.is_even:
        raise LatticeError("expected an even lattice")
    r = roots(lat)
    if len(r) == 0:
        return 0
    # u = -u mod 2, so a root pair is determined by its residue mod 2
    return len({tuple(row) for row in (r % 2).tolist()})


def congruence_check(lat: Lattice) -> bool:
    """Root pairs that differ as pairs also differ modulo 2*lat.

    Every nonzero w in 2*lat has |w^2| >= 8, while for distinct pairs
    {+-u} != {+-v} the better of u - v, u + v has 0 < |norm| < 8.  Both
    halves are checked exhaustively.
    """
    r = roots(lat)
    if len(r) == 0:
        return True
    g = -np.array(lat.gram, dtype=np.int64)
    ip = r @ g @ r.T
    # positive form: (u -+ v)^2 = 4 -+ 2(u, v); the minimum is 4 - 2|(u, v)|
    best = 4 - 2 * np.abs(ip)
    off = ~np.eye(len(r), dtype=bool)
    differences_short = bool(np.all((best[off] > 0) & (best[off] < 8)))
    # 2*lat has minimum 4 * min(lat); even and rootful means min(lat) = 2
    vecs, _ = QuadForm(positive_gram(lat)).vectors_up_to(1)
    min_norm = 1 if len(vecs) else 2
    return differences_short and 4 * min_norm >= 8


def bound_max_R(dim: int, weight_low: int, weight_high: int, orbit_count: int) -> int:
    """Largest R compatible with the weight inequality.

    A form of weight (dim - weight_low) k [O:G] vanishing to order
    m = k R [O:G] / orbit_count along a divisor cut out by a form of weight
    weight_high needs (dim - weight_low) >= weight_high * R / orbit_count.
    """
    for x in (dim, weight_low, weight_high, orbit_count):
        if x <= 0:
            raise ValueError("all inputs must be positive")
    if weight_low >= dim:
        raise ValueError("weight_low must be below dim")
    return (dim - weight_low) * orbit_count // weight_high


def default_threshold() -> int:
    return bound_max_R(CANONICAL_WEIGHT, MINUS2_WEIGHT, MINUS4_WEIGHT, NONISOTROPIC_COUNT) + 1


THRESHOLD = default_threshold()
assert THRESHOLD == 25


def kodaira_verdict(R: int, threshold: int | None = None) -> Verdict:
    if R < 0:
        raise ValueError("R must be nonnegative")
    if threshold is None:
        threshold = THRESHOLD
    return Verdict.NEGATIVE_KODAIRA if R >= threshold else Verdict.INCONCLUSIVE


@dataclass
class PolarizationClass:
    d: int
    genus_class: GenusClass
    R: int
    verdict: Verdict
    gamma_image_lower_order: int | None = None

    @property
    def half_count(self):
        return self.genus_class.root_halfcount

    def to_json(self) -> dict:
        out = {
            "gram": self.genus_class.representative.matrix(),
            "half_count": self.half_count,
            "R": self.R,
            "verdict": self.verdict.value,
        }
        if self.gamma_image_lower_order is not None:
            out["gamma_image_lower_order"] = self.gamma_image_lower_order
        return out


@dataclass
class DegreeReport:
    degree: int
    classes: list
    metadata: dict = field(default_factory=dict)

    @property
    def d(self):
        return self.degree // 2

    @property
    def all_negative(self) -> bool:
        return all(c.verdict is Verdict.NEGATIVE_KODAIRA for c in self.classes)

    @property
    def inconclusive_count(self) -> int:
        return sum(c.verdict is Verdict.INCONCLUSIVE for c in self.classes)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "classes": [c.to_json() for c in self.classes],
            "all_negative": self.all_negative,
            "inconclusive_count": self.inconclusive_count,
        }

    def markdown_row(self) -> str:
        items = []
        for c in self.classes:
            s = str(c.half_count)
            items.append(f"**{s}**" if c.verdict is Verdict.INCONCLUSIVE else s)
        return f"{self.d}: [{', '.join(items)}]"


def classify_enumeration(enum_result, with_gamma: bool = False) -> DegreeReport:
    classes = []
    for gc in enum_result.classes:
        R = reflection_classes(gc.representative)
        if R != gc.root_halfcount:
            raise AssertionError("reflection classes differ from root pairs")
        order = gamma_image_lower(gc.representative).order if with_gamma else None
        classes.append(PolarizationClass(enum_result.d, gc, R, kodaira_verdict(R), order))
    meta = {"threshold": THRESHOLD, "primes": list(enum_result.primes_used),
            "closed": enum_result.closed}
    return DegreeReport(2 * enum_result.d, classes, meta)


def classify_degree(two_d: int, enumerate=None, with_gamma: bool = False, **kwargs) -> DegreeReport:
    """Verdicts for every polarization class of degree ``two_d``."""
    if two_d < 2 or two_d % 2:
        raise ValueError("degree must be even and at least 2")
    enumerate = enumerate or enumerate_genus
    return classify_enumeration(enumerate(two_d // 2, **kwargs), with_gamma=with_gamma)


# ---------------------------------------------------------------------------
# polarizations in U + E8(-1)

# Coordinates (e, f, E8 basis) of polarizations in the non-trivial orbits.
# 2e + 2f + r with r in E8(-1): r^2 = -4 gives degree 4, r^2 = -2 degree 6.
SECOND_ORBIT = {
    4: (2, 2, 0, 0, 0, 0, 0, 1, 0, 1),
    6: (2, 2, 0, 0, 0, 0, 0, 0, 0, 1),
}
SECOND_ORBIT_COMPLEMENT = {4: "D9(-1)", 6: "A2(-1)+E7(-1)"}


def polarization_lattice() -> Lattice:
    return direct_sum(make_named("U"), make_named("E8(-1)"), name="U+E8(-1)")


def trivial_polarization(d: int):
    """h = e + d f, whose complement is <-2d> + E8(-1)."""
    return (1, d) + (0,) * 8


def polarization_complement(h) -> Lattice:
    """h^perp inside U + E8(-1) for a primitive h with h^2 > 0."""
    l0 = polarization_lattice()
    h = list(h)
    if l0.norm(h) <= 0:
        raise LatticeError("polarization must have positive norm")
    if not is_primitive(h, l0):
        raise LatticeError("polarization must be primitive")
    return orth_complement(h, l0, name="h-perp")


def second_orbit_witness(degree: int):
    """IsometryWitness from the complement of SECOND_ORBIT[degree] to its named model."""
    comp = polarization_complement(SECOND_ORBIT[degree])
    return is_isometric(comp, parse_lattice(SECOND_ORBIT_COMPLEMENT[degree]))


# ---------------------------------------------------------------------------
# image of the reflections in the finite orthogonal group


def unimodular_extension(lat: Lattice):
    """Unimodular even overlattice W of <2d> + lat for lat in the genus of <-2d>+E8(-1).

    Returns ``(w_gram, basis)``: the Gram matrix of W and the rows (scaled by
    2d, ambient coordinates lat + h) of its basis.  The last ambient
    coordinate is the polarization h with h^2 = 2d.
    """
    form = discriminant_form(lat)
    if not form.is_cyclic or form.order < 1:
        raise LatticeError("discriminant group must be cyclic")
    two_d = form.order
    n = lat.rank
    ambient = [list(row) + [0] for row in lat.gram] + [[0] * n + [two_d]]
    if two_d == 1:
        glue = None
    else:
        target = Fraction(-1, two_d) % 2
        gen = None
        for k in range(1, two_d):
            if form.q((k,)) == target and np.gcd(k, two_d) == 1:
                gen = [Fraction(k) * x for x in form.generators[0]]
                break
        if gen is None:
            raise LatticeError("no glue element: lattice is not in the expected genus")
        glue = [x * two_d for x in gen] + [1]  # (g + h/2d) * 2d
    gens = [[two_d * int(i == j) for j in range(n + 1)] for i in range(n + 1)]
    if glue is not None:
        gens.append([int(x) for x in glue])
    basis = intmat.row_basis(gens)
    g = intmat.congruent(basis, ambient)
    scale = two_d * two_d
    if any(x % scale for row in g for x in row):
        raise AssertionError("overlattice is not integral")
    w = [[x // scale for x in row] for row in g]
    if abs(intmat.det(w)) != 1:
        raise AssertionError("overlattice is not unimodular")
    return w, basis, two_d


def _root_images_mod2(lat: Lattice):
    """Roots of lat as vectors of W/2W, with the quadratic space of W/2W."""
    w, basis, two_d = unimodular_extension(lat)
    n = lat.rank
    binv = intmat.inverse_fraction(basis)
    r = roots(lat)
    images = []
    for row in r.tolist():
        amb = [two_d * x for x in row] + [0]
        c = [sum(amb[i] * binv[i][j] for i in range(n + 1)) for j in range(n + 1)]
        if any(x.denominator != 1 for x in c):
            raise AssertionError("root is not in the overlattice")
        images.append(tuple(int(x) % 2 for x in c))
    k = n + 1
    qd = tuple((w[i][i] // 2) % 2 for i in range(k))
    bm = tuple(tuple(0 if i == j else w[i][j] % 2 for j in range(k)) for i in range(k))
    return F2QuadraticSpace(qd, bm), images


def natural_dm_dn():
    """The isomorphism D_M -> D_N induced by the gluing inside L_K3.

    Returns ``(space_m, space_n, gamma)`` with gamma an F2 matrix mapping
    D_M coordinates to D_N coordinates (row convention).
    """
    emb_m, emb_n, _ = enriques_embeddings()
    k3 = make_named("L_K3")
    m_lat, n_lat = make_named("M"), make_named("N")
    fm, fn = discriminant_form(m_lat), discriminant_form(n_lat)
    gk = k3.matrix()
    # orthogonal projections of the L_K3 basis onto M_Q and N_Q
    pm = _projection_coords(emb_m, gk, m_lat)
    pn = _projection_coords(emb_n, gk, n_lat)
    rows_m = [fm.coords_of(v) for v in pm]
    rows_n = [fn.coords_of(v) for v in pn]
    # gamma solves rows_m * gamma = rows_n over F2
    sel, basis_rows = [], []
    for i, r in enumerate(rows_m):
        cand = basis_rows + [r]
        if _f2_rank(cand) == len(cand):
            basis_rows.append(r)
            sel.append(i)
        if len(sel) == fm.rank:
            break
    a_inv = _f2_inverse([rows_m[i] for i in sel])
    gamma = _f2_mul(a_inv, [rows_n[i] for i in sel])
    for r_m, r_n in zip(rows_m, rows_n):
        if _f2_mul([r_m], gamma)[0] != tuple(r_n):
            raise AssertionError("gluing map is not well defined")
    sm = F2QuadraticSpace.from_form(fm)
    sn = F2QuadraticSpace.from_form(fn)
    return sm, sn, gamma


def _projection_coords(emb, gk, sub: Lattice):
    """Coordinates (in sub's basis) of the projections of the ambient basis."""
    # projection of e_k: solve x * G_sub = (e_k, emb_i)_i
    pair = intmat.matmul(gk, intmat.transpose(emb))  # row k: (e_k, emb_i)
    ginv = intmat.inverse_fraction(sub.gram)
    return [[sum(row[i] * ginv[i][j] for i in range(sub.rank)) for j in range(sub.rank)]
            for row in pair]


def _f2_rank(rows):
    rows = [list(r) for r in rows]
    rank = 0
    ncol = len(rows[0]) if rows else 0
    for c in range(ncol):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] % 2), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c] % 2:
                rows[i] = [(a + b) % 2 for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def gamma_image_lower(lat: Lattice) -> GroupOnDisc:
    """Subgroup of O(D_N) generated by the images of the root reflections of h^perp.

    The roots are placed in W/2W for a unimodular extension W of
    <2d> + h^perp; W/2W is identified with D_M (x -> x/2 after an F2
    isometry to U + E8(-1) mod 2) and carried to D_N by the gluing map.
    The order is a lower bound for the image of O(M, h).
    """
    space_w, images = _root_images_mod2(lat)
    g0 = polarization_lattice().matrix()
    space_l0 = F2QuadraticSpace(tuple((g0[i][i] // 2) % 2 for i in range(10)),
                                tuple(tuple(0 if i == j else g0[i][j] % 2 for j in range(10))
                                      for i in range(10)))
    psi = f2_isometry(space_w, space_l0)
    sm, sn, gamma = natural_dm_dn()
    # L0/2L0 -> D_M: c -> c/2 is the identity on coordinates once D_M is
    # presented on M's own basis; express that in D_M's SNF coordinates.
    m_lat = make_named("M")
    fm = discriminant_form(m_lat)
    to_dm = tuple(fm.coords_of([x / 2 for x in _unit(i, 10)]) for i in range(10))
    total = _f2_mul(_f2_mul(psi, to_dm), gamma)
    vecs = sorted({_f2_mul([v], total)[0] for v in images})
    gens = tuple(sn.transvection(v) for v in vecs)
    return GroupOnDisc(sn, gens, label="reflections of h-perp")


def _unit(i, n):
    return [Fraction(int(i == j)) for j in range(n)]


def find_trivial_aut_class(d_range, enumerate=None, **kwargs):
    """First class (by d, then output order) whose isometry group is {+-1}."""
    enumerate = enumerate or enumerate_genus
    lo, hi = d_range
    for d in range(lo, hi + 1):
        for gc in enumerate(d, **kwargs).classes:
            if gc.aut_order == 2:
                return d, gc
    return None
