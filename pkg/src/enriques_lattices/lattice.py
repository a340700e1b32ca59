"""Integral lattices given by exact Gram matrices, plus named constructors."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import intmat


class LatticeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Lattice:
    """An integral lattice with a symmetric, nondegenerate Gram matrix."""

    gram: tuple
    name: str | None = None

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        n = len(g)
        if n == 0 or any(len(row) != n for row in g):
            raise LatticeError("Gram matrix must be square and nonempty")
        for i in range(n):
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise LatticeError("Gram matrix is not symmetric")
        object.__setattr__(self, "gram", g)
        if self.det == 0:
            raise LatticeError("Gram matrix is degenerate")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def det(self) -> int:
        return intmat.det(self.gram)

    @cached_property
    def signature(self) -> tuple[int, int]:
        return intmat.inertia(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @property
    def is_unimodular(self) -> bool:
        return abs(self.det) == 1

    @property
    def is_definite(self) -> bool:
        return 0 in self.signature

    @property
    def is_negative_definite(self) -> bool:
        return self.signature[0] == 0

    def matrix(self):
        return [list(row) for row in self.gram]

    def pair(self, x, y) -> int:
        return sum(xi * gij * yj for xi, row in zip(x, self.gram) for gij, yj in zip(row, y))

    def norm(self, x) -> int:
        return self.pair(x, x)

    def vector(self, coords) -> "LatticeVector":
        return LatticeVector(self, tuple(int(c) for c in coords))

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def __repr__(self):
        label = self.name or "Lattice"
        return f"<{label}: rank {self.rank}, det {self.det}, sig {self.signature}>"

    def to_json(self) -> dict:
        return {"name": self.name, "rank": self.rank, "gram": self.matrix()}

    @classmethod
    def from_json(cls, obj) -> "Lattice":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if "gram" not in obj:
            raise LatticeError("lattice JSON needs a 'gram' field")
        lat = cls(obj["gram"], obj.get("name"))
        if "rank" in obj and obj["rank"] != lat.rank:
            raise LatticeError("rank field disagrees with Gram matrix")
        return lat


@dataclass(frozen=True)
class LatticeVector:
    lattice: Lattice
    coords: tuple = field()

    @property
    def norm(self) -> int:
        return self.lattice.norm(self.coords)

    @property
    def is_zero(self):
        return not any(self.coords)


@dataclass(frozen=True)
class RationalLattice:
    """Lattice with a Gram matrix of exact rationals (used for duals)."""

    gram: tuple
    name: str | None = None

    @property
    def rank(self):
        return len(self.gram)

    def scaled(self, n) -> "RationalLattice":
        return RationalLattice(tuple(tuple(Fraction(x) * n for x in row) for row in self.gram))

    def to_integral(self, name=None) -> Lattice:
        if any(Fraction(x).denominator != 1 for row in self.gram for x in row):
            raise LatticeError("Gram matrix has non-integral entries")
        return Lattice([[int(x) for x in row] for row in self.gram], name)


# ---------------------------------------------------------------------------
# Root lattices.  Cartan matrices come from the Dynkin diagram edges.

def _cartan(n, edges):
    c = [[0] * n for _ in range(n)]
    for i in range(n):
        c[i][i] = 2
    for i, j in edges:
        c[i][j] = c[j][i] = -1
    return c


def cartan_matrix(kind: str, k: int):
    if kind == "A":
        if k < 1:
            raise LatticeError("A_k needs k >= 1")
        return _cartan(k, [(i, i + 1) for i in range(k - 1)])
    if kind == "D":
        if k < 2:
            raise LatticeError("D_k needs k >= 2")
        if k == 2:
            return _cartan(2, [])
        if k == 3:
            return cartan_matrix("A", 3)
        edges = [(i, i + 1) for i in range(k - 2)] + [(k - 3, k - 1)]
        return _cartan(k, edges)
    if kind == "E":
        if k not in (6, 7, 8):
            raise LatticeError("E_k needs k in {6, 7, 8}")
        # Bourbaki labelling: 1-3-4-5-...-k with 2 attached to 4
        edges = [(0, 2), (1, 3), (2, 3)] + [(i, i + 1) for i in range(3, k - 1)]
        return _cartan(k, edges)
    raise LatticeError(f"unknown root system {kind}")


def _scale(m, n):
    return [[x * n for x in row] for row in m]


HYPERBOLIC = [[0, 1], [1, 0]]

_NAME_RE = re.compile(
    r"^(?:(?P<U>U)(?:\((?P<un>-?\d+)\))?"
    r"|(?P<root>[ADE])(?P<k>\d+)(?:\((?P<rn>-?\d+)\))?"
    r"|<(?P<diag>-?\d+)>"
    r"|(?P<special>M|N|L_K3|LK3))$"
)


def make_named(name: str, *params, even: bool = True) -> Lattice:
    """Build a named lattice.

    Accepted forms: ``U``, ``U(n)``, ``A5``, ``D9(-1)``, ``E8(-2)``, ``<-4>``,
    ``M``, ``N`` and ``L_K3``.  The root-lattice rank and scale may also be
    passed separately, e.g. ``make_named("E", 8, -1)``.
    """
    name = name.replace(" ", "").replace("⟨", "<").replace("⟩", ">").replace("−", "-")
    if name in ("A", "D", "E"):
        if not params:
            raise LatticeError(f"{name} needs a rank")
        k = int(params[0])
        n = int(params[1]) if len(params) > 1 else 1
        name = f"{name}{k}({n})"
    elif name == "U" and params:
        name = f"U({int(params[0])})"
    m = _NAME_RE.match(name)
    if not m:
        raise LatticeError(f"unknown lattice name {name!r}")
    if m.group("U"):
        n = int(m.group("un") or 1)
        if n == 0:
            raise LatticeError("scale must be nonzero")
        return Lattice(_scale(HYPERBOLIC, n), name)
    if m.group("root"):
        kind, k = m.group("root"), int(m.group("k"))
        n = int(m.group("rn") or 1)
        if n == 0:
            raise LatticeError("scale must be nonzero")
        return Lattice(_scale(cartan_matrix(kind, k), n), name)
    if m.group("diag") is not None:
        k = int(m.group("diag"))
        if k == 0:
            raise LatticeError("<0> is degenerate")
        if even and k % 2:
            raise LatticeError(f"<{k}> is odd")
        return Lattice([[k]], name)
    special = m.group("special")
    if special == "M":
        return direct_sum(make_named("U(2)"), make_named("E8(-2)"), name="M")
    if special == "N":
        return direct_sum(make_named("U"), make_named("U(2)"), make_named("E8(-2)"), name="N")
    return direct_sum(make_named("U"), make_named("U"), make_named("U"),
                      make_named("E8(-1)"), make_named("E8(-1)"), name="L_K3")


def parse_lattice(text: str) -> Lattice:
    """Named constructor, ``+``-separated direct sum of names, or JSON."""
    text = text.strip()
    if text.startswith("{") or text.startswith("["):
        obj = json.loads(text)
        if isinstance(obj, list):
            obj = {"gram": obj}
        return Lattice.from_json(obj)
    parts = [p for p in re.split(r"\s*(?:\+|⊕)\s*", text) if p]
    if len(parts) == 1:
        return make_named(parts[0])
    return direct_sum(*(make_named(p) for p in parts), name=text)


def direct_sum(*lattices: Lattice, name=None) -> Lattice:
    if name is None and all(l.name for l in lattices):
        name = "+".join(l.name for l in lattices)
    return Lattice(intmat.block_diag(*(l.matrix() for l in lattices)), name)


def rescale(lat: Lattice, n: int, name=None) -> Lattice:
    if n == 0:
        raise LatticeError("scale must be nonzero")
    if name is None and lat.name:
        name = f"{lat.name}({n})"
    return Lattice(_scale(lat.matrix(), n), name)


def dual(lat: Lattice) -> RationalLattice:
    """Gram matrix of the dual basis: the exact inverse of ``lat.gram``."""
    inv = intmat.inverse_fraction(lat.gram)
    return RationalLattice(tuple(tuple(row) for row in inv),
                           f"{lat.name}^v" if lat.name else None)


def divisor(vec, lat: Lattice | None = None) -> int:
    """Positive generator of the ideal of pairings of ``vec`` with the lattice."""
    lat, coords = _unpack(vec, lat)
    if not any(coords):
        raise LatticeError("divisor of the zero vector is undefined")
    return intmat.vec_gcd(intmat.matvec(lat.gram, coords))


def is_primitive(vec, lat: Lattice | None = None) -> bool:
    _, coords = _unpack(vec, lat, need_lattice=False)
    if not any(coords):
        raise LatticeError("zero vector")
    return intmat.vec_gcd(coords) == 1


def _unpack(vec, lat, need_lattice=True):
    if isinstance(vec, LatticeVector):
        return vec.lattice, list(vec.coords)
    if lat is None and need_lattice:
        raise LatticeError("a lattice is required for a bare coordinate vector")
    return lat, [int(c) for c in vec]


def orth_complement_basis(vec, lat: Lattice | None = None):
    """HNF basis (rows, ambient coordinates) of the orthogonal complement."""
    lat, h = _unpack(vec, lat)
    col = [[x] for x in intmat.matvec(lat.gram, h)]
    return intmat.row_basis(intmat.kernel_basis(col))


def orth_complement(vec, lat: Lattice | None = None, name=None) -> Lattice:
    """The lattice {x : (x, h) = 0} on an HNF-reduced kernel basis."""
    lat, h = _unpack(vec, lat)
    if not any(h):
        raise LatticeError("zero vector")
    if intmat.vec_gcd(h) != 1:
        raise LatticeError("vector is not primitive")
    if lat.norm(h) == 0:
        raise LatticeError("vector is isotropic")
    basis = orth_complement_basis(h, lat)
    return Lattice(intmat.congruent(basis, lat.gram), name)


def sublattice(lat: Lattice, basis, name=None) -> Lattice:
    return Lattice(intmat.congruent([list(b) for b in basis], lat.gram), name)


def enriques_embeddings():
    """Embeddings of M and N into L_K3 and the involution swapping the halves.

    L_K3 coordinates are ordered ``(x, y, z, u, v)`` with ``x, y, z`` in U
    and ``u, v`` in E8(-1).  Returns ``(emb_m, emb_n, rho)`` as integer
    matrices whose rows are the images of basis vectors.  M is presented as
    U(2)+E8(-2) on the basis (x, u); N as U+U(2)+E8(-2) on (y, z, v).
    """
    size = 22
    # offsets of the five summands
    ox, oy, oz, ou, ov = 0, 2, 4, 6, 14

    def row(entries):
        r = [0] * size
        for k, val in entries:
            r[k] += val
        return r

    emb_m = []
    for i in range(2):
        emb_m.append(row([(ox + i, 1), (oz + i, 1)]))
    for i in range(8):
        emb_m.append(row([(ou + i, 1), (ov + i, 1)]))

    emb_n = []
    for i in range(2):
        emb_n.append(row([(oy + i, 1)]))
    for i in range(2):
        emb_n.append(row([(ox + i, 1), (oz + i, -1)]))
    for i in range(8):
        emb_n.append(row([(ou + i, 1), (ov + i, -1)]))

    rho = []
    # rho(x, y, z, u, v) = (z, -y, x, v, u); rows are images of basis vectors
    for i in range(2):
        rho.append(row([(oz + i, 1)]))
    for i in range(2):
        rho.append(row([(oy + i, -1)]))
    for i in range(2):
        rho.append(row([(ox + i, 1)]))
    for i in range(8):
        rho.append(row([(ov + i, 1)]))
    for i in range(8):
        rho.append(row([(ou + i, 1)]))
    return emb_m, emb_n, rho


def l_odd():
    """u1 - 2 v1 in N (coordinates on U+U(2)+E8(-2))."""
    return [1, -2] + [0] * 10


def l_ev():
    """u2 - v2 in N."""
    return [0, 0, 1, -1] + [0] * 8
