"""Discriminant forms L^v/L of even lattices and groups acting on them."""

from __future__ import annotations

import cmath
import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm, prod

import numpy as np

from . import intmat
from .lattice import Lattice, LatticeError, make_named
from .permgroup import chain_from_generators


class DiscFormError(ValueError):
    pass


# Largest group we are willing to scan element by element.
SCAN_LIMIT = 2 ** 20


@dataclass(frozen=True, eq=False)
class FiniteQuadraticForm:
    """A finite abelian group prod Z/d_i with a Q/2Z-valued quadratic form.

    ``qmat[i][j]`` is the value b(g_i, g_j) for i != j (mod 1) and q(g_i)
    on the diagonal (mod 2), for the SNF generators g_i.
    """

    divisors: tuple
    qmat: tuple

    @property
    def order(self) -> int:
        return prod(self.divisors)

    @property
    def rank(self) -> int:
        return len(self.divisors)

    @property
    def is_two_elementary(self) -> bool:
        return all(d == 2 for d in self.divisors)

    @property
    def is_cyclic(self) -> bool:
        return len(self.divisors) <= 1

    def q(self, x) -> Fraction:
        x = [int(a) % d for a, d in zip(x, self.divisors)]
        val = Fraction(0)
        for i, a in enumerate(x):
            if not a:
                continue
            val += a * a * self.qmat[i][i]
            for j in range(i + 1, len(x)):
                if x[j]:
                    val += 2 * a * x[j] * self.qmat[i][j]
        return val % 2

    def b(self, x, y) -> Fraction:
        val = Fraction(0)
        for i, a in enumerate(x):
            for j, c in enumerate(y):
                if a and c:
                    m = self.qmat[i][j]
                    val += a * c * m
        return val % 1

    def elements(self):
        return itertools.product(*(range(d) for d in self.divisors))

    @cached_property
    def _denominator(self) -> int:
        den = 1
        for row in self.qmat:
            for x in row:
                den = lcm(den, Fraction(x).denominator)
        return den

    def q_table(self):
        """q of every element (in ``elements()`` order) as integers mod 2*den.

        Returns ``(values, den)``; q(x) = values[x] / den mod 2.
        """
        if self.order > SCAN_LIMIT:
            raise DiscFormError(f"group of order {self.order} exceeds the scan budget")
        den = self._denominator
        k = self.rank
        if k == 0:
            return np.zeros(1, dtype=np.int64), den
        coords = np.array(list(self.elements()), dtype=np.int64).reshape(-1, k)
        qm = np.array([[int(Fraction(x) * den) for x in row] for row in self.qmat], dtype=np.int64)
        # off-diagonal terms appear twice in the symmetric sum, as they should
        vals = np.einsum("ij,jk,ik->i", coords, qm, coords)
        return vals % (2 * den), den

    def to_json(self) -> dict:
        vals, den = self.q_table()
        q = []
        for x, v in zip(self.elements(), vals.tolist()):
            f = Fraction(int(v), den)
            q.append([list(x), f.numerator, f.denominator])
        return {"divisors": list(self.divisors), "q": q}

    @classmethod
    def from_json(cls, obj) -> "FiniteQuadraticForm":
        if isinstance(obj, str):
            obj = json.loads(obj)
        divisors = tuple(int(d) for d in obj["divisors"])
        k = len(divisors)
        table = {tuple(x): Fraction(n, d) % 2 for x, n, d in obj["q"]}
        unit = [tuple(int(i == j) for j in range(k)) for i in range(k)]
        qmat = [[Fraction(0)] * k for _ in range(k)]
        for i in range(k):
            qmat[i][i] = table[unit[i]]
            for j in range(i + 1, k):
                s = tuple((a + c) % d for a, c, d in zip(unit[i], unit[j], divisors))
                v = ((table[s] - table[unit[i]] - table[unit[j]]) / 2) % 1
                qmat[i][j] = qmat[j][i] = v
        form = cls(divisors, tuple(map(tuple, qmat)))
        for x, v in table.items():
            if form.q(x) != v:
                raise DiscFormError("q table is not a quadratic form")
        return form


@dataclass(frozen=True, eq=False)
class DiscriminantForm(FiniteQuadraticForm):
    """Discriminant form of a specific lattice, with the coordinate maps."""

    lattice: Lattice = None
    generators: tuple = ()  # rational vectors in lattice coordinates
    to_snf: tuple = ()      # D * V^-1, maps a dual vector to SNF coordinates

    def coords_of(self, dual_vec):
        """SNF coordinates of the class of a dual vector (lattice coordinates)."""
        out = []
        for row, d in zip(self.to_snf, self.divisors):
            val = sum(Fraction(a) * b for a, b in zip(row, dual_vec))
            if val.denominator != 1:
                raise DiscFormError("vector is not in the dual lattice")
            out.append(int(val) % d)
        return tuple(out)


def discriminant_form(lat: Lattice) -> DiscriminantForm:
    """L^v/L with q(x) = (x, x) mod 2, on Smith normal form generators."""
    if not lat.is_even:
        raise DiscFormError("discriminant quadratic form needs an even lattice")
    g = lat.matrix()
    d, u, v = intmat.smith_normal_form(g)
    keep = [i for i, x in enumerate(d) if x != 1]
    # generator i is column i of V divided by d_i
    gens = []
    for i in keep:
        gens.append(tuple(Fraction(v[r][i], d[i]) for r in range(lat.rank)))
    qmat = []
    for a in gens:
        ga = [sum(x * y for x, y in zip(row, a)) for row in g]
        row = []
        for j, b in enumerate(gens):
            val = sum(x * y for x, y in zip(ga, b))
            row.append(val % 2 if b is a else val % 1)
        qmat.append(tuple(row))
    vinv = intmat.unimodular_inverse(v)
    to_snf = tuple(tuple(d[i] * x for x in vinv[i]) for i in keep)
    return DiscriminantForm(tuple(d[i] for i in keep), tuple(qmat), lat, tuple(gens), to_snf)


def count_isotropy(form: FiniteQuadraticForm):
    """(nonzero isotropic elements, nonisotropic elements) by full scan."""
    vals, _ = form.q_table()
    iso = int(np.count_nonzero(vals == 0)) - 1
    return max(iso, 0), int(np.count_nonzero(vals != 0))


def induced_on_disc(g, lat: Lattice, form: DiscriminantForm | None = None):
    """Action of the isometry ``g`` on D_L in SNF coordinates.

    ``g`` has rows equal to the images of the basis vectors.  Row i of the
    result is the image of generator i.
    """
    g = [list(map(int, row)) for row in g]
    if intmat.congruent(g, lat.matrix()) != lat.matrix():
        raise LatticeError("matrix is not an isometry of the lattice")
    if form is None:
        form = discriminant_form(lat)
    out = []
    for gen in form.generators:
        img = [sum(gen[r] * g[r][c] for r in range(lat.rank)) for c in range(lat.rank)]
        out.append(form.coords_of(img))
    return out


def is_identity_on_disc(action) -> bool:
    return all(tuple(row) == tuple(int(i == j) for j in range(len(action)))
               for i, row in enumerate(action))


def reflection(lat: Lattice, r):
    """Matrix of the reflection in r (rows = images of basis vectors).

    Raises if the reflection is not integral.
    """
    r = [int(x) for x in r]
    rr = lat.norm(r)
    gr = intmat.matvec(lat.gram, r)
    rows = []
    for i in range(lat.rank):
        num = 2 * gr[i]
        if num % rr:
            raise LatticeError("reflection is not integral")
        c = num // rr
        rows.append([int(i == j) - c * r[j] for j in range(lat.rank)])
    return rows


def gauss_sum(form: FiniteQuadraticForm) -> complex:
    vals, den = form.q_table()
    return complex(sum(cmath.exp(1j * cmath.pi * v / den) for v in vals.tolist()))


def signature_mod8(form: FiniteQuadraticForm) -> int:
    """Signature mod 8 from the Gauss sum sum exp(pi i q(x)) = sqrt|D| e(sig/8).

    For forms with integer q values the sum is an exact integer count; in
    general the phase is rounded to the nearest eighth root of unity after
    checking the modulus and phase to within 1e-9.
    """
    vals, den = form.q_table()
    if den == 1:
        s = int(np.count_nonzero(vals == 0)) - int(np.count_nonzero(vals == 1))
        if s * s != form.order:
            raise DiscFormError("Gauss sum has the wrong modulus")
        return 0 if s > 0 else 4
    g = gauss_sum(form)
    if abs(abs(g) - form.order ** 0.5) > 1e-9 * form.order:
        raise DiscFormError("Gauss sum has the wrong modulus")
    phase = cmath.phase(g) / (cmath.pi / 4)
    k = round(phase)
    if abs(phase - k) > 1e-9:
        raise DiscFormError("Gauss sum phase is not an eighth root of unity")
    return k % 8


def parity(form: FiniteQuadraticForm) -> int:
    """0 if every q value of a 2-elementary form is integral, else 1."""
    vals, den = form.q_table()
    return 0 if all((v * 1) % den == 0 for v in vals.tolist()) else 1


def same_disc_form(a: FiniteQuadraticForm, b: FiniteQuadraticForm) -> bool:
    """Isomorphism test for the 2-elementary and cyclic shapes."""
    if sorted(a.divisors) != sorted(b.divisors):
        return False
    if a.order == 1:
        return True
    if a.is_two_elementary:
        return parity(a) == parity(b) and signature_mod8(a) == signature_mod8(b)
    if a.is_cyclic:
        n = a.divisors[0]
        target = a.q((1,))
        return any(b.q((k,)) == target for k in range(1, n) if gcd(k, n) == 1)
    raise DiscFormError("only 2-elementary or cyclic discriminant forms are supported")


# ---------------------------------------------------------------------------
# 2-elementary forms as quadratic spaces over F2


@dataclass(frozen=True)
class F2QuadraticSpace:
    """(F_2^k, Q) with Q(x + y) = Q(x) + Q(y) + B(x, y)."""

    qdiag: tuple  # Q(e_i) in {0, 1}
    bmat: tuple   # B(e_i, e_j) in {0, 1}, zero diagonal

    @property
    def dim(self):
        return len(self.qdiag)

    @classmethod
    def from_form(cls, form: FiniteQuadraticForm) -> "F2QuadraticSpace":
        if not form.is_two_elementary:
            raise DiscFormError("form is not 2-elementary")
        k = form.rank
        qd = []
        for i in range(k):
            v = form.qmat[i][i]
            if Fraction(v).denominator != 1:
                raise DiscFormError("q must be integral to give an F2 quadratic space")
            qd.append(int(v) % 2)
        bm = [[0 if i == j else int(2 * form.qmat[i][j]) % 2 for j in range(k)] for i in range(k)]
        return cls(tuple(qd), tuple(map(tuple, bm)))

    def q(self, x) -> int:
        x = [int(a) & 1 for a in x]
        val = sum(a * c for a, c in zip(x, self.qdiag))
        for i in range(self.dim):
            if x[i]:
                for j in range(i + 1, self.dim):
                    if x[j] and self.bmat[i][j]:
                        val += 1
        return val & 1

    def b(self, x, y) -> int:
        return sum(x[i] & y[j] & self.bmat[i][j] for i in range(self.dim) for j in range(self.dim)) & 1

    def points(self):
        k = self.dim
        return np.array([[(n >> i) & 1 for i in range(k)] for n in range(2 ** k)], dtype=np.int64)

    def q_values(self):
        pts = self.points()
        bm = np.triu(np.array(self.bmat, dtype=np.int64), 1)
        vals = pts @ np.array(self.qdiag, dtype=np.int64) + np.einsum("ij,jk,ik->i", pts, bm, pts)
        return vals & 1

    def nonisotropic(self):
        pts = self.points()
        return [tuple(int(a) for a in p) for p, v in zip(pts, self.q_values()) if v]

    def transvection(self, v):
        """Matrix (row convention, x -> x @ T) of x -> x + B(x, v) v."""
        if self.q(v) != 1:
            raise DiscFormError("transvection needs a nonisotropic vector")
        k = self.dim
        bv = [self.b([int(i == j) for j in range(k)], v) for i in range(k)]
        return tuple(tuple((int(i == j) + bv[i] * v[j]) & 1 for j in range(k)) for i in range(k))

    def preserves(self, mat) -> bool:
        pts = self.points()
        img = (pts @ np.array(mat, dtype=np.int64)) & 1
        vals = self.q_values()
        return bool(np.array_equal(vals[_encode(img)], vals))

    def hyperbolic_basis(self):
        """Symplectic basis e_1, f_1, e_2, f_2, ... with B(e_i, f_i) = 1.

        Every pair is hyperbolic (Q(e_i) = Q(f_i) = 0) except possibly the
        last, which is anisotropic (Q = 1 on all three nonzero vectors)
        exactly when the Arf invariant is 1.  Requires B nondegenerate.
        """
        k = self.dim
        bcols = [sum(self.bmat[i][j] << i for i in range(k)) for j in range(k)]

        def bvec(y):
            # bit i of the result is B(e_i, y)
            out = 0
            for j in range(k):
                if (y >> j) & 1:
                    out ^= bcols[j]
            return out

        def b(x, y):
            return bin(x & bvec(y)).count("1") & 1

        def q(x):
            return self.q([(x >> i) & 1 for i in range(k)])

        avail = list(range(1, 2 ** k))
        pairs = []
        while avail:
            e = next((v for v in avail if q(v) == 0), None)
            if e is None:
                e = avail[0]
            w = next((v for v in avail if b(e, v)), None)
            if w is None:
                raise DiscFormError("bilinear form is degenerate")
            f = w ^ e if (q(e) == 0 and q(w) == 1) else w
            pairs.append((e, f))
            avail = [v for v in avail if not b(v, e) and not b(v, f)]
        out = []
        for e, f in pairs:
            out.append(tuple((e >> i) & 1 for i in range(k)))
            out.append(tuple((f >> i) & 1 for i in range(k)))
        return out

    def arf(self) -> int:
        basis = self.hyperbolic_basis()
        return sum(self.q(basis[2 * i]) * self.q(basis[2 * i + 1])
                   for i in range(len(basis) // 2)) & 1


def _encode(points):
    k = points.shape[1]
    weights = 1 << np.arange(k, dtype=np.int64)
    return points @ weights


def f2_isometry(src: F2QuadraticSpace, dst: F2QuadraticSpace):
    """Matrix M (rows = images of src basis in dst) with Q_dst(xM) = Q_src(x)."""
    if src.dim != dst.dim or src.arf() != dst.arf():
        return None
    a = src.hyperbolic_basis()
    b = dst.hyperbolic_basis()
    # M maps a_i -> b_i; a has rows in src coords: A M = B  =>  M = A^-1 B
    ainv = _f2_inverse(a)
    m = _f2_mul(ainv, b)
    if not _f2_check(src, dst, m):
        raise AssertionError("F2 isometry construction failed")
    return m


def _f2_mul(a, b):
    return tuple(tuple(sum(x & y for x, y in zip(row, col)) & 1 for col in zip(*b)) for row in a)


def _f2_inverse(m):
    k = len(m)
    a = [list(row) + [int(i == j) for j in range(k)] for i, row in enumerate(m)]
    for c in range(k):
        piv = next(r for r in range(c, k) if a[r][c])
        a[c], a[piv] = a[piv], a[c]
        for r in range(k):
            if r != c and a[r][c]:
                a[r] = [(x + y) & 1 for x, y in zip(a[r], a[c])]
    return tuple(tuple(row[k:]) for row in a)


def _f2_check(src, dst, m):
    pts = src.points()
    img = (pts @ np.array(m, dtype=np.int64)) & 1
    return bool(np.array_equal(dst.q_values()[_encode(img)], src.q_values()))


# ---------------------------------------------------------------------------
# groups acting on F2^k


@dataclass(frozen=True)
class GroupOnDisc:
    """Subgroup of O(F2^k, Q) given by generator matrices (x -> x @ g)."""

    space: F2QuadraticSpace
    generators: tuple
    label: str = ""

    def point_permutations(self):
        pts = self.space.points()
        perms = []
        for g in self.generators:
            img = (pts @ np.array(g, dtype=np.int64)) & 1
            perms.append(_encode(img).astype(np.int32))
        return perms

    @cached_property
    def chain(self):
        for g in self.generators:
            if not self.space.preserves(g):
                raise DiscFormError("generator does not preserve the quadratic form")
        k = self.space.dim
        base = [1 << i for i in range(k)]
        return chain_from_generators(2 ** k, self.point_permutations(), base=base)

    @property
    def order(self) -> int:
        return self.chain.order()


def group_order(group: GroupOnDisc) -> int:
    """Order certified by a stabilizer chain on the points of F2^k."""
    return group.order


def transvection_group(space: F2QuadraticSpace, vectors=None, label="") -> GroupOnDisc:
    if vectors is None:
        vectors = space.nonisotropic()
    gens = tuple(space.transvection(v) for v in vectors)
    return GroupOnDisc(space, gens, label)


# |O^+(10, 2)| as printed in the literature
O_PLUS_10_2 = 2 ** 21 * 3 ** 5 * 5 ** 2 * 7 * 17 * 31


def d_n_space() -> F2QuadraticSpace:
    """(F2^10, q) realised as the discriminant form of N."""
    return F2QuadraticSpace.from_form(discriminant_form(make_named("N")))


def d_m_space() -> F2QuadraticSpace:
    return F2QuadraticSpace.from_form(discriminant_form(make_named("M")))
