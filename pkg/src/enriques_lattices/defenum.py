"""Definite lattices: short vectors, isometry testing, automorphism groups.

Everything is done on the positive definite form; negative definite input
is negated on entry.  Enumeration runs in floating point on an exact LDL
factorisation with a safety margin, and every vector it returns has its
norm recomputed with integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, ceil, sqrt

import numpy as np

from . import intmat
from .lattice import Lattice, LatticeError


class IndefiniteError(LatticeError):
    pass


def positive_gram(lat) -> list:
    """Gram matrix of the positive definite form underlying ``lat``."""
    if isinstance(lat, Lattice):
        n_plus, n_minus = lat.signature
        if n_plus and n_minus:
            raise IndefiniteError("lattice is indefinite")
        return lat.matrix() if n_minus == 0 else [[-x for x in row] for row in lat.gram]
    return [list(row) for row in lat]


def definiteness_sign(lat: Lattice) -> int:
    n_plus, n_minus = lat.signature
    if n_plus and n_minus:
        raise IndefiniteError("lattice is indefinite")
    return 1 if n_minus == 0 else -1


class TooManyVectors(RuntimeError):
    pass


class QuadForm:
    """A positive definite integral Gram matrix prepared for enumeration."""

    def __init__(self, gram):
        self.gram_list = [list(map(int, row)) for row in gram]
        self.n = n = len(gram)
        self.gram = np.array(self.gram_list, dtype=np.int64)
        low, dg = intmat.ldl(self.gram_list)
        if any(x <= 0 for x in dg):
            raise IndefiniteError("form is not positive definite")
        self.q = [float(x) for x in dg]
        # coefficients feeding coordinate k from the coordinates above it
        self.feed = [[(i, float(low[i][k])) for i in range(k + 1, n) if low[i][k] != 0]
                     for k in range(n)]

    def enumerate(self, bound, center=None, half=False, limit=None):
        """All integer x with (x - center)^T G (x - center) <= bound.

        With ``half=True`` (no center) the zero vector is skipped and only
        one of each pair +-x is produced.  Returns an int64 array of rows.
        Raises TooManyVectors once more than ``limit`` rows are found.
        """
        n, q, feed = self.n, self.q, self.feed
        c = [float(v) for v in center] if center is not None else [0.0] * n
        x = [0] * n
        out = []
        slack = 1e-9 * (1.0 + abs(float(bound)))
        top = float(bound) + slack

        def rec(k, rem, allzero):
            t = c[k]
            for i, l in feed[k]:
                t -= l * (x[i] - c[i])
            # x_k - t ranges over the interval allowed by rem
            w = sqrt(max(rem, 0.0) / q[k])
            lo = ceil(t - w - 1e-9)
            hi = floor(t + w + 1e-9)
            if allzero and lo < 0:
                lo = 0
            qk = q[k]
            if k == 0:
                for v in range(lo, hi + 1):
                    if allzero and v == 0:
                        continue
                    if qk * (v - t) ** 2 <= rem + slack:
                        x[0] = v
                        out.append(list(x))
                        if limit is not None and len(out) > limit:
                            raise TooManyVectors(limit)
                x[0] = 0
                return
            for v in range(lo, hi + 1):
                r = rem - qk * (v - t) ** 2
                if r < -slack:
                    continue
                x[k] = v
                rec(k - 1, r, allzero and v == 0)
            x[k] = 0

        rec(n - 1, top, half and center is None)
        if not out:
            return np.zeros((0, n), dtype=np.int64)
        return np.array(out, dtype=np.int64)

    def norms(self, vecs):
        vecs = np.asarray(vecs, dtype=np.int64)
        if len(vecs) == 0:
            return np.zeros(0, dtype=np.int64)
        return np.einsum("ij,jk,ik->i", vecs, self.gram, vecs)

    def vectors_up_to(self, bound, half=True, limit=None):
        """Nonzero vectors of norm <= bound with exact norms, sorted by norm."""
        vecs = self.enumerate(bound, half=half, limit=limit)
        norms = self.norms(vecs)
        keep = (norms <= bound) & (norms > 0)
        vecs, norms = vecs[keep], norms[keep]
        order = np.lexsort(tuple(vecs.T[::-1]) + (norms,))
        return vecs[order], norms[order]

    def count_norms(self, max_norm):
        """Full counts (both signs) of vectors of each norm 1..max_norm."""
        _, norms = self.vectors_up_to(max_norm)
        counts = np.bincount(norms, minlength=max_norm + 1)
        return [2 * int(c) for c in counts[1:max_norm + 1]]


def _form(lat) -> QuadForm:
    return QuadForm(positive_gram(lat))


# ---------------------------------------------------------------------------
# public short-vector API


def short_vectors(lattice: Lattice, target_norm: int, mode: str = "count"):
    """Vectors of norm exactly ``target_norm``.

    ``mode`` is ``"count"`` (full count), ``"half"`` (count of pairs),
    ``"list"`` (all vectors) or ``"half-list"`` (one of each +-pair).
    """
    sign = definiteness_sign(lattice)
    if target_norm == 0:
        raise LatticeError("target norm must be nonzero")
    if target_norm * sign < 0:
        return 0 if mode in ("count", "half") else []
    form = _form(lattice)
    bound = abs(target_norm)
    vecs, norms = form.vectors_up_to(bound)
    sel = vecs[norms == bound]
    if mode == "half":
        return len(sel)
    if mode == "count":
        return 2 * len(sel)
    if mode == "half-list":
        return [tuple(int(a) for a in v) for v in sel]
    if mode == "list":
        return [tuple(int(a) for a in v) for v in sel] + [tuple(-int(a) for a in v) for v in sel]
    raise ValueError(f"unknown mode {mode!r}")


def roots(lattice: Lattice, half: bool = True):
    """Vectors of norm +-2 (matching the sign of the lattice)."""
    vecs, norms = _form(lattice).vectors_up_to(2, half=half)
    return vecs[norms == 2]


def root_halfcount(lattice: Lattice) -> int:
    if not lattice.is_negative_definite:
        raise IndefiniteError("root counting expects a negative definite lattice")
    return len(roots(lattice))


def theta_prefix(lattice: Lattice, depth: int = 8):
    """Full vector counts at norms 2, 4, ..., depth (absolute values)."""
    counts = _form(lattice).count_norms(depth)
    return tuple(counts[k - 1] for k in range(2, depth + 1, 2))


# ---------------------------------------------------------------------------
# isometry search


@dataclass(frozen=True)
class IsometryWitness:
    """``matrix * source.gram * matrix^T == target.gram`` exactly."""

    matrix: tuple
    source: Lattice
    target: Lattice

    def check(self) -> bool:
        m = [list(r) for r in self.matrix]
        return (intmat.congruent(m, self.source.matrix()) == self.target.matrix()
                and abs(intmat.det(m)) == 1)

    def inverse(self) -> "IsometryWitness":
        inv = intmat.unimodular_inverse([list(r) for r in self.matrix])
        return IsometryWitness(tuple(map(tuple, inv)), self.target, self.source)

    def compose(self, other: "IsometryWitness") -> "IsometryWitness":
        """Witness source -> other.target, given self.target == other.source."""
        m = intmat.matmul([list(r) for r in other.matrix], [list(r) for r in self.matrix])
        return IsometryWitness(tuple(map(tuple, m)), self.source, other.target)


# Number of short vectors (one per +-pair) we are willing to store per lattice
# for the candidate lists of the backtracking.
CANDIDATE_LIMIT = 12000


class _Prepared:
    """A positive definite lattice on a reduced basis with search data."""

    def __init__(self, gram, shell_bound=None):
        t, g = intmat.reduce_gram(gram)
        self.t = t
        self.gram_list = g
        self.form = QuadForm(g)
        self.gram = self.form.gram
        self.n = len(g)
        diag = sorted(set(g[i][i] for i in range(self.n)))
        if shell_bound is None:
            shell_bound = diag[0]
            for m in diag[1:]:
                try:
                    self.form.vectors_up_to(m, limit=CANDIDATE_LIMIT)
                except TooManyVectors:
                    break
                shell_bound = m
        self.bound = shell_bound
        half, norms = self.form.vectors_up_to(shell_bound)
        self.vecs = np.concatenate([half, -half]) if len(half) else half
        self.norms = np.concatenate([norms, norms])
        self.vg = self.vecs @ self.gram
        # fingerprint shell: smallest norms until enough vectors are present
        shell_norms = sorted(set(int(x) for x in norms))
        take = []
        for m in shell_norms:
            take.append(m)
            if np.isin(self.norms, take).sum() >= 60:
                break
        self.shell_mask = np.isin(self.norms, take)
        self.shell_norms = tuple(take)
        self._inv_cache = None

    def vector_invariants(self):
        """Per-vector counts of inner products against the fingerprint shell."""
        if self._inv_cache is None:
            ip = self.vg @ self.vecs[self.shell_mask].T
            shell_n = self.norms[self.shell_mask]
            keys = []
            for row_ip, nv in zip(ip, self.norms):
                keys.append((int(nv),) + _hist(row_ip, shell_n))
            self._inv_cache = keys
        return self._inv_cache

    def invariants_of(self, vec):
        """Invariant of an arbitrary lattice vector (same format)."""
        vec = np.asarray(vec, dtype=np.int64)
        ip = self.vecs[self.shell_mask] @ (self.gram @ vec)
        shell_n = self.norms[self.shell_mask]
        return (int(vec @ self.gram @ vec),) + _hist(ip, shell_n)


def _hist(ip, shell_norms):
    pairs = {}
    for a, b in zip(shell_norms.tolist(), ip.tolist()):
        pairs[(a, b)] = pairs.get((a, b), 0) + 1
    return tuple(sorted(pairs.items()))


class _Search:
    """Backtracking for isometries from ``src`` (its basis) into ``dst``.

    The basis vectors of ``src`` with norm within ``dst``'s candidate bound
    are matched against precomputed short vectors; the remaining ones are
    solved for as points of prescribed norm in an affine sublattice.
    """

    def __init__(self, src: _Prepared, dst: _Prepared):
        self.src, self.dst = src, dst
        n = src.n
        g = src.gram_list
        self.n = n
        self.target = g
        small = [i for i in range(n) if g[i][i] <= dst.bound]
        big = [i for i in range(n) if g[i][i] > dst.bound]
        inv_dst = dst.vector_invariants()
        buckets = {}
        for idx, key in enumerate(inv_dst):
            buckets.setdefault(key, []).append(idx)
        self.cands = {}
        for i in small:
            key = src.invariants_of([int(j == i) for j in range(n)])
            # the invariants of src are measured against src's own shells;
            # they match dst's only when both use the same shell norms
            if src.shell_norms != dst.shell_norms:
                key = None
            if key is None:
                idx = np.nonzero(dst.norms == g[i][i])[0]
            else:
                idx = np.array(buckets.get(key, []), dtype=np.int64)
            self.cands[i] = idx
        # most constrained first among small levels, then the solved ones
        small.sort(key=lambda i: (len(self.cands[i]), i))
        order = []
        remaining = list(small)
        if remaining:
            order.append(remaining.pop(0))
        while remaining:
            # prefer levels with a nonzero inner product to what is placed
            def score(i):
                links = sum(1 for j in order if g[i][j] != 0)
                return (-links, len(self.cands[i]), i)
            remaining.sort(key=score)
            order.append(remaining.pop(0))
        self.order = order + big
        self.n_small = len(order)

    def run(self, fixed=(), first_only=True, on_found=None):
        """Search extensions of the partial assignment ``fixed``.

        ``fixed`` lists images (dst vectors) for the first levels of
        ``self.order``.  Returns the first full image matrix (rows indexed
        by src basis position) or None.
        """
        n = self.n
        order = self.order
        dst = self.dst
        g = self.target
        images = [None] * n
        level_sets = {}
        for pos, i in enumerate(order[:self.n_small]):
            level_sets[i] = self.cands[i]
        # apply fixed images
        for pos, vec in enumerate(fixed):
            i = order[pos]
            vec = np.asarray(vec, dtype=np.int64)
            if int(vec @ dst.gram @ vec) != g[i][i]:
                return None
            for q in range(pos):
                j = order[q]
                if int(vec @ dst.gram @ images[j]) != g[i][j]:
                    return None
            images[i] = vec
        # filter candidate sets by the fixed part
        for pos in range(len(fixed), self.n_small):
            i = order[pos]
            idx = level_sets[i]
            for q in range(len(fixed)):
                j = order[q]
                if len(idx) == 0:
                    break
                idx = idx[dst.vg[idx] @ images[j] == g[i][j]]
            level_sets[i] = idx
            if len(idx) == 0:
                return None
        result = self._rec(len(fixed), images, level_sets, on_found)
        return result

    def _rec(self, pos, images, level_sets, on_found):
        n, order, dst, g = self.n, self.order, self.dst, self.target
        if pos == n:
            mat = np.array(images, dtype=np.int64)
            if on_found is not None:
                return on_found(mat)
            return mat
        i = order[pos]
        if pos < self.n_small:
            idx = level_sets[i]
            for c in idx:
                vec = dst.vecs[c]
                images[i] = vec
                new_sets = dict(level_sets)
                ok = True
                for q in range(pos + 1, self.n_small):
                    j = order[q]
                    sub = level_sets[j]
                    sub = sub[dst.vg[sub] @ vec == g[j][i]]
                    if len(sub) == 0:
                        ok = False
                        break
                    new_sets[j] = sub
                if not ok:
                    continue
                res = self._rec(pos + 1, images, new_sets, on_found)
                if res is not None:
                    return res
            images[i] = None
            return None
        for vec in self._solve_level(pos, images):
            images[i] = vec
            res = self._rec(pos + 1, images, level_sets, on_found)
            if res is not None:
                return res
        images[i] = None
        return None

    def _solve_level(self, pos, images):
        """Vectors x of dst with prescribed pairings to the placed images."""
        order, g, dst = self.order, self.target, self.dst
        i = order[pos]
        placed = [order[q] for q in range(pos)]
        rows = [[int(a) for a in (dst.gram @ images[j])] for j in placed]
        rhs = [g[i][j] for j in placed]
        target = g[i][i]
        if rows:
            sol = intmat.solve_affine(rows, rhs)
            if sol is None:
                return []
            x0, kern = sol
        else:
            x0, kern = [0] * self.n, intmat.identity(self.n)
        x0v = np.array(x0, dtype=np.int64)
        if not kern:
            return [x0v] if int(x0v @ dst.gram @ x0v) == target else []
        return _points_of_norm(dst.gram_list, x0, kern, target)


def _points_of_norm(gram, x0, kern, target):
    """All x = x0 + y*kern (y integral) with x^T gram x == target."""
    k = len(kern)
    kg = intmat.matmul(kern, gram)
    h = intmat.matmul(kg, intmat.transpose(kern))
    lin = intmat.matvec(kg, x0)  # K G x0
    # minimiser c of (x0 + yK)^T G (x0 + yK) solves h c = -lin
    hinv = intmat.inverse_fraction(h)
    c = [-sum(hinv[a][b] * lin[b] for b in range(k)) for a in range(k)]
    x0gx0 = sum(a * b for a, b in zip(x0, intmat.matvec(gram, x0)))
    chc = sum(c[a] * h[a][b] * c[b] for a in range(k) for b in range(k))
    slack = Fraction(target) - (x0gx0 - chc)
    if slack < 0:
        return []
    t, hred = intmat.lll_gram(h)
    # y = z t  =>  (y - c) h (y - c) = (z - c') hred (z - c') with c' = c t^-1
    tinv = intmat.inverse_fraction(t)
    cz = [sum(c[a] * tinv[a][b] for a in range(k)) for b in range(k)]
    pts = QuadForm(hred).enumerate(float(slack), center=[float(v) for v in cz])
    out = []
    g_np = np.array(gram, dtype=np.int64)
    t_np = np.array(t, dtype=np.int64)
    k_np = np.array(kern, dtype=np.int64)
    x0v = np.array(x0, dtype=np.int64)
    for z in pts:
        x = x0v + (z @ t_np) @ k_np
        if int(x @ g_np @ x) == target:
            out.append(x)
    return out


def _prepare(lat):
    return _Prepared(positive_gram(lat))


def _compatible(a: _Prepared, b: _Prepared) -> _Prepared:
    """Re-prepare ``b`` with ``a``'s candidate bound when they differ."""
    if a.bound == b.bound:
        return b
    return _Prepared(b.gram_list, shell_bound=max(a.bound, b.bound))


def prepare(gram, shell_bound=None) -> _Prepared:
    """Search data for a positive definite Gram matrix (reusable)."""
    return _Prepared(gram, shell_bound=shell_bound)


def find_isometry_prepared(pa: _Prepared, pb: _Prepared):
    """Like :func:`find_isometry` for already prepared positive forms."""
    if pa.n != pb.n or intmat.det(pa.gram_list) != intmat.det(pb.gram_list):
        return None
    if pa.bound != pb.bound:
        m = max(pa.bound, pb.bound)
        if pa.bound != m:
            pa = _Prepared(pa.gram_list, shell_bound=m)
        if pb.bound != m:
            pb = _Prepared(pb.gram_list, shell_bound=m)
    if sorted(pa.vector_invariants()) != sorted(pb.vector_invariants()):
        return None
    # map b's reduced basis into a
    x = _Search(pb, pa).run()
    if x is None:
        return None
    # rows of x: images of b's reduced basis in a's reduced coordinates
    m = intmat.matmul(intmat.matmul(intmat.unimodular_inverse(pb.t), x.tolist()), pa.t)
    return m


def find_isometry(a, b):
    """Integer matrix m with m * gram(a) * m^T == gram(b), or None.

    Both inputs are definite of the same sign (Lattice or Gram matrix).
    """
    ga, gb = positive_gram(a), positive_gram(b)
    if len(ga) != len(gb) or intmat.det(ga) != intmat.det(gb):
        return None
    return find_isometry_prepared(_Prepared(ga), _Prepared(gb))


def is_isometric(a: Lattice, b: Lattice):
    """IsometryWitness from ``a`` to ``b`` if the lattices are isometric."""
    if a.signature != b.signature or not a.is_definite:
        if not a.is_definite or not b.is_definite:
            raise IndefiniteError("isometry testing needs definite lattices")
        return None
    m = find_isometry(a, b)
    if m is None:
        return None
    w = IsometryWitness(tuple(map(tuple, m)), a, b)
    if not w.check():
        raise AssertionError("isometry search returned an invalid witness")
    return w


# ---------------------------------------------------------------------------
# automorphism groups


@dataclass(frozen=True)
class AutomorphismGroup:
    order: int
    generators: tuple  # integer matrices g with g * gram * g^T == gram
    orbit_lengths: tuple


def _apply(vec, g):
    return tuple(int(a) for a in np.asarray(vec) @ g)


def automorphism_group(lat, prepared: _Prepared | None = None) -> AutomorphismGroup:
    """Full isometry group of a definite lattice via a stabilizer chain.

    The reduced basis b_1..b_n gives a chain of pointwise stabilizers; the
    orbit of b_i under the stabilizer of b_1..b_{i-1} is found by searching
    one extension per candidate image not already reached by known
    generators.  The group order is the product of the orbit lengths.
    """
    p = prepared if prepared is not None else _Prepared(positive_gram(lat))
    s = _Search(p, p)
    n = p.n
    order = s.order
    basis = [np.array([int(j == i) for j in range(n)], dtype=np.int64) for i in range(n)]
    gens = []
    lengths = [0] * n
    for pos in range(n - 1, -1, -1):
        i = order[pos]
        prefix = [basis[order[q]] for q in range(pos)]
        cands = _level_candidates(s, pos, prefix)
        cand_set = {tuple(int(a) for a in c) for c in cands}
        start = tuple(int(a) for a in basis[i])
        orbit = _orbit(start, gens)
        bad = set()
        for c in sorted(cand_set):
            if c in orbit or c in bad:
                continue
            g = s.run(fixed=prefix + [np.array(c, dtype=np.int64)])
            if g is None:
                bad |= _orbit(c, gens)
            else:
                gens.append(g)
                orbit = _orbit(start, gens)
        lengths[pos] = len(orbit)
    total = 1
    for k in lengths:
        total *= k
    # generators are in reduced coordinates; conjugate back
    t = p.t
    tinv = intmat.unimodular_inverse(t)
    out = []
    for g in gens:
        m = intmat.matmul(intmat.matmul(tinv, g.tolist()), t)
        out.append(tuple(map(tuple, m)))
    return AutomorphismGroup(total, tuple(out), tuple(lengths))


def _level_candidates(s: _Search, pos, prefix):
    i = s.order[pos]
    dst = s.dst
    g = s.target
    if pos < s.n_small:
        idx = s.cands[i]
        for q, vec in enumerate(prefix):
            j = s.order[q]
            idx = idx[dst.vg[idx] @ vec == g[i][j]]
        return dst.vecs[idx]
    images = [None] * s.n
    for q, vec in enumerate(prefix):
        images[s.order[q]] = vec
    return s._solve_level(pos, images)


def _orbit(start, gens):
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = _apply(v, g)
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def aut_order(lat) -> int:
    return automorphism_group(lat).order
