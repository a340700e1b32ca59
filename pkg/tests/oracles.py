"""Slow, independent reference computations used only by the tests."""

import itertools
from fractions import Fraction

import numpy as np


def det_gauss(m):
    """Determinant by fraction Gaussian elimination."""
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    sign = 1
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        out *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return int(sign * out)


def signature_eig(m):
    ev = np.linalg.eigvalsh(np.array(m, dtype=float))
    return int(np.sum(ev > 1e-9)), int(np.sum(ev < -1e-9))


def box_vectors(gram, target):
    """All vectors of norm ``target`` for a positive definite gram, by box scan."""
    g = np.array(gram, dtype=np.int64)
    ginv = np.linalg.inv(g.astype(float))
    box = [int(np.floor(np.sqrt(target * ginv[i, i]) + 1e-9)) for i in range(len(g))]
    out = []
    for x in itertools.product(*[range(-b, b + 1) for b in box]):
        v = np.array(x)
        if v @ g @ v == target:
            out.append(tuple(x))
    return out


def aut_order_bruteforce(gram):
    """|Aut| of a small positive definite lattice spanned by its minimal vectors.

    Every automorphism permutes the minimal vectors; we try all images of
    the basis among vectors of the right norm and keep the isometries.
    """
    g = np.array(gram, dtype=np.int64)
    n = len(g)
    cands = [np.array(box_vectors(gram, int(g[i, i]))) for i in range(n)]
    count = 0
    for imgs in itertools.product(*[range(len(c)) for c in cands]):
        t = np.array([cands[i][k] for i, k in enumerate(imgs)])
        if np.array_equal(t @ g @ t.T, g):
            count += 1
    return count


def f2_group_order_bruteforce(gens, k):
    """Order of a matrix group over F2 by closing the generated set of matrices."""
    ident = tuple(tuple(int(i == j) for j in range(k)) for i in range(k))
    mats = [np.array(g, dtype=np.int64) for g in gens]
    seen = {ident}
    frontier = [np.array(ident)]
    while frontier:
        nxt = []
        for a in frontier:
            for g in mats:
                b = (a @ g) & 1
                key = tuple(map(tuple, b.tolist()))
                if key not in seen:
                    seen.add(key)
                    nxt.append(b)
        frontier = nxt
    return len(seen)
