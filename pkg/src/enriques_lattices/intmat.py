"""Exact integer and rational matrix routines.

Matrices are plain lists of lists of Python ints (or Fractions), so every
operation here is exact regardless of entry size.
"""

from fractions import Fraction
from math import gcd


def as_int_matrix(m):
    return [[int(x) for x in row] for row in m]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(m):
    return [list(col) for col in zip(*m)]


def matmul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def congruent(t, g):
    """Return t * g * t^T."""
    return matmul(matmul(t, g), transpose(t))


def block_diag(*blocks):
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    k = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[k + i][k + j] = x
        k += len(b)
    return out


def det(m):
    """Determinant by fraction-free Bareiss elimination."""
    a = [list(row) for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def inverse_fraction(m):
    """Exact inverse over Q by Gauss-Jordan elimination."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def unimodular_inverse(m):
    inv = inverse_fraction(m)
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return out


def hnf_with_transform(m):
    """Row Hermite normal form.

    Returns ``(h, u)`` with ``u`` unimodular and ``u * m == h``; the nonzero
    rows of ``h`` come first, are in echelon form with positive pivots, and
    entries above each pivot are reduced into ``[0, pivot)``.
    """
    a = [list(row) for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = identity(rows)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        # Euclid down the column until a single nonzero entry remains at row r.
        while True:
            nz = [i for i in range(r, rows) if a[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][c]))
            if piv != r:
                a[r], a[piv] = a[piv], a[r]
                u[r], u[piv] = u[piv], u[r]
            done = True
            for i in range(r + 1, rows):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    if q:
                        a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                        u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if r < rows and a[r][c] != 0:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
                u[r] = [-x for x in u[r]]
            p = a[r][c]
            for i in range(r):
                q = a[i][c] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
            r += 1
    return a, u


def row_basis(m):
    """A basis (HNF rows) of the Z-module spanned by the rows of ``m``."""
    h, _ = hnf_with_transform(m)
    return [row for row in h if any(row)]


def kernel_basis(m):
    """Basis of the integer left kernel {x : x * m = 0}, as rows."""
    h, u = hnf_with_transform(m)
    return [u[i] for i, row in enumerate(h) if not any(row)]


def right_kernel_basis(m):
    """Basis of {x in Z^n : m * x = 0}, as rows."""
    return kernel_basis(transpose(m))


def solve_affine(c, g):
    """Integer solutions of ``c * x = g``.

    Returns ``(x0, kernel)`` where every solution is ``x0`` plus an integer
    combination of the ``kernel`` rows, or ``None`` when there is none.
    """
    n = len(c[0])
    ct = transpose(c)
    # Rows of [c^T] with an extra identity block record the column operations.
    h, u = hnf_with_transform(ct)
    # u * c^T = h, so c * u^T = h^T; solve h^T * y = g then x = u^T * y.
    rank = sum(1 for row in h if any(row))
    y = [0] * n
    pivots = []
    for i in range(rank):
        pivots.append(next(j for j, x in enumerate(h[i]) if x))
    resid = list(g)
    for i in range(rank):
        j = pivots[i]
        if resid[j] % h[i][j]:
            return None
        y[i] = resid[j] // h[i][j]
        if y[i]:
            resid = [r - y[i] * x for r, x in zip(resid, h[i])]
    if any(resid):
        return None
    x0 = [sum(u[i][k] * y[i] for i in range(rank)) for k in range(n)]
    kernel = [u[i] for i in range(rank, n)]
    return x0, kernel


def smith_normal_form(m):
    """Smith normal form ``(d, u, v)`` with ``u * m * v == diag(d)``.

    ``d`` lists the diagonal (length min(rows, cols)), each entry dividing
    the next, all nonnegative.
    """
    a = [list(row) for row in m]
    rows, cols = len(a), len(a[0])
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    for t in range(min(rows, cols)):
        nz = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            changed = False
            p = a[t][t]
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // p
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[t])]
                    if a[i][t]:
                        changed = True
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // p
                    for row in a:
                        row[j] -= q * row[t]
                    for row in v:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        changed = True
            if not changed:
                # The pivot must also divide the remaining block.
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if a[i][j] % p), None)
                if bad is None:
                    break
                i, _ = bad
                a[t] = [x + y for x, y in zip(a[t], a[i])]
                u[t] = [x + y for x, y in zip(u[t], u[i])]
                continue
            nz = [(abs(a[i][t]), i, 'r') for i in range(t, rows) if a[i][t]]
            nz += [(abs(a[t][j]), j, 'c') for j in range(t, cols) if a[t][j]]
            _, k, kind = min(nz)
            if kind == 'r':
                swap_rows(t, k)
            else:
                swap_cols(t, k)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    d = [a[i][i] for i in range(min(rows, cols))]
    return d, u, v


def ldl(gram):
    """Exact LDL^T decomposition of a symmetric matrix without pivoting.

    Returns ``(lower, diag)`` as Fractions with unit lower-triangular
    ``lower``.  Raises ``ZeroDivisionError`` if a leading minor vanishes,
    which cannot happen for definite input.
    """
    n = len(gram)
    low = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    dg = [Fraction(0)] * n
    for j in range(n):
        s = Fraction(gram[j][j]) - sum(low[j][k] ** 2 * dg[k] for k in range(j))
        if s == 0:
            raise ZeroDivisionError("zero pivot in LDL")
        dg[j] = s
        for i in range(j + 1, n):
            t = Fraction(gram[i][j]) - sum(low[i][k] * low[j][k] * dg[k] for k in range(j))
            low[i][j] = t / s
    return low, dg


def inertia(gram):
    """Signature ``(n_plus, n_minus)`` of a nondegenerate symmetric matrix.

    Uses exact symmetric elimination with a congruence pivot step when the
    diagonal vanishes, so no leading-minor condition is needed.
    """
    a = [[Fraction(x) for x in row] for row in gram]
    pos = neg = 0
    while a:
        n = len(a)
        k = next((i for i in range(n) if a[i][i] != 0), None)
        if k is None:
            i, j = next(((i, j) for i in range(n) for j in range(n) if a[i][j] != 0), (None, None))
            if i is None:
                raise ValueError("degenerate form")
            # replace basis vector e_i by e_i + e_j: new diagonal 2 a_ij != 0
            a[i] = [x + y for x, y in zip(a[i], a[j])]
            for row in a:
                row[i] = row[i] + row[j]
            k = i
        p = a[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        rest = [r for r in range(n) if r != k]
        a = [[a[r][s] - a[r][k] * a[k][s] / p for s in rest] for r in rest]
    return pos, neg


def lll_gram(gram, delta=Fraction(99, 100)):
    """LLL-reduce a positive definite Gram matrix.

    Returns ``(t, g)`` with ``t`` unimodular and ``g == t * gram * t^T``.
    Gram-Schmidt data are exact Fractions, so the output is deterministic.
    """
    n = len(gram)
    g = [list(row) for row in gram]
    t = identity(n)
    if n <= 1:
        return t, g

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        bstar = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                s = Fraction(g[i][j]) - sum(mu[j][k] * mu[i][k] * bstar[k] for k in range(j))
                mu[i][j] = s / bstar[j]
            bstar[i] = g[i][i] - sum(mu[i][k] ** 2 * bstar[k] for k in range(i))
        return mu, bstar

    def add_row(i, j, q):
        # b_i -= q b_j
        t[i] = [x - q * y for x, y in zip(t[i], t[j])]
        gi = [x - q * y for x, y in zip(g[i], g[j])]
        gii = gi[i] - q * gi[j]
        gi[i] = gii
        g[i] = gi
        for r in range(n):
            if r != i:
                g[r][i] = gi[r]

    def swap(i, j):
        t[i], t[j] = t[j], t[i]
        g[i], g[j] = g[j], g[i]
        for row in g:
            row[i], row[j] = row[j], row[i]

    mu, bstar = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                add_row(k, j, q)
                for l in range(j + 1):
                    mu[k][l] -= q * (mu[j][l] if l < j else 1)
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            swap(k, k - 1)
            mu, bstar = gso()
            k = max(k - 1, 1)
    return t, g


def reduce_gram(gram):
    """LLL plus a deterministic ordering by diagonal, then sign fixing.

    Returns ``(t, g)`` as in :func:`lll_gram`.
    """
    t, g = lll_gram(gram)
    order = sorted(range(len(g)), key=lambda i: (g[i][i], t[i]))
    t = [t[i] for i in order]
    g = [[g[i][j] for j in order] for i in order]
    # make the first nonzero off-diagonal entry of each row (towards earlier
    # rows) non-positive, purely for stable presentation
    n = len(g)
    for i in range(1, n):
        j = next((j for j in range(i) if g[i][j] != 0), None)
        if j is not None and g[i][j] > 0:
            t[i] = [-x for x in t[i]]
            for r in range(n):
                if r != i:
                    g[i][r] = -g[i][r]
                    g[r][i] = -g[r][i]
    return t, g


def vec_gcd(v):
    out = 0
    for x in v:
        out = gcd(out, int(x))
    return out
