from fractions import Fraction

import numpy as np
from hypothesis import given, strategies as st

from enriques_lattices import intmat
from tests.oracles import det_gauss, signature_eig

small = st.integers(-6, 6)


def matrices(rows, cols=None):
    cols = cols or rows
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


def square(max_n=5):
    return st.integers(1, max_n).flatmap(matrices)


def symmetric(max_n=6):
    return square(max_n).map(lambda m: [[m[i][j] + m[j][i] for j in range(len(m))] for i in range(len(m))])


def positive_definite(max_n=6):
    # B B^T + I is positive definite
    return square(max_n).map(lambda b: (np.array(b) @ np.array(b).T + np.eye(len(b), dtype=int)).tolist())


@given(square(6))
def test_det_matches_gaussian_elimination(m):
    assert intmat.det(m) == det_gauss(m)


def test_det_examples():
    assert intmat.det([[0, 1], [1, 0]]) == -1
    assert intmat.det([[2, -1], [-1, 2]]) == 3


@given(st.integers(1, 4).flatmap(lambda r: st.integers(1, 5).flatmap(lambda c: matrices(r, c))))
def test_hnf_transform_and_shape(m):
    h, u = intmat.hnf_with_transform(m)
    assert intmat.matmul(u, m) == h
    assert abs(intmat.det(u)) == 1
    last_pivot = -1
    seen_zero = False
    for i, row in enumerate(h):
        if not any(row):
            seen_zero = True
            continue
        assert not seen_zero, "zero rows must come last"
        p = next(j for j, x in enumerate(row) if x)
        assert p > last_pivot and row[p] > 0
        for k in range(i):
            assert 0 <= h[k][p] < row[p]
        last_pivot = p


@given(st.integers(1, 4).flatmap(lambda r: st.integers(1, 5).flatmap(lambda c: matrices(r, c))))
def test_snf(m):
    d, u, v = intmat.smith_normal_form(m)
    prod = intmat.matmul(intmat.matmul(u, m), v)
    rows, cols = len(m), len(m[0])
    for i in range(rows):
        for j in range(cols):
            assert prod[i][j] == (d[i] if i == j else 0)
    assert all(x >= 0 for x in d)
    for a, b in zip(d, d[1:]):
        assert (b == 0) if a == 0 else b % a == 0
    assert abs(intmat.det(u)) == 1 and abs(intmat.det(v)) == 1


@given(st.integers(1, 4).flatmap(lambda r: st.integers(r, 6).flatmap(lambda c: matrices(r, c))),
       st.lists(small, min_size=6, max_size=6))
def test_solve_affine(c, x_true):
    x_true = x_true[:len(c[0])]
    g = intmat.matvec(c, x_true)
    sol = intmat.solve_affine(c, g)
    assert sol is not None
    x0, kern = sol
    assert intmat.matvec(c, x0) == g
    for k in kern:
        assert not any(intmat.matvec(c, k))


def test_solve_affine_reports_no_solution():
    assert intmat.solve_affine([[2, 4]], [3]) is None


@given(st.integers(1, 4).flatmap(lambda r: st.integers(1, 5).flatmap(lambda c: matrices(r, c))))
def test_kernel_basis(m):
    k = intmat.kernel_basis(m)
    for row in k:
        assert not any(intmat.matvec(intmat.transpose(m), row))
    rank = np.linalg.matrix_rank(np.array(m, dtype=float))
    assert len(k) == len(m) - rank


@given(symmetric(6))
def test_inertia_matches_eigenvalues(g):
    if intmat.det(g) == 0:
        return
    assert intmat.inertia(g) == signature_eig(g)


@given(positive_definite(5))
def test_ldl_reconstructs(g):
    low, dg = intmat.ldl(g)
    n = len(g)
    for i in range(n):
        for j in range(n):
            assert sum(low[i][k] * dg[k] * low[j][k] for k in range(n)) == g[i][j]
    assert all(x > 0 for x in dg)


@given(positive_definite(6))
def test_lll_is_unimodular_congruence(g):
    t, h = intmat.lll_gram(g)
    assert abs(intmat.det(t)) == 1
    assert intmat.congruent(t, g) == h
    t2, h2 = intmat.reduce_gram(g)
    assert intmat.congruent(t2, g) == h2
    # reduce_gram orders the basis by norm
    assert [h2[i][i] for i in range(len(h2))] == sorted(h2[i][i] for i in range(len(h2)))


def test_inverse_fraction():
    m = [[2, 1], [1, 1]]
    inv = intmat.inverse_fraction(m)
    assert inv == [[1, -1], [-1, 2]]
    assert intmat.inverse_fraction([[4]]) == [[Fraction(1, 4)]]
