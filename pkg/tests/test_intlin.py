"""Integer linear algebra tests: SNF, HNF, lattice solving, smith_solve."""

import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from fusloc.errors import NoSolution
from fusloc.intlin import (smith_normal_form, snf_diagonal, solve_int,
                           kernel_basis, row_hnf, hnf_reduce, smith_solve,
                           lattice_quotient_invariants, det, mat_mul, mat_vec,
                           prime_power)

small_matrix = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9),
                                    min_size=n, max_size=n),
                           min_size=m, max_size=m)))


class TestSNF:
    @given(small_matrix)
    @settings(max_examples=200, deadline=None)
    def test_snf_properties(self, M):
        S, U, V = smith_normal_form(M)
        assert mat_mul(mat_mul(U, M), V) == S
        assert abs(det(U)) == 1 and abs(det(V)) == 1
        d = snf_diagonal(S)
        for i in range(len(S)):
            for j in range(len(S[0])):
                if i != j:
                    assert S[i][j] == 0
        for a, b in zip(d, d[1:]):
            assert a >= 0 and b >= 0
            if a:
                assert b % a == 0
            else:
                assert b == 0

    def test_known_diagonal(self):
        S, U, V = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, 4, 16]])
        assert snf_diagonal(S) == [2, 2, 156]


class TestSolveInt:
    @given(small_matrix, st.lists(st.integers(-9, 9), min_size=1, max_size=4))
    @settings(max_examples=200, deadline=None)
    def test_solution_substitutes(self, M, x0):
        x0 = (x0 * 4)[:len(M[0])]
        b = mat_vec(M, x0)
        x = solve_int(M, b)
        assert x is not None
        assert mat_vec(M, x) == b

    def test_no_solution(self):
        assert solve_int([[2]], [1]) is None

    @given(small_matrix)
    @settings(max_examples=100, deadline=None)
    def test_kernel(self, M):
        for row in kernel_basis(M):
            assert all(v == 0 for v in mat_vec(M, row))


class TestHNF:
    @given(small_matrix)
    @settings(max_examples=100, deadline=None)
    def test_hnf_canonical_shape(self, M):
        H = row_hnf(M)
        pivots = []
        for row in H:
            c = next(j for j, x in enumerate(row) if x)
            assert row[c] > 0
            pivots.append(c)
        assert pivots == sorted(pivots) and len(set(pivots)) == len(pivots)
        for i, row in enumerate(H):
            c = next(j for j, x in enumerate(row) if x)
            for k in range(i):
                assert 0 <= H[k][c] < row[c]

    def test_reduce_canonical(self):
        H = row_hnf([[2, 2], [0, 4]])
        assert hnf_reduce([0, 1], H) == [0, 1]
        assert hnf_reduce([2, 3], H) == [0, 1]


class TestSmithSolve:
    def test_trivial(self):
        assert smith_solve([[2]], [0], 4) == (0,)

    def test_parity_unsolvable(self):
        with pytest.raises(NoSolution):
            smith_solve([[2]], [1], 4)

    def test_frozen_example(self):
        # oracle: exhaustive search over the solution box mod 4
        A = [[1, 1], [0, 2]]
        b = [1, 2]
        sols = [x for x in itertools.product(range(4), range(4))
                if (x[0] + x[1]) % 4 == 1 and (2 * x[1]) % 4 == 2]
        got = smith_solve(A, b, 4)
        assert got in sols
        assert got == min(sols) == (0, 1)

    @given(st.integers(1, 3).flatmap(
        lambda m: st.tuples(
            st.lists(st.lists(st.integers(-4, 4), min_size=2, max_size=2),
                     min_size=m, max_size=m),
            st.lists(st.integers(-4, 4), min_size=m, max_size=m),
            st.lists(st.sampled_from([2, 3, 4, 8]), min_size=m, max_size=m))))
    @settings(max_examples=150, deadline=None)
    def test_against_exhaustive(self, data):
        A, b, mods = data
        box = 1
        for m in mods:
            box = box * m // math.gcd(box, m)
        brute = []
        for x in itertools.product(range(box), repeat=2):
            ok = all((sum(a * xi for a, xi in zip(row, x)) - bi) % m == 0
                     for row, bi, m in zip(A, b, mods))
            if ok:
                brute.append(x)
        try:
            got = smith_solve(A, b, mods)
            assert all(
                (sum(a * xi for a, xi in zip(row, got)) - bi) % m == 0
                for row, bi, m in zip(A, b, mods))
            assert brute, 'solver found a solution the search missed'
        except NoSolution:
            assert not brute

    def test_deterministic_canonical(self):
        # the canonical representative does not depend on the particular
        # solution: shifting b by A times a lattice point changes nothing
        A = [[1, 2, 3], [0, 4, 2]]
        got1 = smith_solve(A, [1, 2], 8)
        got2 = smith_solve(A, [1 + 8, 2 - 16], 8)
        assert got1 == got2


class TestLatticeQuotient:
    def test_z_mod_2z(self):
        assert lattice_quotient_invariants([[1]], [[2]], 1) == [2]

    def test_free_part(self):
        assert lattice_quotient_invariants([[1, 0], [0, 1]], [[2, 0]], 2) \
            == [2, 0]

    def test_trivial_quotient(self):
        assert lattice_quotient_invariants([[1]], [[1]], 1) == []


class TestPrimePower:
    def test_values(self):
        assert prime_power(8) == (2, 3)
        assert prime_power(9) == (3, 2)
        assert prime_power(7) == (7, 1)
        assert prime_power(6) is None
        assert prime_power(1) is None
