"""Lattice-presented subgroups and subquotients of finite abelian groups."""

import random

import pytest

from fusloc.groups import AbHom, FinAb
from fusloc.lattices import (
    image_gens,
    kernel_gens,
    preimage_gens,
    quotient,
    subgroup,
    subquotient,
)


def closure(A, gens):
    seen = {A.zero()}
    frontier = [A.zero()]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = A.add(x, A.reduce(g))
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return seen


AMBIENTS = [FinAb(()), FinAb((2,)), FinAb((4,)), FinAb((2, 2)),
            FinAb((4, 2)), FinAb((8, 4, 2)), FinAb((3, 9)), FinAb((4, 4, 2))]


class TestSubgroup:
    @pytest.mark.parametrize('A', AMBIENTS, ids=lambda A: str(A.orders))
    def test_matches_brute_closure(self, A):
        rng = random.Random(11 + A.order)
        elems = list(A.elements())
        for _ in range(6):
            gens = [rng.choice(elems) for _ in range(rng.randrange(3))]
            S = subgroup(A, gens)
            mem = closure(A, gens)
            assert S.group.order == len(mem)
            assert all(S.contains(v) == (v in mem) for v in elems)
            for v in mem:
                assert S.lift(S.project(v)) in mem
                assert S.project(S.lift(S.project(v))) == S.project(v)

    def test_inject_hom_section(self):
        A = FinAb((4, 4, 2))
        S = subgroup(A, [(2, 0, 0), (0, 2, 1)])
        inc = S.inject_hom()
        for e in [(1, 0), (0, 1), (1, 1)]:
            assert S.project(inc(e)) == e

    def test_outside_element_raises(self):
        A = FinAb((4,))
        S = subgroup(A, [(2,)])
        with pytest.raises(ValueError):
            S.project((1,))


class TestQuotient:
    @pytest.mark.parametrize('A', AMBIENTS, ids=lambda A: str(A.orders))
    def test_order_and_kernel(self, A):
        rng = random.Random(5 + A.order)
        elems = list(A.elements())
        for _ in range(6):
            gens = [rng.choice(elems) for _ in range(rng.randrange(3))]
            Qt = quotient(A, gens)
            mem = closure(A, gens)
            assert Qt.group.order * len(mem) == A.order
            ph = Qt.project_hom()
            assert all((ph(v) == Qt.group.zero()) == (v in mem)
                       for v in elems)

    def test_section_round_trip(self):
        A = FinAb((8, 2))
        Qt = quotient(A, [(4, 1)])
        ph = Qt.project_hom()
        for g in Qt.group.elements():
            assert ph(Qt.lift(g)) == g


class TestSubquotient:
    def test_middle_layer(self):
        A = FinAb((8,))
        SQ = subquotient(A, [(2,)], [(4,)])
        assert SQ.group.orders == (2,)
        assert SQ.project((2,)) != SQ.group.zero()
        assert SQ.project((4,)) == SQ.group.zero()

    def test_bottom_outside_top_raises(self):
        A = FinAb((4, 2))
        with pytest.raises(ValueError):
            subquotient(A, [(2, 0)], [(0, 1)])


class TestHomLattices:
    def test_kernel_and_preimage_brute(self):
        A = FinAb((4, 4, 2))
        B = FinAb((2, 4))
        h = AbHom(A, B, [[1, 1, 1], [2, 0, 2]])
        ker = closure(A, kernel_gens(h))
        assert ker == {v for v in A.elements() if h(v) == B.zero()}
        tgt = [(0, 2)]
        pre = closure(A, preimage_gens(h, tgt))
        good = closure(B, tgt)
        assert pre == {v for v in A.elements() if h(v) in good}

    def test_image(self):
        A = FinAb((4,))
        B = FinAb((8,))
        h = AbHom(A, B, [[2]])
        img = closure(B, image_gens(h))
        assert img == {h(v) for v in A.elements()}


class TestSyntheticFixedCofixed:
    """A two-point swap module over Z/2: fixed points are the diagonal,
    cofixed the sum, and id + swap induces a bijection between them."""

    def test_swap_module(self):
        big = FinAb((2, 2))
        swap = AbHom(big, big, [[0, 1], [1, 0]])
        diff = swap.sub(AbHom.identity(big))
        fix = subgroup(big, kernel_gens(diff))
        cof = quotient(big, [diff(e) for e in [(1, 0), (0, 1)]])
        assert fix.group.orders == (2,)
        assert cof.group.orders == (2,)
        assert fix.contains((1, 1)) and not fix.contains((1, 0))
        trace = AbHom.identity(big).add(swap)
        cols = [fix.project(trace(cof.lift(e)))
                for e in [(1,)]]
        induced = AbHom.from_columns(cof.group, fix.group, cols)
        assert induced.is_iso()
