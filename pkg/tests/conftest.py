"""Shared small-group fixtures used across the suite."""

import pytest

from fusloc.groups import Permutation, generate_group


def perm(n, *cycles):
    return Permutation.from_cycles(n, cycles)


@pytest.fixture(scope='session')
def s3():
    return generate_group([perm(3, [0, 1]), perm(3, [0, 1, 2])])


@pytest.fixture(scope='session')
def s4():
    return generate_group([perm(4, [0, 1, 2, 3]), perm(4, [0, 1])])


@pytest.fixture(scope='session')
def a4():
    return generate_group([perm(4, [0, 1, 2]), perm(4, [1, 2, 3])])


@pytest.fixture(scope='session')
def c2():
    return generate_group([perm(2, [0, 1])])


@pytest.fixture(scope='session')
def c3():
    return generate_group([perm(3, [0, 1, 2])])


@pytest.fixture(scope='session')
def c4():
    return generate_group([perm(4, [0, 1, 2, 3])])


@pytest.fixture(scope='session')
def klein():
    # C2 x C2 on 4 points
    return generate_group([perm(4, [0, 1], [2, 3]), perm(4, [0, 2], [1, 3])])


@pytest.fixture(scope='session')
def d8():
    # dihedral of order 8 inside S4: <(0123), (02)>
    return generate_group([perm(4, [0, 1, 2, 3]), perm(4, [0, 2])])


@pytest.fixture(scope='session')
def q8():
    # quaternion group of order 8 as a regular permutation group
    i = perm(8, [0, 1, 2, 3], [4, 7, 6, 5])
    j = perm(8, [0, 4, 2, 6], [1, 5, 3, 7])
    return generate_group([i, j])
