import random

import pytest

from smallflow import GF2Field, PathInstance


@pytest.fixture(scope="session")
def field64():
    return GF2Field(64)


@pytest.fixture(scope="session")
def field8():
    return GF2Field(8)


@pytest.fixture
def single_edge():
    """One edge x1 -> y1."""
    return PathInstance(2, [(0, 1)], [0], [1])


@pytest.fixture
def bipartite22():
    """X = {0, 1}, Y = {2, 3}, all four cross edges.

    Edge ids: 0: (0,2), 1: (0,3), 2: (1,2), 3: (1,3).
    """
    return PathInstance(4, [(0, 2), (0, 3), (1, 2), (1, 3)], [0, 1], [2, 3])


@pytest.fixture
def bottleneck():
    """x1, x2 -> v -> y1, y2: no two disjoint paths, all monomials cancel."""
    return PathInstance(5, [(0, 2), (1, 2), (2, 3), (2, 4)], [0, 1], [3, 4])


def seeded(n=0):
    return random.Random(n)
