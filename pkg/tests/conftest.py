"""Shared fixtures: the three-on-three catalog and its golden coefficient table."""

from fractions import Fraction

import pytest

from mmotpoly.plans import StateSpace
from mmotpoly.polytope import build_constraints, enumerate_vertices

F = Fraction

# The 22 extreme points of the symmetric plan polytope for three marginals on
# three sites, keyed by catalog name.  Multi-indices are 0-based.
GOLDEN_VERTICES = {
    "Id": {(0, 0, 0): F(1, 3), (1, 1, 1): F(1, 3), (2, 2, 2): F(1, 3)},
    "T12": {(2, 2, 2): F(1, 3), (0, 0, 1): F(1, 3), (0, 1, 1): F(1, 3)},
    "T13": {(1, 1, 1): F(1, 3), (0, 0, 2): F(1, 3), (0, 2, 2): F(1, 3)},
    "T23": {(0, 0, 0): F(1, 3), (1, 1, 2): F(1, 3), (1, 2, 2): F(1, 3)},
    "F112": {(0, 0, 1): F(1, 2), (1, 2, 2): F(1, 2)},
    "F113": {(0, 0, 2): F(1, 2), (1, 1, 2): F(1, 2)},
    "F122": {(0, 1, 1): F(1, 2), (0, 2, 2): F(1, 2)},
    "C": {(0, 1, 2): F(1)},
    "K233,111": {(1, 2, 2): F(1, 2), (0, 0, 0): F(1, 3), (1, 1, 1): F(1, 6)},
    "K133,222": {(0, 2, 2): F(1, 2), (1, 1, 1): F(1, 3), (0, 0, 0): F(1, 6)},
    "K122,333": {(0, 1, 1): F(1, 2), (2, 2, 2): F(1, 3), (0, 0, 0): F(1, 6)},
    "K223,111": {(1, 1, 2): F(1, 2), (0, 0, 0): F(1, 3), (2, 2, 2): F(1, 6)},
    "K113,222": {(0, 0, 2): F(1, 2), (1, 1, 1): F(1, 3), (2, 2, 2): F(1, 6)},
    "K112,333": {(0, 0, 1): F(1, 2), (2, 2, 2): F(1, 3), (1, 1, 1): F(1, 6)},
    "K112,223": {(0, 0, 1): F(1, 2), (1, 1, 2): F(1, 4), (2, 2, 2): F(1, 4)},
    "K113,233": {(0, 0, 2): F(1, 2), (1, 2, 2): F(1, 4), (1, 1, 1): F(1, 4)},
    "K223,133": {(1, 1, 2): F(1, 2), (0, 2, 2): F(1, 4), (0, 0, 0): F(1, 4)},
    "K122,113": {(0, 1, 1): F(1, 2), (0, 0, 2): F(1, 4), (2, 2, 2): F(1, 4)},
    "K133,112": {(0, 2, 2): F(1, 2), (0, 0, 1): F(1, 4), (1, 1, 1): F(1, 4)},
    "K233,122": {(1, 2, 2): F(1, 2), (0, 1, 1): F(1, 4), (0, 0, 0): F(1, 4)},
    "Id,C": {(0, 0, 1): F(1, 3), (0, 2, 2): F(1, 3), (1, 1, 2): F(1, 3)},
    "Id,C'": {(0, 0, 2): F(1, 3), (0, 1, 1): F(1, 3), (1, 2, 2): F(1, 3)},
}

MONGE_VERTEX_NAMES = {"Id", "T12", "T13", "T23", "C", "Id,C", "Id,C'"}
REDUCED_EXTREME_NAMES = {"Id", "T12", "T13", "T23", "C", "F112", "F113", "F122"}


@pytest.fixture(scope="session")
def space33():
    return StateSpace.uniform(3, 3)


@pytest.fixture(scope="session")
def catalog33(space33):
    return enumerate_vertices(build_constraints(space33))
