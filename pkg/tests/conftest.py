import numpy as np
import pytest

from polyft.scenarios import builtin_ball


@pytest.fixture(scope="session")
def manhattan():
    return builtin_ball("manhattan2d")


@pytest.fixture(scope="session")
def square():
    return builtin_ball("square2d")


@pytest.fixture(scope="session")
def hexagon():
    return builtin_ball("hexagon")


@pytest.fixture(scope="session")
def cube():
    return builtin_ball("cube")


@pytest.fixture(scope="session")
def octahedron():
    return builtin_ball("octahedron")


@pytest.fixture(scope="session")
def dodecahedron():
    return builtin_ball("dodecahedron")


@pytest.fixture(scope="session")
def icosahedron():
    return builtin_ball("icosahedron")


def random_symmetric_ball_vertices(rng, dim, half):
    """Random centrally symmetric vertex cloud (not necessarily in convex position)."""
    Q = rng.normal(size=(half, dim))
    Q = Q[np.linalg.norm(Q, axis=1) > 0.3]
    return np.vstack([Q, -Q])
