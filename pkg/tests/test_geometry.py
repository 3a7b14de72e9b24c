"""Ball construction, gauge, duality, norming functionals, spans."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import polyft.geometry as geo
from polyft.errors import (
    DegenerateDimension,
    InvalidInput,
    NotCentrallySymmetric,
    NotNorming,
    ZeroVector,
)
from polyft.geometry import (
    build_ball,
    dual_norm,
    face_of_functional,
    intersect_subspaces,
    linear_span,
    norm,
    norming_functionals,
    span,
    strict_exposer,
)
from polyft.scenarios import builtin_ball

from conftest import random_symmetric_ball_vertices


class TestBuildBall:
    def test_cross_polytope_2d(self, manhattan):
        assert manhattan.num_vertices == 4
        assert manhattan.num_facets == 4
        assert len(manhattan.faces_of_dim(0)) == 4
        assert len(manhattan.faces_of_dim(1)) == 4
        # Facets are x +- y = +-1 up to sign.
        normals = sorted(tuple(np.sign(np.round(r, 6))) for r in manhattan.facet_coeffs)
        assert normals == [(-1, -1), (-1, 1), (1, -1), (1, 1)]

    def test_cube_combinatorics(self, cube):
        assert cube.num_vertices == 8
        assert cube.num_facets == 6
        assert len(cube.faces_of_dim(1)) == 12
        assert len(cube.faces_of_dim(0)) == 8

    def test_hexagon_combinatorics(self, hexagon):
        assert hexagon.num_vertices == 6
        assert hexagon.num_facets == 6
        assert len(hexagon.faces_of_dim(1)) == 6

    def test_dodecahedron_combinatorics(self, dodecahedron):
        assert dodecahedron.num_vertices == 20
        assert dodecahedron.num_facets == 12
        assert len(dodecahedron.faces_of_dim(1)) == 30
        assert all(len(ids) == 5 for ids in dodecahedron.facet_vertex_ids)

    def test_icosahedron_combinatorics(self, icosahedron):
        assert icosahedron.num_vertices == 12
        assert icosahedron.num_facets == 20
        assert len(icosahedron.faces_of_dim(1)) == 30

    def test_rejects_asymmetric(self):
        with pytest.raises(NotCentrallySymmetric):
            build_ball([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.2, -0.7]])

    def test_rejects_degenerate(self):
        with pytest.raises(DegenerateDimension):
            build_ball(
                [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0],
                 [0.0, -1.0, 0.0], [0.5, 0.5, 0.0], [-0.5, -0.5, 0.0]]
            )

    def test_rejects_too_few(self):
        with pytest.raises(InvalidInput):
            build_ball([[1.0, 0.0], [-1.0, 0.0]])

    def test_drops_duplicates_and_interior(self):
        ball = build_ball(
            [[1, 0], [1, 0], [-1, 0], [0, 1], [0, -1], [0.1, 0.1], [-0.1, -0.1]]
        )
        assert ball.num_vertices == 4
        assert any("duplicate" in w for w in ball.warnings)
        assert any("interior" in w for w in ball.warnings)

    def test_boundary_midpoint_dropped(self):
        ball = build_ball([[1, 1], [1, -1], [-1, 1], [-1, -1], [1, 0], [-1, 0]])
        assert ball.num_vertices == 4

    def test_large_polygon(self):
        ball = builtin_ball("regular_mgon(1000)")
        assert ball.num_vertices == 1000
        assert ball.num_facets == 1000


class TestNorm:
    def test_octahedron_is_l1(self, octahedron):
        assert norm(octahedron, [1.0, 2.0, -3.0]) == pytest.approx(6.0, abs=1e-12)

    def test_zero_vector(self, hexagon):
        assert norm(hexagon, [0.0, 0.0]) == pytest.approx(0.0, abs=1e-12)

    def test_cube_is_linf(self, cube):
        assert norm(cube, [0.5, -2.0, 1.0]) == pytest.approx(2.0, abs=1e-12)

    def test_hexagon_vertices_norm_one(self, hexagon):
        for v in hexagon.vertices:
            assert norm(hexagon, v) == pytest.approx(1.0, abs=1e-12)


class TestNormingFunctionals:
    def test_hexagon_edge_midpoint_unique(self, hexagon):
        v0 = np.array([1.0, 0.0])
        v1 = np.array([math.cos(math.pi / 3), math.sin(math.pi / 3)])
        mid = (v0 + v1) / 2
        df = norming_functionals(hexagon, mid)
        assert df.is_unique
        phi = df.generators[0]
        assert phi @ v0 == pytest.approx(1.0, abs=1e-9)
        assert phi @ v1 == pytest.approx(1.0, abs=1e-9)

    def test_manhattan_vertex_direction(self, manhattan):
        df = norming_functionals(manhattan, [1.0, 0.0])
        # Derived by enumerating L1 facet functionals active at (1, 0):
        # (1, 1) and (1, -1); the dual face is the segment {(1, t)}.
        gens = sorted(tuple(np.round(g, 9)) for g in df.generators)
        assert gens == [(1.0, -1.0), (1.0, 1.0)]
        assert df.dim == 1

    def test_cube_vertex_direction(self, cube):
        df = norming_functionals(cube, [1.0, 1.0, 1.0])
        gens = sorted(tuple(np.round(g, 9)) for g in df.generators)
        assert gens == [(0.0, 0.0, 1.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0)]
        assert df.dim == 2

    def test_zero_raises(self, cube):
        with pytest.raises(ZeroVector):
            norming_functionals(cube, [0.0, 0.0, 0.0])

    def test_scaling_invariance(self, hexagon):
        x = np.array([0.3, 0.9])
        a = norming_functionals(hexagon, x)
        b = norming_functionals(hexagon, 7.5 * x)
        assert a.generator_ids == b.generator_ids


class TestFaceOfFunctional:
    def test_exposes_edge(self, manhattan):
        face = face_of_functional(manhattan, [1.0, 1.0])
        assert face.dim == 1

    def test_not_norming(self, manhattan):
        with pytest.raises(NotNorming):
            face_of_functional(manhattan, [2.0, 0.0])

    def test_strict_exposer_roundtrip(self, dodecahedron):
        for face in dodecahedron.faces:
            phi = strict_exposer(dodecahedron, face)
            assert face_of_functional(dodecahedron, phi) is face


class TestSpan:
    def test_cube_parallel_edges_share_z_line(self, cube):
        # Two edges along z on the facet x=1, plus the central reflection of
        # one of them on x=-1: the span intersection is the z-axis.
        def edge(ids):
            return cube.face_by_vertex_ids(ids)

        V = cube.vertices.tolist()
        i = {tuple(v): k for k, v in enumerate(V)}
        e1 = edge([i[(1.0, 1.0, 1.0)], i[(1.0, 1.0, -1.0)]])
        e2 = edge([i[(1.0, -1.0, 1.0)], i[(1.0, -1.0, -1.0)]])
        e3 = edge([i[(-1.0, -1.0, 1.0)], i[(-1.0, -1.0, -1.0)]])
        sub = span([e1, e2, e3], cube)
        assert sub.dim == 1
        direction = sub.basis[0] / np.abs(sub.basis[0]).max()
        assert np.allclose(np.abs(direction), [0, 0, 1], atol=1e-9)

    def test_disjoint_spans(self, manhattan):
        f1 = manhattan.face_by_vertex_ids(
            [int(np.argmax(manhattan.vertices @ np.array([1.0, 0.0])))]
        )
        f2 = manhattan.face_by_vertex_ids(
            [int(np.argmax(manhattan.vertices @ np.array([0.0, 1.0])))]
        )
        assert span([f1, f2], manhattan).dim == 0

    def test_single_cube_facet_spans_space(self, cube):
        facet = cube.faces_of_dim(2)[0]
        assert span([facet], cube).dim == 3

    def test_intersect_none_is_full(self):
        assert intersect_subspaces([], 3).dim == 3


@st.composite
def symmetric_balls(draw):
    dim = draw(st.integers(min_value=2, max_value=3))
    half = draw(st.integers(min_value=dim, max_value=6))
    seed = draw(st.integers(min_value=0, max_value=10_000))
    rng = np.random.default_rng(seed)
    V = random_symmetric_ball_vertices(rng, dim, half)
    if len(V) < 2 * dim or geo.affine_rank(V) < dim:
        return None
    return build_ball(V)


@settings(max_examples=60, deadline=None)
@given(ball=symmetric_balls(), seed=st.integers(0, 2**32 - 1))
def test_norm_axioms(ball, seed):
    if ball is None:
        return
    rng = np.random.default_rng(seed)
    x = rng.normal(size=ball.dim) * 3
    y = rng.normal(size=ball.dim) * 3
    lam = rng.normal() * 2
    tol = 1e-9 * (1 + norm(ball, x) + norm(ball, y))
    assert norm(ball, x + y) <= norm(ball, x) + norm(ball, y) + tol
    assert norm(ball, lam * x) == pytest.approx(abs(lam) * norm(ball, x), abs=tol)
    assert norm(ball, -x) == pytest.approx(norm(ball, x), abs=tol)
    assert norm(ball, x) >= 0.0


@settings(max_examples=40, deadline=None)
@given(ball=symmetric_balls())
def test_duality_roundtrip(ball):
    if ball is None:
        return
    # Every vertex supports some facet at level 1.
    levels = ball.vertices @ ball.facet_coeffs.T
    assert np.all(np.abs(levels.max(axis=1) - 1.0) < 1e-7)
    # The dual of the dual ball recovers the original vertex set.
    dual = build_ball(ball.dual_vertices)
    bidual = build_ball(dual.dual_vertices)
    got = sorted(map(tuple, np.round(bidual.vertices, 6)))
    want = sorted(map(tuple, np.round(ball.vertices, 6)))
    assert np.allclose(np.array(got), np.array(want), atol=1e-6)


@settings(max_examples=40, deadline=None)
@given(ball=symmetric_balls(), seed=st.integers(0, 2**32 - 1))
def test_norming_functional_definition(ball, seed):
    if ball is None:
        return
    rng = np.random.default_rng(seed)
    x = rng.normal(size=ball.dim)
    if np.linalg.norm(x) < 1e-6:
        return
    nx = norm(ball, x)
    df = norming_functionals(ball, x)
    for phi in df.generators:
        assert dual_norm(ball, phi) == pytest.approx(1.0, abs=1e-7)
        assert phi @ x == pytest.approx(nx, abs=1e-7 * (1 + nx))
    # Dual vertices outside the returned face violate phi(x) = |x|.
    others = np.setdiff1d(np.arange(ball.num_facets), np.array(df.generator_ids))
    if others.size:
        vals = ball.facet_coeffs[others] @ x
        assert np.all(vals < nx - 1e-9)


def test_face_lattice_exposure_witnesses(cube, hexagon, octahedron):
    for ball in (cube, hexagon, octahedron):
        for face in ball.faces:
            if face.dim > 0:
                assert len(face.vertex_ids) >= face.dim + 1
            phi = strict_exposer(ball, face)
            vals = ball.vertices @ phi
            on = np.array(face.vertex_ids)
            off = np.setdiff1d(np.arange(ball.num_vertices), on)
            assert np.allclose(vals[on], 1.0, atol=1e-9)
            if off.size:
                assert vals[off].max() < 1.0 - 1e-9
