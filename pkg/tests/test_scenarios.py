"""Builtin balls, the dodecahedron section constants, case dispatch."""

import math

import numpy as np
import pytest

from polyft.errors import CaseFailed, NotCentrallySymmetric, UnknownBall
from polyft.geometry import build_ball
from polyft.scenarios import (
    builtin_ball,
    dodecahedron_constants,
    reproduce_case,
)
from polyft.solver import Instance, ft_locus
from polyft.symmetry import linear_automorphisms


class TestBuiltins:
    def test_octahedron_vertices(self):
        ball = builtin_ball("octahedron")
        got = sorted(map(tuple, ball.vertices))
        want = sorted(
            map(tuple, np.vstack([np.eye(3), -np.eye(3)]))
        )
        assert np.allclose(got, want)

    def test_prism_structure(self):
        ball = builtin_ball("prism(6)")
        assert ball.num_vertices == 12
        assert ball.num_facets == 8  # six side rectangles plus two caps
        side_sizes = sorted(len(ids) for ids in ball.facet_vertex_ids)
        assert side_sizes == [4] * 6 + [6, 6]

    def test_regular_mgon(self):
        ball = builtin_ball("regular_mgon(8)")
        assert ball.num_vertices == 8
        assert ball.num_facets == 8

    def test_tetrahedron_rejected(self):
        with pytest.raises(NotCentrallySymmetric):
            builtin_ball("tetrahedron")

    def test_odd_polygon_rejected(self):
        with pytest.raises(NotCentrallySymmetric):
            builtin_ball("regular_mgon(7)")
        with pytest.raises(NotCentrallySymmetric):
            builtin_ball("prism(5)")

    def test_unknown_names(self):
        with pytest.raises(UnknownBall):
            builtin_ball("klein_bottle")
        with pytest.raises(UnknownBall):
            builtin_ball("regular_mgon(2)")

    def test_dodecahedron_unit_circumradius(self):
        ball = builtin_ball("dodecahedron")
        assert np.allclose(np.linalg.norm(ball.vertices, axis=1), 1.0, atol=1e-12)


class TestSymmetryGroups:
    @pytest.mark.parametrize(
        "name,order",
        [
            ("manhattan2d", 8),
            ("square2d", 8),
            ("hexagon", 12),
            ("regular_mgon(8)", 16),
            ("cube", 48),
            ("octahedron", 48),
            ("dodecahedron", 120),
            ("icosahedron", 120),
            ("prism(6)", 24),
        ],
    )
    def test_group_orders(self, name, order):
        assert len(linear_automorphisms(builtin_ball(name))) == order

    def test_group_closed_under_composition(self, hexagon):
        perms = {tuple(p) for p in linear_automorphisms(hexagon)}
        for p in perms:
            for q in perms:
                assert tuple(np.array(p)[list(q)]) in perms


class TestDodecahedronConstants:
    def test_closed_forms(self):
        s = dodecahedron_constants()
        assert s.alpha == pytest.approx(0.5 * math.acos(-1 / math.sqrt(5)), abs=1e-15)
        assert s.a == 1.0
        assert s.b == pytest.approx(math.sqrt(5 + 2 * math.sqrt(5)) / 2, abs=1e-15)
        assert s.tan_beta == pytest.approx(2.0, abs=1e-12)
        assert s.beta == pytest.approx(math.atan(2.0), abs=1e-15)
        assert s.beta > s.alpha
        # The legs are half the golden ratio and half its square.
        golden = (1 + math.sqrt(5)) / 2
        assert s.c == pytest.approx(golden / 2, abs=1e-12)
        assert s.d == pytest.approx(golden**2 / 2, abs=1e-12)


class TestScaleInvariance:
    def test_hexagon_triangle_at_two_scales(self):
        # Scaling the ball rescales the norm but preserves the solution set.
        v1 = np.array([1.0, 0.0])
        v2 = np.array([math.cos(math.pi / 3), math.sin(math.pi / 3)])
        sites = np.array([[0.0, 0.0], v1, v2])
        small = builtin_ball("hexagon")
        ang = 2.0 * math.pi * np.arange(6) / 6
        big = build_ball(
            2.5 * np.column_stack([np.cos(ang), np.sin(ang)]), name="hexagon_2_5"
        )
        fts_small = ft_locus(Instance(small, sites))
        fts_big = ft_locus(Instance(big, sites))
        assert fts_small.tag == fts_big.tag == "polygon"
        a = sorted(map(tuple, np.round(fts_small.vertices, 8)))
        b = sorted(map(tuple, np.round(fts_big.vertices, 8)))
        assert np.allclose(a, b, atol=1e-8)
        assert fts_big.objective_value == pytest.approx(
            fts_small.objective_value / 2.5, abs=1e-9
        )


class TestCases:
    def test_unknown_case(self):
        with pytest.raises(CaseFailed):
            reproduce_case("fermat_spiral")

    def test_hexagon_triangle_case(self):
        report = reproduce_case("hexagon_triangle")
        assert report.passed
        assert report.details["ft_set"].tag == "polygon"

    def test_octahedron_unique_case_small(self):
        report = reproduce_case("octahedron_unique")
        assert report.passed
