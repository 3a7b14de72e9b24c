"""Grid oracle: refinement, argmin sets, confirmation checks."""

import numpy as np
import pytest

from polyft.errors import ConfirmationFailed
from polyft.oracle import GridSpec, confirm_ft_set, default_grid, grid_minimize
from polyft.solver import FTSet, Instance, find_ft_point, ft_locus


def test_two_sites_argmin_traces_segment(hexagon):
    u = hexagon.vertices[0]
    sites = np.array([0.0 * u, 2.0 * u])
    inst = Instance(hexagon, sites)
    report = grid_minimize(inst)
    t = report.argmin_cells @ u / (u @ u)
    perp = report.argmin_cells - np.outer(t, u)
    assert np.abs(perp).max() <= 2 * report.h
    assert t.min() <= 0.1 and t.max() >= 1.9


def test_single_site(cube):
    inst = Instance(cube, np.array([[0.25, -0.5, 0.75]]))
    report = grid_minimize(inst)
    assert report.min_value <= 0.05
    assert np.abs(report.argmin_cells - inst.sites[0]).max() <= 2 * report.h


def test_grid_min_is_upper_bound_close_to_lp(hexagon):
    rng = np.random.default_rng(7)
    sites = rng.uniform(-2, 2, size=(4, 2))
    inst = Instance(hexagon, sites)
    _, lp_value = find_ft_point(inst)
    report = grid_minimize(inst)
    assert report.min_value >= lp_value - 1e-9
    assert report.min_value - lp_value <= report.details["lipschitz"] * report.h


def test_hexagon_triangle_cells_fill_triangle(hexagon):
    import math

    v1 = np.array([1.0, 0.0])
    v2 = np.array([math.cos(math.pi / 3), math.sin(math.pi / 3)])
    inst = Instance(hexagon, np.array([[0.0, 0.0], v1, v2]))
    fts = ft_locus(inst)
    report = confirm_ft_set(inst, fts)
    assert report.max_cell_violation <= 2 * report.oracle.h
    assert report.min_outside_margin > 1e-4
    # The argmin region is two-dimensional: many cells qualify.
    assert len(report.oracle.argmin_cells) > 50


def test_corrupted_set_rejected(hexagon):
    sites = np.array([[0.0, 0.0], [1.0, 0.0], [5.0, 0.0]])
    inst = Instance(hexagon, sites)
    fts = ft_locus(inst)
    assert fts.tag == "point"
    bad = FTSet(
        vertices=fts.vertices + np.array([[0.1, 0.0]]),
        affine_dim=0,
        tag="point",
        objective_value=fts.objective_value,
    )
    with pytest.raises(ConfirmationFailed):
        confirm_ft_set(inst, bad)


def test_collinear_confirmations(hexagon):
    sites = np.array([[k, 0.0] for k in range(1, 6)], dtype=float)
    inst = Instance(hexagon, sites)
    fts = ft_locus(inst)
    report = confirm_ft_set(inst, fts)
    assert report.max_cell_violation <= 2 * report.oracle.h


def test_spec_box_contains_sites_with_margin(cube):
    inst = Instance(cube, np.array([[0.0, 0.0, 0.0], [3.0, 1.0, -2.0]]))
    spec = default_grid(inst)
    diameter = 2.0 * float(np.abs(cube.vertices).max())
    assert np.all(spec.lower <= inst.sites.min(axis=0) - diameter)
    assert np.all(spec.upper >= inst.sites.max(axis=0) + diameter)


def test_non_uniqueness_shows_as_separated_argmin_cells(hexagon):
    # A genuine non-unique witness yields argmin cells at least ten grid
    # steps apart with objectives within the oracle tolerance.
    from polyft.consistency import uniqueness_audit

    report = uniqueness_audit(hexagon, 3)
    assert report.verdict == "non_unique_exists"
    inst = report.witness.instance
    grid = grid_minimize(inst)
    cells = grid.argmin_cells
    spread = (cells.max(axis=0) - cells.min(axis=0)).max()
    assert spread >= 10.0 * grid.h


def test_oracle_never_contradicts_certificates():
    # Soundness sweep: the grid minimum can only exceed a certified optimum
    # slightly (discretization), never undercut it. Reduced instance counts
    # keep the sweep inside the suite's time budget.
    from polyft.scenarios import builtin_ball
    from polyft.solver import verify_ft_point, FTCertificate
    from polyft.oracle import GridSpec

    plans = [("hexagon", 20), ("manhattan2d", 20), ("cube", 6), ("octahedron", 6)]
    for name, count in plans:
        ball = builtin_ball(name)
        rng = np.random.default_rng(11)
        for k in range(count):
            n = (2, 3, 4)[k % 3]
            sites = rng.integers(-3, 4, size=(n, ball.dim)).astype(float)
            inst = Instance(ball, sites)
            x, value = find_ft_point(inst)
            assert isinstance(verify_ft_point(inst, x), FTCertificate)
            grid = grid_minimize(
                inst, default_grid(inst, resolution=0.05, levels=2)
            )
            assert grid.min_value >= value - 1e-9
            assert grid.min_value - value <= grid.details["lipschitz"] * grid.h
