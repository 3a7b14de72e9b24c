"""Brute-force grid verification: the anti-self-deception layer.

Everything here is deliberately independent of the LP/cone pipeline: the
objective is evaluated directly on refined grids, so agreement between the
two paths is meaningful evidence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import ConfirmationFailed, InvalidInput
from .solver import FTSet, Instance

EPS_ORACLE = 1e-4


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned search box with a target final resolution."""

    lower: np.ndarray
    upper: np.ndarray
    resolution: float
    levels: int = 3
    max_points_per_axis: int = 81

    def __post_init__(self):
        if np.any(self.upper <= self.lower) or self.resolution <= 0:
            raise InvalidInput("grid box must be nonempty and resolution positive")


def default_grid(instance: Instance, resolution: float = 1e-3, levels: int = 3) -> GridSpec:
    """Box containing all sites with at least one ball diameter of margin."""
    diameter = 2.0 * float(np.abs(instance.ball.vertices).max())
    lo = instance.sites.min(axis=0) - diameter - resolution
    hi = instance.sites.max(axis=0) + diameter + resolution
    per_axis = 81 if instance.dim == 2 else 41
    return GridSpec(lower=lo, upper=hi, resolution=resolution, levels=levels,
                    max_points_per_axis=per_axis)


@dataclass
class OracleReport:
    min_value: float
    argmin_cells: np.ndarray
    h: float
    evaluations: int
    details: dict[str, Any] = field(default_factory=dict)


def _level_axes(lo, hi, h, total_budget: int = 2_500_000):
    """Per-axis grids targeting spacing h, coarsened if the budget binds."""
    while True:
        counts = [max(2, int(np.ceil((hi[j] - lo[j]) / h)) + 1) for j in range(len(lo))]
        total = int(np.prod([float(c) for c in counts]))
        if total <= total_budget:
            break
        h *= 1.5
    axes = [np.linspace(lo[j], hi[j], counts[j]) for j in range(len(lo))]
    actual = max(
        (hi[j] - lo[j]) / (counts[j] - 1) for j in range(len(lo))
    )
    return axes, float(actual)


def grid_minimize(
    instance: Instance, spec: GridSpec | None = None, atol: float = EPS_ORACLE
) -> OracleReport:
    """Evaluate the objective on an iteratively refined grid.

    Each refinement shrinks the box to a Lipschitz-safe band around the
    current argmin cells and divides the spacing by ten, until the requested
    resolution is reached or the level allowance runs out. Returns the best
    value found (an upper bound on the true minimum) and every final-level
    grid point within ``atol`` of it.
    """
    if spec is None:
        spec = default_grid(instance)
    d = instance.dim
    # Lipschitz bound of the objective in the max norm, for safe band keeping.
    lip = instance.n * float(np.abs(instance.ball.facet_coeffs).sum(axis=1).max())

    lo, hi = spec.lower.astype(float), spec.upper.astype(float)
    evaluations = 0
    target = float((hi - lo).max()) / (spec.max_points_per_axis - 1)
    target = max(target, spec.resolution)
    max_levels = spec.levels + 2  # allowance for elongated argmin regions
    for level in range(max_levels):
        axes, h = _level_axes(lo, hi, target)
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.column_stack([m.ravel() for m in mesh])
        vals = instance.objective_many(pts)
        evaluations += len(pts)
        best = float(vals.min())
        if h <= spec.resolution + 1e-15 or level == max_levels - 1:
            keep = pts[vals <= best + atol]
            return OracleReport(
                min_value=best,
                argmin_cells=keep,
                h=h,
                evaluations=evaluations,
                details={"lipschitz": lip, "levels_used": level + 1},
            )
        band = pts[vals <= best + lip * h]
        lo = band.min(axis=0) - 2.0 * h
        hi = band.max(axis=0) + 2.0 * h
        target = max(h / 10.0, spec.resolution)
    raise AssertionError("unreachable")


def _sample_set_points(fts: FTSet) -> np.ndarray:
    """Deterministic samples of the solution set: vertices plus mixtures."""
    V = fts.vertices
    samples = [V]
    if len(V) > 1:
        samples.append(V.mean(axis=0, keepdims=True))
        mids = [(V[i] + V[j]) / 2.0 for i in range(len(V)) for j in range(i + 1, len(V))]
        samples.append(np.array(mids))
        weights = np.array([[0.7, 0.2, 0.1], [0.1, 0.6, 0.3]])
        if len(V) >= 3:
            samples.append(weights @ V[:3])
    return np.vstack(samples)


def _set_violation(fts: FTSet, X: np.ndarray) -> np.ndarray:
    """Lower bound on the distance from each point to the solution set."""
    if fts.halfspaces is not None:
        A, b = fts.halfspaces
        return np.max(X @ A.T - b, axis=1)
    V = fts.vertices
    if len(V) == 1:
        return np.abs(X - V[0]).max(axis=1)
    # Segment: project onto the carrier line, clamp, measure in max norm.
    u = V[1] - V[0]
    t = np.clip((X - V[0]) @ u / (u @ u), 0.0, 1.0)
    proj = V[0] + np.outer(t, u)
    return np.abs(X - proj).max(axis=1)


def _outside_samples(fts: FTSet, h: float, count: int) -> np.ndarray:
    """Points guaranteed at least 10h outside the set, via support offsets."""
    d = fts.vertices.shape[1]
    bary = fts.barycenter()
    if d == 2:
        ang = 2.0 * np.pi * np.arange(count) / count
        dirs = np.column_stack([np.cos(ang), np.sin(ang)])
    else:
        k = np.arange(count)
        golden = (1 + 5**0.5) / 2
        z = 1 - 2 * (k + 0.5) / count
        r = np.sqrt(np.clip(1 - z * z, 0.0, 1.0))
        th = 2 * np.pi * k / golden
        dirs = np.column_stack([r * np.cos(th), r * np.sin(th), z])
    support = ((fts.vertices - bary) @ dirs.T).max(axis=0)
    return bary + dirs * (support + 10.0 * h)[:, None]


@dataclass
class ConfirmationReport:
    constancy_spread: float
    max_cell_violation: float
    min_outside_margin: float
    oracle: OracleReport
    passed: bool = True


def confirm_ft_set(
    instance: Instance,
    fts: FTSet,
    spec: GridSpec | None = None,
    atol: float = EPS_ORACLE,
    ring_samples: int = 50,
) -> ConfirmationReport:
    """Grid-check a claimed solution set.

    (a) the objective is constant on samples of the set;
    (b) every grid argmin cell lies within 2h of the set;
    (c) points constructed at least 10h outside have strictly larger values.
    """
    report = grid_minimize(instance, spec, atol=atol)
    h = report.h

    inside = _sample_set_points(fts)
    vals = instance.objective_many(inside)
    spread = float(vals.max() - vals.min())
    alg_tol = instance.ball.tolerance * instance.scale * 1e4
    if spread > alg_tol:
        raise ConfirmationFailed(
            f"objective varies by {spread} across the claimed set"
        )

    cell_violation = 0.0
    if len(report.argmin_cells):
        viol = _set_violation(fts, report.argmin_cells)
        cell_violation = float(viol.max())
        if cell_violation > 2.0 * h:
            worst = report.argmin_cells[int(np.argmax(viol))]
            raise ConfirmationFailed(
                f"argmin cell {worst.tolist()} is {cell_violation} away from the set"
            )

    outside = _outside_samples(fts, h, ring_samples)
    margins = instance.objective_many(outside) - report.min_value
    min_margin = float(margins.min())
    if min_margin <= atol:
        worst = outside[int(np.argmin(margins))]
        raise ConfirmationFailed(
            f"point {worst.tolist()} outside the set is not worse (margin {min_margin})"
        )

    return ConfirmationReport(
        constancy_spread=spread,
        max_cell_violation=cell_violation,
        min_outside_margin=min_margin,
        oracle=report,
    )
