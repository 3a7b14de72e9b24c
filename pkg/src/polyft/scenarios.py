"""Built-in balls and scripted reproductions of the worked case studies."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import CaseFailed, NotCentrallySymmetric, UnknownBall
from .geometry import DEFAULT_TOLERANCE, PolytopeBall, build_ball

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0

BUILTIN_NAMES = (
    "manhattan2d",
    "square2d",
    "hexagon",
    "regular_mgon(m)",
    "cube",
    "octahedron",
    "dodecahedron",
    "icosahedron",
    "prism(m)",
)

_MGON_RE = re.compile(r"^regular_mgon\((\d+)\)$")
_PRISM_RE = re.compile(r"^prism\((\d+)\)$")


def _polygon_vertices(m: int) -> np.ndarray:
    ang = 2.0 * math.pi * np.arange(m) / m
    return np.column_stack([np.cos(ang), np.sin(ang)])


def _signs(d: int) -> np.ndarray:
    out = np.array(np.meshgrid(*([[-1.0, 1.0]] * d))).T.reshape(-1, d)
    return out


def _dodecahedron_vertices() -> np.ndarray:
    phi = GOLDEN
    pts = list(_signs(3))
    for a in (-1.0, 1.0):
        for b in (-1.0, 1.0):
            pts.append(np.array([0.0, a / phi, b * phi]))
            pts.append(np.array([a / phi, b * phi, 0.0]))
            pts.append(np.array([a * phi, 0.0, b / phi]))
    V = np.array(pts)
    return V / np.sqrt(3.0)  # unit circumradius


def _icosahedron_vertices() -> np.ndarray:
    phi = GOLDEN
    pts = []
    for a in (-1.0, 1.0):
        for b in (-1.0, 1.0):
            pts.append(np.array([0.0, a, b * phi]))
            pts.append(np.array([a, b * phi, 0.0]))
            pts.append(np.array([a * phi, 0.0, b]))
    V = np.array(pts)
    return V / np.linalg.norm(V[0])  # unit circumradius


def builtin_ball(name: str, tolerance: float = DEFAULT_TOLERANCE) -> PolytopeBall:
    """Construct a named ball; parameterized names look like ``prism(6)``."""
    key = name.strip().lower()
    if key == "tetrahedron":
        raise NotCentrallySymmetric(
            "the tetrahedron is not centrally symmetric and induces no norm"
        )
    if key == "manhattan2d":
        V = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    elif key == "square2d":
        V = _signs(2)
    elif key == "hexagon":
        V = _polygon_vertices(6)
    elif key == "cube":
        V = _signs(3)
    elif key == "octahedron":
        V = np.vstack([np.eye(3), -np.eye(3)])
    elif key == "dodecahedron":
        V = _dodecahedron_vertices()
    elif key == "icosahedron":
        V = _icosahedron_vertices()
    elif m := _MGON_RE.match(key):
        sides = int(m.group(1))
        if sides < 3:
            raise UnknownBall("regular_mgon needs m >= 3")
        V = _polygon_vertices(sides)
    elif m := _PRISM_RE.match(key):
        sides = int(m.group(1))
        if sides < 3:
            raise UnknownBall("prism needs m >= 3")
        base = _polygon_vertices(sides)
        V = np.vstack(
            [
                np.column_stack([base, np.ones(sides)]),
                np.column_stack([base, -np.ones(sides)]),
            ]
        )
    else:
        raise UnknownBall(f"unknown ball name {name!r}")
    # Odd polygons (and prisms over them) fail the symmetry validation below.
    return build_ball(V, tolerance=tolerance, name=key)


@dataclass(frozen=True)
class DodecahedronSection:
    """Closed-form data of the hexagonal cross-section through an equator edge.

    alpha is half the dihedral angle of the regular dodecahedron; beta is the
    tilt a supporting plane through the equator edge must exceed for the
    three-edge configuration to admit functionals summing to zero.
    """

    alpha: float
    beta: float
    a: float
    b: float
    c: float
    d: float

    @property
    def tan_beta(self) -> float:
        return 2.0 * self.d / (self.c + self.a / 2.0)


def dodecahedron_constants() -> DodecahedronSection:
    """Evaluate the section constants and assert their closed-form identities."""
    alpha = 0.5 * math.acos(-1.0 / math.sqrt(5.0))
    a = 1.0
    b = math.sqrt(5.0 + 2.0 * math.sqrt(5.0)) / 2.0
    c = b * math.cos(alpha)
    d = b * math.sin(alpha)
    tan_beta = 2.0 * d / (c + a / 2.0)
    beta = math.atan(tan_beta)
    section = DodecahedronSection(alpha=alpha, beta=beta, a=a, b=b, c=c, d=d)
    assert abs(tan_beta - 2.0) < 1e-12, "tan(beta) must simplify to 2"
    assert beta > alpha, "supporting plane tilt must exceed half the dihedral angle"
    # Cross-check the legs against their radical closed forms.
    assert abs(c - 0.5 * math.sqrt((3.0 + math.sqrt(5.0)) / 2.0)) < 1e-12
    assert abs(d - 0.5 * math.sqrt((7.0 + 3.0 * math.sqrt(5.0)) / 2.0)) < 1e-12
    return section


@dataclass
class CaseReport:
    """Outcome of one scripted case study."""

    name: str
    passed: bool
    details: dict[str, Any] = field(default_factory=dict)


_CASE_RE = re.compile(r"^prism_nonunique\((\d+)\)$")

CASE_NAMES = (
    "hexagon_triangle",
    "cube_segment",
    "octahedron_unique",
    "dodecahedron_segment",
    "prism_nonunique(m)",
)


def reproduce_case(name: str, rng_seed: int = 0) -> CaseReport:
    """Rebuild a documented configuration, run the pipeline, check the claim."""
    from . import cases  # local import: cases pulls in the full solver stack

    key = name.strip().lower()
    if key == "hexagon_triangle":
        return cases.hexagon_triangle()
    if key == "cube_segment":
        return cases.cube_segment()
    if key == "octahedron_unique":
        return cases.octahedron_unique(rng_seed=rng_seed)
    if key == "dodecahedron_segment":
        return cases.dodecahedron_segment()
    if m := _CASE_RE.match(key):
        return cases.prism_nonunique(int(m.group(1)))
    raise CaseFailed(f"unknown case {name!r}")
