"""Centrally symmetric polytope balls: hull, face lattice, gauge, duality.

Everything downstream (solver, consistency audit, oracle) consumes balls
built here. A ball is immutable after construction; all operations are pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDimension,
    InvalidInput,
    NotCentrallySymmetric,
    NotNorming,
    OriginNotInterior,
    ZeroVector,
)

DEFAULT_TOLERANCE = 1e-9

Vector = np.ndarray


def as_vector(x, dim: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(v)):
        raise InvalidInput("coordinates must be finite")
    if dim is not None and v.shape[0] != dim:
        raise InvalidInput(f"expected a {dim}-vector, got length {v.shape[0]}")
    return v


def _rank(M: np.ndarray, tol: float) -> int:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def affine_rank(points: np.ndarray, tol: float = DEFAULT_TOLERANCE) -> int:
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.shape[0] <= 1:
        return 0
    return _rank(P[1:] - P[0], tol)


def _row_basis(M: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis (rows) of the row space of M."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return np.zeros((0, M.shape[1]))
    U, s, Vt = np.linalg.svd(M)
    r = int(np.sum(s > tol * max(1.0, s[0])))
    return Vt[:r]


def _null_basis(M: np.ndarray, dim: int, tol: float) -> np.ndarray:
    """Orthonormal basis (rows) of the null space of M (viewed as rows)."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return np.eye(dim)
    U, s, Vt = np.linalg.svd(M)
    r = int(np.sum(s > tol * max(1.0, s[0])))
    return Vt[r:]


@dataclass(frozen=True, eq=False)
class Functional:
    """Linear functional x -> coeffs @ x; level set {phi = 1} is a hyperplane."""

    coeffs: np.ndarray

    def __call__(self, x) -> float:
        return float(self.coeffs @ np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Face:
    """Face of the unit sphere: vertex subset plus its affine dimension.

    ``dim`` is the affine dimension of the face (a vertex has dim 0; the
    linear span of a face of dim k has dimension k + 1).
    ``exposing_dual_face`` lists the facet indices whose functional is 1 on
    the whole face; their convex hull is the dual face.
    """

    vertex_ids: tuple[int, ...]
    dim: int
    exposing_dual_face: frozenset[int]

    def __repr__(self) -> str:  # compact, deterministic
        return f"Face(dim={self.dim}, verts={list(self.vertex_ids)})"


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace given by an orthonormal row basis."""

    basis: np.ndarray  # (dim, d)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def contains_line(self) -> bool:
        return self.dim >= 1


@dataclass(frozen=True, eq=False)
class DualFace:
    """All norming functionals of a direction, as a face of the dual ball."""

    generator_ids: tuple[int, ...]  # indices into ball.dual_vertices
    generators: np.ndarray  # (k, d) rows are functionals
    dim: int  # affine dimension of the dual face
    contact_face: Face  # primal face the direction points into

    @property
    def is_unique(self) -> bool:
        return len(self.generator_ids) == 1


class PolytopeBall:
    """Unit ball of a polyhedral norm, with full face lattice.

    Immutable after construction; build through :func:`build_ball`.
    """

    def __init__(
        self,
        dim: int,
        vertices: np.ndarray,
        facet_coeffs: np.ndarray,
        facet_vertex_ids: tuple[tuple[int, ...], ...],
        faces: tuple[Face, ...],
        tolerance: float,
        warnings: tuple[str, ...] = (),
        name: str | None = None,
    ):
        self.dim = dim
        self.vertices = vertices
        self.facet_coeffs = facet_coeffs
        self.facet_vertex_ids = facet_vertex_ids
        self.faces = faces
        self.tolerance = tolerance
        self.warnings = warnings
        self.name = name
        self.vertices.setflags(write=False)
        self.facet_coeffs.setflags(write=False)
        self._face_index = {frozenset(f.vertex_ids): i for i, f in enumerate(faces)}
        self._faces_by_dim: dict[int, tuple[Face, ...]] = {}
        for k in range(dim):
            self._faces_by_dim[k] = tuple(f for f in faces if f.dim == k)
        self.scale = float(np.abs(vertices).max())
        self._antipode = self._build_antipode()
        self._cache: dict = {}

    # -- basic structure ---------------------------------------------------

    def _build_antipode(self) -> np.ndarray:
        V = self.vertices
        out = np.full(len(V), -1, dtype=int)
        tol = self.tolerance * max(1.0, self.scale) * 10.0
        for i, v in enumerate(V):
            d = np.abs(V + v).max(axis=1)
            j = int(np.argmin(d))
            if d[j] <= tol:
                out[i] = j
        if np.any(out < 0):
            raise NotCentrallySymmetric("vertex without antipode")
        return out

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_facets(self) -> int:
        return len(self.facet_coeffs)

    @property
    def facets(self) -> tuple[Functional, ...]:
        return tuple(Functional(row) for row in self.facet_coeffs)

    @property
    def dual_vertices(self) -> np.ndarray:
        """Vertices of the dual ball = facet functionals of this ball."""
        return self.facet_coeffs

    def faces_of_dim(self, k: int) -> tuple[Face, ...]:
        return self._faces_by_dim.get(k, ())

    def face_by_vertex_ids(self, ids) -> Face:
        key = frozenset(int(i) for i in ids)
        if key not in self._face_index:
            raise InvalidInput(f"vertex set {sorted(key)} is not a face")
        return self.faces[self._face_index[key]]

    def is_face(self, ids) -> bool:
        return frozenset(int(i) for i in ids) in self._face_index

    def face_index(self, face: Face) -> int:
        return self._face_index[frozenset(face.vertex_ids)]

    def antipodal_vertex(self, i: int) -> int:
        return int(self._antipode[i])

    # -- gauge and duality -------------------------------------------------

    def gauge(self, x) -> float:
        """Minkowski gauge of the ball = the norm it induces."""
        return float(np.max(self.facet_coeffs @ as_vector(x, self.dim)))

    def gauge_many(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.max(X @ self.facet_coeffs.T, axis=-1)

    def dual_norm(self, phi) -> float:
        """Dual norm = support function of the ball = max over vertices."""
        return float(np.max(self.vertices @ as_vector(phi, self.dim)))

    def __repr__(self) -> str:
        label = self.name or "ball"
        return (
            f"PolytopeBall({label}, d={self.dim}, V={self.num_vertices}, "
            f"F={self.num_facets})"
        )


# -- hull construction -----------------------------------------------------


def _dedupe_points(P: np.ndarray, tol: float) -> tuple[np.ndarray, int]:
    keep: list[np.ndarray] = []
    scale = max(1.0, float(np.abs(P).max()))
    for p in P:
        if not any(np.abs(p - q).max() <= tol * scale * 10.0 for q in keep):
            keep.append(p)
    return np.array(keep), len(P) - len(keep)


def _hull_2d_ids(P: np.ndarray, tol: float) -> list[int]:
    """Andrew's monotone chain; returns hull vertex indices in CCW order."""
    scale = max(1.0, float(np.abs(P).max()))
    eps = tol * scale * scale * 10.0
    order = sorted(range(len(P)), key=lambda i: (P[i, 0], P[i, 1]))

    def cross(o, a, b):
        return (P[a, 0] - P[o, 0]) * (P[b, 1] - P[o, 1]) - (P[a, 1] - P[o, 1]) * (
            P[b, 0] - P[o, 0]
        )

    def build(seq):
        out: list[int] = []
        for i in seq:
            while len(out) >= 2 and cross(out[-2], out[-1], i) <= eps:
                out.pop()
            out.append(i)
        return out

    lower = build(order)
    upper = build(reversed(order))
    return lower[:-1] + upper[:-1]


def _facet_candidates_nd(P: np.ndarray, d: int, tol: float):
    """Facets via support sets of candidate normals from d-point subsets."""
    n = len(P)
    combos = itertools.combinations(range(n), d)
    total = 1
    for k in range(d):
        total = total * (n - k) // (k + 1)
    if total > 500_000:
        raise InvalidInput("too many vertices for facet enumeration at this dimension")
    scale = max(1.0, float(np.abs(P).max()))
    normals: list[np.ndarray] = []
    if d == 3:
        idx = np.array(list(combos), dtype=int)
        a = P[idx[:, 1]] - P[idx[:, 0]]
        b = P[idx[:, 2]] - P[idx[:, 0]]
        ns = np.cross(a, b)
        lens = np.linalg.norm(ns, axis=1)
        ok = lens > tol * scale * scale * 100.0
        normals = list(ns[ok] / lens[ok, None])
    else:
        for combo in combos:
            A = P[list(combo[1:])] - P[combo[0]]
            nb = _null_basis(A, d, tol)
            if nb.shape[0] == 1:
                normals.append(nb[0])
    seen: dict[frozenset, np.ndarray] = {}
    for n0 in normals:
        for nrm in (n0, -n0):
            sup = P @ nrm
            h = sup.max()
            active = np.nonzero(sup >= h - tol * scale * 100.0)[0]
            if len(active) < d:
                continue
            key = frozenset(int(i) for i in active)
            if key in seen:
                continue
            if affine_rank(P[active], tol) == d - 1:
                seen[key] = nrm
    return seen  # {active vertex set -> outward unit normal}


def _face_lattice(
    facet_sets: list[frozenset[int]], num_vertices: int, dim: int
) -> list[frozenset[int]]:
    """All proper nonempty faces as vertex sets: closure under intersection."""
    closed: set[frozenset[int]] = set(facet_sets)
    queue = list(facet_sets)
    while queue:
        s = queue.pop()
        for f in facet_sets:
            t = s & f
            if t and t not in closed:
                closed.add(t)
                queue.append(t)
    for i in range(num_vertices):
        closed.add(frozenset([i]))
    return sorted(closed, key=lambda s: (len(s), sorted(s)))


def build_ball(
    vertices,
    tolerance: float = DEFAULT_TOLERANCE,
    name: str | None = None,
) -> PolytopeBall:
    """Validate a vertex set and assemble the unit ball it spans.

    Duplicate vertices and points interior to the hull are dropped with a
    warning record. Raises on non-symmetric or degenerate input.
    """
    P = np.asarray(vertices, dtype=float)
    if P.ndim != 2:
        raise InvalidInput("vertices must be a 2-d array of points")
    k, d = P.shape
    if d < 2:
        raise InvalidInput("dimension must be at least 2")
    if not np.all(np.isfinite(P)):
        raise InvalidInput("vertex coordinates must be finite")
    if k < 2 * d:
        raise InvalidInput(f"need at least {2 * d} vertices in dimension {d}")

    warnings: list[str] = []
    P, dropped_dupes = _dedupe_points(P, tolerance)
    if dropped_dupes:
        warnings.append(f"dropped {dropped_dupes} duplicate vertices")

    if affine_rank(P, tolerance) < d:
        raise DegenerateDimension("affine hull of the vertices is lower-dimensional")

    scale = max(1.0, float(np.abs(P).max()))

    if d == 2:
        hull_ids = _hull_2d_ids(P, tolerance)
        hull = P[hull_ids]
        m = len(hull)
        facet_map: dict[frozenset, np.ndarray] = {}
        for t in range(m):
            a, b = hull[t], hull[(t + 1) % m]
            e = b - a
            nrm = np.array([e[1], -e[0]])
            nrm /= np.linalg.norm(nrm)
            sup = hull @ nrm
            h = sup.max()
            active = frozenset(int(i) for i in np.nonzero(sup >= h - tolerance * scale * 100.0)[0])
            facet_map[active] = nrm
    else:
        cand = _facet_candidates_nd(P, d, tolerance)
        on_hull = sorted(set().union(*cand.keys())) if cand else []
        hull = P[on_hull]
        remap = {old: new for new, old in enumerate(on_hull)}
        facet_map = {
            frozenset(remap[i] for i in key): nrm for key, nrm in cand.items()
        }

    if len(hull) < len(P):
        warnings.append(f"dropped {len(P) - len(hull)} interior points")

    # Canonical vertex order: lexicographic on rounded coordinates.
    order = sorted(range(len(hull)), key=lambda i: tuple(np.round(hull[i], 9)))
    rank_of = {old: new for new, old in enumerate(order)}
    V = np.array([hull[i] for i in order])
    facet_map = {
        frozenset(rank_of[i] for i in key): nrm for key, nrm in facet_map.items()
    }

    # Central symmetry of the hull vertex set.
    for v in V:
        if np.abs(V + v).max(axis=1).min() > tolerance * scale * 10.0:
            raise NotCentrallySymmetric(
                f"vertex {v.tolist()} has no antipodal counterpart"
            )

    # Origin strictly interior, then normalize functionals to level 1.
    facet_sets = sorted(facet_map, key=lambda s: sorted(s))
    coeff_rows = []
    facet_ids: list[tuple[int, ...]] = []
    for key in facet_sets:
        nrm = facet_map[key]
        h = float(np.max(V @ nrm))
        if h <= tolerance * scale * 10.0:
            raise OriginNotInterior("a facet hyperplane passes through the origin")
        coeff_rows.append(nrm / h)
        facet_ids.append(tuple(sorted(key)))
    coeffs = np.array(coeff_rows)

    # Every vertex must support at least one facet at level 1.
    levels = V @ coeffs.T
    vert_tol = tolerance * max(1.0, scale) * 100.0
    if not np.all(np.max(levels, axis=1) >= 1.0 - vert_tol):
        raise InvalidInput("hull vertex misses every facet hyperplane")

    face_sets = _face_lattice([frozenset(ids) for ids in facet_ids], len(V), d)
    vert_to_facets: dict[int, set[int]] = {i: set() for i in range(len(V))}
    for j, ids in enumerate(facet_ids):
        for i in ids:
            vert_to_facets[i].add(j)

    faces = []
    for s in face_sets:
        ids = tuple(sorted(s))
        exposing = frozenset(set.intersection(*(vert_to_facets[i] for i in ids)))
        fdim = affine_rank(V[list(ids)], tolerance)
        if fdim >= d:
            raise InvalidInput("face lattice produced a full-dimensional face")
        faces.append(Face(ids, fdim, exposing))
    faces.sort(key=lambda f: (f.dim, f.vertex_ids))

    ball = PolytopeBall(
        dim=d,
        vertices=V,
        facet_coeffs=coeffs,
        facet_vertex_ids=tuple(facet_ids),
        faces=tuple(faces),
        tolerance=tolerance,
        warnings=tuple(warnings),
        name=name,
    )
    _validate_exposure(ball)
    return ball


def _validate_exposure(ball: PolytopeBall) -> None:
    """Each face's canonical exposer must be 1 on the face, < 1 elsewhere."""
    V = ball.vertices
    tol = ball.tolerance * max(1.0, ball.scale) * 100.0
    for face in ball.faces:
        phi = strict_exposer(ball, face)
        vals = V @ phi
        ids = list(face.vertex_ids)
        if np.abs(vals[ids] - 1.0).max() > tol:
            raise InvalidInput("exposing functional is not at level 1 on its face")
        others = np.setdiff1d(np.arange(len(V)), ids)
        if others.size and vals[others].max() >= 1.0 - tol:
            raise InvalidInput("exposing functional touches vertices outside the face")


# -- norm-level operations --------------------------------------------------


def norm(ball: PolytopeBall, x) -> float:
    """Polyhedral norm of x = max over facet functionals (Minkowski gauge)."""
    return ball.gauge(x)


def dual_norm(ball: PolytopeBall, phi) -> float:
    return ball.dual_norm(phi)


def norming_functionals(ball: PolytopeBall, x) -> DualFace:
    """The set of norming functionals of x, as a face of the dual ball.

    Returned as its dual-vertex generators (the facet functionals active at
    x). The functional is unique exactly when x points into the relative
    interior of a facet.
    """
    v = as_vector(x, ball.dim)
    nx = ball.gauge(v)
    if nx <= ball.tolerance * max(1.0, ball.scale):
        raise ZeroVector("the zero vector has no norming functional")
    sup = ball.facet_coeffs @ v
    active = np.nonzero(sup >= nx - ball.tolerance * max(1.0, nx) * 100.0)[0]
    ids = tuple(int(i) for i in active)
    gens = ball.facet_coeffs[active]
    contact = frozenset.intersection(
        *(frozenset(ball.facet_vertex_ids[i]) for i in ids)
    )
    face = ball.face_by_vertex_ids(contact)
    return DualFace(
        generator_ids=ids,
        generators=gens,
        dim=affine_rank(gens, ball.tolerance),
        contact_face=face,
    )


def face_of_functional(ball: PolytopeBall, phi) -> Face:
    """The face of the sphere exposed by a dual-norm-one functional."""
    p = as_vector(phi, ball.dim)
    dn = ball.dual_norm(p)
    tol = ball.tolerance * max(1.0, ball.scale) * 100.0
    if abs(dn - 1.0) > tol:
        raise NotNorming(f"dual norm is {dn}, expected 1")
    vals = ball.vertices @ p
    ids = np.nonzero(vals >= 1.0 - tol)[0]
    return ball.face_by_vertex_ids(ids)


def strict_exposer(ball: PolytopeBall, face: Face) -> np.ndarray:
    """A functional whose level-1 hyperplane meets the sphere exactly in face.

    The barycenter of the dual-face generators works: it is 1 on the face and
    strictly below 1 on every other vertex.
    """
    gens = ball.facet_coeffs[sorted(face.exposing_dual_face)]
    return gens.mean(axis=0)


def dual_face_generators(ball: PolytopeBall, face: Face) -> np.ndarray:
    """Generators (dual vertices) of the dual face of a primal face."""
    return ball.facet_coeffs[sorted(face.exposing_dual_face)]


# -- linear spans ------------------------------------------------------------


def linear_span(ball: PolytopeBall, face: Face) -> Subspace:
    """Linear span of the points of a face (dimension = face.dim + 1)."""
    return Subspace(_row_basis(ball.vertices[list(face.vertex_ids)], ball.tolerance))


def intersect_subspaces(subspaces, dim: int, tol: float = DEFAULT_TOLERANCE) -> Subspace:
    """Intersection of linear subspaces via orthogonal complements."""
    comps = []
    for s in subspaces:
        basis = s.basis if isinstance(s, Subspace) else np.atleast_2d(s)
        comps.append(_null_basis(basis, dim, tol))
    if not comps:
        return Subspace(np.eye(dim))
    stacked = np.vstack(comps)
    return Subspace(_null_basis(stacked, dim, tol))


def span(faces, ball: PolytopeBall) -> Subspace:
    """Intersection of the linear spans of the given faces."""
    return intersect_subspaces(
        [linear_span(ball, f) for f in faces], ball.dim, ball.tolerance
    )
