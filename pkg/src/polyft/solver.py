"""Fermat-Torricelli solving for polyhedral norms.

Pipeline: an LP reformulation finds one minimizer, norming-functional
certificates prove optimality, and intersecting the certificate cones
produces the complete solution set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CoincidentSite,
    EmptyIntersection,
    InvalidInput,
    LPFailure,
    NotCollinear,
    UnboundedIntersection,
)
from .geometry import (
    DEFAULT_TOLERANCE,
    Face,
    PolytopeBall,
    affine_rank,
    as_vector,
    face_of_functional,
    norming_functionals,
    _null_basis,
    _row_basis,
)
from .lp import solve_lp, solve_lp_mixed

EPS_HAUSDORFF = 1e-6

TAG_FOR_DIM = {0: "point", 1: "segment", 2: "polygon", 3: "solid"}


@dataclass(frozen=True, eq=False)
class Instance:
    """A ball plus the sites whose summed distance is minimized."""

    ball: PolytopeBall
    sites: np.ndarray

    def __post_init__(self):
        sites = np.atleast_2d(np.asarray(self.sites, dtype=float))
        if sites.shape[0] < 1 or sites.shape[1] != self.ball.dim:
            raise InvalidInput("sites must be a nonempty list of d-vectors")
        if not np.all(np.isfinite(sites)):
            raise InvalidInput("site coordinates must be finite")
        object.__setattr__(self, "sites", sites)
        sites.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.sites)

    @property
    def dim(self) -> int:
        return self.ball.dim

    @property
    def scale(self) -> float:
        return max(1.0, float(np.abs(self.sites).max()), self.ball.scale)

    def duplicate_groups(self) -> list[tuple[int, ...]]:
        """Groups of coinciding sites (flagged, not an error)."""
        tol = self.ball.tolerance * self.scale * 10.0
        groups: list[list[int]] = []
        for i, s in enumerate(self.sites):
            for g in groups:
                if np.abs(self.sites[g[0]] - s).max() <= tol:
                    g.append(i)
                    break
            else:
                groups.append([i])
        return [tuple(g) for g in groups if len(g) > 1]

    def objective(self, x) -> float:
        x = as_vector(x, self.dim)
        return float(np.sum(self.ball.gauge_many(x[None, :] - self.sites)))

    def objective_many(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        total = np.zeros(X.shape[0])
        for s in self.sites:
            total += self.ball.gauge_many(X - s)
        return total


@dataclass(frozen=True, eq=False)
class FTCertificate:
    """Norming functionals summing to zero, witnessing optimality of a point.

    ``mode`` is "exact" for the textbook condition (base point distinct from
    every site) and "subdifferential" when the base point coincides with m
    sites, in which case the sum of the remaining functionals only needs dual
    norm at most m.
    """

    base_point: np.ndarray
    site_indices: tuple[int, ...]
    functionals: np.ndarray  # one row per entry of site_indices
    coincident: tuple[int, ...]
    residual: float  # max(0, dual_norm(sum) - multiplicity)
    slack: float  # min margin before a functional violates its norming equalities
    mode: str


@dataclass(frozen=True, eq=False)
class Refutation:
    """Proof that no valid functional family exists at the base point."""

    base_point: np.ndarray
    margin: float  # best achievable dual-norm excess, > 0


@dataclass(frozen=True, eq=False)
class Cone:
    """C(x, phi) = x - {a : phi(a) = |a|}: the translated reflected cone
    over the face of the sphere exposed by phi."""

    apex: np.ndarray
    generators: np.ndarray  # negated face vertices
    face: Face
    functional: np.ndarray
    normals: np.ndarray  # halfspace rows: normals @ y <= offsets
    offsets: np.ndarray

    @property
    def affine_dim(self) -> int:
        return _row_basis(self.generators, 1e-9).shape[0]


@dataclass(eq=False)
class FTSet:
    """The full solution set: a bounded polyhedron with a classification."""

    vertices: np.ndarray
    affine_dim: int
    tag: str
    objective_value: float
    certificate: FTCertificate | None = None
    halfspaces: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    def barycenter(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def distance_to(self, x, tol: float = DEFAULT_TOLERANCE) -> float:
        """Chebyshev (L-infinity) distance from x to the set, via a small LP."""
        x = as_vector(x, self.vertices.shape[1])
        k, d = self.vertices.shape
        # vars: lambda (k), s; minimize s subject to |x - V^T lambda| <= s.
        c = np.zeros(k + 1)
        c[-1] = 1.0
        A_ub = np.zeros((2 * d, k + 1))
        b_ub = np.zeros(2 * d)
        for j in range(d):
            A_ub[j, :k] = self.vertices[:, j]
            A_ub[j, -1] = -1.0
            b_ub[j] = x[j]
            A_ub[d + j, :k] = -self.vertices[:, j]
            A_ub[d + j, -1] = -1.0
            b_ub[d + j] = -x[j]
        A_eq = np.zeros((1, k + 1))
        A_eq[0, :k] = 1.0
        res = solve_lp(c, A_ub, b_ub, A_eq, np.array([1.0]))
        if not res.optimal:
            raise LPFailure("distance LP failed")
        return float(res.value)

    def contains(self, x, tol: float = 1e-7) -> bool:
        return self.distance_to(x) <= tol


# -- one minimizer via the LP reformulation ---------------------------------


def _lift_rows(instance: Instance):
    """Rows of phi_f(x - s_i) <= t_i over variables (x, t)."""
    ball, sites = instance.ball, instance.sites
    d, n, F = ball.dim, instance.n, ball.num_facets
    A = np.zeros((n * F, d + n))
    b = np.zeros(n * F)
    for i in range(n):
        rows = slice(i * F, (i + 1) * F)
        A[rows, :d] = ball.facet_coeffs
        A[rows, d + i] = -1.0
        b[rows] = ball.facet_coeffs @ sites[i]
    return A, b


def find_ft_point(instance: Instance) -> tuple[np.ndarray, float]:
    """One global minimizer of the summed distance, by linear programming.

    minimize sum t_i subject to t_i >= phi_f(x - x_i) for every facet
    functional phi_f; x free, t_i >= 0.
    """
    d, n = instance.dim, instance.n
    A, b = _lift_rows(instance)
    c = np.concatenate([np.zeros(d), np.ones(n)])
    free = np.concatenate([np.ones(d, dtype=bool), np.zeros(n, dtype=bool)])
    res = solve_lp_mixed(c, A, b, free=free)
    if not res.optimal:
        raise LPFailure(f"distance LP ended with status {res.status}")
    x = res.x[:d]
    value = instance.objective(x)
    if abs(value - res.value) > 1e-7 * (1.0 + abs(value)):
        raise LPFailure("LP optimum does not match the objective at its point")
    return x, value


def _optimal_face_probe(instance: Instance, value: float) -> np.ndarray:
    """Extreme points of the LP-optimal face along +-each coordinate axis.

    The face is enlarged only by the simplex's own accuracy (~1e-13
    relative); a loose enlargement here would smear a singleton face into an
    apparent segment and derail the base-point selection.
    """
    d, n = instance.dim, instance.n
    A, b = _lift_rows(instance)
    row = np.concatenate([np.zeros(d), np.ones(n)])
    slack = 1e-11 * (1.0 + abs(value))
    A2 = np.vstack([A, row])
    b2 = np.concatenate([b, [value + slack]])
    free = np.concatenate([np.ones(d, dtype=bool), np.zeros(n, dtype=bool)])
    points = []
    for j in range(d):
        for sign in (1.0, -1.0):
            c = np.zeros(d + n)
            c[j] = -sign
            res = solve_lp_mixed(c, A2, b2, free=free)
            if not res.optimal:
                raise LPFailure("optimal-face probe LP failed")
            points.append(res.x[:d])
    return np.array(points)


# -- certificates ------------------------------------------------------------


def verify_ft_point(
    instance: Instance, x0, allow_coincident: bool = True
) -> FTCertificate | Refutation:
    """Decide optimality of x0 by a feasibility LP over the dual faces.

    Searches phi_i in the set of norming functionals of x_i - x0 minimizing
    the dual norm of the sum. Sites coinciding with x0 contribute the whole
    dual ball (subdifferential extension); with m such sites the sum of the
    remaining functionals may have dual norm up to m.
    """
    ball = instance.ball
    x0 = as_vector(x0, instance.dim)
    tol = ball.tolerance * instance.scale * 10.0
    others: list[int] = []
    coincident: list[int] = []
    for i, s in enumerate(instance.sites):
        if np.abs(s - x0).max() <= tol:
            coincident.append(i)
        else:
            others.append(i)
    if coincident and not allow_coincident:
        raise CoincidentSite(f"query point coincides with sites {coincident}")

    m = len(coincident)
    if not others:
        # All sites equal x0: trivially optimal.
        return FTCertificate(
            base_point=x0,
            site_indices=(),
            functionals=np.zeros((0, instance.dim)),
            coincident=tuple(coincident),
            residual=0.0,
            slack=ball.tolerance,
            mode="subdifferential" if m else "exact",
        )

    duals = [norming_functionals(ball, instance.sites[i] - x0) for i in others]
    gens = [df.generators for df in duals]
    sizes = [len(g) for g in gens]
    nvar = sum(sizes) + 1  # lambdas plus the dual-norm bound s
    offsets = np.cumsum([0] + sizes)

    V = ball.vertices
    A_ub = np.zeros((len(V), nvar))
    for k, g in enumerate(gens):
        A_ub[:, offsets[k]:offsets[k + 1]] = V @ g.T
    A_ub[:, -1] = -1.0
    b_ub = np.zeros(len(V))

    A_eq = np.zeros((len(others), nvar))
    for k in range(len(others)):
        A_eq[k, offsets[k]:offsets[k + 1]] = 1.0
    b_eq = np.ones(len(others))

    c = np.zeros(nvar)
    c[-1] = 1.0
    res = solve_lp(c, A_ub, b_ub, A_eq, b_eq)
    if not res.optimal:
        raise LPFailure(f"certificate LP ended with status {res.status}")
    s_star = float(res.value)

    cert_tol = ball.tolerance * instance.scale * 100.0 * (1 + len(others))
    if s_star > m + cert_tol:
        return Refutation(base_point=x0, margin=s_star - m)

    functionals = np.array(
        [res.x[offsets[k]:offsets[k + 1]] @ g for k, g in enumerate(gens)]
    )
    violation = 0.0
    for k, i in enumerate(others):
        z = instance.sites[i] - x0
        phi = functionals[k]
        violation = max(
            violation,
            abs(ball.dual_norm(phi) - 1.0),
            abs(float(phi @ z) - ball.gauge(z)) / max(1.0, ball.gauge(z)),
        )
    return FTCertificate(
        base_point=x0,
        site_indices=tuple(others),
        functionals=functionals,
        coincident=tuple(coincident),
        residual=max(0.0, s_star - m),
        slack=cert_tol - violation,
        mode="subdifferential" if m else "exact",
    )


# -- cones -------------------------------------------------------------------


def _cone_halfspaces(apex: np.ndarray, gens: np.ndarray, tol: float):
    """H-representation {y : N y <= c} of apex + cone(gens), a pointed cone."""
    d = gens.shape[1]
    rows: list[np.ndarray] = []
    span = _row_basis(gens, tol)
    r = span.shape[0]
    for nrm in _null_basis(gens, d, tol):
        rows.append(nrm)
        rows.append(-nrm)
    if r == 1:
        u = gens[0] / np.linalg.norm(gens[0])
        rows.append(-u)
    elif r == 2:
        W = gens @ span.T  # (k, 2) coordinates inside the span
        unit = W / np.linalg.norm(W, axis=1, keepdims=True)
        ref = unit.sum(axis=0)
        ref /= np.linalg.norm(ref)
        ang = np.arctan2(
            unit[:, 1] * ref[0] - unit[:, 0] * ref[1],
            unit @ ref,
        )
        lo, hi = int(np.argmin(ang)), int(np.argmax(ang))
        for k, other in ((lo, hi), (hi, lo)):
            w = W[k]
            m = np.array([w[1], -w[0]])
            if m @ W[other] > 0:
                m = -m
            rows.append(m @ span)
    elif r == 3:
        center = gens.mean(axis=0)
        plane = _row_basis(gens - center, tol)
        xy = (gens - center) @ plane.T
        order = np.argsort(np.arctan2(xy[:, 1], xy[:, 0]))
        k = len(order)
        for t in range(k):
            g1, g2 = gens[order[t]], gens[order[(t + 1) % k]]
            nrm = np.cross(g1, g2)
            ln = np.linalg.norm(nrm)
            if ln <= tol * 100.0:
                continue
            nrm /= ln
            if nrm @ center > 0:
                nrm = -nrm
            rows.append(nrm)
    else:
        raise InvalidInput("cone generators span more than three dimensions")
    N = np.array(rows)
    lens = np.linalg.norm(N, axis=1)
    N = N / lens[:, None]
    return N, N @ apex


def cone(ball: PolytopeBall, x, phi) -> Cone:
    """Build C(x, phi) = x - {a : phi(a) = |a|} for a norming functional."""
    x = as_vector(x, ball.dim)
    phi = as_vector(phi, ball.dim)
    face = face_of_functional(ball, phi)  # raises NotNorming if needed
    gens = -ball.vertices[list(face.vertex_ids)]
    N, c = _cone_halfspaces(x, gens, ball.tolerance)
    return Cone(
        apex=x, generators=gens, face=face, functional=phi, normals=N, offsets=c
    )


# -- cone intersection --------------------------------------------------------


def _dedupe_rows(A: np.ndarray, b: np.ndarray):
    seen = {}
    for row, off in zip(A, b):
        key = tuple(np.round(row, 9)) + (round(off, 9),)
        if key not in seen:
            seen[key] = (row, off)
    rows = list(seen.values())
    return np.array([r for r, _ in rows]), np.array([o for _, o in rows])


def _cluster_points(P: np.ndarray, tol: float) -> np.ndarray:
    out: list[np.ndarray] = []
    for p in P:
        for q in out:
            if np.abs(p - q).max() <= tol:
                break
        else:
            out.append(p)
    return np.array(out)


def _order_polygon(P: np.ndarray, tol: float) -> np.ndarray:
    center = P.mean(axis=0)
    basis = _row_basis(P - center, tol)
    xy = (P - center) @ basis.T
    order = np.argsort(np.arctan2(xy[:, 1], xy[:, 0]))
    P = P[order]
    start = min(range(len(P)), key=lambda i: tuple(np.round(P[i], 9)))
    return np.vstack([P[start:], P[:start]])


def intersect_cones(
    cones,
    instance: Instance | None = None,
    tolerance: float | None = None,
) -> FTSet:
    """Intersect certificate cones into the full solution set.

    Vertices are enumerated brute-force from d-subsets of the halfspace rows
    (fine at desk scale). The result must be bounded and nonempty; violations
    signal an invalid certificate or a numerical failure upstream.
    """
    cones = list(cones)
    if not cones:
        raise InvalidInput("need at least one cone")
    d = cones[0].apex.shape[0]
    tol = tolerance if tolerance is not None else DEFAULT_TOLERANCE

    A = np.vstack([c.normals for c in cones])
    b = np.concatenate([c.offsets for c in cones])
    A, b = _dedupe_rows(A, b)

    # Generous bounding box; any vertex landing on it means unbounded.
    apexes = np.array([c.apex for c in cones])
    if instance is not None:
        R = instance.objective(instance.sites[0])
        rho = max(1.0, float(np.abs(instance.ball.vertices).max()))
        half = rho * (2.0 * R / instance.n + 1.0) * 2.0 + 1.0
        center = instance.sites[0]
    else:
        half = 10.0 * (1.0 + float(np.abs(apexes).max()))
        center = apexes.mean(axis=0)
    box_A = np.vstack([np.eye(d), -np.eye(d)])
    box_b = np.concatenate([center + half, half - center])
    A_all = np.vstack([A, box_A])
    b_all = np.concatenate([b, box_b])

    m = len(A_all)
    scale = max(1.0, float(np.abs(apexes).max()), half)
    feas_tol = tol * scale * 1000.0

    candidates = []
    for subset in itertools.combinations(range(m), d):
        M = A_all[list(subset)]
        s = np.linalg.svd(M, compute_uv=False)
        if s[-1] <= 1e-8 * max(1.0, s[0]):
            continue
        x = np.linalg.solve(M, b_all[list(subset)])
        if np.all(A_all @ x <= b_all + feas_tol):
            candidates.append((x, subset))
    if not candidates:
        raise EmptyIntersection("cones share no common point")

    pts = _cluster_points(np.array([x for x, _ in candidates]), feas_tol * 10.0)

    # Unboundedness: a genuine vertex sits strictly inside the box.
    box_hit = np.max(box_A @ pts.T - box_b[:, None], axis=0) >= -feas_tol
    if np.any(box_hit):
        raise UnboundedIntersection("cone intersection reaches the bounding box")

    dim = affine_rank(pts, tol)
    if dim == 0:
        verts = pts[:1]
    elif dim == 1:
        u = _row_basis(pts - pts.mean(axis=0), tol)[0]
        t = (pts - pts[0]) @ u
        verts = np.array([pts[int(np.argmin(t))], pts[int(np.argmax(t))]])
        verts = verts[np.lexsort(np.round(verts, 9).T[::-1])]
    elif dim == 2:
        verts = _order_polygon(pts, tol)
    else:
        verts = pts[np.lexsort(np.round(pts, 9).T[::-1])]

    objective_value = float("nan")
    if instance is not None:
        vals = instance.objective_many(verts)
        objective_value = float(vals.min())
        drift = float(vals.max() - vals.min())
        if drift > tol * instance.scale * 1e4 * (1.0 + abs(objective_value)):
            raise LPFailure(f"objective drifts by {drift} across the solution set")

    return FTSet(
        vertices=verts,
        affine_dim=dim,
        tag=TAG_FOR_DIM[dim],
        objective_value=objective_value,
        halfspaces=(A, b),
    )


# -- the full locus ------------------------------------------------------------


def _point_ftset(instance: Instance, p: np.ndarray, cert) -> FTSet:
    return FTSet(
        vertices=np.array([p]),
        affine_dim=0,
        tag="point",
        objective_value=instance.objective(p),
        certificate=cert,
    )


def ft_locus(instance: Instance) -> FTSet:
    """The complete solution set, via certificate cones.

    Finds a base point by LP; if that lands on a site, probes the LP-optimal
    face for an interior base point (the cone theorem requires a base point
    distinct from every site), or returns the singleton set when the site is
    the unique minimizer.
    """
    ball = instance.ball
    p, value = find_ft_point(instance)
    tol = ball.tolerance * instance.scale * 10.0

    def on_site(q) -> bool:
        return bool(np.min(np.abs(instance.sites - q).max(axis=1)) <= tol)

    if on_site(p):
        probes = _optimal_face_probe(instance, value)
        spread = np.abs(probes - p).max()
        if spread <= tol * 10.0:
            cert = verify_ft_point(instance, p)
            if isinstance(cert, Refutation):
                raise LPFailure("LP optimum refuted by its own certificate")
            return _point_ftset(instance, p, cert)
        q = probes.mean(axis=0)
        if on_site(q):
            for probe in probes:
                q2 = 0.7 * q + 0.3 * probe
                if not on_site(q2):
                    q = q2
                    break
            else:
                raise LPFailure("could not find a base point off the sites")
        p = q

    cert = verify_ft_point(instance, p)
    if isinstance(cert, Refutation):
        raise LPFailure(
            f"certificate LP refuted the computed minimizer (margin {cert.margin})"
        )
    cones = [
        cone(ball, instance.sites[i], cert.functionals[k])
        for k, i in enumerate(cert.site_indices)
    ]
    fts = intersect_cones(cones, instance=instance)
    fts.certificate = cert
    # The base point must be inside the computed set.
    Ah, bh = fts.halfspaces
    if np.max(Ah @ p - bh) > tol * 1000.0:
        raise LPFailure("base point fell outside the intersected cones")
    return fts


def collinear_ft(instance: Instance) -> FTSet:
    """Fast path for sites on one line: middle site, or the middle segment.

    Serves as an independent check of the cone pipeline. The odd-count answer
    (the middle site) is the full solution set for every polyhedral norm. The
    even-count middle segment is the full set only when the line direction
    exposes a vertex of the ball; otherwise the set is the larger metric
    interval between the two middle sites and this fast path returns a proper
    subset (for example, two sites on a diagonal of the Manhattan plane have
    an entire rectangle of solutions).
    """
    sites = instance.sites
    n = instance.n
    tol = instance.ball.tolerance * instance.scale * 100.0
    if n == 1:
        return _point_ftset(instance, sites[0], None)
    center = sites.mean(axis=0)
    if affine_rank(sites, instance.ball.tolerance) > 1:
        raise NotCollinear("sites do not lie on one straight line")
    basis = _row_basis(sites - center, instance.ball.tolerance)
    if basis.shape[0] == 0:  # all sites coincide
        return _point_ftset(instance, sites[0], None)
    u = basis[0]
    t = (sites - center) @ u
    residual = np.abs((sites - center) - np.outer(t, u)).max()
    if residual > tol:
        raise NotCollinear("sites deviate from the fitted line")
    order = np.argsort(t, kind="stable")
    if n % 2 == 1:
        mid = sites[order[n // 2]]
        return _point_ftset(instance, mid, None)
    a = sites[order[n // 2 - 1]]
    b = sites[order[n // 2]]
    if np.abs(a - b).max() <= tol:
        return _point_ftset(instance, a, None)
    verts = np.array(sorted([tuple(a), tuple(b)]))
    return FTSet(
        vertices=verts,
        affine_dim=1,
        tag="segment",
        objective_value=instance.objective(a),
        certificate=None,
    )


# -- independent cross-check against the LP optimal face ----------------------


def lp_face_comparison(instance: Instance, fts: FTSet) -> dict:
    """Compare a solution set against the LP-optimal face, by support LPs.

    Returns the two one-sided gap measures:
      vertex_distance: max Chebyshev distance from an FTSet vertex to the
        lifted optimal-face polytope (FTSet inside LP face);
      support_gap: max over FTSet halfspaces (unit normals) of how far the
        LP face sticks out (LP face inside FTSet).
    Their maximum bounds the Hausdorff distance between the two sets.
    """
    d, n = instance.dim, instance.n
    A, b = _lift_rows(instance)
    _, value = find_ft_point(instance)
    row = np.concatenate([np.zeros(d), np.ones(n)])
    # Tight enlargement: the simplex value is accurate to ~1e-13 relative,
    # and any slack here inflates the face (and the measured gap) by the
    # local slope factor.
    slack = 1e-11 * (1.0 + abs(value))
    A_face = np.vstack([A, row])
    b_face = np.concatenate([b, [value + slack]])
    free = np.concatenate([np.ones(d, dtype=bool), np.zeros(n, dtype=bool)])

    vertex_distance = 0.0
    for v in fts.vertices:
        # min s with |x_j - v_j| <= s over the lifted face.
        nv = d + n + 1
        c = np.zeros(nv)
        c[-1] = 1.0
        Asub = np.zeros((len(A_face) + 2 * d, nv))
        Asub[: len(A_face), : d + n] = A_face
        bsub = np.concatenate([b_face, np.zeros(2 * d)])
        for j in range(d):
            r = len(A_face) + 2 * j
            Asub[r, j] = 1.0
            Asub[r, -1] = -1.0
            bsub[r] = v[j]
            Asub[r + 1, j] = -1.0
            Asub[r + 1, -1] = -1.0
            bsub[r + 1] = -v[j]
        freev = np.concatenate([free, [False]])
        res = solve_lp_mixed(c, Asub, bsub, free=freev)
        if not res.optimal:
            raise LPFailure("vertex-distance LP failed")
        vertex_distance = max(vertex_distance, float(res.value))

    support_gap = 0.0
    if fts.halfspaces is not None:
        Ah, bh = fts.halfspaces
        for a_row, b_off in zip(Ah, bh):
            c = np.concatenate([-a_row, np.zeros(n)])
            res = solve_lp_mixed(c, A_face, b_face, free=free)
            if not res.optimal:
                raise LPFailure("support LP failed")
            support_gap = max(support_gap, float(-res.value) - float(b_off))

    return {
        "lp_value": value,
        "vertex_distance": vertex_distance,
        "support_gap": support_gap,
        "hausdorff_bound": max(
            vertex_distance * np.sqrt(d), max(support_gap, 0.0)
        ),
    }
