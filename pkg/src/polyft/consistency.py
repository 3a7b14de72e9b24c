"""Consistent face sets and the solution-uniqueness criteria.

A face set is consistent when each face admits a strictly exposing
functional and the functionals sum to zero. Such sets, filtered by linear
span conditions, decide whether a ball admits site configurations with
non-unique minimizer sets. The enumeration is exhaustive up to the ball's
linear symmetry group at desk scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, InvalidInput, PolyFTError, WrongDimension
from .geometry import (
    Face,
    PolytopeBall,
    Subspace,
    intersect_subspaces,
    linear_span,
    span,
)
from .lp import solve_lp
from .solver import FTSet, Instance, ft_locus
from .symmetry import face_permutations


@dataclass(frozen=True, eq=False)
class ConsistentFaceSet:
    """Faces with strictly exposing functionals summing to zero."""

    faces: tuple[Face, ...]
    witnesses: np.ndarray  # (n, d), one functional per face
    min_interior_slack: float

    @property
    def n(self) -> int:
        return len(self.faces)

    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.faces)


@dataclass(eq=False)
class UniquenessWitness:
    face_set: ConsistentFaceSet | None
    instance: Instance
    ft_set: FTSet


@dataclass(eq=False)
class UniquenessReport:
    ball_name: str
    n: int
    verdict: str  # "unique_for_all" | "non_unique_exists"
    witness: UniquenessWitness | None
    criterion_trace: list[str] = field(default_factory=list)


def _check_triple_disjoint(faces) -> None:
    """Consistent triples must have pairwise disjoint faces.

    A shared sphere point would carry value 1 under two of the functionals,
    forcing the third to -2 there, which no norming functional reaches; a
    triple that slips through the zero-sum test while sharing vertices is a
    solver bug, not a result.
    """
    if len(faces) != 3:
        return
    for f, g in itertools.combinations(faces, 2):
        if set(f.vertex_ids) & set(g.vertex_ids):
            raise PolyFTError(
                "consistent triple with intersecting faces "
                f"{f} and {g}; this cannot happen for valid functionals"
            )


def is_consistent(
    ball: PolytopeBall, faces, slack_tol: float | None = None
) -> ConsistentFaceSet | None:
    """Maximize the strict-exposure slack subject to the zero-sum condition.

    Solves: max delta s.t. phi_i in conv(dual face of face_i),
    phi_i(w) <= 1 - delta for every ball vertex w outside face_i, and
    sum phi_i = 0. Returns a witness set iff the optimum exceeds tolerance.
    """
    faces = tuple(faces)
    if len(faces) < 2:
        raise InvalidInput("a consistent set needs at least two faces")
    keys = {frozenset(f.vertex_ids) for f in faces}
    if len(keys) != len(faces):
        raise InvalidInput("consistent sets are sets: faces must be distinct")
    for f in faces:
        ball.face_index(f)  # raises if foreign
    if slack_tol is None:
        slack_tol = ball.tolerance * 10.0

    result = _consistency_lp(ball, tuple(ball.face_index(f) for f in faces))
    if result is None or result[0] <= slack_tol:
        return None
    delta, witnesses = result
    _check_triple_disjoint(faces)
    return ConsistentFaceSet(
        faces=faces, witnesses=witnesses, min_interior_slack=delta
    )


def _consistency_lp(ball: PolytopeBall, face_ids: tuple[int, ...]):
    """Core LP; cached per ball and face-index tuple. Returns (delta, phis)."""
    cache = ball._cache.setdefault("consistency_lp", {})
    if face_ids in cache:
        return cache[face_ids]

    faces = [ball.faces[i] for i in face_ids]
    gens = [ball.facet_coeffs[sorted(f.exposing_dual_face)] for f in faces]
    sizes = [len(g) for g in gens]
    offs = np.cumsum([0] + sizes)
    nvar = offs[-1] + 1  # lambdas + delta
    d = ball.dim
    V = ball.vertices
    n = len(faces)

    A_eq = np.zeros((d + n, nvar))
    b_eq = np.zeros(d + n)
    for k, g in enumerate(gens):
        A_eq[:d, offs[k]:offs[k + 1]] = g.T
        A_eq[d + k, offs[k]:offs[k + 1]] = 1.0
    b_eq[d:] = 1.0

    ub_rows = []
    ub_offs = []
    for k, f in enumerate(faces):
        outside = np.setdiff1d(np.arange(len(V)), np.array(f.vertex_ids))
        vals = V[outside] @ gens[k].T  # (o, g_k)
        for r in range(len(outside)):
            row = np.zeros(nvar)
            row[offs[k]:offs[k + 1]] = vals[r]
            row[-1] = 1.0
            ub_rows.append(row)
            ub_offs.append(1.0)
    A_ub = np.array(ub_rows)
    b_ub = np.array(ub_offs)

    c = np.zeros(nvar)
    c[-1] = -1.0  # maximize delta
    res = solve_lp(c, A_ub, b_ub, A_eq, b_eq)
    if not res.optimal:
        cache[face_ids] = None
        return None
    delta = float(res.x[-1])
    phis = np.array([res.x[offs[k]:offs[k + 1]] @ g for k, g in enumerate(gens)])
    cache[face_ids] = (delta, phis)
    return cache[face_ids]


# -- span conditions ----------------------------------------------------------


def line_condition(ball: PolytopeBall, faces) -> bool:
    """General odd-count criterion: span intersection contains a line.

    Maximal faces span the whole space, so they never constrain the
    intersection (taking all faces is equivalent to taking non-maximal ones).
    """
    return span(faces, ball).dim >= 1


def bullets_3d(ball: PolytopeBall, faces) -> bool:
    """The three-dimensional refinement, evaluated verbatim.

    * the point-faces' spans intersect in a line;
    * every point-face lies in the plane of every segment-face;
    * the segment-faces' planes intersect in a line.
    """
    points = [f for f in faces if f.dim == 0]
    segments = [f for f in faces if f.dim == 1]
    if points:
        inter = intersect_subspaces(
            [linear_span(ball, f) for f in points], ball.dim, ball.tolerance
        )
        if inter.dim < 1:
            return False
    for p in points:
        for s in segments:
            pts = np.vstack(
                [ball.vertices[list(p.vertex_ids)], ball.vertices[list(s.vertex_ids)]]
            )
            from .geometry import _rank

            if _rank(pts, ball.tolerance) != 2:
                return False
    if segments:
        inter = intersect_subspaces(
            [linear_span(ball, f) for f in segments], ball.dim, ball.tolerance
        )
        if inter.dim < 1:
            return False
    return True


# -- enumeration ---------------------------------------------------------------


class _SpanState:
    """Incremental span-condition pruning during the DFS."""

    def __init__(self, ball: PolytopeBall, mode: str | None):
        self.ball = ball
        self.mode = mode

    def initial(self):
        if self.mode is None:
            return None
        if self.mode == "line":
            return Subspace(np.eye(self.ball.dim))
        if self.mode == "bullets3d":
            # (point-line intersection, segment-plane intersection, points, segments)
            full = Subspace(np.eye(self.ball.dim))
            return (full, full, (), ())
        raise InvalidInput(f"unknown span filter {self.mode!r}")

    def extend(self, state, face: Face):
        """Return the successor state, or None when the branch is dead."""
        ball = self.ball
        if self.mode is None:
            return state
        if face.dim >= ball.dim - 1:
            return state  # maximal faces never constrain
        if self.mode == "line":
            nxt = intersect_subspaces(
                [state, linear_span(ball, face)], ball.dim, ball.tolerance
            )
            return nxt if nxt.dim >= 1 else None
        pts_inter, seg_inter, points, segments = state
        if face.dim == 0:
            nxt = intersect_subspaces(
                [pts_inter, linear_span(ball, face)], ball.dim, ball.tolerance
            )
            if nxt.dim < 1:
                return None
            if not all(_pair_span_is_plane(ball, face, s) for s in segments):
                return None
            return (nxt, seg_inter, points + (face,), segments)
        if face.dim == 1:
            nxt = intersect_subspaces(
                [seg_inter, linear_span(ball, face)], ball.dim, ball.tolerance
            )
            if nxt.dim < 1:
                return None
            if not all(_pair_span_is_plane(ball, p, face) for p in points):
                return None
            return (pts_inter, nxt, points, segments + (face,))
        return state


def _pair_span_is_plane(ball: PolytopeBall, point: Face, segment: Face) -> bool:
    from .geometry import _rank

    pts = np.vstack(
        [ball.vertices[list(point.vertex_ids)], ball.vertices[list(segment.vertex_ids)]]
    )
    return _rank(pts, ball.tolerance) == 2


def _facet_sum_tables(ball: PolytopeBall, max_size: int):
    """Index tuples and functional sums for facet subsets, by subset size."""
    key = ("facet_tables", max_size)
    if key in ball._cache:
        return ball._cache[key]
    facet_face_ids = [
        i for i, f in enumerate(ball.faces) if f.dim == ball.dim - 1
    ]
    functionals = np.array(
        [
            ball.facet_coeffs[sorted(ball.faces[i].exposing_dual_face)][0]
            for i in facet_face_ids
        ]
    )
    tables = {}
    for s in range(0, max_size + 1):
        combos = np.array(
            list(itertools.combinations(range(len(facet_face_ids)), s)), dtype=int
        )
        if s == 0:
            tables[s] = (np.zeros((1, 0), dtype=int), np.zeros((1, ball.dim)))
            continue
        sums = functionals[combos].sum(axis=1)
        tables[s] = (combos, sums)
    ball._cache[key] = (np.array(facet_face_ids, dtype=int), tables)
    return ball._cache[key]


def _face_value_bounds(ball: PolytopeBall):
    """Per-face componentwise min/max of the dual-face generators."""
    if "face_bounds" in ball._cache:
        return ball._cache["face_bounds"]
    lo = np.zeros((len(ball.faces), ball.dim))
    hi = np.zeros((len(ball.faces), ball.dim))
    for i, f in enumerate(ball.faces):
        gens = ball.facet_coeffs[sorted(f.exposing_dual_face)]
        lo[i] = gens.min(axis=0)
        hi[i] = gens.max(axis=0)
    ball._cache["face_bounds"] = (lo, hi)
    return ball._cache["face_bounds"]


def _orbit_codes(perm_table: np.ndarray, leaves: np.ndarray, base: int):
    """Pack each leaf's orbit images into integers; minimum = canonical code."""
    powers = base ** np.arange(leaves.shape[1] - 1, -1, -1, dtype=np.int64)
    images = perm_table[:, leaves]  # (G, L, n)
    images.sort(axis=2)
    codes = images.astype(np.int64) @ powers  # (G, L)
    own = np.sort(leaves, axis=1).astype(np.int64) @ powers
    return own, codes.min(axis=0)


def enumerate_consistent_sets(
    ball: PolytopeBall,
    n: int,
    span_filter: str | None = None,
    budget: int = 2_000_000,
    lp_budget: int = 60_000,
    first_only: bool = False,
) -> list[ConsistentFaceSet]:
    """All consistent n-face sets, exhaustive up to linear symmetry.

    ``span_filter`` may be "line" (general criterion) or "bullets3d" (the
    three-dimensional refinement); both prune during the search. Facet
    subsets are vectorized: their exposing functionals are unique, so their
    contribution to the zero-sum test is a fixed vector per subset.
    """
    if ball.dim > 3:
        raise InvalidInput("enumeration is supported for dimensions 2 and 3 only")
    if not 2 <= n <= 7:
        raise InvalidInput("enumeration supports 2 <= n <= 7")
    if span_filter == "bullets3d" and ball.dim != 3:
        raise WrongDimension("bullets3d filter requires a three-dimensional ball")

    faces = ball.faces
    F = len(faces)
    nonfacet = [i for i, f in enumerate(faces) if f.dim < ball.dim - 1]
    facet_ids, tables = _facet_sum_tables(ball, n)
    lo, hi = _face_value_bounds(ball)
    perm_table = face_permutations(ball)
    state_machine = _SpanState(ball, span_filter)
    tol_box = ball.tolerance * 100.0

    counters = {"nodes": 0, "lp": 0}
    hits: list[tuple[int, ...]] = []

    def consume_leaves(leaves: np.ndarray) -> bool:
        """Symmetry-filter, box-filter, then LP-check a batch of leaves."""
        if not len(leaves):
            return False
        own, canon = _orbit_codes(perm_table, leaves, F)
        leaves = leaves[own <= canon]
        for leaf in leaves:
            counters["lp"] += 1
            if counters["lp"] > lp_budget:
                raise BudgetExceeded("LP budget exhausted during enumeration")
            result = _consistency_lp(ball, tuple(int(i) for i in leaf))
            if result is not None and result[0] > ball.tolerance * 10.0:
                hits.append(tuple(int(i) for i in leaf))
                if first_only:
                    return True
        return False

    def fill_with_facets(prefix: list[int]) -> bool:
        s = n - len(prefix)
        combos, sums = tables[s]
        if not len(combos):
            return False
        lo_q = lo[prefix].sum(axis=0) if prefix else np.zeros(ball.dim)
        hi_q = hi[prefix].sum(axis=0) if prefix else np.zeros(ball.dim)
        ok = np.all(sums + lo_q <= tol_box, axis=1) & np.all(
            sums + hi_q >= -tol_box, axis=1
        )
        if not np.any(ok):
            return False
        chosen = facet_ids[combos[ok]]
        leaves = np.sort(
            np.hstack([np.broadcast_to(prefix, (len(chosen), len(prefix))), chosen])
            if prefix
            else chosen,
            axis=1,
        ).astype(int)
        return consume_leaves(leaves)

    def rec(start: int, prefix: list[int], state) -> bool:
        counters["nodes"] += 1
        if counters["nodes"] > budget:
            raise BudgetExceeded("node budget exhausted during enumeration")
        if fill_with_facets(prefix):
            return True
        if len(prefix) == n:
            return False
        for pos in range(start, len(nonfacet)):
            j = nonfacet[pos]
            nxt = state_machine.extend(state, faces[j])
            if span_filter is not None and nxt is None:
                continue
            if rec(pos + 1, prefix + [j], nxt):
                return True
        return False

    rec(0, [], state_machine.initial())

    # Canonical order, then materialize witness sets from the cached LPs.
    out = []
    for leaf in sorted(set(hits)):
        delta, phis = _consistency_lp(ball, leaf)
        face_objs = tuple(faces[i] for i in leaf)
        _check_triple_disjoint(face_objs)
        out.append(
            ConsistentFaceSet(faces=face_objs, witnesses=phis, min_interior_slack=delta)
        )
    return out


# -- audits --------------------------------------------------------------------


def is_strictly_convex(ball: PolytopeBall) -> bool:
    """True iff the unit sphere has no face of dimension >= 1.

    A polytope ball in dimension >= 2 always has facets of dimension >= 1,
    so this is always False here; the check exists because the even-count
    criterion is stated through it.
    """
    return all(f.dim == 0 for f in ball.faces)


def _interior_point(ball: PolytopeBall, face: Face, which: int = 0) -> np.ndarray:
    """A relative-interior point of a face (barycenter, or a skewed mix)."""
    V = ball.vertices[list(face.vertex_ids)]
    if which == 0 or len(V) == 1:
        return V.mean(axis=0)
    w = np.ones(len(V))
    w[which % len(V)] = 2.0 + 0.5 * which
    w /= w.sum()
    return w @ V


def witness_instance(ball: PolytopeBall, cs: ConsistentFaceSet) -> Instance:
    """Sites at one interior point per face of a consistent set."""
    return Instance(ball, np.array([_interior_point(ball, f) for f in cs.faces]))


def even_witness_instance(ball: PolytopeBall, n: int) -> tuple[Instance, ConsistentFaceSet]:
    """The plus-minus construction on a facet, for even site counts.

    Takes n/2 distinct interior points of one facet and mirrors them; the
    facet functional and its negation certify the origin, and the cones are
    full-dimensional, so the solution set has positive dimension.
    """
    if n < 4 or n % 2:
        raise InvalidInput("even witness needs even n >= 4")
    facet = ball.faces_of_dim(ball.dim - 1)[0]
    anti_ids = frozenset(ball.antipodal_vertex(i) for i in facet.vertex_ids)
    anti = ball.face_by_vertex_ids(anti_ids)
    cs = is_consistent(ball, [facet, anti])
    if cs is None:
        raise PolyFTError("facet and its antipode failed the consistency check")
    points = np.array([_interior_point(ball, facet, k) for k in range(n // 2)])
    for i, j in itertools.combinations(range(len(points)), 2):
        if np.abs(points[i] - points[j]).max() <= ball.tolerance * 100.0:
            raise PolyFTError("facet interior points are not distinct")
    sites = np.vstack([points, -points])
    from .geometry import affine_rank

    if affine_rank(sites, ball.tolerance) < 2:
        raise PolyFTError("even-witness sites degenerated onto a line")
    return Instance(ball, sites), cs


def _non_unique_report(
    ball: PolytopeBall, n: int, cs: ConsistentFaceSet | None, inst: Instance, trace
) -> UniquenessReport:
    fts = ft_locus(inst)
    if fts.affine_dim < 1:
        raise PolyFTError(
            "criterion produced a witness whose solution set is a single point"
        )
    return UniquenessReport(
        ball_name=ball.name or "ball",
        n=n,
        verdict="non_unique_exists",
        witness=UniquenessWitness(face_set=cs, instance=inst, ft_set=fts),
        criterion_trace=list(trace),
    )


def _even_branch(ball: PolytopeBall, n: int, trace: list[str]) -> UniquenessReport:
    sc = is_strictly_convex(ball)
    trace.append(f"even n: strict convexity = {sc}")
    if sc:
        return UniquenessReport(
            ball_name=ball.name or "ball",
            n=n,
            verdict="unique_for_all",
            witness=None,
            criterion_trace=trace,
        )
    inst, cs = even_witness_instance(ball, n)
    trace.append("plus-minus facet construction witnesses non-uniqueness")
    return _non_unique_report(ball, n, cs, inst, trace)


def uniqueness_audit(ball: PolytopeBall, n: int) -> UniquenessReport:
    """General criterion: search consistent n-sets whose spans share a line.

    Even n reduces to strict convexity (never holds for polytope balls, so
    the plus-minus facet witness applies). Odd n enumerates consistent sets
    under the line filter and validates the first witness end to end.
    """
    if n < 3:
        raise InvalidInput("the uniqueness criteria start at n = 3")
    trace: list[str] = [f"ball={ball.name}, n={n}"]
    if n % 2 == 0:
        return _even_branch(ball, n, trace)
    found = enumerate_consistent_sets(
        ball, n, span_filter="line", first_only=True
    )
    if not found:
        trace.append("no consistent set satisfies the line-span condition")
        return UniquenessReport(
            ball_name=ball.name or "ball",
            n=n,
            verdict="unique_for_all",
            witness=None,
            criterion_trace=trace,
        )
    cs = found[0]
    trace.append(
        f"consistent set with dims {cs.dims()} satisfies the line condition"
    )
    if not line_condition(ball, cs.faces):
        raise PolyFTError("enumerated witness fails its own span condition")
    return _non_unique_report(ball, n, cs, witness_instance(ball, cs), trace)


def plane_criterion_check(ball: PolytopeBall, n: int) -> UniquenessReport:
    """Two-dimensional refinement: classify by flattening counts.

    Full-flattening sets witness polygonal solution sets; one point-face
    (or several point-faces on one line through the origin) witnesses a
    segment. Anything else keeps uniqueness.
    """
    if ball.dim != 2:
        raise WrongDimension("plane criterion requires a two-dimensional ball")
    if n < 3:
        raise InvalidInput("the uniqueness criteria start at n = 3")
    trace: list[str] = [f"ball={ball.name}, n={n} (plane criterion)"]
    if n % 2 == 0:
        return _even_branch(ball, n, trace)

    sets = enumerate_consistent_sets(ball, n, span_filter="line")
    if not sets:
        trace.append("every consistent set has <= n-2 flattenings and plane-spanning points")
        return UniquenessReport(
            ball_name=ball.name or "ball",
            n=n,
            verdict="unique_for_all",
            witness=None,
            criterion_trace=trace,
        )

    def classify(cs: ConsistentFaceSet) -> tuple[int, str]:
        flats = sum(1 for f in cs.faces if f.dim == 1)
        if flats == n:
            return 0, "polygon"
        if flats == n - 1:
            return 1, "segment"
        return 2, "segment"

    sets.sort(key=lambda cs: classify(cs)[0])
    cs = sets[0]
    rank, expected_tag = classify(cs)
    reason = [
        f"{n} flattenings: non-degenerate polygon",
        f"{n - 1} flattenings and one point: segment",
        "point-faces span a line: segment",
    ][rank]
    trace.append(reason)
    report = _non_unique_report(ball, n, cs, witness_instance(ball, cs), trace)
    got = report.witness.ft_set.tag
    if got != expected_tag:
        raise PolyFTError(
            f"witness solution set is a {got}, criterion predicted {expected_tag}"
        )
    trace.append(f"witness solution set tag = {got}")
    return report


def space3d_criterion_check(ball: PolytopeBall, n: int) -> UniquenessReport:
    """Three-dimensional refinement: the three span bullets, verbatim."""
    if ball.dim != 3:
        raise WrongDimension("space criterion requires a three-dimensional ball")
    if n < 3:
        raise InvalidInput("the uniqueness criteria start at n = 3")
    trace: list[str] = [f"ball={ball.name}, n={n} (3d criterion)"]
    if n % 2 == 0:
        return _even_branch(ball, n, trace)
    found = enumerate_consistent_sets(
        ball, n, span_filter="bullets3d", first_only=True
    )
    if not found:
        trace.append("no consistent set satisfies the three bullet conditions")
        return UniquenessReport(
            ball_name=ball.name or "ball",
            n=n,
            verdict="unique_for_all",
            witness=None,
            criterion_trace=trace,
        )
    cs = found[0]
    if not bullets_3d(ball, cs.faces):
        raise PolyFTError("enumerated witness fails the bullet conditions")
    trace.append(f"consistent set with dims {cs.dims()} passes all three bullets")
    return _non_unique_report(ball, n, cs, witness_instance(ball, cs), trace)
