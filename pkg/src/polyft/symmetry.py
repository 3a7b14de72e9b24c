"""Linear symmetry detection: vertex permutations realized by linear maps.

Consistency of a face set is invariant under any linear map preserving the
ball, so these permutations drive orbit reduction in the enumeration. The
search is exhaustive: a linear map is fixed by the images of d independent
vertices, and every candidate image tuple is checked directly.
"""

from __future__ import annotations

import itertools

import numpy as np

from .geometry import PolytopeBall


def _base_indices(V: np.ndarray, tol: float) -> list[int]:
    base: list[int] = []
    for i in range(len(V)):
        trial = V[base + [i]]
        if np.linalg.matrix_rank(trial, tol=1e-9) == len(base) + 1:
            base.append(i)
        if len(base) == V.shape[1]:
            return base
    raise ValueError("vertex set does not span the space")


def linear_automorphisms(ball: PolytopeBall, max_vertices: int = 64):
    """All vertex permutations induced by linear self-maps of the ball.

    Returns a list of integer arrays p with T v_i = v_{p[i]} for the
    realizing map T. Falls back to the identity alone when the vertex count
    makes the search unreasonable.
    """
    cached = ball._cache.get("automorphisms")
    if cached is not None:
        return cached
    V = ball.vertices
    n, d = V.shape
    identity = np.arange(n)
    if n > max_vertices:
        result = [identity]
        ball._cache["automorphisms"] = result
        return result

    base = _base_indices(V, ball.tolerance)
    M_inv = np.linalg.inv(V[base].T)  # (d, d)

    candidates = np.array(list(itertools.permutations(range(n), d)), dtype=int)
    # T = V[imgs].T @ M_inv maps the base vertices onto the image tuple.
    T = np.einsum("cdk,ke->cde", V[candidates].transpose(0, 2, 1), M_inv)
    W = np.einsum("cde,ve->cvd", T, V)  # images of all vertices, per candidate

    tol = ball.tolerance * max(1.0, ball.scale) * 1000.0
    perms: dict[tuple[int, ...], np.ndarray] = {tuple(identity): identity}
    diff = W[:, :, None, :] - V[None, None, :, :]
    dist = np.abs(diff).max(axis=3)  # (c, v, n)
    nearest = dist.argmin(axis=2)
    good = dist.min(axis=2) <= tol
    for c in range(len(candidates)):
        if not good[c].all():
            continue
        p = nearest[c]
        if len(set(p.tolist())) != n:
            continue
        perms.setdefault(tuple(p.tolist()), p.copy())
    result = [perms[k] for k in sorted(perms)]
    ball._cache["automorphisms"] = result
    return result


def face_permutations(ball: PolytopeBall):
    """Automorphism action on face indices: array G x num_faces."""
    cached = ball._cache.get("face_permutations")
    if cached is not None:
        return cached
    autos = linear_automorphisms(ball)
    index = {frozenset(f.vertex_ids): i for i, f in enumerate(ball.faces)}
    out = np.zeros((len(autos), len(ball.faces)), dtype=int)
    for g, perm in enumerate(autos):
        for i, face in enumerate(ball.faces):
            image = frozenset(int(perm[v]) for v in face.vertex_ids)
            out[g, i] = index[image]
    ball._cache["face_permutations"] = out
    return out
