"""Discrete Christoffel duality for quad meshes with conformal-square faces."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geomcore import Circle3D, Sphere3D
from .koebe import KiteMesh, SIsothermicSurface, central_extension
from .quadgraph import Edge, Label, SQuadGraph, TopologyError, assign_edge_signs, edge_key


class DualizationError(ValueError):
    pass


class InfiniteEdgeError(DualizationError):
    """A zero-length edge, whose dual has infinite length."""


def dual_edge(delta, sign: int = 1) -> np.ndarray:
    """``sign * delta / |delta|^2``."""
    d = np.asarray(delta, dtype=float)
    n2 = float(np.dot(d, d))
    if n2 == 0.0:
        raise InfiniteEdgeError("zero-length edge has an infinite dual")
    return sign * d / n2


@dataclass
class DualizationResult:
    positions: dict[int, np.ndarray]
    closure_residual: float
    cotree_defect: float
    basepoint: int
    base_image: np.ndarray
    diameter: float
    periods: list[np.ndarray] = field(default_factory=list)
    worst_face: int | None = None
    signs: dict[Edge, int] = field(default_factory=dict)


def face_closure(graph: SQuadGraph, positions, signs, fi: int) -> np.ndarray:
    """Sum of the dual edges around face ``fi``."""
    f = graph.faces[fi]
    total = np.zeros(3)
    for a in range(4):
        u, v = f[a], f[(a + 1) % 4]
        total += dual_edge(positions[v] - positions[u], signs[edge_key(u, v)])
    return total


def _diameter(points) -> float:
    pts = np.array(list(points))
    return float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0))) if len(pts) else 0.0


def dualize_mesh(
    mesh: KiteMesh,
    signs: dict[Edge, int] | None = None,
    basepoint: int | None = None,
    allow_periods: bool = False,
    hard_cap: float = 1e-5,
) -> DualizationResult:
    """Integrate the dual 1-form over a breadth-first spanning tree.

    Faces listed in ``mesh.skip_faces`` and their edges that no other face
    uses are ignored.  Without ``allow_periods`` the used part must be simply
    connected; with it, co-tree mismatches larger than round-off are
    returned as ``periods``.
    """
    graph = mesh.graph
    pos = mesh.positions
    faces = [fi for fi, _ in mesh.faces()]
    sub = graph.subgraph(faces) if mesh.skip_faces else graph
    if not allow_periods and not sub.is_simply_connected():
        raise TopologyError("dualization needs a simply connected mesh (or allow_periods=True)")
    normalise = signs is None
    if normalise:
        signs = assign_edge_signs(graph, require_simply_connected=False)

    adj: dict[int, list[int]] = {}
    for fi in faces:
        f = graph.faces[fi]
        for a in range(4):
            u, v = f[a], f[(a + 1) % 4]
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
    for v in adj:
        adj[v] = sorted(set(adj[v]))
    if basepoint is None:
        basepoint = min(adj)
    if basepoint not in adj:
        raise DualizationError(f"basepoint {basepoint} is not on the mesh")

    # computed labels are normalised so the first tree edge carries +1
    first = edge_key(basepoint, adj[basepoint][0])
    if normalise and signs[first] < 0:
        signs = {e: -s for e, s in signs.items()}

    dual = {basepoint: np.zeros(3)}
    tree: set[Edge] = set()
    queue = deque([basepoint])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dual:
                dual[v] = dual[u] + dual_edge(pos[v] - pos[u], signs[edge_key(u, v)])
                tree.add(edge_key(u, v))
                queue.append(v)

    diam = _diameter(dual.values())
    closure, worst_face = 0.0, None
    for fi in faces:
        c = float(np.linalg.norm(face_closure(graph, pos, signs, fi)))
        if c > closure:
            closure, worst_face = c, fi
    if closure > hard_cap * max(diam, 1e-300):
        raise DualizationError(
            f"face {worst_face} fails to close by {closure:.3e} (diameter {diam:.3e}); "
            "is every face a conformal square?"
        )

    cotree, periods = 0.0, []
    thresh = 1e-7 * max(diam, 1e-300)
    for u in adj:
        for v in adj[u]:
            if u < v and edge_key(u, v) not in tree:
                mis = dual[v] - dual[u] - dual_edge(pos[v] - pos[u], signs[edge_key(u, v)])
                nm = float(np.linalg.norm(mis))
                if nm > thresh and allow_periods:
                    if not any(
                        min(np.linalg.norm(mis - p), np.linalg.norm(mis + p)) <= thresh for p in periods
                    ):
                        periods.append(mis)
                else:
                    cotree = max(cotree, nm)
    return DualizationResult(dual, closure, cotree, basepoint, dual[basepoint], diam, periods, worst_face, signs)


def dual_polygon(edges: Sequence, touch_radii: Sequence[float], tol: float = 1e-8) -> list[np.ndarray]:
    """``l*_j = (-1)^j l_j / (r_j r_{j+1})`` (1-based ``j``) for a tangential polygon."""
    ls = [np.asarray(e, dtype=float) for e in edges]
    r = [float(x) for x in touch_radii]
    n = len(ls)
    if n % 2 or n != len(r):
        raise ValueError("need an even number of edges and one touch radius per vertex")
    out = []
    for j in range(n):
        r1, r2 = r[j], r[(j + 1) % n]
        if abs(np.linalg.norm(ls[j]) - (r1 + r2)) > tol * max(1.0, r1 + r2):
            raise ValueError(f"edge {j} has length {np.linalg.norm(ls[j]):.6g}, expected r_j + r_j+1 = {r1 + r2:.6g}")
        sign = -1.0 if j % 2 == 0 else 1.0
        out.append(sign * ls[j] / (r1 * r2))
    return out


def dual_s_isothermic(
    surface: SIsothermicSurface,
    signs: dict[Edge, int] | None = None,
    basepoint: int | None = None,
    allow_periods: bool = False,
) -> tuple[SIsothermicSurface, DualizationResult]:
    """Christoffel dual of the central extension, read back as spheres and circles.

    Radii are the reciprocals of the original ones.  Point spheres have no
    dual (their edges become infinite) and are dropped.
    """
    mesh = central_extension(surface)
    res = dualize_mesh(mesh, signs, basepoint, allow_periods)
    d = res.positions
    spheres = {
        v: Sphere3D(d[v], 1.0 / s.radius) for v, s in surface.spheres.items() if s.radius > 0 and v in d
    }
    circles = {v: Circle3D(d[v], 1.0 / c.radius, c.normal) for v, c in surface.circles.items() if v in d}
    contacts = {
        b: d[b] for b in surface.contacts if b in d and surface.graph.labels[b] is Label.BLACK
    }
    out = SIsothermicSurface(surface.graph, spheres, circles, contacts, {"dual_of": surface.meta})
    return out, res


def register_similarity(a: np.ndarray, b: np.ndarray, allow_rotation: bool = False):
    """Least-squares ``b ~ s * R a + t``; returns ``(s, R, t, max deviation)``.

    Without ``allow_rotation`` only translation and (signed) scale are fitted.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ca, cb = a.mean(axis=0), b.mean(axis=0)
    A, B = a - ca, b - cb
    if allow_rotation:
        U, S, Vt = np.linalg.svd(B.T @ A)
        D = np.eye(3)
        D[2, 2] = np.sign(np.linalg.det(U @ Vt))
        R = U @ D @ Vt
        s = float(np.trace(np.diag(S) @ D) / np.sum(A * A))
    else:
        R = np.eye(3)
        s = float(np.sum(A * B) / np.sum(A * A))
    t = cb - s * (R @ ca)
    dev = float(np.max(np.linalg.norm(s * a @ R.T + t - b, axis=1)))
    return s, R, t, dev
