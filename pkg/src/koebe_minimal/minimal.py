"""Discrete minimal surfaces: duals of Koebe polyhedra and the Weierstrass route."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .christoffel import DualizationResult, dual_edge, dual_s_isothermic
from .geomcore import Circle3D, Sphere3D, _weierstrass_vector, rotate
from .koebe import KoebePolyhedron, SIsothermicSurface
from .pattern_plane import PlanarPattern
from .quadgraph import Edge, Label, SQuadGraph, assign_edge_signs, edge_key


class MinimalityError(ValueError):
    pass


@dataclass(frozen=True)
class MinimalityResidual:
    """Residuals of the three equivalent vertex conditions, in length units."""

    circle: float  # (i) points F(x) + (-1)^j b_j on a circle
    normal: float  # (ii) (-1)^j <b_j, N> constant
    planes: float  # (iii) even/odd neighbours on parallel planes at equal distance

    @property
    def max(self) -> float:
        return max(self.circle, self.normal, self.planes)


def minimal_condition_residual(b) -> MinimalityResidual:
    """Def.-style vertex test on the edge vectors ``b_1 .. b_2n`` in cyclic order."""
    b = np.asarray(b, dtype=float)
    n2 = len(b)
    if n2 < 4 or n2 % 2:
        raise MinimalityError("need an even number >= 4 of neighbours")
    signs = np.where(np.arange(n2) % 2 == 0, -1.0, 1.0)  # (-1)^j with j from 1
    q = signs[:, None] * b
    # (ii): q_j . N = h for all j; smallest singular vector of [q | -1]
    scale = float(np.linalg.norm(q, axis=1).max()) or 1.0
    A = np.column_stack([q / scale, -np.ones(n2)])
    _, _, vt = np.linalg.svd(A)
    N = vt[-1, :3]
    N = N / np.linalg.norm(N)
    proj = q @ N
    h = float(proj.mean())
    res_ii = float(np.max(np.abs(proj - h)))
    # (iii): distances of F(y_j) from the plane through F(x) with normal N
    dist = b @ N
    even, odd = dist[1::2], dist[0::2]
    res_iii = max(
        float(np.ptp(even)),
        float(np.ptp(odd)),
        abs(float(even.mean() + odd.mean())),
    )
    # (i): the points q_j are concyclic
    c = q.mean(axis=0)
    e1 = np.cross(N, [1.0, 0.0, 0.0])
    if np.linalg.norm(e1) < 0.5:
        e1 = np.cross(N, [0.0, 1.0, 0.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(N, e1)
    P = np.column_stack([(q - c) @ e1, (q - c) @ e2])
    M = np.column_stack([2 * P, np.ones(n2)])
    sol = np.linalg.lstsq(M, np.sum(P * P, axis=1), rcond=None)[0]
    rad = np.sqrt(sol[2] + sol[0] ** 2 + sol[1] ** 2)
    d2 = np.linalg.norm(P - sol[:2], axis=1)
    res_i = max(float(np.max(np.abs(d2 - rad))), res_ii)
    return MinimalityResidual(res_i, res_ii, res_iii)


def hull_distance(p, pts) -> float:
    """Distance from ``p`` to the convex hull of ``pts``."""
    pts = np.asarray(pts, dtype=float)
    p = np.asarray(p, dtype=float)
    scale = max(float(np.abs(pts - p).max()), 1e-300)
    w = 1e3
    A = np.vstack([(pts - p).T / scale, w * np.ones(len(pts))])
    y = np.concatenate([np.zeros(len(p)), [w]])
    lam, _ = nnls(A, y)
    lam = lam / lam.sum()
    return float(np.linalg.norm(lam @ pts - p))


@dataclass
class MinimalSurface(SIsothermicSurface):
    """S-isothermic surface with per-edge vectors for local checks.

    ``edge_vectors[(u, v)]`` is ``F(v) - F(u)`` computed locally (not from
    integrated positions), so checks stay valid on pieces with periods.
    """

    edge_vectors: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)
    dualization: DualizationResult | None = None
    rays: dict[int, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    source: object = None
    lattice: list[np.ndarray] = field(default_factory=list)

    def edge(self, u: int, v: int) -> np.ndarray:
        if (u, v) in self.edge_vectors:
            return self.edge_vectors[u, v]
        return self.center(v) - self.center(u)

    # local versions of the validators, valid across period cuts

    def tangency_defect(self) -> float:
        if not self.edge_vectors:
            return super().tangency_defect()
        worst = 0.0
        for u, b, w in self.sphere_pairs():
            ru, rw = self.spheres[u].radius, self.spheres[w].radius
            eu, ew = self.edge(u, b), self.edge(b, w)
            worst = max(
                worst,
                abs(np.linalg.norm(eu) - ru),
                abs(np.linalg.norm(ew) - rw),
                abs(np.linalg.norm(eu + ew) - ru - rw),
            )
        return float(worst)

    def circle_incidence_defect(self) -> float:
        if not self.edge_vectors:
            return super().circle_incidence_defect()
        worst = 0.0
        for _, c, blacks in self.face_pairs():
            circ = self.circles[c]
            for b in blacks:
                x = self.edge(c, b)
                h = float(np.dot(x, circ.normal))
                rad = np.linalg.norm(x - h * circ.normal)
                worst = max(worst, abs(h), abs(rad - circ.radius))
        return float(worst)

    def orthogonality_defect(self) -> float:
        if not self.edge_vectors:
            return super().orthogonality_defect()
        worst = 0.0
        for s, c, blacks in self.face_pairs():
            sph, circ = self.spheres[s], self.circles[c]
            if sph.radius == 0.0:
                continue
            for b in blacks:
                t = np.cross(circ.normal, self.edge(c, b))
                t /= np.linalg.norm(t)
                worst = max(worst, float(np.linalg.norm(np.cross(t, self.edge(s, b) / sph.radius))))
        return worst

    def edge_consistency_defect(self) -> float:
        """Worst mismatch between positions and local edges, modulo the period lattice."""
        if not self.edge_vectors:
            return 0.0
        pos = self.positions()
        L = np.array(self.lattice).T if self.lattice else np.zeros((3, 0))
        worst = 0.0
        for (u, v), e in self.edge_vectors.items():
            if u > v or u not in pos or v not in pos:
                continue
            mis = pos[v] - pos[u] - e
            if L.shape[1]:
                k = np.rint(np.linalg.lstsq(L, mis, rcond=None)[0])
                mis = mis - L @ k
            worst = max(worst, float(np.linalg.norm(mis)))
        return worst

    def interior_sphere_vertices(self) -> list[int]:
        g = self.graph
        out = []
        for v in self.spheres:
            if not g.is_interior(v):
                continue
            if all((v, b) in self.edge_vectors or b in self.contacts for b in g.adjacency[v]):
                out.append(v)
        return sorted(out)

    def vertex_residuals(self) -> dict[int, MinimalityResidual]:
        return {v: check_minimal_condition(self, v) for v in self.interior_sphere_vertices()}

    def minimality_defect(self) -> float:
        res = self.vertex_residuals()
        return max((r.max for r in res.values()), default=0.0)

    def max_principle_defect(self) -> float:
        """Worst distance of an interior sphere centre from the hull of its neighbours."""
        worst = 0.0
        for v in self.interior_sphere_vertices():
            nb = [self.edge(v, b) for b in self.graph.adjacency[v]]
            worst = max(worst, hull_distance(np.zeros(3), nb))
        return worst

    def report(self) -> dict[str, float]:
        out = super().report()
        out["minimality"] = self.minimality_defect()
        out["max_principle"] = self.max_principle_defect()
        out["edge_consistency"] = self.edge_consistency_defect()
        if self.dualization is not None:
            out["dual_closure"] = self.dualization.closure_residual
        return out


@dataclass
class AssociatedFamilyMember(MinimalSurface):
    phi: float = 0.0

    def radii(self) -> dict[int, float]:
        return {v: s.radius for v, s in self.spheres.items()}

    def report(self) -> dict[str, float]:
        out = super().report()
        if abs(np.sin(self.phi)) > 1e-12:
            # rotated members are not S-isothermic: their circles pass
            # through the contacts but do not meet the spheres orthogonally
            out.pop("circle_sphere_orthogonality", None)
        return out


def check_minimal_condition(surface: SIsothermicSurface, vertex: int) -> MinimalityResidual:
    g = surface.graph
    if vertex not in surface.spheres:
        raise MinimalityError(f"vertex {vertex} does not carry a sphere")
    if not g.is_interior(vertex):
        raise MinimalityError(f"vertex {vertex} is not interior")
    nb = g.star(vertex)
    if len(nb) < 4:
        raise MinimalityError(f"vertex {vertex} has fewer than 4 neighbours")
    if isinstance(surface, MinimalSurface):
        b = [surface.edge(vertex, y) for y in nb]
    else:
        b = [surface.contacts[y] - surface.spheres[vertex].center for y in nb]
    return minimal_condition_residual(b)


def _local_dual_edges(koebe: SIsothermicSurface, signs: dict[Edge, int]) -> dict[tuple[int, int], np.ndarray]:
    pos = koebe.positions()
    out = {}
    for u, v in koebe.graph.edges:
        if u in pos and v in pos and np.any(pos[u] != pos[v]):
            d = dual_edge(pos[v] - pos[u], signs[edge_key(u, v)])
            out[u, v] = d
            out[v, u] = -d
    return out


def dualize_koebe_to_minimal(
    koebe: KoebePolyhedron,
    signs: dict[Edge, int] | None = None,
    basepoint: int | None = None,
    allow_periods: bool = False,
) -> MinimalSurface:
    """Christoffel dual of a Koebe polyhedron, with minimality bookkeeping."""
    dual, res = dual_s_isothermic(koebe, signs, basepoint, allow_periods)
    edges = _local_dual_edges(koebe, res.signs)
    return MinimalSurface(
        dual.graph,
        dual.spheres,
        dual.circles,
        dual.contacts,
        {"construction": "koebe-dual", **koebe.meta},
        edges,
        res,
        lattice=list(res.periods),
    )


# -- Weierstrass route --------------------------------------------------------------


def weierstrass_sphere_radius(c: complex, p: complex) -> float:
    """Radius of the dual sphere for the planar circle at ``c`` through ``p``."""
    c, p = complex(c), complex(p)
    r = abs(c - p)
    if r == 0:
        raise ValueError("circle centre and contact coincide")
    return abs((1.0 + abs(c) ** 2 - r * r) / (2.0 * r))


def weierstrass_edge(c1: complex, c2: complex, p: complex, sign: int = 1, phi: float = 0.0) -> np.ndarray:
    """Edge between the sphere centres for touching planar circles at ``c1``, ``c2``."""
    c1, c2, p = complex(c1), complex(c2), complex(p)
    if c1 == c2:
        raise ValueError("coincident centres")
    R = weierstrass_sphere_radius(c1, p) + weierstrass_sphere_radius(c2, p)
    w = np.exp(1j * phi) * R / (1.0 + abs(p) ** 2) * np.conj(c2 - c1) / abs(c2 - c1)
    return sign * np.real(w * _weierstrass_vector(p))


def _sphere_graph(graph: SQuadGraph, sphere_label: Label):
    """``(s1, black, s2)`` for every black vertex joining two sphere vertices."""
    out = []
    for b in graph.vertices_with(Label.BLACK):
        nb = [w for w in graph.adjacency[b] if graph.labels[w] is sphere_label]
        if len(nb) == 2:
            out.append((nb[0], b, nb[1]))
    return out


def _integrate_sphere_graph(triples, vectors, basepoint):
    """Positions from edge vectors on the sphere graph; returns (pos, worst co-tree gap, gaps)."""
    adj: dict[int, list[tuple[int, np.ndarray]]] = {}
    for (s1, _, s2), d in zip(triples, vectors):
        adj.setdefault(s1, []).append((s2, d))
        adj.setdefault(s2, []).append((s1, -d))
    if basepoint is None or basepoint not in adj:
        basepoint = min(adj)
    pos = {basepoint: np.zeros(3)}
    queue = deque([basepoint])
    while queue:
        u = queue.popleft()
        for v, d in adj[u]:
            if v not in pos:
                pos[v] = pos[u] + d
                queue.append(v)
    gaps = [float(np.linalg.norm(pos[s2] - pos[s1] - d)) for (s1, _, s2), d in zip(triples, vectors)]
    return pos, gaps


def _fit_circle(points: np.ndarray):
    """Circle through ``points`` (least squares); returns ``(Circle3D, max deviation)``."""
    c0 = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - c0)
    e1, e2, n = vt
    P = np.column_stack([(points - c0) @ e1, (points - c0) @ e2])
    M = np.column_stack([2 * P, np.ones(len(P))])
    sol = np.linalg.lstsq(M, np.sum(P * P, axis=1), rcond=None)[0]
    rad = float(np.sqrt(sol[2] + sol[0] ** 2 + sol[1] ** 2))
    center = c0 + sol[0] * e1 + sol[1] * e2
    dev = max(
        float(np.max(np.abs((points - c0) @ n))),
        float(np.max(np.abs(np.linalg.norm(P - sol[:2], axis=1) - rad))),
    )
    return Circle3D(center, rad, n), dev


def _local_contacts(graph, v, contacts, edges) -> dict[int, np.ndarray]:
    """Contacts around ``v`` chained through local edges, so a period cut is not crossed."""
    order, fans = graph._fan(v)
    if not order or order[0] not in contacts:
        return {b: contacts[b] for b in graph.adjacency[v] if b in contacts}
    out = {order[0]: contacts[order[0]]}
    for i, fi in enumerate(fans):
        b, nxt = order[i], order[(i + 1) % len(order)]
        s = graph.opposite(fi, v)
        if nxt in out or (b, s) not in edges or (s, nxt) not in edges:
            break
        out[nxt] = out[b] + edges[b, s] + edges[s, nxt]
    if len(out) < sum(b in contacts for b in graph.adjacency[v]):
        return {b: contacts[b] for b in graph.adjacency[v] if b in contacts}
    return out


def _assemble(graph, triples, vectors, radii, sphere_label, basepoint, meta, cycle_tol=1e-9, cls=None,
              allow_periods=False):
    cls = cls or MinimalSurface
    pos, gaps = _integrate_sphere_graph(triples, vectors, basepoint)
    spheres = {s: Sphere3D(pos[s], radii[s]) for s in pos}
    contacts, edges = {}, {}
    for (s1, b, s2), d in zip(triples, vectors):
        if b in contacts:
            continue
        u = d / np.linalg.norm(d)
        contacts[b] = pos[s1] + radii[s1] * u
        edges[s1, b] = radii[s1] * u
        edges[b, s1] = -radii[s1] * u
        edges[s2, b] = -radii[s2] * u
        edges[b, s2] = radii[s2] * u
    circles, circle_fit, dropped = {}, 0.0, 0
    diam = float(np.ptp(np.array(list(pos.values())), axis=0).max()) if pos else 0.0
    for v in range(graph.n_vertices):
        lab = graph.labels[v]
        if not lab.white or lab is sphere_label:
            continue
        local = _local_contacts(graph, v, contacts, edges)
        if len(local) >= 3:
            pts = np.array(list(local.values()))
            circ, dev = _fit_circle(pts)
            if len(pts) > 3 and dev > 1e-9 * max(diam, 1e-300):
                # contacts are not concyclic; no circle at this vertex
                dropped += 1
                continue
            circles[v] = circ
            circle_fit = max(circle_fit, dev)
            for b, x in local.items():
                edges[v, b] = x - circ.center
                edges[b, v] = -edges[v, b]
    thresh = cycle_tol * max(diam, 1e-300)
    periods: list[np.ndarray] = []
    if allow_periods:
        for (s1, _, s2), d, gp in zip(triples, vectors, gaps):
            if gp > thresh:
                mis = pos[s2] - pos[s1] - d
                if not any(min(np.linalg.norm(mis - q), np.linalg.norm(mis + q)) <= thresh for q in periods):
                    periods.append(mis)
        gaps = [0.0 if gp > thresh else gp for gp in gaps]
    gap = max(gaps, default=0.0)
    if gap > thresh:
        k = int(np.argmax(gaps))
        s1, b, s2 = triples[k]
        raise MinimalityError(
            f"cycle through edge {s1}-{b}-{s2} fails to close by {gap:.3e} (diameter {diam:.3e})"
        )
    meta = dict(meta, cycle_gap=gap, circle_fit=circle_fit, circles_dropped=dropped, periods=periods)
    return cls(graph, spheres, circles, contacts, meta, edges, lattice=periods)


def _black_signs(graph, triples, signs):
    if signs is None:
        signs = assign_edge_signs(graph, require_simply_connected=False)
    return [signs[edge_key(s1, b)] for s1, b, _ in triples]


def build_from_weierstrass(
    pattern: PlanarPattern,
    signs: dict[Edge, int] | None = None,
    phi: float = 0.0,
    basepoint: int | None = None,
    cycle_tol: float = 1e-9,
    allow_periods: bool = False,
) -> MinimalSurface:
    """Integrate the discrete Weierstrass edges over the sphere graph.

    Spheres sit at the sphere-labelled vertices, with radii from the planar
    circle through its contact; contacts divide the centre segments in the
    ratio of the radii.  Circles are fitted through their contacts.
    """
    g = pattern.graph
    triples = _sphere_graph(g, Label.SPHERE)
    sg = _black_signs(g, triples, signs)
    radii = {}
    vectors = []
    for (s1, b, s2), sgn in zip(triples, sg):
        p = pattern.contacts[b]
        for s in (s1, s2):
            radii.setdefault(s, weierstrass_sphere_radius(pattern.centers[s], p))
        vectors.append(weierstrass_edge(pattern.centers[s1], pattern.centers[s2], p, sgn, phi))
    meta = {"construction": "weierstrass", "phi": phi}
    return _assemble(g, triples, vectors, radii, Label.SPHERE, basepoint, meta, cycle_tol, None, allow_periods)


def associated_family_geometric(
    koebe: KoebePolyhedron,
    signs: dict[Edge, int] | None = None,
    phi: float = 0.0,
    basepoint: int | None = None,
    cycle_tol: float = 1e-9,
    allow_periods: bool = False,
) -> "AssociatedFamilyMember":
    """Member ``phi`` of the associated family of the dual of ``koebe``.

    Every polyhedron edge (between touching spheres) is rotated by ``phi``
    about the normal of S^2 at its contact point, then dualized with the
    coefficient ``1 / (R1 R2)`` of the two sphere radii.  Circles are fitted
    through the contacts where these are concyclic.
    """
    g = koebe.graph
    sphere_label = g.labels[next(iter(koebe.spheres))]
    triples = [(s1, b, s2) for s1, b, s2 in _sphere_graph(g, sphere_label) if s1 in koebe.spheres and s2 in koebe.spheres]
    triples = [t for t in triples if koebe.spheres[t[0]].radius > 0 and koebe.spheres[t[2]].radius > 0]
    sg = _black_signs(g, triples, signs)
    vectors = []
    radii = {s: 1.0 / sp.radius for s, sp in koebe.spheres.items() if sp.radius > 0}
    for (s1, b, s2), sgn in zip(triples, sg):
        S1, S2 = koebe.spheres[s1], koebe.spheres[s2]
        axis = koebe.contacts[b] / np.linalg.norm(koebe.contacts[b])
        l = rotate(S2.center - S1.center, axis, phi)
        vectors.append(sgn * l / (S1.radius * S2.radius))
    meta = {"construction": "associated-family", "phi": phi}
    out = _assemble(g, triples, vectors, radii, sphere_label, basepoint, meta, cycle_tol, AssociatedFamilyMember, allow_periods)
    out.phi = float(phi)
    return out


def polygon_closure(surface: MinimalSurface, sphere_label: Label | None = None) -> float:
    """Worst closure gap of the sphere-centre polygons around circle vertices."""
    g = surface.graph
    worst = 0.0
    for v in range(g.n_vertices):
        lab = g.labels[v]
        if not lab.white or v in surface.spheres or not g.is_interior(v):
            continue
        ring = [w for fi in g.star_faces(v) for w in [g.opposite(fi, v)]]
        if not all(w in surface.spheres for w in ring):
            continue
        total = np.zeros(3)
        for fi in g.star_faces(v):
            f = g.faces[fi]
            a = f.index(v)
            b_prev, s, b_next = f[(a - 1) % 4], f[(a + 2) % 4], f[(a + 1) % 4]
            total += surface.edge(b_next, s) + surface.edge(s, b_prev)
        worst = max(worst, float(np.linalg.norm(total)))
    return worst
