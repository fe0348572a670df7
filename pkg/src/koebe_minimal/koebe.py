"""S-isothermic surfaces, Koebe polyhedra and their central extensions."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geomcore import (
    Circle3D,
    GeometryError,
    Sphere3D,
    cross_ratio_space,
    orthonormal_frame,
    plane_circle_to_sphere,
    stereographic_project,
)
from .pattern_plane import PlanarPattern
from .pattern_sphere import SphericalPattern, rho_from_radius
from .quadgraph import Label, SQuadGraph


@dataclass
class SIsothermicSurface:
    """Spheres and circles on the white vertices, contact points on the black ones.

    Which whites carry spheres is given by the keys of ``spheres``; it need
    not follow the graph labels (the role can be swapped).
    """

    graph: SQuadGraph
    spheres: dict[int, Sphere3D]
    circles: dict[int, Circle3D]
    contacts: dict[int, np.ndarray]
    meta: dict = field(default_factory=dict)

    def center(self, v: int) -> np.ndarray:
        if v in self.spheres:
            return self.spheres[v].center
        if v in self.circles:
            return self.circles[v].center
        return self.contacts[v]

    def positions(self) -> dict[int, np.ndarray]:
        out = {v: s.center for v, s in self.spheres.items()}
        out.update({v: c.center for v, c in self.circles.items()})
        out.update(self.contacts)
        return out

    def diameter(self) -> float:
        pts = np.array(list(self.positions().values()))
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        return float(np.linalg.norm(hi - lo))

    def sphere_pairs(self):
        """``(s1, black, s2)`` for pairs of spheres touching at a black vertex."""
        g = self.graph
        for b in g.vertices_with(Label.BLACK):
            if b not in self.contacts:
                continue
            nb = [w for w in g.adjacency[b] if w in self.spheres]
            for i, u in enumerate(nb):
                for w in nb[i + 1:]:
                    yield u, b, w

    def face_pairs(self):
        """``(sphere, circle, [blacks])`` for every face."""
        for f in self.graph.faces:
            s = next((v for v in f if v in self.spheres), None)
            c = next((v for v in f if v in self.circles), None)
            if s is None or c is None:
                continue
            yield s, c, [v for v in f if self.graph.labels[v] is Label.BLACK]

    # -- validators --------------------------------------------------------

    def tangency_defect(self) -> float:
        """Worst failure of neighbouring spheres to touch at their contact point."""
        worst = 0.0
        for u, b, w in self.sphere_pairs():
            su, sw = self.spheres[u], self.spheres[w]
            d = np.linalg.norm(su.center - sw.center)
            worst = max(worst, abs(d - su.radius - sw.radius))
            x = self.contacts[b]
            worst = max(worst, abs(np.linalg.norm(x - su.center) - su.radius))
            worst = max(worst, abs(np.linalg.norm(x - sw.center) - sw.radius))
        return worst

    def circle_incidence_defect(self) -> float:
        """Worst distance of a contact point from the circles through it."""
        worst = 0.0
        for _, c, blacks in self.face_pairs():
            circ = self.circles[c]
            for b in blacks:
                x = self.contacts[b] - circ.center
                h = float(np.dot(x, circ.normal))
                rad = np.linalg.norm(x - h * circ.normal)
                worst = max(worst, abs(h), abs(rad - circ.radius))
        return worst

    def orthogonality_defect(self) -> float:
        """Worst sine of the angle between circle tangent and sphere radius at contacts."""
        worst = 0.0
        for s, c, blacks in self.face_pairs():
            sph, circ = self.spheres[s], self.circles[c]
            if sph.radius == 0.0:
                continue
            for b in blacks:
                x = self.contacts[b]
                t = circ.tangent_at(x)
                rad = (x - sph.center) / sph.radius
                worst = max(worst, float(np.linalg.norm(np.cross(t, rad))))
        return worst

    def report(self) -> dict[str, float]:
        return {
            "sphere_tangency": self.tangency_defect(),
            "circle_incidence": self.circle_incidence_defect(),
            "circle_sphere_orthogonality": self.orthogonality_defect(),
        }


@dataclass
class KoebePolyhedron(SIsothermicSurface):
    """S-isothermic surface whose circles lie in the unit sphere (the midsphere)."""

    def midsphere_orthogonality_defect(self) -> float:
        """Worst ``|d^2 - 1 - R^2| / (1 + R^2)`` over spheres."""
        worst = 0.0
        for s in self.spheres.values():
            d2 = float(np.dot(s.center, s.center))
            worst = max(worst, abs(d2 - 1.0 - s.radius**2) / (1.0 + s.radius**2))
        return worst

    def circles_on_midsphere_defect(self) -> float:
        worst = 0.0
        for c in self.circles.values():
            d2 = float(np.dot(c.center, c.center))
            worst = max(worst, abs(d2 + c.radius**2 - 1.0))
        return worst

    def edge_tangency_defect(self) -> float:
        """Worst deviation of polyhedron edges from touching S^2 at their contact.

        The edge through touching spheres ``u, w`` is the segment of their
        centres; its closest point to the origin must be the contact, of norm 1.
        """
        worst = 0.0
        for u, b, w in self.sphere_pairs():
            a, c = self.spheres[u].center, self.spheres[w].center
            d = c - a
            t = -float(np.dot(a, d)) / float(np.dot(d, d))
            p = a + t * d
            worst = max(worst, abs(np.linalg.norm(p) - 1.0), float(np.linalg.norm(p - self.contacts[b])))
        return worst

    def report(self) -> dict[str, float]:
        out = super().report()
        out.update(
            midsphere_orthogonality=self.midsphere_orthogonality_defect(),
            circles_on_midsphere=self.circles_on_midsphere_defect(),
            edge_tangency=self.edge_tangency_defect(),
        )
        return out


ROLE_LABELS = "labels"
ROLE_SWAPPED = "swapped"


def _sphere_whites(graph: SQuadGraph, role_choice: str) -> Label:
    if role_choice == ROLE_LABELS:
        return Label.SPHERE
    if role_choice == ROLE_SWAPPED:
        return Label.CIRCLE
    raise ValueError(f"role_choice must be {ROLE_LABELS!r} or {ROLE_SWAPPED!r}")


def build_koebe(pattern: SphericalPattern, role_choice: str = ROLE_LABELS) -> KoebePolyhedron:
    """Spheres orthogonal to S^2 along the sphere-role circles, the rest kept as circles.

    A circle with spherical centre ``u`` and radius ``r`` becomes the sphere
    with centre ``u / cos r`` and radius ``|tan r|``.  Great circles are
    rejected.  Point circles (``r = 0``) give point spheres on S^2.
    """
    sphere_label = _sphere_whites(pattern.graph, role_choice)
    spheres, circles = {}, {}
    for v, u in pattern.centers.items():
        r = pattern.radii[v]
        if pattern.graph.labels[v] is sphere_label:
            c = np.cos(r)
            if abs(c) < 1e-12:
                raise GeometryError(f"circle {v} is a great circle; its orthogonal sphere is a plane")
            spheres[v] = Sphere3D(u / c, float(abs(np.tan(r))))
        else:
            circles[v] = Circle3D(np.cos(r) * u, float(np.sin(r)), u)
    contacts = {b: np.asarray(p, dtype=float) for b, p in pattern.contacts.items()}
    return KoebePolyhedron(pattern.graph, spheres, circles, contacts, {"role_choice": role_choice})


def spherical_from_planar(pattern: PlanarPattern) -> SphericalPattern:
    """Stereographic image of a planar pattern."""
    centers, radii = {}, {}
    for v, c in pattern.centers.items():
        centers[v], radii[v] = plane_circle_to_sphere(c, pattern.radii[v])
    keys = list(pattern.contacts)
    pts = stereographic_project(np.array([pattern.contacts[k] for k in keys]))
    contacts = dict(zip(keys, pts))
    rho = {v: float(rho_from_radius(r)) for v, r in radii.items()}
    return SphericalPattern(pattern.graph, rho, centers, radii, contacts)


def koebe_from_planar(pattern: PlanarPattern, role_choice: str = ROLE_LABELS) -> KoebePolyhedron:
    return build_koebe(spherical_from_planar(pattern), role_choice)


# -- central extension ---------------------------------------------------------


@dataclass
class KiteMesh:
    """Quad mesh with a 3D point for every vertex of the quad-graph."""

    graph: SQuadGraph
    positions: dict[int, np.ndarray]
    skip_faces: frozenset[int] = frozenset()

    def faces(self):
        for fi, f in enumerate(self.graph.faces):
            if fi not in self.skip_faces:
                yield fi, f

    def face_points(self, fi: int) -> np.ndarray:
        return np.array([self.positions[v] for v in self.graph.faces[fi]])

    def diameter(self) -> float:
        pts = np.array(list(self.positions.values()))
        return float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))

    def planarity_defect(self) -> float:
        """Worst distance of a face's fourth point from the plane of the other three."""
        worst = 0.0
        for fi, _ in self.faces():
            p = self.face_points(fi)
            n = np.cross(p[1] - p[0], p[3] - p[0])
            nn = np.linalg.norm(n)
            if nn == 0:
                continue
            worst = max(worst, abs(float(np.dot(p[2] - p[0], n))) / nn)
        return worst

    def conformal_square_defect(self) -> float:
        """Worst ``|cr + 1|`` over faces."""
        worst = 0.0
        for fi, _ in self.faces():
            worst = max(worst, abs(cross_ratio_space(*self.face_points(fi)) + 1.0))
        return worst

    def right_angle_defect(self) -> float:
        """Worst ``|cos|`` of the kite angles at black vertices."""
        worst = 0.0
        for fi, f in self.faces():
            for a in range(4):
                v = f[a]
                if self.graph.labels[v] is not Label.BLACK:
                    continue
                p = self.positions[v]
                u = self.positions[f[a - 1]] - p
                w = self.positions[f[(a + 1) % 4]] - p
                worst = max(worst, abs(float(np.dot(u, w))) / (np.linalg.norm(u) * np.linalg.norm(w)))
        return worst


def central_extension(surface: SIsothermicSurface) -> KiteMesh:
    """Kite mesh: blacks at contacts, whites at the centres of their sphere or circle.

    Faces with a point sphere (zero-length edges) are kept in the graph but
    listed in ``skip_faces``.
    """
    skip = frozenset(
        fi
        for fi, f in enumerate(surface.graph.faces)
        if any(v in surface.spheres and surface.spheres[v].radius == 0.0 for v in f)
    )
    return KiteMesh(surface.graph, surface.positions(), skip)


# -- touching coins ----------------------------------------------------------------


@dataclass(frozen=True)
class TouchingCoinsResult:
    residual: float
    indeterminate: bool
    concyclic: bool
    contacts: np.ndarray


def _circle_distance(c: Circle3D, x: np.ndarray) -> float:
    y = x - c.center
    h = float(np.dot(y, c.normal))
    return float(np.hypot(h, np.linalg.norm(y - h * c.normal) - c.radius))


def touching_point(c1: Circle3D, c2: Circle3D) -> np.ndarray:
    """Point of ``c1`` closest to ``c2`` (the contact for touching circles).

    Touching circles share their tangent line, so ``c1`` touches the plane
    of ``c2`` at the contact: the candidates are the two points of ``c1``
    extremal in height over that plane (for parallel planes, the two points
    on the line towards the centre of ``c2``).
    """
    e1, e2 = orthonormal_frame(c1.normal)
    A = c1.radius * float(np.dot(c2.normal, e1))
    B = c1.radius * float(np.dot(c2.normal, e2))
    amp = float(np.hypot(A, B))
    if amp > 1e-12 * max(c1.radius, 1.0):
        base = np.arctan2(B, A)
        cands = [c1.point(base), c1.point(base + np.pi)]
    else:
        d = c2.center - c1.center
        d = d - np.dot(d, c1.normal) * c1.normal
        nd = np.linalg.norm(d)
        u = d / nd if nd > 0 else e1
        cands = [c1.center + c1.radius * u, c1.center - c1.radius * u]
    return min(cands, key=lambda x: _circle_distance(c2, x))


def _generalized_sphere_nullspace(points: np.ndarray, tol: float) -> np.ndarray:
    """Basis of ``(a, b, c)`` with ``a |x|^2 + b.x + c = 0`` through all points."""
    scale = max(1.0, float(np.abs(points).max()))
    q = points / scale
    A = np.column_stack([np.sum(q * q, axis=1), q, np.ones(len(q))])
    _, s, vt = np.linalg.svd(A)
    s = np.concatenate([s, np.zeros(5 - len(s))])
    return vt[s <= tol * s[0]], scale


def check_touching_coins(c1: Circle3D, c2: Circle3D, c3: Circle3D, c4: Circle3D, tol: float = 1e-9) -> TouchingCoinsResult:
    """How far four cyclically touching circles are from meeting one sphere orthogonally.

    The residual is the largest sine of the angle between a coin's tangent
    and the sphere's radius at a contact point, for the sphere through the
    four contacts.  When the contacts are concyclic that sphere is only
    determined up to a pencil; each coin then picks the pencil member it
    meets orthogonally and the median choice is scored.  The result is
    flagged ``indeterminate`` when the sphere is not unique or when the coins
    themselves lie on a common sphere or plane.
    """
    coins = [c1, c2, c3, c4]
    contacts = np.array([touching_point(coins[i], coins[(i + 1) % 4]) for i in range(4)])
    samples = np.array([c.point(t) for c in coins for t in (0.0, 2.0, 4.0)])
    cospherical = len(_generalized_sphere_nullspace(samples, 1e-9)[0]) >= 1
    null, scale = _generalized_sphere_nullspace(contacts, tol)
    concyclic = len(null) >= 2
    indeterminate = cospherical or concyclic

    # (coin, contact) incidences: coin i meets contacts i-1 and i
    inc = [(i, contacts[(i - 1) % 4]) for i in range(4)] + [(i, contacts[i]) for i in range(4)]

    def residual_for(center, plane_normal=None):
        worst = 0.0
        for i, x in inc:
            t = coins[i].tangent_at(x)
            rad = plane_normal if plane_normal is not None else x - center
            rad = rad / np.linalg.norm(rad)
            worst = max(worst, float(np.linalg.norm(np.cross(t, rad))))
        return worst

    def result(res):
        return TouchingCoinsResult(res, indeterminate, concyclic, contacts)

    if not concyclic:
        a, b = null[-1][0], null[-1][1:4]
        if abs(a) <= 1e-12 * np.linalg.norm(b):
            return result(residual_for(None, b))
        return result(residual_for(-b / (2 * a) * scale))

    # pencil of spheres through the circle gamma of the contacts; each coin
    # selects the member it meets orthogonally, the median choice is scored
    g = contacts.mean(axis=0)
    _, _, vt = np.linalg.svd(contacts - g)
    e1, e2, m = vt
    P = np.column_stack([(contacts - g) @ e1, (contacts - g) @ e2])
    A = np.column_stack([2 * P, np.ones(4)])
    sol = np.linalg.lstsq(A, np.sum(P * P, axis=1), rcond=None)[0]
    g = g + sol[0] * e1 + sol[1] * e2
    hs = []
    for i, x in inc:
        t = coins[i].tangent_at(x)
        tm = np.cross(t, m)
        den = float(np.dot(tm, tm))
        if den < 1e-24:
            continue
        hs.append(float(np.dot(tm, np.cross(t, x - g))) / den)
    if not hs:
        # every coin is tangent to the pencil axis: only the plane of gamma fits
        return result(residual_for(None, m))
    return result(residual_for(g + float(np.median(hs)) * m))
