"""Geometry bundles and their OBJ and JSON serialisations."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geomcore import Circle3D, Sphere3D
from .koebe import KoebePolyhedron, SIsothermicSurface
from .minimal import MinimalSurface
from .quadgraph import SQuadGraph

FORMAT_VERSION = 1

_VEC = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}
_ID = {"type": "integer", "minimum": 0}

BUNDLE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["format", "version", "spheres", "circles", "contacts", "kite_faces", "flags", "metadata"],
    "properties": {
        "format": {"const": "koebe-minimal-bundle"},
        "version": {"const": FORMAT_VERSION},
        "graph": {"type": ["object", "null"]},
        "spheres": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "center", "radius"],
                "properties": {"id": _ID, "center": _VEC, "radius": {"type": "number", "minimum": 0}},
            },
        },
        "circles": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "center", "radius", "normal"],
                "properties": {"id": _ID, "center": _VEC, "radius": {"type": "number"}, "normal": _VEC},
            },
        },
        "contacts": {
            "type": "array",
            "items": {"type": "object", "required": ["id", "point"], "properties": {"id": _ID, "point": _VEC}},
        },
        "kite_faces": {"type": "array", "items": {"type": "array", "items": _ID, "minItems": 4, "maxItems": 4}},
        "edge_vectors": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["edge", "vector"],
                "properties": {"edge": {"type": "array", "items": _ID, "minItems": 2, "maxItems": 2}, "vector": _VEC},
            },
        },
        "rays": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "origin", "direction"],
                "properties": {"id": _ID, "origin": _VEC, "direction": _VEC},
            },
        },
        "periods": {"type": "array", "items": _VEC},
        "flags": {"type": "object", "additionalProperties": {"type": "array", "items": _ID}},
        "metadata": {
            "type": "object",
            "properties": {"residuals": {"type": "object", "additionalProperties": {"type": "number"}}},
        },
    },
}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, int, bool)) or x is None or isinstance(x, str):
        return x.item() if isinstance(x, np.generic) else x
    return str(x)


def _vec(v) -> list[float]:
    return [float(c) for c in v]


@dataclass
class GeometryBundle:
    graph: SQuadGraph | None = None
    spheres: dict[int, Sphere3D] = field(default_factory=dict)
    circles: dict[int, Circle3D] = field(default_factory=dict)
    contacts: dict[int, np.ndarray] = field(default_factory=dict)
    kite_faces: list[tuple[int, int, int, int]] = field(default_factory=list)
    edge_vectors: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)
    rays: dict[int, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    periods: list[np.ndarray] = field(default_factory=list)
    flags: dict[str, list[int]] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def positions(self) -> dict[int, np.ndarray]:
        out = {v: s.center for v, s in self.spheres.items()}
        out.update({v: c.center for v, c in self.circles.items()})
        out.update(self.contacts)
        return out

    def to_dict(self) -> dict:
        return {
            "format": "koebe-minimal-bundle",
            "version": FORMAT_VERSION,
            "graph": _jsonable(self.graph.to_dict()) if self.graph is not None else None,
            "spheres": [
                {"id": v, "center": _vec(s.center), "radius": float(s.radius)} for v, s in sorted(self.spheres.items())
            ],
            "circles": [
                {"id": v, "center": _vec(c.center), "radius": float(c.radius), "normal": _vec(c.normal)}
                for v, c in sorted(self.circles.items())
            ],
            "contacts": [{"id": v, "point": _vec(p)} for v, p in sorted(self.contacts.items())],
            "kite_faces": [list(f) for f in self.kite_faces],
            "edge_vectors": [{"edge": list(e), "vector": _vec(d)} for e, d in sorted(self.edge_vectors.items())],
            "rays": [
                {"id": v, "origin": _vec(o), "direction": _vec(d)} for v, (o, d) in sorted(self.rays.items())
            ],
            "periods": [_vec(p) for p in self.periods],
            "flags": {k: sorted(v) for k, v in sorted(self.flags.items())},
            "metadata": _jsonable(self.metadata),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GeometryBundle":
        if data.get("format") != "koebe-minimal-bundle":
            raise ValueError("not a geometry bundle")
        arr = lambda v: np.array(v, dtype=float)  # noqa: E731
        return cls(
            graph=SQuadGraph.from_dict(data["graph"]) if data.get("graph") else None,
            spheres={d["id"]: Sphere3D(arr(d["center"]), float(d["radius"])) for d in data["spheres"]},
            circles={
                d["id"]: Circle3D(arr(d["center"]), float(d["radius"]), arr(d["normal"])) for d in data["circles"]
            },
            contacts={d["id"]: arr(d["point"]) for d in data["contacts"]},
            kite_faces=[tuple(f) for f in data["kite_faces"]],
            edge_vectors={tuple(d["edge"]): arr(d["vector"]) for d in data.get("edge_vectors", [])},
            rays={d["id"]: (arr(d["origin"]), arr(d["direction"])) for d in data.get("rays", [])},
            periods=[arr(p) for p in data.get("periods", [])],
            flags={k: list(v) for k, v in data["flags"].items()},
            metadata=data["metadata"],
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, GeometryBundle):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def to_surface(self) -> SIsothermicSurface:
        """The surface class recorded in ``metadata["kind"]`` (minimal by default)."""
        if self.graph is None:
            raise ValueError("bundle has no combinatorics")
        kind = self.metadata.get("kind", "minimal")
        if kind in ("koebe", "s-isothermic"):
            cls = KoebePolyhedron if kind == "koebe" else SIsothermicSurface
            return cls(self.graph, dict(self.spheres), dict(self.circles), dict(self.contacts),
                       dict(self.metadata.get("parameters", {})))
        return MinimalSurface(
            self.graph, dict(self.spheres), dict(self.circles), dict(self.contacts),
            dict(self.metadata.get("parameters", {})), dict(self.edge_vectors), None, dict(self.rays),
            lattice=list(self.periods),
        )


def surface_residuals(surface: SIsothermicSurface) -> dict[str, float]:
    """Validator outputs that can be recomputed from the exported geometry."""
    rep = surface.report()
    rep.pop("dual_closure", None)
    return {k: float(v) for k, v in rep.items()}


def bundle_from_surface(surface: SIsothermicSurface, parameters: dict | None = None) -> GeometryBundle:
    g = surface.graph
    zero = {v for v, s in surface.spheres.items() if s.radius == 0.0}
    pos = surface.positions()
    faces = [tuple(f) for f in g.faces if all(v in pos and v not in zero for v in f)]
    flags = {}
    for name in ("branch", "end"):
        vs = [v for v in range(g.n_vertices) if g.has_flag(v, name)]
        if vs:
            flags[name] = vs
    params = dict(surface.meta if parameters is None else parameters)
    params = {k: v for k, v in params.items() if isinstance(v, (int, float, str, bool, np.floating, np.integer))}
    if isinstance(surface, KoebePolyhedron):
        kind = "koebe"
    elif isinstance(surface, MinimalSurface):
        kind = "minimal"
    else:
        kind = "s-isothermic"
    meta = {"kind": kind, "parameters": _jsonable(params), "residuals": surface_residuals(surface)}
    edges = getattr(surface, "edge_vectors", {}) or {}
    rays = getattr(surface, "rays", {}) or {}
    lattice = getattr(surface, "lattice", None) or []
    return GeometryBundle(
        g,
        dict(surface.spheres),
        dict(surface.circles),
        dict(surface.contacts),
        faces,
        dict(edges),
        dict(rays),
        list(lattice),
        flags,
        meta,
    )


# -- JSON ---------------------------------------------------------------------


def export_json(bundle: GeometryBundle, path) -> None:
    text = json.dumps(bundle.to_dict(), indent=1, sort_keys=True)
    Path(path).write_text(text + "\n")


def import_json(path) -> GeometryBundle:
    return GeometryBundle.from_dict(json.loads(Path(path).read_text()))


# -- OBJ ----------------------------------------------------------------------


def icosphere(level: int = 0) -> tuple[np.ndarray, list[tuple[int, int, int]]]:
    """Unit icosahedron subdivided ``level`` times, projected to the sphere."""
    t = (1.0 + 5.0**0.5) / 2.0
    verts = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    pts = [np.array(v, dtype=float) / np.linalg.norm(v) for v in verts]
    for _ in range(level):
        mid: dict[tuple[int, int], int] = {}

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in mid:
                p = pts[a] + pts[b]
                pts.append(p / np.linalg.norm(p))
                mid[key] = len(pts) - 1
            return mid[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    return np.array(pts), faces


def _fmt(p) -> str:
    return " ".join(repr(float(c)) for c in p)


def obj_text(bundle: GeometryBundle, sphere_tessellation_level: int = 0, circle_segments: int = 32,
             truncation: float = 1.0) -> str:
    """OBJ text of a bundle; identical inputs give identical text."""
    lines = ["# koebe-minimal geometry"]
    verts: list[str] = []

    def add(p) -> int:
        verts.append("v " + _fmt(p))
        return len(verts)

    body: list[str] = []
    pos = bundle.positions()
    if bundle.kite_faces:
        body.append("g kite")
        index: dict[int, int] = {}
        for f in bundle.kite_faces:
            # faces across a period cut are placed from their local edges
            local = [pos[f[0]]]
            for a in range(3):
                e = bundle.edge_vectors.get((f[a], f[a + 1]))
                local.append(local[-1] + e if e is not None else pos[f[a + 1]])
            if all(np.allclose(pos[v], q, atol=1e-9 * (1 + np.linalg.norm(q))) for v, q in zip(f, local)):
                ids = []
                for v in f:
                    if v not in index:
                        index[v] = add(pos[v])
                    ids.append(index[v])
            else:
                ids = [add(q) for q in local]
            body.append("f " + " ".join(map(str, ids)))
    spheres = [(v, s) for v, s in sorted(bundle.spheres.items()) if s.radius > 0]
    if spheres:
        unit, tris = icosphere(sphere_tessellation_level)
        body.append("g spheres")
        for _, s in spheres:
            base = len(verts)
            for u in unit:
                add(s.center + s.radius * u)
            body += ["f " + " ".join(str(base + 1 + i) for i in t) for t in tris]
    if bundle.circles:
        body.append("g circles")
        ts = 2 * np.pi * np.arange(circle_segments) / circle_segments
        for _, c in sorted(bundle.circles.items()):
            ids = [add(c.point(t)) for t in ts]
            body.append("l " + " ".join(map(str, ids + ids[:1])))
    if bundle.rays:
        body.append("g rays")
        for _, (o, d) in sorted(bundle.rays.items()):
            a = add(o)
            b = add(np.asarray(o) + truncation * np.asarray(d))
            body.append(f"l {a} {b}")
    return "\n".join(lines + verts + body) + "\n"


def export_obj(bundle: GeometryBundle, path, sphere_tessellation_level: int = 0, circle_segments: int = 32,
               truncation: float = 1.0) -> None:
    Path(path).write_text(obj_text(bundle, sphere_tessellation_level, circle_segments, truncation))
