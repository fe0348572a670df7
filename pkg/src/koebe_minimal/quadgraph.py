"""Combinatorial S-quad-graphs.

An S-quad-graph is a quadrilateral cell complex whose vertices carry one of
three labels: ``circle`` and ``sphere`` (the two white classes) and ``black``.
Every face reads white, black, white, black around its boundary with one
circle and one sphere vertex on the diagonal.

Vertices are integers ``0..n-1``.  Faces are stored as oriented 4-tuples; the
orientation is global, so each interior edge is traversed once in each
direction.
"""
from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence


class Label(str, Enum):
    CIRCLE = "circle"
    SPHERE = "sphere"
    BLACK = "black"

    @property
    def white(self) -> bool:
        return self is not Label.BLACK


Edge = tuple[int, int]


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class QuadGraphError(ValueError):
    """Raised for combinatorial inconsistencies."""


class ParityError(QuadGraphError):
    """An interior vertex of odd degree blocks a consistent edge labelling."""


class TopologyError(QuadGraphError):
    """The complex has the wrong topology for the requested operation."""


@dataclass
class SQuadGraph:
    """Labelled quad-graph.

    Parameters
    ----------
    labels
        One :class:`Label` per vertex.
    faces
        Oriented quadrilaterals as 4-tuples of vertex ids.
    flags
        Optional per-vertex flag sets (``"branch"``, ``"end"``, ...).
    edge_flags
        Optional per-edge flag sets; keys are sorted vertex pairs.
    coords
        Optional integer coordinates recorded by the generators.
    base_map
        For covers: the vertex of the base graph below each vertex.
    """

    labels: list[Label]
    faces: list[tuple[int, int, int, int]]
    flags: dict[int, set[str]] = field(default_factory=dict)
    edge_flags: dict[Edge, set[str]] = field(default_factory=dict)
    coords: dict[int, tuple] = field(default_factory=dict)
    base_map: dict[int, int] | None = None

    def __post_init__(self):
        self.labels = [Label(lab) for lab in self.labels]
        self.faces = [tuple(int(v) for v in f) for f in self.faces]
        self._cache: dict = {}

    # -- basic incidence -------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    def vertices_with(self, label: Label) -> list[int]:
        return [v for v, lab in enumerate(self.labels) if lab is label]

    def has_flag(self, v: int, flag: str) -> bool:
        return flag in self.flags.get(v, ())

    def edge_has_flag(self, u: int, v: int, flag: str) -> bool:
        return flag in self.edge_flags.get(edge_key(u, v), ())

    @property
    def edge_faces(self) -> dict[Edge, list[int]]:
        if "edge_faces" not in self._cache:
            ef: dict[Edge, list[int]] = defaultdict(list)
            for fi, f in enumerate(self.faces):
                for a in range(4):
                    ef[edge_key(f[a], f[(a + 1) % 4])].append(fi)
            self._cache["edge_faces"] = dict(ef)
        return self._cache["edge_faces"]

    @property
    def edges(self) -> list[Edge]:
        return sorted(self.edge_faces)

    @property
    def vertex_faces(self) -> list[list[int]]:
        if "vertex_faces" not in self._cache:
            vf: list[list[int]] = [[] for _ in range(self.n_vertices)]
            for fi, f in enumerate(self.faces):
                for v in f:
                    vf[v].append(fi)
            self._cache["vertex_faces"] = vf
        return self._cache["vertex_faces"]

    @property
    def adjacency(self) -> list[list[int]]:
        """Neighbours of every vertex, cyclically ordered where possible."""
        if "adjacency" not in self._cache:
            self._cache["adjacency"] = [self.star(v) for v in range(self.n_vertices)]
        return self._cache["adjacency"]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def is_boundary_edge(self, u: int, v: int) -> bool:
        return len(self.edge_faces.get(edge_key(u, v), ())) == 1

    def is_interior(self, v: int) -> bool:
        """True when the faces around ``v`` close up into a single cycle."""
        faces = self.vertex_faces[v]
        if not faces:
            return False
        for w in self._incident(v):
            if len(self.edge_faces[edge_key(v, w)]) != 2:
                return False
        return len(self._fan(v)[1]) == len(faces)

    def _incident(self, v: int) -> set[int]:
        out = set()
        for fi in self.vertex_faces[v]:
            f = self.faces[fi]
            a = f.index(v)
            out.add(f[(a + 1) % 4])
            out.add(f[(a - 1) % 4])
        return out

    def _fan(self, v: int) -> tuple[list[int], list[int]]:
        """Walk the faces around ``v``; returns (ordered neighbours, faces)."""
        faces = self.vertex_faces[v]
        nxt: dict[int, tuple[int, int]] = {}
        prevs = set()
        for fi in faces:
            f = self.faces[fi]
            a = f.index(v)
            prev, succ = f[(a - 1) % 4], f[(a + 1) % 4]
            # several faces may share a prev in a non-manifold input; keep first
            nxt.setdefault(prev, (succ, fi))
            prevs.add(prev)
        succs = {s for s, _ in nxt.values()}
        starts = [p for p in nxt if p not in succs]
        start = min(starts) if starts else min(nxt)
        order, fans = [start], []
        cur = start
        while cur in nxt and len(fans) < len(faces):
            succ, fi = nxt[cur]
            fans.append(fi)
            if succ == start:
                break
            order.append(succ)
            cur = succ
        return order, fans

    def star(self, v: int) -> list[int]:
        """Neighbours of ``v`` in the cyclic order induced by the orientation."""
        if not self.vertex_faces[v]:
            return []
        order, _ = self._fan(v)
        if len(set(order)) != len(self._incident(v)):
            # non-manifold vertex: fall back to a deterministic sorted list
            return sorted(self._incident(v))
        return order

    def star_faces(self, v: int) -> list[int]:
        return self._fan(v)[1]

    def opposite(self, fi: int, v: int) -> int:
        f = self.faces[fi]
        return f[(f.index(v) + 2) % 4]

    def boundary_cycles(self) -> list[list[int]]:
        nxt: dict[int, list[int]] = defaultdict(list)
        for fi, f in enumerate(self.faces):
            for a in range(4):
                u, w = f[a], f[(a + 1) % 4]
                if self.is_boundary_edge(u, w):
                    # boundary runs opposite to the face orientation
                    nxt[w].append(u)
        seen: set[Edge] = set()
        cycles = []
        for s in sorted(nxt):
            for t in nxt[s]:
                if (s, t) in seen:
                    continue
                cyc, a, b = [s], s, t
                while (a, b) not in seen:
                    seen.add((a, b))
                    cyc.append(b)
                    cand = [c for c in nxt.get(b, []) if (b, c) not in seen]
                    if not cand:
                        break
                    a, b = b, cand[0]
                cycles.append(cyc[:-1] if cyc[-1] == cyc[0] else cyc)
        return cycles

    def euler_characteristic(self) -> int:
        used = {v for f in self.faces for v in f}
        return len(used) - len(self.edges) + len(self.faces)

    def n_components(self) -> int:
        parent = list(range(len(self.faces)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for fs in self.edge_faces.values():
            for g in fs[1:]:
                parent[find(g)] = find(fs[0])
        return len({find(i) for i in range(len(self.faces))})

    def is_simply_connected(self) -> bool:
        if not self.faces or self.n_components() != 1:
            return False
        b = len(self.boundary_cycles())
        chi = self.euler_characteristic()
        return (b == 0 and chi == 2) or (b == 1 and chi == 1)

    def circle_pairs(self) -> list[tuple[int, int]]:
        """The orthogonal white pair (circle, sphere) of every face, in face order."""
        out = []
        for f in self.faces:
            whites = [v for v in f if self.labels[v].white]
            if len(whites) != 2:
                raise QuadGraphError(f"face {f} does not have two white vertices")
            out.append((whites[0], whites[1]))
        return out

    def subgraph(self, face_ids: Iterable[int]) -> "SQuadGraph":
        """Faces restricted to ``face_ids``; vertex ids are kept."""
        keep = sorted(set(face_ids))
        return SQuadGraph(
            labels=list(self.labels),
            faces=[self.faces[i] for i in keep],
            flags={k: set(v) for k, v in self.flags.items()},
            edge_flags={k: set(v) for k, v in self.edge_flags.items()},
            coords=dict(self.coords),
            base_map=None if self.base_map is None else dict(self.base_map),
        )

    # -- serialisation ---------------------------------------------------

    def to_dict(self) -> dict:
        out = {
            "vertices": [
                {"id": v, "label": lab.value, "flags": sorted(self.flags.get(v, ()))}
                for v, lab in enumerate(self.labels)
            ],
            "faces": [list(f) for f in self.faces],
            "edges": [list(e) for e in self.edges],
        }
        if self.edge_flags:
            out["edge_flags"] = [
                {"edge": list(e), "flags": sorted(fl)}
                for e, fl in sorted(self.edge_flags.items())
            ]
        if self.coords:
            out["coords"] = {str(k): list(v) for k, v in sorted(self.coords.items())}
        if self.base_map is not None:
            out["base_map"] = {str(k): v for k, v in sorted(self.base_map.items())}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SQuadGraph":
        verts = sorted(data["vertices"], key=lambda d: d["id"])
        if [d["id"] for d in verts] != list(range(len(verts))):
            raise QuadGraphError("vertex ids must be 0..n-1")
        g = cls(
            labels=[Label(d["label"]) for d in verts],
            faces=[tuple(f) for f in data["faces"]],
            flags={d["id"]: set(d.get("flags", [])) for d in verts if d.get("flags")},
            edge_flags={
                edge_key(*d["edge"]): set(d["flags"]) for d in data.get("edge_flags", [])
            },
            coords={int(k): tuple(v) for k, v in data.get("coords", {}).items()},
            base_map=(
                {int(k): int(v) for k, v in data["base_map"].items()}
                if "base_map" in data
                else None
            ),
        )
        if "edges" in data:
            given = {edge_key(*e) for e in data["edges"]}
            if given != set(g.edges):
                raise QuadGraphError("edge list does not match the faces")
        return g

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SQuadGraph":
        return cls.from_dict(json.loads(text))


# -- validation ---------------------------------------------------------------


@dataclass
class Violation:
    rule: str
    message: str
    ids: tuple = ()


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def __str__(self) -> str:
        if self.ok:
            return "valid S-quad-graph"
        return "\n".join(f"[{v.rule}] {v.message}" for v in self.violations)


def validate(graph: SQuadGraph) -> ValidationReport:
    """Check the S-quad-graph conditions and report every violation.

    Degree rules apply to interior vertices only.  Vertices flagged
    ``branch`` are exempt from the parity rule: their degree doubles on the
    branched cover where the rule is enforced.
    """
    rep = ValidationReport()
    labels = graph.labels
    for fi, f in enumerate(graph.faces):
        if len(set(f)) != 4:
            rep.violations.append(Violation("face-size", f"face {fi} repeats a vertex", (fi,)))
            continue
        if any(not (0 <= v < graph.n_vertices) for v in f):
            rep.violations.append(Violation("face-ids", f"face {fi} has unknown ids", (fi,)))
            continue
        colours = [labels[v].white for v in f]
        if colours not in ([True, False, True, False], [False, True, False, True]):
            rep.violations.append(
                Violation("bipartite", f"face {fi} does not alternate white/black", (fi,))
            )
            continue
        whites = {labels[v] for v in f if labels[v].white}
        if whites != {Label.CIRCLE, Label.SPHERE}:
            rep.violations.append(
                Violation(
                    "circle-sphere",
                    f"face {fi} needs one circle and one sphere vertex, has "
                    + ", ".join(sorted(labels[v].value for v in f if labels[v].white)),
                    (fi,),
                )
            )

    directed: dict[Edge, int] = {}
    for fi, f in enumerate(graph.faces):
        for a in range(4):
            d = (f[a], f[(a + 1) % 4])
            if d in directed:
                rep.violations.append(
                    Violation(
                        "orientation",
                        f"edge {d} traversed in the same direction by faces "
                        f"{directed[d]} and {fi}",
                        (directed[d], fi),
                    )
                )
            directed[d] = fi
    for e, fs in graph.edge_faces.items():
        if len(fs) > 2:
            rep.violations.append(
                Violation("manifold", f"edge {e} bounds {len(fs)} faces", tuple(fs))
            )

    if {"orientation", "manifold", "face-size", "face-ids"} & rep.rules():
        return rep
    for v in range(graph.n_vertices):
        if not graph.vertex_faces[v] or not graph.is_interior(v):
            continue
        d = graph.degree(v)
        if labels[v] is Label.BLACK and d != 4:
            rep.violations.append(
                Violation("black-degree", f"interior black vertex {v} has degree {d}", (v,))
            )
        elif d % 2 and not graph.has_flag(v, "branch"):
            rep.violations.append(
                Violation("parity", f"interior vertex {v} has odd degree {d}", (v,))
            )
    return rep


# -- edge signs ---------------------------------------------------------------


def assign_edge_signs(
    graph: SQuadGraph,
    faces: Sequence[int] | None = None,
    require_simply_connected: bool = True,
) -> dict[Edge, int]:
    """Label edges +1/-1 so every face has equal signs on opposite edges.

    Signs are propagated breadth-first across shared edges starting from the
    first face, whose first edge gets ``+1``.  The labelling is unique up to a
    global flip on a connected complex.
    """
    sub = graph if faces is None else graph.subgraph(faces)
    rep = validate(sub)
    if "orientation" in rep.rules():
        raise TopologyError("complex is not consistently oriented (non-orientable?)")
    for v in range(sub.n_vertices):
        if sub.vertex_faces[v] and sub.is_interior(v) and sub.degree(v) % 2:
            raise ParityError(f"interior vertex {v} has odd degree {sub.degree(v)}")
    if require_simply_connected and not sub.is_simply_connected():
        raise TopologyError("edge labelling requires a simply connected complex")

    signs: dict[Edge, int] = {}
    seen = [False] * len(sub.faces)
    for root in range(len(sub.faces)):
        if seen[root]:
            continue
        f0 = sub.faces[root]
        signs[edge_key(f0[0], f0[1])] = 1
        seen[root] = True
        queue = deque([root])
        while queue:
            fi = queue.popleft()
            f = sub.faces[fi]
            ref = None
            for a in range(4):
                s = signs.get(edge_key(f[a], f[(a + 1) % 4]))
                if s is not None:
                    ref = s if a % 2 == 0 else -s
                    break
            for a in range(4):
                e = edge_key(f[a], f[(a + 1) % 4])
                want = ref if a % 2 == 0 else -ref
                have = signs.setdefault(e, want)
                if have != want:
                    raise TopologyError(
                        f"inconsistent edge labels around face {fi} (edge {e}); "
                        "the complex has non-trivial sign monodromy"
                    )
                for g in sub.edge_faces[e]:
                    if not seen[g]:
                        seen[g] = True
                        queue.append(g)
    return signs


# -- generators ---------------------------------------------------------------


def make_zsquare_patch(m: int, n: int, parity: int = 0) -> SQuadGraph:
    """A (2m+1) x (2n+1) patch of the square grid.

    Vertex coordinates are centred, ``(a, b)`` with ``-m <= a <= m``.  A vertex
    is black iff ``a + b + parity`` is odd; white vertices with even ``a`` are
    spheres, odd ``a`` circles.  With the default ``parity=0`` the centre is a
    sphere vertex; ``parity=1`` puts a black vertex there.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    ids: dict[tuple[int, int], int] = {}
    labels: list[Label] = []
    coords = {}
    for a in range(-m, m + 1):
        for b in range(-n, n + 1):
            ids[a, b] = len(labels)
            coords[len(labels)] = (a, b)
            if (a + b + parity) % 2:
                labels.append(Label.BLACK)
            elif (a + parity) % 2 == 0:
                labels.append(Label.SPHERE)
            else:
                labels.append(Label.CIRCLE)
    faces = [
        (ids[a, b], ids[a + 1, b], ids[a + 1, b + 1], ids[a, b + 1])
        for a in range(-m, m)
        for b in range(-n, n)
    ]
    return SQuadGraph(labels, faces, coords=coords)


def make_zsquare_cylinder(rows: range, period: int) -> SQuadGraph:
    """Square grid ``rows x Z/period`` closed up in the second coordinate.

    Used for the catenoid; ``period`` must be even.  Labels follow
    :func:`make_zsquare_patch` with ``parity=0``.
    """
    if period % 2 or period < 4:
        raise ValueError("period must be even and >= 4")
    rows = list(rows)
    ids = {}
    labels: list[Label] = []
    coords = {}
    for a in rows:
        for b in range(period):
            ids[a, b] = len(labels)
            coords[len(labels)] = (a, b)
            if (a + b) % 2:
                labels.append(Label.BLACK)
            elif a % 2 == 0:
                labels.append(Label.SPHERE)
            else:
                labels.append(Label.CIRCLE)
    faces = [
        (ids[a, b], ids[a + 1, b], ids[a + 1, (b + 1) % period], ids[a, (b + 1) % period])
        for a in rows[:-1]
        for b in range(period)
    ]
    return SQuadGraph(labels, faces, coords=coords)


def _require_even(**kw):
    for name, val in kw.items():
        if val < 2 or val % 2:
            raise ValueError(f"{name} must be a positive even integer, got {val}")


def make_refined_cube(m: int, n: int, k: int) -> SQuadGraph:
    """Surface of the box ``[0,m] x [0,n] x [0,k]`` cut into unit squares.

    Black vertices have odd coordinate sum.  White vertices with all
    coordinates even are circles (this includes the 8 corners, flagged
    ``branch``); the others are spheres.  Faces are oriented counter-clockwise
    seen from outside.
    """
    _require_even(m=m, n=n, k=k)
    dims = (m, n, k)
    ids: dict[tuple[int, int, int], int] = {}
    labels: list[Label] = []
    coords = {}
    flags: dict[int, set[str]] = {}

    def vid(p):
        if p not in ids:
            ids[p] = len(labels)
            coords[ids[p]] = p
            if sum(p) % 2:
                labels.append(Label.BLACK)
            elif all(c % 2 == 0 for c in p):
                labels.append(Label.CIRCLE)
            else:
                labels.append(Label.SPHERE)
            if all(c in (0, d) for c, d in zip(p, dims)):
                flags[ids[p]] = {"branch"}
        return ids[p]

    faces = []
    # (fixed axis, u axis, w axis, outward sign); u x w points outward
    sides = [(0, 2, 1, -1), (0, 1, 2, 1), (1, 0, 2, -1), (1, 2, 0, 1), (2, 1, 0, -1), (2, 0, 1, 1)]
    for ax, ua, wa, sgn in sides:
        fixed = 0 if sgn < 0 else dims[ax]
        for i in range(dims[ua]):
            for j in range(dims[wa]):
                quad = []
                for du, dw in ((0, 0), (1, 0), (1, 1), (0, 1)):
                    p = [0, 0, 0]
                    p[ax], p[ua], p[wa] = fixed, i + du, j + dw
                    quad.append(vid(tuple(p)))
                faces.append(tuple(quad))
    return SQuadGraph(labels, faces, flags=flags, coords=coords)


def _bfs_path(graph: SQuadGraph, src: int, targets: set[int], blocked: set[int]):
    prev = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u in targets and u != src:
            path = [u]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return path[::-1]
        for w in graph.adjacency[u]:
            if w not in prev and (w not in blocked or w in targets):
                prev[w] = u
                queue.append(w)
    return None


def make_branched_double_cover(
    graph: SQuadGraph,
    branch_vertices: Iterable[int],
    cuts: Sequence[Sequence[int]] | None = None,
) -> SQuadGraph:
    """Two-sheeted cover of a sphere-like complex branched at ``branch_vertices``.

    The sheets are glued crosswise along ``cuts``: vertex paths that pair up
    the branch points.  When ``cuts`` is omitted, branch points are paired
    greedily by shortest vertex-disjoint paths.  The result carries
    ``base_map`` (cover vertex -> base vertex) and a ``sheet`` coordinate.
    """
    branch = sorted(set(branch_vertices))
    if len(branch) % 2:
        raise TopologyError(
            f"{len(branch)} branch points: a double cover needs an even number "
            "(loop around all of them has odd monodromy)"
        )
    if cuts is None:
        cuts = []
        todo = list(branch)
        used: set[int] = set()
        while todo:
            a = todo.pop(0)
            path = _bfs_path(graph, a, set(todo), used)
            if path is None:
                raise TopologyError(f"cannot route a cut from branch vertex {a}")
            todo.remove(path[-1])
            used.update(path)
            cuts.append(path)
    cut_edges: set[Edge] = set()
    endpoint_count: dict[int, int] = defaultdict(int)
    for path in cuts:
        for u, w in zip(path[:-1], path[1:]):
            e = edge_key(u, w)
            if e not in graph.edge_faces:
                raise TopologyError(f"cut step {e} is not an edge")
            cut_edges ^= {e}
        endpoint_count[path[0]] += 1
        endpoint_count[path[-1]] += 1
    odd_ends = {v for v, c in endpoint_count.items() if c % 2}
    if odd_ends != set(branch):
        raise TopologyError(
            f"cut system branches at {sorted(odd_ends)}, requested {branch}"
        )

    nf = len(graph.faces)
    parent = list(range(2 * nf * 4))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def corner(fi, sheet, v):
        return (sheet * nf + fi) * 4 + graph.faces[fi].index(v)

    for e, fs in graph.edge_faces.items():
        if len(fs) != 2:
            continue
        f, g = fs
        flip = 1 if e in cut_edges else 0
        for s in (0, 1):
            for v in e:
                parent[find(corner(f, s, v))] = find(corner(g, s ^ flip, v))

    root_id: dict[int, int] = {}
    labels, base_map, coords, flags = [], {}, {}, {}
    preimages: dict[int, set[int]] = defaultdict(set)
    new_faces = []
    for s in (0, 1):
        for fi, f in enumerate(graph.faces):
            quad = []
            for v in f:
                r = find(corner(fi, s, v))
                if r not in root_id:
                    nid = len(labels)
                    root_id[r] = nid
                    labels.append(graph.labels[v])
                    base_map[nid] = v
                    coords[nid] = (graph.coords.get(v), s)
                    if graph.flags.get(v):
                        flags[nid] = set(graph.flags[v])
                quad.append(root_id[r])
                preimages[v].add(root_id[r])
            new_faces.append(tuple(quad))

    for v in range(graph.n_vertices):
        if not graph.vertex_faces[v]:
            continue
        want = 1 if v in branch else 2
        if len(preimages[v]) != want:
            raise TopologyError(
                f"monodromy around vertex {v} is wrong: {len(preimages[v])} "
                f"preimages, expected {want}"
            )
    cover = SQuadGraph(labels, new_faces, flags=flags, coords=coords, base_map=base_map)
    if graph.edge_flags:
        for ce in cover.edges:
            fl = graph.edge_flags.get(edge_key(base_map[ce[0]], base_map[ce[1]]))
            if fl:
                cover.edge_flags[ce] = set(fl)
    return cover


def cube_corner_cuts(graph: SQuadGraph) -> list[list[int]]:
    """Cuts along the four box edges parallel to the third axis of a refined cube."""
    ids = {p: v for v, p in graph.coords.items()}
    m = max(p[0] for p in ids)
    n = max(p[1] for p in ids)
    k = max(p[2] for p in ids)
    return [
        [ids[x, y, z] for z in range(k + 1)] for x in (0, m) for y in (0, n)
    ]


def make_scherk_graph(m: int, n: int) -> SQuadGraph:
    """Quad-graph of the Scherk tower built on the ``m x n x 2`` refined cube.

    The corners pair up along the four short box edges.  The black vertex in
    the middle of each such edge is split in two and a new two-valent sphere
    vertex (flagged ``end``) is inserted between the copies; the two new edges
    are flagged ``degenerate-end``.
    """
    _require_even(m=m, n=n)
    base = make_refined_cube(m, n, 2)
    labels = list(base.labels)
    faces = [list(f) for f in base.faces]
    coords = dict(base.coords)
    flags: dict[int, set[str]] = {}
    edge_flags: dict[Edge, set[str]] = {}
    ids = {p: v for v, p in base.coords.items()}
    for x in (0, m):
        for y in (0, n):
            a, mid, b = ids[x, y, 0], ids[x, y, 1], ids[x, y, 2]
            m1 = len(labels)
            labels.append(Label.BLACK)
            coords[m1] = (x, y, 1, "split")
            # faces in the plane x = const keep the original vertex (m2 = mid)
            for f in faces:
                if mid in f and all(base.coords[v][0] == x for v in f if v < base.n_vertices):
                    f[f.index(mid)] = m1
            m2 = mid
            xv = len(labels)
            labels.append(Label.SPHERE)
            coords[xv] = (x, y, 1, "end")
            flags[xv] = {"end"}
            # orient the filling faces against the existing hole boundary
            directed = {(f[i], f[(i + 1) % 4]) for f in faces for i in range(4)}
            if (a, m1) in directed:
                # hole boundary reversed: m1 -> a -> m2 -> b -> m1
                hole = [m1, a, m2, b]
            else:
                hole = [m2, a, m1, b]
            # hole = [p, a, r, b] with p, r the split copies
            p, _, r, _ = hole
            faces.append([a, r, xv, p])
            faces.append([r, b, p, xv])
            edge_flags[edge_key(xv, m1)] = {"degenerate-end"}
            edge_flags[edge_key(xv, m2)] = {"degenerate-end"}
    return SQuadGraph(labels, [tuple(f) for f in faces], flags=flags, edge_flags=edge_flags, coords=coords)
