"""Orthogonal circle patterns on the unit sphere.

Every white vertex of an S-quad-graph carries a circle on S^2; the two
whites of a face carry circles that intersect orthogonally at the face's two
black vertices.  Radii are parametrised by ``rho = log tan(r/2)``.  The
closure condition at a circle ``j`` reads

    2 * sum_k (arctan e^(rho_k - rho_j) + arctan e^(rho_k + rho_j)) = Phi_j

and is the critical-point equation of a dilogarithm functional ``S``.  ``S``
has a negative direction along ``(1, ..., 1)``, so radii are found by
minimising ``S~(rho) = max_t S(rho + t)`` on the hyperplane ``sum rho = 0``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import kernels
from .geomcore import Circle3D, GeometryError, SphereMobius, mobius_center_normalize, rotate
from .quadgraph import Label, SQuadGraph

TWO_PI = 2.0 * np.pi

RadiiVector = dict[int, float]
AngleTargets = dict[int, float]


class PatternError(ValueError):
    pass


class AngleBudgetError(PatternError):
    """``S(rho + t)`` has no interior maximum in ``t``."""


class ConvergenceError(PatternError):
    pass


class LayoutError(GeometryError):
    pass


# -- circle graph ----------------------------------------------------------------


class CircleGraph:
    """The graph of circles: whites of the quad-graph, one edge per face."""

    def __init__(self, graph: SQuadGraph):
        pairs = graph.circle_pairs()
        self.vertices = sorted({w for p in pairs for w in p})
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.ei = np.array([self.index[a] for a, _ in pairs], dtype=np.int64)
        self.ej = np.array([self.index[b] for _, b in pairs], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.ei)

    def to_array(self, values, default: float | None = None) -> np.ndarray:
        if isinstance(values, Mapping):
            if default is None:
                missing = [v for v in self.vertices if v not in values]
                if missing:
                    raise PatternError(f"no value for circle vertices {missing[:5]}")
            return np.array([float(values.get(v, default)) for v in self.vertices])
        arr = np.asarray(values, dtype=float)
        if arr.shape != (len(self),):
            raise PatternError(f"expected {len(self)} values, got shape {arr.shape}")
        return arr

    def to_map(self, arr) -> dict[int, float]:
        return {v: float(x) for v, x in zip(self.vertices, arr)}


def _circle_graph(graph: SQuadGraph) -> CircleGraph:
    cg = graph._cache.get("circle_graph")
    if cg is None:
        cg = graph._cache["circle_graph"] = CircleGraph(graph)
    return cg


def default_targets(graph: SQuadGraph) -> AngleTargets:
    """``2 pi`` at interior circles, ``4 pi`` at branch circles of a cover.

    Boundary circles have no canonical target and are left out.
    """
    out = {}
    for v in _circle_graph(graph).vertices:
        if not graph.is_interior(v):
            continue
        branched = graph.base_map is not None and graph.has_flag(v, "branch")
        out[v] = 2.0 * TWO_PI if branched else TWO_PI
    return out


def _targets_array(graph, targets) -> np.ndarray:
    cg = _circle_graph(graph)
    if targets is None:
        targets = default_targets(graph)
    phi = cg.to_array(targets, default=np.nan)
    if np.isnan(phi).any():
        missing = [v for v, x in zip(cg.vertices, phi) if np.isnan(x)]
        raise PatternError(f"boundary circles need explicit angle targets: {missing[:5]}")
    return phi


def angle_budget(graph: SQuadGraph) -> float | None:
    """Required ``sum Phi`` of a closed pattern, ``None`` when there is a boundary.

    The kites of a closed pattern tile the sphere once per sheet, and a kite
    with right angles at the contacts has area ``2 (phi_jk + phi_kj) - pi``.
    """
    if graph.boundary_cycles():
        return None
    sheets = 1 if graph.base_map is None else 2
    return np.pi * (_circle_graph(graph).n_edges + 4 * sheets)


def _check_budget(graph: SQuadGraph, phi: np.ndarray) -> None:
    budget = angle_budget(graph)
    if budget is None:
        return
    total = float(np.sum(phi))
    if abs(total - budget) > 1e-9 * budget:
        raise AngleBudgetError(
            f"angle targets sum to {total:.9g} but the closed pattern needs {budget:.9g} "
            f"(imbalance {total - budget:+.3g})"
        )


# -- functional and derivatives ------------------------------------------------


def dilog_F(x: float) -> float:
    """``Im Li2(i e^x)``, the primitive of ``arctan e^x`` vanishing at -inf."""
    return kernels.dilog_f(x)


def napier_half_angle(rho_j: float, rho_k: float) -> float:
    """Half the angle that circle ``k`` covers, seen from the centre of ``j``."""
    return float(np.arctan(np.exp(rho_k - rho_j)) + np.arctan(np.exp(rho_k + rho_j)))


def rho_from_radius(r):
    return np.log(np.tan(np.asarray(r) / 2.0))


def radius_from_rho(rho):
    return 2.0 * np.arctan(np.exp(np.asarray(rho)))


def closure_residual(graph: SQuadGraph, rho, targets=None) -> dict[int, float]:
    """``2 sum_k phi_jk - Phi_j`` per circle; the negative of the gradient."""
    cg = _circle_graph(graph)
    g = kernels.gradient(cg.to_array(rho), cg.ei, cg.ej, _targets_array(graph, targets))
    return cg.to_map(-g)


def functional_value(graph: SQuadGraph, rho, targets=None) -> float:
    cg = _circle_graph(graph)
    return kernels.functional(cg.to_array(rho), cg.ei, cg.ej, _targets_array(graph, targets))


def functional_gradient(graph: SQuadGraph, rho, targets=None) -> np.ndarray:
    """Gradient in the vertex order of the circle graph."""
    cg = _circle_graph(graph)
    return kernels.gradient(cg.to_array(rho), cg.ei, cg.ej, _targets_array(graph, targets))


def functional_hessian(graph: SQuadGraph, rho) -> np.ndarray:
    cg = _circle_graph(graph)
    return kernels.hessian(cg.to_array(rho), cg.ei, cg.ej)


def functional_hessian_quadform(graph: SQuadGraph, rho, direction) -> float:
    cg = _circle_graph(graph)
    r = cg.to_array(rho)
    d = cg.to_array(direction)
    rj, rk = r[cg.ei], r[cg.ej]
    dj, dk = d[cg.ei], d[cg.ej]
    return float(np.sum((dk - dj) ** 2 / np.cosh(rk - rj) - (dk + dj) ** 2 / np.cosh(rk + rj)))


# -- reduced functional -----------------------------------------------------------


def _max_along_ones(rho, ei, ej, phi, t0: float = 0.0, tol: float = 1e-11):
    """Maximiser of ``t -> S(rho + t)``; returns ``(t, newton_steps)``."""
    E = len(ei)
    total = float(np.sum(phi))
    lo_lim, hi_lim = E * np.pi, 3.0 * E * np.pi
    if not lo_lim < total < hi_lim:
        raise AngleBudgetError(
            f"angle budget {total:.6g} outside ({lo_lim:.6g}, {hi_lim:.6g}); "
            "no interior maximum along the diagonal"
        )
    d1 = lambda t: kernels.ones_derivative(rho, ei, ej, phi, t)  # noqa: E731
    # bracket the unique root of the decreasing derivative
    lo, hi = t0 - 1.0, t0 + 1.0
    step = 1.0
    while d1(lo)[0] < 0:
        hi, lo, step = lo, lo - 2 * step, 2 * step
    while d1(hi)[0] > 0:
        lo, hi, step = hi, hi + 2 * step, 2 * step
    t = min(max(t0, lo), hi)
    for it in range(1, 200):
        g, h = d1(t)
        if abs(g) <= tol:
            return t, it
        if g > 0:
            lo = t
        else:
            hi = t
        tn = t - g / h if h < 0 else 0.5 * (lo + hi)
        if not lo < tn < hi:
            tn = 0.5 * (lo + hi)
        if hi - lo <= 4e-16 * max(1.0, abs(t)):
            return tn, it
        t = tn
    raise ConvergenceError("inner maximisation along the diagonal did not converge")


def reduced_functional(graph: SQuadGraph, rho, targets=None) -> tuple[float, float]:
    """``(max_t S(rho + t), argmax t)``."""
    cg = _circle_graph(graph)
    r = cg.to_array(rho)
    phi = _targets_array(graph, targets)
    _check_budget(graph, phi)
    t, _ = _max_along_ones(r, cg.ei, cg.ej, phi)
    return kernels.functional(r + t, cg.ei, cg.ej, phi), t


@dataclass
class SolveInfo:
    iterations: int
    residual_max: float
    t_shift: float
    history: list[float] = field(default_factory=list)


def solve_pattern(
    graph: SQuadGraph,
    targets=None,
    init=None,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    return_info: bool = False,
):
    """Radii of the orthogonal pattern with the given angle targets.

    ``S~`` is minimised on ``sum rho = 0`` by a Newton iteration on the
    reduced Hessian, with negative curvature flipped and near-null (gauge)
    directions dropped, and an Armijo backtracking line search.  Returns the
    radii ``rho + t*`` at which the closure equations hold.
    """
    cg = _circle_graph(graph)
    n = len(cg)
    phi = _targets_array(graph, targets)
    _check_budget(graph, phi)
    ei, ej = cg.ei, cg.ej
    x = np.zeros(n) if init is None else cg.to_array(init).copy()
    x -= x.mean()

    def evaluate(x, t0):
        t, _ = _max_along_ones(x, ei, ej, phi, t0)
        u = x + t
        return kernels.functional(u, ei, ej, phi), t, kernels.gradient(u, ei, ej, phi)

    val, t, g = evaluate(x, 0.0)
    history = []
    for it in range(max_iter):
        res = float(np.max(np.abs(g)))
        history.append(res)
        if res <= tol:
            break
        u = x + t
        H = kernels.hessian(u, ei, ej)
        h1 = H.sum(axis=1)
        Ht = H - np.outer(h1, h1) / h1.sum()
        P = np.eye(n) - 1.0 / n
        lam, V = np.linalg.eigh(P @ Ht @ P)
        gp = g - g.mean()
        coef = V.T @ gp
        cutoff = 1e-10 * max(1.0, float(np.abs(lam).max()))
        keep = np.abs(lam) > cutoff
        d = -(V[:, keep] @ (coef[keep] / np.abs(lam[keep])))
        d -= d.mean()
        norm = float(np.linalg.norm(d))
        if norm > 2.0:
            d *= 2.0 / norm
        slope = float(gp @ d)
        a = 1.0
        gnorm = float(np.linalg.norm(gp))
        while True:
            xn = x + a * d
            vn, tn, gn = evaluate(xn, t)
            if not np.isfinite(vn) or not np.all(np.isfinite(gn)):
                raise ConvergenceError("non-finite value in line search")
            flat = abs(vn - val) <= 1e-13 * (1.0 + abs(val))
            if vn <= val + 1e-4 * a * slope or (flat and np.linalg.norm(gn - gn.mean()) < gnorm):
                break
            a *= 0.5
            if a < 1e-12:
                raise ConvergenceError(f"line search failed at residual {res:.3e}")
        x, val, t, g = xn, vn, tn, gn
    else:
        raise ConvergenceError(f"no convergence in {max_iter} steps, residual {res:.3e}")
    rho = cg.to_map(x + t)
    if return_info:
        return rho, SolveInfo(it, res, t, history)
    return rho


# -- layout -----------------------------------------------------------------------


@dataclass
class SphericalPattern:
    """A realised pattern: spherical centres and radii of circles, contact points."""

    graph: SQuadGraph
    rho: RadiiVector
    centers: dict[int, np.ndarray]
    radii: dict[int, float]
    contacts: dict[int, np.ndarray]
    layout_mismatch: float = 0.0

    def circle(self, v: int) -> Circle3D:
        u, r = self.centers[v], self.radii[v]
        return Circle3D(np.cos(r) * u, float(np.sin(r)), u)

    def circles(self) -> dict[int, Circle3D]:
        return {v: self.circle(v) for v in self.centers}

    def orthogonality_defect(self) -> float:
        """Largest ``|cos angle|`` between circles at their contact points."""
        worst = 0.0
        for fi, (a, b) in enumerate(self.graph.circle_pairs()):
            for p in self.graph.faces[fi]:
                if self.graph.labels[p] is not Label.BLACK:
                    continue
                x = self.contacts[p]
                ta = self.circle(a).tangent_at(x)
                tb = self.circle(b).tangent_at(x)
                worst = max(worst, abs(float(np.dot(ta, tb))))
        return worst

    def incidence_defect(self) -> float:
        """Largest distance of a contact point from the circles through it."""
        worst = 0.0
        for fi, (a, b) in enumerate(self.graph.circle_pairs()):
            for p in self.graph.faces[fi]:
                if self.graph.labels[p] is Label.BLACK:
                    x = self.contacts[p]
                    for w in (a, b):
                        worst = max(worst, abs(float(np.dot(x, self.centers[w])) - np.cos(self.radii[w])))
        return worst

    def transformed(self, m: SphereMobius) -> "SphericalPattern":
        centers, radii = {}, {}
        for v in self.centers:
            centers[v], radii[v] = m.apply_circle(self.centers[v], self.radii[v])
        keys = list(self.contacts)
        pts = m.apply_points(np.array([self.contacts[k] for k in keys]))
        contacts = {k: p / np.linalg.norm(p) for k, p in zip(keys, pts)}
        rho = {v: float(rho_from_radius(r)) for v, r in radii.items()}
        return SphericalPattern(self.graph, rho, centers, radii, contacts, self.layout_mismatch)

    def normalized(self, tol: float = 1e-13) -> "SphericalPattern":
        """Moebius-equivalent pattern whose contact points have centroid 0."""
        keys = sorted(self.contacts)
        m = mobius_center_normalize(np.array([self.contacts[k] for k in keys]), tol=tol)
        return self.transformed(m)


def _tangent(c: np.ndarray, x: np.ndarray) -> np.ndarray:
    t = x - np.dot(x, c) * c
    return t / np.linalg.norm(t)


def layout_pattern(
    graph: SQuadGraph,
    rho,
    frame: np.ndarray | None = None,
    seed: int | None = None,
    tol: float = 1e-7,
) -> SphericalPattern:
    """Place circles and contact points on S^2 from their radii.

    The seed circle is centred at ``frame @ (0, 0, -1)`` with its first
    contact at azimuth ``frame @ (1, 0, 0)``.  Faces are assumed to be
    oriented counter-clockwise seen from outside the sphere.
    """
    cg = _circle_graph(graph)
    rho_arr = cg.to_array(rho)
    radii = {v: float(radius_from_rho(x)) for v, x in zip(cg.vertices, rho_arr)}
    R = np.eye(3) if frame is None else np.asarray(frame, dtype=float)
    seed = cg.vertices[0] if seed is None else seed

    centers: dict[int, np.ndarray] = {}
    contacts: dict[int, np.ndarray] = {}
    worst = 0.0

    def place(store, key, value):
        nonlocal worst
        if key in store:
            worst = max(worst, float(np.linalg.norm(store[key] - value)))
        else:
            store[key] = value

    c0 = R @ np.array([0.0, 0.0, -1.0])
    centers[seed] = c0
    order0, _ = graph._fan(seed)
    r0 = radii[seed]
    contacts[order0[0]] = np.cos(r0) * c0 + np.sin(r0) * (R @ np.array([1.0, 0.0, 0.0]))

    queue = deque([seed])
    done = set()
    while queue:
        w = queue.popleft()
        if w in done:
            continue
        done.add(w)
        c, rw = centers[w], radii[w]
        order, fans = graph._fan(w)
        closed = len(order) == len(fans)
        pos: dict[int, np.ndarray] = {}
        i0 = next(i for i, b in enumerate(order) if b in contacts)
        pos[i0] = contacts[order[i0]]
        m = len(fans)
        k_of = [graph.opposite(fi, w) for fi in fans]
        half = [napier_half_angle(rho_arr[cg.index[w]], rho_arr[cg.index[k]]) for k in k_of]
        # forward: order[i+1] = R(c, -2 phi_i) order[i]
        i = i0
        while (i + 1 < len(order) or closed) and len(pos) < len(order):
            j = (i + 1) % len(order)
            pos[j] = rotate(pos[i], c, -2.0 * half[i])
            i = j
        if not closed:
            i = i0
            while i > 0:
                pos[i - 1] = rotate(pos[i], c, 2.0 * half[i - 1])
                i -= 1
        elif m:
            # closing the fan must return to the starting contact
            back = rotate(pos[(i0 - 1) % m], c, -2.0 * half[(i0 - 1) % m])
            worst = max(worst, float(np.linalg.norm(back - pos[i0])))
        for idx, p in pos.items():
            place(contacts, order[idx], p)
        for fi_idx, k in enumerate(k_of):
            succ = pos[(fi_idx + 1) % len(order)]
            tk = rotate(_tangent(c, succ), c, half[fi_idx])
            cosd = np.cos(rw) * np.cos(radii[k])
            ck = cosd * c + np.sqrt(max(0.0, 1.0 - cosd * cosd)) * tk
            place(centers, k, ck / np.linalg.norm(ck))
            if k not in done:
                queue.append(k)

    if len(centers) != len(cg):
        raise LayoutError("circle graph is not connected")
    if worst > tol:
        raise LayoutError(f"layout cycle mismatch {worst:.3e} exceeds {tol:.1e}")
    return SphericalPattern(graph, cg.to_map(rho_arr), centers, radii, contacts, worst)
