"""End-to-end constructions of the classical examples and a convergence study."""
from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .christoffel import dual_s_isothermic
from .koebe import ROLE_LABELS, KoebePolyhedron, build_koebe, koebe_from_planar
from .minimal import MinimalSurface, _local_dual_edges, dualize_koebe_to_minimal
from .pattern_plane import enneper_grid_pattern, sexp_pattern, sexp_parameters
from .pattern_sphere import SphericalPattern, layout_pattern, solve_pattern
from .quadgraph import (
    Label,
    cube_corner_cuts,
    edge_key,
    make_branched_double_cover,
    make_refined_cube,
    make_scherk_graph,
)


def make_enneper(n: int, r: float | None = None) -> MinimalSurface:
    """Discrete Enneper surface from the ``(2n+1) x (2n+1)`` square grid pattern.

    The grid spacing defaults to ``1/n`` so that the pattern covers the square
    ``[-1, 1]^2``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    r = 1.0 / n if r is None else r
    pp = enneper_grid_pattern(n, n, r)
    surf = dualize_koebe_to_minimal(koebe_from_planar(pp))
    surf.meta.update(family="enneper", n=n, r=r)
    surf.source = pp
    return surf


def make_catenoid(N: int, rows: int) -> MinimalSurface:
    """Discrete catenoid from the S-Exp pattern with ``2N`` circles per ring.

    ``rows`` lattice rows are taken on either side of the waist.
    """
    if N < 3 or rows < 1:
        raise ValueError("need N >= 3 and rows >= 1")
    pp = sexp_pattern(N, range(-rows, rows + 1))
    surf = dualize_koebe_to_minimal(koebe_from_planar(pp), allow_periods=True)
    res = surf.dualization
    ring = max([res.cotree_defect] + [float(np.linalg.norm(p)) for p in res.periods])
    surf.meta.update(family="catenoid", N=N, rows=rows, ring_closure=ring)
    surf.source = pp
    return surf


def _lift(pattern: SphericalPattern, cover) -> SphericalPattern:
    bm = cover.base_map
    whites = [v for v in range(cover.n_vertices) if cover.labels[v].white and cover.vertex_faces[v]]
    blacks = [v for v in range(cover.n_vertices) if cover.labels[v] is Label.BLACK and cover.vertex_faces[v]]
    return SphericalPattern(
        cover,
        {v: pattern.rho[bm[v]] for v in whites},
        {v: pattern.centers[bm[v]] for v in whites},
        {v: pattern.radii[bm[v]] for v in whites},
        {v: pattern.contacts[bm[v]] for v in blacks},
        pattern.layout_mismatch,
    )


def schwarz_p_pattern(m: int, n: int, k: int) -> SphericalPattern:
    """Normalised orthogonal pattern on the refined ``m x n x k`` cube.

    Started from equal radii, the solver stays in the symmetric subspace;
    Moebius normalisation then centres the contact points at the origin.
    """
    g = make_refined_cube(m, n, k)
    return layout_pattern(g, solve_pattern(g)).normalized()


def make_schwarz_p(m: int, n: int, k: int) -> MinimalSurface:
    """Fundamental piece of the discrete Schwarz P-surface.

    The cube pattern is lifted to the double cover branched at the eight
    corners; its Koebe polyhedron dualizes to a genus 3 piece whose three
    translation periods are kept in ``dualization.periods``.
    """
    base = schwarz_p_pattern(m, n, k)
    g = base.graph
    corners = [v for v in range(g.n_vertices) if g.has_flag(v, "branch")]
    cover = make_branched_double_cover(g, corners, cube_corner_cuts(g))
    koebe = build_koebe(_lift(base, cover), ROLE_LABELS)
    surf = dualize_koebe_to_minimal(koebe, allow_periods=True)
    surf.meta.update(family="schwarz-p", m=m, n=n, k=k)
    surf.source = base
    surf.koebe = koebe
    return surf


def scherk_koebe(m: int, n: int) -> tuple[KoebePolyhedron, dict[int, tuple[int, int]]]:
    """Koebe polyhedron of the Scherk tower with point spheres at the ends.

    Returns the polyhedron and, per end vertex, its two split black copies.
    """
    base = schwarz_p_pattern(m, n, 2)
    g = make_scherk_graph(m, n)
    centers, radii, rho = dict(base.centers), dict(base.radii), dict(base.rho)
    contacts = dict(base.contacts)
    ends = {}
    for x in g.vertices_with(Label.SPHERE):
        if not g.has_flag(x, "end"):
            continue
        # the split copy is new; the other keeps the base vertex id
        m1, m2 = sorted(g.adjacency[x], reverse=True)
        p = base.contacts[m2]
        contacts[m1] = p
        centers[x], radii[x], rho[x] = p, 0.0, -np.inf
        ends[x] = (m1, m2)
    pattern = SphericalPattern(g, rho, centers, radii, contacts, base.layout_mismatch)
    return build_koebe(pattern, ROLE_LABELS), ends


def make_scherk(m: int, n: int, truncation: float = 1.0) -> MinimalSurface:
    """Discrete Scherk tower; each half-planar end is a pair of rays.

    The two-valent end vertices carry point spheres, so the edges to their
    neighbours have length zero and dualize to infinite edges.  They are
    recorded in ``rays`` as ``black -> (origin, unit direction)`` and exported
    with length ``truncation``.
    """
    if truncation <= 0:
        raise ValueError("truncation must be positive")
    koebe, ends = scherk_koebe(m, n)
    dual, res = dual_s_isothermic(koebe, allow_periods=True)
    surf = MinimalSurface(
        dual.graph, dual.spheres, dual.circles, dual.contacts,
        {"construction": "koebe-dual", **koebe.meta}, _local_dual_edges(koebe, res.signs), res,
        lattice=list(res.periods),
    )
    g = koebe.graph
    for x, blacks in ends.items():
        for b in blacks:
            s = next(w for w in g.adjacency[b] if w != x and w in koebe.spheres)
            d = koebe.contacts[b] - koebe.spheres[s].center
            sign = res.signs[edge_key(b, x)]
            surf.rays[b] = (res.positions[b], sign * d / np.linalg.norm(d))
    surf.meta.update(family="scherk", m=m, n=n, truncation=truncation, ends={x: list(bs) for x, bs in ends.items()})
    return surf


def end_normals(surf: MinimalSurface) -> dict[int, np.ndarray]:
    """Unit normal of the asymptotic half-plane of each end.

    The plane contains the end's rays and the translation period of the tower.
    """
    periods = surf.dualization.periods if surf.dualization else []
    if not periods:
        raise ValueError("surface has no translation period")
    axis = max(periods, key=np.linalg.norm)
    out = {}
    for x, blacks in surf.meta["ends"].items():
        d = sum(surf.rays[b][1] for b in blacks)
        nrm = np.cross(d, axis)
        out[x] = nrm / np.linalg.norm(nrm)
    return out


# -- smooth comparison ------------------------------------------------------------


def smooth_weierstrass(g_id: str, z: complex) -> np.ndarray:
    """Smooth minimal surface with Gauss map ``z`` or ``exp z``, zero at ``z = 0``."""
    z = complex(z)
    if g_id == "identity":
        v = (z - z**3 / 3, 1j * (z + z**3 / 3), z * z)
    elif g_id == "exp":
        ez, emz = np.exp(z), np.exp(-z)
        v = (2 - emz - ez, 1j * (ez - emz), 2 * z)
    else:
        raise ValueError(f"unknown Gauss map {g_id!r}")
    return np.real(np.array(v, dtype=complex))


@dataclass
class ConvergenceReport:
    family: str
    levels: list[int]
    errors: list[float]
    slope: float
    slope_ci: tuple[float, float]
    runtimes: list[float]
    center_errors: list[float] = field(default_factory=list)

    @property
    def ratios(self) -> list[float]:
        return [b / a for a, b in zip(self.errors, self.errors[1:])]


def _level(family: str, n: int, region: float, samples: int):
    t0 = time.perf_counter()
    if family == "enneper":
        h = 1.0 / n
        m = int(round(region * n))
        pp = enneper_grid_pattern(m, m, h)
        surf = dualize_koebe_to_minimal(koebe_from_planar(pp))
        params = {v: complex(a, b) * h for v, (a, b) in pp.graph.coords.items()}
        g_id = "identity"
    elif family == "catenoid":
        rho, alpha = sexp_parameters(n)
        h = rho
        rows = int(np.ceil(region / alpha))
        pp = sexp_pattern(n, range(-rows, rows + 1))
        surf = dualize_koebe_to_minimal(koebe_from_planar(pp), allow_periods=True)
        params = {v: complex(alpha * a, rho * b) for v, (a, b) in pp.graph.coords.items()}
        g_id = "exp"
    else:
        raise ValueError(f"unknown family {family!r}")
    keys = sorted(surf.positions())
    F = 2.0 * h * h * np.array([surf.center(v) for v in keys])
    Z = np.array([params[v] for v in keys])
    smooth = np.array([smooth_weierstrass(g_id, z) for z in Z])
    # the dual is defined up to sign and translation; both are fitted
    best = None
    for sg in (1.0, -1.0):
        t = (smooth - sg * F).mean(axis=0)
        dev = float(np.abs(sg * F + t - smooth).max())
        if best is None or dev < best[0]:
            best = (dev, sg, t)
    _, sg, t = best

    # sup error over a sample grid, nearest vertex
    if family == "enneper":
        xs = np.linspace(-region, region, samples)
        grid = (xs[:, None] + 1j * xs[None, :]).ravel()
    else:
        xs = np.linspace(-region, region, samples)
        ys = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
        grid = (xs[:, None] + 1j * ys[None, :]).ravel()
    if family == "catenoid":
        # the parameter is periodic in the imaginary direction
        d = np.abs(Z.real[None, :] - grid.real[:, None]) ** 2 + (
            np.angle(np.exp(1j * (Z.imag[None, :] - grid.imag[:, None])))
        ) ** 2
    else:
        d = np.abs(Z[None, :] - grid[:, None])
    near = np.argmin(d, axis=1)
    target = np.array([smooth_weierstrass(g_id, z) for z in grid])
    err = np.linalg.norm(sg * F[near] + t - target, axis=1)
    center = float(err[np.argmin(np.abs(grid.real) + (np.abs(grid.imag) if family == "enneper" else 0))])
    return float(err.max()), center, time.perf_counter() - t0


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("KOEBE_MINIMAL_THREADS", "1")))
    except ValueError:
        return 1


def convergence_report(
    family: str,
    n_list,
    compact_region: float = 1.0,
    samples: int = 101,
) -> ConvergenceReport:
    """Sup error of the rescaled discrete surface against the smooth one.

    The discrete surface is scaled by ``2 h^2`` (``h`` the lattice step in the
    parameter domain) and aligned by sign and translation.  Errors are taken
    over a ``samples x samples`` grid on ``[-a, a]^2`` (Enneper) or
    ``[-a, a] x [0, 2 pi)`` (catenoid), evaluating the discrete surface at the
    nearest lattice vertex.
    """
    n_list = list(n_list)
    if len(n_list) < 3 or sorted(n_list) != n_list:
        raise ValueError("need at least 3 ascending levels")
    with ThreadPoolExecutor(_threads()) as pool:
        out = list(pool.map(lambda n: _level(family, n, compact_region, samples), n_list))
    errors = [o[0] for o in out]
    fit = stats.linregress(np.log(n_list), np.log(errors))
    q = stats.t.ppf(0.975, len(n_list) - 2) * fit.stderr
    return ConvergenceReport(
        family, n_list, errors, float(fit.slope), (float(fit.slope - q), float(fit.slope + q)),
        [o[2] for o in out], [o[1] for o in out],
    )
