"""Closed-form orthogonal circle patterns in the plane."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadgraph import Label, SQuadGraph, make_zsquare_cylinder, make_zsquare_patch


@dataclass
class PlanarPattern:
    graph: SQuadGraph
    centers: dict[int, complex]
    radii: dict[int, float]
    contacts: dict[int, complex]

    def tangency_defect(self) -> float:
        """Worst ``| |c1 - c2| - (r1 + r2) |`` over white pairs meeting at a black vertex.

        Only pairs of the same label touch; pairs of different labels share a
        face and intersect orthogonally instead.
        """
        worst = 0.0
        g = self.graph
        for b in g.vertices_with(Label.BLACK):
            nb = g.adjacency[b]
            for i, u in enumerate(nb):
                for w in nb[i + 1:]:
                    if g.labels[u] is g.labels[w]:
                        d = abs(self.centers[u] - self.centers[w])
                        worst = max(worst, abs(d - self.radii[u] - self.radii[w]))
        return worst

    def orthogonality_defect(self) -> float:
        """Worst ``| |c1 - c2|^2 - r1^2 - r2^2 |`` relative to ``r1 r2`` over faces."""
        worst = 0.0
        for a, b in self.graph.circle_pairs():
            d2 = abs(self.centers[a] - self.centers[b]) ** 2
            ra, rb = self.radii[a], self.radii[b]
            worst = max(worst, abs(d2 - ra * ra - rb * rb) / (ra * rb))
        return worst

    def incidence_defect(self) -> float:
        """Worst distance of a contact from the circles through it, relative to radius."""
        worst = 0.0
        g = self.graph
        for b in g.vertices_with(Label.BLACK):
            for w in g.adjacency[b]:
                dev = abs(abs(self.contacts[b] - self.centers[w]) - self.radii[w])
                worst = max(worst, dev / self.radii[w])
        return worst


def enneper_grid_pattern(m: int, n: int, r: float = 1.0, parity: int = 0) -> PlanarPattern:
    """Square grid pattern of equal circles on the ``(2m+1) x (2n+1)`` patch.

    Vertex ``(a, b)`` sits at ``r (a + i b)``.  Whites carry circles of radius
    ``r``: diagonal neighbours, at distance ``sqrt(2) r``, intersect
    orthogonally, and neighbours two steps apart touch at the black vertex
    between them.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    g = make_zsquare_patch(m, n, parity=parity)
    centers, radii, contacts = {}, {}, {}
    for v, (a, b) in g.coords.items():
        z = r * complex(a, b)
        if g.labels[v] is Label.BLACK:
            contacts[v] = z
        else:
            centers[v] = z
            radii[v] = float(r)
    return PlanarPattern(g, centers, radii, contacts)


def sexp_parameters(N: int) -> tuple[float, float]:
    """``(rho, alpha)`` of the S-Exp pattern with ``N`` circles per half turn."""
    rho = np.pi / N
    alpha = float(np.arctanh(0.5 * abs(1.0 - np.exp(2j * rho))))
    return rho, alpha


def sexp_pattern(N: int, n_range: range, period: bool = True, m_range: range | None = None) -> PlanarPattern:
    """S-Exp pattern: circles ``c(n, m) = exp(alpha n + i rho m)``, ``r = sin(rho) |c|``.

    With ``period=True`` the index ``m`` runs over ``Z / 2N`` and the graph is
    a cylinder; otherwise ``m_range`` gives a finite window.  Contacts are the
    tangency points of circles ``(n, m)`` and ``(n + 2, m)`` (resp.
    ``(n, m + 2)``), not the points ``c(n, m)`` at odd vertices.
    """
    if N < 3:
        raise ValueError("N must be >= 3")
    rho, alpha = sexp_parameters(N)
    if period:
        g = make_zsquare_cylinder(n_range, 2 * N)
    else:
        if m_range is None:
            raise ValueError("m_range is required for a non-periodic window")
        g = _zsquare_window(n_range, m_range)

    def center(a, b):
        return complex(np.exp(alpha * a + 1j * rho * b))

    centers, radii, contacts = {}, {}, {}
    for v, (a, b) in g.coords.items():
        if g.labels[v] is Label.BLACK:
            continue
        c = center(a, b)
        centers[v] = c
        radii[v] = float(np.sin(rho) * abs(c))
    for v, (a, b) in g.coords.items():
        if g.labels[v] is not Label.BLACK:
            continue
        # the two same-label white neighbours of a black vertex are its
        # horizontal (or vertical) neighbours; they touch at the contact point
        c1, c2 = center(a - 1, b), center(a + 1, b)
        r1 = np.sin(rho) * abs(c1)
        r2 = np.sin(rho) * abs(c2)
        contacts[v] = c1 + (c2 - c1) * r1 / (r1 + r2)
    return PlanarPattern(g, centers, radii, contacts)


def _zsquare_window(n_range: range, m_range: range) -> SQuadGraph:
    rows, cols = list(n_range), list(m_range)
    ids, labels, coords = {}, [], {}
    for a in rows:
        for b in cols:
            ids[a, b] = len(labels)
            coords[len(labels)] = (a, b)
            if (a + b) % 2:
                labels.append(Label.BLACK)
            elif a % 2 == 0:
                labels.append(Label.SPHERE)
            else:
                labels.append(Label.CIRCLE)
    faces = [
        (ids[a, b], ids[a + 1, b], ids[a + 1, b + 1], ids[a, b + 1])
        for a in rows[:-1]
        for b in cols[:-1]
    ]
    return SQuadGraph(labels, faces, coords=coords)
