"""Plane, sphere and 3-space primitives.

Stereographic projection follows the convention with the south pole over the
origin, ``s(p) = (2 Re p, 2 Im p, |p|^2 - 1) / (1 + |p|^2)``, and the point at
infinity going to the north pole.

Moebius transformations of the sphere are carried as 4x4 Lorentz matrices
acting on the light cone ``(x, 1)``; circles on the sphere are the planes
``u . x = cos r``, which transform as space-like vectors ``(u, cos r)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NORTH = np.array([0.0, 0.0, 1.0])


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Circle3D:
    center: np.ndarray
    radius: float
    normal: np.ndarray

    def point(self, t: float) -> np.ndarray:
        e1, e2 = orthonormal_frame(self.normal)
        return self.center + self.radius * (np.cos(t) * e1 + np.sin(t) * e2)

    def tangent_at(self, x: np.ndarray) -> np.ndarray:
        t = np.cross(self.normal, x - self.center)
        return t / np.linalg.norm(t)


@dataclass(frozen=True)
class Sphere3D:
    center: np.ndarray
    radius: float


def orthonormal_frame(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two unit vectors completing ``n`` to a right-handed orthonormal basis."""
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    a = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(n, a)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(n, e1)


def rotate(v: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation of ``v`` about the unit vector ``axis``."""
    c, s = np.cos(angle), np.sin(angle)
    return v * c + np.cross(axis, v) * s + axis * np.dot(axis, v) * (1.0 - c)


# -- stereographic projection -------------------------------------------------


def stereographic_project(p) -> np.ndarray:
    """Map a complex number (or array of them) onto the unit sphere.

    ``numpy.inf`` (or any complex infinity) goes to the north pole.
    """
    p = np.asarray(p, dtype=complex)
    scalar = p.ndim == 0
    p = np.atleast_1d(p)
    out = np.empty(p.shape + (3,))
    inf = ~np.isfinite(p)
    q = np.where(inf, 0.0, p)
    d = 1.0 + np.abs(q) ** 2
    out[..., 0] = 2.0 * q.real / d
    out[..., 1] = 2.0 * q.imag / d
    out[..., 2] = (np.abs(q) ** 2 - 1.0) / d
    out[inf] = NORTH
    return out[0] if scalar else out


def inverse_stereographic(x) -> complex | np.ndarray:
    x = np.asarray(x, dtype=float)
    den = 1.0 - x[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        z = (x[..., 0] + 1j * x[..., 1]) / den
    return np.where(np.abs(den) < 1e-300, complex(np.inf), z)


def _weierstrass_vector(p: complex) -> np.ndarray:
    return np.array([1.0 - p * p, 1j * (1.0 + p * p), 2.0 * p])


def stereographic_differential(p: complex, v: complex) -> np.ndarray:
    """Differential of :func:`stereographic_project` at ``p`` applied to ``v``."""
    p, v = complex(p), complex(v)
    w = 2.0 * np.conj(v) / (1.0 + abs(p) ** 2) ** 2
    return np.real(w * _weierstrass_vector(p))


def plane_circle_to_sphere(center: complex, radius: float) -> tuple[np.ndarray, float]:
    """Image of a planar disc under stereographic projection.

    Returns ``(u, r)``: the spherical centre (unit vector) and spherical
    radius of the image cap.  The cap is the one containing the image of
    ``center``.
    """
    c = complex(center)
    pts = stereographic_project(np.array([c + radius, c + 1j * radius, c - radius]))
    n = np.cross(pts[1] - pts[0], pts[2] - pts[0])
    n /= np.linalg.norm(n)
    h = float(np.dot(n, pts[0]))
    if np.dot(n, stereographic_project(c)) < h:
        n, h = -n, -h
    return n, float(np.arccos(np.clip(h, -1.0, 1.0)))


# -- cross-ratios -------------------------------------------------------------


def cross_ratio_plane(z1, z2, z3, z4) -> complex:
    """``(z1-z2)(z3-z4) / ((z2-z3)(z4-z1))`` for finite complex numbers."""
    z1, z2, z3, z4 = (complex(z) for z in (z1, z2, z3, z4))
    den = (z2 - z3) * (z4 - z1)
    if den == 0 or z1 == z2 or z3 == z4:
        raise GeometryError("cross-ratio of coincident consecutive points")
    return (z1 - z2) * (z3 - z4) / den


def cross_ratio_space(p1, p2, p3, p4) -> complex:
    """Cross-ratio of four points of R^3, normalised to ``Im >= 0``.

    The points are inverted in the unit sphere about ``p4``, which sends
    ``p4`` to infinity and the sphere through all four points to the plane
    through the images of ``p1, p2, p3``.  With ``z4 = inf`` the cross-ratio
    reduces to ``-(z1 - z2) / (z2 - z3)``.
    """
    pts = [np.asarray(p, dtype=float) for p in (p1, p2, p3, p4)]
    scale = max(np.linalg.norm(a - b) for a in pts for b in pts)
    for i in range(4):
        for j in range(i + 1, 4):
            if np.linalg.norm(pts[i] - pts[j]) <= 1e-14 * max(scale, 1e-300):
                raise GeometryError("cross-ratio of coincident points")
    q = []
    for a in pts[:3]:
        d = a - pts[3]
        q.append(d / np.dot(d, d))
    u = q[1] - q[0]
    w = q[2] - q[0]
    e1 = u / np.linalg.norm(u)
    w_perp = w - np.dot(w, e1) * e1
    nw = np.linalg.norm(w_perp)
    if nw <= 1e-13 * np.linalg.norm(w):
        e2 = orthonormal_frame(e1)[0]
    else:
        e2 = w_perp / nw
    z = [complex(np.dot(x - q[0], e1), np.dot(x - q[0], e2)) for x in q]
    cr = -(z[0] - z[1]) / (z[1] - z[2])
    return cr.conjugate() if cr.imag < 0 else cr


def is_conformal_square(p1, p2, p3, p4, tol: float = 1e-8) -> bool:
    return abs(cross_ratio_space(p1, p2, p3, p4) + 1.0) <= tol


# -- Moebius transformations of the sphere -----------------------------------

_ETA = np.diag([1.0, 1.0, 1.0, -1.0])


@dataclass(frozen=True)
class SphereMobius:
    """A Moebius transformation of S^2 as a proper orthochronous Lorentz matrix."""

    matrix: np.ndarray

    @classmethod
    def identity(cls) -> "SphereMobius":
        return cls(np.eye(4))

    @classmethod
    def boost(cls, direction: np.ndarray, beta: float) -> "SphereMobius":
        """Boost with speed ``beta`` along ``direction``.

        Points are pushed away from ``direction`` towards its antipode.
        """
        u = np.asarray(direction, dtype=float)
        u = u / np.linalg.norm(u)
        g = 1.0 / np.sqrt(1.0 - beta * beta)
        m = np.eye(4)
        m[:3, :3] += (g - 1.0) * np.outer(u, u)
        m[:3, 3] = -g * beta * u
        m[3, :3] = -g * beta * u
        m[3, 3] = g
        return cls(m)

    @classmethod
    def rotation(cls, rot: np.ndarray) -> "SphereMobius":
        m = np.eye(4)
        m[:3, :3] = rot
        return cls(m)

    def __matmul__(self, other: "SphereMobius") -> "SphereMobius":
        return SphereMobius(self.matrix @ other.matrix)

    def apply_points(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        h = np.hstack([x, np.ones((len(x), 1))]) @ self.matrix.T
        return h[:, :3] / h[:, 3:4]

    def apply_circle(self, u: np.ndarray, r: float) -> tuple[np.ndarray, float]:
        """Transform the cap with spherical centre ``u`` and radius ``r``."""
        v = self.matrix @ np.append(np.asarray(u, dtype=float), np.cos(r))
        n = np.linalg.norm(v[:3])
        return v[:3] / n, float(np.arccos(np.clip(v[3] / n, -1.0, 1.0)))

    def is_lorentz(self, tol: float = 1e-9) -> bool:
        m = self.matrix
        return np.allclose(m.T @ _ETA @ m, _ETA, atol=tol) and m[3, 3] > 0


def mobius_center_normalize(
    points, tol: float = 1e-9, max_iter: int = 500, damping: float = 1.0
) -> SphereMobius:
    """Moebius transformation that moves the centroid of ``points`` to the origin.

    Damped fixed-point iteration over boosts: each step boosts along the
    current centroid with speed proportional to its norm.
    """
    x = np.atleast_2d(np.asarray(points, dtype=float))
    if len(x) < 4:
        raise GeometryError("need at least 4 points to balance")
    total = SphereMobius.identity()
    cur = x
    res = np.inf
    for _ in range(max_iter):
        c = cur.mean(axis=0)
        res = float(np.linalg.norm(c))
        if res <= tol:
            return total
        beta = min(damping * res, 0.9)
        step = SphereMobius.boost(c, beta)
        total = step @ total
        cur = step.apply_points(cur)
    raise GeometryError(f"centroid normalisation did not converge, residual {res:.3e}")
