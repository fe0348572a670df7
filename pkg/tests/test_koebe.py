import numpy as np
import pytest

from koebe_minimal.geomcore import Circle3D, GeometryError, is_conformal_square
from koebe_minimal.koebe import (
    ROLE_LABELS,
    ROLE_SWAPPED,
    build_koebe,
    central_extension,
    check_touching_coins,
    koebe_from_planar,
)
from koebe_minimal.pattern_plane import enneper_grid_pattern
from koebe_minimal.pattern_sphere import SphericalPattern
from koebe_minimal.quadgraph import Label


def _edges(k):
    """(black, tangent sphere centre a, tangent sphere centre b) for every contact."""
    g = k.graph
    for b in g.vertices_with(Label.BLACK):
        nb = [v for v in g.adjacency[b] if v in k.spheres]
        if len(nb) == 2:
            yield b, k.spheres[nb[0]].center, k.spheres[nb[1]].center


def test_cube_vertex_spheres(cube_koebe):
    spheres = list(cube_koebe.spheres.values())
    assert len(spheres) == 8 and len(cube_koebe.circles) == 6
    for s in spheres:
        assert np.linalg.norm(s.center) == pytest.approx(np.sqrt(1.5), abs=1e-8)
        assert s.radius == pytest.approx(1 / np.sqrt(2), abs=1e-8)
    for b, ca, cb in _edges(cube_koebe):
        # touching spheres on a cube edge of length sqrt(2) (midsphere radius 1)
        assert np.linalg.norm(ca - cb) == pytest.approx(np.sqrt(2), abs=1e-8)


def test_cube_face_spheres(cube_koebe_labels):
    spheres = list(cube_koebe_labels.spheres.values())
    assert len(spheres) == 6
    for s in spheres:
        assert np.linalg.norm(s.center) == pytest.approx(np.sqrt(2), abs=1e-8)
        assert s.radius == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("fixture", ["cube_koebe", "cube_koebe_labels", "enneper_koebe", "catenoid_koebe"])
def test_koebe_invariants(fixture, request):
    k = request.getfixturevalue(fixture)
    rep = k.report()
    assert max(rep.values()) <= 1e-8, rep
    for s in k.spheres.values():
        d2 = np.dot(s.center, s.center)
        assert abs(d2 - 1 - s.radius**2) <= 1e-8 * d2
    for b, ca, cb in _edges(k):
        # closest point of the edge line to the origin is the contact, on S^2
        u = (cb - ca) / np.linalg.norm(cb - ca)
        foot = ca - np.dot(ca, u) * u
        assert np.linalg.norm(foot) == pytest.approx(1.0, abs=1e-8)
        assert np.allclose(foot, k.contacts[b], atol=1e-8)


def test_dual_polyhedron_shares_edge_points(cube_koebe, cube_koebe_labels):
    a = {b: (ca, cb) for b, ca, cb in _edges(cube_koebe)}
    d = {b: (ca, cb) for b, ca, cb in _edges(cube_koebe_labels)}
    assert set(a) == set(d) and len(a) == 12
    for b in a:
        assert np.allclose(cube_koebe.contacts[b], cube_koebe_labels.contacts[b])
        e1 = a[b][1] - a[b][0]
        e2 = d[b][1] - d[b][0]
        assert abs(np.dot(e1, e2)) <= 1e-8 * np.linalg.norm(e1) * np.linalg.norm(e2)


@pytest.mark.parametrize("fixture", ["cube_koebe", "cube_koebe_labels", "enneper_koebe", "catenoid_koebe"])
def test_central_extension_is_kite_mesh(fixture, request):
    k = request.getfixturevalue(fixture)
    mesh = central_extension(k)
    assert mesh.planarity_defect() <= 1e-9
    assert mesh.conformal_square_defect() <= 1e-8
    assert mesh.right_angle_defect() <= 1e-8
    for fi, _ in mesh.faces():
        assert is_conformal_square(*mesh.face_points(fi), tol=1e-8)


def test_kites_around_circle_lie_in_its_plane(cube_koebe_labels):
    k = cube_koebe_labels
    mesh = central_extension(k)
    for v, c in k.circles.items():
        for fi, f in mesh.faces():
            if v in f:
                pts = mesh.face_points(fi)
                assert np.abs((pts - c.center) @ c.normal).max() <= 1e-9


def _coins_around(k, s):
    _, fans = k.graph._fan(s)
    return [k.circles[k.graph.opposite(fi, s)] for fi in fans]


def test_touching_coins_on_koebe(cube_koebe_labels):
    for s in cube_koebe_labels.spheres:
        r = check_touching_coins(*_coins_around(cube_koebe_labels, s))
        assert r.residual <= 1e-8


def test_touching_coins_coplanar_is_indeterminate():
    z = np.array([0.0, 0.0, 1.0])
    coins = [Circle3D(np.array([x, y, 0.0]), 1.0, z) for x, y in [(1, 1), (-1, 1), (-1, -1), (1, -1)]]
    r = check_touching_coins(*coins)
    assert r.indeterminate and r.concyclic


def test_touching_coins_perturbation_grows(cube_koebe_labels):
    s = next(iter(cube_koebe_labels.spheres))
    coins = _coins_around(cube_koebe_labels, s)
    c0 = coins[0]
    res = []
    for eps in (0.0, 1e-4, 1e-3, 1e-2, 1e-1):
        moved = Circle3D(c0.center + eps * c0.normal, c0.radius, c0.normal)
        res.append(check_touching_coins(moved, *coins[1:]).residual)
    assert res[0] <= 1e-8
    assert all(a < b for a, b in zip(res, res[1:]))


def test_great_circle_is_rejected(cube_pattern):
    p = cube_pattern
    v = next(v for v in p.centers if p.graph.labels[v] is Label.SPHERE)
    radii = dict(p.radii)
    radii[v] = np.pi / 2
    bad = SphericalPattern(p.graph, p.rho, p.centers, radii, p.contacts)
    with pytest.raises(GeometryError):
        build_koebe(bad, ROLE_LABELS)
    with pytest.raises(ValueError):
        build_koebe(p, "neither")


def test_planar_route_roles():
    p = enneper_grid_pattern(2, 2, 0.5)
    a = koebe_from_planar(p, ROLE_LABELS)
    b = koebe_from_planar(p, ROLE_SWAPPED)
    assert set(a.spheres) == set(b.circles) and set(a.circles) == set(b.spheres)
