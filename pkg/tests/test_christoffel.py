import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from koebe_minimal.christoffel import (
    DualizationError,
    InfiniteEdgeError,
    dual_edge,
    dual_polygon,
    dual_s_isothermic,
    dualize_mesh,
    face_closure,
    register_similarity,
)
from koebe_minimal.koebe import KiteMesh, central_extension
from koebe_minimal.quadgraph import Label, ParityError, SQuadGraph, TopologyError

vec3 = arrays(np.float64, 3, elements=st.floats(-10, 10))


def test_dual_edge_examples():
    assert np.allclose(dual_edge([2, 0, 0]), [0.5, 0, 0])
    u = np.array([0.6, 0.0, 0.8])
    assert np.allclose(dual_edge(u), u)
    assert np.allclose(dual_edge(u, -1), -u)
    with pytest.raises(InfiniteEdgeError):
        dual_edge([0, 0, 0])


@given(vec3, st.sampled_from([-1, 1]))
def test_dual_edge_involution(v, s):
    if np.linalg.norm(v) < 1e-3:
        return
    assert np.abs(dual_edge(dual_edge(v, s), s) - v).max() <= 1e-12 * np.linalg.norm(v)


def _tangential_polygon(r, R):
    # walk the edges; the interior angle at vertex j has tan(theta/2) = R / r_j
    theta = 2 * np.arctan(R / np.asarray(r, float))
    n = len(r)
    heading = 0.0
    edges = []
    for j in range(n):
        length = r[j] + r[(j + 1) % n]
        edges.append(length * np.array([np.cos(heading), np.sin(heading)]))
        heading += np.pi - theta[(j + 1) % n]
    return edges


def _inradius(edges):
    pts = np.cumsum([np.zeros(2)] + list(edges[:-1]), axis=0)
    rows, rhs = [], []
    for p, e in zip(pts, edges):
        nrm = np.array([-e[1], e[0]]) / np.linalg.norm(e)
        rows.append([nrm[0], nrm[1], -1.0])
        rhs.append(nrm @ p)
    sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    x = sol[:2]
    dist = [abs(np.array([-e[1], e[0]]) @ (x - p)) / np.linalg.norm(e) for p, e in zip(pts, edges)]
    return float(np.mean(dist)), float(np.ptp(dist))


def test_dual_square():
    edges = _tangential_polygon([1, 1, 1, 1], 1.0)
    dual = dual_polygon(edges, [1, 1, 1, 1])
    assert np.allclose(np.sum(dual, axis=0), 0, atol=1e-14)
    assert all(np.linalg.norm(d) == pytest.approx(2.0) for d in dual)
    rad, spread = _inradius(dual)
    assert rad == pytest.approx(1.0) and spread < 1e-12


def test_dual_right_kite():
    r = [1, 1, 2, 2]
    R = np.sqrt(2)  # atan R + atan R/2 = pi/2
    edges = _tangential_polygon(r, R)
    assert np.linalg.norm(np.sum(edges, axis=0)) < 1e-12
    dual = dual_polygon(edges, r)
    assert np.linalg.norm(np.sum(dual, axis=0)) <= 1e-12
    rad, spread = _inradius(dual)
    assert rad == pytest.approx(1 / R) and spread < 1e-12


@given(st.floats(0.1, 10))
def test_dual_polygon_homogeneity(lam):
    r = [1, 1, 2, 2]
    edges = _tangential_polygon(r, np.sqrt(2))
    base = dual_polygon(edges, r)
    scaled = dual_polygon([lam * e for e in edges], [lam * x for x in r])
    assert np.allclose(np.array(scaled) * lam, base, atol=1e-10)


def test_dual_polygon_checks_inscribed_circle():
    with pytest.raises(ValueError):
        dual_polygon([np.array([3.0, 0])] * 4, [1, 1, 1, 1])


def test_single_conformal_square_closes():
    g = SQuadGraph([Label.SPHERE, Label.BLACK, Label.CIRCLE, Label.BLACK], [(0, 1, 2, 3)])
    # orthogonal circles of radii 1 and 2 meeting at p, q
    d = np.hypot(1.0, 2.0)
    x, y = 1 / d, 2 / d
    pos = {0: np.zeros(3), 1: np.array([x, -y, 0]), 2: np.array([d, 0, 0]), 3: np.array([x, y, 0])}
    rot = np.linalg.qr(np.random.default_rng(2).normal(size=(3, 3)))[0]
    pos = {v: rot @ p for v, p in pos.items()}
    res = dualize_mesh(KiteMesh(g, pos))
    assert np.linalg.norm(face_closure(g, pos, res.signs, 0)) <= 1e-14
    assert res.closure_residual <= 1e-14


def test_non_conformal_face_fails():
    g = SQuadGraph([Label.SPHERE, Label.BLACK, Label.CIRCLE, Label.BLACK], [(0, 1, 2, 3)])
    pos = {0: np.zeros(3), 1: np.array([1.0, 0, 0]), 2: np.array([1.5, 2, 0]), 3: np.array([0.0, 1, 0])}
    with pytest.raises(DualizationError):
        dualize_mesh(KiteMesh(g, pos))


@pytest.mark.parametrize("fixture", ["enneper_koebe", "catenoid_koebe"])
def test_koebe_dual_closes(fixture, request):
    k = request.getfixturevalue(fixture)
    periodic = fixture == "catenoid_koebe"
    res = dualize_mesh(central_extension(k), allow_periods=periodic)
    assert res.closure_residual <= 1e-9 * res.diameter
    if not periodic:
        assert res.cotree_defect <= 1e-9 * res.diameter
        with pytest.raises(TopologyError):
            dualize_mesh(central_extension(request.getfixturevalue("catenoid_koebe")))


def test_reciprocal_radii_and_involution(enneper_koebe):
    dual, res = dual_s_isothermic(enneper_koebe)
    for v, s in enneper_koebe.spheres.items():
        assert dual.spheres[v].radius * s.radius == pytest.approx(1.0, rel=1e-8)
    for v, c in enneper_koebe.circles.items():
        assert dual.circles[v].radius * c.radius == pytest.approx(1.0, rel=1e-8)
    diam = dual.diameter()
    assert max(dual.report().values()) <= 1e-8 * diam
    back, _ = dual_s_isothermic(dual, res.signs)
    for v, s in enneper_koebe.spheres.items():
        assert back.spheres[v].radius == pytest.approx(s.radius, rel=1e-8)
    keys = sorted(enneper_koebe.positions())
    a = np.array([enneper_koebe.positions()[v] for v in keys])
    b = np.array([back.positions()[v] for v in keys])
    s, _, _, dev = register_similarity(a, b)
    assert s > 0 and dev <= 1e-8 * enneper_koebe.diameter()


def test_basepoint_independence(enneper_koebe):
    mesh = central_extension(enneper_koebe)
    a = dualize_mesh(mesh)
    b = dualize_mesh(mesh, a.signs, basepoint=max(a.positions))
    shift = {v: b.positions[v] - a.positions[v] for v in a.positions}
    t = next(iter(shift.values()))
    assert all(np.allclose(d, t, atol=1e-12 * a.diameter) for d in shift.values())


def test_cube_has_no_consistent_signs(cube_koebe):
    # corner vertices of degree three cannot alternate signs
    with pytest.raises(ParityError):
        dual_s_isothermic(cube_koebe, allow_periods=True)


def test_register_similarity_recovers_motion():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(20, 3))
    q = np.linalg.qr(rng.normal(size=(3, 3)))[0]
    q *= np.sign(np.linalg.det(q))
    b = 2.5 * a @ q.T + [1, 2, 3]
    s, R, t, dev = register_similarity(a, b, allow_rotation=True)
    assert s == pytest.approx(2.5) and np.allclose(R, q) and dev < 1e-12
    s, *_ = register_similarity(a, -a)
    assert s == pytest.approx(-1.0)
