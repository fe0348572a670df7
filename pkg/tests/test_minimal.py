import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koebe_minimal.christoffel import register_similarity
from koebe_minimal.geomcore import stereographic_project
from koebe_minimal.minimal import (
    MinimalityError,
    associated_family_geometric,
    build_from_weierstrass,
    check_minimal_condition,
    dualize_koebe_to_minimal,
    hull_distance,
    minimal_condition_residual,
    polygon_closure,
    weierstrass_edge,
    weierstrass_sphere_radius,
)
from koebe_minimal.koebe import SIsothermicSurface
from koebe_minimal.quadgraph import Label

coord = st.floats(-3, 3, allow_nan=False)
cplx = st.builds(complex, coord, coord)


def _common(a, b):
    keys = sorted(set(a.spheres) & set(b.spheres))
    pa = np.array([a.spheres[v].center for v in keys])
    pb = np.array([b.spheres[v].center for v in keys])
    return keys, pa, pb


# -- Weierstrass formulas -------------------------------------------------------


def test_sphere_radius_examples():
    assert weierstrass_sphere_radius(0, 0.5) == pytest.approx(0.75)
    # inversion oracle: 1/R = |2 r / (d^2 - r^2)| with d^2 = 1, r = 1/2
    assert 1 / weierstrass_sphere_radius(0, 0.5) == pytest.approx(abs(2 * 0.5 / (1 - 0.25)))
    assert weierstrass_sphere_radius(0, 1) == 0.0
    assert weierstrass_sphere_radius(0, 1.0) != 2 * weierstrass_sphere_radius(0, 0.5) / 2 * 2
    with pytest.raises(ValueError):
        weierstrass_sphere_radius(1 + 1j, 1 + 1j)


def _sphere_through_projected_circle(c, p):
    """Radius of the sphere dual to the one orthogonal to S^2 along the projected circle."""
    r = abs(c - p)
    pts = stereographic_project(c + r * np.exp(1j * np.array([0.0, 2.0, 4.0])))
    n = np.cross(pts[1] - pts[0], pts[2] - pts[0])
    n /= np.linalg.norm(n)
    cos_r = abs(float(n @ pts[0]))
    return cos_r / np.sqrt(1 - cos_r**2)  # 1 / tan of the spherical radius


@given(cplx, cplx)
@settings(deadline=None)
def test_sphere_radius_matches_projection(c, p):
    r = abs(c - p)
    if r < 1e-2 or abs(1 + abs(c) ** 2 - r * r) < 1e-2:
        return
    assert weierstrass_sphere_radius(c, p) == pytest.approx(_sphere_through_projected_circle(c, p), rel=1e-8)


def test_weierstrass_edge_example():
    s = np.sqrt(2)
    assert weierstrass_sphere_radius(0, s / 2) == pytest.approx(0.35355, abs=1e-5)
    assert weierstrass_sphere_radius(s, s / 2) == pytest.approx(1.76777, abs=1e-5)
    d = weierstrass_edge(0, s, s / 2)
    assert np.allclose(d, [0.70711, 0, 2.0], atol=1e-5)
    assert np.allclose(weierstrass_edge(0, s, s / 2, phi=np.pi), -d)
    assert np.allclose(weierstrass_edge(0, s, s / 2, sign=-1), -d)


@given(cplx, st.floats(0.05, 2), st.floats(0.05, 2), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
@settings(deadline=None)
def test_weierstrass_edge_length(c1, r1, r2, theta, phi):
    u = np.exp(1j * theta)
    p = c1 + r1 * u
    c2 = c1 + (r1 + r2) * u
    d = weierstrass_edge(c1, c2, p, 1, phi)
    R = weierstrass_sphere_radius(c1, p) + weierstrass_sphere_radius(c2, p)
    assert np.linalg.norm(d) == pytest.approx(R, rel=1e-9, abs=1e-12)


# -- vertex condition ----------------------------------------------------------------


def test_regular_vertex_is_minimal():
    # alternate the heights of a regular 2n-gon: planes at +-h
    t = np.arange(6) * np.pi / 3
    b = np.column_stack([np.cos(t), np.sin(t), 0.4 * (-1.0) ** np.arange(1, 7)])
    assert minimal_condition_residual(b).max <= 1e-14
    b[2, 2] += 0.1
    assert minimal_condition_residual(b).max > 1e-3
    with pytest.raises(MinimalityError):
        minimal_condition_residual(b[:3])


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_residual_is_isometry_invariant(seed):
    rng = np.random.default_rng(seed)
    b = rng.normal(size=(8, 3))
    q = np.linalg.qr(rng.normal(size=(3, 3)))[0]
    r1 = minimal_condition_residual(b)
    r2 = minimal_condition_residual(b @ q.T)
    assert r2.max == pytest.approx(r1.max, rel=1e-8, abs=1e-12)
    assert r1.max > 1e-3


def test_generic_s_isothermic_vertex_is_not_minimal(enneper_koebe):
    # the Koebe polyhedron itself is S-isothermic but not minimal
    k = enneper_koebe
    v = next(v for v in sorted(k.spheres) if k.graph.is_interior(v))
    assert check_minimal_condition(k, v).max > 1e-3
    with pytest.raises(MinimalityError):
        check_minimal_condition(k, next(iter(k.circles)))


def test_hull_distance():
    square = np.array([[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]], float)
    assert hull_distance([0, 0, 0], square) < 1e-12
    assert hull_distance([0, 0, 1], square) == pytest.approx(1.0, abs=1e-9)
    assert hull_distance([2, 0, 0], square) == pytest.approx(1.0, abs=1e-9)


# -- Koebe dual and routes -------------------------------------------------------------


@pytest.mark.parametrize("name", ["enneper", "catenoid", "schwarz-p"])
def test_koebe_dual_is_minimal(name, all_surfaces):
    s = all_surfaces[name]
    diam = s.diameter()
    res = s.vertex_residuals()
    assert res
    for r in res.values():
        assert r.circle <= 1e-8 * diam and r.normal <= 1e-8 * diam and r.planes <= 1e-8 * diam
    assert s.max_principle_defect() <= 1e-8 * diam


def test_mirror_leaves_residuals(enneper):
    m = np.diag([1.0, 1.0, -1.0])
    for v, r in enneper.vertex_residuals().items():
        b = [m @ enneper.edge(v, y) for y in enneper.graph.star(v)]
        assert minimal_condition_residual(b).max == pytest.approx(r.max, abs=1e-13)


def test_catenoid_rows_close(catenoid):
    # spheres of a row form a closed ring
    g = catenoid.graph
    rows = {}
    for v in catenoid.spheres:
        rows.setdefault(g.coords[v][0], []).append(v)
    for vs in rows.values():
        assert len(vs) == 6
    assert catenoid.edge_consistency_defect() <= 1e-9 * catenoid.diameter()


@pytest.mark.parametrize("fixture", ["enneper_pattern", "catenoid_pattern"])
def test_route_equivalence(fixture, request):
    pattern = request.getfixturevalue(fixture)
    periodic = fixture == "catenoid_pattern"
    k = request.getfixturevalue(fixture.replace("pattern", "koebe"))
    dual = dualize_koebe_to_minimal(k, allow_periods=periodic)
    w = build_from_weierstrass(pattern, dual.dualization.signs, allow_periods=periodic)
    keys, a, b = _common(w, dual)
    assert len(keys) == len(dual.spheres)
    s, _, _, dev = register_similarity(a, b)
    assert s > 0 and dev <= 1e-8 * dual.diameter()
    for v in keys:
        assert w.spheres[v].radius == pytest.approx(dual.spheres[v].radius, rel=1e-8)


def test_weierstrass_catenoid_ring(catenoid_pattern):
    w = build_from_weierstrass(catenoid_pattern, allow_periods=True)
    # the cylinder closes up: no period around the waist
    assert w.meta["periods"] == []
    g = w.graph
    ring = sorted((g.coords[v][1], v) for v in w.spheres if g.coords[v][0] == 0)
    total = np.zeros(3)
    for (_, u), (_, v) in zip(ring, ring[1:] + ring[:1]):
        b = next(x for x in g.adjacency[u] if v in g.adjacency[x])
        total += w.edge(u, b) + w.edge(b, v)
    assert np.linalg.norm(total) <= 1e-8


def test_weierstrass_cycle_error():
    from koebe_minimal.pattern_plane import enneper_grid_pattern

    p = enneper_grid_pattern(3, 3, 0.3)
    v = next(v for v in sorted(p.centers) if p.graph.is_interior(v) and p.graph.labels[v] is Label.SPHERE)
    p.centers[v] += 0.05
    with pytest.raises(MinimalityError, match="edge"):
        build_from_weierstrass(p)


@pytest.mark.parametrize("phi", [0.0, np.pi / 6, np.pi / 3, np.pi / 2, 2.0])
def test_weierstrass_radii_constant_in_phi(enneper_pattern, phi):
    base = build_from_weierstrass(enneper_pattern)
    member = build_from_weierstrass(enneper_pattern, phi=phi)
    for v, s in base.spheres.items():
        assert member.spheres[v].radius == pytest.approx(s.radius, rel=1e-9)
    assert member.meta["cycle_gap"] <= 1e-9 * member.diameter()


# -- associated family ----------------------------------------------------------------


def test_family_phi_zero_is_dual(enneper_koebe, enneper):
    m = associated_family_geometric(enneper_koebe, enneper.dualization.signs)
    keys, a, b = _common(m, enneper)
    s, _, _, dev = register_similarity(a, b)
    assert s == pytest.approx(1.0) and dev <= 1e-9 * enneper.diameter()


def test_family_phi_pi_is_point_reflection(enneper_koebe):
    a = associated_family_geometric(enneper_koebe, phi=0.0)
    b = associated_family_geometric(enneper_koebe, phi=np.pi)
    _, pa, pb = _common(a, b)
    s, _, _, dev = register_similarity(pa, pb)
    assert s == pytest.approx(-1.0) and dev <= 1e-9 * a.diameter()


def test_family_matches_weierstrass_phi(enneper_pattern, enneper_koebe, enneper):
    signs = enneper.dualization.signs
    for phi in (np.pi / 5, 1.3):
        g = associated_family_geometric(enneper_koebe, signs, phi)
        w = build_from_weierstrass(enneper_pattern, signs, phi)
        _, a, b = _common(g, w)
        s, _, _, dev = register_similarity(a, b)
        assert s > 0 and dev <= 1e-8 * g.diameter()


@pytest.mark.parametrize("phi", [0.0, np.pi / 3, np.pi / 2])
def test_catenoid_family(catenoid_koebe, catenoid, phi):
    m = associated_family_geometric(catenoid_koebe, catenoid.dualization.signs, phi, allow_periods=True)
    diam = m.diameter()
    assert polygon_closure(m) <= 1e-9 * diam
    radii = m.radii()
    for v, s in catenoid.spheres.items():
        assert radii[v] == pytest.approx(s.radius, rel=1e-9)
    # a helicoid-type member has a translation period along the axis
    if phi:
        assert len(m.lattice) == 1
    assert max(m.report().values()) <= 1e-8 * diam
    # circle normals do not depend on phi
    assert set(m.circles) == set(catenoid.circles)
    for v, c in catenoid.circles.items():
        assert abs(abs(np.dot(m.circles[v].normal, c.normal)) - 1) <= 1e-9


def test_check_minimal_condition_requires_sphere_vertex(enneper):
    with pytest.raises(MinimalityError):
        check_minimal_condition(enneper, next(iter(enneper.circles)))
    assert isinstance(enneper, SIsothermicSurface)
