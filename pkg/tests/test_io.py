import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from koebe_minimal.geomcore import Sphere3D
from koebe_minimal.io import (
    BUNDLE_SCHEMA,
    GeometryBundle,
    bundle_from_surface,
    export_json,
    export_obj,
    icosphere,
    import_json,
    obj_text,
)

GOLDEN = Path(__file__).parent / "golden"


def _counts(text):
    lines = text.splitlines()
    return {k: sum(line.startswith(k + " ") for line in lines) for k in ("v", "f", "l", "g")}


def test_empty_bundle_is_header_only(tmp_path):
    path = tmp_path / "empty.obj"
    export_obj(GeometryBundle(), path)
    assert path.read_text().splitlines() == ["# koebe-minimal geometry"]


def test_single_sphere_is_icosahedron():
    b = GeometryBundle(spheres={0: Sphere3D(np.zeros(3), 1.0)})
    c = _counts(obj_text(b, 0))
    assert c["v"] == 12 and c["f"] == 20
    pts, faces = icosphere(0)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0)
    # Euler characteristic of a subdivided icosphere
    for level in range(3):
        pts, faces = icosphere(level)
        edges = {tuple(sorted(e)) for f in faces for e in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0]))}
        assert len(pts) - len(edges) + len(faces) == 2
        assert len(faces) == 20 * 4**level


def test_catenoid_obj_golden(catenoid):
    golden = json.loads((GOLDEN / "catenoid_n6_obj_counts.json").read_text())
    b = bundle_from_surface(catenoid)
    for level in (0, 1):
        for seg in (16, 32):
            assert _counts(obj_text(b, level, seg)) == golden[f"level{level}_seg{seg}"]
    # 9 x 12 cylinder: 108 kite vertices, 96 kites, 30 spheres, 24 circles
    c = _counts(obj_text(b, 0, 16))
    assert c["v"] == 108 + 30 * 12 + 24 * 16 and c["f"] == 96 + 30 * 20


def test_obj_is_deterministic(scherk, tmp_path):
    b = bundle_from_surface(scherk)
    export_obj(b, tmp_path / "a.obj", 1, 8, 2.0)
    export_obj(bundle_from_surface(scherk), tmp_path / "b.obj", 1, 8, 2.0)
    assert (tmp_path / "a.obj").read_bytes() == (tmp_path / "b.obj").read_bytes()
    text = (tmp_path / "a.obj").read_text()
    assert "g rays" in text and _counts(text)["l"] == len(b.circles) + len(b.rays)


@pytest.mark.parametrize("name", ["enneper", "catenoid", "schwarz-p", "scherk"])
def test_json_round_trip_and_schema(name, all_surfaces, tmp_path):
    b = bundle_from_surface(all_surfaces[name])
    path = tmp_path / f"{name}.json"
    export_json(b, path)
    data = json.loads(path.read_text())
    jsonschema.validate(data, BUNDLE_SCHEMA)
    again = import_json(path)
    assert again == b
    export_json(again, tmp_path / "again.json")
    assert (tmp_path / "again.json").read_text() == path.read_text()


def test_round_trip_rebuilds_surface(schwarz):
    b = GeometryBundle.from_dict(json.loads(json.dumps(bundle_from_surface(schwarz).to_dict())))
    s = b.to_surface()
    fresh = s.report()
    for key, val in b.metadata["residuals"].items():
        assert abs(fresh[key] - val) <= 1e-12 * s.diameter()


def test_golden_bundle_is_stable(enneper):
    path = GOLDEN / "enneper_n2_bundle.json"
    old = import_json(path)
    jsonschema.validate(json.loads(path.read_text()), BUNDLE_SCHEMA)
    from koebe_minimal.surfaces import make_enneper

    new = bundle_from_surface(make_enneper(2), {"family": "enneper", "n": 2})
    assert set(old.spheres) == set(new.spheres)
    for v, s in old.spheres.items():
        assert np.allclose(s.center, new.spheres[v].center, atol=1e-12)
        assert s.radius == pytest.approx(new.spheres[v].radius, abs=1e-12)
    assert old.kite_faces == new.kite_faces


def test_schema_rejects_broken_bundle(enneper):
    data = bundle_from_surface(enneper).to_dict()
    data["spheres"][0]["radius"] = -1.0
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(data, BUNDLE_SCHEMA)
    with pytest.raises(ValueError):
        GeometryBundle.from_dict({"format": "other"})
