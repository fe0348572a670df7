import numpy as np
import pytest

from koebe_minimal.koebe import ROLE_LABELS, ROLE_SWAPPED, build_koebe, koebe_from_planar
from koebe_minimal.pattern_plane import enneper_grid_pattern, sexp_pattern
from koebe_minimal.pattern_sphere import layout_pattern, solve_pattern
from koebe_minimal.quadgraph import make_refined_cube
from koebe_minimal.surfaces import make_catenoid, make_enneper, make_scherk, make_schwarz_p


@pytest.fixture(scope="session")
def cube():
    return make_refined_cube(2, 2, 2)


@pytest.fixture(scope="session")
def cube_pattern(cube):
    return layout_pattern(cube, solve_pattern(cube)).normalized()


@pytest.fixture(scope="session")
def cube_koebe(cube_pattern):
    return build_koebe(cube_pattern, ROLE_SWAPPED)


@pytest.fixture(scope="session")
def cube_koebe_labels(cube_pattern):
    return build_koebe(cube_pattern, ROLE_LABELS)


@pytest.fixture(scope="session")
def enneper_pattern():
    return enneper_grid_pattern(4, 4, 0.25)


@pytest.fixture(scope="session")
def enneper_koebe(enneper_pattern):
    return koebe_from_planar(enneper_pattern)


@pytest.fixture(scope="session")
def catenoid_pattern():
    return sexp_pattern(6, range(-4, 5))


@pytest.fixture(scope="session")
def catenoid_koebe(catenoid_pattern):
    return koebe_from_planar(catenoid_pattern)


@pytest.fixture(scope="session")
def enneper():
    return make_enneper(4)


@pytest.fixture(scope="session")
def catenoid():
    return make_catenoid(6, 4)


@pytest.fixture(scope="session")
def schwarz():
    return make_schwarz_p(2, 2, 2)


@pytest.fixture(scope="session")
def scherk():
    return make_scherk(2, 2, 1.5)


@pytest.fixture(scope="session")
def all_surfaces(enneper, catenoid, schwarz, scherk):
    return {"enneper": enneper, "catenoid": catenoid, "schwarz-p": schwarz, "scherk": scherk}


def centers_array(surface, keys=None):
    keys = sorted(surface.spheres) if keys is None else keys
    return np.array([surface.spheres[v].center for v in keys])
