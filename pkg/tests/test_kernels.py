import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koebe_minimal import _pykernels, kernels
from koebe_minimal.pattern_sphere import _circle_graph, default_targets

CATALAN = 0.915965594177219015054603514932


def F_oracle(x):
    return float(mpmath.im(mpmath.polylog(2, 1j * mpmath.exp(x))))


@pytest.mark.parametrize("x", [-30, -8.5, -2, -0.3, 0, 0.4, 1.7, 6, 25])
def test_dilog_against_mpmath(x):
    assert kernels.dilog_f(x) == pytest.approx(F_oracle(x), abs=1e-12, rel=1e-12)


def test_dilog_special_values():
    assert abs(kernels.dilog_f(0.0) - CATALAN) < 1e-10
    assert 0 <= kernels.dilog_f(-30.0) <= 1e-12
    assert kernels.dilog_f(-np.inf) == 0.0


@given(st.floats(-40, 40))
def test_dilog_reflection(x):
    assert abs(kernels.dilog_f(x) - kernels.dilog_f(-x) - np.pi * x / 2) <= 1e-12 * (1 + abs(x))


@given(st.floats(-20, 20))
@settings(deadline=None)
def test_dilog_derivative_is_arctan_exp(x):
    h = 1e-5
    fd = (kernels.dilog_f(x + h) - kernels.dilog_f(x - h)) / (2 * h)
    assert abs(fd - np.arctan(np.exp(x))) < 1e-8


def test_array_matches_scalar():
    xs = np.linspace(-12, 12, 97)
    assert np.allclose(kernels.dilog_f_array(xs), [kernels.dilog_f(x) for x in xs], rtol=0, atol=1e-14)


def _problem(cube, seed):
    cg = _circle_graph(cube)
    rng = np.random.default_rng(seed)
    return rng.normal(-1.0, 0.5, len(cg)), cg.ei, cg.ej, cg.to_array(default_targets(cube))


needs_c = pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="compiled kernels not built")


@needs_c
@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_backends_agree(cube, seed):
    c = kernels.BACKENDS["cython"]
    rho, ei, ej, phi = _problem(cube, seed)
    assert np.allclose(c.dilog_f_array(rho), _pykernels.dilog_f_array(rho), rtol=0, atol=1e-13)
    assert abs(c.functional(rho, ei, ej, phi) - _pykernels.functional(rho, ei, ej, phi)) < 1e-11
    assert np.allclose(c.gradient(rho, ei, ej, phi), _pykernels.gradient(rho, ei, ej, phi), atol=1e-12)
    assert np.allclose(c.hessian(rho, ei, ej), _pykernels.hessian(rho, ei, ej), atol=1e-12)
    t = float(seed % 7) / 3 - 1
    assert np.allclose(c.ones_derivative(rho, ei, ej, phi, t), _pykernels.ones_derivative(rho, ei, ej, phi, t),
                       atol=1e-11)


@pytest.mark.parametrize("mod", [_pykernels, kernels], ids=["python", "selected"])
def test_ones_derivative_matches_finite_differences(cube, mod):
    rho, ei, ej, phi = _problem(cube, 1)
    h = 1e-4
    for t in (-0.5, 0.0, 0.8):
        d1, d2 = mod.ones_derivative(rho, ei, ej, phi, t)
        f = lambda s: mod.functional(rho + s, ei, ej, phi)  # noqa: E731
        assert abs(d1 - (f(t + h) - f(t - h)) / (2 * h)) < 1e-6
        g = lambda s: mod.ones_derivative(rho, ei, ej, phi, s)[0]  # noqa: E731
        assert abs(d2 - (g(t + h) - g(t - h)) / (2 * h)) < 1e-6
        assert d2 < 0
