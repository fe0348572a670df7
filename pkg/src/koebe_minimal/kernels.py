"""Backend selection for the hot kernels.

The compiled extension ``_ckernels`` is used when it is importable; otherwise
the numpy implementation in ``_pykernels`` takes over.  Setting
``KOEBE_MINIMAL_PURE_PYTHON=1`` forces the fallback.
"""
import os

import numpy as np

from . import _pykernels

if os.environ.get("KOEBE_MINIMAL_PURE_PYTHON") == "1":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"
BACKENDS = {"python": _pykernels}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl


def _prep(rho, ei, ej, phi=None):
    rho = np.ascontiguousarray(rho, dtype=np.float64)
    ei = np.ascontiguousarray(ei, dtype=np.int64)
    ej = np.ascontiguousarray(ej, dtype=np.int64)
    if phi is None:
        return rho, ei, ej
    return rho, ei, ej, np.ascontiguousarray(phi, dtype=np.float64)


def dilog_f(x: float) -> float:
    return float(_impl.dilog_f(float(x)))


def dilog_f_array(x) -> np.ndarray:
    return np.asarray(_impl.dilog_f_array(np.asarray(x, dtype=float)))


def functional(rho, ei, ej, phi) -> float:
    return float(_impl.functional(*_prep(rho, ei, ej, phi)))


def gradient(rho, ei, ej, phi) -> np.ndarray:
    return np.asarray(_impl.gradient(*_prep(rho, ei, ej, phi)))


def ones_derivative(rho, ei, ej, phi, t: float) -> tuple[float, float]:
    return _impl.ones_derivative(*_prep(rho, ei, ej, phi), float(t))


def hessian(rho, ei, ej) -> np.ndarray:
    return np.asarray(_impl.hessian(*_prep(rho, ei, ej)))
