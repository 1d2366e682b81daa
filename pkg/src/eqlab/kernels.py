"""Backend selection for the hot kernels.

The compiled extension ``_ckernels`` is used when it imported and the curve
exposes a ``kernel_spec``; otherwise the numpy fallback runs. Setting
``EQLAB_PURE_PYTHON=1`` forces the fallback at import time.
"""

from __future__ import annotations

import os
from contextlib import contextmanager

import numpy as np

from . import _kernels_py

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKEND = "cython" if _ckernels is not None and not os.environ.get("EQLAB_PURE_PYTHON") else "python"


def available_backends() -> tuple[str, ...]:
    return ("cython", "python") if _ckernels is not None else ("python",)


@contextmanager
def using(backend: str):
    """Temporarily force a backend (``"cython"`` or ``"python"``)."""
    global BACKEND
    if backend not in available_backends():
        raise ValueError(f"backend {backend!r} not available")
    saved = BACKEND
    BACKEND = backend
    try:
        yield
    finally:
        BACKEND = saved


def _spec(curve):
    if BACKEND != "cython":
        return None
    return curve.kernel_spec()


def _arr(v, n=None):
    a = np.ascontiguousarray(np.atleast_1d(np.asarray(v, dtype=float)))
    if n is not None and a.shape[0] != n:
        a = np.ascontiguousarray(np.broadcast_to(a, (n,)))
    return a


def radius(curve, theta) -> np.ndarray:
    spec = _spec(curve)
    if spec is None:
        return _kernels_py.radius(curve, theta)
    th = np.asarray(theta, dtype=float)
    out = _ckernels.radius(spec.kind, spec.params, spec.rotation, _arr(th.ravel()))
    return out.reshape(th.shape)


def ray_exit(curve, ox, oy, ux, uy) -> np.ndarray:
    """Distance from interior origins ``(ox, oy)`` to the boundary along unit ``(ux, uy)``."""
    n = max(np.size(ox), np.size(oy), np.size(ux), np.size(uy))
    ox, oy, ux, uy = (_arr(v, n) for v in (ox, oy, ux, uy))
    spec = _spec(curve)
    if spec is None:
        return _kernels_py.ray_exit(curve, ox, oy, ux, uy)
    return _ckernels.ray_exit(spec.kind, spec.params, spec.pole_x, spec.pole_y, spec.rotation,
                              spec.rmax, ox, oy, ux, uy)


def orbit(curve, center, r: float, theta0: float, n: int, inverse: bool = False) -> np.ndarray:
    """Lifted pole angles ``theta_0 .. theta_n`` of the tangent-chord map."""
    cx, cy = float(center[0]), float(center[1])
    spec = _spec(curve)
    if spec is None:
        return _kernels_py.orbit(curve, cx, cy, float(r), float(theta0), int(n), inverse)
    return _ckernels.orbit(spec.kind, spec.params, spec.pole_x, spec.pole_y, spec.rotation,
                           spec.rmax, cx, cy, float(r), float(theta0), int(n), bool(inverse))
