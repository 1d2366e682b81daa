import math
import os
import subprocess
import sys

import numpy as np
import pytest

from eqlab import kernels
from eqlab.bodies2d import (load_radial_samples, make_disc, make_ellipse, make_limacon,
                            make_parabola_body, make_yanagihara)

needs_ext = pytest.mark.skipif("cython" not in kernels.available_backends(),
                               reason="compiled extension not built")


def _bodies():
    E, _ = make_ellipse(2.0, 1.0)
    th = np.linspace(0, 2 * math.pi, 96, endpoint=False)
    sampled = load_radial_samples(np.column_stack([th, E.radius(th)]))
    rng = np.random.default_rng(2)
    th2 = np.sort(rng.uniform(0, 2 * math.pi, 80))
    spline = load_radial_samples(np.column_stack([th2, 1.0 + 0.05 * np.cos(2 * th2)]))
    return {
        "disc": make_disc(1.5, (0.3, -0.2)),
        "ellipse": E,
        "ellipse_moved": E.transformed(0.7, (1.0, -2.0)),
        "limacon": make_limacon(1.0, 3.0),
        "parabola": make_parabola_body()[0],
        "yanagihara": make_yanagihara(),
        "yanagihara_moved": make_yanagihara().transformed(-1.1, (0.5, 0.5)),
        "fourier": sampled,
        "spline": spline,
    }


BODIES = _bodies()


def both(fn):
    out = []
    for b in ("cython", "python"):
        with kernels.using(b):
            out.append(fn())
    return out


@needs_ext
@pytest.mark.parametrize("name", sorted(BODIES))
def test_radius_backends_agree(name):
    K = BODIES[name]
    t = np.linspace(-7, 7, 1001)
    c, p = both(lambda: kernels.radius(K, t))
    np.testing.assert_allclose(c, p, rtol=1e-13, atol=1e-14)


@needs_ext
@pytest.mark.parametrize("name", sorted(BODIES))
def test_ray_exit_backends_agree(name):
    K = BODIES[name]
    rng = np.random.default_rng(9)
    n = 500
    ang = rng.uniform(0, 2 * math.pi, n)
    o = K.pole + 0.1 * K.rmax * rng.uniform(-1, 1, (n, 2))
    c, p = both(lambda: kernels.ray_exit(K, o[:, 0], o[:, 1], np.cos(ang), np.sin(ang)))
    np.testing.assert_allclose(c, p, rtol=1e-12, atol=1e-13)
    # the exit point sits on the boundary
    q = o + c[:, None] * np.column_stack([np.cos(ang), np.sin(ang)])
    d = q - K.pole
    rr = K.radius(np.arctan2(d[:, 1], d[:, 0]))
    np.testing.assert_allclose(np.hypot(d[:, 0], d[:, 1]), rr, atol=1e-12)


@needs_ext
@pytest.mark.parametrize("name", ["ellipse", "parabola", "yanagihara", "limacon"])
@pytest.mark.parametrize("inverse", [False, True])
def test_orbit_backends_agree(name, inverse):
    K = BODIES[name]
    c, p = both(lambda: kernels.orbit(K, (0.0, 0.0) if name != "limacon" else (0.4, 0.0),
                                      0.5, 0.3, 200, inverse))
    np.testing.assert_allclose(c, p, atol=1e-9)
    step = np.diff(c)
    assert np.all(step < 0) if inverse else np.all(step > 0)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        with kernels.using("fortran"):
            pass


def test_pure_python_switch():
    env = dict(os.environ, EQLAB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from eqlab import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_scalar_inputs_broadcast():
    K = BODIES["disc"]
    s = kernels.ray_exit(K, 0.3, -0.2, np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    np.testing.assert_allclose(s, [1.5, 1.5], atol=1e-14)
