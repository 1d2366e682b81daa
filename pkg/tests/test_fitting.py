import math

import numpy as np
import pytest

from eqlab.fitting import ellipse_distance, fit_circle, fit_ellipse


def ellipse_points(c, p, q, ang, n=200, t0=0.0, span=2 * math.pi):
    t = t0 + np.linspace(0, span, n, endpoint=False)
    R = np.array([[math.cos(ang), -math.sin(ang)], [math.sin(ang), math.cos(ang)]])
    return np.asarray(c) + np.column_stack([p * np.cos(t), q * np.sin(t)]) @ R.T


def test_circle_exact():
    t = np.linspace(0, 2 * math.pi, 50, endpoint=False)
    pts = np.column_stack([1.5 + 0.3 * np.cos(t), -2 + 0.3 * np.sin(t)])
    f = fit_circle(pts)
    np.testing.assert_allclose(f.center, [1.5, -2.0], atol=1e-13)
    assert f.radius == pytest.approx(0.3, abs=1e-13)
    assert f.rms < 1e-13


def test_circle_partial_arc_noise(rng):
    t = rng.uniform(0, 1.5, 400)
    pts = np.column_stack([np.cos(t), np.sin(t)]) * 4.0 + rng.normal(0, 1e-6, (400, 2))
    f = fit_circle(pts)
    assert f.radius == pytest.approx(4.0, abs=1e-4)
    assert f.rms == pytest.approx(1e-6, rel=0.3)


def test_circle_needs_three_points():
    with pytest.raises(ValueError):
        fit_circle([[0, 0], [1, 1]])


def test_ellipse_exact():
    pts = ellipse_points((0.5, -1.0), 3.0, 1.2, 0.4)
    f = fit_ellipse(pts)
    np.testing.assert_allclose(f.center, [0.5, -1.0], atol=1e-10)
    np.testing.assert_allclose(f.axes, [3.0, 1.2], atol=1e-10)
    assert (f.angle - 0.4) % math.pi == pytest.approx(0.0, abs=1e-10)
    assert f.rms < 1e-10


def test_ellipse_rms_is_geometric(rng):
    pts = ellipse_points((0, 0), 2.0, 1.0, 0.0, n=2000)
    normal = np.column_stack([pts[:, 0] / 4, pts[:, 1]])
    normal /= np.linalg.norm(normal, axis=1)[:, None]
    off = pts + 1e-4 * normal
    f = fit_ellipse(off)
    # pushing every point 1e-4 outward is absorbed only partly by a refit
    assert 0 < f.rms < 1e-4


def test_ellipse_distance_closed_cases():
    d = ellipse_distance(np.array([[3.0, 0.0], [0.0, 2.0], [0.0, 0.0], [2.0, 0.0]]), 2.0, 1.0)
    np.testing.assert_allclose(d, [1.0, 1.0, 1.0, 0.0], atol=1e-14)


def test_ellipse_distance_against_brute_force(rng):
    a, b = 2.0, 0.7
    t = np.linspace(0, 2 * math.pi, 400_000, endpoint=False)
    curve = np.column_stack([a * np.cos(t), b * np.sin(t)])
    pts = rng.uniform(-3, 3, (40, 2))
    d = ellipse_distance(pts, a, b)
    for p, dv in zip(pts, d):
        brute = np.min(np.linalg.norm(curve - p, axis=1))
        assert dv == pytest.approx(brute, abs=1e-7)
        assert dv <= brute + 1e-12


def test_ellipse_needs_five_points():
    with pytest.raises(ValueError):
        fit_ellipse([[0, 0], [1, 0], [0, 1], [1, 1]])
