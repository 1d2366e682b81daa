"""Pure numpy fallback for the compiled kernels.

Works on any ``ConvexCurve`` through its vectorized ``radius``; ray exits use
k-section (many trial points per step) instead of scalar bisection.
"""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def radius(curve, theta) -> np.ndarray:
    return np.asarray(curve.radius(np.asarray(theta, dtype=float)), dtype=float)


def _outside(curve, x, y):
    dx = x - curve.pole[0]
    dy = y - curve.pole[1]
    return np.hypot(dx, dy) - curve.radius(np.arctan2(dy, dx))


def ray_exit(curve, ox, oy, ux, uy, k: int | None = None) -> np.ndarray:
    ox, oy, ux, uy = (np.atleast_1d(np.asarray(v, dtype=float)) for v in (ox, oy, ux, uy))
    n = ox.shape[0]
    if k is None:
        k = 64 if n <= 4 else 16
    lo = np.zeros(n)
    hi = 1.05 * curve.rmax + np.hypot(ox - curve.pole[0], oy - curve.pole[1])
    for _ in range(60):
        bad = _outside(curve, ox + hi * ux, oy + hi * uy) <= 0
        if not bad.any():
            break
        hi = np.where(bad, 2.0 * hi, hi)
    frac = np.arange(1, k) / k
    for _ in range(200):
        w = hi - lo
        if np.all(w <= 2.0 * np.spacing(hi)):
            break
        s = lo[:, None] + w[:, None] * frac
        out = _outside(curve, ox[:, None] + s * ux[:, None], oy[:, None] + s * uy[:, None]) > 0
        has = out.any(axis=1)
        j = np.argmax(out, axis=1)
        rows = np.arange(n)
        prev = np.where(j > 0, s[rows, np.maximum(j - 1, 0)], lo)
        new_lo = np.where(has, prev, s[:, -1])
        new_hi = np.where(has, s[rows, j], hi)
        if np.array_equal(new_lo, lo) and np.array_equal(new_hi, hi):
            break
        lo, hi = new_lo, new_hi
    return 0.5 * (lo + hi)


def orbit(curve, cx, cy, r, theta0, n, inverse=False) -> np.ndarray:
    out = np.empty(n + 1)
    th = float(theta0)
    out[0] = th
    px, py = float(curve.pole[0]), float(curve.pole[1])
    sign = -1.0 if inverse else 1.0
    for i in range(n):
        rho = float(curve.radius(th))
        ax = px + rho * math.cos(th)
        ay = py + rho * math.sin(th)
        vx, vy = ax - cx, ay - cy
        t = math.sqrt(vx * vx + vy * vy - r * r)
        phi = math.atan2(vy, vx) + sign * math.atan2(t, r)
        qx, qy = cx + r * math.cos(phi), cy + r * math.sin(phi)
        dx, dy = -sign * math.sin(phi), sign * math.cos(phi)
        s = float(ray_exit(curve, qx, qy, dx, dy)[0])
        tb = math.atan2(qy + s * dy - py, qx + s * dx - px)
        th = th + sign * math.fmod(math.fmod(sign * (tb - th), TWO_PI) + TWO_PI, TWO_PI)
        out[i + 1] = th
    return out
