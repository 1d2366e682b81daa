"""Algebraic circle and ellipse fits with geometric residuals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class CircleFit:
    center: np.ndarray
    radius: float
    rms: float


@dataclass(frozen=True, eq=False)
class EllipseFit:
    center: np.ndarray
    axes: tuple[float, float]  # semi-major, semi-minor
    angle: float  # direction of the major axis
    conic: np.ndarray  # (A, B, C, D, E, F) of A x^2 + B xy + C y^2 + D x + E y + F = 0
    rms: float


def fit_circle(points) -> CircleFit:
    """Hyperaccurate algebraic circle fit (Al-Sharadqa and Chernov)."""
    p = np.asarray(points, dtype=float)
    if p.ndim != 2 or p.shape[0] < 3:
        raise ValueError("circle fit needs at least 3 points")
    centroid = p.mean(axis=0)
    x, y = (p - centroid).T
    z = x * x + y * y
    Zm = np.column_stack([z, x, y, np.ones_like(x)])
    _, S, Vt = np.linalg.svd(Zm, full_matrices=False)
    if S[3] / S[0] < 1e-12:
        A = Vt[3]
    else:
        Y = Vt.T @ np.diag(S) @ Vt
        Ninv = np.array([[0, 0, 0, 0.5], [0, 1, 0, 0], [0, 0, 1, 0], [0.5, 0, 0, -2 * z.mean()]])
        w, V = np.linalg.eigh(Y @ Ninv @ Y)
        order = np.argsort(w)
        A = np.linalg.solve(Y, V[:, order[1]])
    c = -A[1:3] / (2 * A[0])
    R = math.sqrt(A[1] ** 2 + A[2] ** 2 - 4 * A[0] * A[3]) / (2 * abs(A[0]))
    center = c + centroid
    rms = float(np.sqrt(np.mean((np.hypot(*(p - center).T) - R) ** 2)))
    return CircleFit(center, float(R), rms)


def _conic_to_geometric(a):
    A, B, C, D, E, F = a
    M = np.array([[A, B / 2], [B / 2, C]])
    center = np.linalg.solve(M, [-D / 2, -E / 2])
    Fc = F + 0.5 * (D * center[0] + E * center[1])
    w, V = np.linalg.eigh(M)
    axes2 = -Fc / w
    if np.any(axes2 <= 0):
        raise ValueError("conic is not a real ellipse")
    ax = np.sqrt(axes2)
    i = int(np.argmax(ax))
    major = V[:, i]
    return center, (float(ax[i]), float(ax[1 - i])), math.atan2(major[1], major[0])


def _bisect_root(r0, z0, z1, g, iters=2200):
    """Root of Eberly's secular equation, returned as ``u = s + 1`` to keep precision near 0."""
    n0 = r0 * z0
    rm = r0 - 1.0
    u0 = z1.copy()
    u1 = np.where(g < 0, 1.0, np.hypot(n0, z1))
    for _ in range(iters):
        u = 0.5 * (u0 + u1)
        ratio0 = n0 / (u + rm)
        ratio1 = z1 / u
        gs = ratio0 * ratio0 + ratio1 * ratio1 - 1.0
        u0 = np.where(gs > 0, u, u0)
        u1 = np.where(gs < 0, u, u1)
        if np.all(u1 - u0 <= 4 * np.spacing(u)):
            break
    return 0.5 * (u0 + u1)


def ellipse_distance(points, a: float, b: float) -> np.ndarray:
    """Distance from points (in the ellipse frame) to ``x^2/a^2 + y^2/b^2 = 1``, ``a >= b``."""
    p = np.abs(np.asarray(points, dtype=float))
    x, y = p[..., 0], p[..., 1]
    out = np.empty(x.shape)
    # generic quadrant interior
    m = (x > 0) & (y > 0)
    if m.any():
        z0, z1 = x[m] / a, y[m] / b
        g = z0 * z0 + z1 * z1 - 1.0
        r0 = (a / b) ** 2
        u = _bisect_root(r0, z0, z1, g)
        xr = r0 * x[m] / (u + (r0 - 1.0))
        yr = y[m] / u
        out[m] = np.where(g == 0, 0.0, np.hypot(xr - x[m], yr - y[m]))
    m = (x <= 0) & (y > 0)
    out[m] = np.abs(y[m] - b)
    m = y <= 0
    if m.any():
        numer, denom = a * x[m], a * a - b * b
        inside = numer < denom
        xde = np.where(inside, numer / denom if denom > 0 else 0.0, 1.0)
        d_in = np.hypot(a * xde - x[m], b * np.sqrt(np.maximum(1 - xde * xde, 0.0)))
        out[m] = np.where(inside, d_in, np.abs(x[m] - a))
    return out


def fit_ellipse(points) -> EllipseFit:
    """Direct least-squares ellipse fit (Fitzgibbon; Halir and Flusser form)."""
    p = np.asarray(points, dtype=float)
    if p.ndim != 2 or p.shape[0] < 5:
        raise ValueError("ellipse fit needs at least 5 points")
    mu = p.mean(axis=0)
    scale = float(np.sqrt(np.mean(np.sum((p - mu) ** 2, axis=1))))
    q = (p - mu) / scale
    x, y = q.T
    D1 = np.column_stack([x * x, x * y, y * y])
    D2 = np.column_stack([x, y, np.ones_like(x)])
    S1, S2, S3 = D1.T @ D1, D1.T @ D2, D2.T @ D2
    T = -np.linalg.solve(S3, S2.T)
    M = S1 + S2 @ T
    M = np.array([M[2] / 2, -M[1], M[0] / 2])
    _, vecs = np.linalg.eig(M)
    vecs = np.real(vecs)
    cond = 4 * vecs[0] * vecs[2] - vecs[1] ** 2
    a1 = vecs[:, int(np.argmax(cond))]
    if not np.max(cond) > 0:
        raise ValueError("no elliptic solution")
    A, B, C = a1
    D, E, F = T @ a1
    # undo the normalization q = (p - mu) / s
    s, (mx, my) = scale, mu
    A2, B2, C2 = A / s ** 2, B / s ** 2, C / s ** 2
    D2_, E2 = D / s, E / s
    conic = np.array([
        A2, B2, C2,
        -2 * A2 * mx - B2 * my + D2_,
        -2 * C2 * my - B2 * mx + E2,
        A2 * mx * mx + B2 * mx * my + C2 * my * my - D2_ * mx - E2 * my + F,
    ])
    conic /= np.linalg.norm(conic)
    center, axes, angle = _conic_to_geometric(conic)
    local = _to_frame(p, center, angle)
    rms = float(np.sqrt(np.mean(ellipse_distance(local, *axes) ** 2)))
    return EllipseFit(center, axes, angle, conic, rms)


def _to_frame(p, center, angle):
    c, s = math.cos(angle), math.sin(angle)
    d = p - center
    return np.column_stack([c * d[:, 0] + s * d[:, 1], -s * d[:, 0] + c * d[:, 1]])
