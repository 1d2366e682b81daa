"""The tangent-chord map F of a convex body around an inner circle.

For a contact angle ``phi`` on the circle, the tangent line is walked in the
direction ``d = (-sin phi, cos phi)`` so that the circle lies on its left;
the chord runs from ``A = P - a d`` to ``B = P + b d``. ``F`` sends ``A`` to
``B``. Boundary points are carried as lifted pole angles of the body.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError
from .geometry2d import TWO_PI, Circle, ConvexCurve, integrate

INTERIOR_MARGIN = 1e-9


@dataclass(frozen=True, eq=False)
class TangentChord:
    phi: float
    P: np.ndarray
    A: np.ndarray
    B: np.ndarray
    a: float
    b: float
    alpha: float

    @property
    def product(self) -> float:
        return self.a * self.b

    @property
    def length(self) -> float:
        return self.a + self.b

    @property
    def reciprocal_sum(self) -> float:
        return 1.0 / self.a + 1.0 / self.b


@dataclass(frozen=True, eq=False)
class ChordFamily:
    """Vectorized tangent chords over a grid of contact angles."""

    phi: np.ndarray
    P: np.ndarray
    A: np.ndarray
    B: np.ndarray
    a: np.ndarray
    b: np.ndarray
    alpha: np.ndarray

    @property
    def product(self):
        return self.a * self.b

    @property
    def length(self):
        return self.a + self.b

    @property
    def reciprocal_sum(self):
        return 1.0 / self.a + 1.0 / self.b


@dataclass(frozen=True, eq=False)
class OrbitRecord:
    params: np.ndarray
    points: np.ndarray
    chord_lengths: np.ndarray
    rotation_number: float
    period: int | None
    closure_error: float
    piecewise: bool = False  # boundary has breaks, so rho has kinks there


def interior_margin(K: ConvexCurve, circle: Circle) -> float:
    """Distance from the circle to the boundary (negative if it sticks out)."""
    if not K.contains(circle.center):
        return -K.distance_to(circle.center) - circle.radius
    return K.distance_to(circle.center) - circle.radius


def validate_interior(K: ConvexCurve, circle: Circle) -> None:
    margin = interior_margin(K, circle)
    if not margin > INTERIOR_MARGIN:
        raise DomainError(f"circle (center {circle.center.tolist()}, radius {circle.radius:g}) "
                          f"is not strictly inside {K.name} (margin {margin:.3g})")


def tangent_chords(K: ConvexCurve, circle: Circle, phis, validate: bool = True) -> ChordFamily:
    if validate:
        validate_interior(K, circle)
    phi = np.atleast_1d(np.asarray(phis, dtype=float))
    c, s = np.cos(phi), np.sin(phi)
    r = circle.radius
    px = circle.center[0] + r * c
    py = circle.center[1] + r * s
    dx, dy = -s, c
    both = kernels.ray_exit(K, np.concatenate([px, px]), np.concatenate([py, py]),
                            np.concatenate([dx, -dx]), np.concatenate([dy, -dy]))
    n = len(phi)
    b, a = both[:n], both[n:]
    P = np.stack([px, py], axis=-1)
    d = np.stack([dx, dy], axis=-1)
    A = P - a[:, None] * d
    B = P + b[:, None] * d
    alpha = np.arctan2(a, r) + np.arctan2(b, r)
    return ChordFamily(phi, P, A, B, a, b, alpha)


def tangent_chord_at(K: ConvexCurve, circle: Circle, phi: float) -> TangentChord:
    fam = tangent_chords(K, circle, [phi])
    return TangentChord(float(phi), fam.P[0], fam.A[0], fam.B[0], float(fam.a[0]),
                        float(fam.b[0]), float(fam.alpha[0]))


def boundary_param(K: ConvexCurve, point, tol: float = 1e-8) -> float:
    """Pole angle of a boundary point; rejects points off the boundary."""
    point = np.asarray(point, dtype=float)
    theta = float(K.param_of(point))
    gap = float(np.linalg.norm(K.point(theta) - point))
    if gap > tol:
        raise DomainError(f"point {point.tolist()} is {gap:.3g} away from the boundary")
    return theta


def _as_param(K, A) -> float:
    if np.ndim(A) == 0:
        return float(A)
    return boundary_param(K, A)


def map_F(K: ConvexCurve, circle: Circle, A, inverse: bool = False) -> float:
    """Image of a boundary point under F (or F^-1) as a lifted pole angle.

    ``A`` is either a pole angle or boundary coordinates. The result lies in
    ``(theta_A, theta_A + 2 pi)`` for F and ``(theta_A - 2 pi, theta_A)`` for F^-1.
    """
    validate_interior(K, circle)
    theta = _as_param(K, A)
    return float(kernels.orbit(K, circle.center, circle.radius, theta, 1, inverse)[1])


def tangent_length(K: ConvexCurve, circle: Circle, theta):
    """rho(A): length of the tangent segment from the boundary point to the circle."""
    d = K.point(theta) - circle.center
    return np.sqrt(np.maximum(np.einsum("...i,...i", d, d) - circle.radius ** 2, 0.0))


def invariant_measure(K: ConvexCurve, circle: Circle, t0: float, t1: float) -> float:
    """mu of the boundary arc between pole angles ``t0`` and ``t1``: integral of ds / rho."""
    def density(t):
        return K.speed(t) / tangent_length(K, circle, t)

    return integrate(density, t0, t1, K.world_breaks())


def total_measure(K: ConvexCurve, circle: Circle) -> float:
    return invariant_measure(K, circle, K.orientation, K.orientation + TWO_PI)


def _bump_weights(n: int) -> np.ndarray:
    t = (np.arange(n) + 0.5) / n
    w = np.exp(-1.0 / (t * (1.0 - t)))
    return w / w.sum()


def birkhoff_rotation(params: np.ndarray, weighted: bool = True) -> float:
    """Rotation number from lifted angles: (weighted) mean angular advance / 2 pi."""
    adv = np.diff(params) / TWO_PI
    if not weighted:
        return float(adv.mean())
    return float(_bump_weights(len(adv)) @ adv)


def rotation_number(K: ConvexCurve, circle: Circle, theta0: float = 0.0, mode: str = "measure",
                    n_iter: int = 2000, weighted: bool = True) -> float:
    """Rotation number of F in (0, 1).

    ``measure``: mu(arc from A0 to F(A0)) / mu(boundary); exact only when mu is
    F-invariant (equipotential configurations). ``orbit``: Birkhoff average of
    the pole-angle advance over ``n_iter`` iterates, smoothly weighted by
    default so that quasi-periodic orbits converge quickly.
    """
    validate_interior(K, circle)
    if mode == "measure":
        t1 = map_F(K, circle, theta0)
        return invariant_measure(K, circle, theta0, t1) / total_measure(K, circle)
    if mode == "orbit":
        params = kernels.orbit(K, circle.center, circle.radius, theta0, n_iter)
        return birkhoff_rotation(params, weighted)
    raise ValueError(f"unknown mode {mode!r}")


def detect_period(orbit: OrbitRecord, tol: float = 1e-9):
    """Smallest ``n >= 1`` with ``|A_n - A_0| < tol`` as ``(n, error)``, or None."""
    pts = orbit.points
    if len(pts) < 4:
        raise DomainError("orbit needs at least 3 iterates")
    d = np.linalg.norm(pts[1:] - pts[0], axis=1)
    hits = np.nonzero(d < tol)[0]
    if hits.size == 0:
        return None
    n = int(hits[0]) + 1
    return n, float(d[hits[0]])


def orbit(K: ConvexCurve, circle: Circle, theta0: float = 0.0, n: int = 100,
          tol: float = 1e-9) -> OrbitRecord:
    validate_interior(K, circle)
    params = kernels.orbit(K, circle.center, circle.radius, float(theta0), int(n))
    points = K.point(params)
    chords = np.linalg.norm(np.diff(points, axis=0), axis=1)
    piecewise = len(K.breaks) > 0
    rec = OrbitRecord(params, points, chords, birkhoff_rotation(params), None, math.nan, piecewise)
    found = detect_period(rec, tol) if n >= 3 else None
    if found is None:
        # nearest return as the closure error
        d = np.linalg.norm(points[1:] - points[0], axis=1)
        return OrbitRecord(params, points, chords, rec.rotation_number, None, float(d.min()),
                           piecewise)
    period, err = found
    return OrbitRecord(params, points, chords, rec.rotation_number, period, err, piecewise)
