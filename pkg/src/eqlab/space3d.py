"""Verifiers in three dimensions: midpoint loci, tangent cones, sphere checks, 2-cycles.

Bodies are balls and ellipsoids ``{x : (x - c)^T Q (x - c) <= 1}``; every chord
and plane section is computed from the quadratic form, so no boundary sampling
enters the verdicts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, IntersectionError

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
N_DIRECTIONS = 2048


def fibonacci_sphere(n: int = N_DIRECTIONS) -> np.ndarray:
    """Deterministic near-uniform unit vectors (Fibonacci lattice)."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    rho = np.sqrt(1.0 - z * z)
    phi = GOLDEN_ANGLE * np.arange(n)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)


def orthonormal_complement(u) -> tuple[np.ndarray, np.ndarray]:
    """Two unit vectors spanning the plane orthogonal to ``u``."""
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    k = int(np.argmin(np.abs(u)))
    e = np.zeros(3)
    e[k] = 1.0
    e1 = e - (e @ u) * u
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(u, e1)


@dataclass(frozen=True, eq=False)
class Sphere:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(3))
        if not self.radius > 0:
            raise DomainError(f"sphere radius must be positive, got {self.radius!r}")


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """``{x : (x - center)^T Q (x - center) <= 1}`` with ``Q`` symmetric positive definite."""

    center: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(3)
        Q = np.asarray(self.Q, dtype=float).reshape(3, 3)
        if np.max(np.abs(Q - Q.T)) > 1e-14 * max(1.0, np.max(np.abs(Q))):
            raise DomainError("Q must be symmetric")
        w, V = np.linalg.eigh(Q)
        if not np.all(w > 0):
            raise DomainError(f"Q must be positive definite, eigenvalues {w.tolist()}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "Q", 0.5 * (Q + Q.T))
        object.__setattr__(self, "_eig", (w, V))

    @classmethod
    def ball(cls, radius: float, center=(0.0, 0.0, 0.0)) -> "Ellipsoid":
        if not radius > 0:
            raise DomainError(f"ball radius must be positive, got {radius!r}")
        return cls(center, np.eye(3) / radius ** 2)

    @classmethod
    def from_axes(cls, axes, center=(0.0, 0.0, 0.0), rotation=None) -> "Ellipsoid":
        axes = np.asarray(axes, dtype=float)
        R = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
        return cls(center, R @ np.diag(1.0 / axes ** 2) @ R.T)

    @property
    def semi_axes(self) -> np.ndarray:
        return 1.0 / np.sqrt(self._eig[0])

    @property
    def is_ball(self) -> bool:
        w = self._eig[0]
        return bool(np.ptp(w) <= 1e-14 * w.max())

    def level(self, x) -> np.ndarray:
        d = np.asarray(x, dtype=float) - self.center
        return np.einsum("...i,ij,...j", d, self.Q, d)

    def contains(self, x) -> np.ndarray:
        return self.level(x) < 1.0

    def chord(self, P, u):
        """Parameters ``t- < 0 < t+`` where ``P + t u`` meets the boundary (``P`` inside)."""
        d = np.asarray(P, dtype=float) - self.center
        u = np.asarray(u, dtype=float)
        a = np.einsum("...i,ij,...j", u, self.Q, u)
        b = np.einsum("...i,ij,j", u, self.Q, d)
        c = float(d @ self.Q @ d) - 1.0
        disc = np.sqrt(b * b - a * c)
        # stable quadratic roots
        q = -(b + np.copysign(disc, b))
        t1, t2 = q / a, c / q
        return np.minimum(t1, t2), np.maximum(t1, t2)

    def distance(self, x) -> np.ndarray:
        """Euclidean distance from points to the boundary surface."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.is_ball:
            R = float(self.semi_axes[0])
            return np.abs(np.linalg.norm(x - self.center, axis=1) - R)
        w, V = self._eig
        axes = 1.0 / np.sqrt(w)
        order = np.argsort(-axes)
        y = (x - self.center) @ V[:, order]
        return ellipsoid_distance(y, axes[order])


def ellipsoid_distance(points, axes) -> np.ndarray:
    """Distance to the axis-aligned ellipsoid with semi-axes ``e0 >= e1 >= e2`` (Eberly).

    Coordinates that vanish are nudged to a tiny positive value so the single
    bisection branch applies; the distance is continuous there.
    """
    e = np.asarray(axes, dtype=float)
    y = np.abs(np.atleast_2d(np.asarray(points, dtype=float)))
    y = np.maximum(y, 1e-12 * e[0])
    z = y / e
    g = np.sum(z * z, axis=1) - 1.0
    r = (e / e[-1]) ** 2
    n = r * z
    rm = r - 1.0
    # bisect in u = s + 1 so the root keeps relative precision when it nears 0
    u0 = z[:, -1].copy()
    u1 = np.where(g < 0, 1.0, np.linalg.norm(n, axis=1))
    for _ in range(2200):
        u = 0.5 * (u0 + u1)
        f = np.sum((n / (u[:, None] + rm)) ** 2, axis=1) - 1.0
        u0 = np.where(f > 0, u, u0)
        u1 = np.where(f < 0, u, u1)
        if np.all(u1 - u0 <= 4 * np.spacing(u)):
            break
    u = 0.5 * (u0 + u1)
    x = r * y / (u[:, None] + rm)
    return np.where(g == 0, 0.0, np.linalg.norm(x - y, axis=1))


def _require_inside(E: Ellipsoid, P, what="point"):
    P = np.asarray(P, dtype=float).reshape(3)
    if not E.level(P) < 1.0 - 1e-12:
        raise DomainError(f"{what} {P.tolist()} is not strictly inside the body")
    return P


# midpoint loci

MONOMIALS = ("xx", "yy", "zz", "xy", "xz", "yz", "x", "y", "z", "1")


def _monomials(p):
    x, y, z = p.T
    one = np.ones_like(x)
    return np.column_stack([x * x, y * y, z * z, x * y, x * z, y * z, x, y, z, one])


@dataclass(frozen=True, eq=False)
class QuadricFit:
    coefficients: np.ndarray  # unit Frobenius norm, order MONOMIALS
    Q: np.ndarray  # (x - center)^T Q (x - center) = 1
    center: np.ndarray
    rms_residual: float


def fit_quadric(points) -> QuadricFit:
    """Least-squares quadric through points (10 monomials, smallest singular vector)."""
    p = np.asarray(points, dtype=float)
    mu = p.mean(axis=0)
    s = float(np.sqrt(np.mean(np.sum((p - mu) ** 2, axis=1))))
    q = (p - mu) / s
    _, _, Vt = np.linalg.svd(_monomials(q), full_matrices=False)
    a = Vt[-1]
    A = np.array([[a[0], a[3] / 2, a[4] / 2], [a[3] / 2, a[1], a[5] / 2], [a[4] / 2, a[5] / 2, a[2]]])
    lin, const = a[6:9], a[9]
    cq = np.linalg.solve(A, -lin / 2)
    k = -(const + 0.5 * lin @ cq)
    Qn = A / k  # in normalized coordinates
    center = mu + s * cq
    Q = Qn / s ** 2
    # residual in world units: Sampson distance of each point
    d = p - center
    f = np.einsum("ij,jk,ik->i", d, Q, d) - 1.0
    grad = 2.0 * d @ Q
    res = np.abs(f) / np.maximum(np.linalg.norm(grad, axis=1), 1e-300)
    # coefficients in world coordinates, for reporting
    coef = np.array([Q[0, 0], Q[1, 1], Q[2, 2], 2 * Q[0, 1], 2 * Q[0, 2], 2 * Q[1, 2],
                     *(-2 * Q @ center), float(center @ Q @ center) - 1.0])
    coef /= np.linalg.norm(coef)
    return QuadricFit(coef, Q, center, float(np.sqrt(np.mean(res ** 2))))


@dataclass(frozen=True, eq=False)
class MidpointLocusFit:
    midpoints: np.ndarray
    fit: QuadricFit | None
    rms_residual: float
    ratio: float  # linear ratio of the homothety onto E
    expected_ratio: float
    expected_center: np.ndarray
    shape_defect: float  # distance between unit-Frobenius-normalized Q forms
    center_defect: float
    membership: tuple[float, float]  # quadric residuals at P and at the body center
    degenerate: bool


def midpoint_locus(E: Ellipsoid, P, n_samples: int = N_DIRECTIONS) -> MidpointLocusFit:
    """Midpoints of the chords through ``P`` and the quadric fitted to them.

    For an ellipsoid the locus is the ellipsoid homothetic to ``E`` with center
    ``(P + c) / 2`` and ratio ``sqrt((P - c)^T Q (P - c)) / 2``; it passes
    through ``P`` and ``c``.
    """
    P = _require_inside(E, P)
    u = fibonacci_sphere(n_samples)
    tm, tp = E.chord(P, u)
    mid = P + 0.5 * (tm + tp)[:, None] * u
    d = P - E.center
    k = math.sqrt(float(d @ E.Q @ d)) / 2.0
    c_exp = 0.5 * (P + E.center)
    scale = float(np.max(E.semi_axes))
    if np.max(np.linalg.norm(mid - E.center, axis=1)) < 1e-12 * scale:
        return MidpointLocusFit(mid, None, 0.0, 0.0, k, c_exp, 0.0, 0.0, (0.0, 0.0), True)
    fit = fit_quadric(mid)
    ratio = math.sqrt(np.linalg.norm(E.Q) / np.linalg.norm(fit.Q))
    shape = float(np.linalg.norm(fit.Q / np.linalg.norm(fit.Q) - E.Q / np.linalg.norm(E.Q)))

    def member(x):
        dx = x - fit.center
        return abs(float(dx @ fit.Q @ dx) - 1.0)

    return MidpointLocusFit(mid, fit, fit.rms_residual, ratio, k, c_exp, shape,
                            float(np.linalg.norm(fit.center - c_exp)),
                            (member(P), member(E.center)), False)


# tangent cone

@dataclass(frozen=True, eq=False)
class ConeProjection:
    gamma_center: np.ndarray
    gamma_normal: np.ndarray
    gamma_radius: float
    gamma: np.ndarray  # contact circle samples
    image: np.ndarray  # 2 Y - P
    defect: float  # max distance of the image from the boundary


def tangent_cone_projection(K: Ellipsoid, S: Sphere, P, n_samples: int = 360,
                            boundary_tol: float = 1e-9) -> ConeProjection:
    """Contact circle of the cone from ``P`` to ``S`` and its image under ``Y -> 2Y - P``."""
    P = np.asarray(P, dtype=float).reshape(3)
    if abs(float(K.level(P)) - 1.0) > boundary_tol:
        raise DomainError(f"point {P.tolist()} is not on the boundary (level {float(K.level(P)):.6g})")
    _check_sphere_inside(K, S)
    v = P - S.center
    L2 = float(v @ v)
    n = v / math.sqrt(L2)
    g = S.center + (S.radius ** 2 / L2) * v
    rg = S.radius * math.sqrt(1.0 - S.radius ** 2 / L2)
    e1, e2 = orthonormal_complement(n)
    t = np.linspace(0.0, 2 * math.pi, n_samples, endpoint=False)
    Y = g + rg * (np.cos(t)[:, None] * e1 + np.sin(t)[:, None] * e2)
    image = 2.0 * Y - P
    return ConeProjection(g, n, rg, Y, image, float(np.max(K.distance(image))))


def _check_sphere_inside(K: Ellipsoid, S: Sphere):
    if not (K.contains(S.center) and float(K.distance(S.center)[0]) > S.radius * (1 + 1e-12)):
        raise DomainError("sphere is not strictly inside the body")


# sphere property check

@dataclass(frozen=True, eq=False)
class SphereCheck:
    mode: str
    points: np.ndarray
    lambdas: np.ndarray  # mean functional per point
    deviations: np.ndarray  # relative peak-to-peak per point
    spread: float  # relative peak-to-peak of lambdas
    verdict: str  # "constant", "per-point only" or "nonconstant"
    passed: bool


def section_chords(K: Ellipsoid, P, normal, n_dirs: int = 360):
    """``(|AP|, |PB|)`` of the chords through ``P`` inside the plane through ``P`` with ``normal``."""
    e1, e2 = orthonormal_complement(normal)
    psi = np.linspace(0.0, math.pi, n_dirs, endpoint=False)
    u = np.cos(psi)[:, None] * e1 + np.sin(psi)[:, None] * e2
    tm, tp = K.chord(P, u)
    return -tm, tp


def sphere_property_check(K: Ellipsoid, S: Sphere, mode: str = "equipotential",
                          constant_required: bool = True, n_points: int = 64, n_dirs: int = 360,
                          tol: float = 1e-9) -> SphereCheck:
    """Product (or reciprocal sum) over chords through ``P`` in the tangent plane of ``S`` at ``P``."""
    if mode not in ("equipotential", "equireciprocal"):
        raise ValueError(f"unknown mode {mode!r}")
    _check_sphere_inside(K, S)
    normals = fibonacci_sphere(n_points)
    pts = S.center + S.radius * normals
    lams, devs = np.empty(n_points), np.empty(n_points)
    for i, (P, nv) in enumerate(zip(pts, normals)):
        a, b = section_chords(K, P, nv, n_dirs)
        vals = a * b if mode == "equipotential" else 1.0 / a + 1.0 / b
        lams[i] = vals.mean()
        devs[i] = np.ptp(vals) / abs(lams[i])
    spread = float(np.ptp(lams) / abs(lams.mean()))
    per_point = bool(np.all(devs < tol))
    if per_point and spread < tol:
        verdict = "constant"
    elif per_point:
        verdict = "per-point only"
    else:
        verdict = "nonconstant"
    passed = per_point and (spread < tol or not constant_required)
    return SphereCheck(mode, pts, lams, devs, spread, verdict, passed)


# 2-cycles of planes

@dataclass(frozen=True, eq=False)
class TwoCycle:
    """Planes ``H_y = {x : <x, y> = delta(y)}`` with ``delta`` odd on the unit sphere."""

    delta: Callable[[np.ndarray], float]
    odd_tol: float = 1e-12

    def __post_init__(self):
        y = fibonacci_sphere(1000)
        d = np.array([self.delta(v) for v in y])
        dm = np.array([self.delta(-v) for v in y])
        defect = float(np.max(np.abs(d + dm)))
        if defect > self.odd_tol:
            raise DomainError(f"delta is not odd (defect {defect:.3g})")

    def offset(self, y) -> float:
        return float(self.delta(np.asarray(y, dtype=float)))


@dataclass(frozen=True, eq=False)
class PlaneThroughLine:
    x0: np.ndarray
    sigma: float
    containment_defect: float
    t0: float


def two_cycle_plane_through_line(cycle: TwoCycle, p0, p1, n_sweep: int = 720,
                                 tol: float = 1e-10) -> PlaneThroughLine:
    """Unit ``x0`` orthogonal to the line ``p0 p1`` whose plane ``H_x0`` contains the line.

    On the great circle ``S(u)`` orthogonal to the line direction ``u`` the
    function ``sigma(x) = <m, x> - delta(x)`` (``m`` the midpoint) is odd, so it
    changes sign on any half circle; the root is bracketed on ``[0, pi]`` and
    bisected.
    """
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    u = p1 - p0
    if not np.linalg.norm(u) > 0:
        raise DomainError("line endpoints coincide")
    e1, e2 = orthonormal_complement(u)
    m = 0.5 * (p0 + p1)

    def x_of(t):
        return math.cos(t) * e1 + math.sin(t) * e2

    def sigma(t):
        x = x_of(t)
        return float(m @ x) - cycle.offset(x)

    ts = np.linspace(0.0, math.pi, n_sweep + 1)
    sv = np.array([sigma(t) for t in ts])
    zero = np.nonzero(sv == 0.0)[0]
    if zero.size:
        t0 = float(ts[zero[0]])
    else:
        flips = np.nonzero(np.sign(sv[:-1]) != np.sign(sv[1:]))[0]
        if flips.size == 0:
            raise IntersectionError("sigma shows no sign change on the half circle (resolution failure)")
        lo, hi = float(ts[flips[0]]), float(ts[flips[0] + 1])
        slo = sv[flips[0]]
        while True:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            sm = sigma(mid)
            if sm == 0.0:
                lo = hi = mid
                break
            if (sm > 0) == (slo > 0):
                lo, slo = mid, sm
            else:
                hi = mid
        t0 = 0.5 * (lo + hi)
    x0 = x_of(t0)
    d = cycle.offset(x0)
    defect = max(abs(float(p0 @ x0) - d), abs(float(p1 @ x0) - d))
    return PlaneThroughLine(x0, sigma(t0), defect, t0)
