"""Plane-curve substrate: star-shaped convex boundaries, lines, circles.

Every boundary is parametrized by the polar angle ``theta`` about its
``pole`` (an interior point), measured in the world frame. Curves are
counterclockwise, so positive curvature means locally convex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, EvaluationError, IntersectionError, NonConvexError

TWO_PI = 2.0 * math.pi

# kernel kind codes, mirrored in _ckernels.pyx
KIND_CIRCLE = 0
KIND_ELLIPSE = 1
KIND_LIMACON = 2
KIND_PARABOLA_BODY = 3
KIND_FOURIER = 4
KIND_SECTORS = 5
KIND_PPOLY = 6

FD_STEP = 1e-5
CONVEXITY_GRID = 4096


class KernelSpec(NamedTuple):
    """Flat description of a boundary understood by the compiled kernels."""

    kind: int
    params: np.ndarray
    pole_x: float
    pole_y: float
    rotation: float
    rmax: float


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def rotate(points, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    p = np.asarray(points, dtype=float)
    return np.stack([c * p[..., 0] - s * p[..., 1], s * p[..., 0] + c * p[..., 1]], axis=-1)


@dataclass(frozen=True, eq=False)
class Line:
    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        d = np.asarray(self.direction, dtype=float)
        n = np.linalg.norm(d)
        if not n > 0:
            raise DomainError("line direction must be nonzero")
        object.__setattr__(self, "direction", d / n)

    @classmethod
    def through(cls, p, q) -> "Line":
        p = np.asarray(p, dtype=float)
        return cls(p, np.asarray(q, dtype=float) - p)

    @classmethod
    def from_equation(cls, a: float, b: float, c: float) -> "Line":
        """The line ``a*x + b*y = c``, directed so its normal (a, b) points right."""
        n2 = a * a + b * b
        return cls(np.array([a * c / n2, b * c / n2]), np.array([-b, a]))

    @property
    def normal(self) -> np.ndarray:
        return np.array([-self.direction[1], self.direction[0]])

    def signed_distance(self, points) -> np.ndarray:
        """Positive on the left of the direction."""
        p = np.asarray(points, dtype=float) - self.point
        return p[..., 0] * -self.direction[1] + p[..., 1] * self.direction[0]

    def at(self, t) -> np.ndarray:
        return self.point + np.multiply.outer(t, self.direction)


@dataclass(frozen=True, eq=False)
class Circle:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(2))
        if not self.radius > 0:
            raise DomainError(f"circle radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))

    def point(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        return self.center + self.radius * np.stack([np.cos(phi), np.sin(phi)], axis=-1)


class ConvexCurve:
    """Closed convex curve, star-shaped about ``pole``.

    Subclasses provide ``_derivs_body(t)`` returning ``(r, r', r'')`` for
    body-frame angles ``t``; the world angle is ``t + orientation``.
    """

    pole: np.ndarray
    orientation: float = 0.0
    breaks: tuple = ()
    sampled: bool = False
    name: str = "curve"

    def _derivs_body(self, t):
        raise NotImplementedError

    def _radius_body(self, t):
        return self._derivs_body(t)[0]

    def kernel_spec(self) -> KernelSpec | None:
        return None

    def transformed(self, angle: float, shift=(0.0, 0.0)) -> "ConvexCurve":
        raise NotImplementedError

    # world-frame evaluation

    def radius(self, theta):
        return self._radius_body(np.asarray(theta, dtype=float) - self.orientation)

    def radius_derivs(self, theta):
        return self._derivs_body(np.asarray(theta, dtype=float) - self.orientation)

    def point(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        r = self.radius(theta)
        return self.pole + np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)

    def velocity(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        r, r1, _ = self.radius_derivs(theta)
        c, s = np.cos(theta), np.sin(theta)
        return np.stack([r1 * c - r * s, r1 * s + r * c], axis=-1)

    def speed(self, theta):
        r, r1, _ = self.radius_derivs(theta)
        return np.hypot(r, r1)

    def curvature(self, theta):
        r, r1, r2 = self.radius_derivs(theta)
        return (r * r - r * r2 + 2.0 * r1 * r1) / (r1 * r1 + r * r) ** 1.5

    def param_of(self, points) -> np.ndarray:
        d = np.asarray(points, dtype=float) - self.pole
        return np.arctan2(d[..., 1], d[..., 0])

    def contains(self, points) -> np.ndarray:
        d = np.asarray(points, dtype=float) - self.pole
        return np.hypot(d[..., 0], d[..., 1]) < self.radius(np.arctan2(d[..., 1], d[..., 0]))

    def world_breaks(self) -> np.ndarray:
        return np.mod(np.asarray(self.breaks, dtype=float) + self.orientation, TWO_PI)

    @cached_property
    def sample(self):
        """``(thetas, points)`` on a uniform 4096-point grid."""
        th = self.orientation + np.linspace(0.0, TWO_PI, CONVEXITY_GRID, endpoint=False)
        return th, self.point(th)

    @cached_property
    def rmax(self) -> float:
        th, _ = self.sample
        return float(np.max(self.radius(th)))

    @cached_property
    def diameter(self) -> float:
        _, pts = self.sample
        u = np.linspace(0.0, math.pi, 512, endpoint=False)
        proj = pts @ np.stack([np.cos(u), np.sin(u)])
        return float(np.max(proj.max(axis=0) - proj.min(axis=0)))

    def bounding_box(self):
        _, pts = self.sample
        return pts.min(axis=0), pts.max(axis=0)

    def distance_to(self, x) -> float:
        """Distance from an interior point to the boundary (refined grid minimum)."""
        x = np.asarray(x, dtype=float)
        th, pts = self.sample
        d = np.hypot(pts[:, 0] - x[0], pts[:, 1] - x[1])
        k = int(np.argmin(d))
        h = TWO_PI / len(th)

        def dist(t):
            p = self.point(t)
            return math.hypot(p[0] - x[0], p[1] - x[1])

        res = minimize_scalar(dist, bounds=(th[k] - h, th[k] + h), method="bounded",
                              options={"xatol": 1e-12})
        return float(min(res.fun, d[k]))


def _fd_derivs(r: Callable, t, h: float = FD_STEP):
    f0 = r(t)
    fp1, fm1 = r(t + h), r(t - h)
    fp2, fm2 = r(t + 2 * h), r(t - 2 * h)
    d1 = (fp1 - fm1) / (2 * h)
    d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)
    return f0, d1, d2


@dataclass(frozen=True, eq=False)
class RadialCurve(ConvexCurve):
    """Boundary ``theta -> pole + r(theta - orientation) * e(theta)``.

    ``r1``/``r2`` are analytic derivatives; missing ones fall back to central
    differences with step ``FD_STEP``.
    """

    r: Callable
    r1: Callable | None = None
    r2: Callable | None = None
    pole: np.ndarray = field(default_factory=lambda: np.zeros(2))
    orientation: float = 0.0
    breaks: tuple = ()
    kernel: tuple | None = None
    sampled: bool = False
    convex: bool = True
    convexity_tol: float = 1e-9
    name: str = "radial"

    def __post_init__(self):
        object.__setattr__(self, "pole", np.asarray(self.pole, dtype=float).reshape(2))
        object.__setattr__(self, "orientation", float(self.orientation))
        self._validate()

    def _validate(self):
        t = np.linspace(0.0, TWO_PI, CONVEXITY_GRID, endpoint=False)
        r = np.asarray(self._radius_body(t), dtype=float)
        if not np.all(np.isfinite(r)):
            raise EvaluationError(f"{self.name}: non-finite radius on the grid")
        if np.any(r <= 0):
            bad = t[r <= 0]
            raise DomainError(f"{self.name}: radius must be positive (theta={bad[0]:.6g})")
        shifted = np.asarray(self._radius_body(t + TWO_PI), dtype=float)
        if np.max(np.abs(shifted - r)) > 1e-12 * max(1.0, float(np.max(r))):
            raise DomainError(f"{self.name}: radius is not 2*pi periodic")
        if self.convex:
            check_convex(self, tol=self.convexity_tol)

    def _derivs_body(self, t):
        t = np.asarray(t, dtype=float)
        if self.r1 is not None and self.r2 is not None:
            return self.r(t), self.r1(t), self.r2(t)
        f0, d1, d2 = _fd_derivs(self.r, t)
        if self.r1 is not None:
            d1 = self.r1(t)
        return f0, d1, d2

    def _radius_body(self, t):
        return self.r(np.asarray(t, dtype=float))

    def kernel_spec(self) -> KernelSpec | None:
        if self.kernel is None:
            return None
        kind, params = self.kernel
        return KernelSpec(int(kind), np.ascontiguousarray(params, dtype=float),
                          float(self.pole[0]), float(self.pole[1]), self.orientation,
                          1.05 * self.rmax + 1e-12)

    def transformed(self, angle: float, shift=(0.0, 0.0)) -> "RadialCurve":
        pole = rotate(self.pole, angle) + np.asarray(shift, dtype=float)
        return replace(self, pole=pole, orientation=self.orientation + angle)


# piecewise boundaries


@dataclass(frozen=True, eq=False)
class LineSegment:
    p0: np.ndarray
    p1: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p0", np.asarray(self.p0, dtype=float))
        object.__setattr__(self, "p1", np.asarray(self.p1, dtype=float))

    @property
    def start(self):
        return self.p0

    @property
    def end(self):
        return self.p1

    def tangent_at_start(self):
        return unit(self.p1 - self.p0)

    tangent_at_end = tangent_at_start

    def turning(self) -> float:
        return 0.0

    def transformed(self, angle, shift):
        return LineSegment(rotate(self.p0, angle) + shift, rotate(self.p1, angle) + shift)


@dataclass(frozen=True, eq=False)
class CircularArc:
    center: np.ndarray
    radius: float
    start_angle: float
    end_angle: float
    ccw: bool = True

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    def _pt(self, a):
        return self.center + self.radius * np.array([math.cos(a), math.sin(a)])

    @property
    def start(self):
        return self._pt(self.start_angle)

    @property
    def end(self):
        return self._pt(self.end_angle)

    @property
    def span(self) -> float:
        s = (self.end_angle - self.start_angle) % TWO_PI
        return s if self.ccw else s - TWO_PI if s else 0.0

    def _tangent(self, a):
        t = np.array([-math.sin(a), math.cos(a)])
        return t if self.ccw else -t

    def tangent_at_start(self):
        return self._tangent(self.start_angle)

    def tangent_at_end(self):
        return self._tangent(self.end_angle)

    def turning(self) -> float:
        return self.span

    def contains_angle(self, a) -> np.ndarray:
        if self.ccw:
            rel = np.mod(np.asarray(a) - self.start_angle, TWO_PI)
        else:
            rel = np.mod(self.start_angle - np.asarray(a), TWO_PI)
        return rel <= abs(self.span) + 1e-12

    def transformed(self, angle, shift):
        return CircularArc(rotate(self.center, angle) + shift, self.radius,
                           self.start_angle + angle, self.end_angle + angle, self.ccw)


def _angle_between(u, v) -> float:
    return math.atan2(u[0] * v[1] - u[1] * v[0], u[0] * v[0] + u[1] * v[1])


@dataclass(frozen=True, eq=False)
class PiecewiseCurve(ConvexCurve):
    """Closed counterclockwise chain of segments and circular arcs."""

    pieces: tuple
    pole: np.ndarray | None = None
    name: str = "piecewise"

    def __post_init__(self):
        pieces = tuple(self.pieces)
        object.__setattr__(self, "pieces", pieces)
        if self.pole is None:
            pole = np.mean([p.start for p in pieces], axis=0)
        else:
            pole = np.asarray(self.pole, dtype=float).reshape(2)
        object.__setattr__(self, "pole", pole)
        total = 0.0
        for i, piece in enumerate(pieces):
            nxt = pieces[(i + 1) % len(pieces)]
            gap = float(np.linalg.norm(piece.end - nxt.start))
            if gap > 1e-10:
                raise DomainError(f"{self.name}: pieces {i} and {i + 1} do not meet (gap {gap:.3g})")
            corner = _angle_between(piece.tangent_at_end(), nxt.tangent_at_start())
            if corner < -1e-12:
                raise NonConvexError(f"{self.name}: reflex corner after piece {i}")
            total += piece.turning() + corner
        if abs(total - TWO_PI) > 1e-9:
            raise NonConvexError(f"{self.name}: total turning {total:.12g} != 2*pi")
        object.__setattr__(self, "_sectors", self._build_sectors())

    @property
    def breaks(self) -> tuple:
        return tuple(float(s[0]) for s in self._sectors)

    def _build_sectors(self):
        rows = []
        for piece in self.pieces:
            d = piece.start - self.pole
            t0 = math.atan2(d[1], d[0])
            if isinstance(piece, LineSegment):
                n = np.array([piece.p1[1] - piece.p0[1], piece.p0[0] - piece.p1[0]])
                n /= np.linalg.norm(n)
                h = float(n @ (piece.p0 - self.pole))
                rows.append((t0, 0.0, n[0], n[1], h))
            else:
                c = piece.center - self.pole
                rows.append((t0, 1.0, c[0], c[1], piece.radius))
        rows = np.array(rows)
        base = rows[0, 0]
        rows[:, 0] = base + np.mod(rows[:, 0] - base, TWO_PI)
        return rows

    def _derivs_body(self, t):
        t = np.asarray(t, dtype=float)
        rows = self._sectors
        base = rows[0, 0]
        tt = base + np.mod(t - base, TWO_PI)
        idx = np.clip(np.searchsorted(rows[:, 0], tt, side="right") - 1, 0, len(rows) - 1)
        kind, x, y, z = rows[idx, 1], rows[idx, 2], rows[idx, 3], rows[idx, 4]
        c, s = np.cos(tt), np.sin(tt)
        # segment: r = h / (n.e)
        ne = x * c + y * s
        nep = -x * s + y * c
        with np.errstate(divide="ignore", invalid="ignore"):
            rl = z / ne
            tl = -nep / ne
            rl1 = rl * tl
            rl2 = rl * (2.0 * tl * tl + 1.0)
            # arc: far root of |r e - c| = R
            q, q1 = ne, nep
            disc = np.sqrt(np.maximum(q * q - (x * x + y * y) + z * z, 0.0))
            ra = q + disc
            ra1 = q1 + q * q1 / disc
            ra2 = -q + (q1 * q1 - q * q) / disc - (q * q1) ** 2 / disc ** 3
        arc = kind == 1.0
        return (np.where(arc, ra, rl), np.where(arc, ra1, rl1), np.where(arc, ra2, rl2))

    def kernel_spec(self) -> KernelSpec:
        params = np.concatenate([[len(self._sectors)], self._sectors.ravel()])
        return KernelSpec(KIND_SECTORS, params, float(self.pole[0]), float(self.pole[1]), 0.0,
                          1.05 * self.rmax + 1e-12)

    def transformed(self, angle: float, shift=(0.0, 0.0)) -> "PiecewiseCurve":
        shift = np.asarray(shift, dtype=float)
        return PiecewiseCurve(tuple(p.transformed(angle, shift) for p in self.pieces),
                              rotate(self.pole, angle) + shift, self.name)

    def line_intersections(self, line: Line):
        hits = []
        d, p = line.direction, line.point
        for piece in self.pieces:
            if isinstance(piece, LineSegment):
                e = piece.p1 - piece.p0
                den = d[0] * e[1] - d[1] * e[0]
                if abs(den) < 1e-15:
                    continue
                w = piece.p0 - p
                t = (w[0] * e[1] - w[1] * e[0]) / den
                u = (w[0] * d[1] - w[1] * d[0]) / den
                if -1e-12 <= u <= 1 + 1e-12:
                    hits.append(t)
            else:
                w = p - piece.center
                b = float(w @ d)
                disc = b * b - (float(w @ w) - piece.radius ** 2)
                if disc < 0:
                    continue
                sq = math.sqrt(disc)
                for t in {-b - sq, -b + sq}:
                    x = p + t * d - piece.center
                    if piece.contains_angle(math.atan2(x[1], x[0])):
                        hits.append(t)
        hits.sort()
        out = []
        for t in hits:
            if not out or t - out[-1] > 1e-9:
                out.append(t)
        if len(out) > 2:
            raise IntersectionError(f"{self.name}: line meets a convex curve {len(out)} times")
        pts = [p + t * d for t in out]
        return [(x, float(self.param_of(x))) for x in pts]


# operations


def check_convex(curve: ConvexCurve, n: int = CONVEXITY_GRID, tol: float = 1e-9) -> None:
    th = curve.orientation + np.linspace(0.0, TWO_PI, n, endpoint=False)
    kappa = curve.curvature(th)
    bad = th[~(kappa >= -tol)]
    if bad.size:
        shown = ", ".join(f"{t:.6f}" for t in bad[:8])
        raise NonConvexError(f"{curve.name}: curvature below {-tol:g} at theta = {shown}"
                             + (" ..." if bad.size > 8 else ""), bad)


def curvature_polar(curve: ConvexCurve, theta: float) -> float:
    """Signed curvature ``(r^2 - r r'' + 2 r'^2) / (r'^2 + r^2)^(3/2)`` at ``theta``."""
    r, r1, r2 = (float(np.asarray(v)) for v in curve.radius_derivs(theta))
    if not (math.isfinite(r) and math.isfinite(r1) and math.isfinite(r2)):
        raise EvaluationError(f"non-finite radius derivatives at theta={theta!r}")
    return (r * r - r * r2 + 2.0 * r1 * r1) / (r1 * r1 + r * r) ** 1.5


def _bisect(g, lo: float, hi: float, glo: float, tol: float = 1e-14) -> float:
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            break
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def line_curve_intersections(curve: ConvexCurve, line: Line, n_sweep: int = 720):
    """Intersections of ``line`` with a convex curve, ordered along the line.

    Returns a list of ``(point, theta)`` with 0, 1 (tangency) or 2 entries.
    Radial curves: a 720-point angular sweep of the signed distance brackets
    its extremes, which are refined; the roots are then bisected between them.
    """
    if isinstance(curve, PiecewiseCurve):
        return curve.line_intersections(line)

    def g(t):
        return float(line.signed_distance(curve.point(t)))

    th = curve.orientation + np.linspace(0.0, TWO_PI, n_sweep, endpoint=False)
    vals = line.signed_distance(curve.point(th))
    step = TWO_PI / n_sweep
    tol = 1e-10 * max(1.0, curve.rmax)

    def refine(k, sign):
        res = minimize_scalar(lambda t: sign * g(t), bounds=(th[k] - step, th[k] + step),
                              method="bounded", options={"xatol": 1e-13})
        t = float(res.x)
        return (t, g(t)) if sign * g(t) <= sign * vals[k] else (float(th[k]), float(vals[k]))

    tmin, gmin = refine(int(np.argmin(vals)), 1.0)
    tmax, gmax = refine(int(np.argmax(vals)), -1.0)
    if gmin > tol or gmax < -tol:
        return []
    if abs(gmin) <= tol or abs(gmax) <= tol:
        t = tmin if abs(gmin) <= abs(gmax) else tmax
        return [(curve.point(t), t)]
    # g < 0 at tmin, > 0 at tmax: one root on each arc between them
    t1 = tmin + ((tmax - tmin) % TWO_PI)
    t2 = t1 + ((tmin - tmax) % TWO_PI)
    roots = []
    for lo, hi in ((tmin, t1), (t1, t2)):
        glo = g(lo)
        if not glo * g(hi) <= 0:
            raise IntersectionError("degenerate intersection: bracketing failed")
        roots.append(_bisect(g, lo, hi, glo))
    out = [(curve.point(t), float(math.remainder(t, TWO_PI))) for t in roots]
    out.sort(key=lambda pt: float(line.direction @ (pt[0] - line.point)))
    return out


def integrate(f, t0: float, t1: float, breaks=(), panels_per_period: int = 2048,
              rtol: float = 1e-12) -> float:
    """Composite Simpson with a Richardson correction, split at ``breaks``.

    ``breaks`` are angles taken modulo 2*pi; ``f`` is vectorized.
    """
    if t1 < t0:
        return -integrate(f, t1, t0, breaks, panels_per_period, rtol)
    if t1 == t0:
        return 0.0
    cuts = [t0, t1]
    for b in np.asarray(breaks, dtype=float):
        first = t0 + ((b - t0) % TWO_PI)
        while first < t1:
            if first > t0:
                cuts.append(first)
            first += TWO_PI
    cuts = np.unique(cuts)
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        n = 4 * max(2, math.ceil(panels_per_period * (b - a) / TWO_PI / 4))
        prev = None
        for _ in range(6):
            x = np.linspace(a, b, n + 1)
            y = np.asarray(f(x), dtype=float)
            h = (b - a) / n
            s_n = h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())
            y2 = y[::2]
            s_h = 2 * h / 3 * (y2[0] + y2[-1] + 4 * y2[1:-1:2].sum() + 2 * y2[2:-1:2].sum())
            est = s_n + (s_n - s_h) / 15.0
            if prev is not None and abs(est - prev) <= rtol * max(abs(est), 1e-300):
                break
            if abs(s_n - s_h) <= rtol * max(abs(s_n), 1e-300):
                break
            prev = est
            n *= 2
        total += est
    return float(total)


def arc_length(curve: ConvexCurve, t0: float, t1: float) -> float:
    """Length of the boundary between pole angles ``t0`` and ``t1``."""
    return integrate(curve.speed, t0, t1, curve.world_breaks())


class TangentLine(NamedTuple):
    line: Line
    contact: np.ndarray
    length: float


def tangent_lines_from_point(circle: Circle, x) -> tuple[TangentLine, TangentLine]:
    """The two tangents from an exterior point ``x`` to ``circle``.

    The first keeps the circle on the left when walking from ``x`` to the
    contact point; the second keeps it on the right.
    """
    x = np.asarray(x, dtype=float)
    v = x - circle.center
    d2 = float(v @ v)
    r = circle.radius
    if not d2 > r * r:
        raise DomainError("point lies inside or on the circle")
    t = math.sqrt(d2 - r * r)
    base = math.atan2(v[1], v[0])
    off = math.atan2(t, r)
    out = []
    for phi in (base + off, base - off):
        c = circle.point(phi)
        out.append(TangentLine(Line.through(x, c), c, float(np.linalg.norm(c - x))))
    return out[0], out[1]


def points_of(curve: ConvexCurve, thetas: Sequence[float]) -> np.ndarray:
    return curve.point(np.asarray(thetas, dtype=float))
