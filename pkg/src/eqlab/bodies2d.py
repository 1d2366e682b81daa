"""Constructors for the concrete convex bodies and ingestion of sampled ones."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, NonConvexError
from .geometry2d import (
    KIND_CIRCLE,
    KIND_ELLIPSE,
    KIND_FOURIER,
    KIND_LIMACON,
    KIND_PARABOLA_BODY,
    KIND_PPOLY,
    TWO_PI,
    Circle,
    CircularArc,
    ConvexCurve,
    LineSegment,
    PiecewiseCurve,
    RadialCurve,
)

SAMPLED_CONVEXITY_TOL = 1e-6

BODY_KINDS = ("ellipse", "disc", "limacon", "yanagihara", "parabola_body", "radial_samples")


def make_disc(radius: float = 1.0, center=(0.0, 0.0)) -> RadialCurve:
    if not radius > 0:
        raise DomainError(f"disc radius must be positive, got {radius}")
    R = float(radius)
    return RadialCurve(
        r=lambda t: np.full(np.shape(t), R),
        r1=lambda t: np.zeros(np.shape(t)),
        r2=lambda t: np.zeros(np.shape(t)),
        pole=center,
        kernel=(KIND_CIRCLE, [R]),
        name=f"disc({R:g})",
    )


def ellipse_radius_derivs(a: float, b: float, t):
    """Polar radius of the centred ellipse and its first two derivatives."""
    t = np.asarray(t, dtype=float)
    c, s = np.cos(t), np.sin(t)
    D = (b * c) ** 2 + (a * s) ** 2
    D1 = (a * a - b * b) * np.sin(2 * t)
    D2 = 2 * (a * a - b * b) * np.cos(2 * t)
    ab = a * b
    r = ab / np.sqrt(D)
    r1 = -0.5 * ab * D ** -1.5 * D1
    r2 = 0.75 * ab * D ** -2.5 * D1 * D1 - 0.5 * ab * D ** -1.5 * D2
    return r, r1, r2


def make_ellipse(a: float, b: float) -> tuple[RadialCurve, Circle]:
    """Centred ellipse with semi-axes ``a >= b`` and its equipotential circle.

    The circle is inscribed in the rhombus with vertices (+-a, 0), (0, +-b);
    its radius is ``ab / sqrt(a^2 + b^2)`` and every tangent chord satisfies
    ``|AP| |PB| = radius^2``.
    """
    if not (a > 0 and b > 0):
        raise DomainError(f"ellipse semi-axes must be positive, got a={a}, b={b}")
    if a < b:
        raise DomainError(f"ellipse requires a >= b, got a={a}, b={b}")
    a, b = float(a), float(b)
    curve = RadialCurve(
        r=lambda t: ellipse_radius_derivs(a, b, t)[0],
        r1=lambda t: ellipse_radius_derivs(a, b, t)[1],
        r2=lambda t: ellipse_radius_derivs(a, b, t)[2],
        kernel=(KIND_ELLIPSE, [a, b]),
        name=f"ellipse({a:g},{b:g})",
    )
    return curve, Circle((0.0, 0.0), a * b / math.hypot(a, b))


def make_limacon(a: float, b: float) -> RadialCurve:
    """Limacon ``r = b + a cos(theta)`` with the pole as reference point."""
    if a < 0 or not b > 0:
        raise DomainError(f"limacon needs a >= 0 and b > 0, got a={a}, b={b}")
    if b < 2 * a:
        raise DomainError(f"nonconvex limacon: b={b} < 2a={2 * a}")
    a, b = float(a), float(b)
    return RadialCurve(
        r=lambda t: b + a * np.cos(t),
        r1=lambda t: -a * np.sin(t),
        r2=lambda t: -a * np.cos(t),
        kernel=(KIND_LIMACON, [a, b]),
        name=f"limacon({a:g},{b:g})",
    )


def make_yanagihara() -> PiecewiseCurve:
    """Yanagihara's curve: a unit regular hexagon ABCDEF with arcs BC, DE, FA
    replaced by the circumcircle arcs of OBC, ODE, OFA. Segment AB is on top."""
    v = [np.array([math.cos(math.pi / 3 * (k + 1)), math.sin(math.pi / 3 * (k + 1))])
         for k in range(6)]
    A, B, C, D, E, F = v
    O = np.zeros(2)
    pieces = []
    for p0, p1, q0, q1 in ((A, B, B, C), (C, D, D, E), (E, F, F, A)):
        pieces.append(LineSegment(p0, p1))
        m = (O + q0 + q1) / 3.0
        s = q0 - m
        e = q1 - m
        pieces.append(CircularArc(m, 1.0 / math.sqrt(3.0), math.atan2(s[1], s[0]),
                                  math.atan2(e[1], e[0])))
    return PiecewiseCurve(tuple(pieces), pole=O, name="yanagihara")


# the parabola-derived body
#
# Gamma: y = x^2/2 - 3/2, polar r(t) = 3 / (sqrt(1 + 2 cos^2 t) - sin t), the
# positive root of r^2 cos^2 t - 2 r sin t - 3 = 0 written without the 0/0
# at t = -pi/2. gamma': r1(t) = r / sqrt(r^2 - 1) = 1 / sqrt(1 - u^2), u = 1/r.


def _recip_parabola(t):
    """``u = 1/r`` for Gamma together with ``u'`` and ``u''``."""
    t = np.asarray(t, dtype=float)
    s, c = np.sin(t), np.cos(t)
    q = np.sqrt(1.0 + 2.0 * c * c)
    s2, c2 = np.sin(2 * t), np.cos(2 * t)
    q1 = -s2 / q
    q2 = -2.0 * c2 / q - s2 * s2 / q ** 3
    return (q - s) / 3.0, (q1 - c) / 3.0, (q2 + s) / 3.0


def parabola_radius_derivs(t):
    """Polar radius of Gamma about O with its first two derivatives."""
    u, u1, u2 = _recip_parabola(t)
    return 1.0 / u, -u1 / u ** 2, -u2 / u ** 2 + 2.0 * u1 * u1 / u ** 3


def parabola_radius_closed_form(t):
    """``(sin t + sqrt(1 + 2 cos^2 t)) / cos^2 t``; singular at cos t = 0."""
    t = np.asarray(t, dtype=float)
    return (np.sin(t) + np.sqrt(1.0 + 2.0 * np.cos(t) ** 2)) / np.cos(t) ** 2


def induced_radius_derivs(t):
    """Polar radius of gamma' (``|OB'| = |OA| / |AP|``) with derivatives."""
    u, u1, u2 = _recip_parabola(t)
    w = 1.0 - u * u
    w1 = -2.0 * u * u1
    w2 = -2.0 * (u1 * u1 + u * u2)
    return w ** -0.5, -0.5 * w ** -1.5 * w1, 0.75 * w ** -2.5 * w1 * w1 - 0.5 * w ** -1.5 * w2


PARABOLA_JUNCTIONS = (-math.pi / 4, math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4)


def parabola_body_derivs(t):
    """Radial function of the parabola body about O.

    Sectors (start angles -pi/4, pi/4, 3pi/4, 5pi/4): gamma, -Gamma, -gamma,
    Gamma, where gamma is gamma' rotated by +pi/2 and the minus sign is the
    reflection through O.
    """
    t = np.asarray(t, dtype=float)
    q = np.mod(t + math.pi / 4, TWO_PI)
    sector = np.minimum((q // (math.pi / 2)).astype(int), 3)
    tt = q - math.pi / 4
    shift = np.choose(sector, [-math.pi / 2, math.pi, math.pi / 2, 0.0])
    arg = tt + shift
    induced = (sector % 2) == 0
    g = parabola_radius_derivs(arg)
    h = induced_radius_derivs(arg)
    return tuple(np.where(induced, hv, gv) for gv, hv in zip(g, h))


def make_parabola_body() -> tuple[RadialCurve, Circle]:
    """Centrally symmetric body with the unit circle as equipotential circle
    (``lambda = 1``), built from the arc CD of Gamma, C=(-1,-1), D=(1,-1),
    the induced arc, and their reflections through O."""
    curve = RadialCurve(
        r=lambda t: parabola_body_derivs(t)[0],
        r1=lambda t: parabola_body_derivs(t)[1],
        r2=lambda t: parabola_body_derivs(t)[2],
        breaks=PARABOLA_JUNCTIONS,
        kernel=(KIND_PARABOLA_BODY, []),
        name="parabola_body",
    )
    return curve, Circle((0.0, 0.0), 1.0)


# sampled bodies


def _trig_coefficients(r: np.ndarray):
    n = len(r)
    X = np.fft.rfft(r)
    a = 2.0 * X.real / n
    b = -2.0 * X.imag / n
    a[0] /= 2.0
    if n % 2 == 0:
        a[-1] /= 2.0
        b[-1] = 0.0
    return a, b[1:]


def _trig_eval(a: np.ndarray, b: np.ndarray, t, order: int = 0):
    t = np.asarray(t, dtype=float)
    k = np.arange(len(a), dtype=float)
    kt = np.multiply.outer(t, k)
    bb = np.concatenate([[0.0], b])
    c, s = np.cos(kt), np.sin(kt)
    if order == 0:
        return c @ a + s @ bb
    if order == 1:
        return (-s * k) @ a + (c * k) @ bb
    return (-c * k * k) @ a + (-s * k * k) @ bb


def load_radial_samples(samples) -> RadialCurve:
    """Periodic interpolant through ``(theta, r)`` samples.

    Uniform grids use trigonometric interpolation, others a periodic cubic
    spline. Rejects data whose interpolant has curvature below -1e-6.
    """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise DomainError("samples must be a list of (theta, r) pairs")
    if len(data) < 16:
        raise DomainError(f"need at least 16 samples, got {len(data)}")
    th, r = data[:, 0], data[:, 1]
    steps = np.diff(th)
    if np.any(steps <= 0):
        raise DomainError("sample angles must be strictly increasing")
    if th[-1] - th[0] >= TWO_PI:
        raise DomainError("sample angles must lie within one period")
    if np.any(r <= 0):
        raise DomainError("sample radii must be positive")
    n = len(th)
    uniform = np.allclose(steps, TWO_PI / n, rtol=0, atol=1e-9)
    if uniform:
        a, b = _trig_coefficients(r)
        params = np.concatenate([[len(a) - 1], a, b])
        kw = dict(
            r=lambda t: _trig_eval(a, b, t),
            r1=lambda t: _trig_eval(a, b, t, 1),
            r2=lambda t: _trig_eval(a, b, t, 2),
            orientation=float(th[0]),
            kernel=(KIND_FOURIER, params),
        )
    else:
        x = np.concatenate([th, [th[0] + TWO_PI]])
        y = np.concatenate([r, [r[0]]])
        spl = CubicSpline(x, y, bc_type="periodic")
        d1, d2 = spl.derivative(1), spl.derivative(2)
        x0 = float(x[0])

        def wrap(f):
            return lambda t: f(x0 + np.mod(np.asarray(t, dtype=float) - x0, TWO_PI))

        params = np.concatenate([[n], x, spl.c.ravel()])
        kw = dict(r=wrap(spl), r1=wrap(d1), r2=wrap(d2), breaks=tuple(th),
                  kernel=(KIND_PPOLY, params))
    try:
        return RadialCurve(sampled=True, convexity_tol=SAMPLED_CONVEXITY_TOL,
                           name="radial_samples", **kw)
    except NonConvexError as exc:
        raise NonConvexError(f"nonconvex sample data: {exc}", exc.thetas) from None


# body specs


@dataclass(frozen=True)
class BodySpec:
    kind: str
    params: dict = field(default_factory=dict)
    samples: list | None = None

    def __post_init__(self):
        if self.kind not in BODY_KINDS:
            raise DomainError(f"unknown body kind {self.kind!r}; expected one of {BODY_KINDS}")

    @classmethod
    def from_dict(cls, d: dict) -> "BodySpec":
        return cls(d["kind"], dict(d.get("params") or {}), d.get("samples"))

    @classmethod
    def load(cls, path) -> "BodySpec":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind, "params": dict(self.params)}
        if self.samples is not None:
            out["samples"] = [list(map(float, s)) for s in self.samples]
        return out


@dataclass(frozen=True, eq=False)
class Body:
    """A constructed body with its distinguished circle and point, if any."""

    spec: BodySpec
    curve: ConvexCurve
    circle: Circle | None = None
    point: np.ndarray | None = None


def build_body(spec: BodySpec) -> Body:
    p = spec.params
    if spec.kind == "ellipse":
        curve, circle = make_ellipse(float(p["a"]), float(p["b"]))
        return Body(spec, curve, circle, np.zeros(2))
    if spec.kind == "disc":
        center = np.asarray(p.get("center", (0.0, 0.0)), dtype=float)
        R = float(p.get("radius", 1.0))
        return Body(spec, make_disc(R, center), None, center)
    if spec.kind == "limacon":
        return Body(spec, make_limacon(float(p["a"]), float(p["b"])), None, np.zeros(2))
    if spec.kind == "yanagihara":
        return Body(spec, make_yanagihara(), None, np.zeros(2))
    if spec.kind == "parabola_body":
        curve, circle = make_parabola_body()
        return Body(spec, curve, circle, np.zeros(2))
    if not spec.samples:
        raise DomainError("radial_samples body needs 'samples'")
    curve = load_radial_samples(spec.samples)
    return Body(spec, curve, None, curve.pole)


_ALIASES = {"parabola": "parabola_body", "samples": "radial_samples", "circle": "disc"}
_POSITIONAL = {"ellipse": ("a", "b"), "disc": ("radius",), "limacon": ("a", "b")}


def parse_body(text: str) -> Body:
    """Build a body from ``kind[:p1,p2,...]`` or a path to a BodySpec JSON file."""
    if text.endswith(".json") or Path(text).is_file():
        return build_body(BodySpec.load(text))
    kind, _, rest = text.partition(":")
    kind = _ALIASES.get(kind.strip(), kind.strip())
    values = [float(v) for v in rest.split(",") if v.strip()] if rest else []
    names = _POSITIONAL.get(kind, ())
    if len(values) > len(names):
        raise DomainError(f"too many parameters for {kind!r}: {rest}")
    return build_body(BodySpec(kind, dict(zip(names, values))))
