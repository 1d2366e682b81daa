"""Constancy profiles, the chord-angle equations, and the constant-angle envelope."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError
from .fitting import CircleFit, EllipseFit, fit_circle, fit_ellipse
from .geometry2d import TWO_PI, Circle, ConvexCurve
from .tangent_dynamics import tangent_chords

FUNCTIONALS = ("product", "length", "reciprocal_sum", "subtended_angle")
ANALYTIC_TOL = 1e-6
SAMPLED_TOL = 1e-4
DEGENERATE_BAND = 1e-9


@dataclass(frozen=True, eq=False)
class PropertyProfile:
    """A functional sampled over a chord family.

    ``tolerance`` is absolute (relative tolerance times ``|lambda_hat|``), so
    the verdict is ``constant`` exactly when ``deviation < tolerance``.
    """

    functional: str
    grid: np.ndarray
    values: np.ndarray
    lambda_hat: float
    deviation: float
    tolerance: float
    verdict: str

    @property
    def relative_deviation(self) -> float:
        return self.deviation / abs(self.lambda_hat) if self.lambda_hat else math.inf

    @property
    def is_constant(self) -> bool:
        return self.verdict == "constant"


def default_tolerance(K: ConvexCurve) -> float:
    return SAMPLED_TOL if K.sampled else ANALYTIC_TOL


def _check_functional(functional: str) -> None:
    if functional not in FUNCTIONALS:
        raise ValueError(f"unknown functional {functional!r}; expected one of {FUNCTIONALS}")


def make_profile(functional: str, grid, values, rel_tol: float) -> PropertyProfile:
    values = np.asarray(values, dtype=float)
    lam = float(values.mean())
    dev = float(np.ptp(values))
    tol = rel_tol * abs(lam)
    return PropertyProfile(functional, np.asarray(grid, dtype=float), values, lam, dev, tol,
                           "constant" if dev < tol else "nonconstant")


def _values(functional, a, b, alpha):
    if functional == "product":
        return a * b
    if functional == "length":
        return a + b
    if functional == "reciprocal_sum":
        return 1.0 / a + 1.0 / b
    return alpha


def profile(K: ConvexCurve, circle: Circle, functional: str = "product", n_grid: int = 720,
            rel_tol: float | None = None) -> PropertyProfile:
    """Functional over the chords of ``K`` tangent to ``circle`` (uniform contact-angle grid)."""
    _check_functional(functional)
    if n_grid < 64:
        raise DomainError(f"n_grid must be at least 64, got {n_grid}")
    phi = np.linspace(0.0, TWO_PI, n_grid, endpoint=False)
    fam = tangent_chords(K, circle, phi)
    vals = _values(functional, fam.a, fam.b, fam.alpha)
    return make_profile(functional, phi, vals, default_tolerance(K) if rel_tol is None else rel_tol)


def point_profile(K: ConvexCurve, X, functional: str = "product", n_grid: int = 720,
                  rel_tol: float | None = None) -> PropertyProfile:
    """Functional over the chords through an interior point ``X``, by direction in ``[0, pi)``."""
    _check_functional(functional)
    if n_grid < 64:
        raise DomainError(f"n_grid must be at least 64, got {n_grid}")
    X = np.asarray(X, dtype=float)
    if not (K.contains(X) and K.distance_to(X) > 1e-12):
        raise DomainError(f"point {X.tolist()} is not strictly inside {K.name}")
    psi = np.linspace(0.0, math.pi, n_grid, endpoint=False)
    ux, uy = np.cos(psi), np.sin(psi)
    ox = np.full(2 * n_grid, X[0])
    oy = np.full(2 * n_grid, X[1])
    both = kernels.ray_exit(K, ox, oy, np.concatenate([ux, -ux]), np.concatenate([uy, -uy]))
    b, a = both[:n_grid], both[n_grid:]
    vals = _values(functional, a, b, np.full(n_grid, math.pi))
    return make_profile(functional, psi, vals, default_tolerance(K) if rel_tol is None else rel_tol)


# chord-angle equations

@dataclass(frozen=True)
class EquationSolution:
    """Solutions of an equation in the split ``alpha = theta + (alpha - theta)``.

    ``thetas`` holds ``(theta0, alpha - theta0)`` with ``theta0 <= alpha / 2``,
    ``(alpha / 2,)``, or is empty. For the degenerate product case ``interval``
    gives the admissible range; ``branches`` carries the roots of the exact
    equation when ``alpha`` is within the tie band of ``pi/2`` but not equal.
    """

    kind: str
    thetas: tuple = ()
    chord_length: float | None = None
    interval: tuple | None = None
    branches: tuple = ()


def _check_angle_value(alpha, lam):
    if not (0.0 < alpha < math.pi):
        raise DomainError(f"alpha must lie in (0, pi), got {alpha!r}")
    if not (lam > 0.0 and math.isfinite(lam)):
        raise DomainError(f"lambda must be positive, got {lam!r}")


def _admissible(alpha):
    """Sub-angles are both in (0, pi/2)."""
    return max(0.0, alpha - math.pi / 2), min(alpha, math.pi / 2)


def _root(g, lo, hi):
    """Bisection for a sign change of ``g`` on ``(lo, hi)`` down to adjacent floats."""
    with np.errstate(divide="ignore"):
        glo = g(lo)
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return mid
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid


def implied_chord_length(alpha: float, theta: float) -> float:
    """``tan(theta) + tan(alpha - theta)``: the chord length for a unit inner circle."""
    return math.tan(theta) + math.tan(alpha - theta)


def product_function(alpha, theta):
    return np.tan(theta) * np.tan(alpha - theta)


def reciprocal_function(alpha, theta):
    return 1.0 / np.tan(theta) + 1.0 / np.tan(alpha - theta)


def _solve_regular(alpha, lam, fn, lo, at_lo, decreasing_to_mid):
    """Monotone branch of a function symmetric about ``alpha/2`` on ``(lo, alpha/2]``.

    ``at_lo`` is the (limit) value at ``lo``; ``decreasing_to_mid`` says how the
    function runs from ``lo`` to ``alpha/2``.
    """
    h = alpha / 2
    fm = float(fn(alpha, h))
    if abs(lam - fm) <= 4 * np.spacing(max(abs(fm), 1.0)):
        return EquationSolution("unique_symmetric", (h,), implied_chord_length(alpha, h))
    inside = (fm < lam < at_lo) if decreasing_to_mid else (at_lo < lam < fm)
    if not inside:
        return EquationSolution("no_solution")
    t0 = _root(lambda t: float(fn(alpha, t)) - lam, lo, h)
    return EquationSolution("two_solutions", (t0, alpha - t0), implied_chord_length(alpha, t0))


def solve_product_equation(alpha: float, lam: float) -> EquationSolution:
    """Solve ``tan(theta) tan(alpha - theta) = lam`` with both sub-angles in ``(0, pi/2)``.

    For ``alpha < pi/2`` the left side rises from 0 to ``tan^2(alpha/2)`` on
    ``(0, alpha/2]``; for ``alpha > pi/2`` it falls from infinity to
    ``tan^2(alpha/2)`` on ``(alpha - pi/2, alpha/2]``. At ``alpha = pi/2`` it is
    identically 1.
    """
    alpha, lam = float(alpha), float(lam)
    _check_angle_value(alpha, lam)
    lo, _ = _admissible(alpha)
    if abs(alpha - math.pi / 2) <= DEGENERATE_BAND:
        branches = ()
        if alpha != math.pi / 2:
            exact = _solve_regular(alpha, lam, product_function, lo,
                                   0.0 if alpha < math.pi / 2 else math.inf, alpha > math.pi / 2)
            branches = exact.thetas
        if abs(lam - 1.0) <= 1e-9:
            return EquationSolution("degenerate_continuum", interval=(0.0, math.pi / 4),
                                    branches=branches)
        return EquationSolution("no_solution", branches=branches)
    if alpha < math.pi / 2:
        return _solve_regular(alpha, lam, product_function, 0.0, 0.0, False)
    return _solve_regular(alpha, lam, product_function, lo, math.inf, True)


def solve_reciprocal_equation(alpha: float, lam: float) -> EquationSolution:
    """Solve ``cot(theta) + cot(alpha - theta) = lam`` with both sub-angles in ``(0, pi/2)``.

    The left side falls to its minimum ``2 cot(alpha/2)`` at ``alpha/2``. Its
    supremum is infinite for ``alpha <= pi/2`` and ``cot(alpha - pi/2)`` otherwise.
    """
    alpha, lam = float(alpha), float(lam)
    _check_angle_value(alpha, lam)
    lo, _ = _admissible(alpha)
    sup = math.inf if alpha <= math.pi / 2 else 1.0 / math.tan(alpha - math.pi / 2)
    return _solve_regular(alpha, lam, reciprocal_function, lo, sup, True)


# symmetry and envelopes

def _require_interior(K, O):
    O = np.asarray(O, dtype=float)
    if not (K.contains(O) and K.distance_to(O) > 1e-12):
        raise DomainError(f"point {O.tolist()} is not strictly inside {K.name}")
    return O


def central_symmetry_defect(K: ConvexCurve, O, n_dirs: int = 2048) -> float:
    """``max |rho+(u) - rho-(u)|`` over ``n_dirs`` directions ``u`` in ``[0, pi)``."""
    O = _require_interior(K, O)
    u = np.linspace(0.0, math.pi, n_dirs, endpoint=False)
    ux, uy = np.cos(u), np.sin(u)
    o = np.full(2 * n_dirs, 1.0)
    d = kernels.ray_exit(K, O[0] * o, O[1] * o, np.concatenate([ux, -ux]),
                         np.concatenate([uy, -uy]))
    return float(np.max(np.abs(d[:n_dirs] - d[n_dirs:])))


@dataclass(frozen=True, eq=False)
class EnvelopeResult:
    psi: np.ndarray
    points: np.ndarray
    circle: CircleFit
    ellipse: EllipseFit | None

    @property
    def circle_residual(self) -> float:
        return self.circle.rms

    @property
    def ellipse_residual(self) -> float:
        return self.ellipse.rms if self.ellipse is not None else math.inf


def _chord_ends(K, O, psi, alpha):
    t = np.concatenate([psi, psi + alpha])
    o = np.ones_like(t)
    rho = kernels.ray_exit(K, O[0] * o, O[1] * o, np.cos(t), np.sin(t))
    pts = O + rho[:, None] * np.stack([np.cos(t), np.sin(t)], axis=-1)
    n = len(psi)
    return pts[:n], pts[n:]


def _intersect(A1, B1, A2, B2):
    d1, d2 = B1 - A1, B2 - A2
    w = A2 - A1
    den = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    s = (w[:, 0] * d2[:, 1] - w[:, 1] * d2[:, 0]) / den
    return A1 + s[:, None] * d1


def constant_angle_envelope(K: ConvexCurve, O, alpha: float, n_grid: int = 360,
                            h: float = 1e-4) -> EnvelopeResult:
    """Envelope of the chords ``AB`` of ``K`` seen from ``O`` under the angle ``alpha``.

    ``A`` runs over the boundary by its direction ``psi`` from ``O`` and ``B`` is
    the boundary point in direction ``psi + alpha``. Each envelope point is the
    limit intersection of the chords at ``psi - h`` and ``psi + h``, with one
    Richardson step. Circle and ellipse fits report the shape of the envelope.
    """
    if not (0.0 < alpha < math.pi):
        raise DomainError(f"alpha must lie in (0, pi), got {alpha!r}")
    O = _require_interior(K, O)
    psi = K.orientation + np.linspace(0.0, TWO_PI, n_grid, endpoint=False)

    def env(step):
        A1, B1 = _chord_ends(K, O, psi - step, alpha)
        A2, B2 = _chord_ends(K, O, psi + step, alpha)
        return _intersect(A1, B1, A2, B2)

    pts = (4.0 * env(h / 2) - env(h)) / 3.0
    circ = fit_circle(pts)
    try:
        ell = fit_ellipse(pts)
    except (ValueError, np.linalg.LinAlgError):
        ell = None
    return EnvelopeResult(psi, pts, circ, ell)
