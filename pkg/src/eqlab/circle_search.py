"""Derivative-free search for a circle with a constant chord functional.

The objective of a circle ``(cx, cy, r)`` is the relative peak-to-peak spread
of the chosen functional over its tangent chords. The contact-angle grid is
anchored at the body orientation, so the objective is unchanged when body and
circle are moved rigidly together. Infeasible circles get ``1 + 1e6 * violation``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError
from .geometry2d import TWO_PI, Circle, ConvexCurve
from .property_lab import FUNCTIONALS
from .tangent_dynamics import interior_margin, tangent_chords

PENALTY = 1e6
POLISH = 3


@dataclass(frozen=True)
class SearchConfig:
    functional: str = "product"
    n_grid: int = 128
    multistarts: int = 16
    max_iterations: int = 400
    tolerance: float = 1e-6
    seed: int = 42
    margin_fraction: float = 1e-6
    min_radius_fraction: float = 0.02
    restarts: int = 3

    def __post_init__(self):
        if self.functional not in FUNCTIONALS:
            raise ValueError(f"unknown functional {self.functional!r}")
        if self.multistarts < 1:
            raise ValueError("multistarts must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.n_grid < 16:
            raise ValueError("n_grid must be at least 16")


@dataclass(frozen=True, eq=False)
class CircleCandidate:
    center: np.ndarray
    radius: float
    objective: float
    feasibility_margin: float

    @property
    def circle(self) -> Circle:
        return Circle(self.center, self.radius)

    def key(self):
        return (self.objective, float(self.center[0]), float(self.center[1]), self.radius)


@dataclass(frozen=True, eq=False)
class SearchResult:
    candidate: CircleCandidate
    verdict: str  # "found" or "none_below_tolerance"
    starts: list = field(default_factory=list)
    evaluations: int = 0


class Objective:
    """Profile spread of a circle inside ``K``; callable on ``(cx, cy, r)``."""

    def __init__(self, K: ConvexCurve, functional: str = "product", n_grid: int = 128,
                 margin_fraction: float = 1e-6, min_radius_fraction: float = 0.02):
        self.K = K
        self.functional = functional
        self.phi = K.orientation + np.linspace(0.0, TWO_PI, n_grid, endpoint=False)
        self.min_margin = margin_fraction * K.diameter
        self.min_radius = min_radius_fraction * K.diameter
        self._pts = K.sample[1]
        self.calls = 0

    def margin(self, center, r) -> float:
        """Sampled boundary distance minus ``r`` (negative when the center is outside)."""
        c = np.asarray(center, dtype=float)
        d = float(np.min(np.hypot(self._pts[:, 0] - c[0], self._pts[:, 1] - c[1])))
        if not self.K.contains(c):
            d = -d
        return d - r

    def violation(self, x) -> float:
        cx, cy, r = x
        v = max(0.0, self.min_radius - r)
        return v + max(0.0, self.min_margin - self.margin((cx, cy), r))

    def spread(self, x) -> float:
        cx, cy, r = x
        fam = tangent_chords(self.K, Circle(np.array([cx, cy]), r), self.phi, validate=False)
        if self.functional == "product":
            v = fam.product
        elif self.functional == "length":
            v = fam.length
        elif self.functional == "reciprocal_sum":
            v = fam.reciprocal_sum
        else:
            v = fam.alpha
        return float(np.ptp(v) / abs(np.mean(v)))

    def __call__(self, x) -> float:
        self.calls += 1
        x = np.asarray(x, dtype=float)
        viol = self.violation(x)
        if viol > 0:
            return 1.0 + PENALTY * viol
        return self.spread(x)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("EQLAB_THREADS", "1")))
    except ValueError:
        return 1


def _start_points(K: ConvexCurve, obj: Objective, n: int, rng: np.random.Generator):
    """Best ``n`` points of a coarse feasible grid, ties broken by a seeded shuffle."""
    lo, hi = K.bounding_box()
    g = np.linspace(0.0, 1.0, 11)[1:-1]
    cand = []
    for fx in g:
        for fy in g:
            c = lo + (hi - lo) * np.array([fx, fy])
            m = obj.margin(c, 0.0)
            if m <= obj.min_radius + obj.min_margin:
                continue
            for fr in (0.3, 0.6, 0.9):
                r = max(obj.min_radius, fr * m)
                cand.append((c[0], c[1], r))
    if not cand:
        raise DomainError(f"no feasible circle of radius >= {obj.min_radius:.3g} inside {K.name}")
    cand = np.array(cand)
    cand = cand[rng.permutation(len(cand))]
    vals = np.array([obj(x) for x in cand])
    order = np.argsort(vals, kind="stable")
    return cand[order[:n]]


def _local(obj: Objective, x0, scale: float, cfg: SearchConfig, restarts: int):
    x = np.asarray(x0, dtype=float)
    f = obj(x)
    for _ in range(restarts + 1):
        simplex = np.vstack([x, x + scale * np.eye(3)])
        res = minimize(obj, x, method="Nelder-Mead",
                       options={"initial_simplex": simplex, "maxiter": cfg.max_iterations,
                                "xatol": 1e-12 * obj.K.diameter, "fatol": 1e-15})
        if res.fun >= f and np.allclose(res.x, x, rtol=0, atol=1e-12 * obj.K.diameter):
            break
        if res.fun <= f:
            x, f = res.x, float(res.fun)
        scale = max(scale * 0.1, 1e-7 * obj.K.diameter)
    return x, f


def _candidate(K, obj, x, f) -> CircleCandidate:
    center = np.array(x[:2], dtype=float)
    return CircleCandidate(center, float(x[2]), float(f), float(interior_margin(K, Circle(center, x[2]))))


def find_circle(K: ConvexCurve, config: SearchConfig | None = None) -> SearchResult:
    """Nelder-Mead multistart search for a circle with constant functional."""
    cfg = config or SearchConfig()
    obj = Objective(K, cfg.functional, cfg.n_grid, cfg.margin_fraction, cfg.min_radius_fraction)
    rng = np.random.default_rng(cfg.seed)
    starts = _start_points(K, obj, cfg.multistarts, rng)
    scale = 0.05 * K.diameter

    def run(x0, restarts):
        local = Objective(K, cfg.functional, cfg.n_grid, cfg.margin_fraction, cfg.min_radius_fraction)
        x, f = _local(local, x0, scale, cfg, restarts)
        return x, f, local.calls

    # every start gets one simplex run; the best few are then restarted to convergence
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        results = list(pool.map(lambda x0: run(x0, 0), starts))
        order = sorted(range(len(results)), key=lambda i: (results[i][1], tuple(results[i][0])))
        polished = list(pool.map(lambda i: run(results[i][0], cfg.restarts), order[:POLISH]))
    results = results + polished
    cands = []
    for x, f, _ in results:
        if obj.violation(x) > 0:
            continue
        cands.append(_candidate(K, obj, x, f))
    cands = [c for c in cands if c.feasibility_margin > 0]
    if not cands:
        raise DomainError(f"search found no feasible circle inside {K.name}")
    cands.sort(key=CircleCandidate.key)
    best = cands[0]
    verdict = "found" if best.objective < cfg.tolerance else "none_below_tolerance"
    calls = obj.calls + sum(r[2] for r in results)
    return SearchResult(best, verdict, cands, calls)


@dataclass(frozen=True, eq=False)
class UniquenessReport:
    second_best: float
    location: np.ndarray  # (cx, cy, r)
    scanned: int
    disc_like: bool


def certify_uniqueness_grid(K: ConvexCurve, found: CircleCandidate, grid_step: float = 0.1,
                            exclusion: float = 0.05, functional: str = "product",
                            n_grid: int = 64, tolerance: float = 1e-6,
                            polish: bool = True) -> UniquenessReport:
    """Best objective over a ``(center, radius)`` grid outside a ball around ``found``.

    The grid minimum is polished by Nelder-Mead with the exclusion ball as an
    extra penalty. ``disc_like`` flags a second near-zero basin.
    """
    obj = Objective(K, functional, n_grid)
    ref = np.array([found.center[0], found.center[1], found.radius])
    lo, hi = K.bounding_box()
    # lattice anchored at the found circle so that its concentric rivals are sampled
    xs = ref[0] + grid_step * np.arange(math.floor((lo[0] - ref[0]) / grid_step),
                                        math.ceil((hi[0] - ref[0]) / grid_step) + 1)
    ys = ref[1] + grid_step * np.arange(math.floor((lo[1] - ref[1]) / grid_step),
                                        math.ceil((hi[1] - ref[1]) / grid_step) + 1)
    best, where, scanned = math.inf, None, 0
    for cx in xs:
        for cy in ys:
            m = obj.margin((cx, cy), 0.0)
            if m <= obj.min_radius:
                continue
            k0 = math.ceil((obj.min_radius - ref[2]) / grid_step)
            for r in ref[2] + grid_step * np.arange(k0, math.ceil((m - ref[2]) / grid_step)):
                x = np.array([cx, cy, r])
                if np.linalg.norm(x - ref) < exclusion or obj.violation(x) > 0:
                    continue
                scanned += 1
                f = obj(x)
                if f < best:
                    best, where = f, x
    if where is None:
        raise DomainError("no grid point outside the exclusion neighborhood")

    def excluded(x):
        d = np.linalg.norm(np.asarray(x) - ref)
        return obj(x) + (PENALTY * (exclusion - d) if d < exclusion else 0.0)

    if polish:
        res = minimize(excluded, where, method="Nelder-Mead",
                       options={"initial_simplex": np.vstack([where, where + grid_step / 2 * np.eye(3)]),
                                "maxiter": 400, "xatol": 1e-10, "fatol": 1e-14})
        if res.fun < best:
            best, where = float(res.fun), res.x
    return UniquenessReport(float(best), np.asarray(where), scanned, best < tolerance)
