"""Command-line front end: ``eqlab profile|orbit|search|space3d``.

Exit codes: 0 success, 1 verdict nonconstant / none found / check failed,
2 invalid input. Numbers go out with 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .bodies2d import Body, parse_body
from .circle_search import SearchConfig, certify_uniqueness_grid, find_circle
from .errors import DomainError, IntersectionError
from .geometry2d import TWO_PI, Circle
from .property_lab import FUNCTIONALS, point_profile, profile
from .space3d import (Ellipsoid, Sphere, TwoCycle, midpoint_locus, sphere_property_check,
                      tangent_cone_projection, two_cycle_plane_through_line)
from .svg import Canvas
from .tangent_dynamics import orbit, rotation_number, tangent_chords

CSV_HEADER = "phi,a,b,product,length,reciprocal_sum,alpha"


def fmt(x) -> str:
    return "%.17g" % x


def _floats(text: str, n: int | None = None, what: str = "value") -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise DomainError(f"cannot parse {what} {text!r}") from None
    if n is not None and len(vals) != n:
        raise DomainError(f"{what} needs {n} comma-separated numbers, got {text!r}")
    return vals


def _resolve_circle(args, body: Body) -> Circle:
    if args.circle:
        cx, cy, r = _floats(args.circle, 3, "--circle")
        return Circle(np.array([cx, cy]), r)
    if body.circle is None:
        raise DomainError(f"{body.curve.name} has no distinguished circle; pass --circle cx,cy,r")
    return body.circle


def _resolve_point(text: str, body: Body) -> np.ndarray:
    if text == "pole":
        return np.asarray(body.curve.pole, dtype=float)
    if text == "center":
        if body.point is None:
            raise DomainError(f"{body.curve.name} has no distinguished point")
        return np.asarray(body.point, dtype=float)
    return np.array(_floats(text, 2, "--point"))


def _write(path, text: str) -> None:
    if path:
        Path(path).write_text(text)


def _body_canvas(body: Body) -> Canvas:
    lo, hi = body.curve.bounding_box()
    cv = Canvas(lo, hi)
    th = body.curve.orientation + np.linspace(0.0, TWO_PI, 720, endpoint=False)
    cv.polyline(body.curve.point(th), closed=True)
    return cv


def _profile_csv(phi, a, b, alpha) -> str:
    rows = [CSV_HEADER]
    for p, ai, bi, al in zip(phi, a, b, alpha):
        rows.append(",".join(fmt(v) for v in (p, ai, bi, ai * bi, ai + bi, 1 / ai + 1 / bi, al)))
    return "\n".join(rows) + "\n"


def cmd_profile(args) -> int:
    body = parse_body(args.body)
    K = body.curve
    if args.point is not None:
        X = _resolve_point(args.point, body)
        prof = point_profile(K, X, args.functional, args.n_grid, args.tol)
        psi = prof.grid
        u = np.stack([np.cos(psi), np.sin(psi)], axis=-1)
        o = np.ones(2 * len(psi))
        both = kernels.ray_exit(K, X[0] * o, X[1] * o, np.concatenate([u[:, 0], -u[:, 0]]),
                                np.concatenate([u[:, 1], -u[:, 1]]))
        b_, a_ = both[:len(psi)], both[len(psi):]
        csv = _profile_csv(psi, a_, b_, np.full(len(psi), math.pi))
        cv = _body_canvas(body)
        cv.dot(X)
        for k in range(0, len(psi), max(1, len(psi) // 24)):
            cv.line(X - a_[k] * u[k], X + b_[k] * u[k])
        where = f"point {fmt(X[0])},{fmt(X[1])}"
    else:
        circle = _resolve_circle(args, body)
        prof = profile(K, circle, args.functional, args.n_grid, args.tol)
        fam = tangent_chords(K, circle, prof.grid)
        csv = _profile_csv(fam.phi, fam.a, fam.b, fam.alpha)
        cv = _body_canvas(body)
        cv.circle(circle.center, circle.radius)
        for k in range(0, len(fam.phi), max(1, len(fam.phi) // 24)):
            cv.line(fam.A[k], fam.B[k])
        where = (f"circle {fmt(circle.center[0])},{fmt(circle.center[1])},{fmt(circle.radius)}")
    _write(args.csv, csv)
    _write(args.svg, cv.render(f"{args.functional} profile of {K.name}"))
    print(f"body: {K.name}")
    print(f"chords: {where}")
    print(f"functional: {prof.functional}")
    print(f"lambda_hat: {fmt(prof.lambda_hat)}")
    print(f"deviation: {fmt(prof.deviation)}")
    print(f"verdict: {prof.verdict}")
    return 0 if prof.is_constant else 1


def cmd_orbit(args) -> int:
    body = parse_body(args.body)
    K = body.curve
    circle = _resolve_circle(args, body)
    rec = orbit(K, circle, args.theta0, args.n_iter, args.period_tol)
    rho_orbit = rotation_number(K, circle, args.theta0, "orbit", max(args.n_iter, 200))
    rho_measure = rotation_number(K, circle, args.theta0, "measure")
    rows = ["k,theta,x,y"]
    for k, (t, p) in enumerate(zip(rec.params, rec.points)):
        rows.append(f"{k},{fmt(t)},{fmt(p[0])},{fmt(p[1])}")
    _write(args.csv, "\n".join(rows) + "\n")
    cv = _body_canvas(body)
    cv.circle(circle.center, circle.radius)
    n_draw = rec.period if rec.period else len(rec.points) - 1
    cv.polyline(rec.points[: n_draw + 1], stroke="red", width=1.0)
    _write(args.svg, cv.render(f"tangent-chord orbit in {K.name}"))
    print(f"body: {K.name}")
    print(f"rotation_number_orbit: {fmt(rho_orbit)}")
    print(f"rotation_number_measure: {fmt(rho_measure)}")
    if rec.period:
        print(f"period: {rec.period}")
    else:
        print(f"period: no period <= {args.n_iter}")
    print(f"closure_error: {fmt(rec.closure_error)}")
    return 0


def _json_dump(obj, path) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    _write(path, text)
    sys.stdout.write(text)


def cmd_search(args) -> int:
    body = parse_body(args.body)
    K = body.curve
    cfg = SearchConfig(functional=args.functional, n_grid=args.n_grid, multistarts=args.multistarts,
                       max_iterations=args.max_iterations, tolerance=args.tol, seed=args.seed)
    res = find_circle(K, cfg)
    c = res.candidate
    report = {
        "body": K.name,
        "functional": args.functional,
        "center": [float(c.center[0]), float(c.center[1])],
        "radius": c.radius,
        "objective": c.objective,
        "feasibility_margin": c.feasibility_margin,
        "verdict": res.verdict,
        "second_best": None,
        "second_best_location": None,
        "disc_like": None,
    }
    if res.verdict == "found" and not args.no_certify:
        rep = certify_uniqueness_grid(K, c, args.grid_step, functional=args.functional,
                                      tolerance=args.tol)
        report["second_best"] = rep.second_best
        report["second_best_location"] = [float(v) for v in rep.location]
        report["disc_like"] = rep.disc_like
    _json_dump(report, args.json)
    return 0 if res.verdict == "found" else 1


def _ellipsoid(args) -> Ellipsoid:
    axes = _floats(args.axes, 3, "--axes")
    center = _floats(args.center, 3, "--center")
    return Ellipsoid.from_axes(axes, center)


def _delta(text: str):
    kind, _, rest = text.partition(":")
    if kind == "zero":
        return lambda y: 0.0
    if kind == "linear":
        w = np.array(_floats(rest, 3, "linear delta"))
        return lambda y: float(np.asarray(y) @ w)
    if kind == "azimuth":
        amp = float(rest) if rest else 0.05
        return lambda y: amp * math.sin(math.atan2(y[1], y[0]))
    raise DomainError(f"unknown delta {text!r}; expected zero, linear:wx,wy,wz or azimuth:amp")


def cmd_space3d(args) -> int:
    ok = True
    if args.check == "two-cycle":
        pts = _floats(args.line, 6, "--line")
        res = two_cycle_plane_through_line(TwoCycle(_delta(args.delta)), pts[:3], pts[3:])
        ok = res.containment_defect < 1e-10
        report = {"check": "two-cycle", "x0": res.x0.tolist(), "sigma": res.sigma,
                  "containment_defect": res.containment_defect}
    else:
        E = _ellipsoid(args)
        if args.check == "midpoint":
            P = _floats(args.point, 3, "--point")
            fit = midpoint_locus(E, P, args.n)
            report = {"check": "midpoint", "degenerate": fit.degenerate,
                      "center": fit.fit.center.tolist() if fit.fit else list(map(float, E.center)),
                      "ratio": fit.ratio, "expected_ratio": fit.expected_ratio,
                      "rms_residual": fit.rms_residual, "shape_defect": fit.shape_defect,
                      "center_defect": fit.center_defect}
        elif args.check == "cone":
            P = _floats(args.point, 3, "--point")
            s = _floats(args.sphere, 4, "--sphere")
            res = tangent_cone_projection(E, Sphere(s[:3], s[3]), P)
            ok = res.defect < args.tol
            report = {"check": "cone", "gamma_center": res.gamma_center.tolist(),
                      "gamma_radius": res.gamma_radius, "defect": res.defect}
        else:
            s = _floats(args.sphere, 4, "--sphere")
            res = sphere_property_check(E, Sphere(s[:3], s[3]), args.mode,
                                        not args.per_point, tol=args.tol)
            ok = res.passed
            report = {"check": "sphere", "mode": res.mode, "verdict": res.verdict,
                      "lambda_mean": float(res.lambdas.mean()), "spread": res.spread,
                      "max_deviation": float(res.deviations.max())}
    _json_dump(report, args.json)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eqlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def body_args(p):
        p.add_argument("--body", required=True,
                       help="kind[:params] (ellipse:2,1, disc:1, limacon:1,3, yanagihara, parabola) "
                            "or a BodySpec JSON file")
        p.add_argument("--circle", help="inner circle cx,cy,r (default: the body's own circle)")
        p.add_argument("--auto-circle", action="store_true",
                       help="use the body's distinguished circle (the default when it has one)")

    p = sub.add_parser("profile", help="functional over tangent chords or chords through a point")
    body_args(p)
    p.add_argument("--point", help="x,y, 'pole' or 'center': profile chords through this point")
    p.add_argument("--functional", default="product", choices=FUNCTIONALS)
    p.add_argument("--n-grid", type=int, default=720)
    p.add_argument("--tol", type=float, default=None, help="relative constancy tolerance")
    p.add_argument("--csv")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("orbit", help="iterate the tangent-chord map")
    body_args(p)
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument("--n-iter", type=int, default=200, help="iterates; also the largest period looked for")
    p.add_argument("--period-tol", type=float, default=1e-9)
    p.add_argument("--csv")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("search", help="search for a circle with constant functional")
    p.add_argument("--body", required=True)
    p.add_argument("--functional", default="product", choices=FUNCTIONALS)
    p.add_argument("--n-grid", type=int, default=128)
    p.add_argument("--multistarts", type=int, default=16)
    p.add_argument("--max-iterations", type=int, default=400)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--grid-step", type=float, default=0.1)
    p.add_argument("--no-certify", action="store_true")
    p.add_argument("--json")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("space3d", help="ball and ellipsoid verifiers")
    p.add_argument("check", choices=("midpoint", "cone", "sphere", "two-cycle"))
    p.add_argument("--axes", default="1,1,1", help="semi-axes a,b,c")
    p.add_argument("--center", default="0,0,0")
    p.add_argument("--point", default="0.3,0,0")
    p.add_argument("--sphere", default="0,0,0,0.5", help="cx,cy,cz,r")
    p.add_argument("--mode", default="equipotential", choices=("equipotential", "equireciprocal"))
    p.add_argument("--per-point", action="store_true", help="do not require a global constant")
    p.add_argument("--delta", default="zero")
    p.add_argument("--line", default="-1,0,0,1,0,0", help="x0,y0,z0,x1,y1,z1")
    p.add_argument("--n", type=int, default=2048)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--json")
    p.set_defaults(func=cmd_space3d)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, IntersectionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
