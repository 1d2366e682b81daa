import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqlab.bodies2d import load_radial_samples, make_disc, make_ellipse, make_limacon
from eqlab.errors import DomainError
from eqlab.geometry2d import Circle
from eqlab.property_lab import (DEGENERATE_BAND, central_symmetry_defect, constant_angle_envelope,
                                implied_chord_length, point_profile, product_function, profile,
                                reciprocal_function, solve_product_equation,
                                solve_reciprocal_equation)


# profiles

def test_ellipse_product_profile(ellipse_body):
    p = profile(*ellipse_body, "product")
    assert p.lambda_hat == pytest.approx(0.8, abs=1e-12)
    assert p.deviation < 1e-9
    assert p.verdict == "constant"
    assert len(p.values) == len(p.grid) == 720


def test_parabola_product_profile(parabola_body):
    p = profile(*parabola_body, "product")
    assert p.lambda_hat == pytest.approx(1.0, abs=1e-9)
    assert p.deviation < 1e-6
    assert p.is_constant


def test_ellipse_length_profile_not_constant(ellipse_body):
    p = profile(*ellipse_body, "length")
    assert p.verdict == "nonconstant"
    # lengths at the rhombus chord (sqrt 5) and the chord through (0, +-r) differ
    assert p.deviation > 0.1


def test_ellipse_subtended_angle_is_right(ellipse_body):
    p = profile(*ellipse_body, "subtended_angle")
    assert p.lambda_hat == pytest.approx(math.pi / 2, abs=1e-12)
    assert p.is_constant


def test_profile_grid_too_small(ellipse_body):
    with pytest.raises(DomainError):
        profile(*ellipse_body, n_grid=63)


def test_profile_unknown_functional(ellipse_body):
    with pytest.raises(ValueError):
        profile(*ellipse_body, "area")


def test_profile_requires_interior_circle(ellipse_body):
    E, _ = ellipse_body
    with pytest.raises(DomainError):
        profile(E, Circle((0.0, 0.0), 1.0))


def test_sampled_body_uses_looser_tolerance():
    th = np.linspace(0, 2 * math.pi, 128, endpoint=False)
    K = load_radial_samples(np.column_stack([th, np.full(128, 2.0)]))
    p = profile(K, Circle((0.0, 0.0), 1.0))
    assert p.tolerance == pytest.approx(1e-4 * p.lambda_hat)
    assert p.is_constant


def test_yanagihara_point_profile(yanagihara):
    p = point_profile(yanagihara, (0.0, 0.0), "product")
    assert p.lambda_hat == pytest.approx(1.0, abs=1e-12)
    assert p.deviation < 1e-9


def test_limacon_point_profile(limacon):
    p = point_profile(limacon, limacon.pole, "length")
    assert p.lambda_hat == pytest.approx(6.0, abs=1e-12)
    assert p.deviation < 1e-12


@pytest.mark.parametrize("functional", ["product", "length", "reciprocal_sum", "subtended_angle"])
def test_unit_disc_center_all_constant(functional):
    assert point_profile(make_disc(1.0), (0.0, 0.0), functional).is_constant


def test_point_profile_outside_rejected(ellipse_body):
    with pytest.raises(DomainError):
        point_profile(ellipse_body[0], (3.0, 0.0))
    with pytest.raises(DomainError):
        point_profile(ellipse_body[0], (2.0, 0.0))


# product equation

def test_product_unique_symmetric():
    s = solve_product_equation(math.pi / 3, 1 / 3)
    assert s.kind == "unique_symmetric"
    assert s.thetas[0] == pytest.approx(math.pi / 6, abs=1e-15)


def test_product_degenerate():
    s = solve_product_equation(math.pi / 2, 1.0)
    assert s.kind == "degenerate_continuum"
    assert s.interval == (0.0, math.pi / 4)
    assert solve_product_equation(math.pi / 2, 0.7).kind == "no_solution"


def test_product_two_solutions_against_scan():
    alpha, lam = math.pi / 3, 0.2
    s = solve_product_equation(alpha, lam)
    assert s.kind == "two_solutions"
    t0, t1 = s.thetas
    assert t1 == pytest.approx(alpha - t0, abs=1e-15)
    assert product_function(alpha, t0) == pytest.approx(lam, abs=1e-12)
    assert 0 < t0 < alpha / 2
    # brute-force oracle: 10^6 point scan of f on (0, alpha/2)
    grid = np.linspace(0, alpha / 2, 1_000_001)[1:]
    k = np.argmin(np.abs(product_function(alpha, grid) - lam))
    assert abs(grid[k] - t0) < alpha / 2 / 1e6
    assert s.chord_length == pytest.approx(implied_chord_length(alpha, t1), abs=1e-12)


def test_product_no_solution_above_maximum():
    assert solve_product_equation(math.pi / 3, 0.34).kind == "no_solution"


def test_product_obtuse_angle():
    # for alpha > pi/2 the admissible theta range is (alpha - pi/2, alpha/2]
    alpha = 2.0
    assert solve_product_equation(alpha, 0.5 * math.tan(1.0) ** 2).kind == "no_solution"
    s = solve_product_equation(alpha, 5.0)
    assert s.kind == "two_solutions"
    assert alpha - math.pi / 2 < s.thetas[0] < alpha / 2
    assert product_function(alpha, s.thetas[0]) == pytest.approx(5.0, rel=1e-12)


def test_product_tie_band_reports_branches():
    alpha = math.pi / 2 + 0.5 * DEGENERATE_BAND
    assert solve_product_equation(alpha, 1.0).kind == "degenerate_continuum"
    # the exact equation still has roots near the band edge; they are kept as branches
    s = solve_product_equation(alpha, 1.5)
    assert s.kind == "no_solution"
    assert len(s.branches) == 2
    # f is within ~1e-9 of constant here, so the root is badly conditioned
    assert product_function(alpha, s.branches[0]) == pytest.approx(1.5, rel=1e-5)


@pytest.mark.parametrize("alpha,lam", [(0.0, 1.0), (math.pi, 1.0), (1.0, 0.0), (1.0, -2.0),
                                       (1.0, math.inf)])
def test_product_domain_errors(alpha, lam):
    with pytest.raises(DomainError):
        solve_product_equation(alpha, lam)


def test_product_monotone_on_half_range():
    rng = np.random.default_rng(21)
    for _ in range(10_000):
        alpha = rng.uniform(0.01, math.pi - 0.01)
        if abs(alpha - math.pi / 2) < 1e-3:
            continue
        lo = max(0.0, alpha - math.pi / 2)
        t = np.sort(rng.uniform(lo, alpha / 2, 2))
        if t[1] - t[0] < 1e-9:
            continue
        f0, f1 = product_function(alpha, t)
        if alpha < math.pi / 2:
            assert f1 > f0
        else:
            assert f1 < f0


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, math.pi - 0.05), st.floats(0.01, 20.0))
def test_product_chord_length_unique(alpha, lam):
    if abs(alpha - math.pi / 2) < 1e-6:
        return
    s = solve_product_equation(alpha, lam)
    if s.kind == "two_solutions":
        t0, t1 = s.thetas
        l0 = implied_chord_length(alpha, t0)
        l1 = implied_chord_length(alpha, t1)
        assert l0 == pytest.approx(l1, rel=1e-12, abs=1e-12)


# reciprocal equation

def test_reciprocal_unique_symmetric():
    s = solve_reciprocal_equation(math.pi / 2, 2.0)
    assert s.kind == "unique_symmetric"
    assert s.thetas[0] == pytest.approx(math.pi / 4, abs=1e-15)


def test_reciprocal_right_angle_two_solutions():
    s = solve_reciprocal_equation(math.pi / 2, 2.5)
    assert s.kind == "two_solutions"
    np.testing.assert_allclose(sorted(s.thetas), [math.atan(0.5), math.atan(2.0)], atol=1e-14)
    assert s.chord_length == pytest.approx(2.5, abs=1e-13)


def test_reciprocal_below_minimum():
    assert solve_reciprocal_equation(math.pi / 3, 2 / math.tan(math.pi / 6) - 0.01).kind == \
        "no_solution"


def test_reciprocal_obtuse_cap():
    alpha = 2.0
    cap = 1 / math.tan(alpha - math.pi / 2)
    assert solve_reciprocal_equation(alpha, cap + 0.1).kind == "no_solution"
    s = solve_reciprocal_equation(alpha, cap - 0.1)
    assert s.kind == "two_solutions"
    assert reciprocal_function(alpha, s.thetas[0]) == pytest.approx(cap - 0.1, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, math.pi - 0.05), st.floats(0.01, 50.0))
def test_reciprocal_chord_length_unique(alpha, lam):
    s = solve_reciprocal_equation(alpha, lam)
    if s.kind == "two_solutions":
        t0, t1 = s.thetas
        assert implied_chord_length(alpha, t0) == pytest.approx(
            implied_chord_length(alpha, t1), rel=1e-12, abs=1e-12)


def test_reciprocal_unique_length_at_right_angle():
    for lam in (2.1, 3.0, 7.5):
        s = solve_reciprocal_equation(math.pi / 2, lam)
        lengths = {round(implied_chord_length(math.pi / 2, t), 12) for t in s.thetas}
        assert len(lengths) == 1


def test_product_right_angle_lengths_vary():
    # any theta in (0, pi/4] solves the product equation, with different chord lengths
    lengths = [implied_chord_length(math.pi / 2, t) for t in (0.2, 0.5, math.pi / 4)]
    assert np.ptp(lengths) > 0.5


def test_parabola_product_constant_but_length_not(parabola_body):
    assert profile(*parabola_body, "product").is_constant
    length = profile(*parabola_body, "length")
    assert length.verdict == "nonconstant"
    assert length.relative_deviation > 1e-3


# symmetry

def test_symmetry_defects(parabola_body, ellipse_body, limacon):
    assert central_symmetry_defect(parabola_body[0], (0.0, 0.0)) < 1e-10
    assert central_symmetry_defect(ellipse_body[0], (0.0, 0.0)) < 1e-12
    assert central_symmetry_defect(limacon, limacon.pole) == pytest.approx(2.0, abs=1e-12)


def test_symmetry_defect_off_center(ellipse_body):
    assert central_symmetry_defect(ellipse_body[0], (0.5, 0.0)) > 0.5


# envelopes

@pytest.mark.parametrize("alpha", [0.5, 1.5, 2.5])
def test_disc_envelope(alpha):
    R = 1.7
    env = constant_angle_envelope(make_disc(R), (0.0, 0.0), alpha)
    assert env.circle.radius == pytest.approx(R * math.cos(alpha / 2), abs=1e-8)
    assert env.circle_residual < 1e-8


def test_ellipse_center_right_angle_envelope(ellipse_body):
    env = constant_angle_envelope(ellipse_body[0], (0.0, 0.0), math.pi / 2)
    assert env.circle.radius == pytest.approx(2 / math.sqrt(5), abs=1e-6)
    assert env.circle_residual < 1e-6


def test_ellipse_focus_envelope_is_ellipse():
    E, _ = make_ellipse(2.0, 1.0)
    env = constant_angle_envelope(E, (math.sqrt(3), 0.0), math.pi / 3)
    assert env.ellipse_residual < 1e-6
    assert env.circle_residual > 1e-2
    # one focus of the envelope stays at the focus of the body
    c, (p, q) = env.ellipse.center, env.ellipse.axes
    f = math.sqrt(p * p - q * q)
    u = np.array([math.cos(env.ellipse.angle), math.sin(env.ellipse.angle)])
    foci = [c + f * u, c - f * u]
    assert min(np.linalg.norm(x - (math.sqrt(3), 0.0)) for x in foci) < 1e-5


def test_envelope_bad_angle(ellipse_body):
    with pytest.raises(DomainError):
        constant_angle_envelope(ellipse_body[0], (0.0, 0.0), math.pi)
    with pytest.raises(DomainError):
        constant_angle_envelope(ellipse_body[0], (5.0, 0.0), 1.0)


def test_limacon_length_at_pole_not_reciprocal(limacon):
    assert point_profile(limacon, limacon.pole, "reciprocal_sum").verdict == "nonconstant"
    assert point_profile(make_limacon(0.0, 1.0), (0.0, 0.0), "reciprocal_sum").is_constant
