import math

import numpy as np
import pytest

from eqlab.bodies2d import make_disc, make_ellipse, make_limacon, make_parabola_body
from eqlab.circle_search import (Objective, SearchConfig, certify_uniqueness_grid,
                                 find_circle)
from eqlab.errors import DomainError
from eqlab.geometry2d import Circle
from eqlab.tangent_dynamics import interior_margin


@pytest.fixture(scope="module")
def ellipse_search():
    E, c = make_ellipse(2.0, 1.0)
    return E, c, find_circle(E)


@pytest.fixture(scope="module")
def parabola_search():
    K, c = make_parabola_body()
    return K, c, find_circle(K)


def test_ellipse_circle_recovered(ellipse_search):
    E, c, res = ellipse_search
    assert res.verdict == "found"
    np.testing.assert_allclose(res.candidate.center, [0.0, 0.0], atol=1e-4)
    assert res.candidate.radius == pytest.approx(2 / math.sqrt(5), abs=1e-4)
    assert res.candidate.objective < 1e-6


def test_parabola_circle_recovered(parabola_search):
    K, c, res = parabola_search
    assert res.verdict == "found"
    np.testing.assert_allclose(res.candidate.center, [0.0, 0.0], atol=1e-4)
    assert res.candidate.radius == pytest.approx(1.0, abs=1e-4)


def test_disc_reciprocal_concentric():
    res = find_circle(make_disc(1.0), SearchConfig(functional="reciprocal_sum"))
    assert res.verdict == "found"
    assert res.candidate.objective < 1e-10
    assert np.linalg.norm(res.candidate.center) < 1e-4


def test_limacon_has_no_equipotential_circle():
    res = find_circle(make_limacon(1.0, 3.0))
    assert res.verdict == "none_below_tolerance"
    assert res.candidate.objective > 1e-3


def test_reported_candidates_are_strictly_interior(ellipse_search, parabola_search):
    for K, _, res in (ellipse_search, parabola_search):
        for cand in res.starts:
            assert cand.feasibility_margin > 0
            assert interior_margin(K, cand.circle) == pytest.approx(cand.feasibility_margin)


def test_symmetric_body_center(ellipse_search, parabola_search):
    # an equipotential circle sits at the centre of symmetry
    for _, _, res in (ellipse_search, parabola_search):
        assert np.linalg.norm(res.candidate.center) < 1e-3


def test_search_is_deterministic(ellipse_search):
    E, _, res = ellipse_search
    again = find_circle(E)
    assert again.candidate.key() == res.candidate.key()


def test_objective_rigid_motion_invariance(rng):
    E, c = make_ellipse(2.0, 1.0)
    x = np.array([0.1, -0.05, 0.7])
    base = Objective(E, n_grid=128).spread(x)
    for _ in range(10):
        ang = rng.uniform(0, 2 * math.pi)
        shift = rng.uniform(-5, 5, 2)
        R = np.array([[math.cos(ang), -math.sin(ang)], [math.sin(ang), math.cos(ang)]])
        moved = E.transformed(ang, shift)
        cx, cy = R @ x[:2] + shift
        assert Objective(moved, n_grid=128).spread((cx, cy, x[2])) == pytest.approx(base, abs=1e-10)


def test_objective_penalizes_infeasible():
    E, _ = make_ellipse(2.0, 1.0)
    obj = Objective(E)
    assert obj((0.0, 0.0, 1.2)) > 1.0
    assert obj((5.0, 0.0, 0.1)) > 1.0
    assert obj((0.0, 0.0, 0.0)) > 1.0


def test_thin_body_has_no_feasible_circle():
    thin, _ = make_ellipse(1.0, 1e-3)
    with pytest.raises(DomainError):
        find_circle(thin, SearchConfig(multistarts=2, min_radius_fraction=0.02))


@pytest.mark.parametrize("kw", [{"functional": "area"}, {"multistarts": 0}, {"tolerance": 0.0}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SearchConfig(**kw)


def test_parabola_second_circle_experiment(parabola_search):
    # no other (center, radius) reaches a product spread below 1e-4
    K, _, res = parabola_search
    rep = certify_uniqueness_grid(K, res.candidate, grid_step=0.1, exclusion=0.05)
    assert rep.second_best > 1e-3
    assert not rep.disc_like
    assert rep.scanned > 100
    assert np.linalg.norm(rep.location - [0.0, 0.0, 1.0]) >= 0.05 - 1e-9


def test_ellipse_unique_basin(ellipse_search):
    E, _, res = ellipse_search
    rep = certify_uniqueness_grid(E, res.candidate)
    assert rep.second_best > 1e-3
    assert not rep.disc_like


def test_disc_is_disc_like():
    D = make_disc(1.0)
    res = find_circle(D)
    rep = certify_uniqueness_grid(D, res.candidate)
    assert rep.disc_like
    assert rep.second_best < 1e-10


def test_threads_give_same_answer(monkeypatch, ellipse_search):
    E, _, res = ellipse_search
    monkeypatch.setenv("EQLAB_THREADS", "3")
    assert find_circle(E).candidate.key() == res.candidate.key()


def test_circle_property(ellipse_search):
    cand = ellipse_search[2].candidate
    assert isinstance(cand.circle, Circle)
    assert cand.circle.radius == cand.radius
