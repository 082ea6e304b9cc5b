import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from gabriel_lab import constants as C
from gabriel_lab.curves import DIAMETER, Circle, convexity_check
from gabriel_lab.errors import DomainError
from gabriel_lab.extremal import (
    POLYGON_MAX_RADIUS,
    SearchConfig,
    decode_curve,
    decode_function,
    maximize_ratio,
    project,
    ratio,
    run_restart,
    sharpness_study_circle,
    sharpness_study_rf,
)
from gabriel_lab.harmonic import FunctionSpec

ONE = FunctionSpec.named("constant", c=1)


# -- ratio ---------------------------------------------------------------------------

@pytest.mark.parametrize("rho", [0.2, 0.6, 0.95])
def test_ratio_constant(rho):
    assert ratio(ONE, Circle(0j, rho), 2) == pytest.approx(rho, rel=1e-12)


def test_ratio_monomial():
    f = FunctionSpec.named("monomial", k=3)
    assert ratio(f, Circle(0j, 0.7), 2) == pytest.approx(0.7 ** 7, rel=1e-10)


def test_ratio_rf_extremal_under_bound():
    f = FunctionSpec.named("rf_extremal", p=2, rho=0.99)
    r = ratio(f, DIAMETER, 2)
    assert r <= C.c_rf(2)
    oracle = integrate.quad(lambda x: 1 / (1 - 0.9801 * x * x), -1, 1, epsabs=1e-13)[0]
    boundary = integrate.quad(
        lambda t: ((1 - 0.9801 * np.exp(2j * t)) ** -0.5).real ** 2, 0, 2 * math.pi,
        epsabs=1e-13, limit=400, points=[math.pi / 2, math.pi, 3 * math.pi / 2])[0]
    assert r == pytest.approx(oracle / boundary, rel=1e-8)


def test_ratio_small_p_mixed_homogeneity():
    f = FunctionSpec.from_series([2, 0.3])
    curve = Circle(0j, 0.5)
    assert ratio(f.scaled(10), curve, 0.5) == pytest.approx(ratio(f, curve, 0.5), rel=1e-9)


# -- config and decoding -------------------------------------------------------------

def test_config_validation():
    with pytest.raises(DomainError):
        SearchConfig(budget=0)
    with pytest.raises(DomainError):
        SearchConfig(theorem="frazer", curves="polygon")
    with pytest.raises(DomainError):
        SearchConfig(family="rational")


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_projection_unit_norm(seed):
    cfg = SearchConfig(family="harmonic", degree=5, curves="circle")
    x = np.random.default_rng(seed).normal(size=4 * 6 - 2 + 3)
    f = decode_function(project(x, cfg), cfg).as_series
    assert np.sum(np.abs(f.a) ** 2) + np.sum(np.abs(f.b) ** 2) == pytest.approx(1.0)
    assert f.b[0] == 0


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_decoded_curves_admissible(seed):
    rng = np.random.default_rng(seed)
    cfg = SearchConfig(curves="polygon", family="constant")
    curve = decode_curve(rng.normal(size=24) * 3, cfg)
    if curve is not None:
        assert convexity_check(curve.vertices, closed=True)
        assert max(abs(v) for v in curve.vertices) <= POLYGON_MAX_RADIUS
    cfg = SearchConfig(curves="circle", family="constant")
    circ = decode_curve(rng.normal(size=3) * 5, cfg)
    assert abs(circ.center) + circ.radius < 1


# -- searches ------------------------------------------------------------------------

def test_constant_on_circles_approaches_one():
    cfg = SearchConfig(theorem="circle", p=2, family="constant", curves="concentric",
                       restarts=2, budget=200, seed=1)
    res = maximize_ratio(cfg)
    assert 0.99 < res.ratio_over_constant <= 1
    assert res.counterexample is None


def test_frazer_monomials_on_concentric_circles():
    cfg = SearchConfig(theorem="frazer", p=2, family="monomial", degree=2,
                       curves="concentric", restarts=2, budget=200, seed=3)
    res = maximize_ratio(cfg)
    rho = decode_curve(np.array(res.best_params), cfg).radius
    assert res.best_ratio == pytest.approx(rho ** 5, rel=1e-8)
    assert 0.95 < res.best_ratio <= 1
    assert res.counterexample is None


def test_main_polygon_search_stays_below_constant():
    cfg = SearchConfig(theorem="main", p=1.5, family="harmonic", degree=8,
                       curves="polygon", restarts=2, budget=300, seed=5)
    res = maximize_ratio(cfg)
    assert res.constant == pytest.approx(2 ** 2.5)
    assert 0 < res.best_ratio <= 2 ** 2.5
    assert res.counterexample is None
    assert res.evaluations <= 300 + 2
    vals = [row["ratio_over_constant"] for row in res.trace]
    assert vals == sorted(vals)


def test_search_is_deterministic():
    cfg = SearchConfig(theorem="gabriel", p=2, family="analytic", degree=3,
                       curves="circle", restarts=2, budget=120, seed=9)
    a, b = maximize_ratio(cfg), maximize_ratio(cfg)
    assert a.to_dict() == b.to_dict()
    assert run_restart(cfg, 1) == run_restart(cfg, 1)


def test_budget_exhaustion_flag():
    cfg = SearchConfig(theorem="main", p=2, family="harmonic", degree=3,
                       curves="circle", restarts=1, budget=5, seed=0)
    res = maximize_ratio(cfg)
    assert res.budget_exhausted
    assert math.isfinite(res.best_ratio)


# -- sharpness studies ---------------------------------------------------------------

def test_rf_study_rho_zero_closed_form():
    p = 1.5
    row = sharpness_study_rf(p, [0.0])[0]
    assert row["fraction"] == pytest.approx(2 / (2 * math.pi * 0.5 * C.sec_power(p)), rel=1e-12)


def test_rf_study_fractions_against_quad():
    """Fractions along the ladder, checked against scipy quad.

    The fractions rise with rho, but slowly: 0.34, 0.46, 0.55 at p = 1.5.
    """
    p = 1.5
    rows = sharpness_study_rf(p, [0.9, 0.99, 0.999])
    fr = [r["fraction"] for r in rows]
    assert fr == sorted(fr)
    for row in rows:
        rho = row["rho"]
        lhs = 2 * integrate.quad(lambda x: (1 - rho ** 2 * x * x) ** -1.0, 0, 1,
                                 epsabs=1e-14)[0]
        w = lambda t: abs(((1 - rho ** 2 * np.exp(2j * t)) ** (-1 / p)).real) ** p
        rhs = 4 * integrate.quad(w, 0, math.pi / 2, epsabs=1e-14, limit=500)[0]
        assert row["lhs"] == pytest.approx(lhs, rel=1e-8)
        assert row["fraction"] == pytest.approx(lhs / rhs / C.c_rf(p), rel=1e-8)
    assert fr[-1] == pytest.approx(0.545, abs=5e-3)


def test_rf_study_p2():
    rows = sharpness_study_rf(2, [0.5, 0.9, 0.99, 0.999])
    fr = [r["fraction"] for r in rows]
    assert fr == sorted(fr)
    # |Re (1 - rho^2 z^2)^{-1/2}|^2 has closed-form integrals at p = 2
    rho = 0.999
    lhs = math.log((1 + rho) / (1 - rho)) / rho
    assert rows[-1]["lhs"] == pytest.approx(lhs, rel=1e-9)
    assert 0.66 < fr[-1] < 0.67


@settings(max_examples=10)
@given(st.lists(st.floats(0.05, 0.995), min_size=2, max_size=4, unique=True),
       st.floats(1.2, 3.0))
def test_rf_fractions_nondecreasing(ladder, p):
    rows = sharpness_study_rf(p, sorted(ladder))
    fr = [r["fraction"] for r in rows]
    assert all(b >= a * (1 - 1e-9) for a, b in zip(fr, fr[1:]))


def test_circle_study_constant():
    rows = sharpness_study_circle(2, [0.5, 0.9, 0.999])
    assert [r["ratio"] for r in rows] == pytest.approx([0.5, 0.9, 0.999], rel=1e-12)


def test_circle_study_two_plus_re_z():
    f = FunctionSpec.from_series([2, 0.5], [0, 0.5])
    rows = sharpness_study_circle(2, [0.9, 0.99, 0.999], f)
    r = [row["ratio"] for row in rows]
    assert r == sorted(r) and r[-1] >= 0.99 and r[-1] < 1
    # |2 + rho cos t|^2 averages to 4 + rho^2/2 over the circle of radius rho
    expected = [rho * (4 + rho * rho / 2) / 4.5 for rho in (0.9, 0.99, 0.999)]
    assert r == pytest.approx(expected, rel=1e-10)


def test_study_domains():
    with pytest.raises(DomainError):
        sharpness_study_rf(1.0, [0.5])
    with pytest.raises(DomainError):
        sharpness_study_rf(2, [1.0])
    with pytest.raises(DomainError):
        sharpness_study_circle(1.5, [0.5])
