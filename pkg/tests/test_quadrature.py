import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from gabriel_lab import engine
from gabriel_lab.curves import DIAMETER, Circle, regular_polygon
from gabriel_lab.errors import DomainError, NumericalFailure
from gabriel_lab.harmonic import BoundaryTrace, FunctionSpec, boundary_trace, random_series
from gabriel_lab.quadrature import (
    QuadratureResult,
    boundary_integral,
    circle_max,
    contour_integral,
    default_tol,
    oracle_contour,
    oracle_integral,
    radial_integral,
)
from gabriel_lab.suites import random_circles, random_ellipses, random_polygons

ONE = FunctionSpec.named("constant", c=1)
TWO_RE = FunctionSpec.from_series([0, 1], [0, 1])


# -- engine -----------------------------------------------------------------

@pytest.mark.parametrize("degree", range(0, 24))
def test_kronrod_exact_for_polynomials(degree):
    val, err = engine.gk15(lambda x: x ** degree, [0.0], [1.0])
    assert val[0] == pytest.approx(1 / (degree + 1), rel=1e-14)
    if degree <= 13:
        assert err[0] < 1e-14


def test_adaptive_gk_against_quad():
    f = lambda x: np.sqrt(np.abs(np.sin(3 * x)))
    val, err, evals, ok = engine.adaptive_gk(f, [0, 1, 2], tol=1e-10)
    oracle = integrate.quad(lambda x: math.sqrt(abs(math.sin(3 * x))), 0, 2,
                            points=[math.pi / 3], limit=500, epsabs=1e-13)[0]
    assert ok and val == pytest.approx(oracle, abs=1e-9)
    assert evals > 0


def test_adaptive_gk_reports_budget_exhaustion():
    f = lambda x: np.sin(1 / np.maximum(x, 1e-300))
    _, _, evals, ok = engine.adaptive_gk(f, [0, 1], tol=1e-14, budget=300)
    assert not ok and evals <= 315


def test_periodic_trapezoid_spectral():
    val, err, n, ok = engine.periodic_trapezoid(lambda t: np.exp(np.cos(t)), tol=1e-14)
    from scipy.special import i0
    assert ok and val == pytest.approx(2 * math.pi * i0(1.0), rel=1e-14)


# -- QuadratureResult ----------------------------------------------------------

def test_result_invariants():
    with pytest.raises(ValueError):
        QuadratureResult(1.0, -1.0, 1, True)
    with pytest.raises(ValueError):
        QuadratureResult(1.0, 0.0, 0, True)
    r = QuadratureResult(2.0, 0.5, 10, True)
    assert r.upper == 2.5 and r.lower == 1.5


def test_default_tol_env(monkeypatch):
    monkeypatch.setenv("GABRIEL_LAB_TOL", "1e-6")
    assert default_tol() == 1e-6
    monkeypatch.delenv("GABRIEL_LAB_TOL")
    assert default_tol() == 1e-8


# -- contour integrals ----------------------------------------------------------

@pytest.mark.parametrize("p", [0.5, 1, 2, 3.7])
def test_constant_on_circle(p):
    res = contour_integral(ONE, p, Circle(0j, 0.4))
    assert res.converged and res.value == pytest.approx(2 * math.pi * 0.4, rel=1e-12)


@pytest.mark.parametrize("k", [0, 1, 4, 8])
@pytest.mark.parametrize("rho", [0.1, 0.5, 0.9])
def test_monomial_on_circle(k, rho):
    res = contour_integral(FunctionSpec.named("monomial", k=k), 2, Circle(0j, rho))
    assert res.value == pytest.approx(2 * math.pi * rho ** (2 * k + 1), rel=1e-10)


def test_two_re_on_diameter():
    res = contour_integral(TWO_RE, 2, DIAMETER)
    assert res.value == pytest.approx(8 / 3, rel=1e-12)
    assert res.error_estimate <= 1e-8 * (1 + res.value)


def test_contour_matches_oracle_on_random_triples(rng):
    curves = random_circles(rng, 4) + random_polygons(rng, 3) + random_ellipses(rng, 3)
    for i in range(100):
        f = FunctionSpec.from_series(random_series(rng, int(rng.integers(0, 9))))
        curve = curves[i % len(curves)]
        p = float(rng.uniform(1, 4))
        res = contour_integral(f, p, curve)
        oracle = oracle_contour(f, p, curve)
        assert res.value == pytest.approx(oracle, rel=1e-8, abs=1e-12)


def test_polygon_additivity(rng):
    poly = regular_polygon(9, 0.7, 0.05 + 0.02j, phase=0.3)
    f = FunctionSpec.from_series(random_series(rng, 6))
    whole = contour_integral(f, 2.5, poly, tol=1e-12).value
    parts = math.fsum(contour_integral(f, 2.5, edge, tol=1e-12).value
                      for edge in poly.edges())
    assert whole == pytest.approx(parts, rel=1e-10)


@given(st.integers(0, 2**32 - 1), st.floats(1, 4))
def test_concentric_monotone(seed, p):
    f = FunctionSpec.from_series(random_series(np.random.default_rng(seed), 5))
    vals = [contour_integral(f, p, Circle(0j, r)).value for r in (0.2, 0.5, 0.8, 0.99)]
    assert all(b >= a * (1 - 1e-9) for a, b in zip(vals, vals[1:]))


def test_cayley_diameter_closed_form():
    for p in (0.3, 0.6, 0.95):
        s = p * p
        res = contour_integral(FunctionSpec.named("cayley_power", p=p), p, DIAMETER)
        assert res.value == pytest.approx(2 * math.pi * s / math.sin(math.pi * s), rel=1e-8)


def test_rf_extremal_diameter_vs_quad():
    f = FunctionSpec.named("rf_extremal", p=2, rho=0.99)
    res = contour_integral(f, 2, DIAMETER)
    g = lambda x: abs((1 - 0.9801 * x * x) ** -0.5) ** 2
    oracle = integrate.quad(g, -1, 1, points=[-0.99, 0.99], epsabs=1e-13, limit=400)[0]
    assert res.value == pytest.approx(oracle, rel=1e-9)


# -- boundary integrals ----------------------------------------------------------

def test_trapezoid_not_fooled_by_oscillating_error():
    # |f|^1.25 for this rotated quartic has trapezoid errors that change sign
    # with n, so the 256 and 512 point sums agree to 9e-8 while both are off
    # by 8e-6
    ser = random_series(np.random.default_rng(219), 4).rotated(4.84793395963259)
    f = FunctionSpec.from_series(ser)
    res = boundary_integral(boundary_trace(f), 1.25)
    oracle = integrate.quad(lambda t: abs(f.on_circle(np.array([t]))[0]) ** 1.25,
                            0, 2 * math.pi, limit=1000, epsabs=1e-13, epsrel=1e-13)[0]
    assert res.converged
    assert abs(res.value - oracle) <= max(res.error_estimate, 1e-8 * oracle)


def test_boundary_constant():
    assert boundary_integral(boundary_trace(ONE), 1).value == pytest.approx(2 * math.pi)


def test_boundary_two_cos():
    res = boundary_integral(boundary_trace(TWO_RE), 2)
    assert res.value == pytest.approx(4 * math.pi, rel=1e-13)


@pytest.mark.parametrize("p", [0.1, 0.3, 0.5, 0.7, 0.9, 0.99])
def test_boundary_cayley_mass(p):
    res = boundary_integral(boundary_trace(FunctionSpec.named("cayley_power", p=p)), 1)
    assert res.converged
    assert res.value == pytest.approx(2 * math.pi, abs=1e-6)


def test_boundary_cayley_against_quad():
    p = 0.5
    c = math.cos(math.pi * p / 2)
    oracle = 2 * integrate.quad(lambda t: c * abs(1 / math.tan(t / 2)) ** p, 0, math.pi,
                                epsabs=1e-13, limit=500)[0]
    res = boundary_integral(boundary_trace(FunctionSpec.named("cayley_power", p=p)), 1)
    assert res.value == pytest.approx(oracle, rel=1e-9)


def test_boundary_nonintegrable_rejected():
    trace = boundary_trace(FunctionSpec.named("cayley_power", p=0.6))
    with pytest.raises(DomainError):
        boundary_integral(trace, 1 / 0.6)


def test_boundary_sampled_only():
    t = 2 * np.pi * np.arange(256) / 256
    trace = BoundaryTrace(256, 2 + np.cos(3 * t))
    oracle = integrate.quad(lambda s: (2 + math.cos(3 * s)) ** 1.5, 0, 2 * math.pi,
                            epsabs=1e-13)[0]
    assert boundary_integral(trace, 1.5).value == pytest.approx(oracle, rel=1e-9)


# -- radial, circle max, oracle ----------------------------------------------------

def test_radial_examples():
    assert radial_integral(lambda r: 3.0).value == pytest.approx(3.0)
    assert radial_integral(lambda r: r * r).value == pytest.approx(1 / 3, rel=1e-14)
    z = FunctionSpec.named("monomial", k=1)
    assert radial_integral(lambda r: circle_max(z, r, 2)).value == pytest.approx(1 / 3, rel=1e-12)


def test_radial_nonfinite():
    with pytest.raises(NumericalFailure):
        radial_integral(lambda r: 1 / (1 - r) if r < 1 else math.inf)


def test_circle_max_examples():
    assert circle_max(FunctionSpec.named("constant", c=2j), 0.5, 3) == pytest.approx(8)
    assert circle_max(FunctionSpec.named("monomial", k=3), 0.7, 1.5) == pytest.approx(0.7 ** 4.5)
    assert circle_max(TWO_RE, 1.0, 2) == pytest.approx(4, rel=1e-14)


def test_circle_max_vs_dense_grid(rng):
    for _ in range(10):
        f = FunctionSpec.from_series(random_series(rng, 20))
        t = np.linspace(0, 2 * np.pi, 200001)
        dense = np.max(np.abs(f(0.9 * np.exp(1j * t))) ** 2)
        got = circle_max(f, 0.9, 2)
        # the grid is only second-order accurate at the peak
        assert dense * (1 - 1e-12) <= got <= dense * (1 + 1e-6)


def test_oracle_examples():
    assert oracle_integral(lambda t: np.ones_like(t), (0, 2 * math.pi)) == pytest.approx(2 * math.pi)
    assert oracle_integral(lambda x: x ** 3, (0, 1), n=9) == pytest.approx(0.25, abs=1e-15)
    val = oracle_integral(lambda t: np.abs(2 * np.cos(t)) ** 2, (0, 2 * math.pi))
    assert val == pytest.approx(4 * math.pi, abs=1e-10)


def test_oracle_needs_nine_points():
    with pytest.raises(DomainError):
        oracle_integral(np.sin, (0, 1), n=7)
