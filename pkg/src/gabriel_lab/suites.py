"""Seeded random suites of harmonic polynomials and convex curves."""

import math

import numpy as np

from gabriel_lab.curves import DIAMETER, Circle, Ellipse, Polygon
from gabriel_lab.errors import DomainError
from gabriel_lab.harmonic import (
    DEFAULT_DEGREE,
    FunctionSpec,
    HarmonicSeries,
    evaluate,
    random_series,
)


def generate_random_suite(seed, count, degree):
    """``count`` normalized harmonic polynomials of the given degree.

    Real and imaginary parts of every coefficient are independent standard
    normals, with ``b_0 = 0``. The same seed always yields the same list.
    """
    if degree > DEFAULT_DEGREE:
        raise DomainError(f"degree must be <= {DEFAULT_DEGREE}")
    rng = np.random.default_rng(seed)
    return [FunctionSpec.from_series(random_series(rng, degree)) for _ in range(count)]


def random_analytic_suite(seed, count, degree):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        a = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
        out.append(FunctionSpec.from_series(HarmonicSeries(a)))
    return out


def _random_center(rng, max_radius):
    r = max_radius * math.sqrt(rng.uniform())
    return r * np.exp(2j * math.pi * rng.uniform())


def random_circles(rng, count, max_center=0.8):
    out = []
    for _ in range(count):
        c = _random_center(rng, max_center)
        rho = (1 - abs(c)) * rng.uniform(0.05, 0.98)
        out.append(Circle(c, rho))
    return out


def random_polygons(rng, count, min_vertices=12, max_vertices=32):
    """Convex polygons with vertices at sorted random angles on an inner circle."""
    out = []
    for _ in range(count):
        n = int(rng.integers(min_vertices, max_vertices + 1))
        c = _random_center(rng, 0.3)
        radius = rng.uniform(0.1, 0.95 - abs(c))
        angles = np.sort(rng.uniform(0, 2 * math.pi, n))
        out.append(Polygon(tuple(c + radius * np.exp(1j * angles))))
    return out


def random_ellipses(rng, count):
    out = []
    while len(out) < count:
        c = _random_center(rng, 0.3)
        alpha = rng.uniform(0.1, 0.65)
        beta = rng.uniform(0.05, alpha)
        rot = rng.uniform(0, math.pi)
        if abs(c) + alpha < 0.99:
            out.append(Ellipse(c, alpha, beta, rot))
    return out


def standard_curves(seed, circles=5, polygons=5, ellipses=3, diameter=True):
    """The default verification contours: random circles, polygons, ellipses, diameter."""
    rng = np.random.default_rng(seed)
    curves = random_circles(rng, circles) + random_polygons(rng, polygons)
    curves += random_ellipses(rng, ellipses)
    if diameter:
        curves.append(DIAMETER)
    return curves


def random_pairs(seed, count, degree):
    """Pairs ``(h, g)`` of random analytic polynomials."""
    funcs = random_analytic_suite(seed, 2 * count, degree)
    return list(zip(funcs[::2], funcs[1::2]))


def nonnegative_real_suite(seed, count, degree, margin=0.1, grid=4096):
    """Real harmonic polynomials ``Re h + c`` shifted to be positive on the circle.

    The shift puts the sampled boundary minimum at ``margin``; the sampling
    error of a degree-``degree`` polynomial on ``grid`` points is far below it.
    """
    rng = np.random.default_rng(seed)
    t = 2 * math.pi * np.arange(grid) / grid
    out = []
    for _ in range(count):
        c = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
        a = c / 2
        b = c / 2
        a[0] = c[0].real
        b[0] = 0
        ser = HarmonicSeries(a, b)
        u = np.real(evaluate(ser, np.exp(1j * t)))
        a[0] += margin - float(np.min(u))
        out.append(FunctionSpec.from_series(HarmonicSeries(a, b)))
    return out
