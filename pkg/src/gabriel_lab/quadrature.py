"""Integrals over convex contours, the unit circle, and radii.

Every adaptive routine returns a ``QuadratureResult``. Error estimates are
embedded-rule heuristics, not certified bounds.

Integrable endpoint singularities are handled with a priori exponents rather
than detection: a function reports ``(point on T, exponent)`` pairs and the
integrators grade their nodes toward those points with ``t = a + L u^kappa``.
"""

from dataclasses import dataclass
import math
import os

import numpy as np
from scipy.optimize import minimize_scalar

from gabriel_lab import engine
from gabriel_lab.errors import DomainError, NumericalFailure
from gabriel_lab.harmonic import as_function

# Distance from a singular point at which contour integration hands over to
# a power-law tail. Below ~1e-8 the rounding of z = 1 - delta itself starts
# to dominate the integrand error.
TAIL_DISTANCE = 1e-8
DYADIC_LEVELS = 40
BOUNDARY_TAIL_OFFSET = 1e-100
CIRCLE_MAX_GRID = 512
CIRCLE_MAX_REFINE = 1e-3


def default_tol():
    return float(os.environ.get("GABRIEL_LAB_TOL", engine.DEFAULT_TOL))


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool

    def __post_init__(self):
        if self.error_estimate < 0:
            raise ValueError("error estimate must be nonnegative")
        if self.evaluations < 1:
            raise ValueError("a result needs at least one evaluation")
        if self.converged and not math.isfinite(self.error_estimate):
            raise ValueError("converged result needs a finite error estimate")

    @property
    def upper(self):
        return self.value + self.error_estimate

    @property
    def lower(self):
        return self.value - self.error_estimate


def _combine(parts):
    value = math.fsum(p[0] for p in parts)
    err = math.fsum(p[1] for p in parts)
    evals = sum(p[2] for p in parts)
    ok = all(p[3] for p in parts)
    return QuadratureResult(value, err, max(evals, 1), ok)


def _kappa(sigma):
    if sigma >= 1:
        raise DomainError(f"integrand is not integrable (exponent {sigma} >= 1)")
    return max(2.0, 2.0 / (1.0 - sigma))


def _singular_params(curve, point):
    """Parameters where the curve passes through ``point`` (within 1e-12)."""
    hits = [t for t in curve.breakpoints if abs(curve.point(np.array([t]))[0] - point) < 1e-12]
    if hits:
        return hits
    t = np.linspace(0.0, curve.period, 4097)
    dist = np.abs(curve.point(t) - point)
    j = int(np.argmin(dist))
    if dist[j] > 1e-3:
        return []
    lo, hi = t[max(j - 1, 0)], t[min(j + 1, len(t) - 1)]
    res = minimize_scalar(lambda s: abs(complex(curve.point(np.array([s]))[0]) - point),
                          bounds=(lo, hi), method="bounded", options={"xatol": 1e-15})
    return [float(res.x)] if res.fun < 1e-12 else []


def _dyadic(t0, t1, toward_left, toward_right):
    """Geometric breakpoints accumulating at the flagged ends of ``[t0, t1]``."""
    pts = [t0, t1]
    length = t1 - t0
    for k in range(1, DYADIC_LEVELS + 1):
        step = length * 2.0 ** -k
        if toward_left and k > 1:
            pts.append(t0 + step)
        if toward_right and k > 1:
            pts.append(t1 - step)
    if toward_left or toward_right:
        pts.append(t0 + length / 2)
    return np.unique(pts)


def integrate_on_curve(field, curve, tol=None, budget=engine.DEFAULT_BUDGET,
                       singular=()):
    """``int_C field(z) |dz|`` for a nonnegative real ``field``.

    ``singular`` lists ``(point, sigma)`` with ``field = O(|z - point|^-sigma)``.
    Near such a point the parameter is graded as ``u^kappa`` down to a distance
    ``TAIL_DISTANCE``; the remaining sliver is integrated in closed form under
    the power law, with its relative error bounded by the neglected first-order
    term plus the rounding of the evaluation point.
    """
    tol = default_tol() if tol is None else tol

    def integrand(t):
        return np.asarray(field(curve.point(t)), dtype=float) * curve.speed(t)

    cuts = {float(t) for t in curve.breakpoints}
    sing_at = {}
    for point, sigma in singular:
        for t in _singular_params(curve, point):
            cuts.add(float(t))
            sing_at[float(t)] = max(sigma, sing_at.get(float(t), 0.0))
    cuts = sorted(cuts)

    regular_bp = []
    singular_pieces = []
    for t0, t1 in zip(cuts[:-1], cuts[1:]):
        left_s, right_s = sing_at.get(t0), sing_at.get(t1)
        if left_s is None and right_s is None:
            z0 = curve.point(np.array([t0]))[0]
            z1 = curve.point(np.array([t1]))[0]
            touch_l = not curve.closed and t0 == 0.0 and abs(z0) > 1 - 1e-12
            touch_r = not curve.closed and t1 == curve.period and abs(z1) > 1 - 1e-12
            regular_bp.append(_dyadic(t0, t1, touch_l, touch_r))
        else:
            singular_pieces.append((t0, t1, left_s, right_s))

    n_parts = (1 if regular_bp else 0) + 2 * len(singular_pieces)
    part_tol = tol / max(n_parts, 1)
    parts = []
    if regular_bp:
        bp = np.unique(np.concatenate(regular_bp))
        parts.append(engine.adaptive_gk(integrand, bp, part_tol, budget))

    for t0, t1, left_s, right_s in singular_pieces:
        mid = 0.5 * (t0 + t1)
        for anchor, direction, sigma in ((t0, 1.0, left_s), (t1, -1.0, right_s)):
            if sigma is None:
                lo, hi = (t0, mid) if direction > 0 else (mid, t1)
                parts.append(engine.adaptive_gk(integrand, [lo, hi], part_tol, budget))
                continue
            parts.append(_singular_half(integrand, curve, anchor, direction,
                                        mid - t0, sigma, part_tol, budget))
    return _combine(parts)


def _singular_half(integrand, curve, anchor, direction, length, sigma, tol, budget):
    kappa = _kappa(sigma)
    speed = float(curve.speed(np.array([anchor]))[0])
    eps = min(TAIL_DISTANCE / speed, 0.5 * length)
    u_eps = (eps / length) ** (1.0 / kappa)
    pulled = engine.graded(integrand, anchor, direction, length, kappa)
    value, err, evals, ok = engine.adaptive_gk(pulled, [u_eps, 1.0], tol, budget)
    g_eps = float(integrand(np.array([anchor + direction * eps]))[0])
    tail = g_eps * eps / (1.0 - sigma)
    delta = eps * speed
    tail_err = abs(tail) * (delta + 4 * sigma * np.finfo(float).eps / delta)
    return value + tail, err + tail_err, evals + 1, ok and math.isfinite(tail)


def _boundary_half(integrand, anchor, direction, length, kappa, tol, budget):
    """Graded integration toward a singular angle, plus a measured power-law tail.

    Closed-form traces stay accurate at angular offsets far below 1e-100, so
    the local exponent is read off the trace itself at offsets ``eps``,
    ``eps * 1e-50`` and ``eps * 1e-100``; the two estimates disagree only if
    the trace is not yet in its power-law regime.
    """
    eps = BOUNDARY_TAIL_OFFSET * length
    u_eps = BOUNDARY_TAIL_OFFSET ** (1.0 / kappa)
    pulled = engine.graded(integrand, anchor, direction, length, kappa)
    value, err, evals, ok = engine.adaptive_gk(pulled, np.linspace(u_eps, 1.0, 9),
                                               tol, budget)
    offsets = eps * np.array([1.0, 1e-50, 1e-100])
    g = np.asarray(integrand(anchor + direction * offsets), dtype=float)
    if np.all(g == 0):
        return value, err, evals + 3, ok
    with np.errstate(all="ignore"):
        s1 = -math.log(g[0] / g[1]) / math.log(1e50)
        s2 = -math.log(g[1] / g[2]) / math.log(1e50)
    if not (math.isfinite(s1) and math.isfinite(s2)) or s1 >= 1:
        return value, math.inf, evals + 3, False
    tail = g[0] * eps / (1.0 - s1)
    tail_err = abs(tail) * (abs(s1 - s2) / (1.0 - s1) + 1e-12)
    return value + tail, err + tail_err, evals + 3, ok


def contour_integral(f, p, curve, tol=None, budget=engine.DEFAULT_BUDGET):
    """``int_C |f(z)|^p |dz|``."""
    if p <= 0:
        raise DomainError("p must be positive")
    f = as_function(f)
    if curve.max_modulus() > 1 + 1e-12:
        raise DomainError("curve leaves the closed unit disk")
    singular = [(pt, p * s) for pt, s in f.singularities]

    def field(z):
        return np.abs(f(z)) ** p

    return integrate_on_curve(field, curve, tol, budget, singular)


def boundary_integral(trace, p, tol=None, budget=engine.DEFAULT_BUDGET):
    """``int_T |f|^p |dz|`` from a boundary trace.

    Smooth closed forms: trapezoid with grid doubling (adaptive fallback).
    Singular closed forms: each arc between singular angles is split in half
    and each half graded toward its singular end with ``kappa >= 2 / (1 - p s)``.
    Sample-only traces: trapezoid on the samples, checked against every
    other sample.
    """
    tol = default_tol() if tol is None else tol
    if p <= 0:
        raise DomainError("p must be positive")
    if trace.singular_angles:
        sigma = p * trace.exponent
        kappa = _kappa(sigma)

        def integrand(t):
            return np.abs(trace.func(t)) ** p

        angles = list(trace.singular_angles)
        parts = []
        part_tol = tol / (2 * len(angles))
        for i, a in enumerate(angles):
            b = angles[(i + 1) % len(angles)]
            span = (b - a) % (2 * math.pi) or 2 * math.pi
            # Approach ``b`` from below through its own representative, not
            # ``a + span``, so offsets stay exact near the singularity.
            for anchor, direction in ((a, 1.0), (b, -1.0)):
                parts.append(_boundary_half(integrand, anchor, direction, span / 2,
                                            kappa, part_tol, budget))
        return _combine(parts)

    if trace.func is not None:
        def integrand(t):
            return np.abs(trace.func(t)) ** p
        return _combine([engine.periodic_integral(integrand, tol=tol, budget=budget)])

    vals = np.abs(trace.values) ** p
    full = 2 * math.pi * math.fsum(vals) / trace.n
    half = 2 * math.pi * math.fsum(vals[::2]) / (trace.n // 2)
    err = abs(full - half)
    return QuadratureResult(full, err, trace.n, err <= tol * (1 + abs(full)))


def radial_integral(g, tol=None, budget=engine.DEFAULT_BUDGET):
    """``int_0^1 g(r) dr`` for a scalar function ``g``.

    Raises ``NumericalFailure`` when ``g`` is not finite at a node or the
    adaptive rule cannot reach ``tol``, typically from blow-up near ``r = 1``.
    """
    tol = default_tol() if tol is None else tol

    def vec(r):
        out = np.array([float(g(float(x))) for x in np.ravel(r)])
        if not np.all(np.isfinite(out)):
            raise NumericalFailure("radial integrand is not finite")
        return out

    res = _combine([engine.adaptive_gk(vec, np.linspace(0, 1, 5), tol, budget)])
    if not res.converged:
        raise NumericalFailure("radial integral did not converge",
                               value=res.value, error_estimate=res.error_estimate)
    return res


def _golden_max(func, lo, hi, tol=1e-12):
    """Vectorized golden-section maximization on brackets ``[lo_i, hi_i]``."""
    inv = (math.sqrt(5) - 1) / 2
    lo, hi = np.array(lo, dtype=float), np.array(hi, dtype=float)
    x1 = hi - inv * (hi - lo)
    x2 = lo + inv * (hi - lo)
    f1, f2 = func(x1), func(x2)
    while np.max(hi - lo) > tol:
        # Maximum lies in [x1, hi] where f1 < f2, else in [lo, x2].
        right = f1 < f2
        lo = np.where(right, x1, lo)
        hi = np.where(right, hi, x2)
        x_new = np.where(right, lo + inv * (hi - lo), hi - inv * (hi - lo))
        f_new = func(x_new)
        x1, x2 = np.where(right, x2, x_new), np.where(right, x_new, x1)
        f1, f2 = np.where(right, f2, f_new), np.where(right, f_new, f1)
    return np.maximum(f1, f2)


def circle_max(f, r, p, tol=1e-12):
    """``max_theta |f(r e^{i theta})|^p`` from a 512-node grid plus refinement.

    Every grid local maximum within a relative 1e-3 of the best node is
    polished by golden-section search on its two neighbouring cells. For
    trigonometric moduli of degree <= 64 the grid spacing 2 pi / 512 leaves at
    most a few nodes per oscillation, so no global peak can hide between
    nodes without a neighbouring node within that threshold (Bernstein-type
    bound; argued, not proven).
    """
    f = as_function(f)
    if not 0 <= r <= 1:
        raise DomainError("radius must lie in [0, 1]")
    if r == 0:
        return float(abs(complex(f(0j))) ** p)

    def mod(theta):
        return np.abs(f(r * np.exp(1j * theta)))

    n = CIRCLE_MAX_GRID
    step = 2 * math.pi / n
    theta = step * np.arange(n)
    vals = mod(theta)
    best = float(np.max(vals))
    if best == 0:
        return 0.0
    peaks = (vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1))
    peaks &= vals >= best * (1 - CIRCLE_MAX_REFINE)
    idx = np.nonzero(peaks)[0]
    refined = _golden_max(mod, theta[idx] - step, theta[idx] + step, tol)
    return float(max(best, float(np.max(refined)))) ** p


def oracle_integral(func, interval, n=1025):
    """Composite Simpson on ``n`` points with one Richardson step.

    A deliberately plain fixed-resolution rule, kept independent from the
    adaptive engines so tests can check one against the other.
    """
    if n < 9 or n % 2 == 0:
        raise DomainError("oracle needs an odd number of points >= 9")
    if (n - 1) % 4:
        n += 2
    a, b = interval
    x = np.linspace(a, b, n)
    y = np.asarray(func(x), dtype=float)
    h = (b - a) / (n - 1)
    fine = h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())
    yc = y[::2]
    hc = 2 * h
    coarse = hc / 3 * (yc[0] + yc[-1] + 4 * yc[1:-1:2].sum() + 2 * yc[2:-1:2].sum())
    return float(fine + (fine - coarse) / 15)


def oracle_contour(f, p, curve, n=4097):
    """Oracle version of ``contour_integral``: Simpson on each smooth piece."""
    f = as_function(f)
    bp = curve.breakpoints
    total = 0.0
    for t0, t1 in zip(bp[:-1], bp[1:]):
        # the velocity at a breakpoint belongs to the next piece; take the
        # limit from inside instead
        last = np.nextafter(t1, t0)

        def integrand(t, last=last):
            t = np.minimum(t, last)
            return np.abs(f(curve.point(t))) ** p * curve.speed(t)

        total += oracle_integral(integrand, (t0, t1), n)
    return total
