"""Low-level vectorized integration engines shared by the public quadrature API.

Two engines live here:

* ``adaptive_gk`` -- adaptive Gauss-Kronrod (7/15) bisection on an interval.
  All panels that need refinement in a sweep are evaluated in one vectorized
  call, so the integrand must accept and return 1-D numpy arrays.
* ``periodic_trapezoid`` -- grid-doubling trapezoid rule for periodic
  integrands, which is spectrally accurate when the integrand is smooth.

Both return plain tuples ``(value, error, evaluations, converged)``; the
public wrappers turn these into ``QuadratureResult`` objects.
"""

import math

import numpy as np

DEFAULT_TOL = 1e-8
DEFAULT_BUDGET = 1_000_000

# Kronrod 15-point abscissae (positive half, descending) and weights, with the
# embedded 7-point Gauss weights on every other node.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes (+-0.949, +-0.742, +-0.406, 0).
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]


def gk15(func, left, right):
    """Apply the 7/15 pair on every panel ``[left[i], right[i]]`` at once.

    Returns Kronrod estimates and ``|K - G|`` error estimates per panel.
    """
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(func(x.ravel()), dtype=float).reshape(x.shape)
    kron = half * (fx @ KRONROD_WEIGHTS)
    gauss = half * (fx @ GAUSS_WEIGHTS)
    return kron, np.abs(kron - gauss)


def adaptive_gk(func, breakpoints, tol=DEFAULT_TOL, budget=DEFAULT_BUDGET,
                abs_tol=0.0, max_depth=60):
    """Adaptive bisection driven by the Gauss-Kronrod error estimate.

    Stops once the summed panel error is below ``tol * (1 + |value|)`` (or
    ``abs_tol`` if that is larger). A panel is split when its error exceeds its
    length-proportional share of that target. Panels are summed in order of
    their left endpoint, so results do not depend on refinement history.
    """
    bp = np.asarray(breakpoints, dtype=float)
    if bp.ndim != 1 or len(bp) < 2 or np.any(np.diff(bp) <= 0):
        raise ValueError("breakpoints must be strictly increasing")
    left, right = bp[:-1].copy(), bp[1:].copy()
    depth = np.zeros(len(left), dtype=int)
    span = bp[-1] - bp[0]
    with np.errstate(all="ignore"):
        vals, errs = gk15(func, left, right)
    evals = 15 * len(left)

    while True:
        order = np.argsort(left, kind="stable")
        left, right, vals, errs, depth = (
            left[order], right[order], vals[order], errs[order], depth[order])
        if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(errs))):
            return math.nan, math.inf, evals, False
        total = math.fsum(vals)
        err = math.fsum(errs)
        target = max(tol * (1.0 + abs(total)), abs_tol)
        if err <= target:
            return total, err, evals, True
        share = target * (right - left) / span
        split = (errs > share) & (depth < max_depth)
        if not np.any(split):
            # Cannot refine further: panels at maximum depth still too coarse.
            return total, err, evals, False
        if evals + 30 * int(split.sum()) > budget:
            return total, err, evals, False
        mid = 0.5 * (left[split] + right[split])
        new_left = np.concatenate([left[split], mid])
        new_right = np.concatenate([mid, right[split]])
        new_depth = np.concatenate([depth[split], depth[split]]) + 1
        with np.errstate(all="ignore"):
            new_vals, new_errs = gk15(func, new_left, new_right)
        evals += 15 * len(new_left)
        keep = ~split
        left = np.concatenate([left[keep], new_left])
        right = np.concatenate([right[keep], new_right])
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])
        depth = np.concatenate([depth[keep], new_depth])


def periodic_trapezoid(func, period=2 * math.pi, tol=DEFAULT_TOL, n0=64,
                       n_max=2 ** 16):
    """Trapezoid rule on ``[0, period)`` with grid doubling.

    Each doubling only evaluates the new midpoints. Converged when two
    consecutive refinements each agree within ``tol * (1 + |value|)``; the
    larger difference is reported as the error estimate. A single agreement
    is not enough: trapezoid errors oscillate in ``n``, so two levels can
    match by accident while both are off.
    """
    n = n0
    t = period * np.arange(n) / n
    total = math.fsum(np.asarray(func(t), dtype=float))
    estimate = period * total / n
    evals = n
    previous = math.inf
    while n < n_max:
        t_mid = period * (np.arange(n) + 0.5) / n
        total += math.fsum(np.asarray(func(t_mid), dtype=float))
        evals += n
        n *= 2
        new = period * total / n
        diff = abs(new - estimate)
        estimate = new
        if not math.isfinite(estimate):
            return estimate, math.inf, evals, False
        target = tol * (1.0 + abs(estimate))
        if diff <= target and previous <= target:
            return estimate, max(diff, previous), evals, True
        previous = diff
    return estimate, max(diff, previous), evals, False


def periodic_integral(func, period=2 * math.pi, tol=DEFAULT_TOL,
                      budget=DEFAULT_BUDGET):
    """Integrate a periodic function, falling back to adaptive Gauss-Kronrod.

    The trapezoid rule only converges geometrically for smooth integrands;
    kinks such as ``|Re f|^p`` at sign changes stall it, in which case the
    adaptive engine takes over on 64 initial panels.
    """
    value, err, evals, ok = periodic_trapezoid(func, period, tol)
    if ok:
        return value, err, evals, ok
    bp = np.linspace(0.0, period, 65)
    v2, e2, n2, ok2 = adaptive_gk(func, bp, tol=tol, budget=max(budget - evals, 0))
    return v2, e2, evals + n2, ok2


def graded(func, anchor, direction, length, kappa):
    """Pull back ``func`` through ``t = anchor + direction * length * u**kappa``.

    The returned integrand lives on ``u in [0, 1]`` and carries the Jacobian.
    Where ``u**kappa`` underflows the contribution is exactly zero, which
    avoids evaluating ``func`` at the singular anchor itself.
    """
    def pulled(u):
        u = np.asarray(u, dtype=float)
        s = u ** kappa
        jac = length * kappa * u ** (kappa - 1.0)
        out = np.zeros_like(u)
        live = (s > 0) & (jac > 0)
        if np.any(live):
            with np.errstate(all="ignore"):
                out[live] = np.asarray(func(anchor + direction * length * s[live]),
                                       dtype=float) * jac[live]
        return out

    return pulled
