"""Searches for near-extremal functions and curves, and sharpness ladders.

Objectives are 0-homogeneous in the coefficients, so coefficient vectors are
projected onto the unit sphere before every evaluation. The optimizer is
Nelder-Mead from scipy, restarted from seeded random points.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
import math

import numpy as np
from scipy.optimize import minimize

from gabriel_lab import constants
from gabriel_lab.curves import DIAMETER, Circle, Polygon, convexity_check
from gabriel_lab.errors import DomainError, NumericalFailure
from gabriel_lab.harmonic import FunctionSpec, HarmonicSeries, as_function, boundary_trace
from gabriel_lab import inequalities
from gabriel_lab.quadrature import boundary_integral, contour_integral

POLYGON_VERTICES = 12
POLYGON_MAX_RADIUS = 0.95
RADIUS_CAP = 1 - 1e-12


def ratio(f, curve, p, tol=None):
    """``int_C |f|^p / int_T |f|^p``, or ``int_C |f|^p / (int_T |f|)^p`` for p < 1."""
    f = as_function(f)
    lhs = contour_integral(f, p, curve, tol)
    rhs = boundary_integral(boundary_trace(f), p if p >= 1 else 1.0, tol)
    if not (lhs.converged and rhs.converged):
        raise NumericalFailure("ratio quadrature did not converge",
                               value=(lhs.value, rhs.value))
    return lhs.value / (rhs.value if p >= 1 else rhs.value ** p)


@dataclass
class SearchConfig:
    """What to search over.

    ``theorem`` picks the constant: gabriel, main, frazer, circle or small_p.
    ``family``: constant, monomial (fixed degree ``degree``), analytic or
    harmonic (coefficient vectors of length ``degree + 1``).
    ``curves``: concentric, circle, polygon or diameter.
    """

    theorem: str = "main"
    p: float = 2.0
    family: str = "harmonic"
    degree: int = 8
    curves: str = "polygon"
    restarts: int = 8
    budget: int = 2000
    seed: int = 0
    tol: float = 1e-8

    def __post_init__(self):
        if self.budget < 1:
            raise DomainError("budget must be at least 1")
        if self.theorem not in ("gabriel", "main", "frazer", "circle", "small_p"):
            raise DomainError(f"unknown theorem {self.theorem!r}")
        if self.family not in ("constant", "monomial", "analytic", "harmonic"):
            raise DomainError(f"unknown family {self.family!r}")
        if self.curves not in ("concentric", "circle", "polygon", "diameter"):
            raise DomainError(f"unknown curve family {self.curves!r}")
        if self.theorem in ("frazer", "circle") and self.curves not in ("concentric", "circle"):
            raise DomainError(f"{self.theorem} needs circular curves")


def _sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x)) if x > -700 else 0.0


def _function_dim(cfg):
    if cfg.family in ("constant", "monomial"):
        return 0
    n = cfg.degree + 1
    return 2 * n if cfg.family == "analytic" else 4 * n - 2


def _curve_dim(cfg):
    return {"concentric": 1, "circle": 3, "polygon": 2 * POLYGON_VERTICES,
            "diameter": 0}[cfg.curves]


def project(x, cfg):
    """Put the coefficient block of ``x`` on the unit sphere."""
    x = np.array(x, dtype=float)
    k = _function_dim(cfg)
    if k:
        norm = np.linalg.norm(x[:k])
        if norm == 0:
            raise DomainError("zero coefficient vector")
        x[:k] /= norm
    return x


def decode_function(x, cfg):
    k = _function_dim(cfg)
    if cfg.family == "constant":
        return FunctionSpec.named("constant", c=1.0)
    if cfg.family == "monomial":
        return FunctionSpec.named("monomial", k=cfg.degree)
    v = x[:k]
    n = cfg.degree + 1
    a = v[:n] + 1j * v[n:2 * n]
    if cfg.family == "analytic":
        return FunctionSpec.from_series(HarmonicSeries(a))
    rest = v[2 * n:]
    b = np.concatenate([[0j], rest[: n - 1] + 1j * rest[n - 1:]])
    return FunctionSpec.from_series(HarmonicSeries(a, b))


def decode_curve(x, cfg):
    """Map unconstrained parameters to an admissible curve, or ``None``."""
    y = x[_function_dim(cfg):]
    if cfg.curves == "diameter":
        return DIAMETER
    if cfg.curves == "concentric":
        return Circle(0j, min(_sigmoid(y[0]), RADIUS_CAP))
    if cfg.curves == "circle":
        w = complex(y[0], y[1])
        c = 0j if w == 0 else w / abs(w) * 0.999 * math.tanh(abs(w))
        rho = (1 - abs(c)) * min(_sigmoid(y[2]), RADIUS_CAP)
        if rho <= 0:
            return None
        return Circle(c, rho)
    angles = np.sort(np.mod(y[:POLYGON_VERTICES], 2 * math.pi))
    radii = POLYGON_MAX_RADIUS * np.array([_sigmoid(v) for v in y[POLYGON_VERTICES:]])
    verts = radii * np.exp(1j * angles)
    if np.any(radii <= 1e-9) or np.any(np.diff(angles) <= 1e-9):
        return None
    if not convexity_check(verts, closed=True):
        return None
    return Polygon(tuple(verts))


def theorem_constant(cfg, curve):
    p = cfg.p
    if cfg.theorem == "gabriel":
        return constants.C_GABRIEL
    if cfg.theorem == "frazer":
        return constants.C_FRAZER
    if cfg.theorem == "main":
        return constants.c_main(p)
    if cfg.theorem == "small_p":
        return constants.a_small_p(p)
    return constants.c_circle(p, abs(curve.center))


def _objective(x, cfg, tol):
    """Ratio divided by the theorem constant, or ``None`` if inadmissible."""
    try:
        x = project(x, cfg)
        curve = decode_curve(x, cfg)
        if curve is None:
            return None
        f = decode_function(x, cfg)
        return ratio(f, curve, cfg.p, tol) / theorem_constant(cfg, curve)
    except (DomainError, NumericalFailure, FloatingPointError):
        return None


def _initial_point(rng, cfg):
    k = _function_dim(cfg)
    x = [rng.standard_normal(k)]
    if cfg.curves == "concentric":
        x.append(rng.normal(0.0, 1.0, 1))
    elif cfg.curves == "circle":
        x.append(rng.normal(0.0, 0.7, 3))
    elif cfg.curves == "polygon":
        # jittered regular polygon: convex, and a scale the simplex can move
        step = 2 * math.pi / POLYGON_VERTICES
        angles = (rng.uniform(0, step) + step * np.arange(POLYGON_VERTICES)
                  + rng.uniform(-0.25, 0.25, POLYGON_VERTICES) * step)
        radius = rng.normal(1.0, 0.5)
        x.append(np.concatenate([angles, np.full(POLYGON_VERTICES, radius)]))
    return np.concatenate(x)


@dataclass
class RestartResult:
    index: int
    params: list
    ratio: float
    evaluations: int
    exhausted: bool
    improvements: list = field(default_factory=list)


def run_restart(cfg, index):
    """One Nelder-Mead run from the ``index``-th seeded starting point."""
    rng = np.random.default_rng([cfg.seed, index])
    dim = _function_dim(cfg) + _curve_dim(cfg)
    per_restart = max(1, cfg.budget // cfg.restarts)
    x0 = _initial_point(rng, cfg)
    best = {"value": -math.inf, "x": x0}
    improvements = []
    count = [0]

    def fun(x):
        count[0] += 1
        val = _objective(x, cfg, cfg.tol)
        if val is None:
            return 1e6
        if val > best["value"]:
            best["value"], best["x"] = val, np.array(x)
            improvements.append((count[0], val))
        return -val

    if dim == 0:
        fun(x0)
        exhausted = False
    else:
        res = minimize(fun, x0, method="Nelder-Mead",
                       options={"maxfev": per_restart, "xatol": 1e-8, "fatol": 1e-12,
                                "adaptive": dim > 4})
        exhausted = not res.success
    x = project(best["x"], cfg) if math.isfinite(best["value"]) else best["x"]
    return RestartResult(index, [float(v) for v in x], best["value"],
                         count[0], exhausted, improvements)


@dataclass
class SearchResult:
    config: SearchConfig
    best_params: list
    best_ratio: float
    constant: float
    ratio_over_constant: float
    function: dict
    curve: dict
    trace: list
    budget_exhausted: bool
    evaluations: int
    counterexample: dict | None = None

    def to_dict(self):
        out = asdict(self)
        out["config"] = asdict(self.config)
        return out


def _verify(cfg, f, curve, tol):
    if cfg.theorem == "gabriel":
        return inequalities.verify_gabriel_analytic(f, cfg.p, curve, tol)
    if cfg.theorem == "frazer":
        return inequalities.verify_frazer(f, cfg.p, curve, tol)
    if cfg.theorem == "circle":
        return inequalities.verify_circle(f, cfg.p, curve, tol)
    if cfg.theorem == "small_p":
        return inequalities.verify_small_p(f, cfg.p, curve, tol)
    return inequalities.verify_main_convex(f, cfg.p, curve, tol)


def maximize_ratio(cfg, jobs=1):
    """Multi-start Nelder-Mead ascent of ratio / constant.

    The winner is re-verified at a hundredfold tighter tolerance; if that
    report fails outright, it is attached as a counterexample record.
    Ties between restarts are broken lexicographically on the parameters so
    the reduction does not depend on completion order.
    """
    indices = range(cfg.restarts)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_restart, [cfg] * cfg.restarts, indices))
    else:
        results = [run_restart(cfg, i) for i in indices]

    trace = []
    offset = 0
    running = -math.inf
    for res in results:
        for n, val in res.improvements:
            if val > running:
                running = val
                trace.append({"evaluation": offset + n, "restart": res.index,
                              "ratio_over_constant": val})
        offset += res.evaluations
    valid = [r for r in results if math.isfinite(r.ratio)]
    if not valid:
        raise NumericalFailure("no admissible configuration was evaluated")
    winner = max(valid, key=lambda r: (r.ratio, [-v for v in r.params]))
    x = np.array(winner.params)
    f = decode_function(x, cfg)
    curve = decode_curve(x, cfg)
    report = _verify(cfg, f, curve, cfg.tol / 100)
    const = report.constant
    counterexample = report.to_dict() if report.verdict == "fail" else None
    return SearchResult(
        config=cfg, best_params=winner.params, best_ratio=report.ratio * const, constant=const,
        ratio_over_constant=report.ratio,
        function=f.to_dict(), curve=curve.to_dict(), trace=trace,
        budget_exhausted=any(r.exhausted for r in results),
        evaluations=sum(r.evaluations for r in results),
        counterexample=counterexample)


def sharpness_study_rf(p, ladder, tol=None):
    """Diameter-to-circle ratio of ``Re (1 - rho^2 z^2)^{-1/p}`` along a rho ladder.

    ``fraction`` is the ratio divided by the Riesz-Fejer constant
    ``(1/2) sec^p(pi/2p)``; values approach 1 only as rho -> 1.
    """
    if p <= 1:
        raise DomainError("sharpness_study_rf needs p > 1")
    bound = constants.c_rf(p)
    rows = []
    for rho in ladder:
        if not 0 <= rho < 1:
            raise DomainError("rho values must lie in [0, 1)")
        if rho == 0:
            f = FunctionSpec.named("constant", c=1.0)
        else:
            f = FunctionSpec.named("rf_extremal", p=p, rho=rho)
        lhs = contour_integral(f, p, DIAMETER, tol)
        rhs = boundary_integral(boundary_trace(f), p, tol)
        r = lhs.value / rhs.value
        rows.append({"rho": float(rho), "lhs": lhs.value, "rhs_integral": rhs.value,
                     "ratio": r, "bound": bound, "fraction": r / bound,
                     "converged": lhs.converged and rhs.converged})
    return rows


def sharpness_study_circle(p, ladder, f=None, tol=None):
    """Concentric-circle ratios, which tend to 1 as the radius tends to 1."""
    if p < 2:
        raise DomainError("sharpness_study_circle needs p >= 2")
    f = FunctionSpec.named("constant", c=1.0) if f is None else as_function(f)
    rows = []
    rhs = boundary_integral(boundary_trace(f), p, tol)
    for rho in ladder:
        if not 0 < rho < 1:
            raise DomainError("rho values must lie in (0, 1)")
        lhs = contour_integral(f, p, Circle(0j, rho), tol)
        rows.append({"rho": float(rho), "lhs": lhs.value, "rhs_integral": rhs.value,
                     "ratio": lhs.value / rhs.value, "bound": 1.0,
                     "converged": lhs.converged and rhs.converged})
    return rows


RF_COLUMNS = ("rho", "lhs", "rhs_integral", "ratio", "bound", "fraction", "converged")
CIRCLE_COLUMNS = ("rho", "lhs", "rhs_integral", "ratio", "bound", "converged")
