"""One verifier per inequality: both sides, the constant, and a verdict.

Verdicts are conservative. A report *passes* when ``lhs + lhs_error <= rhs -
rhs_error``, *fails* when ``lhs - lhs_error > rhs + rhs_error``, and is
*inconclusive* in between or when a quadrature did not converge. The boolean
``passed`` is ``False`` only for outright failures (``None`` when quadrature
failed), so ``passed`` is true exactly when ``lhs - lhs_error <= rhs +
rhs_error``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

import gabriel_lab
from gabriel_lab import constants
from gabriel_lab.curves import DIAMETER, Circle
from gabriel_lab.errors import DomainError
from gabriel_lab.harmonic import (
    BoundaryTrace,
    FunctionSpec,
    HarmonicSeries,
    as_function,
    boundary_trace,
    conjugate,
    evaluate,
    is_real_valued,
    series_from_samples,
)
from gabriel_lab.quadrature import (
    QuadratureResult,
    boundary_integral,
    circle_max,
    contour_integral,
    default_tol,
    integrate_on_curve,
    radial_integral,
)

CSV_COLUMNS = ("theorem_id", "p", "curve", "lhs", "rhs", "ratio", "slack", "pass")


@dataclass
class InequalityReport:
    theorem_id: str
    p: float
    function: FunctionSpec | None
    curve: object
    lhs: float
    constant: float
    rhs_integral: float
    rhs: float
    lhs_error: float
    rhs_error: float
    converged: bool = True
    rhs_power: float = 1.0
    notes: str = ""
    extra: dict = field(default_factory=dict)
    sub_reports: list = field(default_factory=list)

    @property
    def ratio(self):
        return self.lhs / self.rhs if self.rhs > 0 else (0.0 if self.lhs == 0 else math.inf)

    @property
    def slack(self):
        return self.rhs - self.lhs

    @property
    def passed(self):
        if not self.converged:
            return None
        if self.sub_reports:
            subs = [s.passed for s in self.sub_reports]
            return None if None in subs else all(subs)
        return bool(self.lhs - self.lhs_error <= self.rhs + self.rhs_error)

    @property
    def verdict(self):
        if self.sub_reports:
            verdicts = {s.verdict for s in self.sub_reports}
            for v in ("fail", "inconclusive"):
                if v in verdicts:
                    return v
            return "pass"
        if self.passed is None:
            return "inconclusive"
        if not self.passed:
            return "fail"
        if self.lhs + self.lhs_error <= self.rhs - self.rhs_error:
            return "pass"
        return "inconclusive"

    @property
    def margin(self):
        """Slack left after charging both error estimates against it."""
        return self.slack - self.lhs_error - self.rhs_error

    def to_dict(self):
        out = {
            "theorem_id": self.theorem_id,
            "p": self.p,
            "function": self.function.to_dict() if self.function is not None else None,
            "curve": self.curve.to_dict() if self.curve is not None else None,
            "curve_label": self.curve.label() if self.curve is not None else "",
            "lhs": self.lhs,
            "constant": self.constant,
            "rhs_integral": self.rhs_integral,
            "rhs_power": self.rhs_power,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "slack": self.slack,
            "margin": self.margin,
            "pass": self.passed,
            "verdict": self.verdict,
            "lhs_error": self.lhs_error,
            "rhs_error": self.rhs_error,
            "converged": self.converged,
            "notes": self.notes,
            "version": gabriel_lab.__version__,
        }
        if self.extra:
            out["extra"] = self.extra
        if self.sub_reports:
            out["sub_reports"] = [s.to_dict() for s in self.sub_reports]
        return out

    def csv_row(self):
        curve = self.curve.label() if self.curve is not None else ""
        passed = "" if self.passed is None else str(self.passed).lower()
        return (self.theorem_id, repr(float(self.p)), curve, repr(float(self.lhs)),
                repr(float(self.rhs)), repr(float(self.ratio)),
                repr(float(self.slack)), passed)


ROUNDOFF = 16 * np.finfo(float).eps


def make_report(theorem_id, p, function, curve, lhs, constant, rhs_integral,
                rhs_power=1.0, notes="", extra=None):
    """Assemble a report from two ``QuadratureResult`` objects."""
    base = rhs_integral.value
    rhs = constant * base ** rhs_power
    lo = max(base - rhs_integral.error_estimate, 0.0)
    hi = base + rhs_integral.error_estimate
    rhs_error = constant * max(abs(hi ** rhs_power - base ** rhs_power),
                               abs(base ** rhs_power - lo ** rhs_power))
    # floor the error bars at a few ulps so exact equality cases do not fail on rounding
    lhs_error = max(lhs.error_estimate, ROUNDOFF * abs(lhs.value))
    rhs_error = max(rhs_error, ROUNDOFF * abs(rhs))
    return InequalityReport(
        theorem_id=theorem_id, p=float(p), function=function, curve=curve,
        lhs=lhs.value, constant=constant, rhs_integral=base, rhs=rhs,
        lhs_error=lhs_error, rhs_error=rhs_error,
        converged=lhs.converged and rhs_integral.converged,
        rhs_power=rhs_power, notes=notes, extra=extra or {})


def _unit(f):
    """Split a coefficient-backed ``f`` as ``scale * u`` with unit coefficient norm.

    Both sides of every inequality are homogeneous in ``f``, while the
    quadrature stopping rule is partly absolute; integrating ``u`` and
    rescaling keeps ratios independent of the size of ``f``.
    """
    ser = f.as_series
    if ser is None:
        return f, 1.0
    scale = math.sqrt(ser.l2_boundary_sum())
    if scale == 0 or scale == 1:
        return f, 1.0
    return FunctionSpec.from_series(HarmonicSeries(ser.a / scale, ser.b / scale)), scale


def _rescaled(res, factor):
    if factor == 1:
        return res
    return QuadratureResult(res.value * factor, res.error_estimate * factor,
                            res.evaluations, res.converged)


def _require_analytic(h, what):
    if not h.is_analytic:
        raise DomainError(f"{what} requires an analytic function (zero co-analytic part)")


def verify_gabriel_analytic(h, p, curve, tol=None):
    """Gabriel's bound for analytic ``h``: constant 2, any convex curve."""
    h = as_function(h)
    _require_analytic(h, "verify_gabriel_analytic")
    if p <= 0:
        raise DomainError("p must be positive")
    u, scale = _unit(h)
    lhs = _rescaled(contour_integral(u, p, curve, tol), scale ** p)
    rhs = _rescaled(boundary_integral(boundary_trace(u), p, tol), scale ** p)
    return make_report("gabriel", p, h, curve, lhs, constants.C_GABRIEL, rhs)


def verify_main_convex(f, p, curve, tol=None):
    """Harmonic Gabriel bound: constant 4 for ``p >= 2``, ``2 sec^p(pi/2p)`` below."""
    f = as_function(f)
    if p <= 1:
        raise DomainError("the main inequality needs p > 1")
    u, scale = _unit(f)
    lhs = _rescaled(contour_integral(u, p, curve, tol), scale ** p)
    rhs = _rescaled(boundary_integral(boundary_trace(u), p, tol), scale ** p)
    branch = "p>=2" if p >= 2 else "1<p<2"
    return make_report("main", p, f, curve, lhs, constants.c_main(p), rhs,
                       notes=f"branch {branch}")


def verify_riesz_fejer(f, p, tol=None):
    """Diameter integral against half ``sec^p(pi/2p)`` times the circle integral."""
    f = as_function(f)
    if p <= 1:
        raise DomainError("the harmonic Riesz-Fejer inequality needs p > 1")
    u, scale = _unit(f)
    lhs = _rescaled(contour_integral(u, p, DIAMETER, tol), scale ** p)
    rhs = _rescaled(boundary_integral(boundary_trace(u), p, tol), scale ** p)
    return make_report("riesz_fejer", p, f, DIAMETER, lhs, constants.c_rf(p), rhs)


def verify_small_p(f, p, curve, tol=None):
    """``int_C |f|^p <= A(p) (int_T |f|)^p`` for ``0 < p < 1``."""
    f = as_function(f)
    if not 0 < p < 1:
        raise DomainError("verify_small_p needs 0 < p < 1")
    u, scale = _unit(f)
    lhs = _rescaled(contour_integral(u, p, curve, tol), scale ** p)
    rhs = _rescaled(boundary_integral(boundary_trace(u), 1.0, tol), scale)
    if not math.isfinite(rhs.value):
        raise DomainError("boundary integral of |f| is not finite")
    return make_report("small_p", p, f, curve, lhs, constants.a_small_p(p), rhs,
                       rhs_power=p)


def verify_circle(f, p, curve, tol=None):
    """Circle case: constant 1 for ``p >= 2`` and ``1 + |center|`` for ``1 <= p < 2``.

    The ``1 <= p < 2`` bound is strict; it is checked as ``<=`` and the margin
    is kept in the report. Off-center circles with ``p >= 2`` are treated as
    an empirical check, so a failure there is recorded in full rather than
    suppressed.
    """
    f = as_function(f)
    if not isinstance(curve, Circle):
        raise DomainError("verify_circle needs a circle")
    if abs(curve.center) + curve.radius >= 1:
        raise DomainError("circle must lie strictly inside the disk")
    if p < 1:
        raise DomainError("verify_circle needs p >= 1")
    r = abs(curve.center)
    u, scale = _unit(f)
    lhs = _rescaled(contour_integral(u, p, curve, tol), scale ** p)
    rhs = _rescaled(boundary_integral(boundary_trace(u), p, tol), scale ** p)
    notes = "strict inequality; see margin" if p < 2 else ""
    if p >= 2 and r > 0:
        notes = "empirical: off-center circle with p >= 2"
    return make_report("circle", p, f, curve, lhs, constants.c_circle(p, r), rhs,
                       notes=notes)


def verify_frazer(h, p, curve, tol=None):
    """Analytic ``h`` on a circle: constant 1."""
    h = as_function(h)
    _require_analytic(h, "verify_frazer")
    if not isinstance(curve, Circle):
        raise DomainError("verify_frazer needs a circle")
    if p <= 0:
        raise DomainError("p must be positive")
    u, scale = _unit(h)
    lhs = _rescaled(contour_integral(u, p, curve, tol), scale ** p)
    rhs = _rescaled(boundary_integral(boundary_trace(u), p, tol), scale ** p)
    return make_report("frazer", p, h, curve, lhs, constants.C_FRAZER, rhs)


def _modulus_sum_trace(h, g):
    th, tg = boundary_trace(h), boundary_trace(g)
    angles = tuple(sorted(set(th.singular_angles) | set(tg.singular_angles)))

    def func(t):
        return (np.abs(h.on_circle(t)) + np.abs(g.on_circle(t))).astype(complex)

    return BoundaryTrace.from_function(func, 256, angles, max(th.exponent, tg.exponent))


def verify_lemma_sum(h, g, p, curve, tol=None):
    """``int_C (|h| + |g|)^p <= 2 int_T (|h| + |g|)^p`` for analytic ``h, g``."""
    h, g = as_function(h), as_function(g)
    _require_analytic(h, "verify_lemma_sum")
    _require_analytic(g, "verify_lemma_sum")
    if p <= 1:
        raise DomainError("verify_lemma_sum needs p > 1")

    def field(z):
        return (np.abs(h(z)) + np.abs(g(z))) ** p

    singular = [(pt, p * s) for pt, s in h.singularities + g.singularities]
    lhs = integrate_on_curve(field, curve, tol, singular=singular)
    rhs = boundary_integral(_modulus_sum_trace(h, g), p, tol)
    f = None
    if h.as_series is not None and g.as_series is not None:
        f = FunctionSpec.from_series(h.as_series.a, g.as_series.a)
    return make_report("lemma_sum", p, f if f is not None else h, curve, lhs,
                       constants.C_LEMMA_SUM, rhs, extra={"g": g.to_dict()})


def verify_kalaj(f, p, tol=None):
    """``int_T (|h|^2 + |g|^2)^{p/2} <= (1 - |cos(pi/p)|)^{-p/2} int_T |f|^p``."""
    series = f.as_series if isinstance(f, FunctionSpec) else f
    if not isinstance(series, HarmonicSeries):
        raise DomainError("verify_kalaj needs a coefficient series")
    if not series.normalized:
        raise DomainError("verify_kalaj needs a normalized series (b_0 = 0)")
    if p <= 1:
        raise DomainError("verify_kalaj needs p > 1")

    fs = FunctionSpec.from_series(series)
    u, scale = _unit(fs)
    unit = u.as_series

    def quad_sum(t):
        z = np.exp(1j * np.asarray(t, dtype=float))
        hz = evaluate(HarmonicSeries(unit.a), z)
        gz = evaluate(HarmonicSeries(unit.b), z)
        return np.sqrt(np.abs(hz) ** 2 + np.abs(gz) ** 2).astype(complex)

    lhs = _rescaled(boundary_integral(BoundaryTrace.from_function(quad_sum), p, tol),
                    scale ** p)
    rhs = _rescaled(boundary_integral(boundary_trace(u), p, tol), scale ** p)
    return make_report("kalaj", p, fs, None, lhs, constants.c_kalaj(p), rhs)


def real_series(u, n=1024):
    """Coefficient form of a real harmonic function given by series or samples."""
    u = as_function(u)
    if u.as_series is not None:
        ser = u.as_series
    elif u.kind == "poisson" and u.trace.values is not None:
        ser = series_from_samples(u.trace.values)
    else:
        raise DomainError("need a series or a sampled Poisson extension")
    if not is_real_valued(ser):
        raise DomainError("function is not real-valued")
    t = 2 * np.pi * np.arange(n) / n
    data = np.real(evaluate(ser, np.exp(1j * t)))
    if np.min(data) < -1e-12 * max(1.0, float(np.max(np.abs(data)))):
        raise DomainError("boundary data must be nonnegative")
    return ser


def verify_kolmogorov(u, p, tol=None):
    """Conjugate-function bound and Jensen companion for nonnegative ``U``.

    Sub-report ``kolmogorov_conjugate``: ``int_T |V|^p <= (2pi)^{1-p}
    sec(pi p / 2) (int_T U)^p``. Sub-report ``jensen``: ``int_T U^p <=
    (2pi)^{1-p} (int_T U)^p``. The report passes when both do.
    """
    if not 0 < p < 1:
        raise DomainError("verify_kolmogorov needs 0 < p < 1")
    u_spec = as_function(u)
    ser = real_series(u_spec)
    v = FunctionSpec.from_series(conjugate(ser))
    u_fs = FunctionSpec.from_series(ser)
    mass = boundary_integral(boundary_trace(u_fs), 1.0, tol)
    conj = make_report("kolmogorov_conjugate", p, v,
                       None, boundary_integral(boundary_trace(v), p, tol),
                       constants.c_kolmogorov(p), mass, rhs_power=p)
    jensen = make_report("jensen", p, u_fs, None,
                         boundary_integral(boundary_trace(u_fs), p, tol),
                         constants.c_jensen(p), mass, rhs_power=p)
    top = InequalityReport(
        theorem_id="kolmogorov", p=float(p), function=u_spec, curve=None,
        lhs=conj.lhs, constant=conj.constant, rhs_integral=conj.rhs_integral,
        rhs=conj.rhs, lhs_error=conj.lhs_error, rhs_error=conj.rhs_error,
        converged=conj.converged and jensen.converged, rhs_power=p,
        sub_reports=[conj, jensen])
    return top


def hilbert_form(a, b, theta):
    """The double sum of the Hilbert-type inequality, summed exactly."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = max(len(a), len(b))
    a = np.pad(a, (0, n - len(a)))
    b = np.pad(b, (0, n - len(b)))
    k = np.arange(n)
    denom = k[:, None] + k[None, :] + 1.0
    diff = np.cos((k[:, None] - k[None, :]) * theta / 2) / denom
    summ = np.cos((k[:, None] + k[None, :]) * theta / 2) / denom
    terms = ((np.outer(a, a) + np.outer(b, b)) * diff + 2 * np.outer(a, b) * summ)
    return math.fsum(terms.ravel()), math.fsum(np.abs(terms).ravel())


def verify_hilbert(a, b, theta):
    """Hilbert-type double series bound with constant ``2pi / (sin + cos)(theta/2)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not 0 <= theta < math.pi / 2:
        raise DomainError("theta must be an acute angle in [0, pi/2)")
    if np.any(~np.isfinite(a)) or np.any(~np.isfinite(b)):
        raise DomainError("sequences must be finite")
    if np.any(a < 0) or np.any(b < 0):
        raise DomainError("sequences must be nonnegative")
    lhs, scale = hilbert_form(a, b, theta)
    norm = math.fsum(a ** 2) + math.fsum(b ** 2)
    eps = np.finfo(float).eps
    n = max(len(a), len(b), 1)
    lhs_res = QuadratureResult(lhs, 4 * n * eps * scale, n * n, True)
    rhs_res = QuadratureResult(norm, 4 * n * eps * norm, n, True)
    return make_report("hilbert", 2.0, None, None, lhs_res,
                       constants.c_hilbert(theta), rhs_res,
                       extra={"theta": float(theta), "a": a.tolist(), "b": b.tolist()})


def verify_maximal(f, p, tol=None):
    """``int_0^1 max_{|z|=r} |f|^p dr <= int_T |f|^p |dz|`` for ``p >= 2``."""
    f = as_function(f)
    if p < 2:
        raise DomainError("verify_maximal needs p >= 2")
    if f.singularities:
        raise DomainError("verify_maximal needs f continuous on the closed disk")
    tol = default_tol() if tol is None else tol
    u, scale = _unit(f)
    lhs = _rescaled(radial_integral(lambda r: circle_max(u, r, p), tol), scale ** p)
    rhs = _rescaled(boundary_integral(boundary_trace(u), p, tol), scale ** p)
    return make_report("maximal", p, f, None, lhs, 1.0, rhs)


def blowup_study(p_grid, tol=None):
    """Cayley-power family on the diameter: how the mixed ratio blows up as p -> 1.

    For ``f = Re((1+z)/(1-z))^p`` the diameter integral is
    ``2 pi s / sin(pi s)`` with ``s = p^2`` and ``int_T |f| = 2 pi``; both are
    computed by quadrature and reported next to the closed forms.
    """
    rows = []
    for p in p_grid:
        if not 0 < p < 1:
            raise DomainError("blow-up grid must lie in (0, 1)")
        f = FunctionSpec.named("cayley_power", p=p)
        lhs = contour_integral(f, p, DIAMETER, tol)
        rhs = boundary_integral(boundary_trace(f), 1.0, tol)
        s = p * p
        lhs_exact = 2 * math.pi * s / math.sin(math.pi * s)
        ratio = lhs.value / rhs.value
        rows.append({
            "p": float(p),
            "lhs": lhs.value,
            "rhs_integral": rhs.value,
            "ratio": ratio,
            "ratio_over_sec": ratio / constants.sec(math.pi * p / 2),
            "lhs_exact": lhs_exact,
            "ratio_exact": lhs_exact / (2 * math.pi),
            "lhs_error": lhs.error_estimate,
            "rhs_error": rhs.error_estimate,
            "converged": lhs.converged and rhs.converged,
        })
    return rows


BLOWUP_COLUMNS = ("p", "lhs", "rhs_integral", "ratio", "ratio_over_sec",
                  "lhs_exact", "ratio_exact", "lhs_error", "rhs_error", "converged")
