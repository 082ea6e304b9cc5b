"""Complex-valued harmonic functions on the unit disk.

A harmonic ``f`` is stored through its decomposition ``f = h + conj(g)`` with
``h = sum a_k z^k`` and ``g = sum b_k z^k``. Named families with closed forms
(the Riesz-Fejer extremal, the Cayley power) are evaluated directly and never
truncated.
"""

from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np

from gabriel_lab import engine
from gabriel_lab.errors import DomainError, NumericalFailure

DEFAULT_DEGREE = 64
REAL_CHECK_RADIUS = 0.7
REAL_CHECK_POINTS = 64
REAL_CHECK_TOL = 1e-10


def _as_coeffs(values):
    arr = np.array([] if values is None else values, dtype=complex)
    if arr.ndim == 2 and arr.shape[1] == 2 and not np.iscomplexobj(values):
        arr = arr[:, 0] + 1j * arr[:, 1]
    arr = np.atleast_1d(arr).astype(complex).copy()
    if arr.ndim != 1:
        raise DomainError("coefficient sequences must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise DomainError("coefficients must be finite")
    arr.setflags(write=False)
    return arr


def horner(coeffs, z):
    """Evaluate ``sum coeffs[k] z^k`` by nested multiplication."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


@dataclass(frozen=True, eq=False)
class HarmonicSeries:
    """Truncated ``h + conj(g)`` with analytic coefficients ``a`` and ``b``."""

    a: np.ndarray
    b: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        object.__setattr__(self, "a", _as_coeffs(self.a))
        object.__setattr__(self, "b", _as_coeffs(self.b))

    @property
    def normalized(self):
        return len(self.b) == 0 or self.b[0] == 0

    @property
    def degree(self):
        return max(len(self.a), len(self.b), 1) - 1

    @property
    def is_analytic(self):
        return not np.any(self.b)

    def __call__(self, z):
        return evaluate(self, z)

    def analytic_part(self):
        return HarmonicSeries(self.a)

    def coanalytic_part(self):
        """``g`` itself, as an analytic series."""
        return HarmonicSeries(self.b)

    def scaled(self, factor):
        return HarmonicSeries(self.a * factor, self.b * np.conj(factor))

    def rotated(self, alpha):
        """Series of ``z -> f(e^{i alpha} z)``."""
        rot = np.exp(1j * alpha)
        return HarmonicSeries(self.a * rot ** np.arange(len(self.a)),
                              self.b * rot ** np.arange(len(self.b)))

    def l2_boundary_sum(self):
        """``sum |a_k|^2 + |b_k|^2``; equals ``(1/2pi) int_T |f|^2`` when normalized."""
        return float(np.sum(np.abs(self.a) ** 2) + np.sum(np.abs(self.b) ** 2))

    def to_dict(self):
        return {
            "kind": "series",
            "a": [[float(c.real), float(c.imag)] for c in self.a],
            "b": [[float(c.real), float(c.imag)] for c in self.b],
        }


def evaluate(f, z):
    """``h(z) + conj(g(z))`` for ``|z| <= 1``; accepts scalars or arrays."""
    z = np.asarray(z, dtype=complex)
    out = horner(f.a, z) + np.conj(horner(f.b, z))
    return out if out.ndim else complex(out)


def normalize(f):
    """Move ``conj(b_0)`` into ``a_0`` so that ``g(0) = 0``."""
    if f.normalized:
        return f
    a = np.array(f.a if len(f.a) else [0j], dtype=complex)
    b = np.array(f.b, dtype=complex)
    a[0] += np.conj(b[0])
    b[0] = 0
    return HarmonicSeries(a, b)


def is_real_valued(f, radius=REAL_CHECK_RADIUS, n=REAL_CHECK_POINTS,
                   tol=REAL_CHECK_TOL):
    z = radius * np.exp(2j * np.pi * np.arange(n) / n)
    return bool(np.max(np.abs(np.imag(evaluate(f, z)))) <= tol)


def conjugate(u):
    """Harmonic conjugate ``V`` of a real-valued series with ``V(0) = 0``.

    A real ``U`` has ``b_k = a_k`` for ``k >= 1``; then ``V`` has analytic and
    co-analytic coefficients ``-i a_k`` (zero at ``k = 0``).
    """
    if not is_real_valued(u):
        raise DomainError("harmonic conjugate requires a real-valued function")
    n = max(len(u.a), len(u.b))
    a = np.zeros(n, dtype=complex)
    a[: len(u.a)] = u.a
    c = -1j * a
    if n:
        c[0] = 0
    return HarmonicSeries(c, c.copy())


def series_from_samples(values):
    """Harmonic extension of the trigonometric interpolant of boundary samples.

    With ``c_k`` the discrete Fourier coefficients, the interpolant extends to
    ``sum_{k>=0} c_k z^k + sum_{k>=1} c_{-k} conj(z)^k``. The Nyquist term is
    split evenly between the two halves.
    """
    values = np.asarray(values, dtype=complex)
    n = len(values)
    c = np.fft.fft(values) / n
    half = n // 2
    a = c[: half + 1].copy()
    b = np.zeros(half + 1, dtype=complex)
    b[1:half] = np.conj(c[::-1][: half - 1])
    a[half] = c[half] / 2
    b[half] = np.conj(c[half] / 2)
    return HarmonicSeries(a, b)


@dataclass(frozen=True, eq=False)
class BoundaryTrace:
    """Values of ``f(e^{it})`` as samples, a closed form, or both.

    ``singular_angles`` lists where ``|f|`` blows up, with ``|f| = O(|t -
    angle|^{-exponent})`` nearby.
    """

    n: int
    values: np.ndarray | None = None
    func: object = None
    singular_angles: tuple = ()
    exponent: float = 0.0

    def __post_init__(self):
        n = int(self.n)
        if n < 4 or n & (n - 1):
            raise DomainError("trace sample count must be a power of two >= 4")
        object.__setattr__(self, "n", n)
        if self.values is None and self.func is None:
            raise DomainError("trace needs samples or a closed form")
        if self.values is not None:
            vals = np.asarray(self.values, dtype=complex).copy()
            if vals.shape != (n,):
                raise DomainError(f"expected {n} samples, got shape {vals.shape}")
            if not np.all(np.isfinite(vals)):
                raise DomainError("trace samples must be finite")
            vals.setflags(write=False)
            object.__setattr__(self, "values", vals)
        angles = tuple(sorted(float(a) for a in self.singular_angles))
        if any(not 0 <= a < 2 * math.pi for a in angles):
            raise DomainError("singular angles must lie in [0, 2pi)")
        if not 0 <= self.exponent < 1:
            raise DomainError("blow-up exponent must satisfy 0 <= s < 1")
        if angles and self.func is None:
            raise DomainError("singular traces need a closed-form evaluator")
        object.__setattr__(self, "singular_angles", angles)

    @property
    def angles(self):
        return 2 * math.pi * np.arange(self.n) / self.n

    @cached_property
    def interpolant(self):
        return series_from_samples(self.values)

    def at(self, t):
        """Trace value at angles ``t`` (closed form, else trig interpolation)."""
        t = np.asarray(t, dtype=float)
        if self.func is not None:
            return self.func(t)
        return evaluate(self.interpolant, np.exp(1j * t))

    @classmethod
    def from_function(cls, func, n=256, singular_angles=(), exponent=0.0):
        values = None
        if not singular_angles:
            values = func(2 * math.pi * np.arange(n) / n)
        return cls(n, values, func, tuple(singular_angles), exponent)


def poisson_extend(trace, z, tol=1e-8):
    """Poisson integral of the trace at points ``z`` with ``|z| < 1``.

    Sampled traces integrate the trigonometric interpolant exactly; the error
    estimate is the part of the result carried by the upper half of the
    spectrum, which is where aliasing lives. Closed-form traces use the
    trapezoid rule on the kernel with grid doubling.
    """
    z_arr = np.asarray(z, dtype=complex)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    r = np.abs(z_arr)
    if np.any(r >= 1):
        raise DomainError("poisson_extend requires |z| < 1")

    if trace.values is not None:
        ser = trace.interpolant
        value = evaluate(ser, z_arr)
        k0 = trace.n // 4
        rmax = float(np.max(r)) if len(r) else 0.0
        ks = np.arange(len(ser.a))
        upper = (np.sum(np.abs(ser.a[k0:]) * rmax ** ks[k0:])
                 + np.sum(np.abs(ser.b[k0:]) * rmax ** ks[k0:]))
        err = float(upper + trace.n * np.finfo(float).eps
                    * np.max(np.abs(trace.values)))
    else:
        theta = np.angle(z_arr)

        def kernel_sum(t):
            tt = t[:, None]
            ker = (1 - r ** 2) / (1 - 2 * r * np.cos(theta - tt) + r ** 2)
            return np.asarray(trace.func(t))[:, None] * ker

        n = 64
        t = 2 * np.pi * np.arange(n) / n
        acc = kernel_sum(t).sum(axis=0)
        value = acc / n
        err = previous = math.inf
        while n < 2 ** 16:
            t_mid = 2 * np.pi * (np.arange(n) + 0.5) / n
            acc = acc + kernel_sum(t_mid).sum(axis=0)
            n *= 2
            new = acc / n
            diff = float(np.max(np.abs(new - value)))
            err = max(diff, previous)
            value = new
            # two consecutive agreements, as trapezoid errors oscillate in n
            if err <= tol * (1 + float(np.max(np.abs(value)))):
                break
            previous = diff
    if err > tol * (1 + float(np.max(np.abs(value)))):
        raise NumericalFailure("Poisson integral did not converge",
                               value=value, error_estimate=err)
    return complex(value[0]) if scalar else value


# -- named families ---------------------------------------------------------

NAMED_FAMILIES = {
    "constant": {"c": "complex constant value, number or [re, im]"},
    "monomial": {"k": "integer degree >= 0",
                 "part": "'analytic' (z^k) or 'co-analytic' (conj(z)^k)"},
    "rf_extremal": {"p": "exponent > 1", "rho": "dilation in (0, 1)"},
    "cayley_power": {"p": "exponent in (0, 1)"},
    "half_plane": {"p": "exponent > 0"},
    "random_poly": {"seed": "integer seed", "N": "degree <= 64"},
}

NAMED_FORMULAS = {
    "constant": "f(z) = c",
    "monomial": "f(z) = z^k or conj(z)^k",
    "rf_extremal": "f(z) = Re (1 - rho^2 z^2)^(-1/p)",
    "cayley_power": "f(z) = Re ((1 + z)/(1 - z))^p",
    "half_plane": "f(z) = ((1 + z)/(1 - z))^p",
    "random_poly": "normalized harmonic polynomial with N(0,1) coefficient parts",
}


def _complex_param(value):
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return complex(value)


def random_series(rng, degree):
    """Normalized series with independent standard-normal coefficient parts."""
    a = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    b = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    b[0] = 0
    return HarmonicSeries(a, b)


def _cayley_ratio(z):
    return (1 + z) / (1 - z)


def _half_plane_trace(p):
    def trace(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            cot = 1.0 / np.tan(t / 2)
        # (1+e^{it})/(1-e^{it}) = i cot(t/2): argument +pi/2 when cot > 0.
        return np.abs(cot) ** p * np.exp(1j * np.sign(cot) * np.pi * p / 2)
    return trace


def _cayley_trace(p):
    scale = math.cos(math.pi * p / 2)

    def trace(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            cot = 1.0 / np.tan(t / 2)
        return (scale * np.abs(cot) ** p).astype(complex)
    return trace


@dataclass(frozen=True, eq=False)
class FunctionSpec:
    """A harmonic function by coefficients, by boundary data, or by name.

    Use the constructors ``from_series``, ``from_trace`` and ``named`` rather
    than the raw fields.
    """

    kind: str
    series: HarmonicSeries | None = None
    trace: BoundaryTrace | None = None
    name: str | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind == "series":
            if self.series is None:
                raise DomainError("series FunctionSpec needs coefficients")
        elif self.kind == "poisson":
            if self.trace is None:
                raise DomainError("poisson FunctionSpec needs a boundary trace")
        elif self.kind == "named":
            self._check_named()
        else:
            raise DomainError(f"unknown FunctionSpec kind {self.kind!r}")

    # construction --------------------------------------------------------

    @classmethod
    def from_series(cls, a, b=()):
        series = a if isinstance(a, HarmonicSeries) else HarmonicSeries(a, b)
        return cls("series", series=series)

    @classmethod
    def from_trace(cls, trace):
        return cls("poisson", trace=trace)

    @classmethod
    def named(cls, name, **params):
        return cls("named", name=name, params=dict(params))

    def _check_named(self):
        name, prm = self.name, self.params
        if name not in NAMED_FAMILIES:
            raise DomainError(f"unknown named function {name!r}")
        missing = set(NAMED_FAMILIES[name]) - set(prm)
        if name == "monomial":
            missing.discard("part")
        if missing:
            raise DomainError(f"{name} needs parameters {sorted(missing)}")
        if name == "rf_extremal":
            if not prm["p"] > 1 or not 0 < prm["rho"] < 1:
                raise DomainError("rf_extremal requires p > 1 and 0 < rho < 1")
        elif name == "cayley_power":
            if not 0 < prm["p"] < 1:
                raise DomainError("cayley_power requires 0 < p < 1")
        elif name == "half_plane":
            if not prm["p"] > 0:
                raise DomainError("half_plane requires p > 0")
        elif name == "monomial":
            if int(prm["k"]) != prm["k"] or prm["k"] < 0:
                raise DomainError("monomial degree must be a nonnegative integer")
            if prm.get("part", "analytic") not in ("analytic", "co-analytic"):
                raise DomainError("monomial part must be analytic or co-analytic")
        elif name == "random_poly":
            if not 0 <= int(prm["N"]) <= DEFAULT_DEGREE:
                raise DomainError("random_poly degree must be in [0, 64]")

    @cached_property
    def as_series(self):
        """Coefficient form when one exists exactly, else ``None``."""
        if self.kind == "series":
            return self.series
        if self.kind == "poisson":
            return None
        prm = self.params
        if self.name == "constant":
            return HarmonicSeries([_complex_param(prm["c"])])
        if self.name == "monomial":
            k = int(prm["k"])
            coeffs = np.zeros(k + 1, dtype=complex)
            coeffs[k] = 1
            if prm.get("part", "analytic") == "analytic":
                return HarmonicSeries(coeffs)
            return normalize(HarmonicSeries([0j], coeffs))
        if self.name == "random_poly":
            rng = np.random.default_rng(int(prm["seed"]))
            return random_series(rng, int(prm["N"]))
        return None

    # evaluation ------------------------------------------------------------

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.as_series is not None:
            return evaluate(self.as_series, z)
        if self.kind == "poisson":
            return self._poisson_eval(z)
        p = self.params["p"]
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.name == "rf_extremal":
                rho = self.params["rho"]
                out = ((1 - rho ** 2 * z ** 2) ** (-1.0 / p)).real.astype(complex)
            elif self.name == "cayley_power":
                out = (_cayley_ratio(z) ** p).real.astype(complex)
            else:  # half_plane
                out = _cayley_ratio(z) ** p
        return out if out.ndim else complex(out)

    def _poisson_eval(self, z):
        z = np.atleast_1d(z)
        r = np.abs(z)
        out = np.empty(z.shape, dtype=complex)
        inner = r < 1 - 1e-12
        if np.any(inner):
            out[inner] = poisson_extend(self.trace, z[inner])
        if np.any(~inner):
            out[~inner] = self.trace.at(np.angle(z[~inner]))
        return out

    def on_circle(self, t):
        """Boundary values ``f(e^{it})`` using closed forms where available."""
        t = np.asarray(t, dtype=float)
        if self.as_series is not None:
            return evaluate(self.as_series, np.exp(1j * t))
        if self.kind == "poisson":
            return self.trace.at(t)
        if self.name == "cayley_power":
            return _cayley_trace(self.params["p"])(t)
        if self.name == "half_plane":
            return _half_plane_trace(self.params["p"])(t)
        return self(np.exp(1j * t))

    @property
    def singularities(self):
        """``(point on T, exponent)`` pairs where ``|f|`` blows up."""
        if self.kind == "named" and self.name in ("cayley_power", "half_plane"):
            return ((1 + 0j, float(self.params["p"])),)
        if self.kind == "poisson":
            return tuple((complex(np.exp(1j * a)), self.trace.exponent)
                         for a in self.trace.singular_angles)
        return ()

    @property
    def is_analytic(self):
        ser = self.as_series
        if ser is not None:
            return ser.is_analytic
        return self.kind == "named" and self.name == "half_plane"

    def scaled(self, factor):
        """``factor * f``; only coefficient-backed functions support this."""
        ser = self.as_series
        if ser is None:
            raise DomainError("scaling needs a coefficient-backed function")
        return FunctionSpec.from_series(HarmonicSeries(ser.a * factor,
                                                       ser.b * np.conj(factor)))

    def label(self):
        if self.kind == "series":
            return f"series(deg={self.series.degree})"
        if self.kind == "poisson":
            return f"poisson(n={self.trace.n})"
        args = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.name}({args})"

    def to_dict(self):
        if self.kind == "series":
            return self.series.to_dict()
        if self.kind == "poisson":
            vals = self.trace.values
            if vals is None:
                raise DomainError("only sampled traces can be serialized")
            return {"kind": "poisson",
                    "values": [[float(v.real), float(v.imag)] for v in vals]}
        return {"kind": "named", "name": self.name, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, data):
        kind = data.get("kind")
        if kind == "series":
            return cls.from_series(data.get("a", []), data.get("b", []))
        if kind == "poisson":
            vals = np.asarray(data["values"], dtype=float)
            vals = vals[:, 0] + 1j * vals[:, 1]
            return cls.from_trace(BoundaryTrace(len(vals), vals))
        if kind == "named":
            return cls.named(data["name"], **data.get("params", {}))
        raise DomainError(f"unknown FunctionSpec kind {kind!r}")


def as_function(f):
    if isinstance(f, FunctionSpec):
        return f
    if isinstance(f, HarmonicSeries):
        return FunctionSpec.from_series(f)
    raise TypeError(f"expected FunctionSpec or HarmonicSeries, got {type(f).__name__}")


def boundary_trace(f, n=256):
    """Discretize the radial limit of ``f`` on the unit circle.

    The Cayley power has the closed form ``cos(pi p / 2) |cot(t/2)|^p``: on the
    circle ``(1 + e^{it}) / (1 - e^{it}) = i cot(t/2)``, whose principal
    argument is ``+-pi/2``, so the real part of its ``p``-th power is
    ``|cot(t/2)|^p cos(pi p / 2)`` on both half circles.
    """
    if isinstance(f, dict):
        f = FunctionSpec.from_dict(f)
    f = as_function(f)
    if f.kind == "named" and f.name in ("cayley_power", "half_plane"):
        p = f.params["p"]
        if p >= 1:
            raise DomainError(f"{f.name} trace is not integrable for p >= 1")
        func = _cayley_trace(p) if f.name == "cayley_power" else _half_plane_trace(p)
        return BoundaryTrace(n, None, func, (0.0,), p)
    if f.kind == "poisson" and f.trace.n == n:
        return f.trace
    return BoundaryTrace.from_function(f.on_circle, n)


def integral_mean(f, r, p, tol=1e-10):
    """``M_p(r, f) = ((1/2pi) int_0^{2pi} |f(r e^{it})|^p dt)^{1/p}``."""
    f = as_function(f)
    if not 0 <= r <= 1:
        raise DomainError("radius must lie in [0, 1]")
    if p <= 0:
        raise DomainError("p must be positive")
    if r == 1:
        from gabriel_lab.quadrature import boundary_integral
        res = boundary_integral(boundary_trace(f), p, tol)
        value, err, ok = res.value, res.error_estimate, res.converged
    else:
        def integrand(t):
            return np.abs(f(r * np.exp(1j * t))) ** p
        value, err, _, ok = engine.periodic_integral(integrand, tol=tol)
    if not ok:
        raise NumericalFailure("integral mean did not converge",
                               value=value, error_estimate=err)
    return (value / (2 * math.pi)) ** (1.0 / p)


def submean_defect(phi, z0, rho, m=256):
    """Circle average of ``phi`` around ``z0`` minus ``phi(z0)``.

    Nonnegative up to quadrature error when ``phi`` is subharmonic. A center
    value of ``-inf`` gives ``+inf``: the sub-mean-value property then holds
    trivially.
    """
    if m < 16:
        raise DomainError("need at least 16 sample points")
    if rho <= 0 or abs(z0) + rho >= 1:
        raise DomainError("the averaging disk must lie inside the unit disk")
    center = float(np.real(phi(np.asarray(z0, dtype=complex))))
    if center == -math.inf:
        return math.inf
    pts = z0 + rho * np.exp(2j * np.pi * np.arange(m) / m)
    vals = np.real(np.asarray(phi(pts), dtype=complex))
    return math.fsum(vals) / m - center
