"""Convex integration contours inside the closed unit disk."""

from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from gabriel_lab import engine
from gabriel_lab.errors import DomainError

CONVEXITY_RTOL = 1e-9
CONTAINMENT_SLACK = 1e-12


def _pt(value):
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return complex(value)


def _pair(z):
    return [float(z.real), float(z.imag)]


def convexity_check(points, closed):
    """True when the polyline through ``points`` turns consistently one way.

    Signed cross products of consecutive edges must all be ``>= -tol`` or all
    ``<= +tol``, with ``tol = 1e-9 * diameter**2``. Collinear vertices count as
    convex. Total turning is capped at ``2 pi`` for closed curves and ``pi``
    for open ones, which rules out loops that wind more than once.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    need = 3 if closed else 2
    if len(pts) < need:
        raise DomainError(f"need at least {need} points, got {len(pts)}")
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = pts[1:] != pts[:-1]
    pts = pts[keep]
    if closed and len(pts) > 1 and pts[0] == pts[-1]:
        pts = pts[:-1]
    if len(pts) < 2:
        return True
    diam = float(np.max(np.abs(pts[:, None] - pts[None, :])))
    tol = CONVEXITY_RTOL * diam ** 2
    edges = np.diff(np.append(pts, pts[0]) if closed else pts)
    if len(edges) < 2:
        return True
    e1 = edges
    e2 = np.roll(edges, -1) if closed else edges[1:]
    e1 = e1 if closed else edges[:-1]
    cross = (e1.real * e2.imag - e1.imag * e2.real)
    dot = (e1.real * e2.real + e1.imag * e2.imag)
    if not (np.all(cross >= -tol) or np.all(cross <= tol)):
        return False
    turning = abs(float(np.sum(np.arctan2(cross, dot))))
    limit = 2 * math.pi if closed else math.pi
    return turning <= limit + 1e-9


class Panel(NamedTuple):
    t0: float
    t1: float
    point: object
    speed: object


class ConvexCurve:
    """Common interface: a parameterization ``t -> z(t)`` on ``[0, period]``.

    ``breakpoints`` marks parameters where the curve may fail to be smooth
    (polygon vertices, spline nodes); quadrature never straddles them.
    """

    closed = True
    variant = ""

    @property
    def period(self):
        raise NotImplementedError

    @property
    def breakpoints(self):
        return np.array([0.0, self.period])

    def point(self, t):
        raise NotImplementedError

    def velocity(self, t):
        raise NotImplementedError

    def speed(self, t):
        return np.abs(self.velocity(t))

    def sample(self, n=1024):
        t = np.linspace(0.0, self.period, n, endpoint=not self.closed)
        return self.point(t)

    def max_modulus(self):
        """Largest ``|z|`` on the curve, by dense sampling plus local refinement."""
        t = np.linspace(0.0, self.period, 4097)
        mods = np.abs(self.point(t))
        j = int(np.argmax(mods))
        lo, hi = t[max(j - 1, 0)], t[min(j + 1, len(t) - 1)]
        best = float(mods[j])
        if hi > lo:
            res = minimize_scalar(lambda s: -abs(complex(self.point(np.array([s]))[0])),
                                  bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-13})
            best = max(best, -float(res.fun))
        return best

    def length(self):
        return math.fsum(_panel_length(pan) for pan in arc_panels(self, math.inf))

    def rotated(self, alpha):
        raise NotImplementedError

    def _validate_inside(self):
        if self.max_modulus() > 1 + CONTAINMENT_SLACK:
            raise DomainError(f"{self.variant} leaves the closed unit disk")

    def label(self):
        return self.variant

    @staticmethod
    def from_dict(data):
        variant = data.get("variant")
        if variant == "circle":
            return Circle(_pt(data["center"]), float(data["radius"]))
        if variant == "segment":
            return Segment(_pt(data["a"]), _pt(data["b"]))
        if variant == "polygon":
            return Polygon(tuple(_pt(v) for v in data["vertices"]))
        if variant == "ellipse":
            axes = data["semi_axes"]
            return Ellipse(_pt(data["center"]), float(axes[0]), float(axes[1]),
                           float(data.get("rotation", 0.0)))
        if variant == "parametric":
            return Parametric(tuple(_pt(v) for v in data["nodes"]),
                              bool(data.get("closed", True)))
        raise DomainError(f"unknown curve variant {variant!r}")


@dataclass(frozen=True)
class Circle(ConvexCurve):
    center: complex
    radius: float
    variant = "circle"

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not self.radius > 0:
            raise DomainError("circle radius must be positive")
        if abs(self.center) + self.radius > 1 + CONTAINMENT_SLACK:
            raise DomainError("circle must satisfy radius + |center| <= 1")

    @property
    def period(self):
        return 2 * math.pi

    def point(self, t):
        return self.center + self.radius * np.exp(1j * np.asarray(t, dtype=float))

    def velocity(self, t):
        return 1j * self.radius * np.exp(1j * np.asarray(t, dtype=float))

    def speed(self, t):
        return np.full(np.shape(t), self.radius)

    def max_modulus(self):
        return abs(self.center) + self.radius

    def length(self):
        return 2 * math.pi * self.radius

    def rotated(self, alpha):
        return Circle(self.center * np.exp(1j * alpha), self.radius)

    def to_dict(self):
        return {"variant": "circle", "center": _pair(self.center),
                "radius": float(self.radius)}

    def label(self):
        return f"circle(c={self.center.real:.4g}{self.center.imag:+.4g}j,r={self.radius:.4g})"


@dataclass(frozen=True)
class Segment(ConvexCurve):
    a: complex
    b: complex
    variant = "segment"
    closed = False

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        if self.a == self.b:
            raise DomainError("segment endpoints must differ")
        if max(abs(self.a), abs(self.b)) > 1 + CONTAINMENT_SLACK:
            raise DomainError("segment leaves the closed unit disk")

    @property
    def period(self):
        return 1.0

    def point(self, t):
        return self.a + (self.b - self.a) * np.asarray(t, dtype=float)

    def velocity(self, t):
        return np.full(np.shape(t), self.b - self.a, dtype=complex)

    def max_modulus(self):
        return max(abs(self.a), abs(self.b))

    def length(self):
        return abs(self.b - self.a)

    def rotated(self, alpha):
        rot = np.exp(1j * alpha)
        return Segment(self.a * rot, self.b * rot)

    def to_dict(self):
        return {"variant": "segment", "a": _pair(self.a), "b": _pair(self.b)}

    def label(self):
        if self.a == -1 and self.b == 1:
            return "diameter"
        return f"segment({self.a:.4g},{self.b:.4g})"


@dataclass(frozen=True)
class Polygon(ConvexCurve):
    """Closed convex polygon; clockwise input is reoriented."""

    vertices: tuple
    variant = "polygon"

    def __post_init__(self):
        verts = np.array([complex(v) for v in self.vertices])
        if len(verts) < 3:
            raise DomainError("polygon needs at least 3 vertices")
        if not convexity_check(verts, closed=True):
            raise DomainError("polygon is not convex")
        area = 0.5 * np.sum(verts.real * np.roll(verts.imag, -1)
                            - np.roll(verts.real, -1) * verts.imag)
        if area < 0:
            verts = verts[::-1]
        object.__setattr__(self, "vertices", tuple(complex(v) for v in verts))
        if np.max(np.abs(verts)) > 1 + CONTAINMENT_SLACK:
            raise DomainError("polygon leaves the closed unit disk")

    @property
    def _verts(self):
        return np.array(self.vertices + self.vertices[:1])

    @property
    def period(self):
        return float(len(self.vertices))

    @property
    def breakpoints(self):
        return np.arange(len(self.vertices) + 1, dtype=float)

    def _edge(self, t):
        t = np.asarray(t, dtype=float)
        k = np.clip(np.floor(t).astype(int), 0, len(self.vertices) - 1)
        return k, t - k

    def point(self, t):
        v = self._verts
        k, s = self._edge(t)
        return v[k] + (v[k + 1] - v[k]) * s

    def velocity(self, t):
        v = self._verts
        k, _ = self._edge(t)
        return v[k + 1] - v[k]

    def max_modulus(self):
        return float(np.max(np.abs(self._verts)))

    def length(self):
        return math.fsum(np.abs(np.diff(self._verts)))

    def edges(self):
        v = self.vertices + self.vertices[:1]
        return [Segment(v[i], v[i + 1]) for i in range(len(self.vertices))]

    def rotated(self, alpha):
        rot = np.exp(1j * alpha)
        return Polygon(tuple(v * rot for v in self.vertices))

    def to_dict(self):
        return {"variant": "polygon", "vertices": [_pair(v) for v in self.vertices]}

    def label(self):
        return f"polygon(n={len(self.vertices)})"


@dataclass(frozen=True)
class Ellipse(ConvexCurve):
    center: complex
    alpha: float
    beta: float
    rotation: float = 0.0
    variant = "ellipse"

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not (self.alpha > 0 and self.beta > 0):
            raise DomainError("ellipse semi-axes must be positive")
        self._validate_inside()

    @property
    def period(self):
        return 2 * math.pi

    def point(self, t):
        t = np.asarray(t, dtype=float)
        local = self.alpha * np.cos(t) + 1j * self.beta * np.sin(t)
        return self.center + np.exp(1j * self.rotation) * local

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        local = -self.alpha * np.sin(t) + 1j * self.beta * np.cos(t)
        return np.exp(1j * self.rotation) * local

    def rotated(self, alpha):
        return Ellipse(self.center * np.exp(1j * alpha), self.alpha, self.beta,
                       self.rotation + alpha)

    def to_dict(self):
        return {"variant": "ellipse", "center": _pair(self.center),
                "semi_axes": [float(self.alpha), float(self.beta)],
                "rotation": float(self.rotation)}

    def label(self):
        return f"ellipse(a={self.alpha:.4g},b={self.beta:.4g})"


@dataclass(frozen=True)
class Parametric(ConvexCurve):
    """Catmull-Rom spline through ``nodes``; convexity is checked on the nodes."""

    nodes: tuple
    closed: bool = True
    variant = "parametric"

    def __post_init__(self):
        nodes = tuple(complex(v) for v in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if len(nodes) < (3 if self.closed else 2):
            raise DomainError("too few spline nodes")
        if not convexity_check(np.array(nodes), self.closed):
            raise DomainError("spline nodes are not in convex position")
        self._validate_inside()

    @property
    def period(self):
        return float(len(self.nodes) if self.closed else len(self.nodes) - 1)

    @property
    def breakpoints(self):
        return np.arange(int(self.period) + 1, dtype=float)

    def _controls(self):
        p = np.array(self.nodes)
        if self.closed:
            return np.concatenate([p[-1:], p, p[:2]])
        return np.concatenate([[2 * p[0] - p[1]], p, [2 * p[-1] - p[-2]]])

    def _coeffs(self, t):
        c = self._controls()
        t = np.asarray(t, dtype=float)
        k = np.clip(np.floor(t).astype(int), 0, int(self.period) - 1)
        s = t - k
        p0, p1, p2, p3 = c[k], c[k + 1], c[k + 2], c[k + 3]
        return s, (2 * p1, p2 - p0, 2 * p0 - 5 * p1 + 4 * p2 - p3,
                   -p0 + 3 * p1 - 3 * p2 + p3)

    def point(self, t):
        s, (c0, c1, c2, c3) = self._coeffs(t)
        return 0.5 * (c0 + s * (c1 + s * (c2 + s * c3)))

    def velocity(self, t):
        s, (_, c1, c2, c3) = self._coeffs(t)
        return 0.5 * (c1 + s * (2 * c2 + 3 * s * c3))

    def rotated(self, alpha):
        rot = np.exp(1j * alpha)
        return Parametric(tuple(v * rot for v in self.nodes), self.closed)

    def to_dict(self):
        return {"variant": "parametric", "nodes": [_pair(v) for v in self.nodes],
                "closed": bool(self.closed)}

    def label(self):
        return f"parametric(n={len(self.nodes)})"


UNIT_CIRCLE = Circle(0j, 1.0)
DIAMETER = Segment(-1 + 0j, 1 + 0j)


def _panel_length(panel):
    val, _ = engine.gk15(panel.speed, [panel.t0], [panel.t1])
    return float(val[0])


def arc_panels(curve, max_length=0.25):
    """Split the curve into panels of arc length at most ``max_length``.

    Panels never straddle a breakpoint and together cover the parameter
    domain exactly once. Arc length per panel is measured with a 15-point
    Kronrod rule after an initial fine split of each smooth piece.
    """
    panels = []
    bp = curve.breakpoints
    for t0, t1 in zip(bp[:-1], bp[1:]):
        fine = np.linspace(t0, t1, 17)
        lens, _ = engine.gk15(curve.speed, fine[:-1], fine[1:])
        piece = float(np.sum(lens))
        count = 1
        if math.isfinite(max_length):
            # 5% headroom absorbs the linear interpolation of the cut points
            count = max(1, math.ceil(piece / (0.95 * max_length) - 1e-12))
        # Split at equal arc length so no panel exceeds the budget.
        cum = np.concatenate([[0.0], np.cumsum(lens)])
        targets = piece * np.arange(1, count) / count
        cuts = np.interp(targets, cum, fine)
        edges = np.concatenate([[t0], cuts, [t1]])
        for a, b in zip(edges[:-1], edges[1:]):
            panels.append(Panel(float(a), float(b), curve.point, curve.speed))
    return panels


def containment_margin(curve):
    """``1 - max |z|`` over the curve; zero exactly when it touches the circle."""
    return 1.0 - curve.max_modulus()


def regular_polygon(n, radius, center=0j, phase=0.0):
    angles = phase + 2 * math.pi * np.arange(n) / n
    return Polygon(tuple(center + radius * np.exp(1j * angles)))
