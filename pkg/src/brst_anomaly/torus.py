"""Action-angle geometry of the energy surface.

The image of the energy surface in the action plane is the arc of the
curve ``H(s1, s2) = E`` inside the closed first quadrant.  For a positive
definite quadratic part the curve is an ellipse around the origin, so it is
star-shaped and every ray from the origin meets it once; the arc is
parametrized by the polar angle ``theta`` in ``[0, pi/2]``.

Angles follow ``x_i = sqrt(2 s_i) cos(phi_i)``, ``p_i = sqrt(2 s_i) sin(phi_i)``,
for which ``{s_i, phi_i} = +1`` and ``{H, phi_i} = Omega_i``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Literal, Optional

import numpy as np

from .system import ConstraintSystem

Resonance = Optional[Literal["Omega1Zero", "Omega2Zero"]]

RESONANCE_TOL = 1e-10
FREQUENCY_MARGIN = 1e-6
BOUNDARY_TOL = 1e-10


@dataclass(frozen=True)
class ActionPoint:
    s1: float
    s2: float

    def __post_init__(self):
        if self.s1 < 0 or self.s2 < 0:
            raise ValueError(f"actions must be nonnegative, got ({self.s1}, {self.s2})")


@dataclass(frozen=True)
class TorusSpec:
    point: ActionPoint
    Omega1: float
    Omega2: float
    resonance: Resonance = None
    label: str = ""

    @property
    def rotating_index(self) -> int:
        """Index (0 or 1) of the angle that moves along the closed orbits."""
        if self.resonance == "Omega1Zero":
            return 1
        if self.resonance == "Omega2Zero":
            return 0
        raise ValueError("non-resonant torus has no closed-orbit direction")

    @property
    def rotating_frequency(self) -> float:
        return self.Omega2 if self.resonance == "Omega1Zero" else self.Omega1

    @property
    def period(self) -> float:
        return 2 * math.pi / abs(self.rotating_frequency)

    def to_dict(self) -> dict:
        return {"label": self.label, "s1": self.point.s1, "s2": self.point.s2,
                "Omega1": self.Omega1, "Omega2": self.Omega2, "resonance": self.resonance}


def angle_to_canonical(point: ActionPoint | tuple[float, float], phi1, phi2) -> np.ndarray:
    """Map action-angle coordinates to ``(x1, p1, x2, p2)``.

    Angles may be arrays; the result then has shape ``(..., 4)``.
    """
    s1, s2 = (point.s1, point.s2) if isinstance(point, ActionPoint) else point
    if s1 < 0 or s2 < 0:
        raise ValueError("actions must be nonnegative")
    r1, r2 = math.sqrt(2 * s1), math.sqrt(2 * s2)
    phi1, phi2 = np.broadcast_arrays(np.asarray(phi1, dtype=float), np.asarray(phi2, dtype=float))
    return np.stack([r1 * np.cos(phi1), r1 * np.sin(phi1), r2 * np.cos(phi2), r2 * np.sin(phi2)], axis=-1)


def canonical_to_action_angle(z) -> np.ndarray:
    """Inverse map: ``(s1, phi1, s2, phi2)``."""
    z = np.asarray(z, dtype=float)
    x1, p1, x2, p2 = z[..., 0], z[..., 1], z[..., 2], z[..., 3]
    return np.stack([0.5 * (x1 ** 2 + p1 ** 2), np.arctan2(p1, x1),
                     0.5 * (x2 ** 2 + p2 ** 2), np.arctan2(p2, x2)], axis=-1)


def frequencies(sys: ConstraintSystem, point: ActionPoint) -> tuple[float, float]:
    return sys.frequencies(point.s1, point.s2)


# -- the energy curve in the action plane ------------------------------------

def radius(sys: ConstraintSystem, theta):
    """Distance from the origin to the curve ``H = E`` along direction ``theta``."""
    sys.require_elliptic()
    u1, u2 = np.cos(theta), np.sin(theta)
    lin = sys.omega1 * u1 + sys.omega2 * u2
    quad = sys.a * u1 ** 2 + sys.b * u2 ** 2 + 2 * sys.c * u1 * u2
    with np.errstate(divide="ignore", invalid="ignore"):
        root = np.sqrt(lin ** 2 + 4 * quad * sys.E)
        # stable form of (-lin + root) / (2 quad), also valid for quad == 0
        r = 2 * sys.E / (lin + root)
    return r


def ellipse_points(sys: ConstraintSystem, n: int, physical: bool = True) -> np.ndarray:
    """``n`` points ``(s1, s2)`` on the physical arc (or the full closed curve)."""
    if n < 2:
        raise ValueError("need at least 2 samples")
    if physical:
        theta = np.linspace(0.0, math.pi / 2, n)
    else:
        if sys.is_unperturbed:
            raise ValueError("the unperturbed constraint is a line, not a closed curve")
        theta = np.linspace(0.0, 2 * math.pi, n)
    r = radius(sys, theta)
    pts = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)
    if physical:
        pts[0, 1] = 0.0
        pts[-1, 0] = 0.0
    return pts


def arc_endpoints(sys: ConstraintSystem) -> tuple[ActionPoint, ActionPoint]:
    """Arc ends on the axes: ``(s1_max_on_axis, 0)`` and ``(0, s2_max_on_axis)``."""
    r0 = float(radius(sys, 0.0))
    r1 = float(radius(sys, math.pi / 2))
    return ActionPoint(r0, 0.0), ActionPoint(0.0, r1)


def resonance_line(sys: ConstraintSystem, which: int, s1_range: tuple[float, float], n: int) -> np.ndarray:
    """Points of ``Omega_which = 0`` with ``s1`` (or ``s2``) spanning ``s1_range``.

    The line ``Omega1 = 0`` is ``2a s1 + 2c s2 = -omega1``; ``Omega2 = 0`` is
    ``2c s1 + 2b s2 = -omega2``.
    """
    if which == 1:
        p, q, r = 2 * sys.a, 2 * sys.c, -sys.omega1
    elif which == 2:
        p, q, r = 2 * sys.c, 2 * sys.b, -sys.omega2
    else:
        raise ValueError("which must be 1 or 2")
    t = np.linspace(*s1_range, n)
    if q != 0:
        return np.stack([t, (r - p * t) / q], axis=-1)
    if p != 0:
        return np.stack([np.full(n, r / p), t], axis=-1)
    return np.zeros((0, 2))


def _line_ellipse(sys: ConstraintSystem, normal: tuple[float, float], offset: float) -> list[tuple[float, float]]:
    """Intersections of ``normal . s = offset`` with ``H(s) = E``."""
    n1, n2 = normal
    nn = n1 * n1 + n2 * n2
    if nn == 0:
        return []
    s0 = (offset * n1 / nn, offset * n2 / nn)
    norm = math.sqrt(nn)
    u = (-n2 / norm, n1 / norm)
    quad = sys.a * u[0] ** 2 + sys.b * u[1] ** 2 + 2 * sys.c * u[0] * u[1]
    g1, g2 = sys.frequencies(*s0)
    lin = g1 * u[0] + g2 * u[1]
    const = sys.energy(*s0) - sys.E
    if quad == 0:
        if lin == 0:
            return []
        ts = [-const / lin]
    else:
        disc = lin * lin - 4 * quad * const
        if disc < 0:
            return []
        sq = math.sqrt(disc)
        # numerically stable pair of roots
        qq = -0.5 * (lin + math.copysign(sq, lin))
        ts = [qq / quad, const / qq] if qq != 0 else [0.0]
    return [(s0[0] + t * u[0], s0[1] + t * u[1]) for t in ts]


def find_resonant_tori(sys: ConstraintSystem, margin: float = FREQUENCY_MARGIN) -> list[TorusSpec]:
    """Maximal tori ``T1`` (``Omega2 = 0``) and ``T2`` (``Omega1 = 0``) inside the open first quadrant."""
    sys.require_elliptic()
    if sys.is_unperturbed:
        return []
    found = []
    for label, resonance, normal, offset in (
        ("T1", "Omega2Zero", (2 * sys.c, 2 * sys.b), -sys.omega2),
        ("T2", "Omega1Zero", (2 * sys.a, 2 * sys.c), -sys.omega1),
    ):
        for s1, s2 in _line_ellipse(sys, normal, offset):
            if s1 <= 0 or s2 <= 0:
                continue
            o1, o2 = sys.frequencies(s1, s2)
            zero, other = (o2, o1) if resonance == "Omega2Zero" else (o1, o2)
            if abs(sys.energy(s1, s2) - sys.E) >= RESONANCE_TOL:
                continue
            if abs(zero) >= RESONANCE_TOL or abs(other) <= margin:
                continue
            found.append(TorusSpec(ActionPoint(s1, s2), o1, o2, resonance, label))
    return found


def sample_sigma(sys: ConstraintSystem, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` random canonical points on the energy surface."""
    theta = rng.uniform(0.0, math.pi / 2, n)
    r = radius(sys, theta)
    s1, s2 = r * np.cos(theta), r * np.sin(theta)
    phi = rng.uniform(0.0, 2 * math.pi, (n, 2))
    r1, r2 = np.sqrt(2 * s1), np.sqrt(2 * s2)
    return np.stack([r1 * np.cos(phi[:, 0]), r1 * np.sin(phi[:, 0]),
                     r2 * np.cos(phi[:, 1]), r2 * np.sin(phi[:, 1])], axis=-1)


def gradient_norms(sys: ConstraintSystem, points: np.ndarray) -> np.ndarray:
    """``|grad H|`` at canonical points (regularity of the energy surface)."""
    return np.linalg.norm(sys.hamiltonian_vector_field(points), axis=-1)


# -- dynamics ---------------------------------------------------------------------

def integrate_orbit(sys: ConstraintSystem, start, duration: float, steps: int) -> np.ndarray:
    """Fixed-step RK4 integration of the flow of ``{H, -}``.

    Returns an array of shape ``(steps + 1, 5)`` with columns ``t, x1, p1, x2, p2``.
    """
    if steps < 100:
        raise ValueError("steps must be >= 100")
    z = np.asarray(start, dtype=float).copy()
    if z.shape != (4,):
        raise ValueError("start must have 4 coordinates")
    h = duration / steps
    out = np.empty((steps + 1, 5))
    out[:, 0] = np.linspace(0.0, duration, steps + 1)
    out[0, 1:] = z
    f = sys.hamiltonian_vector_field
    for i in range(steps):
        k1 = f(z)
        k2 = f(z + 0.5 * h * k1)
        k3 = f(z + 0.5 * h * k2)
        k4 = f(z + h * k3)
        z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1, 1:] = z
    return out


@dataclass
class OrbitClosure:
    start: np.ndarray = field(repr=False)
    period: float
    steps: int
    distance: float
    energy_drift: float
    action_drift: float

    def closed(self, tol: float = 1e-6) -> bool:
        return self.distance < tol

    def to_dict(self) -> dict:
        d = asdict(self)
        d["start"] = [float(v) for v in self.start]
        return d


def orbit_closure(sys: ConstraintSystem, torus: TorusSpec, phi_fixed: float = 0.0,
                  steps: int = 10_000) -> OrbitClosure:
    """Integrate one period along the closed orbit of a resonant torus.

    The orbit starts at angle ``phi_fixed`` for the non-rotating angle and 0
    for the rotating one; relative drifts of ``H`` and of both actions are
    reported alongside the return distance.
    """
    angles = [phi_fixed, phi_fixed]
    angles[torus.rotating_index] = 0.0
    start = angle_to_canonical(torus.point, *angles)
    period = torus.period
    traj = integrate_orbit(sys, start, period, steps)
    z = traj[:, 1:]
    aa = canonical_to_action_angle(z)
    energy = sys.energy(aa[:, 0], aa[:, 2])
    s_ref = np.array([torus.point.s1, torus.point.s2])
    action_drift = 0.0
    for col, ref in ((0, s_ref[0]), (2, s_ref[1])):
        scale = max(abs(ref), 1e-300)
        action_drift = max(action_drift, float(np.max(np.abs(aa[:, col] - ref)) / scale))
    return OrbitClosure(
        start=start,
        period=period,
        steps=steps,
        distance=float(np.linalg.norm(z[-1] - z[0])),
        energy_drift=float(np.max(np.abs(energy - sys.E)) / sys.E),
        action_drift=action_drift,
    )


# -- Fomenko graph ------------------------------------------------------------------

@dataclass(frozen=True)
class GraphVertex:
    kind: Literal["black", "white"]
    s1: float
    s2: float
    label: str
    value: float


@dataclass(frozen=True)
class GraphEdge:
    source: int
    target: int
    lo: float
    hi: float


@dataclass(frozen=True)
class FomenkoGraph:
    integral: Literal["s1", "s2"]
    vertices: tuple[GraphVertex, ...]
    edges: tuple[GraphEdge, ...]

    def count(self, kind: str) -> int:
        return sum(v.kind == kind for v in self.vertices)

    def degrees(self) -> list[int]:
        deg = [0] * len(self.vertices)
        for e in self.edges:
            deg[e.source] += 1
            deg[e.target] += 1
        return deg

    def to_dict(self) -> dict:
        return {
            "integral": self.integral,
            "vertices": [asdict(v) for v in self.vertices],
            "edges": [asdict(e) for e in self.edges],
        }


def fomenko_graph(sys: ConstraintSystem, integral: Literal["s1", "s2"] = "s2") -> FomenkoGraph:
    """Bifurcation graph of ``s1`` or ``s2`` on the energy surface.

    Walk the physical arc from the ``s1`` axis to the ``s2`` axis.  The arc
    ends are black vertices (a torus collapses to a circle); interior
    extrema of the chosen integral, which are the resonant maximal tori,
    are white vertices.  Consecutive vertices along the arc are joined by an
    edge labelled with the range of the integral on that piece.
    """
    if integral not in ("s1", "s2"):
        raise ValueError("integral must be 's1' or 's2'")
    sys.require_elliptic()
    end_a, end_b = arc_endpoints(sys)
    if end_a.s1 <= BOUNDARY_TOL and end_b.s2 <= BOUNDARY_TOL:
        raise ValueError("empty physical arc")
    idx = 1 if integral == "s2" else 0
    wanted = "Omega1Zero" if integral == "s2" else "Omega2Zero"

    def value(p: ActionPoint) -> float:
        return p.s2 if idx else p.s1

    stops = [(0.0, "black", end_a, "s2=0")]
    for t in find_resonant_tori(sys):
        if t.resonance == wanted:
            stops.append((math.atan2(t.point.s2, t.point.s1), "white", t.point, t.label))
    stops.append((math.pi / 2, "black", end_b, "s1=0"))
    stops.sort(key=lambda s: s[0])

    vertices = tuple(GraphVertex(kind, p.s1, p.s2, lab, value(p)) for _, kind, p, lab in stops)
    edges = tuple(
        GraphEdge(i, i + 1, min(vertices[i].value, vertices[i + 1].value),
                  max(vertices[i].value, vertices[i + 1].value))
        for i in range(len(vertices) - 1)
    )
    return FomenkoGraph(integral, vertices, edges)
