"""First-order quantizability of classical observables.

Two independent routes decide whether ``X_H f_1 - (H - E) V_1 = i R`` has
a solution:

* ``solve_polynomial_correction`` looks for polynomial ``(f_1, V_1)`` by
  least squares on monomial coefficients.  A large residual only says
  "no polynomial solution up to this degree".
* ``orbit_average_certificate`` averages ``R`` over closed orbits of
  ``X_H`` on a resonant torus.  The left side integrates to zero along any
  closed orbit inside ``H = E``, so a nonzero average rules out every
  smooth solution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .brst import (
    build_brst_charge,
    build_hamiltonian,
    correction_rhs,
    hamiltonian_derivative,
    physical_observable,
)
from .graded import GradedPoly, action, monomials_up_to
from .star import SchemeSpec
from .system import ConstraintSystem
from .torus import OrbitClosure, TorusSpec, angle_to_canonical, find_resonant_tori, orbit_closure, sample_sigma

Verdict = Literal["Anomalous", "NotObstructedAtOrder1", "Inconclusive"]

REPORT_VERSION = 1
SOLVE_TOL = 1e-8
CERT_TOL = 1e-6
CLOSURE_TOL = 1e-6
DEFAULT_DEGREE_CAP = 8
DEFAULT_QUAD_POINTS = 64
DEFAULT_PHI_POINTS = 8
ORBIT_STEPS = 10_000


def default_phi_grid(n: int = DEFAULT_PHI_POINTS) -> list[float]:
    return [2 * math.pi * j / n for j in range(n)]


def _cx(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def obstruction_density(sys: ConstraintSystem, scheme: SchemeSpec, f: GradedPoly,
                        V: GradedPoly | None = None) -> GradedPoly:
    """``R`` in ``X_H f_1 - (H - E) V_1 = i R`` for the classical observable ``f + V C*P``."""
    Q = build_brst_charge(sys, order=2)
    return correction_rhs([physical_observable(f, V)], Q, 1, scheme)


# -- polynomial route -------------------------------------------------------------

@dataclass
class CorrectionSolveResult:
    degree_cap: int
    residual: float
    rhs_norm: float
    defect: float | None = None
    solution: tuple[GradedPoly, GradedPoly] | None = None

    @property
    def solved(self) -> bool:
        return self.solution is not None

    def to_dict(self) -> dict:
        out = {"degree_cap": self.degree_cap, "residual": self.residual,
               "rhs_norm": self.rhs_norm, "defect": self.defect, "solution": None}
        if self.solution is not None:
            out["solution"] = {"f1": self.solution[0].to_text(), "V1": self.solution[1].to_text()}
        return out


def correction_matrix(sys: ConstraintSystem, degree_cap: int):
    """Columns of ``(f_1, V_1) -> X_H f_1 - (H - E) V_1`` on monomial coefficients."""
    H = build_hamiltonian(sys)
    T = H - sys.E
    f_basis = monomials_up_to(degree_cap)
    v_basis = monomials_up_to(degree_cap - 2) if degree_cap >= 2 else []
    columns = [hamiltonian_derivative(H, GradedPoly({m: 1})) for m in f_basis]
    columns += [-(T * GradedPoly({m: 1})) for m in v_basis]
    return f_basis, v_basis, columns


def solve_polynomial_correction(sys: ConstraintSystem, scheme: SchemeSpec, f: GradedPoly,
                                V: GradedPoly | None = None, degree_cap: int = DEFAULT_DEGREE_CAP,
                                tol: float = SOLVE_TOL, seed: int = 0,
                                n_check: int = 200) -> CorrectionSolveResult:
    """Least-squares search for a polynomial first-order correction.

    ``residual`` is ``|A x - b| / |b|`` over monomial coefficients (0 when
    the right-hand side vanishes).  When it is below ``tol`` the solution
    is kept and its pointwise defect on random points of the energy surface
    is recorded.
    """
    V = V if V is not None else GradedPoly()
    rhs = obstruction_density(sys, scheme, f, V).scale(1j)
    b_norm = math.sqrt(sum(abs(c) ** 2 for _, c in rhs.items()))
    if b_norm == 0.0:
        f1, V1 = GradedPoly(), GradedPoly()
        residual = 0.0
    else:
        f_basis, v_basis, columns = correction_matrix(sys, degree_cap)
        rows = sorted({m for col in columns for m, _ in col.items()} | {m for m, _ in rhs.items()})
        index = {m: i for i, m in enumerate(rows)}
        A = np.zeros((len(rows), len(columns)), dtype=complex)
        for j, col in enumerate(columns):
            for m, c in col.items():
                A[index[m], j] = c
        b = np.zeros(len(rows), dtype=complex)
        for m, c in rhs.items():
            b[index[m]] = c
        x, *_ = np.linalg.lstsq(A, b, rcond=None)
        residual = float(np.linalg.norm(A @ x - b) / b_norm)
        nf = len(f_basis)
        f1 = GradedPoly(dict(zip(f_basis, x[:nf])))
        V1 = GradedPoly(dict(zip(v_basis, x[nf:])))
    result = CorrectionSolveResult(degree_cap, residual, b_norm)
    if residual < tol:
        result.solution = (f1, V1)
        result.defect = correction_defect(sys, f1, V1, rhs, seed=seed, n=n_check)
    return result


def correction_defect(sys: ConstraintSystem, f1: GradedPoly, V1: GradedPoly, target: GradedPoly,
                      seed: int = 0, n: int = 200) -> float:
    """Max of ``|X_H f_1 - (H - E) V_1 - target|`` on random points of the energy surface."""
    H = build_hamiltonian(sys)
    lhs = hamiltonian_derivative(H, f1) - (H - sys.E) * V1 - target
    pts = sample_sigma(sys, n, np.random.default_rng(seed))
    return float(np.max(np.abs(lhs.evaluate_many(pts)))) if not lhs.is_zero() else 0.0


# -- closed-orbit route --------------------------------------------------------------

@dataclass
class TorusAverage:
    """Orbit averages of the obstruction density on one resonant torus."""

    torus: TorusSpec
    phi_grid: list[float]
    averages: list[complex]
    density_scale: float
    quadrature_change: float
    closure: OrbitClosure | None
    prediction: list[complex] | None = None

    @property
    def max_abs(self) -> float:
        return max((abs(a) for a in self.averages), default=0.0)

    def tolerance(self, cert_tol: float) -> float:
        return cert_tol * self.density_scale if self.density_scale > 0 else cert_tol

    def certifies(self, cert_tol: float, closure_tol: float = CLOSURE_TOL) -> bool:
        closed = self.closure is not None and self.closure.closed(closure_tol)
        return closed and self.max_abs > self.tolerance(cert_tol)

    def to_dict(self) -> dict:
        return {
            "torus": self.torus.to_dict(),
            "phi_grid": list(self.phi_grid),
            "averages": [_cx(a) for a in self.averages],
            "max_abs": self.max_abs,
            "density_scale": self.density_scale,
            "quadrature_change": self.quadrature_change,
            "closure": self.closure.to_dict() if self.closure else None,
            "prediction": [_cx(a) for a in self.prediction] if self.prediction is not None else None,
        }


def _orbit_means(R: GradedPoly, torus: TorusSpec, phi_grid, quad_points: int) -> np.ndarray:
    rot = 2 * math.pi * np.arange(quad_points) / quad_points
    fixed = np.asarray(phi_grid, dtype=float)[:, None]
    phis = (fixed + 0 * rot, rot + 0 * fixed)
    if torus.rotating_index == 0:
        phis = phis[::-1]
    pts = angle_to_canonical(torus.point, *phis).reshape(-1, 4)
    vals = R.evaluate_many(pts).reshape(len(phi_grid), quad_points)
    # periodic trapezoid rule
    return vals.mean(axis=1)


def orbit_average_certificate(sys: ConstraintSystem, scheme: SchemeSpec, f: GradedPoly,
                              V: GradedPoly | None, torus: TorusSpec, phi_grid=None,
                              quad_points: int = DEFAULT_QUAD_POINTS,
                              closure: OrbitClosure | None = None,
                              closure_tol: float = CLOSURE_TOL,
                              steps: int = ORBIT_STEPS) -> TorusAverage:
    """Average the obstruction density over closed orbits of a resonant torus.

    For each fixed angle in ``phi_grid`` the orbit is the circle swept by
    the other angle; ``A(phi) = (1/2pi) \\oint R``.  The orbit closure is
    verified by direct integration unless a precomputed ``closure`` is
    passed.
    """
    if torus.resonance is None:
        raise ValueError("certificate needs a resonant torus")
    phi_grid = list(default_phi_grid() if phi_grid is None else phi_grid)
    if closure is None:
        closure = orbit_closure(sys, torus, phi_grid[0] if phi_grid else 0.0, steps)
    if not closure.closed(closure_tol):
        raise ValueError(f"orbit on {torus.label} not closed: distance {closure.distance:.3e}")
    R = obstruction_density(sys, scheme, f, V)
    coarse = _orbit_means(R, torus, phi_grid, quad_points)
    fine = _orbit_means(R, torus, phi_grid, 2 * quad_points)
    scale_pts = angle_to_canonical(torus.point, *np.meshgrid(
        np.linspace(0, 2 * math.pi, 33), np.linspace(0, 2 * math.pi, 33))).reshape(-1, 4)
    scale = float(np.max(np.abs(R.evaluate_many(scale_pts)))) if not R.is_zero() else 0.0
    change = float(np.max(np.abs(fine - coarse)))
    if scale > 0:
        change /= scale
    return TorusAverage(torus, phi_grid, [complex(a) for a in fine], scale, change, closure)


# -- reports -------------------------------------------------------------------------

@dataclass
class ObstructionReport:
    observable: str
    scheme: SchemeSpec
    entries: list[TorusAverage]
    solver: CorrectionSolveResult
    rhs: GradedPoly
    prediction: str | None
    verdict: Verdict
    cert_tol: float
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "report_version": REPORT_VERSION,
            "observable": self.observable,
            "scheme": self.scheme.to_dict(),
            "rhs": self.rhs.to_text(),
            "entries": [e.to_dict() for e in self.entries],
            "prediction": self.prediction,
            "polynomial": self.solver.to_dict(),
            "cert_tol": self.cert_tol,
            "verdict": self.verdict,
            "notes": list(self.notes),
        }


def decide(entries: list[TorusAverage], solver: CorrectionSolveResult, cert_tol: float,
           solve_tol: float = SOLVE_TOL) -> Verdict:
    if any(e.certifies(cert_tol) for e in entries):
        return "Anomalous"
    if not entries:
        return "Inconclusive"
    if solver.residual < solve_tol:
        return "NotObstructedAtOrder1"
    return "Inconclusive"


def _action_prediction(sys, scheme, which: int, torus: TorusSpec, phi_grid) -> list[complex] | None:
    """Closed form of the averages for ``f = s_which``.

    ``R = -i k (g - 1/g) x_i p_i`` with ``(k, g) = (a, alpha)`` or
    ``(b, beta)``, and ``x_i p_i = s_i sin(2 phi_i)``; the average survives
    only when ``phi_i`` is the fixed angle.
    """
    if scheme.kind == "weyl":
        return [0j for _ in phi_grid]
    k, g = (sys.a, scheme.alpha) if which == 1 else (sys.b, scheme.beta)
    s = torus.point.s1 if which == 1 else torus.point.s2
    fixed_index = 1 - torus.rotating_index
    if fixed_index != which - 1:
        return [0j for _ in phi_grid]
    return [-1j * k * (g - 1 / g) * s * math.sin(2 * phi) for phi in phi_grid]


def analyze_observable(sys: ConstraintSystem, scheme: SchemeSpec, f: GradedPoly, V: GradedPoly | None,
                       label: str, tori: list[TorusSpec] | None = None, phi_grid=None,
                       degree_cap: int = DEFAULT_DEGREE_CAP, cert_tol: float = CERT_TOL,
                       quad_points: int = DEFAULT_QUAD_POINTS,
                       closures: dict[str, OrbitClosure] | None = None,
                       steps: int = ORBIT_STEPS, seed: int = 0) -> ObstructionReport:
    phi_grid = list(default_phi_grid() if phi_grid is None else phi_grid)
    tori = find_resonant_tori(sys) if tori is None else tori
    closures = {} if closures is None else closures
    notes = []
    entries = []
    for t in tori:
        cl = closures.get(t.label)
        if cl is None:
            cl = orbit_closure(sys, t, phi_grid[0] if phi_grid else 0.0, steps)
            closures[t.label] = cl
        if not cl.closed():
            notes.append(f"{t.label}: orbit closure failed (distance {cl.distance:.3e})")
            continue
        entries.append(orbit_average_certificate(sys, scheme, f, V, t, phi_grid, quad_points, closure=cl))
    if not tori:
        notes.append("no resonant torus in the open first quadrant")
    solver = solve_polynomial_correction(sys, scheme, f, V, degree_cap, seed=seed)
    rhs = obstruction_density(sys, scheme, f, V)
    prediction = None
    if label in ("s1", "s2") and (V is None or V.is_zero()):
        which = int(label[1])
        for e in entries:
            e.prediction = _action_prediction(sys, scheme, which, e.torus, phi_grid)
        if scheme.kind == "weyl":
            prediction = "0"
        else:
            k, g = ("a", "alpha") if which == 1 else ("b", "beta")
            prediction = (f"A(phi) = -i {k} ({g} - 1/{g}) s{which}* sin(2 phi) on the torus where "
                          f"phi{which} is fixed, 0 elsewhere")
    verdict = decide(entries, solver, cert_tol)
    return ObstructionReport(label, scheme, entries, solver, rhs, prediction, verdict, cert_tol, notes)


def quantizability_report(sys: ConstraintSystem, scheme: SchemeSpec, phi_grid=None,
                          degree_cap: int = DEFAULT_DEGREE_CAP, cert_tol: float = CERT_TOL,
                          quad_points: int = DEFAULT_QUAD_POINTS, steps: int = ORBIT_STEPS,
                          observables=("s1", "s2"), seed: int = 0) -> dict[str, ObstructionReport]:
    """Reports for the action variables ``s1`` and ``s2``."""
    tori = find_resonant_tori(sys)
    closures: dict[str, OrbitClosure] = {}
    out = {}
    for label in observables:
        f = action(int(label[1]))
        out[label] = analyze_observable(sys, scheme, f, None, label, tori, phi_grid, degree_cap,
                                        cert_tol, quad_points, closures, steps, seed)
    return out
