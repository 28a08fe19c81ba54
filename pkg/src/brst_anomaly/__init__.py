"""Graded star products, BRST reduction and first-order quantum anomalies
for a perturbed two-oscillator energy constraint."""

from .brst import (
    BRSTCharge,
    brst_delta,
    build_brst_charge,
    build_hamiltonian,
    correction_rhs,
    physical_observable,
)
from .graded import GradedPoly, action, deriv, evaluate, poisson, poly_mul, var
from .obstruction import (
    CorrectionSolveResult,
    ObstructionReport,
    orbit_average_certificate,
    quantizability_report,
    solve_polynomial_correction,
)
from .series import HbarSeries
from .star import SchemeSpec, check_associativity, extract_dk, star, star_commutator, weyl, wick
from .system import ConstraintSystem
from .torus import (
    ActionPoint,
    FomenkoGraph,
    TorusSpec,
    angle_to_canonical,
    find_resonant_tori,
    fomenko_graph,
    frequencies,
    integrate_orbit,
)

__version__ = "0.1.0"
