"""BRST charge, quantum differential and correction chain for one constraint.

Sign conventions.  With ``{C, P} = 1`` and the graded Leibniz rule, the
classical differential of ``F = f + V C*P`` (ghost factor in normal order)
is

    {Q, F} = C (X_H f - (H - E) V),      X_H = {H, -},

so ``F`` is closed exactly when ``X_H f = (H - E) V``.  Because the first
order of the graded star commutator is ``i hbar {Q, F}``, the quantum
differential is normalised as ``[Q, F]_* / (i hbar)``; its ``hbar^0``
coefficient is the classical one.

For ``F = F_0 + hbar F_1 + ...`` the ``hbar^{n+1}`` coefficient of
``[Q, F]_*`` reads ``i {Q, F_n} + S_n = 0`` where ``S_n`` collects the
bidifferential terms fed by ``F_0, ..., F_{n-1}``.  ``S_n`` sits in the
``C`` sector; writing ``S_n = C R_n`` turns the n-th equation into

    X_H f_n - (H - E) V_n = i R_n.

``R_1 = D_2(H, f) - D_2(f, H) - i D_1^even(H, V)``; ``correction_rhs``
returns ``R_n``.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .graded import GHOST_C, GHOST_P, GradedPoly, action, poisson, var
from .series import DEFAULT_ORDER, HbarSeries
from .star import SchemeSpec, bidiff_terms, star_commutator
from .system import ConstraintSystem

CHAIN_TOL = 1e-10


def build_hamiltonian(sys: ConstraintSystem) -> GradedPoly:
    s1, s2 = action(1), action(2)
    return (s1.scale(sys.omega1) + s2.scale(sys.omega2) + (s1 * s1).scale(sys.a)
            + (s2 * s2).scale(sys.b) + (s1 * s2).scale(2 * sys.c))


@dataclass(frozen=True)
class BRSTCharge:
    """``Q = C (H - E)``; no hbar or ghost corrections are needed."""

    system: ConstraintSystem
    constraint: GradedPoly
    Q: HbarSeries

    @property
    def classical(self) -> GradedPoly:
        return self.Q.coeff(0)


def build_brst_charge(sys: ConstraintSystem, order: int = DEFAULT_ORDER) -> BRSTCharge:
    T = build_hamiltonian(sys) - sys.E
    return BRSTCharge(sys, T, HbarSeries.from_poly(var("C") * T, order))


def physical_observable(f: GradedPoly, V: GradedPoly | None = None) -> GradedPoly:
    """``f + V C*P`` for ghost-free ``f`` and ``V``."""
    if not f.ghost_free() or (V is not None and not V.ghost_free()):
        raise ValueError("f and V must be ghost-free")
    if V is None:
        return f
    return f + V * var("C") * var("P")


def components(F: GradedPoly) -> tuple[GradedPoly, GradedPoly]:
    """Split a ghost-number-0 element into ``(f, V)`` with ``F = f + V C*P``."""
    if F.ghost_number() not in (0, None) or any(m[4] in (GHOST_C, GHOST_P) for m, _ in F.items()):
        raise ValueError("expected a ghost-number-0 element")
    return F.ghost_sector(0), F.ghost_sector(GHOST_C | GHOST_P)


def hamiltonian_derivative(H: GradedPoly, f: GradedPoly) -> GradedPoly:
    """``X_H f = {H, f}``."""
    return poisson(H, f)


def classical_delta(F: GradedPoly, Q: BRSTCharge) -> GradedPoly:
    return poisson(Q.classical, F)


def brst_delta(F: HbarSeries, Q: BRSTCharge, scheme: SchemeSpec) -> HbarSeries:
    """Quantum BRST differential ``[Q, F]_* / (i hbar)``.

    The ``hbar^0`` commutator term vanishes identically (graded
    commutativity), so the shifted series keeps the full truncation order:
    its ``hbar^N`` coefficient only involves ``F_0 .. F_N``.
    """
    if F.parity() is None:
        raise ValueError("brst_delta needs an argument of definite parity")
    N = F.order
    Fx = HbarSeries(F.coeffs, N + 1)
    Qx = HbarSeries(Q.Q.coeffs, N + 1)
    comm = star_commutator(Qx, Fx, scheme)
    return HbarSeries([c.scale(-1j) for c in comm.coeffs[1:]], N)


def chain_defect(f_n: GradedPoly, V_n: GradedPoly, rhs: GradedPoly, H: GradedPoly, E: float) -> GradedPoly:
    """``X_H f_n - (H - E) V_n - i R_n`` as a polynomial."""
    return hamiltonian_derivative(H, f_n) - (H - E) * V_n - rhs.scale(1j)


def correction_rhs(F_lower: Sequence[GradedPoly], Q: BRSTCharge, n: int, scheme: SchemeSpec,
                   tol: float = CHAIN_TOL) -> GradedPoly:
    """Right-hand side ``R_n`` of the order-``n`` correction equation.

    ``F_lower`` holds ``F_0, ..., F_{n-1}`` (ghost number 0, even), each of
    which must already solve its own equation to ``tol``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(F_lower) < n:
        raise ValueError(f"need F_0 .. F_{n - 1}, got {len(F_lower)} terms")
    F_lower = list(F_lower[:n])
    H = build_hamiltonian(Q.system)
    for m, Fm in enumerate(F_lower):
        if Fm.parity() != 0:
            raise ValueError("observables must be Grassmann even")
        fm, Vm = components(Fm)
        expected = GradedPoly() if m == 0 else correction_rhs(F_lower, Q, m, scheme, tol)
        defect = chain_defect(fm, Vm, expected, H, Q.system.E).max_abs()
        if defect > tol:
            raise ValueError(f"chain precondition violated at order {m}: defect {defect:.3e}")
    return _rhs(F_lower, Q, n, scheme)


def _rhs(F_lower: list[GradedPoly], Q: BRSTCharge, n: int, scheme: SchemeSpec) -> GradedPoly:
    S = GradedPoly()
    for s, Qs in enumerate(Q.Q.coeffs[: n + 1]):
        if Qs.is_zero():
            continue
        for l, Fl in enumerate(F_lower):
            k = n + 1 - l - s
            if k < 1 or (k == 1 and l == n):
                continue
            fwd = bidiff_terms(Qs, Fl, scheme, k)[k]
            bwd = bidiff_terms(Fl, Qs, scheme, k)[k]
            S = S + fwd - bwd
    stray = S - S.ghost_sector(GHOST_C) * var("C")
    if stray.max_abs() > CHAIN_TOL:
        raise ValueError("correction source left the C sector")
    return S.ghost_sector(GHOST_C)


def master_equation_residuals(Q: BRSTCharge, schemes: Sequence[SchemeSpec]) -> dict[str, float]:
    """``{Q, Q}`` and ``Q * Q`` residuals (max coefficient over all orders)."""
    from .star import star

    out = {"poisson_QQ": poisson(Q.classical, Q.classical).max_abs()}
    for sch in schemes:
        out[f"star_QQ[{sch.kind}]"] = star(Q.Q, Q.Q, sch).max_abs()
        out[f"commutator_QQ[{sch.kind}]"] = star_commutator(Q.Q, Q.Q, sch).max_abs()
    return out
