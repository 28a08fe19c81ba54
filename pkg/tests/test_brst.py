import random

import pytest

from brst_anomaly.brst import (
    brst_delta,
    build_brst_charge,
    build_hamiltonian,
    chain_defect,
    classical_delta,
    components,
    correction_rhs,
    hamiltonian_derivative,
    master_equation_residuals,
    physical_observable,
)
from brst_anomaly.graded import GHOST_C, GradedPoly, action, poisson, var
from brst_anomaly.series import HbarSeries
from brst_anomaly.star import extract_dk, random_poly, weyl, wick
from brst_anomaly.system import ConstraintSystem

x1, p1, x2, p2, C, P = (var(n) for n in ("x1", "p1", "x2", "p2", "C", "P"))
SCHEMES = [wick(2.0, 2.0), wick(2.0, 1.0), weyl()]
IDS = ["wick22", "wick21", "weyl"]


@pytest.fixture
def Q(fixture_system):
    return build_brst_charge(fixture_system)


def test_unperturbed_hamiltonian_is_oscillator():
    sys = ConstraintSystem(1.5, 0.7, 0, 0, 0, 1.0)
    H = build_hamiltonian(sys)
    assert H == action(1).scale(1.5) + action(2).scale(0.7)


def test_hamiltonian_coefficients(fixture_system):
    H = build_hamiltonian(fixture_system)
    # c s1 s2 carries the factor 2c/4 on x1^2 x2^2
    assert H.terms[(2, 0, 2, 0, 0)] == pytest.approx(2 * fixture_system.c / 4)
    assert H.terms[(4, 0, 0, 0, 0)] == pytest.approx(fixture_system.a / 4)


@pytest.mark.parametrize("i", [1, 2])
def test_actions_are_integrals(fixture_system, i):
    assert poisson(build_hamiltonian(fixture_system), action(i)).is_zero()


def test_charge_properties(Q):
    assert Q.classical.ghost_number() == 1
    assert Q.classical.parity() == 1
    assert poisson(Q.classical, Q.classical).is_zero()
    res = master_equation_residuals(Q, [wick(2, 2), weyl()])
    assert max(res.values()) < 1e-12


@pytest.mark.parametrize("scheme", SCHEMES, ids=IDS)
def test_delta_of_constant_vanishes(Q, scheme):
    assert brst_delta(HbarSeries.from_poly(3.0), Q, scheme).is_zero()


@pytest.mark.parametrize("scheme", SCHEMES, ids=IDS)
def test_delta_classical_part(Q, scheme):
    d = brst_delta(HbarSeries.from_poly(action(1)), Q, scheme)
    assert d.coeff(0).is_zero()
    dx = brst_delta(HbarSeries.from_poly(x1), Q, scheme)
    assert not dx.coeff(0).is_zero()
    assert dx.coeff(0) == C * poisson(build_hamiltonian(Q.system), x1)


def test_classical_delta_sign_identity(Q):
    rng = random.Random(1)
    H = build_hamiltonian(Q.system)
    for _ in range(10):
        f = random_poly(rng, 3, ghosts=False)
        V = random_poly(rng, 2, ghosts=False)
        F = physical_observable(f, V)
        expected = C * (hamiltonian_derivative(H, f) - (H - Q.system.E) * V)
        assert (classical_delta(F, Q) - expected).max_abs() < 1e-12
        assert (brst_delta(HbarSeries.from_poly(F), Q, wick(2, 2)).coeff(0) - expected).max_abs() < 1e-12


@pytest.mark.parametrize("scheme", SCHEMES, ids=IDS)
def test_delta_is_nilpotent(Q, scheme):
    rng = random.Random(2)
    for _ in range(5):
        F = HbarSeries([random_poly(rng, 3).parity_part(0) for _ in range(3)])
        dd = brst_delta(brst_delta(F, Q, scheme), Q, scheme)
        assert dd.max_abs() < 1e-9


def test_delta_requires_definite_parity(Q):
    with pytest.raises(ValueError):
        brst_delta(HbarSeries.from_poly(x1 + C), Q, weyl())


def test_components_round_trip():
    f, V = x1 * p2, action(1)
    assert components(physical_observable(f, V)) == (f, V)
    with pytest.raises(ValueError):
        components(C)
    with pytest.raises(ValueError):
        physical_observable(C)


def test_first_rhs_is_antisymmetrised_d2(Q):
    s = wick(2.0, 2.0)
    H = build_hamiltonian(Q.system)
    f = action(1)
    expected = extract_dk(H, f, 2, s) - extract_dk(f, H, 2, s)
    assert (correction_rhs([f], Q, 1, s) - expected).max_abs() < 1e-13
    # derived value: -i a (alpha - 1/alpha) x1 p1
    assert (expected - (x1 * p1).scale(-1j * Q.system.a * 1.5)).max_abs() < 1e-13


def test_rhs_with_gauge_component_picks_up_d1(Q):
    # f = (H - E) x1 is closed with V = X_H x1
    s = wick(2.0, 2.0)
    H = build_hamiltonian(Q.system)
    f = (H - Q.system.E) * x1
    V = poisson(H, x1)
    R = correction_rhs([physical_observable(f, V)], Q, 1, s)
    expected = extract_dk(H, f, 2, s) - extract_dk(f, H, 2, s) - extract_dk(H, V, 1, s).scale(1j)
    assert (R - expected).max_abs() < 1e-12


def test_rhs_matches_delta_expansion(Q):
    s = wick(2.0, 1.0)
    F0 = action(1)
    R1 = correction_rhs([F0], Q, 1, s)
    d = brst_delta(HbarSeries.from_poly(F0), Q, s)
    assert (d.coeff(1) - (C * R1).scale(-1j)).max_abs() < 1e-12


@pytest.mark.parametrize("scheme", [wick(2.0, 1.0), weyl()], ids=["wick21", "weyl"])
def test_unobstructed_rhs_vanishes(Q, scheme):
    assert correction_rhs([action(2)], Q, 1, scheme).is_zero()
    if scheme.kind == "weyl":
        assert correction_rhs([action(1)], Q, 1, scheme).is_zero()


def test_second_order_rhs_weyl(Q):
    # F_1 = 0 solves the first equation in the Weyl scheme, so R_2 is well defined
    assert correction_rhs([action(1), GradedPoly()], Q, 2, weyl()).is_zero()


def test_precondition_violation(Q):
    with pytest.raises(ValueError, match="precondition"):
        correction_rhs([x1], Q, 1, wick(2, 2))
    with pytest.raises(ValueError, match="precondition"):
        # F_1 = 0 does not solve the Wick(2, 2) first-order equation for s1
        correction_rhs([action(1), GradedPoly()], Q, 2, wick(2, 2))
    with pytest.raises(ValueError):
        correction_rhs([action(1)], Q, 0, wick(2, 2))
    with pytest.raises(ValueError):
        correction_rhs([action(1)], Q, 2, wick(2, 2))


def test_chain_defect_zero_for_closed_observable(Q):
    H = build_hamiltonian(Q.system)
    assert chain_defect(action(1), GradedPoly(), GradedPoly(), H, Q.system.E).is_zero()
