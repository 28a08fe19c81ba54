import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from brst_anomaly.brst import build_hamiltonian
from brst_anomaly.graded import var
from brst_anomaly.system import ConstraintSystem
from brst_anomaly.torus import (
    ActionPoint,
    angle_to_canonical,
    arc_endpoints,
    canonical_to_action_angle,
    ellipse_points,
    find_resonant_tori,
    fomenko_graph,
    frequencies,
    integrate_orbit,
    orbit_closure,
    resonance_line,
    sample_sigma,
)

UNPERTURBED = ConstraintSystem(1.0, math.sqrt(2), 0.0, 0.0, 0.0, 2.0)


@pytest.fixture
def tori(fixture_system):
    return {t.label: t for t in find_resonant_tori(fixture_system)}


# -- coordinates -------------------------------------------------------------------

def test_angle_map_examples():
    assert np.allclose(angle_to_canonical((0.5, 0.0), 0.0, 0.0), [1, 0, 0, 0])
    z = angle_to_canonical((1.0, 0.0), math.pi / 4, 0.0)
    assert z[0] * z[1] == pytest.approx(1.0)


@given(st.floats(0.01, 3), st.floats(0.01, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_angle_map_round_trip(s1, s2, f1, f2):
    out = canonical_to_action_angle(angle_to_canonical((s1, s2), f1, f2))
    assert out[0] == pytest.approx(s1) and out[2] == pytest.approx(s2)
    assert math.cos(out[1] - f1) == pytest.approx(1.0)
    assert math.cos(out[3] - f2) == pytest.approx(1.0)


def test_action_angle_bracket_by_finite_differences():
    rng = np.random.default_rng(3)
    h = 1e-6
    for z in rng.normal(size=(10, 4)):
        grad = {}
        for name, col in (("s1", 0), ("phi1", 1)):
            g = np.zeros(4)
            for i in range(4):
                dz = np.zeros(4)
                dz[i] = h
                g[i] = (canonical_to_action_angle(z + dz)[col] - canonical_to_action_angle(z - dz)[col]) / (2 * h)
            grad[name] = g
        # {F, G} = dF/dx dG/dp - dF/dp dG/dx
        a, b = grad["s1"], grad["phi1"]
        bracket = a[0] * b[1] - a[1] * b[0] + a[2] * b[3] - a[3] * b[2]
        assert bracket == pytest.approx(1.0, abs=1e-6)


def test_negative_actions_rejected():
    with pytest.raises(ValueError):
        ActionPoint(-1.0, 0.0)
    with pytest.raises(ValueError):
        angle_to_canonical((-1.0, 0.0), 0, 0)


# -- frequencies and tori --------------------------------------------------------------

def test_unperturbed_frequencies():
    assert frequencies(UNPERTURBED, ActionPoint(0.3, 0.4)) == (1.0, math.sqrt(2))
    assert find_resonant_tori(UNPERTURBED) == []


def test_fixture_tori_match_oracle(fixture_system, fixture_data, tori):
    assert set(tori) == {"T1", "T2"}
    for label in ("T1", "T2"):
        t = tori[label]
        ref = fixture_data[label]
        assert t.point.s1 == pytest.approx(ref["s1"], rel=1e-7)
        assert t.point.s2 == pytest.approx(ref["s2"], rel=1e-7)
        assert fixture_system.energy(t.point.s1, t.point.s2) == pytest.approx(fixture_system.E, abs=1e-10)


def test_resonance_at_tori(tori):
    t2, t1 = tori["T2"], tori["T1"]
    assert abs(t2.Omega1) < 1e-10 and abs(t2.Omega2) > 1e-3
    assert abs(t1.Omega2) < 1e-10 and abs(t1.Omega1) > 1e-3
    assert t2.resonance == "Omega1Zero" and t2.rotating_index == 1
    assert t1.resonance == "Omega2Zero" and t1.rotating_index == 0


def test_tori_are_arc_maxima(fixture_system, tori):
    arc = ellipse_points(fixture_system, 20001)
    assert tori["T2"].point.s2 == pytest.approx(arc[:, 1].max(), rel=1e-7)
    assert tori["T1"].point.s1 == pytest.approx(arc[:, 0].max(), rel=1e-7)


def test_swap_symmetry(fixture_system):
    sys = ConstraintSystem(1.0, 1.3, 1.0, 0.7, -0.6, 3.0)
    a = {t.label: t for t in find_resonant_tori(sys)}
    b = {t.label: t for t in find_resonant_tori(sys.swapped())}
    assert a["T1"].point.s1 == pytest.approx(b["T2"].point.s2)
    assert a["T1"].point.s2 == pytest.approx(b["T2"].point.s1)


def test_ellipse_points_lie_on_energy_surface(fixture_system):
    arc = ellipse_points(fixture_system, 50)
    assert np.allclose(fixture_system.energy(arc[:, 0], arc[:, 1]), fixture_system.E)
    assert arc[0, 1] == 0 and arc[-1, 0] == 0
    with pytest.raises(ValueError):
        ellipse_points(fixture_system, 1)
    with pytest.raises(ValueError):
        ellipse_points(UNPERTURBED, 10, physical=False)


def test_resonance_lines(fixture_system):
    for which in (1, 2):
        line = resonance_line(fixture_system, which, (0.0, 2.0), 5)
        om = np.array([fixture_system.frequencies(*p) for p in line])
        assert np.allclose(om[:, which - 1], 0.0, atol=1e-12)


def test_non_elliptic_rejected():
    sys = ConstraintSystem(1.0, 1.0, 1.0, 1.0, -1.5, 3.0)
    with pytest.raises(ValueError):
        find_resonant_tori(sys)


def test_sigma_samples_on_energy_surface(fixture_system):
    H = build_hamiltonian(fixture_system)
    pts = sample_sigma(fixture_system, 200, np.random.default_rng(0))
    assert np.allclose(H.evaluate_many(pts).real, fixture_system.E, rtol=1e-12)


# -- dynamics ------------------------------------------------------------------------

def test_vector_field_matches_bracket(fixture_system):
    H = build_hamiltonian(fixture_system)
    from brst_anomaly.graded import poisson

    brackets = [poisson(H, var(n)) for n in ("x1", "p1", "x2", "p2")]
    for z in np.random.default_rng(1).normal(size=(5, 4)):
        xdot = fixture_system.hamiltonian_vector_field(z)
        assert np.allclose(xdot, [b.evaluate(z).real for b in brackets])


@pytest.mark.parametrize("label", ["T1", "T2"])
def test_resonant_orbit_closes(fixture_system, tori, label):
    c = orbit_closure(fixture_system, tori[label], phi_fixed=0.3)
    assert c.closed(1e-6)
    assert c.energy_drift < 1e-9
    assert c.action_drift < 1e-8


def test_nonresonant_orbit_does_not_close():
    start = angle_to_canonical((0.5, 0.5), 0.0, 0.0)
    traj = integrate_orbit(UNPERTURBED, start, 2 * math.pi, 4000)
    assert np.linalg.norm(traj[-1, 1:] - traj[0, 1:]) > 1e-2
    aa = canonical_to_action_angle(traj[:, 1:])
    energy = UNPERTURBED.energy(aa[:, 0], aa[:, 2])
    assert np.max(np.abs(energy - energy[0])) / energy[0] < 1e-9


def test_integrate_orbit_validation(fixture_system):
    with pytest.raises(ValueError):
        integrate_orbit(fixture_system, [0, 0, 0, 0], 1.0, 10)
    with pytest.raises(ValueError):
        integrate_orbit(fixture_system, [0, 0, 0], 1.0, 200)


# -- Fomenko graph -----------------------------------------------------------------------

def test_fomenko_fixture_s2(fixture_system, tori):
    g = fomenko_graph(fixture_system, "s2")
    assert g.count("black") == 2 and g.count("white") == 1
    white = [i for i, v in enumerate(g.vertices) if v.kind == "white"][0]
    assert g.vertices[white].label == "T2"
    assert g.vertices[white].value == pytest.approx(tori["T2"].point.s2)
    # both arc pieces end at the maximum of s2
    assert g.degrees()[white] == 2 and len(g.edges) == 2
    assert all(e.hi == pytest.approx(tori["T2"].point.s2) for e in g.edges)


def test_fomenko_unperturbed_segment():
    g = fomenko_graph(UNPERTURBED, "s1")
    assert g.count("black") == 2 and g.count("white") == 0
    assert len(g.edges) == 1
    assert g.edges[0].lo == 0.0
    assert g.edges[0].hi == pytest.approx(UNPERTURBED.E / UNPERTURBED.omega1)


def test_fomenko_swap(fixture_system):
    sys = ConstraintSystem(1.0, 1.3, 1.0, 0.7, -0.6, 3.0)
    g = fomenko_graph(sys, "s1")
    h = fomenko_graph(sys.swapped(), "s2")
    assert sorted(v.value for v in g.vertices) == pytest.approx(sorted(v.value for v in h.vertices))
    assert g.count("white") == h.count("white") == 1
    with pytest.raises(ValueError):
        fomenko_graph(sys, "s3")


def test_arc_endpoints(fixture_system):
    a, b = arc_endpoints(fixture_system)
    assert fixture_system.energy(a.s1, 0) == pytest.approx(fixture_system.E)
    assert fixture_system.energy(0, b.s2) == pytest.approx(fixture_system.E)
