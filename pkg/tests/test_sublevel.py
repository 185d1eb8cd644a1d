import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import CoercivityError, EmptySublevel
from hamiltonian import BumpPotential, HamiltonianSpec, ShiftedEikonal, Which
from sublevel import (TOL_LEVEL, CaseTag, Equilibrium, bracket_panel_integrals, classify, effective_hamiltonian,
                      expand_equilibria, free_critical_value, mean_momenta, sublevel_bracket, sublevel_endpoints,
                      support_sigma)


@pytest.fixture(scope="module")
def eikonal():
    return HamiltonianSpec(ShiftedEikonal(0.0))


def test_bracket_of_eikonal(eikonal):
    bracket = sublevel_bracket(eikonal, 0.0, 1.0)
    assert bracket.p_minus == pytest.approx(-2.0, abs=1e-9)
    assert bracket.p_plus == pytest.approx(2.0, abs=1e-9)
    assert bracket.width == pytest.approx(4.0, abs=1e-9)
    assert support_sigma(bracket, 1.0) == pytest.approx(2.0, abs=1e-9)
    assert support_sigma(bracket, -0.5) == pytest.approx(1.0, abs=1e-9)


def test_degenerate_bracket(eikonal):
    bracket = sublevel_bracket(eikonal, 0.5, 1.0)
    assert abs(bracket.p_minus) < 1e-9
    assert abs(bracket.p_plus) < 1e-9


def test_empty_sublevel(eikonal):
    with pytest.raises(EmptySublevel) as info:
        sublevel_bracket(eikonal, 0.5, 0.5)
    assert info.value.to_dict()["error"] == "EmptySublevel"


def test_coercivity_error():
    spec = HamiltonianSpec(ShiftedEikonal(0.0), p_search_bound=1.5)
    with pytest.raises(CoercivityError):
        sublevel_bracket(spec, 0.0, 2.0)


def test_one_sided_endpoints(eikonal):
    xs = np.linspace(0.0, 1.0, 5)
    p_minus, p_plus = sublevel_endpoints(eikonal, xs, 2.0, side="plus")
    assert p_minus is None
    assert np.allclose(p_plus, 2.0 + np.cos(2 * np.pi * xs), atol=1e-9)


def test_panel_integrals(eikonal):
    edges = np.linspace(0.0, 1.0, 65)
    minus, plus = bracket_panel_integrals(eikonal, edges, 1.0)
    assert len(plus) == 64
    assert np.sum(plus) == pytest.approx(1.0, abs=1e-6)
    assert np.sum(minus) == pytest.approx(-1.0, abs=1e-6)


def test_mean_momenta(eikonal):
    I_minus, I_plus = mean_momenta(eikonal, 1.5)
    assert I_plus == pytest.approx(1.5, abs=1e-6)
    assert I_minus == pytest.approx(-1.5, abs=1e-6)
    assert mean_momenta(eikonal, 1.5, side="plus")[0] is None


def test_free_critical_value_periodic(eikonal):
    c_f, equilibria = free_critical_value(eikonal, Which.H)
    assert c_f == pytest.approx(1.0, abs=1e-9)
    assert len(equilibria) == 1
    assert equilibria[0].periodic
    assert equilibria[0].point == pytest.approx(0.5, abs=1e-6)


def test_free_critical_value_with_well(specs):
    c_f, equilibria = free_critical_value(specs["E1"], Which.G)
    assert c_f == pytest.approx(1.5, abs=1e-9)
    assert [e.periodic for e in equilibria] == [False]
    assert equilibria[0].point == pytest.approx(0.5, abs=1e-6)


def test_expand_equilibria():
    e = Equilibrium(0.5, 0.5, 0.5, True)
    assert np.allclose(expand_equilibria([e], -1.0, 2.0, endpoints=False), [-0.5, 0.5, 1.5])
    assert np.allclose(expand_equilibria([e], -1.0, 2.0, (0.3, 0.7), endpoints=False), [-0.5, 1.5])
    fixed = Equilibrium(0.5, 0.4, 0.6, False)
    assert np.allclose(expand_equilibria([fixed], -1.0, 2.0), [0.4, 0.5, 0.6])


@pytest.mark.parametrize("theta", [-2.5, -1.0, 0.0, 0.5, 2.0])
def test_effective_hamiltonian_closed_form(eikonal, theta):
    assert effective_hamiltonian(eikonal, theta) == pytest.approx(max(1.0, abs(theta)), abs=1e-6)


def test_effective_hamiltonian_shift():
    spec = HamiltonianSpec(ShiftedEikonal(2.0))
    assert effective_hamiltonian(spec, 0.0) == pytest.approx(2.0, abs=1e-6)
    assert effective_hamiltonian(spec, -2.0) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("name, tag", [("E0", CaseTag.III), ("E1", CaseTag.I), ("E2", CaseTag.II_A),
                                       ("E2b", CaseTag.II_B), ("E3", CaseTag.III)])
def test_classification_matrix(reports, name, tag):
    assert reports(name).case_tag == tag


def test_case_one_constants(reports):
    report = reports("E1")
    assert report.c_f_H == pytest.approx(1.0, abs=1e-6)
    assert report.c_H == pytest.approx(1.0, abs=1e-6)
    assert report.c_f_G == pytest.approx(1.5, abs=1e-6)
    assert report.c_G == pytest.approx(1.5, abs=1e-6)
    assert report.delta == pytest.approx(0.5, abs=1e-6)
    assert report.mather_constraint_active


def test_case_two_constants(reports):
    report = reports("E2")
    assert report.c_H == pytest.approx(2.0, abs=1e-6)
    assert report.c_G == pytest.approx(2.0, abs=1e-6)
    assert abs(report.P_H_plus) <= 1e-6
    assert report.P_H_minus == pytest.approx(-4.0, abs=1e-5)
    assert report.rho > 0
    assert not report.mather_constraint_active


def test_mirror_symmetry(reports):
    a, b = reports("E2"), reports("E2b")
    assert a.c_H == pytest.approx(b.c_H, abs=1e-8)
    assert a.P_H_plus == pytest.approx(-b.P_H_minus, abs=1e-6)


@pytest.mark.parametrize("name", ["E2", "E2b", "E3"])
def test_equilibria_agree_off_the_support(specs, reports, name):
    spec, report = specs[name], reports(name)
    lo, hi = spec.support

    def outside(equilibria):
        points = expand_equilibria(equilibria, -2.0, 3.0, endpoints=False)
        return points[(points < lo - 1e-9) | (points > hi + 1e-9)]

    of_G, of_H = outside(report.equilibria_G), outside(report.equilibria_H)
    assert len(of_G) == len(of_H) > 0
    assert np.allclose(of_G, of_H, atol=1e-6)


def test_report_to_dict(reports):
    data = reports("E3").to_dict()
    assert data["case_tag"] == "III"
    assert set(data) >= {"c_f_H", "c_H", "c_f_G", "c_G", "equilibria_H", "equilibria_G", "rho"}


def test_lowered_potential_never_drops_critical_value():
    spec = HamiltonianSpec(ShiftedEikonal(0.0), BumpPotential(0.5, 0.1, 2.0))
    report = classify(spec)
    assert report.c_f_G >= report.c_f_H - TOL_LEVEL
    assert report.case_tag == CaseTag.III


@settings(derandomize=True, max_examples=40, deadline=None)
@given(st.floats(-1.0, 2.0), st.floats(1.6, 3.0), st.floats(0.0, 1.0))
def test_sublevels_grow_with_level(x, a, extra):
    spec = HamiltonianSpec(ShiftedEikonal(0.0), BumpPotential(0.5, 0.2, -0.5))
    low = sublevel_bracket(spec, x, a)
    high = sublevel_bracket(spec, x, a + extra)
    assert high.p_minus <= low.p_minus + 1e-9
    assert high.p_plus >= low.p_plus - 1e-9
