import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import CaseError, DomainError, InternalError
from grid import Grid1D
from hamiltonian import HamiltonianSpec, ShiftedEikonal, Which
from weakkam import (ConditionU, CriticalProfile, ProfileKind, Semidistance, bounded_critical_solution,
                     condition_u_status, discrete_maximal_subsolution, equilibrium_envelope,
                     periodic_critical_solution, strict_subsolution_vG, subsolution_tolerance, u0_G_envelope, u0_H)


def eikonal_envelope(xs):
    # min over y in 1/2 + Z of S(y, x) for |p| - cos(2 pi x) at level 1
    d = np.abs(np.asarray(xs) % 1.0 - 0.5)
    return d - np.sin(2 * np.pi * d) / (2 * np.pi)


@pytest.fixture(scope="module")
def eikonal():
    return HamiltonianSpec(ShiftedEikonal(0.0))


@pytest.fixture(scope="module")
def primitive(eikonal):
    return Semidistance(eikonal, Which.H, 1.5).primitive(-1.0, 2.0)


def test_semidistance_over_a_period(eikonal):
    S = Semidistance(eikonal, Which.H, 1.0)
    assert S(0.5, 1.5) == pytest.approx(1.0, abs=1e-8)
    assert S(1.5, 0.5) == pytest.approx(1.0, abs=1e-8)
    assert S(0.3, 0.3) == 0.0


def test_primitive_matches_direct(eikonal, primitive):
    S = primitive.semidistance
    for y, x in [(0.0, 0.7), (0.7, 0.0), (-0.9, 1.9), (0.123, 0.456)]:
        assert float(primitive(y, x)) == pytest.approx(S(y, x), abs=1e-8)


@settings(derandomize=True, max_examples=40, deadline=None)
@given(st.lists(st.floats(-1.0, 2.0), min_size=3, max_size=3))
def test_semidistance_additive_and_triangular(primitive, points):
    y, z, x = sorted(points)
    assert float(primitive(y, z) + primitive(z, x)) == pytest.approx(float(primitive(y, x)), abs=1e-9)
    # a detour through a point outside [y, x] never shortens the path
    assert float(primitive(y, x)) <= float(primitive(x, z) + primitive(z, y) + primitive(y, x)) + 1e-9
    assert float(primitive(z, y) + primitive(y, x)) >= float(primitive(z, x)) - 1e-9


def test_primitive_rejects_points_off_its_range(primitive):
    with pytest.raises(DomainError):
        primitive.evaluate(np.array([2.5]))
    with pytest.raises(DomainError):
        primitive(-1.5, 0.0)
    m, p = primitive.evaluate(np.array([-1.0, 2.0]))
    assert m[0] == 0.0 and p[0] == 0.0


def test_condition_u(specs, reports):
    assert condition_u_status(specs["E0"], reports("E0")) == ConditionU.VERIFIED_INTERIOR
    assert condition_u_status(specs["E2"], reports("E2")) == ConditionU.NOT_APPLICABLE


def test_u0_H_eikonal(specs, reports):
    profile = u0_H(specs["E0"], reports("E0"))
    assert profile.kind == ProfileKind.U0_H
    assert profile.trusted
    assert profile.periodic
    assert profile.meta["condition_u"] == "verified_interior"
    xs = profile.grid.nodes
    assert np.allclose(profile.values, eikonal_envelope(xs), atol=1e-8)
    assert profile(0.5) == pytest.approx(0.0, abs=1e-10)
    assert profile(1.25) == pytest.approx(profile(0.25), abs=1e-12)


def test_u0_H_is_a_subsolution(specs, reports):
    spec, report = specs["E0"], reports("E0")
    profile = u0_H(spec, report)
    tol = subsolution_tolerance(spec, profile.grid, report.c_H, Which.H)
    assert tol > 0
    assert profile.subsolution_defect(spec, Which.H) <= tol


@pytest.mark.parametrize("name, branch, sign", [("E2", "plus", 1.0), ("E2b", "minus", -1.0)])
def test_periodic_solution_case_two(specs, reports, name, branch, sign):
    profile = periodic_critical_solution(specs[name], reports(name))
    assert profile.meta["branch"] == branch
    xs = profile.grid.nodes
    assert np.allclose(profile.values, sign * np.sin(2 * np.pi * xs) / (2 * np.pi), atol=1e-8)


def test_u0_G_case_three(specs, reports):
    spec, report = specs["E3"], reports("E3")
    u0H = u0_H(spec, report)
    profile = u0_G_envelope(spec, report, u0H, (-2.0, 3.0))
    assert profile.kind == ProfileKind.U0_G
    assert profile.level == pytest.approx(report.c_G)
    assert profile.meta["case"] == "III"
    assert profile.meta["period_drift"] <= 1e-4
    assert profile(0.5) == pytest.approx(0.0, abs=1e-9)
    # far from the bump the envelope is the unperturbed periodic profile
    xs = np.linspace(1.5, 3.0, 13)
    assert np.allclose(profile(xs), eikonal_envelope(xs), atol=1e-6)
    assert np.all(profile.values >= -1e-9)


def test_u0_G_needs_margin(specs, reports):
    spec, report = specs["E3"], reports("E3")
    with pytest.raises(DomainError):
        u0_G_envelope(spec, report, u0_H(spec, report), (0.0, 1.0))


@pytest.mark.parametrize("name, which", [("E0", Which.H), ("E3", Which.G)])
def test_nearest_period_holds_the_minimum(specs, reports, name, which):
    spec, report = specs[name], reports(name)
    prim = Semidistance(spec, which, report.c_G).primitive(-7.0, 8.0)
    ys = 0.5 + np.arange(-6, 7)
    xs = np.random.default_rng(7).uniform(-1.0, 2.0, 100)
    S = prim(ys[None, :], xs[:, None])
    gap = np.abs(ys[None, :] - xs[:, None])
    near = np.min(np.where(gap <= 1.0, S, np.inf), axis=1)
    wide = np.min(np.where(gap <= 5.0, S, np.inf), axis=1)
    assert np.array_equal(near, wide)

    equilibria = report.equilibria_H if which == Which.H else report.equilibria_G
    support = None if spec.potential.is_zero else spec.support
    envelope = equilibrium_envelope(spec, which, report.c_G, equilibria, xs, support)
    assert np.allclose(envelope, near, atol=1e-7)


def test_u0_G_case_two_adds_the_bump_mass(specs, reports):
    spec, report = specs["E2"], reports("E2")
    u0H = u0_H(spec, report)
    profile = u0_G_envelope(spec, report, u0H, (-2.0, 3.0))
    assert profile.meta["case"] == "II_A"
    assert spec.potential.integral() == pytest.approx(0.05)
    assert profile(1.0) == pytest.approx(u0H(0.0) + 0.05, abs=1e-5)
    assert profile(2.5) == pytest.approx(u0H(0.5) + 0.05, abs=1e-5)
    # left of the bump nothing changes
    assert profile(-1.0) == pytest.approx(u0H(0.0), abs=1e-5)
    assert profile.meta["period_drift"] <= 1e-4


@pytest.mark.parametrize("name, window", [("E3", (-1.0, 2.0)), ("E2b", (-2.0, 3.0))])
def test_u0_G_boundedness_on_narrow_windows(specs, reports, name, window):
    spec, report = specs[name], reports(name)
    grid = Grid1D.with_step(*window, 1.0 / 128)
    profile = u0_G_envelope(spec, report, u0_H(spec, report), window, grid)
    assert (profile.grid.x_lo, profile.grid.x_hi) == window
    lo, hi = profile.meta["boundedness_window"]
    assert lo <= spec.support[0] - 2.0 and hi >= spec.support[1] + 2.0
    assert profile.meta["period_drift"] <= 1e-4


def test_u0_G_case_one_grows(specs, reports):
    spec, report = specs["E1"], reports("E1")
    profile = u0_G_envelope(spec, report, u0_H(spec, report), (-2.0, 3.0))
    assert profile.meta["coercivity_constant"] > 0
    assert profile(0.5) == pytest.approx(0.0, abs=1e-9)
    assert profile(3.0) > profile(2.0) > profile(1.0)
    assert profile(-2.0) > profile(-1.0) > profile(0.0)


def test_strict_subsolution(specs, reports):
    spec, report = specs["E1"], reports("E1")
    grid = Grid1D.with_step(-6.0, 7.0, 1.0 / 128)
    profile, K, delta = strict_subsolution_vG(spec, report, grid)
    assert profile.kind == ProfileKind.STRICT_SUBSOLUTION_VG
    assert delta == pytest.approx(0.5, abs=1e-6)
    assert K[0] < spec.support[0] and K[1] > spec.support[1]
    assert np.max(profile.values) <= 1e-12
    tol = subsolution_tolerance(spec, grid, report.c_G)
    assert profile.subsolution_defect(spec) <= tol

    # strict outside K
    outside = (grid.nodes[1:-1] < K[0] - 0.1) | (grid.nodes[1:-1] > K[1] + 0.1)
    d_minus, d_plus = profile.derivative_intervals()
    section = spec.section(grid.nodes[1:-1])
    worst = np.max(np.maximum(section(d_minus), section(d_plus))[outside])
    assert worst <= report.c_G - delta + tol


def test_strict_subsolution_case_one_only(specs, reports):
    with pytest.raises(CaseError):
        strict_subsolution_vG(specs["E3"], reports("E3"), Grid1D.with_step(-3.0, 4.0, 1.0 / 64))


def test_discrete_maximal_subsolution(eikonal):
    grid = Grid1D.with_step(0.0, 1.0, 1.0 / 512)
    profile = discrete_maximal_subsolution(eikonal, 1.0, grid, [(0.5, 0.0)])
    assert profile.kind == ProfileKind.DISCRETE_MAXIMAL
    assert np.allclose(profile.values, eikonal_envelope(grid.nodes), atol=1e-6)
    with pytest.raises(InternalError):
        discrete_maximal_subsolution(eikonal, 1.0, grid, [(3.0, 0.0)])


def test_bounded_solution(specs, reports):
    grid = Grid1D.with_step(-2.0, 3.0, 1.0 / 256)
    profile = bounded_critical_solution(specs["E3"], reports("E3"), grid)
    assert profile.kind == ProfileKind.BOUNDED_SOLUTION
    assert profile(2.25) == pytest.approx(profile(-1.75), abs=1e-8)
    assert profile(2.25) == pytest.approx(eikonal_envelope(2.25), abs=1e-8)
    with pytest.raises(CaseError):
        bounded_critical_solution(specs["E1"], reports("E1"), grid)


def test_profile_helpers():
    grid = Grid1D(0.0, 1.0, 5)
    profile = CriticalProfile(grid, np.array([0.0, 1.0, 2.0, 1.0, 0.0]), 1.0, ProfileKind.U0_H)
    d_minus, d_plus = profile.derivative_intervals()
    assert d_minus.tolist() == [4.0, 4.0, -4.0]
    assert d_plus.tolist() == [4.0, -4.0, -4.0]
    sub = profile.restricted(0.25, 0.75)
    assert sub.values.tolist() == [1.0, 2.0, 1.0]
    assert profile.to_csv_rows()[2] == (0.5, 2.0, "u0_H", 1.0)
    assert profile(0.125) == pytest.approx(0.5)
