import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import CoercivityError, DomainError, EvaluationError
from hamiltonian import (L_INF, AppendixExample, BumpPotential, Custom, HamiltonianSpec, LagrangianView,
                         PeriodicFunction, Quadratic, ShiftedEikonal, SignHint, Which, ZeroPotential, argmin_p,
                         evaluate, fenchel_lagrangian)


def test_periodic_function_cosine():
    U = PeriodicFunction.cosine()
    assert U(0.0) == pytest.approx(1.0)
    assert U(0.5) == pytest.approx(-1.0)
    assert U.mean == 0.0
    x_star, value = U.minimum()
    assert x_star == pytest.approx(0.5, abs=1e-6)
    assert value == pytest.approx(-1.0, abs=1e-12)


def test_periodic_function_shift_and_derivative():
    U = PeriodicFunction.shifted_cosine(0.25)
    assert U(0.25) == pytest.approx(1.0)
    xs = np.linspace(0.0, 1.0, 11)
    step = 1e-6
    numeric = (U(xs + step) - U(xs - step)) / (2 * step)
    assert np.allclose(U.derivative(xs), numeric, atol=1e-6)
    assert U.lipschitz_bound == pytest.approx(2 * np.pi)


def test_bump_potential():
    V = BumpPotential(0.5, 0.2, -0.5)
    assert V(0.5) == pytest.approx(-0.5)
    assert V(0.3) == pytest.approx(0.0)
    assert V(np.array([-1.0, 0.29, 0.71, 3.0])).tolist() == [0.0, 0.0, 0.0, 0.0]
    assert V.support == pytest.approx((0.3, 0.7))
    assert V.integral() == pytest.approx(-0.1)
    assert V.mirrored().center == -0.5
    assert V.sign_hint == SignHint.NONPOS
    assert BumpPotential(0.5, 0.2, 1.0).sign_hint == SignHint.NONNEG


@pytest.mark.parametrize("half_width, amplitude", [(0.0, 1.0), (-1.0, 1.0), (0.1, 0.0), (0.1, np.inf)])
def test_bump_potential_rejects(half_width, amplitude):
    with pytest.raises(DomainError):
        BumpPotential(0.0, half_width, amplitude)


def test_zero_potential():
    V = ZeroPotential()
    assert V.is_zero
    assert V.sign_hint == SignHint.NONNEG
    assert np.all(V(np.linspace(-3, 3, 7)) == 0.0)


def test_spec_defaults():
    spec = HamiltonianSpec(ShiftedEikonal(2.0))
    assert spec.p_search_bound == 10.0
    assert spec.q_velocity_bound == 4.0
    assert spec.is_periodic
    assert spec.base() is spec


def test_spec_base_drops_potential(specs):
    spec = specs["E1"]
    base = spec.base()
    assert base.potential.is_zero
    assert base.family is spec.family
    assert base.p_search_bound == spec.p_search_bound


def test_spec_rejects_bad_radius():
    with pytest.raises(DomainError):
        HamiltonianSpec(Quadratic(), p_search_bound=-1.0)


def test_g_is_h_minus_v(specs):
    spec = specs["E1"]
    xs = np.linspace(-1.0, 2.0, 31)
    assert np.allclose(spec.G(xs, 0.3), spec.H(xs, 0.3) - spec.V(xs))
    assert np.allclose(spec.section(xs)(0.3), spec.G(xs, 0.3))
    assert np.allclose(spec.section(xs, Which.H)(0.3), spec.H(xs, 0.3))


@pytest.mark.parametrize("name", ["E0", "E1", "E2", "E2b", "E3"])
def test_invariants(specs, name):
    checks = specs[name].check_invariants(levels=[2.0])
    assert all(checks.values()), checks


def test_appendix_invariants():
    checks = HamiltonianSpec(AppendixExample(1e-3)).check_invariants(levels=[0.0])
    assert all(checks.values()), checks


def test_require_coercive():
    spec = HamiltonianSpec(ShiftedEikonal(0.0), p_search_bound=1.5)
    spec.require_coercive([0.0])
    with pytest.raises(CoercivityError):
        spec.require_coercive([1.0])


def test_evaluate():
    spec = HamiltonianSpec(ShiftedEikonal(0.0), BumpPotential(0.5, 0.2, 1.0))
    assert evaluate(spec, 0.5, 0.0, Which.H) == pytest.approx(1.0)
    assert evaluate(spec, 0.5, 0.0, Which.G) == pytest.approx(0.0)
    assert evaluate(spec, 0.5, 0.0, Which.V) == pytest.approx(1.0)


def test_evaluate_non_finite():
    spec = HamiltonianSpec(Custom(lambda x, p: np.where(p > 1.0, np.nan, p * p)))
    assert evaluate(spec, 0.0, 0.5) == pytest.approx(0.25)
    with pytest.raises(EvaluationError):
        evaluate(spec, 0.0, 2.0)


def test_argmin_closed_forms():
    xs = np.linspace(0.0, 1.0, 9)
    p_star, values = argmin_p(HamiltonianSpec(ShiftedEikonal(2.0)), xs)
    assert np.allclose(p_star, -2.0)
    assert np.allclose(values, -np.cos(2 * np.pi * xs))
    p_star, values = argmin_p(HamiltonianSpec(Quadratic()), xs)
    assert np.allclose(p_star, 0.0)


def test_argmin_by_search():
    spec = HamiltonianSpec(Custom(lambda x, p: (p - 1.0) ** 2 + np.cos(2 * np.pi * x)))
    p_star, values = argmin_p(spec, np.array([0.0, 0.5]))
    assert np.allclose(p_star, 1.0, atol=1e-6)
    assert np.allclose(values, [1.0, -1.0], atol=1e-9)


def test_argmin_rejects_v():
    with pytest.raises(DomainError):
        argmin_p(HamiltonianSpec(Quadratic()), 0.0, Which.V)


def test_argmin_at_search_edge():
    spec = HamiltonianSpec(Custom(lambda x, p: (p - 20.0) ** 2))
    with pytest.raises(CoercivityError):
        argmin_p(spec, np.array([0.0]))


def test_eikonal_lagrangian():
    view = LagrangianView(HamiltonianSpec(ShiftedEikonal(0.0)))
    xs = np.array([0.0, 0.25, 0.5])
    assert np.allclose(fenchel_lagrangian(view, xs, 0.5), np.cos(2 * np.pi * xs), atol=1e-8)
    assert fenchel_lagrangian(view, 0.0, 2.0) == L_INF


def test_shifted_eikonal_lagrangian():
    # L = U(x) - theta q on |q| <= 1
    view = LagrangianView(HamiltonianSpec(ShiftedEikonal(2.0)))
    assert view(0.0, 0.5) == pytest.approx(1.0 - 1.0, abs=1e-8)
    assert view(0.0, -1.0) == pytest.approx(1.0 + 2.0, abs=1e-8)


def test_quadratic_lagrangian():
    view = LagrangianView(HamiltonianSpec(Quadratic()))
    qs = np.linspace(-4.0, 4.0, 9)
    assert np.allclose(view(0.3, qs), 0.5 * qs ** 2 + np.cos(2 * np.pi * 0.3), atol=1e-8)


def test_lagrangian_velocity_domain():
    view = LagrangianView(HamiltonianSpec(Quadratic()))
    assert view.q_domain == (-4.0, 4.0)
    with pytest.raises(DomainError):
        view(0.0, 4.5)


def test_lagrangian_table_adds_potential(specs):
    view = LagrangianView(specs["E3"])
    xs = np.array([-0.75, 0.25, 1.25])
    qs = np.array([-0.5, 0.0, 0.5])
    table = view.table(xs, qs)
    assert table.shape == (3, 3)
    direct = np.asarray(view(xs[:, None], qs[None, :]))
    assert np.allclose(table, direct, atol=1e-8)
    # L_G = L_H + V and only the middle point carries the bump
    assert np.allclose(table[1] - table[0], 1.0 / 3.0, atol=1e-8)


@settings(derandomize=True, max_examples=50, deadline=None)
@given(st.floats(-2.0, 2.0), st.floats(-4.0, 4.0), st.floats(-4.0, 4.0))
def test_fenchel_young(x, q, p):
    spec = HamiltonianSpec(Quadratic(), BumpPotential(0.0, 0.5, 0.4))
    assert LagrangianView(spec)(x, q) + spec.G(x, p) >= p * q - 1e-8
