import time

import numpy as np
import pytest

from heleshaw import linear_analysis as lin
from heleshaw.linear_analysis import LinearState

SQRT2_OVER_3 = np.sqrt(2.0) / 3.0
TEST_STATE = dict(radius=2.0, delta=0.01, k=4, r_inf=10.0, sigma=SQRT2_OVER_3)


def test_sigma_value_and_runtime():
    t0 = time.perf_counter()
    sig = lin.compute_sigma()
    assert time.perf_counter() - t0 < 1.0
    assert abs(sig - SQRT2_OVER_3) < 1e-10
    assert round(sig, 2) == 0.47


def test_sigma_integrand_vanishes_at_wells():
    well = lambda p: 0.25 * p**4 - 0.5 * p**2
    assert well(1.0) == well(-1.0)


def test_steady_radius():
    np.testing.assert_allclose(lin.steady_radius(10.0), 7.0710678118654755)
    np.testing.assert_allclose(lin.steady_radius(np.sqrt(2.0)), 1.0)
    r = lin.steady_radius(4.0)
    np.testing.assert_allclose(np.pi * r**2, 0.5 * np.pi * 16.0)


def test_u_fields_continuity_and_derivatives():
    R, rinf, sig = 2.0, 10.0, 0.47
    np.testing.assert_allclose(lin.u_fields(R, rinf, sig, R), sig / R, rtol=1e-14)
    # one-sided finite differences as the independent derivative oracle
    eps = 1e-6
    inner = (lin.u_fields(R, rinf, sig, R) - lin.u_fields(R, rinf, sig, R - eps)) / eps
    outer = (lin.u_fields(R, rinf, sig, R + eps) - lin.u_fields(R, rinf, sig, R + 2e-16)) / eps
    np.testing.assert_allclose(inner, R / 2.0, atol=1e-5)
    np.testing.assert_allclose(outer, -R / 2.0 + rinf**2 / (2 * R), atol=1e-4)
    # far-field Neumann condition
    du = (lin.u_fields(R, rinf, sig, rinf) - lin.u_fields(R, rinf, sig, rinf - eps)) / eps
    np.testing.assert_allclose(du, 0.0, atol=1e-5)


def test_field_jump_equals_twice_interface_velocity():
    R, rinf, sig = 3.1, 10.0, 0.47
    eps = 1e-6
    dplus = (lin.u_fields(R, rinf, sig, R + 2 * eps) - lin.u_fields(R, rinf, sig, R + eps)) / eps
    dminus = (lin.u_fields(R, rinf, sig, R - eps) - lin.u_fields(R, rinf, sig, R - 2 * eps)) / eps
    r_dot, _ = lin.ode_rhs(LinearState(R, 1e-6, 4, rinf, sig))
    np.testing.assert_allclose(0.5 * (dplus - dminus), r_dot, atol=1e-4)


def test_perturbation_coefficient_a_minus():
    fields = lin.perturbation_coefficients(LinearState(**TEST_STATE))
    expected = 15.0 * SQRT2_OVER_3 / 64.0 - 1.0 / 16.0  # independent substitution
    np.testing.assert_allclose(fields.a_minus, expected, rtol=1e-14)
    np.testing.assert_allclose(fields.a_minus, 0.0479854, atol=5e-8)


def test_k_equals_one_would_drop_tension_term():
    # the (k^2 - 1) factor removes sigma at k=1; check via the formula pieces
    r = 2.0
    a = lambda k, sig: sig * (k * k - 1) / r ** (k + 2) - 1.0 / (2 * r ** (k - 1))
    assert a(1, 0.47) == a(1, 123.0) == -0.5


def test_first_order_continuity_up_to_boundary_data():
    st = LinearState(**TEST_STATE)
    f = lin.perturbation_coefficients(st)
    r, k, rinf = st.radius, st.k, st.r_inf
    # w1+ - w1- at r=R equals the first-order jump R - R_inf^2/(2R)
    lhs = (f.a_plus * r**k + f.b_plus / r**k) - f.a_minus * r**k
    np.testing.assert_allclose(lhs, r - rinf**2 / (2 * r), rtol=1e-12)


def test_zeroth_order_u_continuity():
    st = LinearState(**TEST_STATE)
    f = lin.perturbation_coefficients(st)
    assert abs(f.u_continuity_defect(st)) < 1e-14


def test_ode_rhs_circle_rates():
    r_dot, _ = lin.ode_rhs(LinearState(2.0, 1e-9, 4, 10.0, 0.47))
    np.testing.assert_allclose(r_dot, 11.5, rtol=1e-14)
    r_dot_steady, _ = lin.ode_rhs(
        LinearState(lin.steady_radius(10.0), 1e-9, 4, 10.0, 0.47))
    assert abs(r_dot_steady) < 1e-13


def test_mode_growth_rate_at_reference_point():
    # value confirmed by an independent linearized boundary-integral solve
    st = LinearState(**TEST_STATE)
    _, d_dot = lin.ode_rhs(st)
    np.testing.assert_allclose(d_dot / st.delta, 14.714352265325463, rtol=1e-12)


def test_rate_linear_in_delta():
    a = lin.ode_rhs(LinearState(2.0, 0.01, 4, 10.0, 0.47))[1] / 0.01
    b = lin.ode_rhs(LinearState(2.0, 0.002, 4, 10.0, 0.47))[1] / 0.002
    np.testing.assert_allclose(a, b, rtol=1e-14)


def test_high_modes_are_damped():
    for k in range(16, 40, 4):
        _, d_dot = lin.ode_rhs(LinearState(2.0, 1e-4, k, 10.0, SQRT2_OVER_3))
        assert d_dot < 0


def test_integrate_invariant_subspace():
    traj = lin.integrate(LinearState(2.0, 0.0, 4, 10.0, 0.47), 1e-3, 0.5)
    np.testing.assert_array_equal(traj[:, 2], 0.0)


def test_integrate_fixed_point():
    r0 = lin.steady_radius(10.0)
    traj = lin.integrate(LinearState(r0, 0.0, 4, 10.0, 0.47), 1e-3, 1.0)
    np.testing.assert_allclose(traj[:, 1], r0, atol=1e-12)


def test_integrate_fourth_order():
    st = LinearState(2.0, 0.01, 4, 10.0, 0.47)
    coarse = lin.integrate(st, 2e-3, 0.2)[-1, 1:]
    fine = lin.integrate(st, 1e-3, 0.2)[-1, 1:]
    finest = lin.integrate(st, 5e-4, 0.2)[-1, 1:]
    ratio = np.abs(coarse - finest).max() / np.abs(fine - finest).max()
    assert 12.0 < ratio < 20.0  # (16-1)/(4-1) ~ 15 for fourth order


def test_trajectory_csv(tmp_path):
    traj = lin.integrate(LinearState(2.0, 0.01, 4, 10.0, 0.47), 1e-2, 0.1)
    path = tmp_path / "traj.csv"
    lin.write_trajectory(path, traj)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,R,delta"
    assert len(lines) == len(traj) + 1


def test_invalid_states_rejected():
    with pytest.raises(ValueError):
        LinearState(12.0, 0.01, 4, 10.0, 0.47)
    with pytest.raises(ValueError):
        LinearState(2.0, 0.01, 1, 10.0, 0.47)
    with pytest.warns(UserWarning):
        LinearState(2.0, 0.5, 4, 10.0, 0.47)
