import math

import numpy as np
import pytest

from noslip import tables
from noslip.collision import mass_params
from noslip.errors import NoSolution
from noslip.wedge import (WedgeParams, WedgeState, chart_angles,
                          chart_velocity, invariant_density, phi_for_period,
                          quotient_orbit, return_map, rotation_angle,
                          simulate_return, velocity_shift)

UNIFORM = mass_params(gamma=1.0 / math.sqrt(2.0))


def _wp(phi=0.6, mass=UNIFORM):
    return WedgeParams(phi=phi, mass=mass)


def test_frame_matrices_orthogonal():
    wp = _wp()
    for m in (wp.zeta(1), wp.zeta(2), wp.a1, wp.s_reflect, wp.s1, wp.s2):
        assert np.max(np.abs(m.T @ m - np.eye(3))) < 1e-13
    assert np.max(np.abs(wp.s2 @ wp.y_axis(1) - wp.y_axis(1))) < 1e-13
    assert float(wp.mu0 @ wp.mu1) == pytest.approx(0.0, abs=1e-14)


def test_rotation_angle_limits():
    # delta -> 0: no rotation
    wp = _wp(phi=0.5 * math.pi - 1e-9)
    assert rotation_angle(wp) == pytest.approx(0.0, abs=1e-7)
    # delta^2 = 1/2: half turn; uniform disc reaches it at phi = pi/6
    wp = _wp(phi=math.pi / 6.0)
    assert wp.delta ** 2 == pytest.approx(0.5, abs=1e-15)
    assert rotation_angle(wp) == pytest.approx(math.pi, abs=1e-12)


def test_phi_for_period_examples():
    phi = phi_for_period(UNIFORM, 1, 3, "lower")
    assert math.cos(phi) == pytest.approx(math.sqrt(6.0) / 4.0, abs=1e-14)
    assert rotation_angle(_wp(phi)) == pytest.approx(2.0 * math.pi / 3.0,
                                                     abs=1e-12)
    phi = phi_for_period(UNIFORM, 1, 2, "upper")
    assert rotation_angle(_wp(phi)) == pytest.approx(math.pi, abs=1e-12)


def test_phi_for_period_validation():
    with pytest.raises(ValueError):
        phi_for_period(UNIFORM, 2, 4, "lower")
    with pytest.raises(ValueError):
        phi_for_period(UNIFORM, 1, 3, "middle")
    with pytest.raises(NoSolution):
        phi_for_period(UNIFORM, 1, 5, "upper")


def test_return_map_fixes_axis_and_conserves_psi():
    wp = _wp()
    st = return_map(wp, WedgeState(np.array([0.1, -0.2]), 1.3, 0.0))
    assert np.allclose(st.x, [0.1, -0.2], atol=1e-12)
    assert st.psi == pytest.approx(0.0, abs=1e-12)
    theta = rotation_angle(wp)
    st0 = WedgeState(np.array([0.02, 0.01]), 0.4, 0.25)
    st1 = return_map(wp, st0)
    assert (st1.varphi - st0.varphi) % (2.0 * math.pi) == pytest.approx(
        theta % (2.0 * math.pi), abs=1e-12)
    assert st1.psi == pytest.approx(st0.psi, abs=1e-12)


def test_return_map_equivariance_along_mu1():
    wp = _wp()
    st = WedgeState(np.array([0.03, -0.01]), 0.7, 0.2)
    shifted = WedgeState(st.x + 0.5 * wp.mu1[:2], st.varphi, st.psi)
    out = return_map(wp, st)
    out_shift = return_map(wp, shifted)
    assert np.allclose(out_shift.x - out.x, 0.5 * wp.mu1[:2], atol=1e-12)


def test_velocity_shift_reproduces_position_update():
    wp = _wp()
    st = WedgeState(np.array([0.05, -0.03]), 0.3, 0.2)
    out = return_map(wp, st)
    x3 = np.array([st.x[0], st.x[1], 0.0])
    vr = velocity_shift(wp, math.tan(st.psi), st.varphi)
    pred = x3 + float(wp.mu0 @ (x3 - wp.x0)) * vr
    assert np.allclose(out.x, pred[:2], atol=1e-13)


def test_coboundary_identity():
    wp = _wp()
    theta = rotation_angle(wp)
    r = 0.01
    for phi in np.linspace(-math.pi, math.pi, 101):
        lhs = 1.0 + float(wp.mu0 @ velocity_shift(wp, r, float(phi)))
        rhs = (invariant_density(wp, r, float(phi))
               / invariant_density(wp, r, float(phi) + theta))
        assert abs(lhs - rhs) < 1e-12


def test_invariant_density_positivity_guard():
    wp = _wp(phi=1.0)
    with pytest.raises(ValueError):
        invariant_density(wp, 2.0, 0.0)
    assert invariant_density(wp, 0.0, 1.0) == 1.0


def test_quotient_orbit_matches_iteration_and_stays_bounded():
    wp = _wp()
    st0 = WedgeState(np.array([0.02, 0.015]), 0.6, 0.12)
    r = math.tan(st0.psi)
    x3 = np.array([st0.x[0], st0.x[1], 0.0])
    xbar0 = float(wp.mu0 @ x3)
    orbit = quotient_orbit(wp, xbar0, st0.varphi, r, 20)
    cur = st0
    for k, (xbar_k, varphi_k) in enumerate(orbit, start=1):
        cur = return_map(wp, cur)
        xcur = float(wp.mu0 @ np.array([cur.x[0], cur.x[1], 0.0]))
        assert xcur == pytest.approx(xbar_k, abs=1e-9)
    # explicit bound from the density ratio
    xfix = float(wp.x0 @ wp.mu0)
    coeff = r * math.tan(wp.phi) / UNIFORM.sin_half_beta
    bound = (1.0 + coeff) / (1.0 - coeff) * abs(xbar0 - xfix)
    assert all(abs(x - xfix) <= bound + 1e-12 for x, _ in orbit)
    # r = 0 degenerates to a pure rotation
    flat = quotient_orbit(wp, xbar0, st0.varphi, 0.0, 5)
    assert all(x == pytest.approx(xbar0, abs=1e-15) for x, _ in flat)


def test_return_map_matches_simulation():
    wp = _wp(phi=0.7)
    tab = tables.wedge(0.7)
    st = WedgeState(np.array([0.01, -0.02]), 0.9, 0.05)
    closed = return_map(wp, st)
    simulated = simulate_return(tab, wp, st)
    assert np.allclose(simulated.x, closed.x, atol=1e-9)
    assert simulated.varphi == pytest.approx(closed.varphi, abs=1e-9)
    assert simulated.psi == pytest.approx(closed.psi, abs=1e-9)


def test_chart_velocity_roundtrip():
    wp = _wp()
    y = chart_velocity(wp, 1.1, 0.3)
    assert np.linalg.norm(y) == pytest.approx(1.0, abs=1e-14)
    varphi, psi = chart_angles(wp, y)
    assert varphi == pytest.approx(1.1, abs=1e-13)
    assert psi == pytest.approx(0.3, abs=1e-13)


def test_long_orbit_statistics_follow_invariant_density():
    # irrational rotation number: azimuths equidistribute uniformly while the
    # quotient position stays glued to the invariant graph set by the density
    wp = _wp(phi=phi_for_period(UNIFORM, 2, 13, "lower") + 0.013)
    st0 = WedgeState(np.array([0.02, -0.01]), 0.4, 0.12)
    r = math.tan(st0.psi)
    xfix = float(wp.x0 @ wp.mu0)
    xbar0 = float(wp.mu0 @ np.array([st0.x[0], st0.x[1], 0.0]))
    graph_const = invariant_density(wp, r, st0.varphi) * (xbar0 - xfix)
    n, bins = 20000, 16
    counts = np.zeros(bins)
    cur = st0
    for _ in range(n):
        cur = return_map(wp, cur)
        counts[int(((cur.varphi % (2.0 * math.pi)) / (2.0 * math.pi)) * bins)] += 1
        xbar = float(wp.mu0 @ np.array([cur.x[0], cur.x[1], 0.0]))
        assert (invariant_density(wp, r, cur.varphi) * (xbar - xfix)
                == pytest.approx(graph_const, abs=1e-8))
    # azimuth marginal is uniform (the return map rotates it rigidly)
    expected = n / bins
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    assert chi2 < 60.0
