"""Tests for qubit gate construction, power-law fits, and gamma maps."""

import math

import numpy as np
import pytest

from fibdrive import bigmat as bm
from fibdrive import drive as dr
from fibdrive import sweep as sw
from fibdrive.drive import DecaySeries


def test_qubit_gates_closed_forms():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    # theta3 = pi/2 makes the second gate a pure X rotation
    a0, a1 = sw.qubit_gates(sw.QubitAngles(0.3, 0.7, math.pi / 2))
    expected = math.cos(0.7) * np.eye(2) - 1j * math.sin(0.7) * x
    assert np.allclose(a1.data, expected, atol=1e-14)
    # theta1 = 0 gives the identity
    a0, _ = sw.qubit_gates(sw.QubitAngles(0.0, 0.7, math.pi / 2))
    assert np.allclose(a0.data, np.eye(2), atol=1e-14)
    # theta2 = theta3 = pi/2: the second gate is -iX
    _, a1 = sw.qubit_gates(sw.QubitAngles(0.3, math.pi / 2, math.pi / 2))
    assert np.allclose(a1.data, -1j * x, atol=1e-14)


def test_qubit_gates_su2():
    for pol in (bm.DOUBLE, bm.bigfloat(128)):
        a0, a1 = sw.qubit_gates(sw.QubitAngles(0.4, 1.1, 1.0), pol)
        for u in (a0, a1):
            defect = bm.operator_norm(bm.CMatrix.identity(2, pol) - u @ u.H)
            assert defect <= 1000 * pol.eps
            det = u.data[0, 0] * u.data[1, 1] - u.data[0, 1] * u.data[1, 0]
            assert abs(complex(det) - 1) <= 1e-12


def test_powerlaw_fit_exact_half():
    times = [2 ** i for i in range(1, 14)]
    series = DecaySeries(times=times, deltas=[3.0 * t ** -0.5 for t in times],
                         epsilons=[0] * len(times), bits=[53] * len(times))
    fit = sw.powerlaw_fit(series, window=(0, len(times) - 1))
    assert abs(fit.gamma - 0.5) < 1e-12
    assert fit.residual < 1e-12


def test_powerlaw_fit_constant():
    times = [2 ** i for i in range(1, 12)]
    series = DecaySeries(times=times, deltas=[0.25] * len(times),
                         epsilons=[0] * len(times), bits=[53] * len(times))
    fit = sw.powerlaw_fit(series, window=(0, len(times) - 1))
    assert abs(fit.gamma) < 1e-12


def test_powerlaw_fit_rejects_bad_windows():
    times = [1, 2, 3, 4, 5, 6]
    series = DecaySeries(times=times, deltas=[1, 1, 1, 0.0, 1, 1],
                         epsilons=[0] * 6, bits=[53] * 6)
    with pytest.raises(ValueError):
        sw.powerlaw_fit(series, window=(0, 5))  # nonpositive delta inside
    series2 = DecaySeries(times=times, deltas=[1] * 6,
                          epsilons=[0] * 6, bits=[53] * 6)
    with pytest.raises(ValueError):
        sw.powerlaw_fit(series2, window=(0, 2))  # fewer than 4 points


def test_zeta_values():
    mk = lambda g: sw.FitResult(gamma=g, intercept=0, residual=0,
                                gamma_stderr=0, window=(0, 1))
    assert sw.zeta(mk(0.5), mk(0.5)) == 0
    assert abs(sw.zeta(mk(0.55), mk(0.5)) - 0.1) < 1e-14
    assert math.isinf(sw.zeta(mk(0.3), mk(0.0)))
    assert sw.zeta(mk(0.52), mk(0.5)) < sw.ZETA_CONVERGED


def test_degenerate_axis_theta3_zero():
    # theta3 = 0: both gates are Z rotations; |0> never moves
    spec = sw.qubit_drive(sw.QubitAngles(0.4, 0.9, 0.0))
    series, _ = dr.decay_series(spec, 1, np.array([1.0, 0.0]), 12,
                                start_policy=bm.DOUBLE, escalate=False)
    assert max(abs(float(x) - 0.5) for x in series.deltas) < 1e-12


def test_gamma_point_state_independence():
    angles = sw.QubitAngles(0.39 * math.pi, 0.39 * math.pi, math.pi / 2)
    _, fit_a, _, _, _ = sw.gamma_point(angles, 2, 80, n_states=2, seed=1)
    _, fit_b, _, _, _ = sw.gamma_point(angles, 2, 80, n_states=2, seed=999)
    tol = max(0.05, 3 * max(fit_a.gamma_stderr, fit_b.gamma_stderr))
    assert abs(fit_a.gamma - fit_b.gamma) <= tol


def test_gamma_map_deterministic_and_ordered():
    grid1 = [0.2 * math.pi, 0.39 * math.pi]
    grid2 = [0.39 * math.pi]
    rows_a = sw.gamma_map(grid1, grid2, math.pi / 2, 2, 40, seed=5)
    rows_b = sw.gamma_map(grid1, grid2, math.pi / 2, 2, 40, seed=5)
    assert [(r.theta1, r.theta2, r.gamma, r.zeta) for r in rows_a] == \
           [(r.theta1, r.theta2, r.gamma, r.zeta) for r in rows_b]
    assert rows_a[0].theta1 == grid1[0] and rows_a[1].theta1 == grid1[1]


def test_gamma_symmetry_under_angle_swap():
    # at theta3 = pi/2 the two gates are dual under a global X<->Z rotation
    a = sw.gamma_point(sw.QubitAngles(0.23 * math.pi, 0.37 * math.pi, math.pi / 2),
                       2, 70, n_states=2, seed=11)[1]
    b = sw.gamma_point(sw.QubitAngles(0.37 * math.pi, 0.23 * math.pi, math.pi / 2),
                       2, 70, n_states=2, seed=11)[1]
    tol = max(0.05, 3 * max(a.gamma_stderr, b.gamma_stderr))
    assert abs(a.gamma - b.gamma) <= tol


def test_default_window_drops_transient():
    assert sw.default_window(100) == (20, 99)
    assert sw.default_window(10) == (2, 9)


def test_near_unit_exponent_point():
    # the tilted-axis point (0.30 pi, 0.33 pi, 0.4 pi) shows an unusually
    # fast k=2 decay with exponent near one at desk scale
    spec = sw.qubit_drive(sw.QubitAngles(0.30 * math.pi, 0.33 * math.pi,
                                         0.4 * math.pi))
    series, ledger = dr.decay_series(spec, 2, np.array([1.0, 0.0]), 200,
                                     start_policy=bm.bigfloat(512),
                                     escalate=False)
    assert ledger.is_green()
    fit = sw.powerlaw_fit(series)
    assert abs(fit.gamma - 1.0) <= 0.2
