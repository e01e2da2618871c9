import numpy as np
import pytest

from optomech import quadratures as qd
from optomech.core import SystemParams

from conftest import rates


def bae(omega_m=20.0, gamma_l=0.0, n_max=1e2, gamma_m=1e-3, n_th=0.0, **kw):
    return rates(omega_m=omega_m, gamma_l=gamma_l, n_max=n_max, gamma_m=gamma_m, n_th=n_th, g0=1e-3, **kw)


def test_undriven_floor():
    p = bae(n_th=4.0).replace(power=0.0)
    v = qd.quadrature_variances(p)
    assert v.var_x == v.var_y == v.thermal_floor == 4.5


def test_zero_linewidth_excess():
    for om in (0.8, 2.0, 10.0):
        p = bae(omega_m=om)
        v = qd.quadrature_variances(p)
        pump = p.b0_sq * p.g0**2 / p.gamma_m
        excess = 32 * pump * (4 * om**2 - 1) / (1 + 4 * om**2) ** 2
        assert v.y_excess == pytest.approx(excess, rel=1e-12)
        assert v.y_excess > 0
        ref_x, ref_y = qd.reference_variances_zero_gamma(p)
        assert (v.var_x, v.var_y) == pytest.approx((ref_x, ref_y), rel=1e-12)


def test_structure_and_floor():
    v = qd.quadrature_variances(bae(gamma_l=0.05, n_th=1.0))
    assert v.var_x == pytest.approx(v.thermal_floor + v.ba_x)
    assert v.var_y == pytest.approx(v.var_x + v.y_excess)
    assert v.var_x >= v.thermal_floor and v.var_y >= v.thermal_floor


def test_linear_in_power():
    p = bae(gamma_l=0.1)
    a, b = qd.quadrature_variances(p), qd.quadrature_variances(p.replace(power=3 * p.power))
    assert b.ba_x == pytest.approx(3 * a.ba_x, rel=1e-13)
    assert b.ba_y == pytest.approx(3 * a.ba_y, rel=1e-13)


@pytest.mark.parametrize("omega", [20.0, 40.0, 100.0])
@pytest.mark.parametrize("gamma", [0.0, 0.05, 0.1])
def test_good_cavity_agreement(omega, gamma):
    p = bae(omega_m=omega, gamma_l=gamma)
    full, good = qd.quadrature_variances(p), qd.quadrature_variances_good_cavity(p)
    assert good.var_x == pytest.approx(full.var_x, rel=0.02)
    assert good.var_y == pytest.approx(full.var_y, rel=0.02)
    assert good.ba_x == pytest.approx(full.ba_x, rel=0.02)


def test_protection_factor(rng):
    for _ in range(20):
        om, k = 10 ** rng.uniform(0, 3), 10 ** rng.uniform(-2, 0)
        p = SystemParams.from_rates(om, k, g0=1e-3, n_max=10.0, gamma_m=1e-3 * k)
        v = qd.quadrature_variances_good_cavity(p)
        assert (v.ba_y - v.ba_x) / v.ba_x == pytest.approx(32 * om**2 / (9 * k**2), rel=1e-12)


def test_good_cavity_linewidth_slopes():
    p = bae(omega_m=40.0)
    pump = p.b0_sq * p.g0**2 / p.gamma_m
    h = 1e-3
    lo = qd.quadrature_variances_good_cavity(p)
    hi = qd.quadrature_variances_good_cavity(p.replace(gamma_l=h))
    assert (hi.ba_x - lo.ba_x) / h == pytest.approx(pump * 9 * 2 / (4 * 40.0**4), rel=1e-9)
    assert hi.y_excess < lo.y_excess
    assert hi.var_x > lo.var_x
    # the sine quadrature carries a negative linear term in gamma
    slope_y = pump * (9 * 2 / (4 * 40.0**4) - 16 / 40.0**2 + 16 / 40.0**4)
    assert (hi.var_y - lo.var_y) / h == pytest.approx(slope_y, rel=1e-9)
    assert slope_y < 0


def test_y_excess_nonnegative_and_variances_nondecreasing():
    for om in (10.0, 20.0, 40.0):
        gammas = np.linspace(0, 0.5, 26)
        vs = [qd.quadrature_variances(bae(omega_m=om, gamma_l=g)) for g in gammas]
        assert all(v.y_excess >= 0 for v in vs)
        assert np.all(np.diff([v.var_x for v in vs]) >= 0)
        assert np.all(np.diff([v.y_excess for v in vs]) <= 0)


def test_heating_ratio_limits_and_trends():
    p = bae(omega_m=40.0, n_th=5.0)
    assert qd.heating_ratio(p) == pytest.approx(9 / (32 * 40.0**2), rel=0.02)
    for om in (2.0, 5.0, 10.0):
        r = [qd.heating_ratio(bae(omega_m=om, gamma_l=g)) for g in np.linspace(0, 0.5, 11)]
        assert np.all(np.diff(r) > 0)
    r = [qd.heating_ratio(bae(omega_m=om)) for om in np.linspace(1, 10, 19)]
    assert np.all(np.diff(r) < 0)


def test_validity_grades():
    assert qd.validity(bae(omega_m=10.0, gamma_l=0.01)) == "ok"
    assert qd.validity(bae(omega_m=10.0, gamma_l=0.3)) == "marginal"
    assert qd.validity(bae(omega_m=10.0, gamma_l=0.8)) == "outside"
    assert qd.quadrature_variances_good_cavity(bae(omega_m=5.0)).validity == "marginal"


def test_requires_mechanical_damping():
    with pytest.raises(ValueError):
        qd.quadrature_variances(bae(gamma_m=0.0))


def test_trajectory_quadratures_constant_for_free_motion():
    p = bae(omega_m=3.0)
    t = np.linspace(0, 10, 501)
    x0 = 2.5 * p.x_zpt
    x = x0 * np.sin(p.omega_m * t)
    mom = p.mass * p.omega_m * x0 * np.cos(p.omega_m * t)
    X, Y = qd.quadrature_trajectory(x, mom, p, t)
    assert np.ptp(X) < 1e-12 * np.abs(X).max() + 1e-12
    assert np.ptp(Y) < 1e-12 * np.abs(Y).max() + 1e-12
    X0, Y0 = qd.quadrature_trajectory(1.3 * p.x_zpt, 0.0, p, 0.0)
    assert Y0 == 0 and X0 == pytest.approx(1.3 / np.sqrt(2))
    X0, Y0 = qd.quadrature_trajectory(0.0, 1.0, p, 0.0)
    assert X0 == 0 and Y0 > 0


def test_trajectory_quadratures_thermal_normalisation(rng):
    # classical thermal state with <x^2> = 2 n x_zpt^2 and matching momentum
    p = bae(omega_m=3.0)
    n = 7.0
    x = rng.normal(0, np.sqrt(2 * n) * p.x_zpt, 200_000)
    mom = rng.normal(0, np.sqrt(2 * n) * p.mass * p.omega_m * p.x_zpt, 200_000)
    X, Y = qd.quadrature_trajectory(x, mom, p, 0.37)
    assert X.var() == pytest.approx(n, rel=0.02)
    assert Y.var() == pytest.approx(n, rel=0.02)
