import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optomech.core import (
    HBAR,
    K_B,
    SystemParams,
    cav_susceptibility,
    derive_scales,
    dump_params,
    inverse_mech_susceptibility,
    load_params,
    mech_susceptibility,
    params_from_mapping,
    parse_keyvalue,
)
from optomech.errors import ConfigError, ConfigMissing, PoleOnRealAxis

from conftest import rates


def test_mech_susceptibility_on_resonance():
    p = SystemParams(omega_m=10.0, gamma_m=1.0)
    assert mech_susceptibility(p, 10.0) == pytest.approx(2.0 + 0j)


def test_mech_susceptibility_decays_far_away():
    p = SystemParams(omega_m=10.0, gamma_m=1.0)
    assert abs(mech_susceptibility(p, 1e12)) < 1e-11
    assert abs(mech_susceptibility(p, -1e12)) < 1e-11


def test_mech_susceptibility_modulus():
    p = SystemParams(omega_m=5.0, gamma_m=0.1)
    assert abs(mech_susceptibility(p, 5.05)) == pytest.approx(1 / math.hypot(0.05, 0.05))


@pytest.mark.parametrize(
    "kappa,detuning,omega,expected",
    [(2.0, 0.0, 0.0, 1.0), (2.0, -3.0, 3.0, 1.0), (1.0, 0.0, 0.5, 1 + 1j)],
)
def test_cav_susceptibility_examples(kappa, detuning, omega, expected):
    p = SystemParams(omega_m=1.0, kappa=kappa, detuning=detuning)
    assert cav_susceptibility(p, omega) == pytest.approx(expected)


def test_susceptibility_peaks():
    p = SystemParams(omega_m=3.0, gamma_m=0.2, kappa=0.7, detuning=-1.5)
    w = np.linspace(-6, 6, 12001)
    assert w[np.argmax(np.abs(mech_susceptibility(p, w)))] == pytest.approx(3.0)
    assert w[np.argmax(np.abs(cav_susceptibility(p, w)))] == pytest.approx(1.5)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0.01, 100), st.floats(1e-3, 10), st.floats(-200, 200),
)
def test_mech_susceptibility_inverse_identity(omega_m, gamma_m, w):
    p = SystemParams(omega_m=omega_m, gamma_m=gamma_m)
    chi = mech_susceptibility(p, w)
    residual = chi * (gamma_m / 2 - 1j * (w - omega_m))
    assert abs(residual - 1) < 1e-12
    assert inverse_mech_susceptibility(p, w) * chi == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 10), st.floats(-10, 10), st.floats(-50, 50))
def test_cavity_is_mechanical_form_under_substitution(kappa, detuning, w):
    cav = SystemParams(omega_m=1.0, kappa=kappa, detuning=detuning)
    chi_r = cav_susceptibility(cav, w)
    # chi_M with Gamma -> kappa and Omega -> -Delta, written out
    chi_m_sub = 1.0 / (kappa / 2 - 1j * (w + detuning))
    assert chi_r == pytest.approx(chi_m_sub, rel=1e-12)


def test_undamped_pole_on_axis():
    with pytest.raises(PoleOnRealAxis):
        mech_susceptibility(SystemParams(omega_m=1.0), 1.0)


def test_derived_scales_zero_drive():
    s = derive_scales(SystemParams(omega_m=1.0, power=0.0))
    assert (s.n_max, s.b0_sq, abs(s.B0)) == (0.0, 0.0, 0.0)


def test_resonant_field_equals_n_max():
    p = rates(n_max=250.0, detuning=0.0)
    s = derive_scales(p)
    assert s.n_max == pytest.approx(250.0)
    assert abs(s.B0) ** 2 == pytest.approx(s.n_max)


def test_detuned_field_below_bound_and_linear_in_power():
    p = rates(n_max=100.0, detuning=-2.0)
    s = derive_scales(p)
    assert abs(s.B0) ** 2 < s.b0_sq * 4 / p.kappa
    s2 = derive_scales(p.replace(power=2 * p.power))
    for a, b in [(s.n_max, s2.n_max), (s.b0_sq, s2.b0_sq), (abs(s.B0) ** 2, abs(s2.B0) ** 2)]:
        assert b == pytest.approx(2 * a)


def test_from_rates_recovers_coupling():
    p = SystemParams.from_rates(40 * 2e5, 2e5, g0=50.0, n_max=1e11)
    assert p.g0 == pytest.approx(50.0)
    assert p.n_max == pytest.approx(1e11)
    assert p.x_zpt == pytest.approx(math.sqrt(HBAR / (2 * p.mass * p.omega_m)))


def test_from_rates_requires_one_drive():
    with pytest.raises(ConfigError):
        SystemParams.from_rates(1.0, g0=1.0)
    with pytest.raises(ConfigError):
        SystemParams.from_rates(1.0, g0=1.0, n_max=1.0, power=1.0)


@pytest.mark.parametrize(
    "field,value", [("omega_m", 0.0), ("kappa", -1.0), ("gamma_l", -0.1), ("power", -1.0), ("mass", 0.0)]
)
def test_invalid_fields_rejected(field, value):
    kw = {"omega_m": 1.0, field: value}
    with pytest.raises(ConfigError):
        SystemParams(**kw)


def test_nonfinite_rejected():
    with pytest.raises(ConfigError):
        SystemParams(omega_m=float("nan"))


def test_temperature_conversion_and_precedence():
    p = SystemParams(omega_m=1e6, t_eff=0.1)
    assert p.n_th == pytest.approx(K_B * 0.1 / (HBAR * 1e6))
    assert p.temperature == pytest.approx(0.1)
    q = SystemParams(omega_m=1e6, t_eff=0.1, n_th=3.0)
    assert q.n_th == 3.0
    assert any("n_th" in w for w in q.warnings)
    # changing the frequency re-derives n_th from the temperature
    assert p.replace(omega_m=2e6).n_th == pytest.approx(p.n_th / 2)
    assert q.replace(omega_m=2e6).n_th == 3.0


def test_keyvalue_and_json_round_trip(tmp_path):
    p = rates(omega_m=3.0, detuning=-3.0, gamma_l=0.2, gamma_m=1e-3, n_th=2.0)
    for name in ("p.cfg", "p.json"):
        path = tmp_path / name
        dump_params(p, path)
        assert load_params(path) == p


def test_keyvalue_parser_comments():
    text = "# header\nomega_m = 2.0  # trailing\n\nkappa=3\n"
    assert parse_keyvalue(text) == {"omega_m": "2.0", "kappa": "3"}
    with pytest.raises(ConfigError):
        parse_keyvalue("omega_m 2")


def test_mapping_with_rates_and_base(tmp_path):
    p = params_from_mapping({"omega_m": "4", "g0": "1e-3", "n_max": 100, "kappa": 1.0, "junk": "x"})
    assert p.g0 == pytest.approx(1e-3)
    assert p.n_max == pytest.approx(100.0)
    q = params_from_mapping({"detuning": -4.0}, base=p)
    assert q.detuning == -4.0 and q.mass == p.mass
    with pytest.raises(ConfigMissing):
        params_from_mapping({"kappa": 1.0})
    with pytest.raises(ConfigError):
        params_from_mapping({"omega_m": "fast"})
    with pytest.raises(ConfigMissing):
        load_params(tmp_path / "absent.cfg")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([1, 2]))
    with pytest.raises(ConfigError):
        load_params(bad)
