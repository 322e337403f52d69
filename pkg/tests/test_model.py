"""Parameter container, unit conversion, and the physical input formulas.

The frozen reference numbers were computed with 40-digit mpmath arithmetic
from the exact SI values h = 6.62607015e-34 J s, k_B = 1.380649e-23 J/K and
c = 299792458 m/s (hbar omega written as h f to avoid the rounded-hbar
pitfall).
"""

import dataclasses
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ommlab import (
    ConfigError,
    DEFAULT_CONFIG,
    DomainError,
    config_snapshot,
    default_params,
    laser_drive_strength,
    params_from_mapping,
    rabi_frequency,
    thermal_occupation,
)
from ommlab.model import GYROMAGNETIC_RATIO, TWO_PI

# mpmath references (see module docstring)
N_B_40MHZ_10MK = 4.7251424406064838
N_M_10GHZ_10MK = 1.4359924589903224e-21
RABI_1MT = 20203152219677.293  # B0 = 1 mT, V = 1e-17 m^3, rho = 4.22e27 m^-3
DRIVE_44MW = 769624201277.7169  # P = 4.4 mW, kappa = 2 pi 2 MHz, 1064 nm


class TestThermalOccupation:
    def test_mechanical_reference_value(self):
        n = thermal_occupation(TWO_PI * 40e6, 0.01)
        assert n == pytest.approx(N_B_40MHZ_10MK, rel=1e-12)

    def test_magnon_reference_value(self):
        n = thermal_occupation(TWO_PI * 10e9, 0.01)
        assert n == pytest.approx(N_M_10GHZ_10MK, rel=1e-12)

    def test_zero_temperature_is_exactly_zero(self):
        assert thermal_occupation(TWO_PI * 40e6, 0.0) == 0.0

    def test_half_occupation_at_ln2_point(self):
        # hbar omega = k_B T ln 2  ->  exp = 2  ->  n = 1
        from scipy.constants import hbar, k as k_b

        t = 0.01
        omega = k_b * t * math.log(2.0) / hbar
        assert thermal_occupation(omega, t) == pytest.approx(1.0, rel=1e-12)

    def test_overflow_regime_returns_zero(self):
        # exponent ~ 7.6e11, exp() would overflow; occupation is exactly 0.0
        assert thermal_occupation(1e20, 1e-3) == 0.0

    def test_rejects_nonpositive_frequency(self):
        with pytest.raises(DomainError):
            thermal_occupation(0.0, 0.01)

    def test_rejects_negative_temperature(self):
        with pytest.raises(DomainError):
            thermal_occupation(TWO_PI * 40e6, -0.01)

    @given(
        omega=st.floats(1e5, 1e12),
        temperature=st.floats(1e-4, 10.0),
        factor=st.floats(1.01, 10.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_both_arguments(self, omega, temperature, factor):
        base = thermal_occupation(omega, temperature)
        assert thermal_occupation(omega * factor, temperature) <= base
        assert thermal_occupation(omega, temperature * factor) >= base

    def test_classical_limit(self):
        # hbar omega << k_B T: n -> k_B T / (hbar omega) - 1/2
        from scipy.constants import hbar, k as k_b

        omega, t = TWO_PI * 1e3, 1.0
        expected = k_b * t / (hbar * omega) - 0.5
        assert thermal_occupation(omega, t) == pytest.approx(expected, rel=1e-6)


class TestDriveFormulas:
    def test_rabi_reference_value(self):
        assert rabi_frequency(1e-3, 1e-17, 4.22e27) == pytest.approx(RABI_1MT, rel=1e-12)

    def test_rabi_scaling(self):
        base = rabi_frequency(1e-3, 1e-17, 4.22e27)
        assert rabi_frequency(2e-3, 1e-17, 4.22e27) == pytest.approx(2 * base, rel=1e-12)
        assert rabi_frequency(1e-3, 4e-17, 4.22e27) == pytest.approx(2 * base, rel=1e-12)
        assert rabi_frequency(1e-3, 1e-17, 4 * 4.22e27) == pytest.approx(2 * base, rel=1e-12)

    def test_rabi_prefactor(self):
        # Omega = (sqrt(5)/4) gamma sqrt(rho V) B0 with gamma = 2 pi 28 GHz/T
        got = rabi_frequency(1.0, 1.0, 1.0)
        assert got == pytest.approx(math.sqrt(5.0) / 4.0 * GYROMAGNETIC_RATIO, rel=1e-14)

    def test_drive_reference_value(self):
        e = laser_drive_strength(4.4e-3, TWO_PI * 2e6, 1064e-9)
        assert e == pytest.approx(DRIVE_44MW, rel=1e-12)

    def test_drive_scaling(self):
        base = laser_drive_strength(4.4e-3, TWO_PI * 2e6, 1064e-9)
        quad_p = laser_drive_strength(4 * 4.4e-3, TWO_PI * 2e6, 1064e-9)
        quad_k = laser_drive_strength(4.4e-3, 4 * TWO_PI * 2e6, 1064e-9)
        assert quad_p == pytest.approx(2 * base, rel=1e-12)
        assert quad_k == pytest.approx(2 * base, rel=1e-12)

    def test_drive_rejects_bad_inputs(self):
        with pytest.raises(DomainError):
            laser_drive_strength(-1e-3, TWO_PI * 2e6, 1064e-9)
        with pytest.raises(DomainError):
            laser_drive_strength(4.4e-3, 0.0, 1064e-9)
        with pytest.raises(DomainError):
            rabi_frequency(-1e-3, 1e-17, 4.22e27)


class TestConfigIngestion:
    def test_defaults_convert_to_angular_units(self):
        p = default_params()
        assert p.omega_b == TWO_PI * 40e6
        assert p.kappa_a == TWO_PI * 1e6
        assert p.kappa_c1 == TWO_PI * 2e6
        assert p.gamma_b == TWO_PI * 100.0
        assert p.g_n1 == TWO_PI * 4e6
        assert p.g_c_eff == TWO_PI * 8e6
        assert p.g_mb_eff == TWO_PI * 2.5e6

    def test_detunings_are_multiples_of_omega_b(self):
        p = default_params(delta_a_over_wb=-0.5)
        assert p.delta_a == -0.5 * p.omega_b
        assert p.delta_c1 == -0.8 * p.omega_b
        assert p.delta_m == 1.0 * p.omega_b

    def test_unknown_keys_are_named(self):
        with pytest.raises(ConfigError, match="temperature"):
            default_params(temperature=0.1)
        with pytest.raises(ConfigError, match="kappa_a_khz"):
            default_params(kappa_a_khz=1.0)

    def test_negative_temperature_rejected(self):
        with pytest.raises(ConfigError, match="temperature"):
            default_params(T=-0.01)

    def test_bool_is_not_a_number(self):
        with pytest.raises(ConfigError):
            default_params(T=True)

    def test_non_finite_rejected(self):
        with pytest.raises(ConfigError, match="finite"):
            default_params(delta_a_over_wb=float("nan"))

    def test_delta_c2_sign_must_be_unit(self):
        assert default_params(delta_c2_sign=1.0).delta_c2_sign == 1.0
        with pytest.raises(ConfigError):
            default_params(delta_c2_sign=0.5)

    def test_backaction_placement_enum(self):
        assert default_params(g_c_backaction="x_quadrature").g_c_backaction == "x_quadrature"
        with pytest.raises(ConfigError):
            default_params(g_c_backaction="z_quadrature")

    def test_eq9_verbatim_must_be_bool(self):
        with pytest.raises(ConfigError, match="eq9_verbatim"):
            default_params(eq9_verbatim=1)

    def test_derived_mode_clears_effective_couplings(self):
        p = default_params(coupling_mode="derived", b_field_t=1.1e-3, g_c_hz=1.5e3)
        assert p.g_c_eff is None and p.g_mb_eff is None
        assert p.b_field == 1.1e-3

    def test_derived_mode_rejects_explicit_effective_coupling(self):
        with pytest.raises(ConfigError, match="exactly one source"):
            default_params(
                coupling_mode="derived", b_field_t=1.1e-3, g_c_hz=1.5e3, g_c_eff_hz=8e6
            )

    def test_derived_mode_needs_field_and_bare_couplings(self):
        with pytest.raises(ConfigError, match="b_field"):
            default_params(coupling_mode="derived", g_c_hz=1.5e3)
        with pytest.raises(ConfigError, match="bare g_c"):
            default_params(coupling_mode="derived", b_field_t=1.1e-3)  # g_c defaults to 0

    def test_direct_mode_needs_effective_couplings(self):
        with pytest.raises(ConfigError):
            default_params(g_c_eff_hz=None)

    def test_mapping_and_kwargs_agree(self):
        via_mapping = params_from_mapping({"delta_c2_over_wb": -0.9, "T": 0.2})
        via_kwargs = default_params(delta_c2_over_wb=-0.9, T=0.2)
        assert via_mapping == via_kwargs

    def test_snapshot_round_trips(self):
        p = default_params(delta_c2_over_wb=-1.1, T=0.123, theta_c_rad=0.4)
        snap = config_snapshot(p)
        assert set(snap) == set(DEFAULT_CONFIG)
        q = params_from_mapping(snap)
        for f in dataclasses.fields(p):
            a, b = getattr(p, f.name), getattr(q, f.name)
            if isinstance(a, float):
                assert b == pytest.approx(a, rel=1e-12), f.name
            else:
                assert a == b, f.name

    def test_snapshot_reports_config_units(self):
        snap = config_snapshot(default_params())
        assert snap["kappa_c2_hz"] == pytest.approx(2e6, rel=1e-12)
        assert snap["delta_a_over_wb"] == pytest.approx(-0.95, rel=1e-12)
        assert snap["T"] == 0.01
        assert snap["b_field_t"] is None

    def test_params_are_frozen(self):
        p = default_params()
        with pytest.raises(dataclasses.FrozenInstanceError):
            p.kappa_a = 1.0
