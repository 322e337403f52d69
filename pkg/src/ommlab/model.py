"""System parameters, unit conventions, and elementary physics helpers.

Everything downstream works in angular units (rad/s). Configuration happens in
laboratory units (Hz for rates and couplings, multiples of the mechanical
frequency for detunings, kelvin for temperature); the conversion happens here,
exactly once, when a parameter set is built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Any, Mapping

from scipy.constants import c as _c_light
from scipy.constants import hbar as _hbar
from scipy.constants import k as _k_boltzmann

from .errors import ConfigError, DomainError

TWO_PI = 2.0 * math.pi

#: Gyromagnetic ratio of the ferrimagnetic spin ensemble, rad s^-1 T^-1.
GYROMAGNETIC_RATIO = TWO_PI * 28e9

#: Argument cutoff for the Bose factor: exp(x) overflows double precision
#: near x = 710, and the occupation is already ~1e-304 there.
_BOSE_OVERFLOW_CUTOFF = 700.0

_COUPLING_MODES = ("direct", "derived")
_BACKACTION_PLACEMENTS = ("y_quadrature", "x_quadrature")
_C2_FORMULAS = ("linsolve", "closed_form")


@dataclass(frozen=True)
class SystemParams:
    """Immutable parameter set for the five-mode system, in rad/s and SI.

    Mode frequencies, decay rates, detunings, and couplings are angular
    (rad/s). Drive-power fields stay in SI and only matter when
    ``coupling_mode == "derived"``; in direct mode they ride along as
    metadata.

    Convention knobs:

    delta_c2_sign
        Sign applied to ``delta_c2`` before the radiation-pressure shift.
        Quoted operating points for this system state the driven cavity's
        detuning in the opposite sense to the Langevin convention used by the
        drift builder; the default -1.0 maps the quoted red-detuned values
        onto the cooling branch that produces the reported entanglement.
        Set +1.0 to read delta_c2 in the same sense as the other detunings.
    g_c_backaction
        Which cavity quadrature the mechanical backaction row couples to.
        "y_quadrature" (default) is the placement generated by the quadratic
        interaction Hamiltonian and keeps the dynamics symplectic;
        "x_quadrature" places the backaction on the driven quadrature itself,
        which no Hamiltonian generates but is retained for convention studies.
    theta_c, theta_m
        Extra quadrature-rotation angles applied to the cavity-2 and magnon
        coupling phases inside the drift builder.
    """

    omega_m: float
    omega_b: float
    kappa_a: float
    kappa_c1: float
    kappa_c2: float
    kappa_m: float
    gamma_b: float
    g_n1: float
    g_n2: float
    g_c: float
    g_m: float
    g_c_eff: float | None
    g_mb_eff: float | None
    delta_a: float
    delta_c1: float
    delta_c2: float
    delta_m: float
    temperature: float
    p_laser: float
    lambda_laser: float
    p_microwave: float
    b_field: float | None
    v_yig: float
    rho_spin: float
    coupling_mode: str
    delta_c2_sign: float
    g_c_backaction: str
    theta_c: float
    theta_m: float
    eq9_verbatim: bool
    c2_formula: str

    def __post_init__(self) -> None:
        for name in ("omega_m", "omega_b"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be strictly positive")
        for name in ("kappa_a", "kappa_c1", "kappa_c2", "kappa_m", "gamma_b"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"decay rate {name} must be strictly positive")
        for name in ("g_n1", "g_n2", "g_c", "g_m"):
            if getattr(self, name) < 0.0:
                raise DomainError(f"coupling {name} must be non-negative")
        if self.temperature < 0.0:
            raise DomainError("temperature must be non-negative (kelvin)")
        for name in ("p_laser", "p_microwave"):
            if getattr(self, name) < 0.0:
                raise DomainError(f"{name} must be non-negative")
        for name in ("lambda_laser", "v_yig", "rho_spin"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be strictly positive")
        if self.b_field is not None and self.b_field < 0.0:
            raise DomainError("b_field must be non-negative")
        if self.coupling_mode not in _COUPLING_MODES:
            raise DomainError(
                f"coupling_mode must be one of {_COUPLING_MODES}, got {self.coupling_mode!r}"
            )
        if self.g_c_backaction not in _BACKACTION_PLACEMENTS:
            raise DomainError(
                "g_c_backaction must be one of "
                f"{_BACKACTION_PLACEMENTS}, got {self.g_c_backaction!r}"
            )
        if self.c2_formula not in _C2_FORMULAS:
            raise DomainError(
                f"c2_formula must be one of {_C2_FORMULAS}, got {self.c2_formula!r}"
            )
        if self.delta_c2_sign not in (1.0, -1.0):
            raise DomainError("delta_c2_sign must be +1.0 or -1.0")
        for name in ("theta_c", "theta_m"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.coupling_mode == "direct":
            if self.g_c_eff is None or self.g_mb_eff is None:
                raise DomainError(
                    "direct coupling mode needs explicit g_c_eff and g_mb_eff"
                )
            if self.g_c_eff < 0.0 or self.g_mb_eff < 0.0:
                raise DomainError("effective couplings must be non-negative")
        else:
            if self.g_c_eff is not None or self.g_mb_eff is not None:
                raise DomainError(
                    "derived coupling mode must not carry direct effective "
                    "couplings; exactly one source per coupling is allowed"
                )
            if self.b_field is None:
                raise DomainError("derived coupling mode needs b_field (tesla)")
            if not (self.g_c > 0.0 and self.g_m > 0.0):
                raise DomainError(
                    "derived coupling mode needs strictly positive bare g_c and g_m"
                )
            if not self.p_laser > 0.0:
                raise DomainError("derived coupling mode needs strictly positive p_laser")


def thermal_occupation(omega: float, temperature: float) -> float:
    """Mean thermal occupation of a bath mode at angular frequency omega.

    Returns 1/(exp(hbar omega / k_B T) - 1), computed with expm1 so small
    arguments stay accurate. Exactly 0.0 at zero temperature, and 0.0 once
    the exponent would overflow double precision (the true value is below
    the smallest normal float long before that).
    """
    if omega <= 0.0:
        raise DomainError("omega must be strictly positive")
    if temperature < 0.0:
        raise DomainError("temperature must be non-negative")
    if temperature == 0.0:
        return 0.0
    x = _hbar * omega / (_k_boltzmann * temperature)
    if x > _BOSE_OVERFLOW_CUTOFF:
        return 0.0
    return 1.0 / math.expm1(x)


def rabi_frequency(b_field: float, volume: float, spin_density: float) -> float:
    """Collective Rabi frequency of the driven magnon mode, rad/s.

    Omega = (sqrt(5)/4) gamma sqrt(rho V) B_0 for a fully polarized
    ferrimagnetic sphere of volume V, spin density rho, in a drive field of
    amplitude B_0.
    """
    if b_field < 0.0:
        raise DomainError("b_field must be non-negative")
    if volume <= 0.0 or spin_density <= 0.0:
        raise DomainError("volume and spin_density must be strictly positive")
    return (math.sqrt(5.0) / 4.0) * GYROMAGNETIC_RATIO * math.sqrt(spin_density * volume) * b_field


def laser_drive_strength(power: float, kappa: float, wavelength: float) -> float:
    """Coherent drive amplitude E = sqrt(2 P kappa / (hbar omega_L)), rad/s.

    omega_L is the laser angular frequency 2 pi c / wavelength and kappa the
    decay rate of the driven cavity.
    """
    if power < 0.0:
        raise DomainError("power must be non-negative")
    if kappa <= 0.0:
        raise DomainError("kappa must be strictly positive")
    if wavelength <= 0.0:
        raise DomainError("wavelength must be strictly positive")
    omega_l = TWO_PI * _c_light / wavelength
    return math.sqrt(2.0 * power * kappa / (_hbar * omega_l))


# ---------------------------------------------------------------------------
# configuration ingestion
# ---------------------------------------------------------------------------

#: Default operating point, in configuration units.
DEFAULT_CONFIG: dict[str, Any] = {
    "omega_m_hz": 10e9,
    "omega_b_hz": 40e6,
    "kappa_a_hz": 1e6,
    "kappa_c1_hz": 2e6,
    "kappa_c2_hz": 2e6,
    "kappa_m_hz": 1e6,
    "gamma_b_hz": 100.0,
    "g_n1_hz": 4e6,
    "g_n2_hz": 8e6,
    "g_c_hz": 0.0,
    "g_m_hz": 20.0,
    "g_c_eff_hz": 8e6,
    "g_mb_eff_hz": 2.5e6,
    "delta_a_over_wb": -0.95,
    "delta_c1_over_wb": -0.8,
    "delta_c2_over_wb": -0.8,
    "delta_m_over_wb": 1.0,
    "T": 0.01,
    "p_laser_w": 4.4e-3,
    "lambda_laser_m": 1064e-9,
    "p_microwave_w": 1.44e-3,
    "b_field_t": None,
    "v_yig_m3": 1e-17,
    "rho_spin_m3": 4.22e27,
    "coupling_mode": "direct",
    "delta_c2_sign": -1.0,
    "g_c_backaction": "y_quadrature",
    "theta_c_rad": 0.0,
    "theta_m_rad": 0.0,
    "eq9_verbatim": False,
    "c2_formula": "linsolve",
}

#: Configuration keys that set model parameters (harness-level keys like
#: "sweep" and "pairs" are stripped before this module sees the mapping).
PARAM_KEYS = frozenset(DEFAULT_CONFIG)

_HZ_KEYS = {
    "omega_m_hz": "omega_m",
    "omega_b_hz": "omega_b",
    "kappa_a_hz": "kappa_a",
    "kappa_c1_hz": "kappa_c1",
    "kappa_c2_hz": "kappa_c2",
    "kappa_m_hz": "kappa_m",
    "gamma_b_hz": "gamma_b",
    "g_n1_hz": "g_n1",
    "g_n2_hz": "g_n2",
    "g_c_hz": "g_c",
    "g_m_hz": "g_m",
}

_DETUNING_KEYS = {
    "delta_a_over_wb": "delta_a",
    "delta_c1_over_wb": "delta_c1",
    "delta_c2_over_wb": "delta_c2",
    "delta_m_over_wb": "delta_m",
}

_SI_KEYS = {
    "p_laser_w": "p_laser",
    "lambda_laser_m": "lambda_laser",
    "p_microwave_w": "p_microwave",
    "v_yig_m3": "v_yig",
    "rho_spin_m3": "rho_spin",
}

_STR_KEYS = {
    "coupling_mode": "coupling_mode",
    "g_c_backaction": "g_c_backaction",
    "c2_formula": "c2_formula",
}


def _require_real(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config key {key!r} must be a real number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise ConfigError(f"config key {key!r} must be finite, got {value!r}")
    return v


def params_from_mapping(mapping: Mapping[str, Any]) -> SystemParams:
    """Build a validated :class:`SystemParams` from a configuration mapping.

    Keys absent from the mapping take their defaults; unknown keys are an
    error that names them. This is the single place where Hz turn into rad/s
    and detuning multiples turn into absolute detunings.
    """
    unknown = sorted(set(mapping) - PARAM_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")

    merged = dict(DEFAULT_CONFIG)
    merged.update(mapping)

    if merged["coupling_mode"] == "derived":
        for key in ("g_c_eff_hz", "g_mb_eff_hz"):
            if key in mapping and mapping[key] is not None:
                raise ConfigError(
                    f"config key {key!r} conflicts with coupling_mode='derived'; "
                    "exactly one source per coupling is allowed"
                )
            merged[key] = None

    kwargs: dict[str, Any] = {}
    for key, field in _HZ_KEYS.items():
        kwargs[field] = TWO_PI * _require_real(key, merged[key])
    omega_b = kwargs["omega_b"]
    for key, field in _DETUNING_KEYS.items():
        kwargs[field] = _require_real(key, merged[key]) * omega_b
    for key, field in _SI_KEYS.items():
        kwargs[field] = _require_real(key, merged[key])
    for key, field in _STR_KEYS.items():
        value = merged[key]
        if not isinstance(value, str):
            raise ConfigError(f"config key {key!r} must be a string, got {value!r}")
        kwargs[field] = value

    for key, field in (("g_c_eff_hz", "g_c_eff"), ("g_mb_eff_hz", "g_mb_eff")):
        value = merged[key]
        kwargs[field] = None if value is None else TWO_PI * _require_real(key, value)
    value = merged["b_field_t"]
    kwargs["b_field"] = None if value is None else _require_real("b_field_t", value)

    kwargs["temperature"] = _require_real("T", merged["T"])
    kwargs["delta_c2_sign"] = _require_real("delta_c2_sign", merged["delta_c2_sign"])
    kwargs["theta_c"] = _require_real("theta_c_rad", merged["theta_c_rad"])
    kwargs["theta_m"] = _require_real("theta_m_rad", merged["theta_m_rad"])
    if not isinstance(merged["eq9_verbatim"], bool):
        raise ConfigError("config key 'eq9_verbatim' must be a boolean")
    kwargs["eq9_verbatim"] = merged["eq9_verbatim"]

    try:
        return SystemParams(**kwargs)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def default_params(**overrides: Any) -> SystemParams:
    """Default operating point, with optional overrides in config units.

    ``default_params(delta_c2_over_wb=-0.9, T=0.2)`` is the same as loading a
    config file containing those two keys. For overrides in angular units use
    :func:`dataclasses.replace` on the result instead.
    """
    return params_from_mapping(overrides)


def config_snapshot(params: SystemParams) -> dict[str, Any]:
    """Round-trip a parameter set back to configuration units.

    Used by the sweep writer to stamp outputs with the exact operating point.
    Field order follows the dataclass definition, so the snapshot is
    deterministic.
    """
    snap: dict[str, Any] = {}
    inverse_hz = {field: key for key, field in _HZ_KEYS.items()}
    inverse_det = {field: key for key, field in _DETUNING_KEYS.items()}
    inverse_si = {field: key for key, field in _SI_KEYS.items()}
    for f in fields(params):
        value = getattr(params, f.name)
        if f.name in inverse_hz:
            snap[inverse_hz[f.name]] = value / TWO_PI
        elif f.name in inverse_det:
            snap[inverse_det[f.name]] = value / params.omega_b
        elif f.name in inverse_si:
            snap[inverse_si[f.name]] = value
        elif f.name == "g_c_eff":
            snap["g_c_eff_hz"] = None if value is None else value / TWO_PI
        elif f.name == "g_mb_eff":
            snap["g_mb_eff_hz"] = None if value is None else value / TWO_PI
        elif f.name == "b_field":
            snap["b_field_t"] = value
        elif f.name == "temperature":
            snap["T"] = value
        elif f.name == "theta_c":
            snap["theta_c_rad"] = value
        elif f.name == "theta_m":
            snap["theta_m_rad"] = value
        else:
            snap[f.name] = value
    return snap


__all__ = [
    "DEFAULT_CONFIG",
    "GYROMAGNETIC_RATIO",
    "PARAM_KEYS",
    "SystemParams",
    "TWO_PI",
    "config_snapshot",
    "default_params",
    "laser_drive_strength",
    "params_from_mapping",
    "rabi_frequency",
    "thermal_occupation",
]
