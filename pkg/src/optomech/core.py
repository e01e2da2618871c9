"""System parameters, derived scales and the two linear response functions.

All rates and frequencies are angular (rad/s).  Parameters are stored in SI
units; ``SystemParams.scaled()`` gives the same system with every rate
expressed in units of the cavity decay rate, which is the form used by the
figure generators and the stochastic integrator.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, ConfigMissing, PoleOnRealAxis

HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K

# Nd:YAG carrier and a 1 cm cavity; only used when a constructor is not
# given an explicit optical frequency or length.
DEFAULT_OMEGA_C = 2.0 * math.pi * 299792458.0 / 1064e-9
DEFAULT_LENGTH = 1e-2

RATE_FIELDS = ("omega_m", "kappa", "gamma_m", "gamma_l", "detuning")
PARAM_FIELDS = (
    "omega_m",
    "omega_c",
    "kappa",
    "gamma_m",
    "gamma_l",
    "detuning",
    "mass",
    "length",
    "power",
    "n_th",
    "t_eff",
)


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of a driven optomechanical cavity.

    Parameters
    ----------
    omega_m : float
        Mechanical angular frequency.
    omega_c : float
        Cavity resonance angular frequency.
    kappa : float
        Cavity energy decay rate.
    gamma_m : float
        Intrinsic mechanical damping rate.
    gamma_l : float
        Laser linewidth (half width of the Lorentzian line produced by
        phase diffusion).
    detuning : float
        Laser minus cavity frequency; negative is red detuned.
    mass, length : float
        Effective mirror mass [kg] and cavity length [m].
    power : float
        Drive power [W].
    n_th : float, optional
        Thermal phonon occupation of the support.
    t_eff : float, optional
        Bath temperature [K]; converted to ``n_th`` when ``n_th`` is absent.
        If both are given ``n_th`` wins and a warning is recorded.
    """

    omega_m: float
    omega_c: float = DEFAULT_OMEGA_C
    kappa: float = 1.0
    gamma_m: float = 0.0
    gamma_l: float = 0.0
    detuning: float = 0.0
    mass: float = 1e-12
    length: float = DEFAULT_LENGTH
    power: float = 0.0
    n_th: float | None = None
    t_eff: float | None = None
    warnings: tuple[str, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        for name in PARAM_FIELDS:
            value = getattr(self, name)
            if value is None:
                continue
            if not np.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        for name in ("omega_m", "omega_c", "kappa", "mass", "length"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0")
        for name in ("gamma_m", "gamma_l", "power"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")

        notes = list(self.warnings)
        if self.n_th is None:
            n = 0.0 if self.t_eff is None else K_B * self.t_eff / (HBAR * self.omega_m)
            object.__setattr__(self, "n_th", n)
        elif self.t_eff is not None:
            notes.append("both n_th and t_eff given; using n_th")
        if self.n_th < 0 or (self.t_eff is not None and self.t_eff < 0):
            raise ConfigError("thermal occupation must be >= 0")
        object.__setattr__(self, "warnings", tuple(notes))

    # ------------------------------------------------------------------
    @classmethod
    def from_rates(
        cls,
        omega_m,
        kappa=1.0,
        *,
        g0,
        n_max=None,
        power=None,
        omega_c=DEFAULT_OMEGA_C,
        length=DEFAULT_LENGTH,
        **kw,
    ):
        """Build parameters from the single-photon coupling ``g0``.

        The mass is chosen so that ``(omega_c / length) * x_zpt == g0``.  The
        drive is given either as ``power`` or as the maximum intracavity photon
        number ``n_max = 4 P / (hbar omega_c kappa)``.
        """
        if (n_max is None) == (power is None):
            raise ConfigError("give exactly one of n_max or power")
        if g0 <= 0:
            raise ConfigError("g0 must be > 0")
        mass = HBAR * omega_c**2 / (2.0 * omega_m * length**2 * g0**2)
        if power is None:
            power = n_max * HBAR * omega_c * kappa / 4.0
        return cls(
            omega_m=omega_m,
            omega_c=omega_c,
            kappa=kappa,
            mass=mass,
            length=length,
            power=power,
            **kw,
        )

    def replace(self, **changes) -> "SystemParams":
        if "n_th" not in changes and self._n_th_from_temperature():
            changes["n_th"] = None
        return dataclasses.replace(self, warnings=(), **changes)

    def _n_th_from_temperature(self) -> bool:
        if self.t_eff is None:
            return False
        return math.isclose(self.n_th, K_B * self.t_eff / (HBAR * self.omega_m), rel_tol=1e-12)

    # derived quantities --------------------------------------------------
    @property
    def x_zpt(self) -> float:
        return math.sqrt(HBAR / (2.0 * self.mass * self.omega_m))

    @property
    def g0(self) -> float:
        return self.omega_c / self.length * self.x_zpt

    @property
    def b0_sq(self) -> float:
        """Input photon flux ``P / hbar omega_c`` [1/s]."""
        return self.power / (HBAR * self.omega_c)

    @property
    def n_max(self) -> float:
        return 4.0 * self.b0_sq / self.kappa

    @property
    def temperature(self) -> float:
        return self.n_th * HBAR * self.omega_m / K_B

    def scaled(self) -> dict:
        """Dimensionless description in units of ``kappa``.

        ``flux`` is the input photon flux divided by ``kappa`` so that the
        empty-cavity resonant photon number is ``4 * flux``.
        """
        k = self.kappa
        return {
            "omega_m": self.omega_m / k,
            "gamma_m": self.gamma_m / k,
            "gamma_l": self.gamma_l / k,
            "detuning": self.detuning / k,
            "g0": self.g0 / k,
            "flux": self.b0_sq / k,
            "n_th": self.n_th,
        }

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in PARAM_FIELDS}


@dataclass(frozen=True)
class DerivedScales:
    n_max: float
    b0_sq: float
    B0: complex


def derive_scales(p: SystemParams) -> DerivedScales:
    b0_sq = p.b0_sq
    B0 = math.sqrt(b0_sq * p.kappa) * complex(cav_susceptibility(p, 0.0))
    return DerivedScales(n_max=p.n_max, b0_sq=b0_sq, B0=B0)


def mech_susceptibility(p: SystemParams, omega):
    """Mechanical response ``1 / (Gamma/2 - i (omega - Omega))``.

    Accepts scalars or arrays; raises ``PoleOnRealAxis`` when an undamped
    oscillator is evaluated exactly at resonance.
    """
    denom = 0.5 * p.gamma_m - 1j * (np.asarray(omega, dtype=float) - p.omega_m)
    if np.any(denom == 0):
        raise PoleOnRealAxis("mechanical susceptibility at omega = Omega with Gamma = 0")
    return 1.0 / denom


def cav_susceptibility(p: SystemParams, omega):
    """Cavity response ``1 / (kappa/2 - i (omega + Delta))``."""
    denom = 0.5 * p.kappa - 1j * (np.asarray(omega, dtype=float) + p.detuning)
    return 1.0 / denom


def inverse_mech_susceptibility(p: SystemParams, omega):
    return 0.5 * p.gamma_m - 1j * (np.asarray(omega, dtype=float) - p.omega_m)


# configuration files ---------------------------------------------------


def _parse_value(key, text):
    text = text.strip()
    if text.lower() in ("none", "null", ""):
        return None
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as a number") from None


def parse_keyvalue(text: str) -> dict:
    """Parse ``key = value`` lines with ``#`` comments."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def read_config(path) -> dict:
    """Read a flat configuration mapping from a JSON or key=value file."""
    path = Path(path)
    if not path.exists():
        raise ConfigMissing(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ConfigError("JSON config must be an object")
        if isinstance(data.get("params"), dict):
            data = {**data, **data.pop("params")}
        return data
    return parse_keyvalue(text)


def params_from_mapping(data: dict, base: SystemParams | None = None) -> SystemParams:
    """Build ``SystemParams`` from a mapping, ignoring unrelated keys.

    Besides the stored fields the mapping may give ``g0`` (which fixes the
    mass) and ``n_max`` (which fixes the power), as in ``from_rates``.
    """
    values = {}
    for key in (*PARAM_FIELDS, "g0", "n_max"):
        if key in data:
            v = data[key]
            values[key] = _parse_value(key, v) if isinstance(v, str) else v
    values = {k: v for k, v in values.items() if v is not None or k in ("n_th", "t_eff")}
    g0 = values.pop("g0", None)
    n_max = values.pop("n_max", None)
    if base is not None:
        merged = {**base.as_dict(), **values}
        if "n_th" not in values and base._n_th_from_temperature():
            merged["n_th"] = None
    else:
        merged = values
    if merged.get("omega_m") is None:
        raise ConfigMissing("omega_m is required")
    if g0 is not None:
        merged["mass"] = HBAR * merged.get("omega_c", DEFAULT_OMEGA_C) ** 2 / (
            2.0 * merged["omega_m"] * merged.get("length", DEFAULT_LENGTH) ** 2 * g0**2
        )
    if n_max is not None:
        merged["power"] = n_max * HBAR * merged.get("omega_c", DEFAULT_OMEGA_C) * merged.get("kappa", 1.0) / 4.0
    return SystemParams(**{k: v for k, v in merged.items() if v is not None})


def load_params(path) -> SystemParams:
    return params_from_mapping(read_config(path))


def dump_params(p: SystemParams, path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(json.dumps(p.as_dict(), indent=2) + "\n", encoding="utf-8")
        return
    lines = ["# optomech system parameters (SI units)"]
    for key, value in p.as_dict().items():
        lines.append(f"{key} = {'none' if value is None else repr(value)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
