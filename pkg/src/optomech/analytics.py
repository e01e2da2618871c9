"""Closed-form back-action results for a single-frequency drive with a
finite laser linewidth.

Every function takes a ``SystemParams`` and returns values in SI units
(rad/s for rates, J for the intracavity energy).  The ``reference_*``
functions are deliberately written out again from the zero-linewidth
sideband picture and share no code with the linewidth-dependent path; the
tests use them as limit oracles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .core import HBAR, SystemParams
from .errors import QuadratureNotConverged

VALIDITY_FRACTION = 0.1


def _broadened(p: SystemParams) -> float:
    """Effective cavity width once the laser line is folded in."""
    return 2.0 * p.gamma_l + p.kappa


def intracavity_energy(p: SystemParams, detuning=None):
    """Phase-averaged intracavity field energy ``|beta_0|^2`` [J].

    ``detuning`` overrides ``p.detuning`` and may be an array.
    """
    d = p.detuning if detuning is None else np.asarray(detuning, dtype=float)
    w = _broadened(p)
    return p.power * 4.0 * w / (w**2 + 4.0 * d**2)


def normalized_photon_number(p: SystemParams, detuning=None):
    """Intracavity intensity ``kappa |beta_0|^2 / 4P``; 1 on resonance at zero linewidth."""
    d = p.detuning if detuning is None else np.asarray(detuning, dtype=float)
    w = _broadened(p)
    return p.kappa * w / (w**2 + 4.0 * d**2)


def coeff_a(p: SystemParams, sign: int, detuning=None):
    """Sideband weight ``A_+`` (``sign=+1``) or ``A_-`` (``sign=-1``)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    d = p.detuning if detuning is None else np.asarray(detuning, dtype=float)
    g, k, om = p.gamma_l, p.kappa, p.omega_m
    w = 2.0 * g + k
    side = d - sign * om
    num = (g + k) * w**2 + 2.0 * g * (side**2 + d**2) + k * om**2
    return num / ((w**2 + 4.0 * side**2) * (k**2 + om**2))


def coeff_b(p: SystemParams, sign: int, detuning=None):
    """Spring-shift weight ``B_+`` or ``B_-``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    d = p.detuning if detuning is None else np.asarray(detuning, dtype=float)
    g, k, om = p.gamma_l, p.kappa, p.omega_m
    w = 2.0 * g + k
    side = d + sign * om
    num = (
        k * w**3
        + k**2 * (2.0 * d + sign * om) ** 2
        + (8.0 * g * d * k + 4.0 * d * om**2) * side
        - 4.0 * g**2 * om**2
    )
    return num / (w**2 + 4.0 * side**2)


def _pressure_scale(p: SystemParams) -> float:
    # P omega_c / (M L^2); equals 2 Omega g0^2 times the input photon flux
    return p.power * p.omega_c / (p.mass * p.length**2)


def optical_damping(p: SystemParams, detuning=None):
    """Radiation-pressure damping rate ``Gamma_opt`` [rad/s].

    Valid while ``Gamma + Gamma_opt << kappa``; see ``back_action`` for the
    validity flags.
    """
    d = p.detuning if detuning is None else np.asarray(detuning, dtype=float)
    w = _broadened(p)
    diff = coeff_a(p, -1, d) - coeff_a(p, 1, d)
    return _pressure_scale(p) * p.kappa / p.omega_m * 8.0 * diff / (w**2 + 4.0 * d**2)


def frequency_shift(p: SystemParams, detuning=None):
    """Optical spring shift ``Delta Omega_opt`` of the mechanical frequency [rad/s]."""
    d = p.detuning if detuning is None else np.asarray(detuning, dtype=float)
    w = _broadened(p)
    k, om = p.kappa, p.omega_m
    diff = coeff_b(p, 1, d) - coeff_b(p, -1, d)
    return -_pressure_scale(p) * k / om**2 * 2.0 * diff / ((w**2 + 4.0 * d**2) * (k**2 + om**2))


def shift_unit(p: SystemParams) -> float:
    """Scale ``2 P omega_c / (Omega^2 M L^2 kappa)`` used to normalise spring shifts."""
    return 2.0 * _pressure_scale(p) / (p.omega_m**2 * p.kappa)


def small_linewidth_shift_gain(p: SystemParams) -> float:
    """First-order gain of the spring shift in the linewidth at ``Delta = -Omega``
    in the resolved-sideband regime."""
    return 2.0 * _pressure_scale(p) * p.kappa / p.omega_m**2 * p.gamma_l * p.kappa / p.omega_m**2


@dataclass(frozen=True)
class BackActionResult:
    gamma_opt: float
    delta_omega_opt: float
    a_plus: float
    a_minus: float
    b_plus: float
    b_minus: float
    beta0_sq: float
    omega_eff: float
    warnings: tuple[str, ...] = ()

    @property
    def omega_opt_sq(self) -> float:
        return 2.0 * self.delta_omega_opt * (self.omega_eff - self.delta_omega_opt)

    @property
    def valid(self) -> bool:
        return not self.warnings


def back_action(p: SystemParams) -> BackActionResult:
    """All single-frequency back-action quantities plus validity warnings."""
    g_opt = float(optical_damping(p))
    shift = float(frequency_shift(p))
    notes = []
    if abs(p.gamma_m + g_opt) > VALIDITY_FRACTION * p.kappa:
        notes.append("Gamma + Gamma_opt is not small compared to kappa")
    if abs(shift) > VALIDITY_FRACTION * p.omega_m:
        notes.append("frequency shift is not small compared to Omega")
    if p.gamma_m + g_opt < 0:
        notes.append("effective damping negative: mechanical instability")
    return BackActionResult(
        gamma_opt=g_opt,
        delta_omega_opt=shift,
        a_plus=float(coeff_a(p, 1)),
        a_minus=float(coeff_a(p, -1)),
        b_plus=float(coeff_b(p, 1)),
        b_minus=float(coeff_b(p, -1)),
        beta0_sq=float(intracavity_energy(p)),
        omega_eff=p.omega_m + shift,
        warnings=tuple(notes),
    )


# zero-linewidth references -------------------------------------------------


def _resonant_photons_zero_gamma(p: SystemParams) -> float:
    flux = p.power / (HBAR * p.omega_c)
    return flux * p.kappa / (p.kappa**2 / 4.0 + p.detuning**2)


def reference_damping_zero_gamma(p: SystemParams) -> float:
    """Textbook sideband-cooling rate for a monochromatic drive.

    ``g0^2 n [kappa / (kappa^2/4 + (Delta+Omega)^2) - kappa / (kappa^2/4 + (Delta-Omega)^2)]``
    """
    n = _resonant_photons_zero_gamma(p)
    k, d, om = p.kappa, p.detuning, p.omega_m
    anti_stokes = k / (k**2 / 4.0 + (d + om) ** 2)
    stokes = k / (k**2 / 4.0 + (d - om) ** 2)
    return p.g0**2 * n * (anti_stokes - stokes)


def reference_shift_zero_gamma(p: SystemParams) -> float:
    """Textbook optical-spring shift for a monochromatic drive."""
    n = _resonant_photons_zero_gamma(p)
    k, d, om = p.kappa, p.detuning, p.omega_m
    return p.g0**2 * n * (
        (d - om) / (k**2 / 4.0 + (d - om) ** 2) + (d + om) / (k**2 / 4.0 + (d + om) ** 2)
    )


# damping enhancement criterion ---------------------------------------------


class Enhancement(NamedTuple):
    enhanced: bool
    g_gamma: float
    g_zero: float


def _overlap(p: SystemParams, rel_tol: float) -> float:
    """|integral of (A_- - A_+)(nu) |beta_0(nu - Delta)|^2 dnu|.

    The Lorentzian weight is absorbed by ``nu = Delta + (w/2) tan(u)``, which
    maps the real line onto a finite interval with a bounded integrand, so no
    tail truncation is needed.
    """
    if p.power == 0:
        return 0.0
    centre = p.detuning
    half = 0.5 * _broadened(p)

    def integrand(u):
        nu = centre + half * math.tan(u)
        return coeff_a(p, -1, nu) - coeff_a(p, 1, nu)

    edge = 0.5 * math.pi
    points = sorted({math.atan((x - centre) / half) for x in (-p.omega_m, 0.0, p.omega_m)})
    edges = [-edge, *points, edge]
    total = 0.0
    err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        val, e = integrate.quad(integrand, a, b, limit=500, epsrel=rel_tol / 4, epsabs=0.0)
        total += val
        err += e
    scale = 2.0 * p.power
    if not np.isfinite(total) or (err > rel_tol * abs(total) and err > 1e-15):
        raise QuadratureNotConverged(f"error estimate {err:.3e} for value {total:.3e}")
    return abs(scale * total)


def damping_enhancement(p: SystemParams, quadrature_tol: float = 1e-9) -> Enhancement:
    """Compare the linewidth-weighted sideband overlap with its zero-linewidth value.

    ``A_pm`` are evaluated with the detuning replaced by the integration
    variable and the weight is the phase-averaged intracavity energy centred on
    the laser detuning.  ``enhanced`` is true when the finite linewidth raises
    the overlap.
    """
    if quadrature_tol <= 0:
        raise ValueError("quadrature_tol must be positive")
    g_gamma = _overlap(p, quadrature_tol)
    g_zero = _overlap(p.replace(gamma_l=0.0), quadrature_tol)
    return Enhancement(bool(g_gamma > g_zero), g_gamma, g_zero)
