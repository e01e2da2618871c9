"""Two-tone (amplitude modulated, on-resonance) driving: time-averaged
variances of the rotating-frame quadratures in the presence of laser phase
noise.

The drive is ``E(t) ~ sin(Omega t)`` at ``omega_l = omega_c``; only ``P`` and
``Omega`` enter, through ``|b0|^2 = P / hbar omega_c``.  The detuning stored in
the parameters is ignored.  The closed forms correspond to a cavity input
``2 sqrt(kappa P) sin(Omega t)``, i.e. ``P`` is the power of each of the two
sideband tones at ``omega_c +- Omega``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SystemParams

TWO_TONE_AMPLITUDE = 2.0


@dataclass(frozen=True)
class QuadratureVariances:
    var_x: float
    var_y: float
    thermal_floor: float
    ba_x: float
    ba_y: float
    validity: str = "ok"

    @property
    def y_excess(self) -> float:
        return self.var_y - self.var_x


def _drive_strength(p: SystemParams) -> float:
    if p.gamma_m <= 0:
        raise ValueError("quadrature variances need gamma_m > 0")
    return p.b0_sq * p.g0**2 / p.gamma_m


def peak_photon_number(p: SystemParams) -> float:
    """Largest intracavity photon number reached under the two-tone drive."""
    return TWO_TONE_AMPLITUDE**2 * p.b0_sq * p.kappa / (p.kappa**2 / 4.0 + p.omega_m**2)


def validity(p: SystemParams) -> str:
    """Grade the ``gamma, Gamma << kappa, Omega`` and weak-coupling assumptions."""
    slow = max(p.gamma_l, p.gamma_m) / min(p.kappa, p.omega_m)
    coupling = p.g0**2 * peak_photon_number(p) / p.kappa**2
    worst = max(slow, coupling)
    if worst <= 0.1:
        return "ok"
    return "marginal" if worst <= 0.5 else "outside"


def quadrature_variances(p: SystemParams) -> QuadratureVariances:
    """Time-averaged ``<dX^2>`` and ``<dY^2>`` for arbitrary ``kappa / Omega``.

    The factor printed as ``(kappa + 16 Omega^2)`` in the linewidth term of the
    cosine quadrature is taken as ``(kappa^2 + 16 Omega^2)``; the two agree in
    units where ``kappa = 1``.
    """
    s = _drive_strength(p)
    k, om, g = p.kappa, p.omega_m, p.gamma_l
    k2, om2 = k * k, om * om
    a, b, c = k2 + om2, k2 + 4.0 * om2, k2 + 16.0 * om2

    x_mono = k * (k2 + 12.0 * om2) / (b**2 * c)
    x_poly = 512 * om2**4 + 352 * om2**3 * k2 - 104 * k2**2 * om2**2 - 20 * k2**3 * om2 - k2**4
    x_lin = 3.0 * g * x_poly / (a * b**3 * c**2)
    ba_x = 48.0 * s * k * (x_mono + x_lin)

    y_mono = (4.0 * om2 - k2) / b**2
    y_poly = 32 * om2**3 + 24 * k2 * om2**2 + 16 * k2**2 * om2 - 3 * k2**3
    y_lin = g * y_poly / (k * a * b**3)
    excess = 32.0 * s * (y_mono - y_lin)

    floor = p.n_th + 0.5
    return QuadratureVariances(
        var_x=floor + ba_x,
        var_y=floor + ba_x + excess,
        thermal_floor=floor,
        ba_x=ba_x,
        ba_y=ba_x + excess,
        validity=validity(p),
    )


def quadrature_variances_good_cavity(p: SystemParams) -> QuadratureVariances:
    """Resolved-sideband (``kappa << Omega``) form of ``quadrature_variances``."""
    s = _drive_strength(p)
    k, om, g = p.kappa, p.omega_m, p.gamma_l
    ba_x = s * 9.0 * k * (k + 2.0 * g) / (4.0 * om**4)
    excess = s * (8.0 * (k - 2.0 * g) / (k * om**2) + 16.0 * g * k / om**4)
    floor = p.n_th + 0.5
    grade = validity(p)
    if k / om > 0.1 and grade == "ok":
        grade = "marginal"
    return QuadratureVariances(floor + ba_x, floor + ba_x + excess, floor, ba_x, ba_x + excess, grade)


def heating_ratio(p: SystemParams) -> float:
    """Drive-induced heating of the cosine quadrature relative to the sine
    quadrature, evaluated with an empty thermal bath."""
    v = quadrature_variances(p.replace(n_th=0.0, t_eff=None))
    return v.ba_x / v.ba_y


def reference_variances_zero_gamma(p: SystemParams) -> tuple[float, float]:
    """Monochromatic-laser variances written out independently (checks the
    ``gamma -> 0`` limit of ``quadrature_variances``)."""
    k, om = p.kappa, p.omega_m
    pump = p.b0_sq * p.g0**2 / p.gamma_m
    protected = 48.0 * pump * k**2 * (k**2 + 12.0 * om**2)
    protected /= (k**2 + 4.0 * om**2) ** 2 * (k**2 + 16.0 * om**2)
    exposed = protected + 32.0 * pump * (2.0 * om - k) * (2.0 * om + k) / (k**2 + 4.0 * om**2) ** 2
    floor = 0.5 * (2.0 * p.n_th + 1.0)
    return floor + protected, floor + exposed


def quadrature_trajectory(x, p_mom, params: SystemParams, t):
    """Rotating-frame quadratures of a classical phase-space trajectory.

    The classical amplitude is ``a = x / (2 x_zpt) + i p x_zpt / hbar``, the
    c-number counterpart of ``x = x_zpt (a + a^dag)`` and
    ``p = i hbar (a^dag - a) / (2 x_zpt)``.  Then

        X = (a e^{i Omega t} + c.c.) / sqrt(2),
        Y = -i (a e^{i Omega t} - c.c.) / sqrt(2),

    so free motion at ``Omega`` gives constant ``(X, Y)`` and a thermal state
    with occupation ``n`` has ``<X^2> = <Y^2> = n`` (add 1/2 for the vacuum
    when comparing with symmetrically ordered quantum variances, or sample
    the vacuum noise explicitly as ``langevin`` does).
    """
    from .core import HBAR

    x = np.asarray(x, dtype=float)
    p_mom = np.asarray(p_mom, dtype=float)
    a = x / (2.0 * params.x_zpt) + 1j * p_mom * params.x_zpt / HBAR
    rot = a * np.exp(1j * params.omega_m * np.asarray(t, dtype=float))
    return np.sqrt(2.0) * rot.real, np.sqrt(2.0) * rot.imag
