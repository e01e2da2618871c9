"""Phonon-number spectrum of the linearised system and the occupation it implies.

The spectrum is

    S_N(w) = [(2 gamma + kappa) sigma_opt(w) + Gamma sigma_th(w)] / |Lambda(w)|^2

with the laser linewidth entering only through the broadened cavity weight in
``sigma_opt``.  ``linear_response_solve`` builds the same quantity a second
way, from the transfer coefficients of the frequency-domain solution for the
mechanical mode contracted with the input-noise correlations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import SystemParams, derive_scales, inverse_mech_susceptibility
from .errors import BlueDetunedNoMinimum, GridTooNarrow, SingularSigma

UNSTABLE_RATIO = 1e-10


def coupling_sq(p: SystemParams) -> float:
    """``g0^2 |B_0|^2``: squared many-photon coupling [rad^2/s^2]."""
    return p.g0**2 * abs(derive_scales(p).B0) ** 2


def _chi_r(p, w):
    return 1.0 / (0.5 * p.kappa - 1j * (w + p.detuning))


def _chi_r_mirror(p, w):
    # conj(chi_R(-w)) continued off the real axis
    return 1.0 / (0.5 * p.kappa - 1j * (w - p.detuning))


class SpectrumComponents(NamedTuple):
    sigma_opt: np.ndarray
    sigma_th: np.ndarray
    lam: np.ndarray
    sigma: np.ndarray


def spectrum_components(p: SystemParams, omega) -> SpectrumComponents:
    """Numerator pieces and the determinant ``Lambda`` of the spectrum.

    ``sigma_th`` uses ``|chi_M^-1(w) + sigma(w)|^2`` for the thermal cross
    term; this is what the linearised equations give (and what a steady-state
    covariance calculation confirms).
    """
    w = np.asarray(omega, dtype=float)
    gsq = coupling_sq(p)
    width = 2.0 * p.gamma_l + p.kappa
    inv = inverse_mech_susceptibility(p, w)
    inv_mirror = 0.5 * p.gamma_m - 1j * (w + p.omega_m)  # conj(chi_M^-1(-w))
    sigma = gsq * (_chi_r(p, w) - _chi_r_mirror(p, w))
    sigma_opt = 4.0 * gsq / (width**2 + 4.0 * (w + p.detuning) ** 2) * np.abs(inv) ** 2
    n = p.n_th
    sigma_th = n * np.abs(inv + sigma) ** 2 + (n + 1.0) * np.abs(sigma) ** 2
    lam = inv * inv_mirror - 2j * p.omega_m * sigma
    return SpectrumComponents(sigma_opt, sigma_th, lam, sigma)


def spectral_density(p: SystemParams, omega):
    """Pointwise ``S_N(omega)`` [s]."""
    c = spectrum_components(p, omega)
    width = 2.0 * p.gamma_l + p.kappa
    return (width * c.sigma_opt + p.gamma_m * c.sigma_th) / np.abs(c.lam) ** 2


def response_poles(p: SystemParams) -> np.ndarray:
    """Complex zeros of ``Lambda``; all lie in the lower half plane when stable.

    ``Lambda * r1 * r2`` is a quartic, with ``r1, r2`` the two cavity
    denominators, because ``sigma = 2 i Delta g0^2 |B0|^2 / (r1 r2)``.
    """
    half_g, half_k = 0.5 * p.gamma_m, 0.5 * p.kappa
    # each factor as coefficients of (c0 + c1 w) in numpy.polynomial order
    m1 = [half_g + 1j * p.omega_m, -1j]
    m2 = [half_g - 1j * p.omega_m, -1j]
    r1 = [half_k - 1j * p.detuning, -1j]
    r2 = [half_k + 1j * p.detuning, -1j]
    poly = np.polynomial.polynomial
    quartic = poly.polymul(poly.polymul(m1, m2), poly.polymul(r1, r2))
    quartic = poly.polyadd(quartic, [4.0 * p.omega_m * p.detuning * coupling_sq(p)])
    return poly.polyroots(quartic)


def is_stable(p: SystemParams) -> bool:
    return bool(np.all(response_poles(p).imag < 0))


@dataclass(frozen=True)
class GridSpec:
    """Frequency grid recipe: a uniform background plus refined patches
    (``sinh`` spacing) around every response pole."""

    span: float = 8.0  # half width in units of max(Omega, |Delta|)
    n_uniform: int = 2**16 + 1
    n_patch: int = 1201
    patch_reach: float = 60.0  # patch half width in units of the pole width

    def build(self, p: SystemParams) -> np.ndarray:
        half = self.span * max(p.omega_m, abs(p.detuning))
        half = max(half, p.omega_m + abs(p.detuning) + 20.0 * p.kappa)
        pieces = [np.linspace(-half, half, self.n_uniform)]
        step = 2.0 * half / (self.n_uniform - 1)
        for pole in response_poles(p):
            hw = max(abs(pole.imag), 1e-12 * p.kappa)
            reach = self.patch_reach * max(hw, step)
            u = np.linspace(-1.0, 1.0, self.n_patch) * math.asinh(reach / hw)
            pieces.append(pole.real + hw * np.sinh(u))
        grid = np.unique(np.concatenate(pieces))
        return grid[(grid >= -half) & (grid <= half)]


@dataclass(frozen=True)
class SpectrumGrid:
    omega: np.ndarray
    s_n: np.ndarray
    integration_meta: dict = field(default_factory=dict)
    stable: bool = True

    def __post_init__(self):
        if self.omega.shape != self.s_n.shape:
            raise ValueError("omega and s_n must have the same shape")
        if np.any(np.diff(self.omega) <= 0):
            raise ValueError("omega must be strictly increasing")

    def to_csv(self, path, kappa: float) -> None:
        data = np.column_stack([self.omega / kappa, self.s_n * kappa])
        np.savetxt(path, data, delimiter=",", header="omega_over_kappa,s_n_times_kappa",
                   comments="", fmt="%.17g")


def noise_spectrum(p: SystemParams, grid_spec: GridSpec | np.ndarray | None = None) -> SpectrumGrid:
    """Sample ``S_N`` on a grid that resolves every resonance.

    ``grid_spec`` is a ``GridSpec`` (default) or an explicit increasing array.
    """
    if grid_spec is None:
        grid_spec = GridSpec()
    omega = grid_spec.build(p) if isinstance(grid_spec, GridSpec) else np.asarray(grid_spec, float)

    poles = response_poles(p)
    widest = max(p.kappa, float(np.max(np.abs(poles.imag))) * 2.0)
    need = p.omega_m + 10.0 * widest
    if omega[0] > -need or omega[-1] < need:
        raise GridTooNarrow(f"grid must cover +-{need:.4g} rad/s")

    c = spectrum_components(p, omega)
    width = 2.0 * p.gamma_l + p.kappa
    abs_lam = np.abs(c.lam)
    s_n = (width * c.sigma_opt + p.gamma_m * c.sigma_th) / abs_lam**2
    stable = bool(np.all(poles.imag < 0)) and abs_lam.min() >= UNSTABLE_RATIO * abs_lam.max()
    meta = {
        "n_points": int(omega.size),
        "min_spacing": float(np.min(np.diff(omega))),
        "max_spacing": float(np.max(np.diff(omega))),
        "half_span": float(omega[-1]),
        "linewidth_over_kappa": p.gamma_l / p.kappa,
    }
    grid = SpectrumGrid(omega, s_n, meta, stable)
    meta["tail"] = float(_tail_estimate(grid))
    return grid


def _tail_estimate(grid: SpectrumGrid) -> float:
    """Integral of the spectrum beyond the grid ends assuming power-law decay."""
    w, s = grid.omega, grid.s_n
    total = 0.0
    for i_edge in (0, len(w) - 1):
        target = 0.5 * w[i_edge]
        i_half = int(np.argmin(np.abs(w - target)))
        we, se, wh, sh = abs(w[i_edge]), s[i_edge], abs(w[i_half]), s[i_half]
        if se <= 0 or sh <= 0 or we == wh:
            continue
        alpha = math.log(sh / se) / math.log(we / wh)
        if alpha <= 1.0:
            alpha = 2.0
        total += se * we / (alpha - 1.0)
    return total


def phonon_number_with_error(grid: SpectrumGrid) -> tuple[float, float]:
    """``(1/2pi) integral S_N dw`` by the trapezoid rule plus a power-law tail.

    Returns the estimate and the magnitude of the tail correction, which bounds
    the truncation error.
    """
    if grid.s_n.size == 0 or not np.any(grid.s_n):
        return 0.0, 0.0
    body = np.trapezoid(grid.s_n, grid.omega)
    tail = grid.integration_meta.get("tail")
    if tail is None:
        tail = _tail_estimate(grid)
    return float((body + tail) / (2.0 * math.pi)), float(tail / (2.0 * math.pi))


def mean_phonon_number(grid: SpectrumGrid) -> float:
    return phonon_number_with_error(grid)[0]


def mean_occupation(p: SystemParams, grid_spec: GridSpec | None = None) -> float:
    """Steady-state phonon number from the spectrum of ``p``."""
    return mean_phonon_number(noise_spectrum(p, grid_spec))


# closed forms ---------------------------------------------------------------


def n_min_weak_coupling(p: SystemParams) -> float:
    """Back-action limited occupation for ``Gamma_opt << kappa`` and ``Gamma -> 0``."""
    d, om, k, g = p.detuning, p.omega_m, p.kappa, p.gamma_l
    if d >= 0:
        raise BlueDetunedNoMinimum("weak-coupling minimum needs a red-detuned drive (Delta < 0)")
    w = 2.0 * g + k
    num = w * (k**2 + 4.0 * (d - om) ** 2) * (k**2 + 4.0 * (d + om) ** 2)
    return -num / (16.0 * d * om * k * (w**2 + 4.0 * (d - om) ** 2))


def n_min_good_cavity(p: SystemParams) -> float:
    """Resolved-sideband limit of the minimum occupation at ``Delta = -Omega``."""
    return (2.0 * p.gamma_l + p.kappa) * p.kappa / (16.0 * p.omega_m**2)


def good_cavity_validity(p: SystemParams) -> str:
    """``ok`` / ``marginal`` / ``outside`` for ``gamma << kappa << Omega``."""
    r = max(p.gamma_l / p.kappa, p.kappa / p.omega_m)
    if r <= 0.1:
        return "ok"
    return "marginal" if r <= 0.5 else "outside"


def reference_n_min_zero_gamma(p: SystemParams) -> float:
    """Monochromatic sideband-cooling limit: ratio of Stokes to net cooling rates."""
    k, d, om = p.kappa, p.detuning, p.omega_m
    stokes = k / (k**2 / 4.0 + (d - om) ** 2)
    anti_stokes = k / (k**2 / 4.0 + (d + om) ** 2)
    if anti_stokes <= stokes:
        raise BlueDetunedNoMinimum("net heating: no minimum occupation")
    return stokes / (anti_stokes - stokes)


# frequency-domain linear response ---------------------------------------------


class TransferCoefficients(NamedTuple):
    """Coefficients of ``A[w]`` on each input noise at the same frequency."""

    a_in: np.ndarray
    a_in_dag: np.ndarray
    d_in: np.ndarray
    d_in_dag: np.ndarray
    sigma_big: np.ndarray
    optical_kernel: np.ndarray  # coefficient on the cavity-filtered creation noise


def linear_response_solve(p: SystemParams, omega) -> TransferCoefficients:
    """Solve the linearised Fourier-domain equations for the mechanical mode.

    The classical intracavity amplitude is taken monochromatic,
    ``B0 = sqrt(kappa P / hbar omega_c) chi_R(0)``; the linewidth is applied
    afterwards to the optical noise weight in ``spectrum_from_transfer``.
    """
    w = np.asarray(omega, dtype=float)
    b0 = derive_scales(p).B0
    g0 = p.g0
    gsq = g0**2 * abs(b0) ** 2
    chi_m = 1.0 / (0.5 * p.gamma_m - 1j * (w - p.omega_m))
    chi_m_mirror = 1.0 / (0.5 * p.gamma_m - 1j * (w + p.omega_m))
    chi_r = _chi_r(p, w)
    chi_r_mirror = _chi_r_mirror(p, w)
    sigma = gsq * (chi_r - chi_r_mirror)
    big = 1.0 + sigma * (chi_m - chi_m_mirror)
    if np.any(np.abs(big) < 1e-12):
        raise SingularSigma("Sigma[w] vanishes on the grid")
    root_g = math.sqrt(p.gamma_m)
    root_k = math.sqrt(p.kappa)
    pref = chi_m / big
    a_in = pref * (-root_g + root_g * sigma * chi_m_mirror)
    a_in_dag = pref * root_g * sigma * chi_m_mirror
    kernel = -1j * g0 * pref
    d_in = kernel * root_k * np.conj(b0) * chi_r
    d_in_dag = kernel * root_k * b0 * chi_r_mirror
    return TransferCoefficients(a_in, a_in_dag, d_in, d_in_dag, big, kernel * b0)


def phase_averaged_cavity_weight(p: SystemParams, omega):
    """Lorentzian laser line (half width gamma) convolved with ``kappa |chi_R|^2``.

    Convolving two Lorentzians adds their half widths, so the result is a
    Lorentzian of half width ``kappa/2 + gamma`` carrying the same area.
    """
    w = np.asarray(omega, dtype=float)
    half = 0.5 * p.kappa + p.gamma_l
    return 2.0 * half / (half**2 + (w + p.detuning) ** 2)


def spectrum_from_transfer(p: SystemParams, omega):
    """Rebuild ``S_N`` by contracting transfer coefficients with the input
    correlations ``<A_in^dag A_in> = 2 pi n_M delta``,
    ``<A_in A_in^dag> = 2 pi (n_M + 1) delta`` and
    ``<D_in D_in^dag> = 2 pi delta``."""
    w = np.asarray(omega, dtype=float)
    t = linear_response_solve(p, -w)
    n = p.n_th
    optical = np.abs(t.optical_kernel) ** 2 * phase_averaged_cavity_weight(p, w)
    return n * np.abs(t.a_in) ** 2 + (n + 1.0) * np.abs(t.a_in_dag) ** 2 + optical


def reference_spectrum_zero_gamma(p: SystemParams, omega):
    """Monochromatic-drive spectrum from a direct 4x4 solve of the Fourier
    equations for ``(A, A^dag, D, D^dag)`` at ``-omega``."""
    w_all = -np.atleast_1d(np.asarray(omega, dtype=float))
    b = derive_scales(p).B0
    g0, gm, k = p.g0, p.gamma_m, p.kappa
    out = np.empty(w_all.shape)
    for i, w in enumerate(w_all):
        m = np.array(
            [
                [0.5 * gm - 1j * (w - p.omega_m), 0, -1j * g0 * np.conj(b), -1j * g0 * b],
                [0, 0.5 * gm - 1j * (w + p.omega_m), 1j * g0 * np.conj(b), 1j * g0 * b],
                [-1j * g0 * b, -1j * g0 * b, 0.5 * k - 1j * (w + p.detuning), 0],
                [1j * g0 * np.conj(b), 1j * g0 * np.conj(b), 0, 0.5 * k - 1j * (w - p.detuning)],
            ]
        )
        drive = -np.diag([math.sqrt(gm), math.sqrt(gm), math.sqrt(k), math.sqrt(k)]).astype(complex)
        sol = np.linalg.solve(m, drive)[0]  # A on (A_in, A_in^dag, D_in, D_in^dag)
        out[i] = p.n_th * abs(sol[0]) ** 2 + (p.n_th + 1.0) * abs(sol[1]) ** 2 + abs(sol[3]) ** 2
    return out.reshape(np.shape(omega)) if np.ndim(omega) else float(out[0])
