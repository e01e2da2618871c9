"""Stochastic and deterministic oracles for the classical dynamics.

The integrator works in units of the cavity decay rate: ``tau = kappa t``,
``q = x / x_zpt`` and a field amplitude ``b`` normalised so that ``|b|^2`` is
the intracavity photon number.  In these units the coupled equations read

    db/dtau = [i (D + g q) - 1/2] b + sqrt(f) s(tau) e^{i phi} (+ vacuum)
    q'' + G q' + W^2 q = 2 W g (|b|^2 - nbar) + 2 W sqrt(n G) nu(tau)

with ``D, g, G, W`` the detuning, coupling, damping and mechanical frequency
over ``kappa``, ``f`` the input photon flux over ``kappa`` and ``s`` the drive
envelope (1 for a cw laser, ``sin(W tau)`` for the two-tone drive).  Results
leave this module in SI units.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy import special

from . import analytics
from .core import HBAR, SystemParams
from .errors import (
    ConfigError,
    FitNotConverged,
    InsufficientDecay,
    NonFiniteState,
    StepTooLarge,
    TruncationError,
)
from .quadratures import TWO_TONE_AMPLITUDE, quadrature_trajectory

SCHEMES = ("heun_strat_corrected", "euler_maruyama")
DRIVES = ("cw", "sinusoidal")
_CHUNK = 2048
_INV_FACT = [1.0 / math.factorial(k) for k in range(40)]


@dataclass(frozen=True)
class SimConfig:
    """Integration settings (times in seconds, ``x0`` in metres).

    ``dt`` must resolve every rate in the problem by a factor 50.  With
    ``vacuum_noise`` the cavity input and the mechanical bath carry their
    symmetrically ordered vacuum fluctuations, so the linearised quantum
    back-action is reproduced in the Wigner sense.  ``freeze_mirror`` pins
    ``x = 0`` and only integrates the field.
    """

    dt: float
    duration: float
    n_traj: int = 1
    seed: int = 0
    x0: float = 0.0
    scheme: str = "heun_strat_corrected"
    record_every: int = 1
    drive: str = "cw"
    vacuum_noise: bool = False
    freeze_mirror: bool = False

    def __post_init__(self):
        if not (self.dt > 0 and self.duration >= self.dt):
            raise ConfigError("need 0 < dt <= duration")
        if self.n_traj < 1 or self.record_every < 1:
            raise ConfigError("n_traj and record_every must be >= 1")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.drive not in DRIVES:
            raise ConfigError(f"unknown drive {self.drive!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    def check(self, p: SystemParams) -> None:
        """Enforce the step-size rule against the rates of ``p``."""
        fastest = max(p.kappa, p.omega_m, p.gamma_m + abs(analytics.optical_damping(p)))
        if self.dt > 1.0 / (50.0 * fastest) * (1 + 1e-9):
            raise ConfigError(f"dt={self.dt:.3g} s exceeds 1/(50 x {fastest:.3g} rad/s)")


@dataclass
class Trajectory:
    """Sampled trajectories; arrays have shape ``(n_traj, n_samples)``
    except ``t``."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    beta_re: np.ndarray
    beta_im: np.ndarray
    phi: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n_traj(self) -> int:
        return self.x.shape[0]

    @property
    def intensity(self) -> np.ndarray:
        """``|beta|^2`` in joules."""
        return self.beta_re**2 + self.beta_im**2

    def single(self, i: int) -> "Trajectory":
        pick = slice(i, i + 1)
        return Trajectory(
            self.t, self.x[pick], self.v[pick], self.beta_re[pick], self.beta_im[pick], self.phi[pick], dict(self.meta)
        )

    def to_csv(self, path) -> None:
        """Long-format CSV with a trajectory index column."""
        cols = ("x", "v", "beta_re", "beta_im", "phi")
        with Path(path).open("w", encoding="utf-8") as fh:
            fh.write("traj,t," + ",".join(cols) + "\n")
            for i in range(self.n_traj):
                block = np.column_stack([self.t] + [getattr(self, c)[i] for c in cols])
                for row in block:
                    fh.write(f"{i}," + ",".join(repr(float(v)) for v in row) + "\n")


class EstimateWithError(NamedTuple):
    value: float
    std_error: float
    n_samples: int

    def z_score(self, reference: float) -> float:
        if self.std_error == 0:
            return 0.0 if self.value == reference else math.inf
        return abs(self.value - reference) / self.std_error

    def as_dict(self) -> dict:
        return {"value": self.value, "std_error": self.std_error, "n_samples": self.n_samples}


class RingDown(NamedTuple):
    gamma_eff: EstimateWithError
    omega_eff: EstimateWithError

    @property
    def unstable(self) -> bool:
        return self.gamma_eff.value < 0


# ---------------------------------------------------------------------------
# random streams


def _streams(seed: int, n_traj: int):
    children = np.random.SeedSequence(seed).spawn(n_traj)
    return [np.random.Generator(np.random.Philox(c)) for c in children]


def _draw(gens, n_steps: int, width: int) -> np.ndarray:
    """Normals of shape ``(n_steps, n_traj, width)``; each column of
    trajectories comes from its own stream."""
    return np.stack([g.standard_normal((n_steps, width)) for g in gens], axis=1)


def phase_noise_paths(gamma: float, dt: float, n_steps: int, n_traj: int, seed: int = 0) -> np.ndarray:
    """Phase random walks with ``<(phi(t) - phi(s))^2> = 2 gamma |t - s|``.

    Returns an array of shape ``(n_traj, n_steps + 1)`` starting at zero.
    """
    steps = np.stack([g.standard_normal(n_steps) for g in _streams(seed, n_traj)])
    phi = np.zeros((n_traj, n_steps + 1))
    np.cumsum(math.sqrt(2.0 * gamma * dt) * steps, axis=1, out=phi[:, 1:])
    return phi


def phase_coherence(phi: np.ndarray, max_lag: int) -> np.ndarray:
    """``<exp(i [phi(t + k dt) - phi(t)])>`` per trajectory for ``k = 0..max_lag``,
    averaged over every available time origin.  Shape ``(n_traj, max_lag + 1)``."""
    n = phi.shape[1]
    if not 0 <= max_lag < n:
        raise ValueError("max_lag must lie in [0, n_samples)")
    z = np.exp(1j * phi)
    size = 1 << (2 * n - 1).bit_length()
    spec = np.fft.fft(z, size, axis=1)
    corr = np.fft.ifft(np.abs(spec) ** 2, axis=1)[:, : max_lag + 1]
    # circular correlation sum_t z(t + k) z*(t); zero padding removes the wrap
    return corr / (n - np.arange(max_lag + 1))


def fit_phase_diffusion(phi: np.ndarray, dt: float, max_lag: int) -> EstimateWithError:
    """Fit the decay rate of the field coherence; error by delete-one jackknife
    over trajectories."""
    coh = phase_coherence(phi, max_lag)
    lags = dt * np.arange(max_lag + 1)

    def rate(mean_coh):
        return -np.polyfit(lags, np.log(mean_coh.real), 1)[0]

    n = coh.shape[0]
    total = coh.sum(axis=0)
    value = rate(total / n)
    if n < 2:
        return EstimateWithError(float(value), math.nan, n)
    loo = np.array([rate((total - coh[i]) / (n - 1)) for i in range(n)])
    err = math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))
    return EstimateWithError(float(value), err, n)


# ---------------------------------------------------------------------------
# integrator


def _phi12(z):
    """``phi1(z) = (e^z - 1)/z`` and ``phi2(z) = (e^z - 1 - z)/z^2``.

    Small arguments go through a Taylor series (Horner form) whose length is
    chosen from ``max|z|``; the closed forms cancel badly there.
    """
    z = np.asarray(z, dtype=complex)
    r = float(np.max(np.abs(z))) if z.size else 0.0
    if r >= 0.5:
        ez = np.exp(z)
        return (ez - 1.0) / z, (ez - 1.0 - z) / z**2
    n = 2
    while r**n * _INV_FACT[n + 1] > 1e-17:
        n += 1
    p1 = _INV_FACT[n + 1]
    p2 = _INV_FACT[n + 2]
    for k in range(n - 1, -1, -1):
        p1 = p1 * z + _INV_FACT[k + 1]
        p2 = p2 * z + _INV_FACT[k + 2]
    return p1, p2


class _Scaled(NamedTuple):
    W: float
    G: float
    D: float
    g: float
    f: float
    gam: float
    n_bath: float
    nbar: float


def _scaled_system(p: SystemParams, cfg: SimConfig) -> _Scaled:
    s = p.scaled()
    if cfg.drive == "cw":
        nbar = float(analytics.intracavity_energy(p)) / (HBAR * p.omega_c)
        detuning = s["detuning"]
    else:
        # drive-free detuning; the subtracted mean is the time-averaged
        # intensity of the noiseless two-tone field
        detuning = 0.0
        W = s["omega_m"]
        nbar = TWO_TONE_AMPLITUDE**2 * s["flux"] * 0.5 * abs(1.0 / (0.5 + 1j * W)) ** 2
    n_bath = p.n_th + (0.5 if cfg.vacuum_noise else 0.0)
    if cfg.vacuum_noise:
        nbar += 0.5
    return _Scaled(s["omega_m"], s["gamma_m"], detuning, s["g0"], s["flux"], s["gamma_l"], n_bath, nbar)


def _integrate_block(p: SystemParams, cfg: SimConfig, indices) -> dict:
    """Integrate the trajectories ``indices`` (each with its own stream)."""
    sc = _scaled_system(p, cfg)
    streams = _streams(cfg.seed, cfg.n_traj)
    gens = [streams[i] for i in indices]
    n = len(indices)
    h = cfg.dt * p.kappa
    n_steps = cfg.n_steps
    n_rec = n_steps // cfg.record_every + 1
    heun = cfg.scheme == "heun_strat_corrected"
    frozen = cfg.freeze_mirror

    W, G, D, g, f, gam = sc.W, sc.G, sc.D, sc.g, sc.f, sc.gam
    sqrt_f = math.sqrt(f)
    phase_sd = math.sqrt(2.0 * gam * h)
    vac_sd = math.sqrt(0.25 * (1.0 - math.exp(-h))) if cfg.vacuum_noise else 0.0
    decay_p = math.exp(-G * h)
    ou_sd = math.sqrt(2.0 * sc.n_bath * (1.0 - math.exp(-2.0 * G * h)))
    em_sd = 2.0 * math.sqrt(sc.n_bath * G * h)
    cos_h, sin_h = math.cos(0.5 * W * h), math.sin(0.5 * W * h)

    def envelope(tau):
        return 1.0 if cfg.drive == "cw" else TWO_TONE_AMPLITUDE * math.sin(W * tau)

    # initial state: displaced (plus thermal) mirror, field at its static steady state
    q = np.full(n, cfg.x0 / p.x_zpt)
    pm = np.zeros(n)
    if sc.n_bath > 0 and not frozen:
        init = np.array([gg.standard_normal(2) for gg in _streams(cfg.seed + 1_000_003, cfg.n_traj)])[indices]
        q += math.sqrt(2.0 * sc.n_bath) * init[:, 0]
        pm += math.sqrt(2.0 * sc.n_bath) * init[:, 1]
    if frozen:
        q[:] = 0.0
    phi = np.zeros(n)
    b = sqrt_f * envelope(0.0) / (0.5 - 1j * (D + g * q))
    if cfg.drive == "sinusoidal":
        b = TWO_TONE_AMPLITUDE * sqrt_f * np.imag(1.0 / (0.5 + 1j * W)) * np.ones(n, dtype=complex)

    rec_q = np.empty((n, n_rec))
    rec_p = np.empty((n, n_rec))
    rec_b = np.empty((n, n_rec), dtype=complex)
    rec_phi = np.empty((n, n_rec))
    bound = 1e3 * (2.0 * sqrt_f + 1.0 + math.sqrt(sc.n_bath + 1.0) * 10)

    def record(j):
        rec_q[:, j] = q
        rec_p[:, j] = pm
        rec_b[:, j] = b
        rec_phi[:, j] = phi

    record(0)
    j_rec = 1
    u0 = sqrt_f * envelope(0.0) * np.exp(1j * phi)
    step = 0
    while step < n_steps:
        m = min(_CHUNK, n_steps - step)
        noise = _draw(gens, m, 4)
        for k in range(m):
            tau1 = (step + 1) * h
            xi = noise[k]
            phi = phi + phase_sd * xi[:, 0]
            u1 = sqrt_f * envelope(tau1) * np.exp(1j * phi)
            vac = vac_sd * (xi[:, 2] + 1j * xi[:, 3]) if vac_sd else 0.0
            if heun:
                if not frozen:
                    pm = pm + h * g * (b.real**2 + b.imag**2 - sc.nbar)
                    q, pm = cos_h * q + sin_h * pm, cos_h * pm - sin_h * q
                    pm = decay_p * pm + ou_sd * xi[:, 1]
                z = (1j * (D + g * q) - 0.5) * h
                p1, p2 = _phi12(z)
                b = np.exp(z) * b + h * (p1 - p2) * u0 + h * p2 * u1 + vac
                if not frozen:
                    q, pm = cos_h * q + sin_h * pm, cos_h * pm - sin_h * q
                    pm = pm + h * g * (b.real**2 + b.imag**2 - sc.nbar)
            else:
                z = (1j * (D + g * q) - 0.5) * h
                p1, _ = _phi12(z)
                force = 2.0 * g * (b.real**2 + b.imag**2 - sc.nbar)
                b = np.exp(z) * b + h * p1 * u0 + vac
                if not frozen:
                    q, pm = q + h * W * pm, pm + h * (-W * q - G * pm + force) + em_sd * xi[:, 1]
            u0 = u1
            step += 1
            if step % cfg.record_every == 0:
                record(j_rec)
                j_rec += 1
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(q)) and np.all(np.isfinite(pm))):
            raise NonFiniteState(f"non-finite state before t = {step * cfg.dt:.3g} s")
        if np.max(np.abs(b)) > bound:
            raise StepTooLarge("intracavity field left its stability bound; reduce dt")
    return {"q": rec_q[:, :j_rec], "p": rec_p[:, :j_rec], "b": rec_b[:, :j_rec], "phi": rec_phi[:, :j_rec]}


def _resolve_jobs(jobs) -> int:
    if jobs is None:
        jobs = int(os.environ.get("OPTOMECH_JOBS", "1") or 1)
    return max(1, int(jobs))


def simulate(p: SystemParams, cfg: SimConfig, jobs: int | None = None) -> Trajectory:
    """Integrate ``cfg.n_traj`` independent trajectories.

    Each trajectory owns a Philox stream spawned from ``cfg.seed``, so the
    result does not depend on ``jobs``.  With ``gamma_m = gamma_l = 0``,
    ``P = 0`` and no bath the default scheme rotates the oscillator exactly;
    in general it is second order in ``dt`` for the deterministic part.
    """
    cfg.check(p)
    jobs = min(_resolve_jobs(jobs), cfg.n_traj)
    idx = np.arange(cfg.n_traj)
    if jobs == 1:
        parts = [_integrate_block(p, cfg, idx)]
    else:
        blocks = np.array_split(idx, jobs)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_integrate_block, [p] * jobs, [cfg] * jobs, blocks))
    q = np.concatenate([r["q"] for r in parts])
    pm = np.concatenate([r["p"] for r in parts])
    b = np.concatenate([r["b"] for r in parts])
    phi = np.concatenate([r["phi"] for r in parts])
    t = cfg.dt * cfg.record_every * np.arange(q.shape[1])
    amp = math.sqrt(HBAR * p.omega_c)
    return Trajectory(
        t=t,
        x=q * p.x_zpt,
        v=pm * p.omega_m * p.x_zpt,
        beta_re=amp * b.real,
        beta_im=amp * b.imag,
        phi=phi,
        meta={"seed": cfg.seed, "scheme": cfg.scheme, "dt": cfg.dt, "drive": cfg.drive},
    )


# ---------------------------------------------------------------------------
# estimators


def _jackknife(values_full: float, loo: np.ndarray) -> float:
    n = loo.size
    return math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))


def _envelope_fit(t, xbar, omega, skip):
    """Demodulate at ``omega``, average over whole periods and fit
    ``log|z|`` and ``arg z`` linearly.  Returns slopes and their standard
    errors ``(rate, d_rate, dphase, d_dphase)``."""
    dt = t[1] - t[0]
    per = int(round(2.0 * math.pi / (omega * dt)))
    if per < 4:
        raise FitNotConverged("fewer than four samples per mechanical period")
    start = int(np.searchsorted(t, skip))
    n_win = (t.size - start) // per
    if n_win < 4:
        raise FitNotConverged("record too short for the envelope fit")
    seg = slice(start, start + n_win * per)
    z = 2.0 * xbar[seg] * np.exp(-1j * omega * t[seg])
    z = z.reshape(n_win, per).mean(axis=1)
    tc = t[seg].reshape(n_win, per).mean(axis=1)
    mag = np.abs(z)
    if np.any(mag <= 0) or not np.all(np.isfinite(mag)):
        raise FitNotConverged("envelope vanished during the fit window")
    out = []
    for y in (np.log(mag), np.unwrap(np.angle(z))):
        coef, cov = np.polyfit(tc, y, 1, cov="unscaled") if n_win > 2 else (np.polyfit(tc, y, 1), None)
        resid = y - np.polyval(coef, tc)
        s2 = float(resid @ resid) / max(n_win - 2, 1)
        out += [coef[0], math.sqrt(max(cov[0, 0] * s2, 0.0))]
    return out


def estimate_damping_and_shift(
    ens: Trajectory,
    p: SystemParams,
    cfg: SimConfig,
    skip: float | None = None,
    baseline: Trajectory | None = None,
) -> RingDown:
    """Fit ``A exp(-Gamma_eff t / 2) sin(Omega_eff t + phase)`` to the ensemble
    mean displacement.

    ``baseline`` is an optional ensemble run with ``x0 = 0`` on the same
    random streams; subtracting it trajectory by trajectory removes the
    noise common to both runs without changing the expected signal.  The
    standard error combines a delete-one jackknife over trajectories with the
    regression error of the envelope fit.
    """
    if skip is None:
        skip = max(10.0 / p.kappa, 4.0 * math.pi / p.omega_m)
    x = ens.x if baseline is None else ens.x - baseline.x
    x = x / (np.abs(x).max() or 1.0)
    n = x.shape[0]
    total = x.sum(axis=0)
    rate, d_rate, dphi, d_dphi = _envelope_fit(ens.t, total / n, p.omega_m, skip)
    jk_g = jk_w = 0.0
    if n > 1:
        loo = np.array([_envelope_fit(ens.t, (total - x[i]) / (n - 1), p.omega_m, skip)[::2] for i in range(n)])
        jk_g = _jackknife(rate, loo[:, 0])
        jk_w = _jackknife(dphi, loo[:, 1])
    gamma_eff = -2.0 * rate
    if abs(gamma_eff) * cfg.duration < 2.0:
        raise InsufficientDecay(f"|Gamma_eff| x duration = {abs(gamma_eff) * cfg.duration:.3g} < 2")
    g_err = 2.0 * math.hypot(d_rate, jk_g)
    w_err = math.hypot(d_dphi, jk_w)
    return RingDown(
        EstimateWithError(float(gamma_eff), g_err, n),
        EstimateWithError(float(p.omega_m + dphi), w_err, n),
    )


def ring_down(p: SystemParams, cfg: SimConfig, paired: bool = True, jobs=None) -> RingDown:
    """Simulate a ring-down from ``cfg.x0`` and fit it.

    With ``paired`` a second ensemble starting at rest shares the random
    streams and is subtracted before fitting.
    """
    ens = simulate(p, cfg, jobs=jobs)
    base = simulate(p, replace(cfg, x0=0.0), jobs=jobs) if paired else None
    return estimate_damping_and_shift(ens, p, cfg, baseline=base)


def mean_intensity_mc(p: SystemParams, cfg: SimConfig, burn_in: float | None = None, jobs=None) -> EstimateWithError:
    """Time- and ensemble-averaged ``|beta|^2`` [J] with the mirror held at rest."""
    cfg = replace(cfg, freeze_mirror=True, drive="cw")
    ens = simulate(p, cfg, jobs=jobs)
    if burn_in is None:
        burn_in = 20.0 / p.kappa
    keep = ens.t >= burn_in
    per_traj = ens.intensity[:, keep].mean(axis=1)
    n = per_traj.size
    err = per_traj.std(ddof=1) / math.sqrt(n) if n > 1 else math.nan
    return EstimateWithError(float(per_traj.mean()), float(err), n)


def quadrature_variance_mc(p: SystemParams, cfg: SimConfig, burn_in: float = 0.0, jobs=None):
    """Time-averaged ensemble variances of the rotating-frame quadratures under
    the two-tone drive.

    Returns ``(var_x, var_y)`` as ``EstimateWithError`` with jackknife errors
    over trajectories.  With ``cfg.vacuum_noise`` the free thermal state gives
    ``n_th + 1/2`` for both, matching the symmetric quantum convention.
    """
    cfg = replace(cfg, drive="sinusoidal", x0=0.0)
    ens = simulate(p, cfg, jobs=jobs)
    keep = ens.t >= burn_in
    t = ens.t[keep]
    X, Y = quadrature_trajectory(ens.x[:, keep], p.mass * ens.v[:, keep], p, t)
    n = X.shape[0]
    if n < 2:
        raise ConfigError("quadrature variances need n_traj >= 2")

    def estimate(A):
        s1 = A.sum(axis=0)
        s2 = (A * A).sum(axis=0)

        def var(s1, s2, m):
            return float(np.mean(s2 / m - (s1 / m) ** 2) * m / (m - 1))

        full = var(s1, s2, n)
        if n < 3:
            return EstimateWithError(full, math.nan, n)
        loo = np.array([var(s1 - A[i], s2 - A[i] ** 2, n - 1) for i in range(n)])
        return EstimateWithError(full, _jackknife(full, loo), n)

    return estimate(X), estimate(Y)


# ---------------------------------------------------------------------------
# deterministic phase-averaged kernel


def _pair_integral(p: SystemParams, n1, n2):
    """Long-time value of the double integral over the cavity filter and the
    phase-coherence kernel for Bessel orders ``n1, n2`` (transients dropped)."""
    k, om, d, g = p.kappa, p.omega_m, p.detuning, p.gamma_l
    a = 0.5 * k + 1j * (n1 * om - d)
    b = 0.5 * k - 1j * (n2 * om - d)
    return (1.0 / (a + g) + 1.0 / (b + g)) / (a + b)


def averaged_intensity_response(p: SystemParams, x0: float, truncation_n: int = 3, quad_tol: float = 1e-10):
    """Phase-averaged intracavity energy for a mirror moving as
    ``x0 sin(Omega t)``, projected onto its DC and first harmonic.

    Returns ``(Gamma_opt, Delta_Omega_opt, beta0_sq)`` in SI units, computed
    from the Bessel expansion of the cavity phase modulation with orders
    ``|n| <= truncation_n``.
    """
    if truncation_n < 2:
        raise ValueError("truncation_n must be >= 2")
    eps = p.g0 * (x0 / p.x_zpt) / p.omega_m
    if eps > 1e-3:
        raise ConfigError(f"modulation depth {eps:.3g} exceeds 1e-3")
    orders = np.arange(-truncation_n, truncation_n + 1)
    jn = special.jv(orders, eps)
    kp = p.kappa * p.power

    c0_terms = kp * jn**2 * _pair_integral(p, orders, orders)
    lo = orders[:-1]
    c1_terms = kp * 1j * jn[1:] * jn[:-1] * _pair_integral(p, lo + 1, lo)
    c0 = c0_terms.sum()
    c1 = c1_terms.sum()
    edge0 = abs(c0_terms[0] + c0_terms[-1])
    edge1 = abs(c1_terms[0] + c1_terms[-1])
    if edge0 > quad_tol * abs(c0) or edge1 > quad_tol * max(abs(c1), 1e-300):
        raise TruncationError(f"order {truncation_n} still contributes; raise truncation_n")

    ml = p.mass * p.length
    gamma_opt = -2.0 * c1.real / (x0 * p.omega_m * ml)
    omega_opt_sq = 2.0 * c1.imag / (x0 * ml)
    return float(gamma_opt), float(omega_opt_sq / (2.0 * p.omega_m)), float(c0.real)
