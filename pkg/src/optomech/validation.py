"""Acceptance checks runnable from the command line and the test-suite.

Each check returns a ``CriterionResult`` with the measured numbers, the
tolerance it was held to and the wall time.  ``run_all`` collects them into a
JSON-serialisable report.  ``profile="quick"`` shrinks the Monte-Carlo
ensembles for smoke runs; only ``"full"`` uses the acceptance sizes.
"""
from __future__ import annotations

import contextlib
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import analytics, figures, langevin, quadratures, spectrum
from .core import SystemParams

PROFILES = ("full", "quick")


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    runtime_s: float = 0.0
    runtime_limit_s: float | None = None
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d}. {self.title} ({self.runtime_s:.2f} s)"

    def as_dict(self) -> dict:
        return asdict(self)


def _timed(number, title, limit, body):
    t0 = time.perf_counter()
    passed, metrics, note = body()
    elapsed = time.perf_counter() - t0
    if limit is not None and elapsed > limit:
        passed = False
        note = (note + "; " if note else "") + f"runtime {elapsed:.1f} s exceeds {limit} s"
    return CriterionResult(number, title, bool(passed), metrics, elapsed, limit, note)


def _rel(a, b):
    return abs(a - b) / abs(b)


# ---------------------------------------------------------------------------
# shared parameter sets


def weak_coupling_params(gamma_l=0.0) -> SystemParams:
    """Omega = 40 kappa, Delta = -Omega, Gamma_opt = 1e-3 kappa, Gamma = 1e-7 kappa."""
    om, g0 = 40.0, 1e-4
    p = SystemParams.from_rates(om, 1.0, g0=g0, n_max=1.0, detuning=-om, gamma_m=1e-7)
    n_max = 1e-3 / analytics.optical_damping(p)
    return p.replace(power=p.power * n_max, gamma_l=gamma_l)


def random_params(rng, count=20):
    """Random red and blue detuned systems across cavity regimes."""
    out = []
    while len(out) < count:
        kappa = 10 ** rng.uniform(-1, 5)
        om = kappa * 10 ** rng.uniform(-0.5, 1.5)
        det = kappa * rng.uniform(-10, 10)
        if abs(det) < 0.05 * kappa:
            continue
        out.append(
            SystemParams.from_rates(
                om,
                kappa,
                g0=kappa * 10 ** rng.uniform(-5, -3),
                n_max=10 ** rng.uniform(0, 4),
                detuning=det,
                gamma_m=kappa * 10 ** rng.uniform(-6, -3),
                n_th=rng.uniform(0, 20),
            )
        )
    return out


# ---------------------------------------------------------------------------
# criteria


def criterion_1():
    def body():
        p0, p1 = weak_coupling_params(0.0), weak_coupling_params(0.1)
        ratio = spectrum.n_min_weak_coupling(p1) / spectrum.n_min_weak_coupling(p0)
        om = p0.omega_m
        exact = 1.2 * (1 + 16 * om**2) / (1.44 + 16 * om**2)
        quad = spectrum.mean_occupation(p1) / spectrum.mean_occupation(p0)
        ok = abs(ratio - exact) < 1e-6 and abs(ratio - 1.2) < 5e-4 and _rel(quad, 1.2) < 0.02
        return ok, {"formula_ratio": ratio, "closed_form": exact, "quadrature_ratio": quad}, ""

    return _timed(1, "n_min(0.1 kappa)/n_min(0) = 1.200 at Omega = 40 kappa", 1.0, body)


def criterion_2():
    def body():
        p = weak_coupling_params(0.0)
        good = spectrum.n_min_good_cavity(p)
        weak = spectrum.n_min_weak_coupling(p)
        ok = good == 3.90625e-5 and _rel(weak, good) < 0.01
        return ok, {"good_cavity": good, "weak_coupling": weak}, ""

    return _timed(2, "good-cavity n_min = 3.90625e-5 and matches weak coupling", None, body)


def _zero_gamma_checks(p: SystemParams) -> dict:
    errs = {}
    errs["gamma_opt"] = _rel(float(analytics.optical_damping(p)), analytics.reference_damping_zero_gamma(p))
    errs["delta_omega"] = _rel(float(analytics.frequency_shift(p)), analytics.reference_shift_zero_gamma(p))
    field_ss = p.kappa * p.power / (p.kappa**2 / 4.0 + p.detuning**2)
    errs["beta0_sq"] = _rel(float(analytics.intracavity_energy(p)), field_ss)
    if spectrum.is_stable(p):
        w = p.omega_m * np.array([-1.3, -1.0, -0.7, 0.0, 0.5, 1.0, 1.6])
        got = spectrum.spectral_density(p, w)
        ref = spectrum.reference_spectrum_zero_gamma(p, w)
        errs["s_n"] = float(np.max(np.abs(got - ref) / np.abs(ref)))
    v = quadratures.quadrature_variances(p)
    rx, ry = quadratures.reference_variances_zero_gamma(p)
    errs["var_x"] = _rel(v.var_x, rx)
    errs["var_y"] = _rel(v.var_y, ry)
    return errs


def criterion_3(seed=20240521):
    def body():
        worst: dict = {}
        for p in random_params(np.random.default_rng(seed)):
            for k, e in _zero_gamma_checks(p).items():
                worst[k] = max(worst.get(k, 0.0), e)
        return all(e < 1e-6 for e in worst.values()), {"max_rel_error": worst}, ""

    return _timed(3, "gamma -> 0 reductions match independent references to 1e-6", 1.0, body)


def criterion_4():
    def body():
        errs = {"gamma_opt": 0.0, "delta_omega": 0.0}
        base = SystemParams.from_rates(4.0, 1.0, g0=1e-3, n_max=1e3)
        cells = []
        for d in np.linspace(-8.0, 8.0, 5):
            for g in np.linspace(0.0, 1.0, 5):
                p = base.replace(detuning=d, gamma_l=g)
                x0 = 1e-4 * p.omega_m / p.g0 * p.x_zpt  # modulation depth 1e-4
                num = langevin.averaged_intensity_response(p, x0)
                cells.append((num[0], float(analytics.optical_damping(p)), num[1], float(analytics.frequency_shift(p))))
        cells = np.array(cells)
        for name, (i, j) in {"gamma_opt": (0, 1), "delta_omega": (2, 3)}.items():
            scale = np.maximum(np.abs(cells[:, j]), 1e-3 * np.max(np.abs(cells[:, j])))
            errs[name] = float(np.max(np.abs(cells[:, i] - cells[:, j]) / scale))
        note = "errors relative to max(|value|, 1e-3 max|value| on the grid); both vanish at Delta = 0"
        return all(e < 1e-5 for e in errs.values()), {"max_rel_error": errs}, note

    return _timed(4, "phase-averaged Bessel kernel reproduces Gamma_opt and the spring shift", 30.0, body)


def ring_down_setup(gamma_l: float, n_traj: int = 200, seed: int = 11):
    """Omega = 4 kappa, Delta = -Omega, Gamma_opt ~ 5e-3 kappa, modulation depth 1e-3."""
    om = 4.0
    p = SystemParams.from_rates(om, 1.0, g0=1e-3, n_max=8.12e4, detuning=-om, gamma_l=gamma_l, gamma_m=1e-4)
    cfg = langevin.SimConfig(
        dt=2 * math.pi / om / 320,
        duration=600.0,
        n_traj=n_traj,
        seed=seed,
        x0=1e-3 * om / p.g0 * p.x_zpt,
        record_every=10,
    )
    return p, cfg


def criterion_5(n_traj=200, jobs=None):
    def body():
        metrics, ok = {}, True
        for gl in (0.0, 0.2):
            p, cfg = ring_down_setup(gl, n_traj)
            fit = langevin.ring_down(p, cfg, jobs=jobs)
            g_ref = p.gamma_m + float(analytics.optical_damping(p))
            w_ref = p.omega_m + float(analytics.frequency_shift(p))
            # the closed forms assume a steady oscillation; a ring-down at rate
            # Gamma_eff shifts them by O(Gamma_opt Gamma_eff / kappa)
            u_ref = abs(g_ref - p.gamma_m) * abs(g_ref) / p.kappa
            sg = math.hypot(fit.gamma_eff.std_error, u_ref)
            sw = math.hypot(fit.omega_eff.std_error, u_ref)
            dg, dw = fit.gamma_eff.value - g_ref, fit.omega_eff.value - w_ref
            this = abs(dg) <= 3 * sg and abs(dw) <= 3 * sw and abs(dg) <= 0.1 * abs(g_ref) and abs(dw) <= 0.1 * abs(w_ref)
            ok &= this
            metrics[f"gamma_l={gl}"] = {
                "gamma_eff": fit.gamma_eff.as_dict(),
                "gamma_ref": g_ref,
                "gamma_sigma": dg / sg,
                "omega_eff": fit.omega_eff.as_dict(),
                "omega_ref": w_ref,
                "omega_sigma": dw / sw,
                "reference_uncertainty": u_ref,
            }
        return ok, metrics, "3 sigma with sigma = fit error (+) O(Gamma_opt Gamma_eff/kappa) reference uncertainty"

    return _timed(5, "Monte-Carlo ring-down reproduces Gamma_eff and Omega_eff", 900.0, body)


def criterion_6():
    def body():
        grid = figures.figure_grid("fig2")
        vals = grid.values()
        gammas = np.array(grid.axes[0].values)
        dets = np.array(grid.axes[1].values)
        p = figures.get_figure("fig2").params(detuning=-4.0)
        at_minus_omega = [
            float(analytics.optical_damping(p.replace(gamma_l=g)) / analytics.optical_damping(p)) for g in gammas[gammas > 0]
        ]
        inside = (dets > -4.0) & (dets < 0.0)
        above = vals[np.ix_(gammas > 0, inside)] > 1.0
        ok = max(at_minus_omega) < 1.0 and bool(above.any()) and np.allclose(vals[0], 1.0)
        return ok, {"max_ratio_at_minus_omega": max(at_minus_omega), "cells_above_one": int(above.sum())}, ""

    return _timed(6, "fig2 structure: < 1 at Delta = -Omega, > 1 somewhere in (-Omega, 0)", None, body)


def criterion_7(n_traj=500, jobs=None):
    def body():
        grid = figures.figure_grid("fig4")
        v = grid.values()
        dets = list(grid.axes[1].values)
        at0, at4 = v[:, dets.index(0.0)], v[:, dets.index(4.0)]
        shape_ok = (
            abs(at0[0] - 1.0) < 1e-12
            and bool(np.all(np.diff(at0) < 0))
            and bool(np.all(np.diff(at4) > 0))
            and bool(np.all(np.diff(at4, 2) < 0))
        )
        spots = {}
        mc_ok = True
        for i, (gl, d) in enumerate(((0.5, 2.0), (1.0, 4.0), (0.25, 0.0))):
            p = SystemParams.from_rates(4.0, 1.0, g0=1e-3, n_max=100.0, detuning=d, gamma_l=gl)
            cfg = langevin.SimConfig(dt=1 / 200, duration=200.0, n_traj=n_traj, seed=100 + i, record_every=5)
            est = langevin.mean_intensity_mc(p, cfg, jobs=jobs)
            ref = float(analytics.intracavity_energy(p))
            z = est.z_score(ref)
            mc_ok &= z <= 2.0
            spots[f"gamma={gl},delta={d}"] = {"mc": est.as_dict(), "analytic": ref, "z": z}
        return shape_ok and mc_ok, {"shape_ok": shape_ok, "spots": spots}, ""

    return _timed(7, "fig4 normalisation and trends, with Monte-Carlo spot checks", None, body)


def criterion_8():
    def body():
        errs = {}
        for n in (0.1, 1.0, 10.0, 100.0):
            p = SystemParams.from_rates(40.0, 1.0, g0=1e-4, n_max=1.0, gamma_m=1e-3, n_th=n).replace(power=0.0)
            errs[str(n)] = _rel(spectrum.mean_occupation(p), n)
        return max(errs.values()) < 1e-3, {"rel_error": errs}, ""

    return _timed(8, "undriven spectrum integrates to n_M", None, body)


def criterion_9(seed=7):
    def body():
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(20):
            kappa = 10 ** rng.uniform(-1, 4)
            p = SystemParams.from_rates(
                kappa * rng.uniform(20, 200), kappa, g0=kappa * 1e-4, n_max=10 ** rng.uniform(0, 4), gamma_m=kappa * 1e-4
            )
            v = quadratures.quadrature_variances_good_cavity(p)
            # the sine-quadrature excess over ba_x; ba_y / ba_x itself is one more
            worst = max(worst, _rel((v.ba_y - v.ba_x) / v.ba_x, 32 * p.omega_m**2 / (9 * p.kappa**2)))
        protection_ok = worst < 1e-12

        spec = figures.get_figure("fig7")
        best, best_om, best_ratio = 0.0, None, 0.0
        for om in spec.axis1.values:
            p = spec.params(omega_m=om)
            gain = quadratures.quadrature_variances(p.replace(gamma_l=0.3)).ba_x / quadratures.quadrature_variances(p).ba_x
            if gain > best:
                best, best_om = gain, om
            best_ratio = max(best_ratio, quadratures.heating_ratio(p.replace(gamma_l=0.3)) / quadratures.heating_ratio(p))
        degradation_ok = 5.0 <= best <= 20.0
        metrics = {
            "protection_max_rel_error": worst,
            "cosine_heating_gain_at_0.3": best,
            "at_omega_over_kappa": best_om,
            "heating_ratio_gain_at_0.3": best_ratio,
        }
        note = "" if degradation_ok else "closed form gives at most this gain on the grid; see notes"
        return protection_ok and degradation_ok, metrics, note

    return _timed(9, "BAE protection factor and cosine-quadrature degradation at gamma = 0.3 kappa", None, body)


def criterion_10(n_traj=1000, seed=5):
    def body():
        gamma, dt = 0.3, 0.01
        phi = langevin.phase_noise_paths(gamma, dt, 4000, n_traj, seed)
        est = langevin.fit_phase_diffusion(phi, dt, max_lag=int(1.0 / (gamma * dt)))
        err = _rel(est.value, gamma)
        return err < 0.03, {"fitted": est.as_dict(), "target": gamma, "rel_error": err}, ""

    return _timed(10, "phase-diffusion coherence decays at gamma", 60.0, body)


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


def run_criterion(number: int, profile: str = "full", jobs=None) -> CriterionResult:
    if profile not in PROFILES:
        raise ValueError(f"profile must be one of {PROFILES}")
    fn = CRITERIA[number]
    if profile == "quick":
        if number == 5:
            return fn(n_traj=20, jobs=jobs)
        if number == 7:
            return fn(n_traj=50, jobs=jobs)
        if number == 10:
            return fn(n_traj=100)
    elif number in (5, 7):
        return fn(jobs=jobs)
    return fn()


def run_all(profile: str = "full", only=None, jobs=None) -> dict:
    numbers = sorted(only) if only else sorted(CRITERIA)
    results = [run_criterion(n, profile, jobs) for n in numbers]
    return {
        "profile": profile,
        "passed": all(r.passed for r in results),
        "criteria": [r.as_dict() for r in results],
        "lines": [r.line() for r in results],
    }


@contextlib.contextmanager
def perturbed_gamma_opt(factor: float):
    """Temporarily scale ``analytics.optical_damping`` (mutation testing)."""
    original = analytics.optical_damping

    def scaled(p, detuning=None):
        return factor * original(p, detuning)

    analytics.optical_damping = scaled
    try:
        yield
    finally:
        analytics.optical_damping = original
