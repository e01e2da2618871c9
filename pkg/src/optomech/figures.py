"""Figure data and parameter sweeps as long-format grids.

A grid is evaluated row-major over its two axes.  Figure axes are given in
units of ``kappa`` (``omega_m``, ``gamma_l``, ``detuning``); sweep axes use
the units of the configuration they modify.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import analytics, quadratures, spectrum
from .core import PARAM_FIELDS, SystemParams
from .errors import BadAxisSpec, OptomechError, UnknownFigure

DEFAULT_POINTS = 101


@dataclass(frozen=True)
class Axis:
    field: str
    values: tuple

    @classmethod
    def linspace(cls, field, start, stop, num=DEFAULT_POINTS):
        return cls(field, tuple(float(v) for v in np.linspace(start, stop, int(num))))

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """``field=start:stop:num`` or ``field=v1,v2,...``."""
        name, sep, rest = text.partition("=")
        name = name.strip()
        if not sep or name not in PARAM_FIELDS:
            raise BadAxisSpec(f"axis must look like 'field=start:stop:num' with a parameter field, got {text!r}")
        try:
            if ":" in rest:
                parts = rest.split(":")
                if len(parts) != 3:
                    raise ValueError
                start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
                if num < 1:
                    raise ValueError
                return cls.linspace(name, start, stop, num)
            values = tuple(float(v) for v in rest.split(",") if v.strip())
        except ValueError:
            raise BadAxisSpec(f"cannot parse axis values in {text!r}") from None
        if not values:
            raise BadAxisSpec(f"axis {name!r} has no values")
        return cls(name, values)


@dataclass(frozen=True)
class Grid:
    axes: tuple
    value_name: str
    rows: list  # (axis values..., value, validity)

    def column(self, name):
        names = [a.field for a in self.axes] + [self.value_name, "validity"]
        i = names.index(name)
        return [r[i] for r in self.rows]

    def values(self) -> np.ndarray:
        shape = [len(a.values) for a in self.axes]
        return np.array([r[len(self.axes)] for r in self.rows], dtype=float).reshape(shape)

    def to_csv(self, path) -> None:
        header = [a.field for a in self.axes] + [self.value_name, "validity"]
        with Path(path).open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for r in self.rows:
                w.writerow([_fmt(v) for v in r])

    def to_records(self) -> list:
        header = [a.field for a in self.axes] + [self.value_name, "validity"]
        return [dict(zip(header, r)) for r in self.rows]


def _fmt(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return v


# ---------------------------------------------------------------------------
# per-cell quantities


@lru_cache(maxsize=4096)
def _occupation(p: SystemParams) -> float:
    return spectrum.mean_occupation(p)


def _analytic_flag(p):
    return "ok" if analytics.back_action(p).valid else "outside"


def _fig2(p):
    ref = analytics.optical_damping(p.replace(gamma_l=0.0))
    value = analytics.optical_damping(p) / ref if ref != 0 else math.nan
    return float(value), _analytic_flag(p)


def _fig3(p):
    return float(analytics.coeff_a(p, -1) * p.kappa), "ok"


def _fig4(p):
    return float(analytics.normalized_photon_number(p)), "ok"


def _fig5(p):
    return float(analytics.frequency_shift(p) / analytics.shift_unit(p)), _analytic_flag(p)


def _fig6(p):
    if not spectrum.is_stable(p):
        return math.nan, "unstable"
    return _occupation(p) / _occupation(p.replace(gamma_l=0.0)), "ok"


def _fig7(p):
    return quadratures.heating_ratio(p), quadratures.validity(p)


def _q_gamma_opt(p):
    return float(analytics.optical_damping(p)), _analytic_flag(p)


def _q_delta_omega(p):
    return float(analytics.frequency_shift(p)), _analytic_flag(p)


def _q_beta0(p):
    return float(analytics.intracavity_energy(p)), "ok"


def _q_n_min(p):
    return spectrum.n_min_weak_coupling(p), spectrum.good_cavity_validity(p)


def _q_s_n(p):
    grid = spectrum.noise_spectrum(p)
    return spectrum.mean_phonon_number(grid), "ok" if grid.stable else "unstable"


def _q_var_x(p):
    v = quadratures.quadrature_variances(p)
    return v.var_x, v.validity


def _q_var_y(p):
    v = quadratures.quadrature_variances(p)
    return v.var_y, v.validity


QUANTITIES = {
    "gamma_opt": _q_gamma_opt,
    "delta_omega_opt": _q_delta_omega,
    "beta0_sq": _q_beta0,
    "n_min": _q_n_min,
    "s_n_integral": _q_s_n,
    "var_x": _q_var_x,
    "var_y": _q_var_y,
    "heating_ratio": _fig7,
}


# ---------------------------------------------------------------------------
# figure definitions


@dataclass(frozen=True)
class FigureSpec:
    name: str
    description: str
    value_name: str
    func: object
    axis1: Axis
    axis2: Axis
    base: dict  # rates in units of kappa plus SI extras
    kappa: float = 1.0
    g0: float = 1e-3
    n_max: float = 1.0

    def params(self, **overrides) -> SystemParams:
        """Base parameters in SI; ``overrides`` use the same units as ``base``."""
        vals = {**self.base, **overrides}
        k = vals.pop("kappa", self.kappa)
        g0 = vals.pop("g0", self.g0)
        n_max = vals.pop("n_max", self.n_max)
        rates = {key: vals.pop(key) * k for key in ("omega_m", "gamma_m", "gamma_l", "detuning") if key in vals}
        omega_m = rates.pop("omega_m")
        return SystemParams.from_rates(omega_m, k, g0=g0, n_max=n_max, **rates, **vals)


FIGURES = {
    "fig2": FigureSpec(
        "fig2",
        "optical damping normalised to the zero-linewidth value",
        "gamma_opt_ratio",
        _fig2,
        Axis.linspace("gamma_l", 0.0, 1.0),
        Axis.linspace("detuning", -8.0, -0.08),
        {"omega_m": 4.0},
    ),
    "fig3": FigureSpec(
        "fig3",
        "sideband weight A_minus times kappa",
        "a_minus",
        _fig3,
        Axis.linspace("gamma_l", 0.0, 1.0),
        Axis.linspace("detuning", -8.0, 8.0),
        {"omega_m": 4.0},
    ),
    "fig4": FigureSpec(
        "fig4",
        "normalised intracavity intensity kappa |beta_0|^2 / 4P",
        "n_photon",
        _fig4,
        Axis.linspace("gamma_l", 0.0, 2.0),
        Axis("detuning", (0.0, 1.0, 2.0, 4.0)),
        {"omega_m": 4.0},
    ),
    "fig5": FigureSpec(
        "fig5",
        "optical spring shift in units of 2 P omega_c / (Omega^2 M L^2 kappa)",
        "delta_omega_scaled",
        _fig5,
        Axis.linspace("gamma_l", 0.0, 1.0),
        Axis.linspace("detuning", -8.0, 8.0),
        {"omega_m": 4.0},
    ),
    "fig6": FigureSpec(
        "fig6",
        "mean occupation at zero mechanical damping relative to gamma = 0",
        "n_ratio",
        _fig6,
        Axis.linspace("gamma_l", 0.0, 0.5),
        Axis.linspace("detuning", -60.0, -20.0),
        {"omega_m": 40.0, "gamma_m": 0.0, "n_th": 0.0},
        kappa=2e5,
        g0=50.0,
        n_max=1e11,
    ),
    "fig7": FigureSpec(
        "fig7",
        "cosine over sine quadrature back-action heating at n_M = 0",
        "heating_ratio",
        _fig7,
        Axis.linspace("omega_m", 1.0, 10.0),
        Axis.linspace("gamma_l", 0.0, 0.5),
        {"omega_m": 4.0, "gamma_m": 1e-3, "n_th": 0.0},
    ),
}


def get_figure(name: str) -> FigureSpec:
    try:
        return FIGURES[name]
    except KeyError:
        raise UnknownFigure(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}") from None


# ---------------------------------------------------------------------------
# grid evaluation


def _eval_cell(func, p):
    try:
        return func(p)
    except (OptomechError, ZeroDivisionError, ValueError) as exc:
        return math.nan, f"error:{type(exc).__name__}"


def _eval_chunk(func, plist):
    return [_eval_cell(func, p) for p in plist]


def resolve_jobs(jobs=None) -> int:
    if jobs is None:
        env = os.environ.get("OPTOMECH_JOBS", "").strip()
        jobs = int(env) if env else 1
    return max(1, int(jobs))


def evaluate(func, cells, jobs=None):
    """Evaluate ``func`` on a list of parameter sets, keeping input order."""
    jobs = min(resolve_jobs(jobs), max(1, len(cells)))
    if jobs == 1:
        return _eval_chunk(func, cells)
    chunks = [list(c) for c in np.array_split(np.array(cells, dtype=object), jobs * 4) if len(c)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = pool.map(_eval_chunk, [func] * len(chunks), chunks)
        return [r for part in parts for r in part]


def figure_grid(name: str, overrides: dict | None = None, axes=None, jobs=None) -> Grid:
    """Evaluate a figure on its grid.

    ``overrides`` replace the figure defaults (rates in units of kappa); ``axes``
    optionally replaces the two default axes.
    """
    spec = get_figure(name)
    overrides = dict(overrides or {})
    a1, a2 = axes if axes else (spec.axis1, spec.axis2)
    cells = []
    for v1 in a1.values:
        for v2 in a2.values:
            cells.append(spec.params(**{**overrides, a1.field: v1, a2.field: v2}))
    results = evaluate(spec.func, cells, jobs)
    rows = [(v1, v2, val, flag) for (v1, v2), (val, flag) in zip(_pairs(a1, a2), results)]
    return Grid((a1, a2), spec.value_name, rows)


def sweep(base: SystemParams, axes, quantity: str, jobs=None) -> Grid:
    """Evaluate ``quantity`` over one or two SI parameter axes of ``base``."""
    if quantity not in QUANTITIES:
        raise BadAxisSpec(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")
    axes = tuple(axes)
    if not 1 <= len(axes) <= 2:
        raise BadAxisSpec("give one or two axes")
    if len({a.field for a in axes}) != len(axes):
        raise BadAxisSpec("axes must use distinct fields")
    combos = _pairs(*axes) if len(axes) == 2 else [(v,) for v in axes[0].values]
    cells = []
    for combo in combos:
        try:
            cells.append(base.replace(**{a.field: v for a, v in zip(axes, combo)}))
        except OptomechError as exc:
            raise BadAxisSpec(f"invalid grid point {combo}: {exc}") from None
    results = evaluate(QUANTITIES[quantity], cells, jobs)
    rows = [(*combo, val, flag) for combo, (val, flag) in zip(combos, results)]
    return Grid(axes, quantity, rows)


def _pairs(a1: Axis, a2: Axis):
    return [(v1, v2) for v1 in a1.values for v2 in a2.values]


GNUPLOT_TEMPLATE = """# gnuplot script for {name}: {description}
set datafile separator ','
set key autotitle columnhead
set xlabel '{x}'
set ylabel '{y}'
{body}
"""


def gnuplot_script(name: str, csv_path: str) -> str:
    spec = get_figure(name)
    if name == "fig4":
        body = f"plot for [d in \"{' '.join(str(v) for v in spec.axis2.values)}\"] '{csv_path}' " \
            f"using 1:($2 == d ? $3 : 1/0) with lines title 'detuning '.d"
        ylabel = spec.value_name
    else:
        body = (
            "set view map\nset pm3d map\nset dgrid3d\n"
            f"splot '{csv_path}' using 1:2:3 with pm3d title '{spec.value_name}'"
        )
        ylabel = spec.axis2.field
    return GNUPLOT_TEMPLATE.format(
        name=name, description=spec.description, x=spec.axis1.field + " / kappa", y=ylabel, body=body
    )
