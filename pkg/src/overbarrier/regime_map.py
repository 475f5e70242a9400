"""Sweeps of the (delta, eps) plane and the first-order/quasiclassical divide.

For every grid cell the sweep evaluates the first-order (Born) reflectance,
the turning-point (WKB) reflectance, the exact reflectance where a closed
form or a certifiable solve exists, and the smoothness score S of the
dominant turning point.  Cells classify as

    born      : S <= s_lo          (smooth-potential machinery unreliable)
    wkb       : S >= s_hi          (first-order result far off)
    crossover : s_lo < S < s_hi with an exact reference available
    unresolved: s_lo < S < s_hi without one

The dividing line itself is extracted per eps column.  For these shape
families the two approximate reflectances never actually cross: WKB bounds
Born from above over the whole plane, and their ratio peaks (comes closest
to 1) exactly along the matching locus.  The line is therefore located as
the ridge of ln(R_born / R_wkb) over delta in each column, refined by
bounded scalar maximization between the bracketing grid cells.  Columns
whose ridge sits on a grid edge are skipped and reported.

On the (ln 1/eps, ln 1/delta) plane the ridge runs with slope 1 for the
smooth step and slope 2 for the sech^2 bump; for the Gaussian bump it
tracks ln(1/delta) = 1/eps^2, so that family is fitted against 1/eps^2.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

from .born import ln_born_closed_form
from .errors import UnsupportedFamilyError
from .exact import (
    STATUS_OK,
    SolveOptions,
    ln_reflectance_closed_form,
    reflectance_exact,
)
from .potentials import Family, PotentialSpec
from .wkb import WkbOptions, reflectance_wkb

REGIME_BORN = "born"
REGIME_WKB = "wkb"
REGIME_CROSSOVER = "crossover"
REGIME_UNRESOLVED = "unresolved"

S_LO_DEFAULT = 1.0 / 3.0
S_HI_DEFAULT = 3.0

# attempt a numeric exact solve only when R is predicted to clear the
# invariant-embedding floor comfortably
_LN_EXACT_ATTEMPT_FLOOR = math.log(1e-22)


@dataclass(frozen=True)
class RegimeCell:
    family: Family
    delta: float
    eps: float
    r_born: float
    r_wkb: float
    r_exact: float | None
    smoothness: float
    regime: str
    ln_r_born: float
    ln_r_wkb: float
    ln_r_exact: float | None
    error: str | None = None


@dataclass(frozen=True)
class CrossoverLine:
    """Per-column matching points and their fitted line.

    ``points`` holds (ln 1/eps, ln 1/delta); ``fit_variable`` names the
    abscissa of the fit: "ln_inv_eps" (slope/intercept on the log-log
    plane) or "inv_eps_sq" (Gaussian family).  ``ln_ratio_at_points`` is
    ln(R_born/R_wkb) at each located point (the closest approach of the
    two approximations in that column).
    """

    family: Family
    points: list[tuple[float, float]]
    slope: float
    intercept: float
    fit_variable: str
    residual_rms: float
    ln_ratio_at_points: list[float]
    skipped_columns: list[float]


def default_eps_grid(n: int = 24) -> np.ndarray:
    return np.geomspace(0.05, 2.0, n)


def default_delta_grid(n: int = 32) -> np.ndarray:
    return np.geomspace(1e-4, 0.9, n)


def classify(cell: RegimeCell, s_lo: float = S_LO_DEFAULT,
             s_hi: float = S_HI_DEFAULT) -> str:
    """Regime label from the smoothness score (degenerate at delta = 0)."""
    if cell.delta == 0.0:
        return REGIME_BORN
    if cell.smoothness >= s_hi:
        return REGIME_WKB
    if cell.smoothness <= s_lo:
        return REGIME_BORN
    return REGIME_CROSSOVER if cell.ln_r_exact is not None else REGIME_UNRESOLVED


def _ln_exact(spec: PotentialSpec, predicted_ln: float,
              solve_opts: SolveOptions | None) -> float | None:
    if spec.family in (Family.FERMI_STEP, Family.SECH_SQUARED):
        return ln_reflectance_closed_form(spec)
    if predicted_ln < _LN_EXACT_ATTEMPT_FLOOR:
        return None
    opts = solve_opts or SolveOptions(rtol=1e-10, atol=1e-12)
    res = reflectance_exact(spec, opts)
    if res.status != STATUS_OK or res.R <= 0.0:
        return None
    return math.log(res.R)


def _evaluate_cell(family: Family, delta: float, eps: float,
                   s_lo: float, s_hi: float,
                   solve_opts: SolveOptions | None) -> RegimeCell:
    if delta == 0.0:
        return RegimeCell(family, delta, eps, 0.0, 0.0, 0.0, 0.0, REGIME_BORN,
                          -math.inf, -math.inf, -math.inf)
    spec = PotentialSpec(family, delta, eps)
    try:
        ln_b = ln_born_closed_form(spec)
        wkb = reflectance_wkb(spec)
        ln_w = wkb.ln_reflectance
        s = wkb.turning_point.smoothness
        ln_e = _ln_exact(spec, max(ln_b, ln_w), solve_opts)
    except Exception as exc:
        return RegimeCell(family, delta, eps, math.nan, math.nan, None, math.nan,
                          REGIME_UNRESOLVED, math.nan, math.nan, None,
                          error=str(exc))
    cell = RegimeCell(
        family, delta, eps,
        math.exp(ln_b) if ln_b > -700 else 0.0,
        math.exp(ln_w) if ln_w > -700 else 0.0,
        math.exp(ln_e) if ln_e is not None and ln_e > -700 else
        (None if ln_e is None else 0.0),
        s, REGIME_UNRESOLVED, ln_b, ln_w, ln_e)
    return replace(cell, regime=classify(cell, s_lo, s_hi))


def sweep(family: Family, delta_grid=None, eps_grid=None,
          s_lo: float = S_LO_DEFAULT, s_hi: float = S_HI_DEFAULT,
          solve_opts: SolveOptions | None = None,
          max_workers: int = 1) -> list[RegimeCell]:
    """Evaluate every (delta, eps) cell; failures stay in-cell, never abort.

    Cells are returned in grid order (delta-major) regardless of
    ``max_workers``, so identical inputs give identical lists.
    """
    if family not in (Family.FERMI_STEP, Family.SECH_SQUARED, Family.GAUSSIAN_BUMP):
        raise UnsupportedFamilyError("sweeps cover the three analytic families")
    deltas = np.asarray(default_delta_grid() if delta_grid is None else delta_grid,
                        dtype=float)
    epss = np.asarray(default_eps_grid() if eps_grid is None else eps_grid, dtype=float)
    tasks = [(d, e) for d in deltas for e in epss]
    if max_workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            cells = list(pool.map(
                lambda de: _evaluate_cell(family, de[0], de[1], s_lo, s_hi, solve_opts),
                tasks))
    else:
        cells = [_evaluate_cell(family, d, e, s_lo, s_hi, solve_opts)
                 for d, e in tasks]
    return cells


def _ln_ratio_fn(family: Family, eps: float):
    opts = WkbOptions(quad_tol=1e-11)

    def f(delta: float) -> float:
        spec = PotentialSpec(family, delta, eps)
        return ln_born_closed_form(spec) - reflectance_wkb(spec, opts).ln_reflectance

    return f


def crossover_line(cells: list[RegimeCell], refine: bool = True) -> CrossoverLine:
    """Locate the matching locus per eps column and fit the dividing line.

    In each column the maximum of ln(R_born/R_wkb) over delta is bracketed
    on the grid and (optionally) refined by bounded maximization.  Edge
    maxima mean the locus left the grid; those columns are skipped and
    reported in ``skipped_columns``.
    """
    by_eps: dict[float, list[RegimeCell]] = {}
    for c in cells:
        if c.error is not None or c.delta == 0.0:
            continue
        by_eps.setdefault(c.eps, []).append(c)
    families = {c.family for c in cells}
    if len(families) != 1:
        raise ValueError("crossover_line expects cells from a single-family sweep")
    family = families.pop()
    points: list[tuple[float, float]] = []
    ratios: list[float] = []
    skipped: list[float] = []
    for eps in sorted(by_eps):
        col = sorted(by_eps[eps], key=lambda c: c.delta)
        lnr = np.array([c.ln_r_born - c.ln_r_wkb for c in col])
        if np.any(~np.isfinite(lnr)):
            skipped.append(eps)
            continue
        i = int(np.argmax(lnr))
        if i == 0 or i == len(col) - 1:
            skipped.append(eps)
            continue
        lo, hi = col[i - 1].delta, col[i + 1].delta
        if refine:
            g = _ln_ratio_fn(family, eps)
            res = minimize_scalar(lambda d: -g(d), bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-10})
            d_star, ratio = float(res.x), float(-res.fun)
        else:
            d_star, ratio = col[i].delta, float(lnr[i])
        points.append((math.log(1.0 / eps), math.log(1.0 / d_star)))
        ratios.append(ratio)
    if len(points) < 2:
        return CrossoverLine(family, points, math.nan, math.nan, "ln_inv_eps",
                             math.nan, ratios, skipped)
    y = np.array([p[1] for p in points])
    if family is Family.GAUSSIAN_BUMP:
        x = np.array([math.exp(2.0 * p[0]) for p in points])  # 1/eps^2
        fit_var = "inv_eps_sq"
    else:
        x = np.array([p[0] for p in points])
        fit_var = "ln_inv_eps"
    a = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = y - a @ coef
    return CrossoverLine(family, points, float(coef[0]), float(coef[1]), fit_var,
                         float(np.sqrt(np.mean(resid**2))), ratios, skipped)


def write_cells_csv(cells: list[RegimeCell], path: str | Path) -> None:
    """Columns: delta, eps, R_exact, R_born, R_wkb, S, regime."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["delta", "eps", "R_exact", "R_born", "R_wkb", "S", "regime"])
        for c in cells:
            w.writerow([
                f"{c.delta:.17g}", f"{c.eps:.17g}",
                "" if c.r_exact is None else f"{c.r_exact:.17g}",
                f"{c.r_born:.17g}", f"{c.r_wkb:.17g}",
                f"{c.smoothness:.17g}", c.regime,
            ])


def write_line_csv(line: CrossoverLine, path: str | Path) -> None:
    """Columns: ln_inv_eps, ln_inv_delta."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ln_inv_eps", "ln_inv_delta"])
        for p in line.points:
            w.writerow([f"{p[0]:.17g}", f"{p[1]:.17g}"])
