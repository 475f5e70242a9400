"""Quasiclassical reflection through complex turning points.

Above the barrier the zeros of 1 - delta U(eps z) leave the real axis; the
reflectance is governed by the zero closest to it (smallest imaginary
action):

    R = exp(-4 gamma),   gamma = Im int_{z_r}^{z0} sqrt(1 - delta U) dz,

with the square root fixed positive on the real axis and tracked
continuously along the contour.  ``z_r`` is any real point: the integrand
is real there, so only the leg leaving the axis contributes.

The applicability score returned with each turning point is

    S = 1 / (delta * |dU/dz| at z0)        (eps * |U'(u0)| for analytic
                                            families of u = eps*z)

S >> 1 means the potential is still smooth on the wavelength scale at the
turning point (quasiclassics trustworthy); S ~ 1 signals breakdown near the
shape's complex singularity.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BranchTrackingError, DomainError, UnsupportedFamilyError
from .potentials import (
    ANALYTIC_FAMILIES,
    Family,
    PotentialSpec,
    eval_unguarded,
)


@dataclass(frozen=True)
class WkbOptions:
    """Search-strip geometry and tolerances for root finding / quadrature."""

    strip_depth: float | None = None      # max Im z; None = per-family default
    re_range: tuple[float, float] | None = None  # seed-grid range (fourier)
    seed_spacing: tuple[float, float] | None = None  # (d_re, d_im); None = auto
    root_tol: float = 1e-13
    residual_tol: float = 1e-10
    quad_tol: float = 1e-12
    max_quad_nodes: int = 8192
    newton_max_iter: int = 80


@dataclass(frozen=True)
class TurningPoint:
    """A verified complex zero of 1 - delta U with its imaginary action."""

    z0: complex
    gamma: float
    smoothness: float
    residual: float
    nearest_singularity: complex | None = None
    singularity_distance: float | None = None


@dataclass(frozen=True)
class WkbResult:
    reflectance: float
    ln_reflectance: float
    turning_point: TurningPoint
    n_points: int
    validity_ratio: float       # delta*eps/(1-delta); quasiclassics wants << 1
    validity_warning: bool


def _default_strip_depth(spec: PotentialSpec) -> float:
    e = spec.eps
    if spec.family is Family.FERMI_STEP:
        return 1.5 * math.pi / e
    if spec.family is Family.SECH_SQUARED:
        return 1.02 * math.pi / e
    if spec.family is Family.GAUSSIAN_BUMP:
        ell = math.log(1.0 / spec.delta)
        return (1.2 * math.sqrt(ell) + 1.5) / e
    return 3.0 / e


def _analytic_seeds(spec: PotentialSpec) -> list[complex]:
    d, e = spec.delta, spec.eps
    if spec.family is Family.FERMI_STEP:
        seeds = [(1j * math.pi - math.log(1.0 - d)) / e]
    elif spec.family is Family.SECH_SQUARED:
        a = math.acos(math.sqrt(d))
        seeds = [1j * a / e, 1j * (math.pi - a) / e]
    elif spec.family is Family.GAUSSIAN_BUMP:
        ell = math.log(1.0 / d)
        seeds = [1j * math.sqrt(ell) / e]
        # companion zeros of exp(-u^2) = 1/delta on neighbouring log branches
        for n in (1, 2):
            u = cmath.sqrt(complex(-ell, -2.0 * math.pi * n))
            u = u if u.imag > 0 else -u
            seeds.extend([u / e, complex(-u.real, u.imag) / e])
    else:
        raise UnsupportedFamilyError("analytic seeds exist for fermi/sech2/gauss")
    if spec.mirror:
        seeds = [-s.conjugate() for s in seeds]
    return seeds


def _grid_seeds(spec: PotentialSpec, opts: WkbOptions, depth: float) -> np.ndarray:
    if opts.re_range is not None:
        re_lo, re_hi = opts.re_range
    elif spec.family is Family.FOURIER_SERIES:
        p = spec.params
        margin = p.taper_width + 1.0 / spec.eps
        re_lo, re_hi = margin, p.length - margin
        if re_hi <= re_lo:
            raise DomainError("fourier sample too short for an interior search range")
    else:
        return np.empty(0, dtype=complex)
    d_re, d_im = opts.seed_spacing or (0.5 / spec.eps, 0.2 / spec.eps)
    res = np.arange(re_lo, re_hi + d_re / 2, d_re)
    ims = np.arange(max(d_im / 2, 0.02 / spec.eps), depth, d_im)
    if len(res) == 0 or len(ims) == 0:
        return np.empty(0, dtype=complex)
    g = res[:, None] + 1j * ims[None, :]
    return g.reshape(-1)


def find_turning_points(spec: PotentialSpec, opts: WkbOptions | None = None
                        ) -> list[TurningPoint]:
    """All simple zeros of 1 - delta U in the upper search strip.

    Damped-step Newton iteration runs from per-family analytic seeds plus
    (for fourier realizations) a rectangular seed grid; converged iterates
    are deduplicated, re-verified to residual < residual_tol, equipped with
    their action gamma and smoothness score, and sorted by gamma ascending.
    Diverging seeds are dropped silently; an empty result emits a warning
    (the strip may be too shallow).
    """
    opts = opts or WkbOptions()
    if not spec.is_analytic:
        raise UnsupportedFamilyError(
            "turning points need analytic continuation; fit an analytic family first"
        )
    if not 0.0 < spec.delta < 1.0:
        raise DomainError("turning-point search needs 0 < delta < 1")
    depth = opts.strip_depth or _default_strip_depth(spec)

    if spec.family in ANALYTIC_FAMILIES:
        seeds = np.array(_analytic_seeds(spec), dtype=complex)
    else:
        seeds = _grid_seeds(spec, opts, depth)
    if len(seeds) == 0:
        warnings.warn("no seeds inside the search strip; returning no turning points")
        return []

    z = seeds.copy()
    active = np.ones(len(z), dtype=bool)
    step_cap = 0.6 / spec.eps
    for it in range(opts.newton_max_iter):
        if not active.any():
            break
        u, du = eval_unguarded(spec, z[active])
        f = 1.0 - spec.delta * u
        fp = -spec.delta * du
        with np.errstate(all="ignore"):
            step = f / fp
        bad = ~np.isfinite(step)
        big = np.abs(step) > step_cap
        step[big] = step[big] / np.abs(step[big]) * step_cap
        znew = z[active] - step
        conv = np.abs(step) < opts.root_tol * (1.0 + np.abs(znew))
        out = (znew.imag > 2.5 * depth) | (znew.imag < -0.5 * depth) | bad
        if it > 40:
            # seeds still taking macroscopic steps by now are cycling, not
            # converging; drop them so the batch can finish
            out |= np.abs(step) > 1e6 * opts.root_tol * (1.0 + np.abs(znew))
        zact = z[active]
        zact[~bad] = znew[~bad]
        z[active] = zact
        idx = np.flatnonzero(active)
        active[idx[conv | out]] = False

    # fresh residual verification, independent of the iteration above
    u, _ = eval_unguarded(spec, z)
    res = np.abs(1.0 - spec.delta * u)
    keep = np.isfinite(res) & (res < opts.residual_tol)
    keep &= (z.imag > -1e-9) & (z.imag <= depth * (1.0 + 1e-9))
    cand = z[keep]
    cand = np.where(np.abs(cand.imag) < 1e-12, cand.real + 0j, cand)

    # deduplicate (deterministic order: by Im, then Re)
    order = np.lexsort((cand.real, cand.imag))
    cand = cand[order]
    tol = 1e-6 / spec.eps
    uniq: list[complex] = []
    for w in cand:
        if not any(abs(w - v) < tol for v in uniq):
            uniq.append(complex(w))
    if not uniq:
        warnings.warn(
            "no turning points found in the search strip (it may be too shallow)"
        )
        return []

    points = []
    dropped = 0
    for z0 in uniq:
        try:
            gamma = wkb_action(spec, z0, opts)
        except BranchTrackingError:
            dropped += 1
            continue
        points.append(_make_point(spec, z0, gamma))
    if dropped:
        warnings.warn(f"dropped {dropped} turning point(s) with untrackable "
                      "action contours")
    points.sort(key=lambda p: (p.gamma, p.z0.imag, p.z0.real))
    return points


def _make_point(spec: PotentialSpec, z0: complex, gamma: float) -> TurningPoint:
    u, _ = eval_unguarded(spec, np.array([z0]))
    residual = float(abs(1.0 - spec.delta * u[0]))
    smooth = smoothness_criterion(spec, z0)
    sing = _nearest_singularity(spec, z0)
    dist = abs(z0 - sing) if sing is not None else None
    return TurningPoint(z0, gamma, smooth, residual, sing, dist)


def _nearest_singularity(spec: PotentialSpec, z0: complex) -> complex | None:
    e = spec.eps
    if spec.family is Family.FERMI_STEP:
        n = max(round((z0.imag * e / math.pi - 1.0) / 2.0), 0)
        s = 1j * (2.0 * n + 1.0) * math.pi / e
    elif spec.family is Family.SECH_SQUARED:
        n = max(round(z0.imag * e / math.pi - 0.5), 0)
        s = 1j * (n + 0.5) * math.pi / e
    else:
        return None  # entire shapes
    if spec.mirror:
        s = -s.conjugate()
    return s


def smoothness_criterion(spec: PotentialSpec, tp: "TurningPoint | complex") -> float:
    """Smoothness score S = 1/(delta |dU/dz|) at the turning point.

    Equals 1/(delta * eps * |U'(u0)|) for analytic families.  S >> 1:
    quasiclassical reflectance trustworthy; S <~ 1: the turning point sits
    too close to a singularity of the shape and the result degrades.
    """
    z0 = tp.z0 if isinstance(tp, TurningPoint) else tp
    _, du = eval_unguarded(spec, np.array([z0]))
    slope = abs(du[0])
    if slope == 0.0 or not np.isfinite(slope):
        return math.inf
    return 1.0 / (spec.delta * slope)


# --------------------------------------------------------------------------
# action integral
# --------------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)


def _composite_nodes(panels: int):
    """Composite 48-point Gauss-Legendre nodes/weights on (0, 1), ascending."""
    edges = np.linspace(0.0, 1.0, panels + 1)
    a, b = edges[:-1, None], edges[1:, None]
    pts = (a + (b - a) * 0.5 * (_GL_X[None, :] + 1.0)).reshape(-1)
    wts = ((b - a) * 0.5 * _GL_W[None, :]).reshape(-1)
    return pts, wts


def _segment_values(spec: PotentialSpec, za: complex, zb: complex, panels: int,
                    singular_end: bool):
    """Integrand sqrt(1 - delta U) sampled from za to zb with weights.

    With ``singular_end`` the substitution t = 1 - s^2 removes the
    square-root endpoint singularity at zb.  Node order follows the path.
    """
    pts, wts = _composite_nodes(panels)
    if singular_end:
        s, w = pts[::-1], wts[::-1]    # s descending => t ascending along path
        t = 1.0 - s * s
        jac = 2.0 * s * (zb - za)
    else:
        t, w = pts, wts
        jac = np.full(len(pts), zb - za, dtype=complex)
    z = za + (zb - za) * t
    u, _ = eval_unguarded(spec, z)
    f = 1.0 - spec.delta * u
    if not np.all(np.isfinite(f)) or np.abs(f).max() > 1e10:
        raise BranchTrackingError(
            "action contour passes a singularity of the shape", segment=(za, zb))
    return f, w * jac


def _branch_sqrt(f: np.ndarray, theta0: float | None = None):
    """Square root with argument unwrapped along the node ordering."""
    theta = np.unwrap(np.angle(f))
    if theta0 is not None:
        # align the first node with the incoming branch angle
        shift = 2.0 * math.pi * round((theta0 - theta[0]) / (2.0 * math.pi))
        theta = theta + shift
    jumps = np.abs(np.diff(theta))
    return np.sqrt(np.abs(f)) * np.exp(0.5j * theta), theta, float(jumps.max(initial=0.0))


def _integrate_path(spec: PotentialSpec, nodes: list[complex], opts: WkbOptions,
                    singular_end: bool) -> complex:
    """Integrate sqrt(1 - delta U) along a polyline with branch continuity."""
    total = None
    panels = 2
    max_panels = max(opts.max_quad_nodes // len(_GL_X), 4)
    while panels <= max_panels:
        acc = 0.0 + 0j
        theta_in: float | None = None
        worst_jump = 0.0
        for i in range(len(nodes) - 1):
            za, zb = nodes[i], nodes[i + 1]
            last = i == len(nodes) - 2
            f, wj = _segment_values(spec, za, zb, panels, singular_end and last)
            sq, theta, jump = _branch_sqrt(f, theta_in)
            worst_jump = max(worst_jump, jump)
            theta_in = float(theta[-1])
            acc = acc + np.sum(sq * wj)
        if total is not None and abs(acc - total) < opts.quad_tol * max(1.0, abs(acc)):
            if worst_jump > 0.5 * math.pi:
                raise BranchTrackingError(
                    f"branch angle jumped by {worst_jump:.3f} rad between nodes",
                    segment=(nodes[0], nodes[-1]))
            return acc
        total = acc
        panels *= 2
    raise BranchTrackingError(
        "action quadrature did not converge (possible singularity on the path)",
        segment=(nodes[0], nodes[-1]))


def _allowed_foot(spec: PotentialSpec, foot: complex) -> complex:
    """Nudge a contour footpoint onto a classically allowed real stretch.

    Realizations with delta ~ 1 have forbidden segments (1 - delta U < 0 on
    the axis) where the square-root anchor is ambiguous; the climb then
    starts from the nearest allowed point instead.
    """
    u, _ = eval_unguarded(spec, np.array([foot]))
    if (1.0 - spec.delta * u[0]).real > 0.05 * (1.0 - spec.delta):
        return foot
    step = 0.1 / spec.eps
    for j in range(1, 25):
        for sgn in (1.0, -1.0):
            cand = complex(foot.real + sgn * j * step, 0.0)
            u, _ = eval_unguarded(spec, np.array([cand]))
            if (1.0 - spec.delta * u[0]).real > 0.05 * (1.0 - spec.delta):
                return cand
    return foot


def wkb_action(spec: PotentialSpec, z0: complex, opts: WkbOptions | None = None,
               z_r: float | None = None) -> float:
    """Imaginary action gamma from the real axis up to the turning point z0.

    The contour runs along the real axis from ``z_r`` (if given) to
    Re(z0) and then straight up to z0; the real-axis leg contributes no
    imaginary part for genuinely above-barrier potentials, which makes the
    result independent of ``z_r``.  If branch tracking fails on the straight
    leg (a singularity or sibling zero in the way), two dogleg detours are
    tried before giving up.
    """
    opts = opts or WkbOptions()
    foot = complex(z0.real, 0.0)
    if abs(z0 - foot) < 1e-14:
        return 0.0
    foot = _allowed_foot(spec, foot)
    candidates: list[list[complex]] = [[foot, z0]]
    lateral = 0.5 / spec.eps
    for sgn in (1.0, -1.0):
        # L-shaped detour: climb at a lateral offset, approach z0 sideways
        start = _allowed_foot(spec, complex(foot.real + sgn * lateral, 0.0))
        candidates.append([start, complex(start.real, z0.imag), z0])
    err: BranchTrackingError | None = None
    for path in candidates:
        if z_r is not None:
            path = [complex(z_r, 0.0)] + path
        try:
            val = _integrate_path(spec, path, opts, singular_end=True)
        except BranchTrackingError as exc:
            err = exc
            continue
        gamma = float(val.imag)
        if gamma < -1e-8:
            err = BranchTrackingError(
                f"negative imaginary action {gamma:.3e} signals a lost branch",
                segment=(path[0], path[-1]))
            continue
        return max(gamma, 0.0)
    raise err if err is not None else BranchTrackingError("no usable action contour")


def reflectance_wkb(spec: PotentialSpec, opts: WkbOptions | None = None) -> WkbResult:
    """R = exp(-4 gamma_min) from the dominant turning point.

    Carries the smoothness score of the dominant point for downstream
    applicability classification, plus a warning flag when
    delta*eps/(1-delta) is no longer small (quasiclassics degrading on the
    real axis itself).
    """
    points = find_turning_points(spec, opts)
    if not points:
        raise DomainError("no turning points located; cannot form a WKB reflectance")
    tp = points[0]
    ln_r = -4.0 * tp.gamma
    ratio = spec.delta * spec.eps / (1.0 - spec.delta)
    return WkbResult(
        reflectance=math.exp(ln_r) if ln_r > -700.0 else 0.0,
        ln_reflectance=ln_r,
        turning_point=tp,
        n_points=len(points),
        validity_ratio=ratio,
        validity_warning=ratio > 0.3,
    )
