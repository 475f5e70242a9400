"""Dimensionless 1D scattering potentials evaluable at complex argument.

The wave problem is solved in the scaled form

    psi'' + [1 - delta * U(eps * z)] psi = 0,

where ``delta`` is the barrier amplitude relative to the energy and ``eps``
the inverse longitudinal scale in units of the asymptotic wavenumber.  A
:class:`PotentialSpec` bundles a shape family with ``(delta, eps)``.

Analytic families (unit characteristic magnitude):

* ``fermi``  : smooth step          U(u) = 1 / (1 + exp(-u))
* ``sech2``  : symmetric bump       U(u) = 1 / cosh(u)^2
* ``gauss``  : symmetric bump       U(u) = exp(-u^2)

plus two data-driven families:

* ``fourier``   : tapered finite cosine series (random realizations live here);
  entire in z, so turning-point machinery can continue it off the real axis.
* ``tabulated`` : sample grid with spline interpolation, real axis only.

Analytic families are functions of the scaled argument u = eps*z; the
``fourier`` and ``tabulated`` families are functions of z directly (their
coefficients / grids already carry the length scale).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    AboveBarrierError,
    DomainError,
    PoleEvaluationError,
    TabulatedUsageError,
    UnsupportedFamilyError,
)

# Evaluations closer than this to a pole of the shape are refused.
POLE_GUARD = 1e-8


class Family(str, enum.Enum):
    FERMI_STEP = "fermi"
    SECH_SQUARED = "sech2"
    GAUSSIAN_BUMP = "gauss"
    FOURIER_SERIES = "fourier"
    TABULATED = "tabulated"


ANALYTIC_FAMILIES = (Family.FERMI_STEP, Family.SECH_SQUARED, Family.GAUSSIAN_BUMP)


@dataclass(frozen=True)
class PhysicalScales:
    """Dimensional inputs in units hbar = 2m = 1.

    Attributes
    ----------
    energy : float
        Particle energy E > 0; the asymptotic wavenumber is sqrt(E).
    amplitude : float
        Characteristic potential amplitude V0 > 0.
    length : float
        Characteristic longitudinal scale L > 0 of the potential.
    """

    energy: float
    amplitude: float
    length: float

    def __post_init__(self):
        if not (self.energy > 0 and self.amplitude > 0 and self.length > 0):
            raise DomainError("energy, amplitude and length must all be positive")


@dataclass(frozen=True)
class TailValues:
    """Asymptotic shape values U(-inf), U(+inf)."""

    u_minus: float
    u_plus: float


@dataclass(frozen=True)
class FourierSeriesParams:
    """Finite cosine series U(z) = sum_n a_n cos(q_n z + phi_n) on [0, length].

    A raised-cosine envelope of width ``taper_width`` switches the series on
    and off smoothly at both ends of the real-axis support.  Off the real
    axis the bare series (the analytic continuation of the interior, where
    the envelope is identically 1) is evaluated.
    """

    amplitudes: np.ndarray
    wavenumbers: np.ndarray
    phases: np.ndarray
    taper_width: float
    length: float

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", np.asarray(self.amplitudes, dtype=float))
        object.__setattr__(self, "wavenumbers", np.asarray(self.wavenumbers, dtype=float))
        object.__setattr__(self, "phases", np.asarray(self.phases, dtype=float))
        n = len(self.amplitudes)
        if len(self.wavenumbers) != n or len(self.phases) != n:
            raise DomainError("amplitudes, wavenumbers and phases must have equal length")
        if np.any(self.wavenumbers <= 0):
            raise DomainError("all series wavenumbers must be positive")
        if not (self.length > 0 and 0 < self.taper_width <= self.length / 2):
            raise DomainError("need 0 < taper_width <= length/2")


@dataclass(frozen=True)
class TabulatedParams:
    """Sampled shape (z_i, u_i) on a strictly increasing real grid."""

    z: np.ndarray
    u: np.ndarray
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        u = np.asarray(self.u, dtype=float)
        if z.ndim != 1 or z.shape != u.shape or len(z) < 4:
            raise DomainError("tabulated data needs matching 1D arrays of length >= 4")
        if np.any(np.diff(z) <= 0):
            raise DomainError("tabulated grid must be strictly increasing")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "_spline", CubicSpline(z, u, bc_type="natural"))


@dataclass(frozen=True)
class PotentialSpec:
    """A potential family together with its dimensionless parameters.

    Attributes
    ----------
    family : Family
        Shape family.
    delta : float
        Amplitude relative to the energy, 0 <= delta < 1 (above-barrier only).
    eps : float
        Inverse longitudinal scale (shape argument is u = eps*z), eps > 0.
    params : FourierSeriesParams | TabulatedParams | None
        Extra data for the two data-driven families.
    mirror : bool
        Evaluate the space-reflected potential (z -> -z for analytic
        families, z -> length - z for finite-support ones).  Tail values
        swap accordingly.
    """

    family: Family
    delta: float
    eps: float
    params: FourierSeriesParams | TabulatedParams | None = None
    mirror: bool = False

    def __post_init__(self):
        if not 0.0 <= self.delta < 1.0:
            raise AboveBarrierError(
                f"above-barrier only: need 0 <= delta < 1, got delta={self.delta}"
            )
        if not self.eps > 0:
            raise DomainError(f"eps must be positive, got {self.eps}")
        if self.family is Family.FOURIER_SERIES and not isinstance(
            self.params, FourierSeriesParams
        ):
            raise DomainError("fourier family requires FourierSeriesParams")
        if self.family is Family.TABULATED and not isinstance(self.params, TabulatedParams):
            raise DomainError("tabulated family requires TabulatedParams")

    @property
    def is_analytic(self) -> bool:
        return self.family in ANALYTIC_FAMILIES or self.family is Family.FOURIER_SERIES

    def mirrored(self) -> "PotentialSpec":
        return PotentialSpec(self.family, self.delta, self.eps, self.params,
                             mirror=not self.mirror)


def nondimensionalize(scales: PhysicalScales, family: Family,
                      params: FourierSeriesParams | TabulatedParams | None = None,
                      ) -> PotentialSpec:
    """Reduce dimensional scales to a :class:`PotentialSpec`.

    delta = V0 / E and eps = 1 / (sqrt(E) * L).  Rejects E <= V0: only
    above-barrier scattering (all real z classically allowed) is handled.
    """
    if scales.energy <= scales.amplitude:
        raise AboveBarrierError(
            "above-barrier only: energy must exceed the potential amplitude "
            f"(E={scales.energy}, V0={scales.amplitude})"
        )
    delta = scales.amplitude / scales.energy
    eps = 1.0 / (np.sqrt(scales.energy) * scales.length)
    return PotentialSpec(family, delta, eps, params)


# --------------------------------------------------------------------------
# shape evaluation
# --------------------------------------------------------------------------

def _fermi_shape(u):
    # stable on both half planes; 1/(1+e^-u) == e^u/(1+e^u)
    u = np.asarray(u)
    out = np.empty(u.shape, dtype=complex)
    pos = u.real >= 0
    en = np.exp(-u[pos])
    dp = 1.0 + en
    ep = np.exp(u[~pos])
    dn = 1.0 + ep
    if np.any(np.abs(dp) < POLE_GUARD) or np.any(np.abs(dn) < POLE_GUARD):
        raise PoleEvaluationError("fermi shape evaluated too close to a pole of 1/(1+e^-u)")
    out[pos] = 1.0 / dp
    out[~pos] = ep / dn
    return out


def _fermi_deriv(u):
    # e^{-u}/(1+e^{-u})^2 evaluated per half-plane; the algebraically equal
    # U(1-U) form cancels catastrophically in the tails
    u = np.asarray(u)
    out = np.empty(u.shape, dtype=complex)
    pos = u.real >= 0
    en = np.exp(-u[pos])
    dp = 1.0 + en
    ep = np.exp(u[~pos])
    dn = 1.0 + ep
    if np.any(np.abs(dp) < POLE_GUARD) or np.any(np.abs(dn) < POLE_GUARD):
        raise PoleEvaluationError("fermi slope evaluated too close to a pole")
    out[pos] = en / (dp * dp)
    out[~pos] = ep / (dn * dn)
    return out


def _sech2_shape(u):
    u = np.asarray(u)
    with np.errstate(over="ignore"):
        ch = np.cosh(u)
    small = np.abs(ch) < POLE_GUARD
    if np.any(small):
        raise PoleEvaluationError("sech^2 shape evaluated too close to a pole of cosh(u)")
    with np.errstate(over="ignore", invalid="ignore"):
        out = 1.0 / (ch * ch)
    # cosh overflow in the far tails means the shape has underflowed to zero
    out = np.where(np.isfinite(ch), out, 0.0)
    return out.astype(complex)


def _sech2_deriv(u):
    u = np.asarray(u)
    return -2.0 * _sech2_shape(u) * np.tanh(u)


def _gauss_shape(u):
    u = np.asarray(u)
    return np.exp(-(u * u)).astype(complex)


def _gauss_deriv(u):
    u = np.asarray(u)
    return -2.0 * u * np.exp(-(u * u))


_SHAPES = {
    Family.FERMI_STEP: (_fermi_shape, _fermi_deriv),
    Family.SECH_SQUARED: (_sech2_shape, _sech2_deriv),
    Family.GAUSSIAN_BUMP: (_gauss_shape, _gauss_deriv),
}


def taper_envelope(z, length: float, width: float):
    """Raised-cosine on/off envelope on [0, length] with ramps of ``width``."""
    z = np.asarray(z, dtype=float)
    out = np.zeros(z.shape, dtype=float)
    inside = (z >= 0.0) & (z <= length)
    out[inside] = 1.0
    up = inside & (z < width)
    out[up] = 0.5 * (1.0 - np.cos(np.pi * z[up] / width))
    down = inside & (z > length - width)
    out[down] = 0.5 * (1.0 - np.cos(np.pi * (length - z[down]) / width))
    return out


def _fourier_series_raw(p: FourierSeriesParams, z):
    z = np.asarray(z, dtype=complex)
    flat = z.reshape(-1)
    out = np.zeros(flat.shape, dtype=complex)
    # chunk the outer product so huge grids do not blow up memory
    step = max(1, int(2_000_000 // max(len(p.wavenumbers), 1)))
    for i in range(0, len(flat), step):
        blk = flat[i:i + step, None] * p.wavenumbers[None, :] + p.phases[None, :]
        out[i:i + step] = np.cos(blk) @ p.amplitudes
    return out.reshape(z.shape)


def eval_shape(spec: PotentialSpec, z):
    """Evaluate the shape U at (possibly complex) z; scalar in, scalar out.

    Analytic families accept any complex z away from their poles.  The
    fourier family applies its taper envelope on the real axis and evaluates
    the bare series off it (the continuation of its untapered interior).
    Tabulated shapes accept only real z inside their grid.
    """
    scalar = np.isscalar(z) or np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if spec.mirror:
        if spec.family in ANALYTIC_FAMILIES:
            z = -z
        else:
            z = _support_length(spec) - z

    if spec.family in _SHAPES:
        out = _SHAPES[spec.family][0](spec.eps * z)
    elif spec.family is Family.FOURIER_SERIES:
        p = spec.params
        out = _fourier_series_raw(p, z)
        on_axis = z.imag == 0.0
        if np.any(on_axis):
            env = taper_envelope(z[on_axis].real, p.length, p.taper_width)
            out[on_axis] = out[on_axis] * env
    elif spec.family is Family.TABULATED:
        p = spec.params
        if np.any(z.imag != 0.0):
            raise TabulatedUsageError("tabulated shapes cannot be continued off the real axis")
        x = z.real
        if np.any((x < p.z[0]) | (x > p.z[-1])):
            raise TabulatedUsageError("tabulated shape queried outside its sample grid")
        out = p._spline(x).astype(complex)
    else:  # pragma: no cover
        raise UnsupportedFamilyError(f"unknown family {spec.family}")
    return out[0] if scalar else out


def eval_shape_derivative(spec: PotentialSpec, z):
    """dU/du at u = eps*z for analytic families; dU/dz for the fourier family.

    The fourier family is a direct function of z, so its derivative is taken
    with respect to z (no envelope term; valid on the untapered interior and
    off the real axis).
    """
    scalar = np.isscalar(z) or np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    sign = 1.0
    if spec.mirror:
        if spec.family in ANALYTIC_FAMILIES:
            z = -z
        elif spec.family is Family.FOURIER_SERIES:
            z = _support_length(spec) - z
        sign = -1.0

    if spec.family in _SHAPES:
        out = sign * _SHAPES[spec.family][1](spec.eps * z)
    elif spec.family is Family.FOURIER_SERIES:
        p = spec.params
        flat = z.reshape(-1)
        out = np.zeros(flat.shape, dtype=complex)
        step = max(1, int(2_000_000 // max(len(p.wavenumbers), 1)))
        for i in range(0, len(flat), step):
            blk = flat[i:i + step, None] * p.wavenumbers[None, :] + p.phases[None, :]
            out[i:i + step] = -np.sin(blk) @ (p.amplitudes * p.wavenumbers)
        out = sign * out.reshape(z.shape)
    else:
        raise UnsupportedFamilyError(
            "shape derivatives are defined for analytic families only"
        )
    return out[0] if scalar else out


def eval_unguarded(spec: PotentialSpec, z):
    """(U, dU/dz) at complex z without pole guards; infs/nans pass through.

    Root finders and contour quadratures use this: iterates that wander into
    a singularity must surface as huge values to be discarded, not as
    exceptions that would abort a whole vectorized batch.  The fourier
    family is evaluated as its bare interior series.
    """
    z = np.asarray(z, dtype=complex)
    if spec.mirror:
        z = -z if spec.family in ANALYTIC_FAMILIES else _support_length(spec) - z
    sign = -1.0 if spec.mirror else 1.0
    with np.errstate(all="ignore"):
        if spec.family is Family.FERMI_STEP:
            u = spec.eps * z
            en = np.exp(-np.where(u.real >= 0, u, np.inf))
            ep = np.exp(np.where(u.real < 0, u, -np.inf))
            val = np.where(u.real >= 0, 1.0 / (1.0 + en), ep / (1.0 + ep))
            dval = np.where(u.real >= 0, en / ((1.0 + en) * (1.0 + en)),
                            ep / ((1.0 + ep) * (1.0 + ep)))
            slope = sign * spec.eps * dval
        elif spec.family is Family.SECH_SQUARED:
            u = spec.eps * z
            ch = np.cosh(u)
            val = 1.0 / (ch * ch)
            slope = sign * spec.eps * (-2.0) * val * np.tanh(u)
        elif spec.family is Family.GAUSSIAN_BUMP:
            u = spec.eps * z
            val = np.exp(-(u * u))
            slope = sign * spec.eps * (-2.0) * u * val
        elif spec.family is Family.FOURIER_SERIES:
            p = spec.params
            val = _fourier_series_raw(p, z)
            flat = z.reshape(-1)
            sl = np.zeros(flat.shape, dtype=complex)
            step = max(1, int(2_000_000 // max(len(p.wavenumbers), 1)))
            for i in range(0, len(flat), step):
                blk = flat[i:i + step, None] * p.wavenumbers[None, :] + p.phases[None, :]
                sl[i:i + step] = -np.sin(blk) @ (p.amplitudes * p.wavenumbers)
            slope = sign * sl.reshape(z.shape)
        else:
            raise UnsupportedFamilyError(
                "unguarded evaluation needs an analytic or fourier family"
            )
    return val, slope


def eval_real_with_slope(spec: PotentialSpec, z: float) -> tuple[float, float]:
    """(U, dU/dz) on the real axis, with taper envelope and mirror applied.

    For analytic families dU/dz = eps * U'(u); for the fourier family the
    envelope enters through the product rule.
    """
    if spec.family in _SHAPES:
        u = eval_shape(spec, z).real
        du = spec.eps * eval_shape_derivative(spec, z).real
        return u, du
    if spec.family is Family.FOURIER_SERIES:
        p = spec.params
        x = p.length - z if spec.mirror else z
        s = float(_fourier_series_raw(p, np.atleast_1d(x))[0].real)
        blk = x * p.wavenumbers + p.phases
        ds = float(-np.sin(blk) @ (p.amplitudes * p.wavenumbers))
        env = float(taper_envelope(np.array([x]), p.length, p.taper_width)[0])
        denv = _taper_slope(x, p.length, p.taper_width)
        val = env * s
        slope = denv * s + env * ds
        if spec.mirror:
            slope = -slope
        return float(val), float(slope)
    raise UnsupportedFamilyError("real-axis slope needs an analytic or fourier family")


def _taper_slope(z: float, length: float, width: float) -> float:
    if 0.0 <= z < width:
        return 0.5 * np.pi / width * np.sin(np.pi * z / width)
    if length - width < z <= length:
        return -0.5 * np.pi / width * np.sin(np.pi * (length - z) / width)
    return 0.0


def _support_length(spec: PotentialSpec) -> float:
    if spec.family is Family.FOURIER_SERIES:
        return spec.params.length
    if spec.family is Family.TABULATED:
        return float(spec.params.z[0] + spec.params.z[-1])
    return 0.0


def tail_values(spec: PotentialSpec) -> TailValues:
    """Asymptotic shape values used for plane-wave boundary matching."""
    if spec.family is Family.FERMI_STEP:
        t = TailValues(0.0, 1.0)
    elif spec.family in (Family.SECH_SQUARED, Family.GAUSSIAN_BUMP, Family.FOURIER_SERIES):
        t = TailValues(0.0, 0.0)
    elif spec.family is Family.TABULATED:
        t = TailValues(float(spec.params.u[0]), float(spec.params.u[-1]))
    else:  # pragma: no cover
        raise UnsupportedFamilyError(f"unknown family {spec.family}")
    if spec.mirror:
        t = TailValues(t.u_plus, t.u_minus)
    return t


# --------------------------------------------------------------------------
# I/O
# --------------------------------------------------------------------------

def load_tabulated(path: str | Path, delta: float, eps: float) -> PotentialSpec:
    """Read a two-column text file (z, U);  '#' starts a comment."""
    zs, us = [], []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        cols = line.split()
        if len(cols) != 2:
            raise DomainError(f"expected two columns in {path!s}, got: {raw!r}")
        zs.append(float(cols[0]))
        us.append(float(cols[1]))
    params = TabulatedParams(np.array(zs), np.array(us))
    return PotentialSpec(Family.TABULATED, delta, eps, params)


def fourier_spec_to_json(spec: PotentialSpec) -> str:
    """Serialize a fourier-family spec to a JSON document."""
    if spec.family is not Family.FOURIER_SERIES:
        raise UnsupportedFamilyError("JSON serialization is for fourier-family specs")
    p = spec.params
    return json.dumps(
        {
            "delta": spec.delta,
            "eps": spec.eps,
            "amplitudes": p.amplitudes.tolist(),
            "wavenumbers": p.wavenumbers.tolist(),
            "phases": p.phases.tolist(),
            "taper_width": p.taper_width,
            "length": p.length,
        }
    )


def fourier_spec_from_json(doc: str) -> PotentialSpec:
    d = json.loads(doc)
    params = FourierSeriesParams(
        np.array(d["amplitudes"], dtype=float),
        np.array(d["wavenumbers"], dtype=float),
        np.array(d["phases"], dtype=float),
        float(d["taper_width"]),
        float(d["length"]),
    )
    return PotentialSpec(Family.FOURIER_SERIES, float(d["delta"]), float(d["eps"]), params)
