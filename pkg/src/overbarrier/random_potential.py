"""Seeded synthesis of stationary random shapes with prescribed correlation.

A realization is a finite cosine series

    U(z) = sum_n a_n cos(q_n z + phi_n),    q_n = (n + 1/2) dq,

with uniformly random phases and deterministic amplitudes taken from the
target spectral density, a_n = sqrt(2 S(q_n) dq / pi).  This gives zero
mean, unit variance and binary correlation <U(z) U(z+s)> -> w(s) as the
mode spacing shrinks, is entire in z (so turning-point machinery applies to
realizations), and is bit-reproducible from the seed.  The half-integer
wavenumber ladder avoids a spurious DC component and makes the series
period twice 2*pi/dq, safely beyond the sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EnsembleConfigurationError
from .potentials import (
    Family,
    FourierSeriesParams,
    PotentialSpec,
    taper_envelope,
)


@dataclass(frozen=True)
class GaussianCorrelation:
    """Binary correlation w(s) = exp(-(eps*s)^2) for a unit-variance shape."""

    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise EnsembleConfigurationError("correlation eps must be positive")

    def correlation(self, s):
        s = np.asarray(s, dtype=float)
        return np.exp(-((self.eps * s) ** 2))

    def spectral_density(self, q):
        """S(q) = int w(s) e^{-iqs} ds = (sqrt(pi)/eps) exp(-q^2/(4 eps^2))."""
        q = np.asarray(q, dtype=float)
        return math.sqrt(math.pi) / self.eps * np.exp(-(q / (2.0 * self.eps)) ** 2)


def correlation_fourier(correlation: GaussianCorrelation, wavenumber: float = 2.0) -> float:
    """Fourier transform of the correlation at the backscattering wavenumber.

    For the Gaussian family this is (sqrt(pi)/eps) exp(-(k/(2 eps))^2);
    at k = 2 it reduces to (sqrt(pi)/eps) exp(-1/eps^2).
    """
    e = correlation.eps
    return math.sqrt(math.pi) / e * math.exp(-((wavenumber / (2.0 * e)) ** 2))


def synthesize_random(correlation: GaussianCorrelation, length: float,
                      seed, delta: float = 0.0,
                      taper_width: float | None = None,
                      q_max: float | None = None) -> PotentialSpec:
    """Draw one realization as an analytic fourier-family spec.

    The mode ladder spans (0, q_max] with spacing dq = 2*pi/period, where
    the period exceeds the sample length by several correlation lengths so
    the realization cannot repeat within the sample.  Identical seeds give
    bit-identical coefficient lists.
    """
    eps = correlation.eps
    if length <= 0:
        raise EnsembleConfigurationError("sample length must be positive")
    taper = taper_width if taper_width is not None else 5.0 / eps
    if taper < 3.0 / eps:
        raise EnsembleConfigurationError(
            f"taper width {taper:.3g} too narrow; need at least 3/eps = {3.0 / eps:.3g}"
        )
    if length < 2.0 * taper:
        raise EnsembleConfigurationError("sample shorter than its two tapers")
    period = length + max(8.0 / eps, 0.02 * length)
    dq = 2.0 * math.pi / period
    qm = q_max if q_max is not None else 10.0 * eps
    n_modes = int(math.floor(qm / dq - 0.5)) + 1
    # need the spectral peak resolved: several modes inside the bandwidth
    if dq > eps / 4.0 or n_modes < 16:
        raise EnsembleConfigurationError(
            f"insufficient modes for eps={eps}, length={length}: "
            f"dq={dq:.4g} vs bandwidth {eps:.4g} ({n_modes} modes)"
        )
    q = (np.arange(n_modes) + 0.5) * dq
    amps = np.sqrt(2.0 * correlation.spectral_density(q) * dq / math.pi)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    phases = rng.uniform(0.0, 2.0 * math.pi, n_modes)
    params = FourierSeriesParams(amps, q, phases, taper, length)
    return PotentialSpec(Family.FOURIER_SERIES, delta, eps, params)


def sample_realization(spec: PotentialSpec, grid_step: float):
    """Tapered shape values at cell midpoints over [0, length].

    Uses an FFT when the wavenumber ladder is uniform (the synthesized
    case), falling back to direct summation otherwise.  Returns (z, u).
    """
    if spec.family is not Family.FOURIER_SERIES:
        raise EnsembleConfigurationError("sampling expects a fourier-family spec")
    p = spec.params
    n_cells = max(int(round(p.length / grid_step)), 2)
    h = p.length / n_cells
    z = (np.arange(n_cells) + 0.5) * h

    dqs = np.diff(p.wavenumbers)
    # ulp-level rounding of (n+1/2)*dq must not disqualify the ladder
    dq_mean = float(dqs.mean()) if len(dqs) else 0.0
    uniform = len(p.wavenumbers) >= 2 and np.allclose(dqs, dq_mean, rtol=0.0,
                                                      atol=1e-9 * abs(dq_mean))
    half_integer = uniform and abs(p.wavenumbers[0] / dq_mean - 0.5) < 1e-6
    if half_integer:
        dq = dq_mean
        period = 2.0 * math.pi / dq
        nfft = max(int(math.ceil(period / h)), len(p.wavenumbers) + 1)
        h_eff = period / nfft
        # resample the midpoints on the FFT grid spacing
        n_cells = max(int(round(p.length / h_eff)), 2)
        z = (np.arange(n_cells) + 0.5) * h_eff
        omega = 2.0 * math.pi / nfft
        c = np.zeros(nfft, dtype=complex)
        n = np.arange(len(p.wavenumbers))
        c[: len(n)] = p.amplitudes * np.exp(1j * (p.phases + 0.5 * omega * n))
        base = np.fft.ifft(c) * nfft
        j = np.arange(n_cells)
        raw = (np.exp(1j * omega * (0.5 * j + 0.25)) * base[:n_cells]).real
    else:
        raw = np.zeros(n_cells)
        step = max(1, int(2_000_000 // max(len(p.wavenumbers), 1)))
        for i in range(0, n_cells, step):
            blk = z[i:i + step, None] * p.wavenumbers[None, :] + p.phases[None, :]
            raw[i:i + step] = np.cos(blk) @ p.amplitudes
    u = raw * taper_envelope(z, p.length, p.taper_width)
    if spec.mirror:
        u = u[::-1].copy()
    return z, u
