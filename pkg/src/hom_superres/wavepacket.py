"""Photon wavepackets and the momentum-difference envelope C(dK).

Two wavepacket kinds are supported: a Gaussian described by its momentum
spread ``sigma_k`` and a tabulated momentum intensity ``|phi(k)|^2``.  Only
the intensity matters downstream, so phases are never stored.

The envelope is the autocorrelation of ``|phi|^2``::

    C(dK) = int dK' |phi(K' + dK/2)|^2 |phi(K' - dK/2)|^2

which is the probability density of the momentum difference of two
independent photons sharing the same wavepacket.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Union

import numpy as np
from scipy import integrate, signal, stats
from scipy.interpolate import PchipInterpolator

#: probability mass of C kept inside ``support_halfwidth``
SUPPORT_MASS = 1.0 - 1e-10

#: knots of the tabulated inverse CDF used for sampling
INVERSE_CDF_KNOTS = 8192

#: refinement factor of the tabulated grid before autocorrelation
REFINE = 4

MIN_TABULATED_POINTS = 16


class WavepacketError(ValueError):
    """Raised when a wavepacket cannot be constructed."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved abs error {achieved:.3g})")
        self.achieved = achieved


def adaptive_quad(func, a, b, *, epsabs=1e-15, epsrel=1e-10, limit=500, points=None):
    """``scipy.integrate.quad`` that raises :class:`QuadratureError` on any warning."""
    out = integrate.quad(
        func, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, points=points, full_output=1
    )
    val, err = out[0], out[1]
    if len(out) > 3:
        # roundoff-limited results that already meet the tolerance are accepted
        if err > max(epsabs, epsrel * abs(val)) * 10:
            raise QuadratureError(out[3].split("\n")[0], err)
    return val, err


@dataclass(frozen=True)
class GaussianWavepacket:
    """Gaussian momentum intensity ``N(k; 0, sigma_k^2)``."""

    sigma_k: float

    def __post_init__(self):
        if not np.isfinite(self.sigma_k) or self.sigma_k <= 0:
            raise WavepacketError(f"sigma_k must be finite and > 0, got {self.sigma_k!r}")

    @property
    def sigma_x(self) -> float:
        return 1.0 / (2.0 * self.sigma_k)

    def intensity(self, k):
        return stats.norm.pdf(k, scale=self.sigma_k)

    @cached_property
    def envelope(self) -> "GaussianEnvelope":
        return GaussianEnvelope(self.sigma_k)


@dataclass(frozen=True, eq=False)
class TabulatedWavepacket:
    """Momentum intensity sampled on a strictly increasing grid.

    The intensity is renormalised with the trapezoid rule at construction and
    is taken to vanish outside ``[grid[0], grid[-1]]``.
    """

    grid: np.ndarray
    amplitude_sq: np.ndarray
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        amp = np.asarray(self.amplitude_sq, dtype=float)
        if grid.ndim != 1 or grid.shape != amp.shape:
            raise WavepacketError("grid and amplitude_sq must be 1-D arrays of equal length")
        if grid.size < MIN_TABULATED_POINTS:
            raise WavepacketError(
                f"tabulated wavepacket needs >= {MIN_TABULATED_POINTS} points, got {grid.size}"
            )
        if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(amp))):
            raise WavepacketError("grid and amplitude_sq must be finite")
        if np.any(np.diff(grid) <= 0):
            raise WavepacketError("grid must be strictly increasing")
        if np.any(amp < 0):
            raise WavepacketError("amplitude_sq must be nonnegative")
        norm = integrate.trapezoid(amp, grid)
        if not norm > 0:
            raise WavepacketError("amplitude_sq is not normalisable (zero total mass)")
        grid.setflags(write=False)
        amp = amp / norm
        amp.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "amplitude_sq", amp)

    @classmethod
    def from_csv(cls, path) -> "TabulatedWavepacket":
        """Load a two-column ``k, amplitude_sq`` CSV with a header row."""
        path = Path(path)
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise WavepacketError(f"{path}: empty file")
        header, body = rows[0], [r for r in rows[1:] if r]
        try:
            [float(v) for v in header]
        except ValueError:
            pass
        else:
            raise WavepacketError(f"{path}: header row required")
        try:
            data = np.array([[float(r[0]), float(r[1])] for r in body])
        except (ValueError, IndexError) as exc:
            raise WavepacketError(f"{path}: malformed row ({exc})") from None
        if data.size == 0:
            raise WavepacketError(f"{path}: no data rows")
        return cls(data[:, 0], data[:, 1], source=str(path))

    @cached_property
    def _fine(self):
        # uniform refined grid shared by the moments and the envelope, so that
        # second_moment == 2 * sigma_k**2 holds to rounding
        m = REFINE * (self.grid.size - 1) + 1
        k = np.linspace(self.grid[0], self.grid[-1], m)
        p = np.clip(self._interpolant(k), 0.0, None)
        w = p * (k[1] - k[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        return k, w / w.sum()

    @cached_property
    def _interpolant(self):
        return PchipInterpolator(self.grid, self.amplitude_sq, extrapolate=False)

    def intensity(self, k):
        out = self._interpolant(np.asarray(k, dtype=float))
        return np.clip(np.nan_to_num(out, nan=0.0), 0.0, None)

    @cached_property
    def sigma_k(self) -> float:
        k, w = self._fine
        mean = np.dot(w, k)
        return float(np.sqrt(np.dot(w, (k - mean) ** 2)))

    @property
    def sigma_x(self) -> float:
        return 1.0 / (2.0 * self.sigma_k)

    @cached_property
    def envelope(self) -> "LatticeEnvelope":
        k, w = self._fine
        h = k[1] - k[0]
        corr = signal.correlate(w, w, mode="full")
        corr = np.clip(corr, 0.0, None)
        corr = 0.5 * (corr + corr[::-1])
        corr /= corr.sum()
        # zero-padded so the linear interpolant integrates to exactly sum(corr)
        corr = np.pad(corr, 1)
        lags = (np.arange(corr.size) - w.size) * h
        return LatticeEnvelope(lags, corr / h)


WavepacketSpec = Union[GaussianWavepacket, TabulatedWavepacket]


def sigma_k_of(spec: WavepacketSpec) -> float:
    """Standard deviation of the momentum intensity."""
    return float(spec.sigma_k)


def build_envelope(spec: WavepacketSpec) -> "Envelope":
    """Return the (cached) envelope C(dK) of ``spec``."""
    return spec.envelope


class GaussianEnvelope:
    """Closed form ``C(dK) = exp(-dK^2 / 4 sigma_k^2) / sqrt(4 pi sigma_k^2)``."""

    def __init__(self, sigma_k: float):
        self.sigma_k = float(sigma_k)
        self.scale = np.sqrt(2.0) * self.sigma_k
        self.second_moment = 2.0 * self.sigma_k**2
        self.support_halfwidth = float(self.scale * stats.norm.isf(0.5 * (1.0 - SUPPORT_MASS)))

    def __call__(self, dk):
        dk = np.asarray(dk, dtype=float)
        return np.exp(-(dk**2) / (4.0 * self.sigma_k**2)) / np.sqrt(4.0 * np.pi * self.sigma_k**2)

    def expect(
        self, func: Callable, *, even: bool = False, epsrel: float = 1e-10, epsabs: float = 1e-15, points=None
    ):
        """Adaptive quadrature of ``C(dK) * func(dK)``; returns ``(value, abserr)``.

        ``points`` are known sharp features of ``func`` (nonnegative ones
        suffice when ``even``); they become quadrature breakpoints.
        """
        # the tail beyond 1.5x support carries < 1e-20 of C * dK^2
        b = 1.5 * self.support_halfwidth
        pts = np.asarray([] if points is None else points, dtype=float)

        def integrand(x):
            return self(x) * func(x)

        if even:
            inside = pts[(pts > 0.0) & (pts < b)]
            val, err = adaptive_quad(
                integrand, 0.0, b, epsrel=epsrel, epsabs=epsabs, points=inside if inside.size else None,
                limit=500 + 50 * inside.size,
            )
            return 2.0 * val, 2.0 * err
        inside = pts[np.abs(pts) < b]
        return adaptive_quad(
            integrand, -b, b, epsrel=epsrel, epsabs=epsabs, points=inside if inside.size else None,
            limit=500 + 50 * inside.size,
        )

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.normal(0.0, self.scale, size=n)


class LatticeEnvelope:
    """Envelope tabulated on a uniform lattice, linearly interpolated, zero outside."""

    def __init__(self, lags: np.ndarray, values: np.ndarray):
        self.lags = lags
        self.values = values
        self.step = float(lags[1] - lags[0])
        self.second_moment = float(np.sum(lags**2 * values) * self.step)
        centre = lags.size // 2
        mass = values[centre] * self.step + 2.0 * np.cumsum(values[centre + 1 :]) * self.step
        idx = int(np.searchsorted(mass, SUPPORT_MASS))
        self.support_halfwidth = float(lags[centre + min(idx, mass.size - 1)])

    def __call__(self, dk):
        return np.interp(dk, self.lags, self.values, left=0.0, right=0.0)

    def expect(
        self, func: Callable, *, even: bool = False, epsrel: float = 1e-10, epsabs: float = 1e-15, points=None
    ):
        """Lattice sum of ``C * func``; error estimated against the half-density lattice.

        ``epsabs`` and ``points`` are accepted for interface parity and ignored.
        """
        g = self.values * func(self.lags)
        fine = np.sum(g) * self.step
        centre = self.lags.size // 2
        coarse = np.sum(g[centre % 2 :: 2]) * 2.0 * self.step
        return float(fine), float(abs(fine - coarse))

    @cached_property
    def _inverse_cdf(self):
        b = self.support_halfwidth
        cdf_lattice = np.concatenate(
            [[0.0], np.cumsum(0.5 * (self.values[1:] + self.values[:-1]) * self.step)]
        )
        knots = np.linspace(-b, b, INVERSE_CDF_KNOTS)
        cdf = np.interp(knots, self.lags, cdf_lattice)
        cdf = (cdf - cdf[0]) / (cdf[-1] - cdf[0])
        return knots, np.maximum.accumulate(cdf)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        knots, cdf = self._inverse_cdf
        return np.interp(rng.random(n), cdf, knots)


Envelope = Union[GaussianEnvelope, LatticeEnvelope]
