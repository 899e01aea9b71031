"""Outcome distribution of the reference-photon / thermal-photon interferometer.

A detected pair is summarised by the momentum difference ``dK = k - k'`` and
by whether both photons left through the same beam-splitter port (bunching,
``Tag.B``) or through opposite ports (antibunching, ``Tag.A``).  With the
reference photon centred at ``x0`` and the thermal photon coming from one of
two sources at ``x_s +- delta_x / 2``::

    P(dK, X) = C(dK) / 2 * (1 + a(X) cos(dK delta_x / 2) cos(dK (x0 - x_s)))

with ``a(B) = +1`` and ``a(A) = -1``.  :func:`oracle_density` rebuilds the
same quantity from two-photon amplitudes and a numerical marginalisation and
is kept for cross-checking only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .wavepacket import (
    GaussianWavepacket,
    QuadratureError,
    TabulatedWavepacket,
    WavepacketSpec,
)


class MisalignedSceneError(ValueError):
    """An operation that requires ``x0 == centroid`` got a misaligned scene."""


class Tag(str, enum.Enum):
    A = "A"  # antibunching: opposite cameras
    B = "B"  # bunching: same camera

    @property
    def sign(self) -> int:
        return 1 if self is Tag.B else -1


class Outcome(NamedTuple):
    delta_k: float
    tag: Tag


@dataclass(frozen=True)
class Scene:
    """Two incoherent sources at ``centroid +- delta_x / 2`` and a reference at ``x0``.

    ``x0`` defaults to the centroid (aligned interferometer).
    """

    delta_x: float
    wavepacket: WavepacketSpec
    centroid: float = 0.0
    x0: float | None = None

    def __post_init__(self):
        if self.x0 is None:
            object.__setattr__(self, "x0", self.centroid)
        for name in ("delta_x", "centroid", "x0"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")

    @classmethod
    def from_sources(cls, x1: float, x2: float, wavepacket: WavepacketSpec, x0=None) -> "Scene":
        return cls(x1 - x2, wavepacket, centroid=0.5 * (x1 + x2), x0=x0)

    @property
    def sources(self) -> tuple[float, float]:
        return self.centroid + 0.5 * self.delta_x, self.centroid - 0.5 * self.delta_x

    @property
    def misalignment(self) -> float:
        return self.x0 - self.centroid

    @property
    def aligned(self) -> bool:
        return self.misalignment == 0.0

    @property
    def envelope(self):
        return self.wavepacket.envelope

    def with_delta_x(self, delta_x: float) -> "Scene":
        return replace(self, delta_x=delta_x)


@dataclass(frozen=True)
class DetectorGeometry:
    """Far-field camera: longitudinal wavenumber ``k0`` and distance ``d``."""

    k0: float
    d: float

    def __post_init__(self):
        if not (self.k0 > 0 and self.d > 0):
            raise ValueError(f"k0 and d must be > 0, got k0={self.k0!r}, d={self.d!r}")


def momentum_from_pixel(geometry: DetectorGeometry, y):
    """Transverse momentum ``y * k0 / d`` of a photon hitting pixel position ``y``."""
    return np.asarray(y, dtype=float) * geometry.k0 / geometry.d


def _as_tag(tag) -> Tag:
    return tag if isinstance(tag, Tag) else Tag(tag)


def joint_density(scene: Scene, delta_k, tag):
    """Probability density of the outcome ``(delta_k, tag)``; vectorised over ``delta_k``."""
    dk = np.asarray(delta_k, dtype=float)
    beat = np.cos(0.5 * dk * scene.delta_x) * np.cos(dk * scene.misalignment)
    p = 0.5 * scene.envelope(dk) * (1.0 + _as_tag(tag).sign * beat)
    return np.maximum(p, 0.0)


def _require_aligned(scene: Scene):
    if not scene.aligned:
        raise MisalignedSceneError(
            f"scene must be aligned (x0 == centroid), misalignment is {scene.misalignment!r}"
        )


def aligned_density(scene: Scene, delta_k, tag):
    """Density for an aligned scene, written as ``C cos^2`` (B) or ``C sin^2`` (A).

    The half-angle form keeps the antibunching density accurate when
    ``delta_k * delta_x`` is small, where ``1 - cos`` would cancel.
    """
    _require_aligned(scene)
    dk = np.asarray(delta_k, dtype=float)
    quarter = 0.25 * dk * scene.delta_x
    beat = np.cos(quarter) ** 2 if _as_tag(tag) is Tag.B else np.sin(quarter) ** 2
    return scene.envelope(dk) * beat


def bucket_probability(scene: Scene, tag) -> float:
    """Probability of bunching / antibunching with non-resolving detectors."""
    _require_aligned(scene)
    tag = _as_tag(tag)
    wp = scene.wavepacket
    if isinstance(wp, GaussianWavepacket):
        # P(A) = (1 - exp(-s^2 dx^2 / 4)) / 2, via expm1 to survive small dx
        p_a = -0.5 * np.expm1(-((wp.sigma_k * scene.delta_x) ** 2) / 4.0)
        return float(1.0 - p_a) if tag is Tag.B else float(p_a)
    p_a, _ = scene.envelope.expect(lambda dk: np.sin(0.25 * dk * scene.delta_x) ** 2, even=True)
    return float(1.0 - p_a) if tag is Tag.B else float(p_a)


# Balanced beam splitter; rows are input ports (0 reference, 1 thermal), columns cameras.
BEAM_SPLITTER = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def _pair_density(wavepacket: WavepacketSpec, x0, sources, k, kp, tag: Tag):
    """Two-photon detection density at momenta ``(k, kp)``, averaged over the sources."""
    phi_k = np.sqrt(wavepacket.intensity(k))
    phi_kp = np.sqrt(wavepacket.intensity(kp))
    U = BEAM_SPLITTER
    total = 0.0
    for xi in sources:
        ref_k, ref_kp = phi_k * np.exp(-1j * k * x0), phi_kp * np.exp(-1j * kp * x0)
        src_k, src_kp = phi_k * np.exp(-1j * k * xi), phi_kp * np.exp(-1j * kp * xi)

        def amp(c, cp):
            return U[0, c] * U[1, cp] * ref_k * src_kp + U[1, c] * U[0, cp] * src_k * ref_kp

        if tag is Tag.A:
            total += abs(amp(0, 1)) ** 2
        else:
            # identical-port events: each unordered pair appears twice in (k, kp)
            total += 0.5 * (abs(amp(0, 0)) ** 2 + abs(amp(1, 1)) ** 2)
    return total / len(sources)


def oracle_density(scene: Scene, delta_k, tag, *, epsabs: float = 1e-8):
    """Density of ``(delta_k, tag)`` by integrating pair densities over ``K = (k + k') / 2``.

    Independent of :func:`joint_density`: starts from beam-splitter amplitudes
    of the reference and thermal photons and integrates numerically, all
    ``delta_k`` values sharing one vector-valued adaptive quadrature.

    Raises:
        QuadratureError: if the K integral does not converge; ``achieved``
            carries the reached absolute error.
    """
    tag = _as_tag(tag)
    wp = scene.wavepacket
    sources = scene.sources
    if isinstance(wp, TabulatedWavepacket):
        lo, hi = wp.grid[0], wp.grid[-1]
    else:
        lo, hi = -12.0 * wp.sigma_k, 12.0 * wp.sigma_k
    dk = np.asarray(delta_k, dtype=float)
    flat = dk.ravel()

    def integrand(K):
        # intensity() vanishes off the grid, so one K range serves every delta_k
        return _pair_density(wp, scene.x0, sources, K + 0.5 * flat, K - 0.5 * flat, tag)

    val, err, info = integrate.quad_vec(
        integrand, lo, hi, epsabs=epsabs, epsrel=1e-10, norm="max", limit=2000, full_output=True
    )
    if not info.success:
        raise QuadratureError(info.message, float(err))
    val = np.asarray(val).reshape(dk.shape)
    return float(val) if dk.ndim == 0 else val


__all__ = [
    "DetectorGeometry",
    "MisalignedSceneError",
    "Outcome",
    "QuadratureError",
    "Scene",
    "Tag",
    "aligned_density",
    "bucket_probability",
    "joint_density",
    "momentum_from_pixel",
    "oracle_density",
]
