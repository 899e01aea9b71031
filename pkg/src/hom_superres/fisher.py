"""Fisher information for the separation (and centroid) and Cramér-Rao bounds.

Integrands over ``dK`` of the 2x2 information matrix in ``(delta_x, x_s)``,
with ``a = dK delta_x / 2``, ``b = dK (x0 - x_s)`` and
``D = 1 - cos^2 a cos^2 b``::

    f11 = C dK^2 / 4 * sin^2 a cos^2 b / D
    f12 = -C dK^2 / 8 * sin 2a sin 2b / D
    f22 = C dK^2     * cos^2 a sin^2 b / D

``D`` is evaluated as ``sin^2 a + cos^2 a sin^2 b``, which is exact and free of
cancellation.  ``D`` vanishes only where ``sin a`` and ``sin b`` vanish
together; the ratios are replaced there by their limits along ``dK``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .interference import Scene, _require_aligned
from .wavepacket import QuadratureError, WavepacketSpec, sigma_k_of

# below this D the ratio is taken at its removable-singularity limit
_SINGULAR_DEN = 1e-24

REL_TOL = 1e-8

# absolute error allowance, relative to the aligned information sigma_k^2 / 2
ABS_TOL = 1e-14

# f_ij = C dK^2 * _WEIGHTS[ij] * r_ij
_WEIGHTS = (0.25, -0.125, 1.0)


@dataclass(frozen=True)
class FisherMatrix:
    f11: float
    f12: float
    f22: float
    quad_error: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([[self.f11, self.f12], [self.f12, self.f22]])

    @property
    def determinant(self) -> float:
        return self.f11 * self.f22 - self.f12**2


def _ratios(dk, delta_x, misalignment):
    """Return ``(r11, r12, r22)`` with ``f11 = C dK^2 r11 / 4`` etc."""
    dk = np.asarray(dk, dtype=float)
    a = 0.5 * dk * delta_x
    b = dk * misalignment
    sa2, ca2 = np.sin(a) ** 2, np.cos(a) ** 2
    sb2, cb2 = np.sin(b) ** 2, np.cos(b) ** 2
    den = sa2 + ca2 * sb2
    singular = den < _SINGULAR_DEN
    safe = np.where(singular, 1.0, den)
    r11 = sa2 * cb2 / safe
    r12 = np.sin(2 * a) * np.sin(2 * b) / safe
    r22 = ca2 * sb2 / safe
    if np.any(singular):
        t, m = 0.5 * delta_x, misalignment
        scale = max(abs(t), abs(m))
        if scale == 0.0:
            lim = (1.0, 0.0, 0.0)
        else:
            # the limits only depend on t : m; normalise so squares cannot underflow
            t, m = t / scale, m / scale
            u, v = t * t, m * m
            lim = (u / (u + v), 4.0 * t * m / (u + v), v / (u + v))
        r11 = np.where(singular, lim[0], r11)
        r12 = np.where(singular, lim[1], r12)
        r22 = np.where(singular, lim[2], r22)
    return r11, r12, r22


def integrands(dk, delta_x, misalignment, envelope):
    """Pointwise ``(f11, f12, f22)`` at momentum differences ``dk``."""
    c = envelope(dk) * np.asarray(dk, dtype=float) ** 2
    return tuple(c * w * r for w, r in zip(_WEIGHTS, _ratios(dk, delta_x, misalignment)))


# decades of breakpoints laid out on each side of a narrow spike
_LADDER = 10.0 ** np.arange(0, 8)


def _spike_breakpoints(delta_x: float, misalignment: float, b: float):
    """Breakpoints resolving the narrow peaks of the ratios on ``(0, b)``.

    When one phase is small, the denominator nearly vanishes at the zeros of
    the other and each ratio has a Lorentzian peak there.  Adaptive
    quadrature never samples a breakpoint itself, so every peak gets a
    geometric ladder ``c +- w * 10^p`` in units of its half-width ``w``.
    """
    half = 0.5 * abs(delta_x)
    m = abs(misalignment)
    centres, widths = [], []
    # zeros of sin(dK dx / 2): width set by |sin(dK m)|
    c = 2.0 * math.pi / abs(delta_x) * np.arange(1, int(b * half / math.pi) + 1)
    centres.append(c)
    widths.append(np.abs(np.sin(c * m)) / half)
    # zeros of sin(dK m): width set by |tan(dK dx / 2)|
    c = math.pi / m * np.arange(1, int(b * m / math.pi) + 1)
    centres.append(c)
    with np.errstate(divide="ignore"):
        widths.append(np.abs(np.tan(c * half)) / m)
    centres, widths = np.concatenate(centres), np.concatenate(widths)
    spacing = math.pi / max(half, m)
    # below 1e-12 relative width the zeros coincide (double zero, smooth ratio)
    # or the peak is beyond float resolution and carries no weight
    narrow = (widths < 1e-2 * spacing) & (widths > 1e-12 * centres)
    pts = [centres]
    for c, w in zip(centres[narrow], widths[narrow]):
        offs = w * _LADDER
        offs = offs[offs < 0.5 * spacing]
        pts.extend([c - offs, c + offs])
    pts = np.unique(np.concatenate(pts))
    pts = pts[(pts > 0.0) & (pts < b)]
    # ladders of nearly coincident centres can interleave to within rounding
    if pts.size < 2:
        return pts
    return pts[np.r_[True, np.diff(pts) > 1e-13 * pts[1:]]]


def fisher_matrix(scene: Scene) -> FisherMatrix:
    """Information matrix over ``(delta_x, x_s)`` by quadrature over ``dK``.

    Entries are accurate to ``1e-8`` relative, or ``1e-14 sigma_k^2 / 2``
    absolute for entries far smaller than the aligned information; ``f12``
    is held to ``1e-8 sqrt(f11 f22)``.

    Raises:
        QuadratureError: if any entry misses its tolerance.
    """
    env = scene.envelope
    dx, m = float(scene.delta_x), float(scene.misalignment)
    abs_tol = ABS_TOL * env.second_moment / 4.0
    points = None
    if m != 0.0 and dx != 0.0:
        points = _spike_breakpoints(dx, m, 1.5 * env.support_halfwidth)
    values, errors = {}, {}
    # diagonal entries first: they set the scale that f12 is judged against
    for j in (0, 2, 1):
        tol = abs_tol
        if j == 1:
            # |f12| <= sqrt(f11 f22), and f12 may cancel to ~0 between them
            tol = max(tol, REL_TOL * math.sqrt(values[0] * values[2]))
        # every integrand is even in dK
        val, err = env.expect(
            lambda k, j=j: _WEIGHTS[j] * _ratios(k, dx, m)[j] * k**2,
            even=True,
            points=points,
            epsabs=0.1 * tol,
        )
        if err > max(REL_TOL * abs(val), tol):
            raise QuadratureError(f"Fisher entry {j} did not converge", err)
        # diagonal integrands are nonnegative; drop Gauss-Kronrod roundoff below 0
        values[j] = max(val, 0.0) if j != 1 else val
        errors[j] = err
    return FisherMatrix(values[0], values[1], values[2], (errors[0], errors[1], errors[2]))


def fisher_aligned(spec: WavepacketSpec) -> float:
    """Information on ``delta_x`` for an aligned interferometer: ``sigma_k^2 / 2``.

    At alignment ``f11`` reduces to ``C dK^2 / 4`` for every ``delta_x``, so the
    integral is a quarter of the envelope's second moment.
    """
    return sigma_k_of(spec) ** 2 / 2.0


def fisher_bucket(scene: Scene) -> float:
    """Information on ``delta_x`` when only the port pattern (A or B) is recorded."""
    _require_aligned(scene)
    dx = float(scene.delta_x)
    limit = sigma_k_of(scene.wavepacket) ** 2 / 2.0
    if dx == 0.0:
        return limit
    env = scene.envelope
    slope, _ = env.expect(lambda k: k * np.sin(0.5 * k * dx), even=True)
    # 1 - int C cos(dK dx / 2), without cancellation
    gap, _ = env.expect(lambda k: 2.0 * np.sin(0.25 * k * dx) ** 2, even=True)
    den = gap * (2.0 - gap)
    if den <= 0.0:
        return limit
    return 0.25 * slope**2 / den


def crb(information: float, n: int) -> float:
    """Cramér-Rao variance bound ``1 / (n F)``; infinite when ``F == 0``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if information < 0:
        raise ValueError(f"information must be >= 0, got {information}")
    if information == 0:
        return math.inf
    return 1.0 / (n * information)
