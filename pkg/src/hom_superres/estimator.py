"""Maximum-likelihood estimation of the source separation and its Monte-Carlo study.

For an aligned interferometer the per-event likelihood factorises as::

    P(dK, B) = C(dK) cos^2(dK dx / 4)
    P(dK, A) = C(dK) sin^2(dK dx / 4)

so only the beat factor depends on the candidate separation ``dx``.  The
likelihood is even in ``dx``; estimates are reported as ``|dx|``.

The maximiser scans a uniform grid over the bracket and refines the best
grid cell by golden-section search.  Studies derive one seed per
``(n, repetition)`` pair with :func:`~hom_superres.sampler.derive_seed`, so a
report does not depend on how the trials are spread over worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .fisher import fisher_aligned
from .wavepacket import GaussianWavepacket
from .interference import Scene, Tag, _require_aligned, bucket_probability
from .sampler import SampleBatch, derive_seed, draw
from .serialize import metadata, scene_from_dict, scene_to_dict, sidecar_path, write_csv, write_json

GRID_POINTS = 512
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

# caps the (candidates x events) work array of the grid scan
_CHUNK_ELEMENTS = 1 << 21


class EstimationError(RuntimeError):
    """The likelihood is -inf over the whole bracket."""


class StudyError(RuntimeError):
    def __init__(self, n: int, rep: int, cause: Exception):
        super().__init__(f"trial n={n}, rep={rep} failed: {cause}")
        self.n, self.rep = n, rep


@dataclass(frozen=True)
class EstimationResult:
    estimate: float
    log_likelihood: float
    bracket: tuple[float, float]
    iterations: int
    converged: bool


def _beat_loglik(dk_b, dk_a, candidates):
    """Sum of log beat factors for every candidate separation."""
    candidates = np.atleast_1d(np.asarray(candidates, dtype=float))
    out = np.empty(candidates.size)
    n = max(dk_b.size + dk_a.size, 1)
    step = max(1, _CHUNK_ELEMENTS // n)
    with np.errstate(divide="ignore"):
        for lo in range(0, candidates.size, step):
            q = 0.25 * candidates[lo : lo + step, None]
            total = np.log(np.abs(np.cos(q * dk_b))).sum(axis=1)
            total += np.log(np.abs(np.sin(q * dk_a))).sum(axis=1)
            out[lo : lo + step] = 2.0 * total
    return out


def _split(batch: SampleBatch):
    dk = np.asarray(batch.delta_k, dtype=float)
    bunched = np.asarray(batch.bunched, dtype=bool)
    return dk[bunched], dk[~bunched]


def _envelope_term(scene: Scene, dk) -> float:
    with np.errstate(divide="ignore"):
        return float(np.log(scene.envelope(dk)).sum())


def log_likelihood(scene: Scene, batch: SampleBatch, delta_x):
    """Log-likelihood of ``batch`` if the separation were ``delta_x``.

    ``scene`` supplies the wavepacket and must be aligned; its own
    ``delta_x`` is ignored.  Vectorised over ``delta_x``.  Events with zero
    probability give ``-inf``.
    """
    _require_aligned(scene)
    dk_b, dk_a = _split(batch)
    const = _envelope_term(scene, batch.delta_k) if len(batch) else 0.0
    ll = const + _beat_loglik(dk_b, dk_a, delta_x)
    return float(ll[0]) if np.ndim(delta_x) == 0 else ll


def golden_section_max(f, lo, hi, tol, max_iter=200):
    """Maximise a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x), iterations, width)``."""
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    it = 0
    while hi - lo > tol and it < max_iter:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = f(x2)
        it += 1
    x = 0.5 * (lo + hi)
    return x, f(x), it, hi - lo


def _default_bracket(scene: Scene, bracket):
    if bracket is None:
        return 0.0, 8.0 * scene.wavepacket.sigma_x
    lo, hi = map(float, bracket)
    if not (0.0 <= lo < hi):
        raise ValueError(f"bracket must satisfy 0 <= lo < hi, got {bracket!r}")
    return lo, hi


def _grid_then_golden(f_grid, f_scalar, lo, hi, grid_points, tol):
    grid = np.linspace(lo, hi, grid_points)
    values = f_grid(grid)
    if not np.any(np.isfinite(values)):
        raise EstimationError("log-likelihood is -inf everywhere on the bracket")
    i = int(np.argmax(values))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    x, fx, it, width = golden_section_max(f_scalar, a, b, tol)
    if fx < values[i]:
        x, fx = grid[i], values[i]
    return float(x), float(fx), it, bool(width <= tol)


def mle(
    batch: SampleBatch,
    bracket=None,
    *,
    grid_points: int = GRID_POINTS,
    tol: float | None = None,
) -> EstimationResult:
    """Maximum-likelihood separation from resolved outcomes.

    ``bracket`` defaults to ``[0, 8 sigma_x]`` and ``tol`` (absolute, on the
    separation) to ``1e-6 sigma_x``.

    Raises:
        EstimationError: every candidate in the bracket has zero likelihood.
    """
    scene = batch.scene
    _require_aligned(scene)
    lo, hi = _default_bracket(scene, bracket)
    tol = 1e-6 * scene.wavepacket.sigma_x if tol is None else tol
    dk_b, dk_a = _split(batch)
    const = _envelope_term(scene, batch.delta_k)
    if const == -math.inf:
        raise EstimationError("an event lies outside the envelope support")
    x, fx, it, converged = _grid_then_golden(
        lambda g: _beat_loglik(dk_b, dk_a, g),
        lambda v: float(_beat_loglik(dk_b, dk_a, v)[0]),
        lo,
        hi,
        grid_points,
        tol,
    )
    return EstimationResult(abs(x), const + fx, (lo, hi), it, converged)


def mle_bucket(tags, scene: Scene, bracket=None, *, grid_points: int = GRID_POINTS, tol=None):
    """Separation estimate from bucket-detector tags only.

    Gaussian wavepackets are inverted in closed form from the bunching
    fraction; tabulated ones use the grid + golden-section maximiser on the
    binomial likelihood.  A bunching fraction of 1/2 or less cannot be
    inverted and returns the bracket's upper edge with ``converged=False``.
    """
    _require_aligned(scene)
    tags = [t if isinstance(t, Tag) else Tag(t) for t in tags]
    if not tags:
        raise ValueError("empty tag list")
    lo, hi = _default_bracket(scene, bracket)
    n_b = sum(t is Tag.B for t in tags)
    n_a = len(tags) - n_b

    def loglik(dx):
        s = scene.with_delta_x(dx)
        # xlogy: an empty class contributes 0 even where its probability is 0
        return float(xlogy(n_b, bucket_probability(s, Tag.B)) + xlogy(n_a, bucket_probability(s, Tag.A)))

    p_hat = n_b / len(tags)
    if p_hat <= 0.5:
        return EstimationResult(hi, float(loglik(hi)), (lo, hi), 0, False)
    wp = scene.wavepacket
    if isinstance(wp, GaussianWavepacket):
        est = 2.0 / wp.sigma_k * math.sqrt(-math.log(2.0 * p_hat - 1.0))
        converged = bool(lo <= est <= hi)
        est = min(max(est, lo), hi)
        return EstimationResult(est, float(loglik(est)), (lo, hi), 0, converged)
    tol = 1e-6 * wp.sigma_x if tol is None else tol
    x, fx, it, converged = _grid_then_golden(
        lambda g: np.array([loglik(v) for v in g]), loglik, lo, hi, grid_points, tol
    )
    return EstimationResult(abs(x), fx, (lo, hi), it, converged)


@dataclass(frozen=True)
class StudyRow:
    n: int
    reps: int
    var_ratio: float
    mean_ratio: float


@dataclass(frozen=True)
class StudyReport:
    """Estimator variance (in units of the Cramér-Rao bound) and bias per sample size."""

    scene: Scene
    seed: int
    rows: list[StudyRow] = field(default_factory=list)

    @property
    def information(self) -> float:
        return fisher_aligned(self.scene.wavepacket)

    def var_ratio_se(self, row: StudyRow) -> float:
        """Normal-theory standard error of ``var_ratio``."""
        return row.var_ratio * math.sqrt(2.0 / (row.reps - 1))

    def mean_ratio_se(self, row: StudyRow) -> float:
        var = row.var_ratio / (row.n * self.information)
        return math.sqrt(var / row.reps) / abs(self.scene.delta_x)

    def to_dict(self) -> dict:
        return {
            "scene": scene_to_dict(self.scene),
            "seed": int(self.seed),
            "rows": [
                {"n": r.n, "reps": r.reps, "var_ratio": r.var_ratio, "mean_ratio": r.mean_ratio}
                for r in self.rows
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StudyReport":
        rows = [StudyRow(int(r["n"]), int(r["reps"]), r["var_ratio"], r["mean_ratio"]) for r in data["rows"]]
        return cls(scene_from_dict(data["scene"]), int(data["seed"]), rows)

    def csv_rows(self):
        return [(r.n, r.reps, r.var_ratio, r.mean_ratio) for r in self.rows]

    def to_json(self, path, **extra):
        return write_json(path, {**metadata(**extra), "report": self.to_dict()})

    def to_csv(self, path, **extra):
        write_csv(path, ["n", "reps", "var_ratio", "mean_ratio"], self.csv_rows())
        write_json(sidecar_path(path), metadata(seed=int(self.seed), scene=scene_to_dict(self.scene), **extra))
        return path


def _trials(scene: Scene, seed: int, n: int, reps: range, bracket):
    out = np.empty(len(reps))
    for j, r in enumerate(reps):
        try:
            out[j] = mle(draw(scene, derive_seed(seed, n, r), n), bracket).estimate
        except Exception as exc:  # noqa: BLE001 - re-raised with the trial index
            raise StudyError(n, r, exc) from exc
    return out


def run_study(scene: Scene, n_list, reps: int, seed: int, *, workers: int = 1, bracket=None):
    """Monte-Carlo variance and bias of :func:`mle` for each sample size in ``n_list``.

    ``var_ratio`` is the sample variance of the estimates times ``n F``, so 1
    means the Cramér-Rao bound is saturated; ``mean_ratio`` is the mean
    estimate over the true ``|delta_x|``.  Repetition ``r`` at sample size
    ``n`` always uses ``derive_seed(seed, n, r)``.
    """
    _require_aligned(scene)
    if reps < 2:
        raise ValueError(f"reps must be >= 2, got {reps}")
    if scene.delta_x == 0:
        raise ValueError("study needs a nonzero true separation")
    n_list = [int(n) for n in n_list]
    if len(set(n_list)) != len(n_list):
        raise ValueError(f"duplicate sample sizes in {n_list}")
    chunk = max(1, math.ceil(reps / max(1, 4 * workers)))
    tasks = [(n, range(s, min(s + chunk, reps))) for n in n_list for s in range(0, reps, chunk)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_trials, scene, seed, n, r, bracket) for n, r in tasks]
            parts = [f.result() for f in futures]
    else:
        parts = [_trials(scene, seed, n, r, bracket) for n, r in tasks]
    info = fisher_aligned(scene.wavepacket)
    truth = abs(scene.delta_x)
    rows = []
    for n in n_list:
        est = np.concatenate([p for (m, _), p in zip(tasks, parts) if m == n])
        rows.append(
            StudyRow(n, reps, float(np.var(est, ddof=1) * n * info), float(np.mean(est) / truth))
        )
    return StudyReport(scene, int(seed), rows)
