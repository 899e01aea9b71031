"""Exact sampling of detection events.

Each event is drawn in two stages.  Because ``P(dK, A) + P(dK, B) = C(dK)``,
the momentum difference is first drawn from the envelope alone, and the tag
is then a Bernoulli variable with::

    p(B | dK) = (1 + cos(dK delta_x / 2) cos(dK (x0 - x_s))) / 2

No rejection step is involved.  Gaussian envelopes are sampled as normal
variates with variance ``2 sigma_k^2``; tabulated envelopes through an
interpolated inverse CDF.

Seeding: a batch is fully determined by ``(scene, seed, n)``.  Independent
streams for parallel work are obtained with :func:`derive_seed`, which feeds
``seed`` and the stream index into :class:`numpy.random.SeedSequence` as
entropy and spawn key.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .interference import Outcome, Scene, Tag, _require_aligned, bucket_probability
from .serialize import metadata, scene_to_dict, sidecar_path, write_csv, write_json


def derive_seed(seed: int, *index: int) -> int:
    """64-bit seed of the stream ``index`` under the root ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(i) for i in index))
    return int(ss.generate_state(1, np.uint64)[0])


def _rng(seed: int) -> np.random.Generator:
    if int(seed) < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    return np.random.default_rng(int(seed))


def bunching_probability(scene: Scene, delta_k):
    """``p(B | dK)``; exactly 1 for a perfectly overlapping, aligned scene."""
    dk = np.asarray(delta_k, dtype=float)
    if scene.aligned:
        return np.cos(0.25 * dk * scene.delta_x) ** 2
    return 0.5 * (1.0 + np.cos(0.5 * dk * scene.delta_x) * np.cos(dk * scene.misalignment))


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """``n`` detection events; ``bunched[i]`` is True for a B-tagged event."""

    scene: Scene
    seed: int
    delta_k: np.ndarray
    bunched: np.ndarray

    def __len__(self):
        return self.delta_k.size

    @property
    def outcomes(self) -> list[Outcome]:
        return [
            Outcome(float(k), Tag.B if b else Tag.A) for k, b in zip(self.delta_k, self.bunched)
        ]

    def __eq__(self, other):
        if not isinstance(other, SampleBatch):
            return NotImplemented
        return (
            self.seed == other.seed
            and self.scene == other.scene
            and np.array_equal(self.delta_k, other.delta_k)
            and np.array_equal(self.bunched, other.bunched)
        )

    def to_csv(self, path, **extra_metadata):
        """Write ``delta_k, tag`` rows plus a JSON sidecar with seed and scene."""
        rows = ((k, "B" if b else "A") for k, b in zip(self.delta_k, self.bunched))
        write_csv(path, ["delta_k", "tag"], rows)
        write_json(
            sidecar_path(path),
            metadata(seed=int(self.seed), n=len(self), scene=scene_to_dict(self.scene), **extra_metadata),
        )
        return path

    @classmethod
    def from_outcomes(cls, scene: Scene, outcomes, seed: int = 0) -> "SampleBatch":
        outcomes = list(outcomes)
        dk = np.array([float(o[0]) for o in outcomes], dtype=float)
        bunched = np.array([Tag(o[1]) is Tag.B for o in outcomes], dtype=bool)
        return cls(scene, seed, dk, bunched)


def draw(scene: Scene, seed: int, n: int) -> SampleBatch:
    """Draw ``n`` i.i.d. events ``(dK, X)`` from the scene's outcome distribution."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = _rng(seed)
    dk = scene.envelope.sample(rng, n)
    bunched = rng.random(n) < bunching_probability(scene, dk)
    dk.setflags(write=False)
    bunched.setflags(write=False)
    return SampleBatch(scene, int(seed), dk, bunched)


def draw_bucket(scene: Scene, seed: int, n: int) -> list[Tag]:
    """Draw ``n`` bucket-detector tags for an aligned scene."""
    _require_aligned(scene)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    p_b = bucket_probability(scene, Tag.B)
    bunched = _rng(seed).random(n) < p_b
    return [Tag.B if b else Tag.A for b in bunched]
