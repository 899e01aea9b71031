import math

import numpy as np
import pytest

from _stats import binned_chi2, binomial_z
from hom_superres.interference import MisalignedSceneError, Scene, Tag, bucket_probability
from hom_superres.sampler import SampleBatch, derive_seed, draw, draw_bucket
from hom_superres.serialize import read_json, sidecar_path


def test_overlapping_sources_always_bunch(gauss):
    for seed in (0, 1, 99):
        assert draw(Scene(0.0, gauss), seed, 1000).bunched.all()
        assert set(draw_bucket(Scene(0.0, gauss), seed, 1000)) == {Tag.B}


def test_bunching_fraction(gauss):
    batch = draw(Scene(2.0, gauss), 11, 100_000)
    p = 0.5 * (1 + math.exp(-1))
    assert binomial_z(int(batch.bunched.sum()), len(batch), p) < 3


def test_gaussian_marginal_variance(gauss):
    batch = draw(Scene(2.0, gauss), 5, 100_000)
    # variance 2 sigma_k^2, SE of the sample variance ~ 2 * sqrt(2 / n)
    assert np.var(batch.delta_k) == pytest.approx(2.0, abs=4 * 2 * math.sqrt(2 / 1e5))


@pytest.mark.parametrize("x0", [0.0, 0.6])
def test_resolved_chi2(gauss, x0):
    batch = draw(Scene(2.0, gauss, x0=x0), 2024, 100_000)
    _, _, pvalue = binned_chi2(batch)
    assert pvalue > 0.01


def test_resolved_chi2_tabulated(tab_gauss):
    batch = draw(Scene(1.5, tab_gauss), 8, 100_000)
    assert binned_chi2(batch)[2] > 0.01


def test_chi2_detects_wrong_scene(gauss):
    batch = draw(Scene(2.0, gauss), 3, 100_000)
    wrong = SampleBatch(Scene(2.3, gauss), 3, batch.delta_k, batch.bunched)
    assert binned_chi2(wrong)[2] < 1e-6


def test_bucket_fraction(gauss):
    tags = draw_bucket(Scene(2.0, gauss), 4, 100_000)
    n_b = sum(t is Tag.B for t in tags)
    assert binomial_z(n_b, len(tags), 0.6839397) < 3


def test_bucket_requires_alignment(gauss):
    with pytest.raises(MisalignedSceneError):
        draw_bucket(Scene(1.0, gauss, x0=0.5), 0, 10)


def test_determinism(gauss):
    scene = Scene(1.0, gauss, x0=0.2)
    assert draw(scene, 42, 500) == draw(scene, 42, 500)
    assert draw(scene, 42, 500) != draw(scene, 43, 500)
    assert draw_bucket(Scene(1.0, gauss), 9, 200) == draw_bucket(Scene(1.0, gauss), 9, 200)


def test_bad_arguments(gauss):
    with pytest.raises(ValueError):
        draw(Scene(1.0, gauss), 0, 0)
    with pytest.raises(ValueError):
        draw(Scene(1.0, gauss), -1, 10)


def test_derived_seeds():
    assert derive_seed(5, 1, 2) == derive_seed(5, 1, 2)
    seeds = {derive_seed(5, n, r) for n in (250, 500) for r in range(200)}
    assert len(seeds) == 400
    assert derive_seed(5, 1) != derive_seed(6, 1)


def test_derived_streams_uncorrelated(gauss):
    scene = Scene(1.0, gauss)
    a = draw(scene, derive_seed(1, 0), 50_000).delta_k
    b = draw(scene, derive_seed(1, 1), 50_000).delta_k
    assert abs(np.corrcoef(a, b)[0, 1]) < 4 / math.sqrt(50_000)


def test_csv_round_trip(tmp_path, gauss):
    scene = Scene(1.0, gauss, x0=0.3)
    batch = draw(scene, 7, 10)
    path = batch.to_csv(tmp_path / "b.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "delta_k,tag" and len(lines) == 11
    back = SampleBatch.from_outcomes(scene, [(float(k), t) for k, t in (l.split(",") for l in lines[1:])], seed=7)
    assert back == batch
    meta = read_json(sidecar_path(path))
    assert meta["seed"] == 7 and meta["n"] == 10 and meta["scene"]["x0"] == 0.3


def test_outcomes_view(gauss):
    batch = draw(Scene(1.0, gauss), 1, 5)
    outs = batch.outcomes
    assert [o.tag is Tag.B for o in outs] == list(batch.bunched)
    assert bucket_probability(Scene(1.0, gauss), Tag.B) > 0.5
