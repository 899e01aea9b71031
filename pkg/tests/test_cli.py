import csv
import math
import subprocess
import sys

import numpy as np
import pytest

from hom_superres.cli import RunConfig, main
from hom_superres.serialize import read_json, sidecar_path


def run(*argv):
    assert main([str(a) for a in argv]) == 0


def table(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {k: np.array([float(r[k]) for r in rows]) for k in rows[0]}


def test_beats_nodes(tmp_path):
    out = tmp_path / "beats.csv"
    run("beats", "--delta-x", 4, "--points", 2001, "--out", out)
    t = table(out)
    dk, pb = t["delta_k"], t["p_bunch"]
    interior = (pb[1:-1] < pb[:-2]) & (pb[1:-1] < pb[2:])
    minima = dk[1:-1][interior]
    nodes = (2 * np.round((minima - math.pi / 2) / math.pi) + 1) * math.pi / 2
    assert minima.size >= 4
    assert np.max(np.abs(minima - nodes)) <= dk[1] - dk[0]
    np.testing.assert_allclose(t["p_bunch"] + t["p_antibunch"], t["envelope"], atol=1e-12)
    assert out.read_bytes().count(b"\r") == 0


def test_beats_overlapping_sources(tmp_path):
    out = tmp_path / "b.csv"
    run("beats", "--delta-x", 0, "--out", out)
    t = table(out)
    assert np.all(t["p_antibunch"] == 0) and t["delta_k"].size == 801


def test_beats_misaligned_fails(tmp_path, capsys):
    assert main(["beats", "--x0", "0.3", "--out", str(tmp_path / "x.csv")]) == 1
    assert "error" in capsys.readouterr().err


def test_sample_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        run("sample", "--n", 10, "--seed", 7, "--out", out)
    assert a.read_bytes() == b.read_bytes()
    meta_a, meta_b = read_json(sidecar_path(a)), read_json(sidecar_path(b))
    meta_a["config"].pop("out"), meta_b["config"].pop("out")
    assert meta_a == meta_b


def test_sample_bucket_single_column(tmp_path):
    out = tmp_path / "t.csv"
    run("sample", "--mode", "bucket", "--n", 20, "--delta-x", 1.0, "--out", out)
    lines = out.read_text().splitlines()
    assert lines[0] == "tag" and len(lines) == 21
    assert set(lines[1:]) <= {"A", "B"}


def test_metadata_round_trip(tmp_path):
    out = tmp_path / "s.csv"
    run("sample", "--n", 10, "--seed", 7, "--delta-x", 1.5, "--x0", 0.2, "--out", out)
    meta = read_json(sidecar_path(out))
    config = RunConfig.from_dict(meta["config"])
    assert config == RunConfig(n=10, seed=7, delta_x=1.5, x0=0.2, out=str(out))
    assert meta["seed"] == 7 and "version" in meta
    # the sidecar is enough to repeat the run
    again = tmp_path / "again.csv"
    run("sample", "--config", sidecar_path(out), "--out", again)
    assert again.read_bytes() == out.read_bytes()


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(mode="bucket", x0=0.5)
    with pytest.raises(ValueError):
        RunConfig(n=0)
    with pytest.raises(ValueError):
        RunConfig(wavepacket="/nonexistent.csv")


def test_fisher_sweep(tmp_path):
    out = tmp_path / "f.csv"
    run("fisher", "--dx-min", 0.001, "--dx-max", 5, "--dx-steps", 21, "--n", 2000, "--out", out)
    t = table(out)
    np.testing.assert_allclose(t["fisher"], 0.5, rtol=1e-8)
    np.testing.assert_allclose(t["crb"], 1 / (2000 * t["fisher"]), rtol=1e-14)
    assert t["fisher_bucket"][0] == pytest.approx(0.5, rel=1e-3)
    assert np.all(np.diff(t["fisher_bucket"]) < 0)


def test_fisher_tabulated(tmp_path, tab_gauss):
    wp = tmp_path / "wp.csv"
    wp.write_text("k,amplitude_sq\n" + "".join(f"{float(k)!r},{float(a)!r}\n" for k, a in zip(tab_gauss.grid, tab_gauss.amplitude_sq)))
    out = tmp_path / "f.csv"
    run("fisher", "--wavepacket", wp, "--dx-steps", 5, "--out", out)
    np.testing.assert_allclose(table(out)["fisher"], tab_gauss.sigma_k**2 / 2, rtol=1e-8)


def test_study_repeatable(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("study", "--n-list", 50, 100, "--reps", 10, "--seed", 3, "--out", a)
    run("study", "--n-list", 50, 100, "--reps", 10, "--seed", 3, "--workers", 2, "--out", b)
    assert a.read_text().replace(str(a), "") == b.read_text().replace(str(b), "")
    data = read_json(a)
    assert [r["scene"]["delta_x"] for r in data["reports"]] == [0.25, 1.0]


def test_study_csv(tmp_path):
    out = tmp_path / "s.csv"
    run("study", "--delta-x", 1.0, "--n-list", 30, "--reps", 4, "--out", out)
    assert out.read_text().splitlines()[0] == "delta_x,n,reps,var_ratio,mean_ratio"
    assert sidecar_path(out).exists()


def test_module_entry_point(tmp_path):
    out = tmp_path / "b.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "hom_superres", "beats", "--points", "11", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and out.exists()
