"""CSV / JSON helpers shared by the sampler, the estimator and the CLI.

CSV files are comma separated with a header row and LF line endings; floats
are written with ``repr`` so they round-trip exactly.  JSON is UTF-8 with
sorted keys.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from . import __version__
from .interference import Scene
from .wavepacket import GaussianWavepacket, TabulatedWavepacket, WavepacketSpec


def wavepacket_to_dict(wp: WavepacketSpec) -> dict:
    if isinstance(wp, GaussianWavepacket):
        return {"kind": "gaussian", "sigma_k": float(wp.sigma_k)}
    if wp.source is not None:
        return {"kind": "tabulated", "source": wp.source}
    return {
        "kind": "tabulated",
        "grid": [float(v) for v in wp.grid],
        "amplitude_sq": [float(v) for v in wp.amplitude_sq],
    }


def wavepacket_from_dict(data: dict) -> WavepacketSpec:
    kind = data.get("kind")
    if kind == "gaussian":
        return GaussianWavepacket(float(data["sigma_k"]))
    if kind == "tabulated":
        if "source" in data:
            return TabulatedWavepacket.from_csv(data["source"])
        return TabulatedWavepacket(np.array(data["grid"]), np.array(data["amplitude_sq"]))
    raise ValueError(f"unknown wavepacket kind {kind!r}")


def scene_to_dict(scene: Scene) -> dict:
    return {
        "delta_x": float(scene.delta_x),
        "centroid": float(scene.centroid),
        "x0": float(scene.x0),
        "wavepacket": wavepacket_to_dict(scene.wavepacket),
    }


def scene_from_dict(data: dict) -> Scene:
    return Scene(
        float(data["delta_x"]),
        wavepacket_from_dict(data["wavepacket"]),
        centroid=float(data["centroid"]),
        x0=float(data["x0"]),
    )


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value) + 0.0)  # no '-0.0'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def write_json(path, payload) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")
    return path


def read_json(path):
    with Path(path).open(encoding="utf-8") as fh:
        return json.load(fh)


def sidecar_path(path) -> Path:
    """Metadata file stored next to a CSV: ``out.csv`` -> ``out.csv.json``."""
    path = Path(path)
    return path.with_name(path.name + ".json")


def metadata(**fields) -> dict:
    return {"package": "hom_superres", "version": __version__, **fields}
