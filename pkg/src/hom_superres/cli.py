"""Command-line entry point: ``hom-superres {beats,sample,fisher,study}``.

Every subcommand writes data files only (CSV or JSON).  CSV outputs get a
``<name>.csv.json`` sidecar holding the package version, the seed and the
full run configuration; JSON outputs embed the same block.  A sidecar can be
passed back through ``--config`` to repeat a run.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from .estimator import run_study
from .fisher import crb, fisher_bucket, fisher_matrix
from .interference import Scene, Tag, aligned_density
from .sampler import draw, draw_bucket
from .serialize import metadata, read_json, sidecar_path, write_csv, write_json
from .wavepacket import GaussianWavepacket, TabulatedWavepacket

COMMANDS = ("beats", "sample", "fisher", "study")


@dataclass(frozen=True)
class RunConfig:
    sigma_k: float = 1.0
    wavepacket: str | None = None
    delta_x: float | None = None
    centroid: float = 0.0
    x0: float | None = None
    mode: str = "resolved"
    n: int = 1000
    n_list: tuple[int, ...] = (250, 500, 1000, 2000, 4000)
    reps: int = 1000
    seed: int = 0
    out: str | None = None
    points: int = 801
    dx_min: float = 0.0
    dx_max: float | None = None
    dx_steps: int = 51

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(v) for v in self.n_list))
        if self.mode not in ("resolved", "bucket"):
            raise ValueError(f"mode must be 'resolved' or 'bucket', got {self.mode!r}")
        for name in ("n", "reps", "points", "dx_steps"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if any(v < 1 for v in self.n_list):
            raise ValueError("n_list entries must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.mode == "bucket" and self.x0 is not None and self.x0 != self.centroid:
            raise ValueError("bucket mode requires x0 == centroid")
        if self.wavepacket is not None and not Path(self.wavepacket).is_file():
            raise ValueError(f"wavepacket file not found: {self.wavepacket}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_list"] = list(self.n_list)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})

    def wavepacket_spec(self):
        if self.wavepacket is not None:
            return TabulatedWavepacket.from_csv(self.wavepacket)
        return GaussianWavepacket(self.sigma_k)

    def scene(self, delta_x: float | None = None) -> Scene:
        wp = self.wavepacket_spec()
        if delta_x is None:
            delta_x = self.delta_x if self.delta_x is not None else 2.0 * wp.sigma_x
        return Scene(delta_x, wp, centroid=self.centroid, x0=self.x0)


def _out(config: RunConfig, default: str) -> Path:
    return Path(config.out if config.out is not None else default)


def _meta(command: str, config: RunConfig) -> dict:
    return metadata(command=command, seed=config.seed, config=config.to_dict())


def cmd_beats(config: RunConfig) -> Path:
    """Bunching / antibunching densities on a uniform dK grid."""
    scene = config.scene()
    b = scene.envelope.support_halfwidth
    dk = np.linspace(-b, b, config.points)
    p_b = aligned_density(scene, dk, Tag.B)
    p_a = aligned_density(scene, dk, Tag.A)
    path = write_csv(
        _out(config, "beats.csv"),
        ["delta_k", "p_bunch", "p_antibunch", "envelope"],
        zip(dk, p_b, p_a, scene.envelope(dk)),
    )
    write_json(sidecar_path(path), _meta("beats", config))
    return path


def cmd_sample(config: RunConfig) -> Path:
    scene = config.scene()
    path = _out(config, "sample.csv")
    if config.mode == "bucket":
        tags = draw_bucket(scene, config.seed, config.n)
        write_csv(path, ["tag"], ((t.value,) for t in tags))
        write_json(sidecar_path(path), _meta("sample", config))
        return path
    batch = draw(scene, config.seed, config.n)
    batch.to_csv(path, command="sample", config=config.to_dict())
    return path


def cmd_fisher(config: RunConfig) -> Path:
    """Resolved and bucket information plus the CRB across a separation sweep."""
    wp = config.wavepacket_spec()
    dx_max = config.dx_max if config.dx_max is not None else 10.0 * wp.sigma_x
    rows = []
    for dx in np.linspace(config.dx_min, dx_max, config.dx_steps):
        scene = Scene(float(dx), wp, centroid=config.centroid, x0=config.x0)
        fm = fisher_matrix(scene)
        bucket = fisher_bucket(scene) if scene.aligned else float("nan")
        rows.append((float(dx), fm.f11, fm.f12, fm.f22, bucket, crb(max(fm.f11, 0.0), config.n)))
    path = write_csv(
        _out(config, "fisher.csv"),
        ["delta_x", "fisher", "f12", "f22", "fisher_bucket", "crb"],
        rows,
    )
    write_json(sidecar_path(path), _meta("fisher", config))
    return path


def cmd_study(config: RunConfig, workers: int = 1) -> Path:
    """Monte-Carlo MLE study; defaults to separations of 0.5 and 2 sigma_x."""
    wp = config.wavepacket_spec()
    separations = [config.delta_x] if config.delta_x is not None else [0.5 * wp.sigma_x, 2.0 * wp.sigma_x]
    reports = [
        run_study(
            Scene(dx, wp, centroid=config.centroid, x0=config.x0),
            config.n_list,
            config.reps,
            config.seed,
            workers=workers,
        )
        for dx in separations
    ]
    path = _out(config, "study.json")
    if path.suffix == ".csv":
        rows = [(r.scene.delta_x, *row) for r in reports for row in r.csv_rows()]
        write_csv(path, ["delta_x", "n", "reps", "var_ratio", "mean_ratio"], rows)
        write_json(sidecar_path(path), _meta("study", config))
    else:
        write_json(path, {**_meta("study", config), "reports": [r.to_dict() for r in reports]})
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hom-superres", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON RunConfig or an output sidecar; flags override it")
        p.add_argument("--sigma-k", type=float)
        p.add_argument("--wavepacket", help="two-column CSV (k, amplitude_sq) with header")
        p.add_argument("--delta-x", type=float)
        p.add_argument("--centroid", type=float)
        p.add_argument("--x0", type=float)
        p.add_argument("--mode", choices=("resolved", "bucket"))
        p.add_argument("--n", type=int)
        p.add_argument("--reps", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out")
        p.add_argument("--points", type=int, help="beats: grid size")
        p.add_argument("--dx-min", type=float, help="fisher: sweep start")
        p.add_argument("--dx-max", type=float, help="fisher: sweep end (default 10 sigma_x)")
        p.add_argument("--dx-steps", type=int, help="fisher: sweep size")
        p.add_argument("--n-list", type=int, nargs="+", help="study: sample sizes")
        if name == "study":
            p.add_argument("--workers", type=int, default=1, help="does not affect results")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    base = RunConfig()
    if args.config:
        data = read_json(args.config)
        base = RunConfig.from_dict(data.get("config", data))
    overrides = {
        f.name: getattr(args, f.name)
        for f in fields(RunConfig)
        if getattr(args, f.name, None) is not None
    }
    return replace(base, **overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        if args.command == "study":
            path = cmd_study(config, workers=args.workers)
        else:
            path = {"beats": cmd_beats, "sample": cmd_sample, "fisher": cmd_fisher}[args.command](config)
    except Exception as exc:  # noqa: BLE001 - reported as exit status
        print(f"hom-superres {args.command}: error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
