"""Experiment manifests and deterministic JSON persistence.

Output bytes are a pure function of the data: keys are sorted, separators
fixed, floats written with ``repr`` (shortest round-tripping form), and
non-finite floats mapped to null.  Reading a file and writing it back
therefore reproduces it byte for byte.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .lattice import domain_to_str, parse_domain
from .loops import LoopSoupSample, RwLoop, SoupConfig

SAMPLE_FORMAT = "loopsoup-sample/1"


def _version() -> str:
    from . import __version__

    return __version__


def _plain(obj):
    """Recursively convert numpy scalars/arrays and tuples to JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    text = dumps(obj)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


@dataclass(frozen=True)
class ExperimentManifest:
    """Everything needed to regenerate an output: command, config, tool version.

    ``outputs`` holds file base names, so a rerun into another directory
    still produces identical bytes.
    """

    command: str
    config: dict
    version: str = field(default_factory=_version)
    outputs: tuple = ()

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": _plain(self.config),
            "version": self.version,
            "outputs": [os.path.basename(str(p)) for p in self.outputs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentManifest":
        return cls(d["command"], dict(d["config"]), d.get("version", _version()), tuple(d.get("outputs", ())))


def config_to_dict(config: SoupConfig) -> dict:
    return {
        "domain": domain_to_str(config.domain),
        "c": float(config.c),
        "cutoff": int(config.cutoff),
        "n_max": int(config.n_max),
        "seed": int(config.seed),
    }


def config_from_dict(d: dict) -> SoupConfig:
    return SoupConfig(parse_domain(d["domain"]), float(d["c"]), int(d["cutoff"]), int(d["n_max"]), int(d["seed"]))


def sample_to_dict(sample: LoopSoupSample) -> dict:
    return {
        "format": SAMPLE_FORMAT,
        "config": config_to_dict(sample.config),
        "tail_mass": float(sample.tail_mass),
        "loops": [loop.sites.tolist() for loop in sample.loops],
        "draws": sample.draws.tolist(),
    }


def sample_from_dict(d: dict) -> LoopSoupSample:
    if d.get("format") != SAMPLE_FORMAT:
        raise ValueError(f"not a loop-soup sample file (format={d.get('format')!r})")
    config = config_from_dict(d["config"])
    loops = [RwLoop(np.asarray(s, dtype=np.int64)) for s in d["loops"]]
    draws = np.asarray(d["draws"], dtype=np.int64).reshape(-1, 4)
    return LoopSoupSample(config, loops, draws)


def save_sample(path, sample: LoopSoupSample, manifest: ExperimentManifest | None = None) -> None:
    payload = sample_to_dict(sample)
    if manifest is not None:
        payload["manifest"] = manifest.to_dict()
    write_json(path, payload)


def load_sample(path) -> tuple[LoopSoupSample, ExperimentManifest | None]:
    d = read_json(path)
    m = d.get("manifest")
    return sample_from_dict(d), (ExperimentManifest.from_dict(m) if m else None)
