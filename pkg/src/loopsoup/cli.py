"""``loopsoup`` command line.

Every command turns its flags into a config dict, runs from that dict alone,
and embeds the dict in its output as a manifest.  ``run-from-manifest``
replays any output file.

Exit codes: 0 ok, 2 invalid configuration, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .exploration import DegenerateFit, NoSurroundingCluster, TriesExhausted, estimate_pinning_scaling, explore_chord
from .lattice import parse_domain
from .loops import BudgetExceeded, SoupConfig, sample_loop_soup
from .phase import phase_scan
from .render import RenderSpec, render_svg
from .restriction import ConditioningFailure, StripChart, hull_map, restriction_ratio_test
from .serialize import ExperimentManifest, dumps, load_sample, sample_to_dict
from .stats import InsufficientData

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET = 0, 2, 3


class ConfigError(ValueError):
    pass


def _number(text: str) -> float:
    """Float or fraction literal such as ``14/15``."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


def _numbers(text: str) -> list[float]:
    return [_number(t) for t in text.split(",") if t.strip()]


def _soup_config(cfg: dict) -> SoupConfig:
    return SoupConfig(parse_domain(cfg["domain"]), float(cfg["c"]), int(cfg["cutoff"]),
                      None if cfg.get("nmax") is None else int(cfg["nmax"]), int(cfg["seed"]))


# --- command bodies: (config dict, manifest) -> (text, extra files) -------------


def _json(payload: dict, manifest: dict) -> str:
    return dumps({**payload, "manifest": manifest})


def run_sample(cfg: dict, manifest: dict):
    return _json(sample_to_dict(sample_loop_soup(_soup_config(cfg))), manifest), {}


def run_phase_scan(cfg: dict, manifest: dict):
    rep = phase_scan(cfg["c_grid"], parse_domain(cfg["domain"]), int(cfg["cutoff"]), int(cfg["clusters"]),
                     int(cfg["seed"]), int(cfg["max_samples"]))
    extra = {cfg["csv"]: rep.csv()} if cfg.get("csv") else {}
    return _json(rep.to_dict(), manifest), extra


def run_render(cfg: dict, manifest: dict):
    spec = RenderSpec(layers=tuple(cfg["layers"]), scale=float(cfg["scale"]))
    sample, _ = load_sample(cfg["input"])
    meta = json.dumps(manifest, sort_keys=True, separators=(",", ":"))
    return render_svg(sample, spec, metadata=meta), {}


def run_explore(cfg: dict, manifest: dict):
    sample = sample_loop_soup(_soup_config(cfg))
    try:
        payload = explore_chord(sample, target=tuple(cfg["target"])).to_dict()
    except NoSurroundingCluster as exc:
        payload = {"status": "no-surrounding-cluster", "detail": str(exc)}
    return _json(payload, manifest), {}


def run_restriction_test(cfg: dict, manifest: dict):
    hulls = [hull_map(a, e) for a, e in cfg["hulls"]]
    if len(hulls) != 2:
        raise ConfigError("restriction-test needs exactly two --hull a,eps values")
    chart = StripChart.for_hulls(hulls, height=int(cfg["height"]))
    rep = restriction_ratio_test(float(cfg["lambda"]), hulls[0], hulls[1], int(cfg["replicas"]),
                                 int(cfg["seed"]), chart)
    return _json(rep.to_dict(), manifest), {}


def run_pinning_fit(cfg: dict, manifest: dict):
    rep = estimate_pinning_scaling(_soup_config(cfg), tuple(cfg["anchor"]), None, tuple(cfg["eps"]),
                                   int(cfg["replicas"]), int(cfg["seed"]))
    return _json(rep.to_dict(), manifest), {}


RUNNERS = {
    "sample": run_sample,
    "phase-scan": run_phase_scan,
    "render": run_render,
    "explore": run_explore,
    "restriction-test": run_restriction_test,
    "pinning-fit": run_pinning_fit,
}


def execute(command: str, cfg: dict, out: str, outputs=None) -> None:
    """Run ``command`` from its config and write its outputs, manifest embedded.

    ``outputs`` are the names recorded in the manifest; a replay passes the
    original names so that it reproduces the original bytes wherever it writes.
    """
    if command not in RUNNERS:
        raise ConfigError(f"unknown command {command!r}")
    if outputs is None:
        outputs = (out, cfg["csv"]) if cfg.get("csv") else (out,)
    manifest = ExperimentManifest(command, cfg, outputs=outputs).to_dict()
    text, extra = RUNNERS[command](cfg, manifest)
    _write(out, text)
    base = os.path.dirname(out)
    for name, body in extra.items():
        _write(os.path.join(base, os.path.basename(name)), body)


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def manifest_of(path: str) -> dict:
    """The manifest embedded in a JSON or SVG output file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("<"):
        from xml.etree import ElementTree

        root = ElementTree.fromstring(text)
        node = root.find("{http://www.w3.org/2000/svg}metadata")
        if node is None or not node.text:
            raise ConfigError(f"{path} has no embedded manifest")
        return json.loads(node.text)
    d = json.loads(text)
    return d.get("manifest", d)


# --- argument parsing ----------------------------------------------------------


def _soup_flags(p, c_default=1.0):
    p.add_argument("--domain", default="disk:32", help="disk:R or box:W,H")
    p.add_argument("--c", type=_number, default=c_default, help="intensity (accepts fractions, e.g. 14/15)")
    p.add_argument("--cutoff", type=int, default=4, help="smallest loop length kept (even)")
    p.add_argument("--nmax", type=int, default=None, help="largest loop length (default 2 R^2)")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="loopsoup", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a loop soup")
    _soup_flags(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("phase-scan", help="hookup fraction of boundary-touching loops across intensities")
    p.add_argument("--domain", default="disk:64")
    p.add_argument("--c", dest="c_grid", type=_numbers, default=[0.2, 0.4, 0.6, 0.8, 14 / 15, 1.0],
                   help="comma-separated intensity grid")
    p.add_argument("--cutoff", type=int, default=4)
    p.add_argument("--replicas", dest="clusters", type=int, default=500,
                   help="macroscopic clusters wanted per intensity")
    p.add_argument("--max-samples", type=int, default=5000, help="soup budget per intensity")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default=None, help="also write plot data (base name, next to --out)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("render", help="draw a sample file as SVG")
    p.add_argument("input")
    p.add_argument("--layers", default=",".join(("fillings", "boundary", "interior", "contours")))
    p.add_argument("--scale", type=float, default=4.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("explore", help="chord exploration toward a target site")
    _soup_flags(p)
    p.add_argument("--target", default="0,0")
    p.add_argument("--out", required=True)

    p = sub.add_parser("restriction-test", help="avoidance log-ratio test for two half-disk hulls")
    p.add_argument("--lambda", dest="lam", type=_number, required=True, help="excursions per arc site")
    p.add_argument("--hull", action="append", default=[], metavar="A,EPS",
                   help="half-disk hull; give twice (write --hull=-2,1 for negative centres)")
    p.add_argument("--replicas", type=int, default=10_000)
    p.add_argument("--height", type=int, default=144, help="strip height in lattice units")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("pinning-fit", help="pinning probability u(eps) and its exponent")
    _soup_flags(p)
    p.add_argument("--eps", type=_numbers, default=[1.0, 2.0, 4.0], help="comma-separated radii")
    p.add_argument("--replicas", type=int, default=500, help="soups per radius")
    p.add_argument("--anchor", default="0,0")
    p.add_argument("--out", required=True)

    p = sub.add_parser("run-from-manifest", help="regenerate an output from its embedded manifest")
    p.add_argument("manifest", help="an output file (or a bare manifest JSON)")
    p.add_argument("--out", default=None, help="default: the recorded output name next to the manifest file")
    return ap


def _pair(text: str) -> list[int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"expected x,y, got {text!r}")
    return [int(parts[0]), int(parts[1])]


def config_from_args(args) -> dict:
    cmd = args.command
    if cmd in ("sample", "explore", "pinning-fit"):
        cfg = {"domain": args.domain, "c": args.c, "cutoff": args.cutoff, "nmax": args.nmax, "seed": args.seed}
        _soup_config(cfg)  # validate early
        if cmd == "explore":
            cfg["target"] = _pair(args.target)
        if cmd == "pinning-fit":
            cfg.update(eps=args.eps, replicas=args.replicas, anchor=_pair(args.anchor))
        return cfg
    if cmd == "phase-scan":
        parse_domain(args.domain)
        return {"domain": args.domain, "c_grid": args.c_grid, "cutoff": args.cutoff, "clusters": args.clusters,
                "max_samples": args.max_samples, "seed": args.seed,
                "csv": None if args.csv is None else os.path.basename(args.csv)}
    if cmd == "render":
        return {"input": args.input, "layers": list(RenderSpec.parse(args.layers).layers), "scale": args.scale}
    if cmd == "restriction-test":
        hulls = []
        for h in args.hull:
            a, e = _numbers(h) if h.count(",") == 1 else (None, None)
            if a is None:
                raise ConfigError(f"--hull expects a,eps, got {h!r}")
            hulls.append([a, e])
        return {"lambda": args.lam, "hulls": hulls, "replicas": args.replicas, "height": args.height,
                "seed": args.seed}
    raise ConfigError(f"unknown command {cmd!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run-from-manifest":
            m = manifest_of(args.manifest)
            out = args.out or os.path.join(os.path.dirname(args.manifest), m["outputs"][0])
            execute(m["command"], m["config"], out, m["outputs"])
        else:
            execute(args.command, config_from_args(args), args.out)
    except (BudgetExceeded, ConditioningFailure, TriesExhausted, DegenerateFit, InsufficientData) as exc:
        print(f"loopsoup: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, FileNotFoundError, KeyError) as exc:
        # ConfigError, InvalidConfig, InvalidSize, UnknownLayer and the hull errors are ValueErrors
        print(f"loopsoup: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
