"""Command-line entry point: ``vosedge {detect,compare,synth,eval}``.

Every flag can also be given in a ``key = value`` config file passed with
``--config``; keys are the flag names without the leading dashes (dashes or
underscores both work). Command-line flags win over the file.
"""
from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import __version__  # noqa: F401
from ._parallel import resolve_workers
from .baselines import BaselineKind, CannyParams, run_baseline
from .errors import VosEdgeError
from .evaluate import (
    DEFAULT_M,
    Detector,
    Orientation,
    Profile,
    SyntheticSpec,
    compare_detectors,
    default_detectors,
    format_report,
    generate_synthetic,
    pfom,
    to_csv,
    to_json,
)
from .image import BorderPolicy, load_edge_map, load_image, save_image, to_grayscale
from .vos import VosParams, detect_edges

ALGORITHMS = ["vos"] + [k.value for k in BaselineKind]

EXIT_OK, EXIT_USER, EXIT_INTERNAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USER, f"{self.prog}: error: {message}\n")


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _workers(text):
    try:
        return resolve_workers(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _color(text):
    parts = str(text).replace(" ", "").split(",")
    try:
        values = tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected R,G,B, got {text!r}") from None
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"expected R,G,B, got {text!r}")
    return values


@dataclass
class RunConfig:
    detector: str = "vos"
    vos_params: VosParams = field(default_factory=VosParams)
    canny: CannyParams = field(default_factory=CannyParams)
    baseline_threshold: float = 0.2
    border: BorderPolicy = BorderPolicy.REPLICATE
    worker_count: int = 1
    input: Optional[str] = None
    output: Optional[str] = None


def _add_detector_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threshold", type=float, default=0.2,
                   help="edge threshold as a fraction of the maximum response (default 0.2)")
    p.add_argument("--border", choices=[b.value for b in BorderPolicy], default="replicate")
    p.add_argument("--strict-nms", type=_bool, default=True, metavar="{true|false}")
    p.add_argument("--zero-mean-masks", type=_bool, nargs="?", const=True, default=False,
                   metavar="{true|false}")
    p.add_argument("--sigma", type=float, default=1.0, help="Canny Gaussian sigma")
    p.add_argument("--low", type=float, default=0.10, help="Canny low ratio")
    p.add_argument("--high", type=float, default=0.25, help="Canny high ratio")
    p.add_argument("--workers", type=_workers, default=1, help="worker threads or 'auto'")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vosedge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("detect", help="write an edge map for one detector")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--algo", choices=ALGORITHMS, default="vos")
    _add_detector_flags(p)
    p.add_argument("--config")

    p = sub.add_parser("compare", help="score all detectors against a ground-truth map")
    p.add_argument("input")
    p.add_argument("truth")
    p.add_argument("--csv")
    p.add_argument("--json")
    p.add_argument("--include-oracle", type=_bool, nargs="?", const=True, default=False,
                   metavar="{true|false}", help="add a row that returns the truth itself")
    p.add_argument("--baseline-threshold", type=float, default=0.2,
                   help="threshold for sobel/prewitt/roberts/laplacian")
    p.add_argument("--m", type=float, default=DEFAULT_M, help="PFOM scaling constant")
    _add_detector_flags(p)
    p.add_argument("--config")

    p = sub.add_parser("synth", help="generate a synthetic image and its ground truth")
    p.add_argument("-o", "--output", required=True, help="image path")
    p.add_argument("--truth", help="truth path (default: <output stem>_truth<ext>)")
    p.add_argument("--profile", choices=[v.value for v in Profile], default="step")
    p.add_argument("--orientation", choices=[v.value for v in Orientation], default="vertical")
    p.add_argument("--size", type=int, default=64, help="square image side")
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--transition", type=int, default=1)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--color-a", type=_color, default="0,0,0")
    p.add_argument("--color-b", type=_color, default="255,255,255")
    p.add_argument("--config")

    p = sub.add_parser("eval", help="PFOM of a detected edge map against a truth map")
    p.add_argument("detected")
    p.add_argument("truth")
    p.add_argument("--m", type=float, default=DEFAULT_M)
    p.add_argument("--json", type=_bool, nargs="?", const=True, default=False, metavar="{true|false}")
    p.add_argument("--config")
    return parser


def read_config(path: str) -> dict[str, str]:
    cp = configparser.ConfigParser(interpolation=None)
    with open(path) as fh:
        cp.read_string("[run]\n" + fh.read())
    return {k.replace("-", "_"): v for k, v in cp["run"].items()}


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        values = read_config(args.config)
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = sorted(set(values) - known)
        if unknown:
            parser.error(f"unknown config keys: {', '.join(unknown)}")
        subparser.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def run_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(border=BorderPolicy.parse(getattr(args, "border", "replicate")),
                    worker_count=getattr(args, "workers", 1))
    if hasattr(args, "threshold"):
        cfg.vos_params = VosParams(args.threshold, cfg.border, args.strict_nms, args.zero_mean_masks)
        cfg.canny = CannyParams(args.sigma, args.low, args.high)
        cfg.baseline_threshold = getattr(args, "baseline_threshold", args.threshold)
    cfg.detector = getattr(args, "algo", "vos")
    cfg.input = getattr(args, "input", None)
    cfg.output = getattr(args, "output", None)
    return cfg


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_detect(args) -> int:
    cfg = run_config(args)
    img = load_image(cfg.input)
    if cfg.detector == "vos":
        edges = detect_edges(img, cfg.vos_params, cfg.worker_count)
    else:
        edges = run_baseline(to_grayscale(img), BaselineKind(cfg.detector), args.threshold,
                             cfg.canny, cfg.border, cfg.worker_count)
    save_image(edges, cfg.output)
    print(edges.count)
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = run_config(args)
    img = load_image(args.input)
    truth = load_edge_map(args.truth)
    detectors = default_detectors(cfg.vos_params, cfg.baseline_threshold, cfg.canny,
                                  cfg.border, cfg.worker_count)
    if args.include_oracle:
        detectors.insert(0, Detector("oracle", lambda _img: truth))
    rows = compare_detectors(img, truth, detectors, args.m)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(to_csv(rows))
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(to_json(rows) + "\n")
    print(format_report(rows))
    return EXIT_OK


def cmd_synth(args) -> int:
    width = args.width or args.size
    height = args.height or args.size
    spec = SyntheticSpec(
        profile=Profile(args.profile),
        orientation=Orientation(args.orientation),
        width=width,
        height=height,
        color_a=args.color_a,
        color_b=args.color_b,
        transition_width=args.transition,
        noise_sigma=args.noise,
        seed=args.seed,
    )
    image, truth = generate_synthetic(spec)
    truth_path = args.truth
    if truth_path is None:
        stem, ext = os.path.splitext(args.output)
        truth_path = f"{stem}_truth{ext or '.png'}"
    save_image(image, args.output)
    save_image(truth, truth_path)
    print(f"{args.output} {truth_path} edges={truth.count}")
    return EXIT_OK


def cmd_eval(args) -> int:
    detected = load_edge_map(args.detected)
    truth = load_edge_map(args.truth)
    res = pfom(detected, truth, args.m)
    if args.json:
        print(json.dumps({"pfom": res.score, "n_actual": res.n_actual,
                          "n_detected": res.n_detected, "m": res.m}))
    else:
        print(f"R={res.score!r} N_I={res.n_actual} N_A={res.n_detected}")
    return EXIT_OK


COMMANDS = {"detect": cmd_detect, "compare": cmd_compare, "synth": cmd_synth, "eval": cmd_eval}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (OSError, configparser.Error) as exc:
        print(f"vosedge: error: {exc}", file=sys.stderr)
        return EXIT_USER
    try:
        return COMMANDS[args.command](args)
    except (VosEdgeError, OSError, ValueError) as exc:
        print(f"vosedge: error: {exc}", file=sys.stderr)
        return EXIT_USER
    except Exception as exc:  # noqa: BLE001 - last-resort exit code contract
        print(f"vosedge: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
