"""Command line entry point: ``sgm4k {depth,eval,bench,sweep}``.

Option values resolve as flag > config file > built-in default. The config
file is flat ``key = value`` text (keys are the long flag names without the
leading dashes) given by ``--config`` or the SGM4K_CONFIG environment
variable.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import logging
import math
import os
import statistics
import sys
import time
from fractions import Fraction

import numpy as np

from .aggregate import SgmParams
from .errors import FormatError, ParameterError
from .evaluate import VARIANTS, format_table, run_dataset, run_variant, variant_params
from .imageio import ensure_parent, load_pgm, save_disparity, save_disparity16

log = logging.getLogger("sgm4k")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_FORMAT = 0, 1, 2, 3

DEFAULTS = {
    "left": None, "right": None, "out": None, "raw16": None,
    "variant": None, "disp-range": "64", "p1": "7", "p2": "86", "lambda": "2",
    "paths": None, "median": "false", "lr-check": "false", "lr-threshold": "1",
    "threshold": "1.0", "dataset": None, "threads": "1", "reps": "5",
    "size": "640x480", "disp-dir": None,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def mde_per_s(width: int, height: int, disp_range: int, fps) -> Fraction:
    """Million disparity estimates per second, exact."""
    return Fraction(width * height * disp_range) * Fraction(fps) / 10**6


def read_config(path: str) -> dict:
    cfg = {}
    with open(path) as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("_", "-")
            if key not in DEFAULTS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            cfg[key] = value
    return cfg


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags, config file and defaults into one total mapping."""
    merged = dict(DEFAULTS)
    cfg_path = args.config or os.environ.get("SGM4K_CONFIG")
    if cfg_path:
        merged.update(read_config(cfg_path))
    for key in DEFAULTS:
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            merged[key] = value
    return merged


def _bool(s) -> bool:
    if isinstance(s, bool):
        return s
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {s!r}")


def _lambda(s):
    s = str(s).strip().lower()
    if s in ("inf", "infinity", "relaxed"):
        return math.inf
    return int(s)


def _list(s, conv):
    return [conv(x) for x in str(s).split(",") if x.strip()]


def make_params(cfg: dict, *, p1=None, p2=None, lam=None, paths=None) -> SgmParams:
    kwargs = dict(
        p1=int(cfg["p1"]) if p1 is None else p1,
        p2=int(cfg["p2"]) if p2 is None else p2,
        disp_range=int(cfg["disp-range"]),
        lam=_lambda(cfg["lambda"]) if lam is None else lam,
        median=_bool(cfg["median"]),
        lr_check=_bool(cfg["lr-check"]),
        lr_threshold=int(cfg["lr-threshold"]),
    )
    if paths is not None:
        kwargs["paths"] = tuple(paths)
    return SgmParams(**kwargs)


def _require(cfg, *keys):
    missing = [k for k in keys if not cfg.get(k)]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + k for k in missing))


def _set_threads(cfg) -> int:
    n = int(cfg["threads"])
    if n < 1:
        raise UsageError("--threads must be >= 1")
    return n


def cmd_depth(cfg: dict) -> int:
    _require(cfg, "left", "right", "out")
    variant = cfg["variant"] or "sgm-4ppc"
    left = load_pgm(cfg["left"])
    right = load_pgm(cfg["right"])
    params = variant_params(variant, make_params(cfg))
    if cfg["paths"]:
        params = make_params(cfg, paths=_list(cfg["paths"], int))
    t0 = time.perf_counter()
    if variant == "sgm-4ppc":
        from .fourppc import run_4ppc
        disp = run_4ppc(left, right, params)
    else:
        from .aggregate import run_sgm
        disp = run_sgm(left, right, params)
    elapsed = time.perf_counter() - t0
    scale = max(1, 255 // max(params.disp_range - 1, 1))
    ensure_parent(cfg["out"])
    save_disparity(disp, cfg["out"], scale=scale)
    if cfg["raw16"]:
        ensure_parent(cfg["raw16"])
        save_disparity16(disp, cfg["raw16"])
    print(f"{variant}: {left.width}x{left.height}, D={params.disp_range}, "
          f"paths={list(params.paths)}, {elapsed * 1e3:.1f} ms, scale={scale} -> {cfg['out']}")
    return EXIT_OK


def cmd_eval(cfg: dict) -> int:
    _require(cfg, "dataset")
    variants = _list(cfg["variant"], str) if cfg["variant"] is not None else list(VARIANTS)
    params = make_params(cfg)
    skipped: list = []
    results = run_dataset(cfg["dataset"], variants, params, threshold=float(cfg["threshold"]),
                          csv_path=cfg["out"], disp_dir=cfg["disp-dir"], skipped=skipped,
                          threads=_set_threads(cfg))
    if results:
        print(format_table(results))
    for name in skipped:
        print(f"skipped scene: {name}")
    return EXIT_OK


def _synthetic_pair(size: str, disp_range: int):
    from .synthetic import shifted_pair
    try:
        w, h = (int(v) for v in size.lower().split("x"))
    except ValueError:
        raise UsageError(f"--size must look like WIDTHxHEIGHT, got {size!r}") from None
    return shifted_pair(np.random.default_rng(0), h, w, min(disp_range - 1, 7), blur=2)


def cmd_bench(cfg: dict) -> int:
    reps = int(cfg["reps"])
    if reps < 1:
        raise UsageError("--reps must be >= 1")
    params = make_params(cfg)
    if cfg["left"] or cfg["right"]:
        _require(cfg, "left", "right")
        left, right = load_pgm(cfg["left"]).data, load_pgm(cfg["right"]).data
    else:
        left, right = _synthetic_pair(cfg["size"], params.disp_range)
    h, w = left.shape
    variants = _list(cfg["variant"], str) if cfg["variant"] else ["sgm-4ppc", "sgm4"]
    print(f"image {w}x{h}, D={params.disp_range}, reps={reps}")
    print(f"{'variant':<10}{'median ms':>11}{'min ms':>10}{'FPS':>9}{'MDE/s':>10}")
    for v in variants:
        run_variant(v, left[:8, :16], right[:8, :16], params)  # JIT warm-up
        times = []
        for _ in range(reps):
            t0 = time.perf_counter()
            run_variant(v, left, right, params)
            times.append(time.perf_counter() - t0)
        med = statistics.median(times)
        fps = Fraction(1) / Fraction(med)
        mde = mde_per_s(w, h, params.disp_range, fps)
        print(f"{v:<10}{med * 1e3:>11.1f}{min(times) * 1e3:>10.1f}{float(fps):>9.2f}{round(mde):>10d}")
    return EXIT_OK


def cmd_sweep(cfg: dict) -> int:
    _require(cfg, "dataset")
    p1s = _list(cfg["p1"], int)
    p2s = _list(cfg["p2"], int)
    lams = _list(cfg["lambda"], _lambda)
    if not (p1s and p2s and lams):
        raise UsageError("sweep grids must be non-empty")
    variants = _list(cfg["variant"], str) if cfg["variant"] else ["sgm-4ppc"]
    threads = _set_threads(cfg)
    rows = []
    pairs = []
    for p1, p2 in itertools.product(p1s, p2s):
        if p1 >= p2:
            log.warning("skipping P1=%d P2=%d: needs P1 < P2", p1, p2)
        else:
            pairs.append((p1, p2))
    for (p1, p2), lam in itertools.product(pairs, lams):
        params = make_params(cfg, p1=p1, p2=p2, lam=lam)
        t0 = time.perf_counter()
        results = run_dataset(cfg["dataset"], variants, params, threshold=float(cfg["threshold"]),
                              threads=threads)
        secs = time.perf_counter() - t0
        for res in results:
            rows.append([p1, p2, lam, res.variant, f"{res.mean_all:.4f}", f"{res.mean_noc:.4f}", f"{secs:.2f}"])
            print(f"P1={p1:<4d} P2={p2:<4d} lambda={lam!s:<4} {res.variant:<9} "
                  f"all={res.mean_all:6.2f}% noc={res.mean_noc:6.2f}%")
    if cfg["out"]:
        ensure_parent(cfg["out"])
        with open(cfg["out"], "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["p1", "p2", "lambda", "variant", "mean_all%", "mean_noc%", "seconds"])
            w.writerows(rows)
    return EXIT_OK


COMMANDS = {"depth": cmd_depth, "eval": cmd_eval, "bench": cmd_bench, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sgm4k", description="Semi-global matching with a 4-pixel-per-clock variant.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="key = value config file (fallback: $SGM4K_CONFIG)")
    parser.add_argument("--left", help="left / base image (PGM)")
    parser.add_argument("--right", help="right / reference image (PGM)")
    parser.add_argument("--out", help="output PGM (depth) or CSV (eval, sweep)")
    parser.add_argument("--raw16", help="depth: also write raw little-endian uint16 disparities")
    parser.add_argument("--variant", help=f"one of {', '.join(VARIANTS)} (comma list for eval/bench/sweep)")
    parser.add_argument("--disp-range", help="disparity range D (default 64)")
    parser.add_argument("--p1", help="small-change penalty (comma list for sweep)")
    parser.add_argument("--p2", help="large-change penalty (comma list for sweep)")
    parser.add_argument("--lambda", dest="lambda_", metavar="LAMBDA",
                        help="estimation weight, power of two or 'inf' (comma list for sweep)")
    parser.add_argument("--paths", help="depth: comma list of path directions in degrees")
    parser.add_argument("--median", nargs="?", const="true", help="3x3 median post-filter")
    parser.add_argument("--lr-check", nargs="?", const="true", help="left-right consistency check")
    parser.add_argument("--lr-threshold", help="left-right check tolerance in pixels")
    parser.add_argument("--threshold", help="bad-pixel threshold in pixels (default 1.0)")
    parser.add_argument("--dataset", help="Middlebury-style directory for eval/sweep")
    parser.add_argument("--disp-dir", help="eval: write per-scene disparity PGMs here")
    parser.add_argument("--threads", help="worker threads for dataset evaluation")
    parser.add_argument("--reps", help="bench repetitions (default 5)")
    parser.add_argument("--size", help="bench: synthetic pair size WxH when no images are given")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    args.__dict__["lambda"] = args.lambda_
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except FormatError as exc:
        print(f"sgm4k: format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (UsageError, ParameterError, ValueError) as exc:
        print(f"sgm4k: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"sgm4k: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
