"""Bad-pixel evaluation over a Middlebury-2014-style directory.

Expected layout (after ``scripts/convert_middlebury.py``)::

    root/
      Adirondack/
        im0.pgm  im1.pgm        left / right, 8-bit gray
        disp0.pfm               left ground truth (inf = unknown)
        disp1.pfm               right ground truth, optional
        mask0nocc.pgm           optional, 255 = non-occluded
      ...

Ground truth may be at a higher resolution than the images; it is then
decimated to the image size and its values rescaled by the width ratio.
"""
from __future__ import annotations

import csv
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .aggregate import PATHS_3, PATHS_4, PATHS_8, SgmParams, run_sgm
from .errors import ParameterError
from .fourppc import run_4ppc
from .imageio import INVALID, as_array, ensure_parent, load_pfm, load_pgm, save_disparity

log = logging.getLogger(__name__)

VARIANTS = ("local-ct", "sgm3", "sgm4", "sgm8", "sgm-4ppc")


@dataclass
class EvalResult:
    variant: str
    scenes: list = field(default_factory=list)
    all_rates: list = field(default_factory=list)
    noc_rates: list = field(default_factory=list)

    @property
    def mean_all(self) -> float:
        return float(np.mean(self.all_rates)) if self.all_rates else float("nan")

    @property
    def mean_noc(self) -> float:
        return float(np.mean(self.noc_rates)) if self.noc_rates else float("nan")


def bad_pixel_rate(disp, gt, mask=None, threshold: float = 1.0) -> float:
    """Percentage of bad pixels among those with finite ground truth.

    A pixel is bad if its disparity is INVALID or differs from the ground
    truth by more than ``threshold``. With ``mask``, only pixels where the
    mask is true are counted.
    """
    disp = np.asarray(disp)
    gt = np.asarray(as_array(gt), dtype=np.float64)
    if disp.shape != gt.shape:
        raise ParameterError(f"shape mismatch: {disp.shape} vs {gt.shape}")
    if threshold <= 0:
        raise ParameterError(f"threshold must be positive, got {threshold}")
    counted = np.isfinite(gt)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != gt.shape:
            raise ParameterError(f"mask shape {mask.shape} != {gt.shape}")
        counted &= mask
    n = int(counted.sum())
    if n == 0:
        raise ParameterError("no pixel with finite ground truth to evaluate (empty denominator)")
    gt_safe = np.where(counted, gt, 0.0)
    bad = (disp == INVALID) | (np.abs(disp - gt_safe) > threshold)
    return 100.0 * int((bad & counted).sum()) / n


def noc_mask(gt_left, gt_right, threshold: float = 1.0) -> np.ndarray:
    """Non-occlusion mask derived from left/right ground truth consistency."""
    gl = np.asarray(as_array(gt_left), dtype=np.float64)
    gr = np.asarray(as_array(gt_right), dtype=np.float64)
    if gl.shape != gr.shape:
        raise ParameterError(f"shape mismatch: {gl.shape} vs {gr.shape}")
    h, w = gl.shape
    finite = np.isfinite(gl)
    xr = np.full((h, w), -1, dtype=np.int64)
    xr[finite] = np.rint(np.broadcast_to(np.arange(w), (h, w))[finite] - gl[finite]).astype(np.int64)
    inside = finite & (xr >= 0) & (xr < w)
    rows = np.broadcast_to(np.arange(h)[:, None], (h, w))
    other = np.full((h, w), np.nan)
    other[inside] = gr[rows[inside], xr[inside]]
    with np.errstate(invalid="ignore"):
        return inside & np.isfinite(other) & (np.abs(other - gl) <= threshold)


def resample_gt(gt: np.ndarray, shape) -> np.ndarray:
    """Nearest-sample decimation to ``shape``; disparities scale with width."""
    gt = np.asarray(gt, dtype=np.float32)
    h, w = shape
    if gt.shape == (h, w):
        return gt
    ys = (np.arange(h) * gt.shape[0]) // h
    xs = (np.arange(w) * gt.shape[1]) // w
    return gt[np.ix_(ys, xs)] * np.float32(w / gt.shape[1])


def resample_mask(mask: np.ndarray, shape) -> np.ndarray:
    h, w = shape
    if mask.shape == (h, w):
        return mask
    ys = (np.arange(h) * mask.shape[0]) // h
    xs = (np.arange(w) * mask.shape[1]) // w
    return mask[np.ix_(ys, xs)]


def variant_params(variant: str, base: SgmParams) -> SgmParams:
    paths = {"local-ct": (), "sgm3": PATHS_3, "sgm4": PATHS_4, "sgm8": PATHS_8, "sgm-4ppc": PATHS_4}
    if variant not in paths:
        raise ParameterError(f"unknown variant {variant!r}; choose from {VARIANTS}")
    return SgmParams(p1=base.p1, p2=base.p2, disp_range=base.disp_range, paths=paths[variant],
                     lam=base.lam, median=base.median, lr_check=base.lr_check,
                     lr_threshold=base.lr_threshold)


def run_variant(variant: str, left, right, base: SgmParams) -> np.ndarray:
    params = variant_params(variant, base)
    fn: Callable = run_4ppc if variant == "sgm-4ppc" else run_sgm
    return fn(left, right, params)


@dataclass
class Scene:
    name: str
    left: np.ndarray
    right: np.ndarray
    gt: np.ndarray
    noc: np.ndarray


def load_scene(path: str, gt_threshold: float = 1.0) -> Scene:
    name = os.path.basename(os.path.normpath(path))
    left = load_pgm(os.path.join(path, "im0.pgm")).data
    right = load_pgm(os.path.join(path, "im1.pgm")).data
    gt_full = load_pfm(os.path.join(path, "disp0.pfm")).data
    mask_path = os.path.join(path, "mask0nocc.pgm")
    if os.path.exists(mask_path):
        noc = load_pgm(mask_path).data == 255
    else:
        gt_right = load_pfm(os.path.join(path, "disp1.pfm")).data
        noc = noc_mask(gt_full, gt_right, gt_threshold)
    return Scene(name, left, right, resample_gt(gt_full, left.shape), resample_mask(noc, left.shape))


def list_scenes(root: str) -> list[str]:
    if not os.path.isdir(root):
        raise FileNotFoundError(f"dataset directory not found: {root}")
    return sorted(d for d in os.listdir(root) if os.path.isdir(os.path.join(root, d)))


def run_dataset(root: str, variants: Sequence[str], params: SgmParams, threshold: float = 1.0,
                csv_path: str | None = None, disp_dir: str | None = None,
                skipped: list | None = None, threads: int = 1) -> list[EvalResult]:
    """Evaluate each variant on each scene under ``root``.

    Scenes with missing files are skipped with a warning (their names are
    appended to ``skipped`` if given). Returns one EvalResult per variant in
    the order requested; scene order is sorted by name whatever ``threads``.
    """
    for v in variants:
        variant_params(v, params)
    results = [EvalResult(v) for v in variants]
    if variants:
        names = list_scenes(root)

        def one(name):
            try:
                scene = load_scene(os.path.join(root, name), threshold)
            except (OSError, ValueError) as exc:
                log.warning("skipping scene %s: %s", name, exc)
                return None
            rows = []
            for v in variants:
                disp = run_variant(v, scene.left, scene.right, params)
                rows.append((bad_pixel_rate(disp, scene.gt, None, threshold),
                             bad_pixel_rate(disp, scene.gt, scene.noc, threshold), disp))
            return rows

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                outcomes = list(pool.map(one, names))
        else:
            outcomes = [one(n) for n in names]

        for name, rows in zip(names, outcomes):
            if rows is None:
                if skipped is not None:
                    skipped.append(name)
                continue
            for res, (a, n, disp) in zip(results, rows):
                res.scenes.append(name)
                res.all_rates.append(a)
                res.noc_rates.append(n)
                if disp_dir:
                    out = os.path.join(disp_dir, res.variant, f"{name}.pgm")
                    ensure_parent(out)
                    save_disparity(disp, out, scale=max(1, 255 // max(params.disp_range - 1, 1)))
    if csv_path:
        write_csv(results, csv_path)
    return results


def write_csv(results: Sequence[EvalResult], path: str) -> None:
    ensure_parent(path)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["variant", "scene", "all%", "noc%"])
        for res in results:
            for scene, a, n in zip(res.scenes, res.all_rates, res.noc_rates):
                w.writerow([res.variant, scene, f"{a:.4f}", f"{n:.4f}"])
            if res.scenes:
                w.writerow([res.variant, "mean", f"{res.mean_all:.4f}", f"{res.mean_noc:.4f}"])


def format_table(results: Sequence[EvalResult]) -> str:
    lines = [f"{'':<12}{'all':>10}{'noc':>10}"]
    for res in results:
        lines.append(f"{res.variant:<12}{res.mean_all:>9.2f}%{res.mean_noc:>9.2f}%")
    return "\n".join(lines)
