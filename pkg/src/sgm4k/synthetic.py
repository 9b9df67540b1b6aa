"""Synthetic rectified pairs with exact ground truth, for tests and demos."""
from __future__ import annotations

import os

import numpy as np

from .imageio import FloatImage, GrayImage, save_pfm, save_pgm


def texture(rng: np.random.Generator, h: int, w: int, blur: int = 1) -> np.ndarray:
    """Random uint8 texture; ``blur`` > 1 box-filters it horizontally and vertically."""
    t = rng.integers(0, 256, size=(h, w)).astype(np.float64)
    if blur > 1:
        k = np.ones(blur) / blur
        t = np.apply_along_axis(lambda r: np.convolve(r, k, mode="same"), 1, t)
        t = np.apply_along_axis(lambda c: np.convolve(c, k, mode="same"), 0, t)
        t = (t - t.min()) / max(t.max() - t.min(), 1e-9) * 255
    return np.clip(np.rint(t), 0, 255).astype(np.uint8)


def shifted_pair(rng: np.random.Generator, h: int, w: int, shift: int, blur: int = 1):
    """Frontal plane: right(x - shift) == left(x) everywhere it is defined."""
    tex = texture(rng, h, w + shift, blur)
    return tex[:, :w].copy(), tex[:, shift:shift + w].copy()


def layered_scene(rng: np.random.Generator, h: int, w: int, d_bg: int, d_fg: int, blur: int = 2):
    """Background plane plus one rectangle in front of it.

    Returns (left, right, gt_left, gt_right) with float ground truth; right
    pixels seen by no left pixel get ``inf``.
    """
    bg = texture(rng, h, w, blur)
    fg = texture(rng, h, w, blur)
    y0, y1 = sorted(rng.integers(h // 8, h - h // 8, size=2))
    x0, x1 = sorted(rng.integers(w // 4, w - w // 8, size=2))
    y1, x1 = max(y1, y0 + 4), max(x1, x0 + 4)
    in_fg = np.zeros((h, w), dtype=bool)
    in_fg[y0:y1, x0:x1] = True

    left = np.where(in_fg, fg, bg)
    gt_left = np.where(in_fg, d_fg, d_bg).astype(np.float32)

    right = texture(rng, h, w, blur)
    gt_right = np.full((h, w), np.inf, dtype=np.float32)
    zbuf = np.full((h, w), -1)
    xs = np.arange(w)
    everywhere = np.ones(w, dtype=bool)
    for y in range(h):
        # background is painted in full: parts hidden in the left view may show in the right one
        for layer_d, src, sel in ((d_bg, bg, everywhere), (d_fg, fg, in_fg[y])):
            xr = xs - layer_d
            ok = sel & (xr >= 0) & (layer_d > zbuf[y, np.clip(xr, 0, w - 1)])
            right[y, xr[ok]] = src[y, ok]
            gt_right[y, xr[ok]] = layer_d
            zbuf[y, xr[ok]] = layer_d
    return left, right, gt_left, gt_right


def write_dataset(root: str, n_scenes: int, h: int = 96, w: int = 128, disp_range: int = 32,
                  seed: int = 0) -> list[str]:
    """Write ``n_scenes`` layered scenes in the layout ``evaluate`` reads."""
    rng = np.random.default_rng(seed)
    names = []
    for i in range(n_scenes):
        d_bg = int(rng.integers(2, disp_range // 2))
        d_fg = int(rng.integers(d_bg + 2, disp_range - 1))
        left, right, gl, gr = layered_scene(rng, h, w, d_bg, d_fg)
        name = f"synth{i:02d}"
        d = os.path.join(root, name)
        os.makedirs(d, exist_ok=True)
        save_pgm(GrayImage(left), os.path.join(d, "im0.pgm"))
        save_pgm(GrayImage(right), os.path.join(d, "im1.pgm"))
        save_pfm(FloatImage(gl), os.path.join(d, "disp0.pfm"))
        save_pfm(FloatImage(gr), os.path.join(d, "disp1.pfm"))
        names.append(name)
    return names
