"""Convert a Middlebury 2014 / MiddEval3 scene tree into the PGM/PFM layout
read by ``sgm4k eval``.

    python scripts/convert_middlebury.py SRC DST [--reduce 4]

SRC holds one directory per scene with im0.png, im1.png and disp0.pfm (or
disp0GT.pfm), optionally disp1.pfm and mask0nocc.png. Images are reduced by
box averaging; ground truth is copied at full resolution and rescaled at
evaluation time.
"""
import argparse
import os
import shutil

import numpy as np
from PIL import Image

from sgm4k.imageio import GrayImage, save_pgm


def to_gray(path, reduce):
    img = Image.open(path).convert("RGB")
    if reduce > 1:
        img = img.reduce(reduce)
    rgb = np.asarray(img, dtype=np.uint32)
    # same integer luma as the P6 loader
    return ((77 * rgb[..., 0] + 150 * rgb[..., 1] + 29 * rgb[..., 2]) >> 8).astype(np.uint8)


def convert_scene(src, dst, reduce):
    os.makedirs(dst, exist_ok=True)
    for name in ("im0", "im1"):
        save_pgm(GrayImage(to_gray(os.path.join(src, name + ".png"), reduce)), os.path.join(dst, name + ".pgm"))
    for cand in ("disp0.pfm", "disp0GT.pfm"):
        if os.path.exists(os.path.join(src, cand)):
            shutil.copyfile(os.path.join(src, cand), os.path.join(dst, "disp0.pfm"))
            break
    else:
        raise FileNotFoundError(f"no disp0.pfm / disp0GT.pfm in {src}")
    if os.path.exists(os.path.join(src, "disp1.pfm")):
        shutil.copyfile(os.path.join(src, "disp1.pfm"), os.path.join(dst, "disp1.pfm"))
    mask = os.path.join(src, "mask0nocc.png")
    if os.path.exists(mask):
        save_pgm(GrayImage(np.asarray(Image.open(mask).convert("L"))), os.path.join(dst, "mask0nocc.pgm"))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("src")
    ap.add_argument("dst")
    ap.add_argument("--reduce", type=int, default=4, help="integer downscale factor (4 = quarter size)")
    args = ap.parse_args()
    for scene in sorted(os.listdir(args.src)):
        path = os.path.join(args.src, scene)
        if not os.path.isdir(path):
            continue
        try:
            convert_scene(path, os.path.join(args.dst, scene), args.reduce)
            print("converted", scene)
        except (OSError, ValueError) as exc:
            print(f"skipped {scene}: {exc}")


if __name__ == "__main__":
    main()
