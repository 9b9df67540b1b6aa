"""Throughput of the software pipelines at a few frame sizes, plus the
MDE/s the published hardware rows imply."""
import statistics
import time

import numpy as np

from sgm4k.aggregate import SgmParams
from sgm4k.cli import mde_per_s
from sgm4k.evaluate import run_variant
from sgm4k.synthetic import shifted_pair

print("published rows (formula check):")
for w, h, nd, fps in [(3840, 2160, 64, 30), (1920, 1080, 128, 30)]:
    print(f"  {w}x{h} D={nd} @ {fps} fps -> {round(mde_per_s(w, h, nd, fps))} MDE/s")

params = SgmParams(disp_range=64)
rng = np.random.default_rng(0)
print("\nsoftware, D=64, median of 3:")
for w, h in [(320, 240), (640, 480), (960, 540)]:
    left, right = shifted_pair(rng, h, w, 9, blur=2)
    for v in ("sgm4", "sgm-4ppc"):
        run_variant(v, left[:8, :16], right[:8, :16], params)
        times = []
        for _ in range(3):
            t0 = time.perf_counter()
            run_variant(v, left, right, params)
            times.append(time.perf_counter() - t0)
        fps = 1 / statistics.median(times)
        print(f"  {w}x{h} {v:<9} {fps:6.2f} fps  {float(mde_per_s(w, h, 64, fps)):8.1f} MDE/s")
