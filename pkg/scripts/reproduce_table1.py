"""Run every variant over a converted Middlebury set and print the error
table next to the published numbers.

    python scripts/reproduce_table1.py data/middlebury2014-quarter --out reports/table1.csv
"""
import argparse
import time

from sgm4k.aggregate import SgmParams
from sgm4k.evaluate import VARIANTS, run_dataset

PUBLISHED = {  # mean bad-pixel rate, all / noc, %
    "local-ct": (68.21, 63.36), "sgm3": (38.01, 28.79), "sgm4": (36.27, 26.88),
    "sgm8": (33.31, 23.11), "sgm-4ppc": (36.64, 27.32),
}

ap = argparse.ArgumentParser()
ap.add_argument("dataset")
ap.add_argument("--out", default="reports/table1.csv")
ap.add_argument("--disp-range", type=int, default=64)
ap.add_argument("--p1", type=int, default=7)
ap.add_argument("--p2", type=int, default=86)
ap.add_argument("--lam", type=int, default=2)
ap.add_argument("--threshold", type=float, default=1.0)
ap.add_argument("--threads", type=int, default=1)
args = ap.parse_args()

params = SgmParams(p1=args.p1, p2=args.p2, disp_range=args.disp_range, lam=args.lam)
t0 = time.perf_counter()
results = run_dataset(args.dataset, list(VARIANTS), params, threshold=args.threshold,
                      csv_path=args.out, threads=args.threads)
print(f"{len(results[0].scenes)} scenes, {time.perf_counter() - t0:.1f} s\n")
print(f"{'':<10}{'all':>9}{'noc':>9}   published all / noc")
for r in results:
    pa, pn = PUBLISHED[r.variant]
    print(f"{r.variant:<10}{r.mean_all:>8.2f}%{r.mean_noc:>8.2f}%   {pa:.2f}% / {pn:.2f}%")
