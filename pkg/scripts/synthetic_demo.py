"""Write a small layered synthetic dataset and evaluate every variant on it.

Useful as a dry run of the evaluation path when the Middlebury data is not
at hand. The numbers say nothing about Middlebury accuracy.
"""
import sys
import tempfile

from sgm4k.aggregate import SgmParams
from sgm4k.evaluate import VARIANTS, format_table, run_dataset
from sgm4k.synthetic import write_dataset

n = int(sys.argv[1]) if len(sys.argv) > 1 else 6
with tempfile.TemporaryDirectory() as root:
    write_dataset(root, n, h=180, w=240, disp_range=64, seed=5)
    print(format_table(run_dataset(root, list(VARIANTS), SgmParams(disp_range=64))))
