"""Semi-global matching stereo with a four-pixel-per-clock 0 degree path."""
from .aggregate import (INVALID, PATHS_3, PATHS_4, PATHS_8, SgmParams, aggregate_path, lr_check,
                        median3x3, path_step, run_sgm, select_disparity, sum_paths)
from .cost import census_transform, compute_cost, cost_volume, hamming, reference_context_count
from .errors import FormatError, ParameterError
from .fourppc import RELAXED, StreamState, aggregate_0deg_4ppc, estimate_prev, run_4ppc, run_streaming
from .imageio import FloatImage, GrayImage, load_pfm, load_pgm, save_disparity, save_pfm, save_pgm

__all__ = [
    "INVALID", "PATHS_3", "PATHS_4", "PATHS_8", "RELAXED", "FloatImage", "FormatError", "GrayImage",
    "ParameterError", "SgmParams", "StreamState", "aggregate_0deg_4ppc", "aggregate_path",
    "census_transform", "compute_cost", "cost_volume", "estimate_prev", "hamming", "load_pfm",
    "load_pgm", "lr_check", "median3x3", "path_step", "reference_context_count", "run_4ppc",
    "run_sgm", "run_streaming", "save_disparity", "save_pfm", "save_pgm", "select_disparity",
    "sum_paths",
]
