"""5x5 Census transform and Hamming matching cost volume."""
from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .imageio import as_array

CENSUS_RADIUS = 2
CENSUS_BITS = 24
MAX_COST = CENSUS_BITS


def _window_offsets():
    # raster order over the 5x5 window, centre skipped; index in this list == bit position
    return [(dy, dx)
            for dy in range(-CENSUS_RADIUS, CENSUS_RADIUS + 1)
            for dx in range(-CENSUS_RADIUS, CENSUS_RADIUS + 1)
            if (dy, dx) != (0, 0)]


WINDOW_OFFSETS = tuple(_window_offsets())


def census_transform(img) -> np.ndarray:
    """24-bit Census descriptors, shape (H, W), dtype uint32.

    Bit k is set iff the k-th neighbour (raster order, centre skipped) is
    strictly darker than the centre. Out-of-image neighbours replicate the
    nearest edge pixel.
    """
    arr = np.asarray(as_array(img), dtype=np.int16)
    if arr.ndim != 2 or arr.size == 0:
        raise ParameterError(f"census_transform needs a non-empty 2-D image, got {arr.shape}")
    h, w = arr.shape
    r = CENSUS_RADIUS
    padded = np.pad(arr, r, mode="edge")
    out = np.zeros((h, w), dtype=np.uint32)
    for bit, (dy, dx) in enumerate(WINDOW_OFFSETS):
        neigh = padded[r + dy:r + dy + h, r + dx:r + dx + w]
        out |= (neigh < arr).astype(np.uint32) << np.uint32(bit)
    return out


def hamming(a: int, b: int) -> int:
    return (int(a) ^ int(b)).bit_count()


def cost_volume(census_base: np.ndarray, census_ref: np.ndarray, disp_range: int) -> np.ndarray:
    """C[y, x, d] = hamming(base[y, x], ref[y, max(x - d, 0)]), dtype uint8."""
    census_base = np.asarray(census_base, dtype=np.uint32)
    census_ref = np.asarray(census_ref, dtype=np.uint32)
    if census_base.shape != census_ref.shape:
        raise ParameterError(f"census shapes differ: {census_base.shape} vs {census_ref.shape}")
    if disp_range < 1:
        raise ParameterError(f"disparity range must be >= 1, got {disp_range}")
    h, w = census_base.shape
    cols = np.arange(w)
    vol = np.empty((h, w, disp_range), dtype=np.uint8)
    for d in range(disp_range):
        shifted = census_ref[:, np.maximum(cols - d, 0)]
        vol[:, :, d] = np.bitwise_count(census_base ^ shifted)
    return vol


def compute_cost(left, right, disp_range: int) -> np.ndarray:
    """Census both images and build the cost volume with ``left`` as base."""
    l_arr, r_arr = as_array(left), as_array(right)
    if l_arr.shape != r_arr.shape:
        raise ParameterError(f"image shapes differ: {l_arr.shape} vs {r_arr.shape}")
    return cost_volume(census_transform(l_arr), census_transform(r_arr), disp_range)


def reference_context_count(lanes: int, disp_range: int) -> int:
    """Reference-image 5x5 contexts needed per cycle so every lane sees all
    ``disp_range`` candidates."""
    if disp_range < 1 or lanes < 1:
        raise ParameterError("lanes and disparity range must be >= 1")
    return lanes + disp_range - 1
