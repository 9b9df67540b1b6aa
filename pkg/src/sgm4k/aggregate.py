"""Baseline semi-global matching: path recursion, summation, WTA and
post-processing."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numba import njit

from .cost import compute_cost
from .errors import ParameterError
from .imageio import INVALID, as_array

# predecessor offset (dx, dy) of each forward direction
FORWARD_OFFSETS = {0: (-1, 0), 45: (1, -1), 90: (0, -1), 135: (-1, -1)}
REVERSE_DIRECTIONS = (180, 225, 270, 315)
ALL_DIRECTIONS = tuple(FORWARD_OFFSETS) + REVERSE_DIRECTIONS

PATHS_3 = (45, 90, 135)
PATHS_4 = (0, 45, 90, 135)
PATHS_8 = ALL_DIRECTIONS


def _is_power_of_two(v) -> bool:
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool) and v >= 1 and (v & (v - 1)) == 0


def check_lambda(lam) -> None:
    """``lam`` must be a power of two, or ``math.inf`` for the relaxed mode."""
    if lam == math.inf:
        return
    if not _is_power_of_two(lam):
        raise ParameterError(f"lambda must be a power of two (or inf), got {lam!r}")


@dataclass(frozen=True)
class SgmParams:
    p1: int = 7
    p2: int = 86
    disp_range: int = 64
    paths: tuple = PATHS_4
    lam: float = 2
    median: bool = False
    lr_check: bool = False
    lr_threshold: int = 1

    def __post_init__(self):
        if not (0 < self.p1 < self.p2):
            raise ParameterError(f"need 0 < P1 < P2, got P1={self.p1}, P2={self.p2}")
        if self.disp_range < 1:
            raise ParameterError(f"disparity range must be >= 1, got {self.disp_range}")
        paths = tuple(int(p) for p in self.paths)
        bad = [p for p in paths if p not in ALL_DIRECTIONS]
        if bad:
            raise ParameterError(f"unsupported path directions {bad}")
        if len(set(paths)) != len(paths):
            raise ParameterError(f"duplicate path directions in {paths}")
        object.__setattr__(self, "paths", paths)
        check_lambda(self.lam)
        if self.lr_threshold < 0:
            raise ParameterError("lr_threshold must be >= 0")


def path_step(l_prev, c_here, p1: int, p2: int) -> np.ndarray:
    """One step of the path recursion.

    Works on the last axis, so ``l_prev``/``c_here`` may carry leading batch
    dimensions (rows, lanes).
    """
    l_prev = np.asarray(l_prev, dtype=np.int64)
    c_here = np.asarray(c_here, dtype=np.int64)
    if l_prev.shape != c_here.shape:
        raise ParameterError(f"length mismatch: {l_prev.shape} vs {c_here.shape}")
    m = l_prev.min(axis=-1, keepdims=True)
    best = np.minimum(l_prev, m + p2)
    best[..., 1:] = np.minimum(best[..., 1:], l_prev[..., :-1] + p1)
    best[..., :-1] = np.minimum(best[..., :-1], l_prev[..., 1:] + p1)
    return c_here + best - m


@njit(cache=True, nogil=True)
def _aggregate_forward(cost, dx, dy, p1, p2):
    h, w, nd = cost.shape
    out = np.empty((h, w, nd), dtype=np.int32)
    for y in range(h):
        for x in range(w):
            px = x + dx
            py = y + dy
            if px < 0 or px >= w or py < 0 or py >= h:
                for d in range(nd):
                    out[y, x, d] = cost[y, x, d]
                continue
            m = out[py, px, 0]
            for d in range(1, nd):
                if out[py, px, d] < m:
                    m = out[py, px, d]
            for d in range(nd):
                best = out[py, px, d]
                if d > 0 and out[py, px, d - 1] + p1 < best:
                    best = out[py, px, d - 1] + p1
                if d < nd - 1 and out[py, px, d + 1] + p1 < best:
                    best = out[py, px, d + 1] + p1
                if m + p2 < best:
                    best = m + p2
                out[y, x, d] = cost[y, x, d] + best - m
    return out


def aggregate_path(cost: np.ndarray, direction: int, p1: int, p2: int) -> np.ndarray:
    """Path cost volume L_r (int32, same shape as ``cost``).

    Forward directions: 0 deg takes its predecessor at (x-1, y), 45 at
    (x+1, y-1), 90 at (x, y-1), 135 at (x-1, y-1). The reverse directions
    run the forward recursion on the 180-degree rotated volume.
    """
    cost = np.ascontiguousarray(cost)
    if cost.ndim != 3:
        raise ParameterError(f"cost volume must be (H, W, D), got {cost.shape}")
    if direction in FORWARD_OFFSETS:
        dx, dy = FORWARD_OFFSETS[direction]
        return _aggregate_forward(cost, dx, dy, int(p1), int(p2))
    if direction in REVERSE_DIRECTIONS:
        rotated = np.ascontiguousarray(cost[::-1, ::-1])
        dx, dy = FORWARD_OFFSETS[direction - 180]
        return np.ascontiguousarray(_aggregate_forward(rotated, dx, dy, int(p1), int(p2))[::-1, ::-1])
    raise ParameterError(f"unsupported path direction {direction!r}")


def sum_paths(volumes: Sequence[np.ndarray]) -> np.ndarray:
    if len(volumes) == 0:
        raise ParameterError("sum_paths needs at least one volume")
    shape = volumes[0].shape
    for v in volumes:
        if v.shape != shape:
            raise ParameterError(f"shape mismatch: {v.shape} vs {shape}")
    total = np.zeros(shape, dtype=np.int32)
    for v in volumes:
        total += v
    return total


def select_disparity(volume: np.ndarray) -> np.ndarray:
    """Winner-takes-all over the last axis; ties go to the smallest d."""
    return np.argmin(volume, axis=-1).astype(np.int32)


@njit(cache=True, nogil=True)
def _median3x3(disp, invalid):
    h, w = disp.shape
    out = np.empty_like(disp)
    buf = np.empty(9, dtype=disp.dtype)
    for y in range(h):
        for x in range(w):
            n = 0
            for dy in range(-1, 2):
                yy = min(max(y + dy, 0), h - 1)
                for dx in range(-1, 2):
                    xx = min(max(x + dx, 0), w - 1)
                    v = disp[yy, xx]
                    if v != invalid:
                        buf[n] = v
                        n += 1
            if n == 0:
                out[y, x] = invalid
            else:
                s = np.sort(buf[:n])
                out[y, x] = s[(n - 1) // 2]
    return out


def median3x3(disp: np.ndarray) -> np.ndarray:
    """3x3 median over valid samples (edge replicated); lower median on ties."""
    return _median3x3(np.ascontiguousarray(disp, dtype=np.int32), INVALID)


def lr_check(disp_left: np.ndarray, disp_right: np.ndarray, threshold: int) -> np.ndarray:
    disp_left = np.asarray(disp_left, dtype=np.int32)
    disp_right = np.asarray(disp_right, dtype=np.int32)
    if disp_left.shape != disp_right.shape:
        raise ParameterError(f"shape mismatch: {disp_left.shape} vs {disp_right.shape}")
    h, w = disp_left.shape
    xs = np.arange(w)[None, :] - disp_left
    ys = np.broadcast_to(np.arange(h)[:, None], (h, w))
    inside = (disp_left != INVALID) & (xs >= 0) & (xs < w)
    looked = np.full((h, w), INVALID, dtype=np.int32)
    looked[inside] = disp_right[ys[inside], xs[inside]]
    keep = inside & (looked != INVALID) & (np.abs(disp_left - looked) <= threshold)
    return np.where(keep, disp_left, INVALID).astype(np.int32)


def aggregate_all(cost: np.ndarray, params: SgmParams,
                  path_fn: Callable[[np.ndarray, int], np.ndarray] | None = None) -> np.ndarray:
    """Sum of the configured path volumes; with no paths, the raw cost.

    ``path_fn(cost, direction)`` overrides how a single direction is computed.
    """
    if not params.paths:
        return cost.astype(np.int32)
    if path_fn is None:
        def path_fn(c, r):
            return aggregate_path(c, r, params.p1, params.p2)
    return sum_paths([path_fn(cost, r) for r in params.paths])


def _single_view(left, right, params: SgmParams) -> np.ndarray:
    cost = compute_cost(left, right, params.disp_range)
    return select_disparity(aggregate_all(cost, params))


def postprocess(disp_left: np.ndarray, right_view: Callable[[], np.ndarray], params: SgmParams) -> np.ndarray:
    """Optional median filter and left-right check.

    ``right_view`` is called lazily, only when the check is enabled.
    """
    out = median3x3(disp_left) if params.median else disp_left
    if params.lr_check:
        disp_right = right_view()
        if params.median:
            disp_right = median3x3(disp_right)
        out = lr_check(out, disp_right, params.lr_threshold)
    return out


def right_view_disparity(view_fn, left, right, params: SgmParams) -> np.ndarray:
    """Disparity map of the right image: the same pipeline run on the
    mirrored pair (right as base), mirrored back."""
    l_arr, r_arr = as_array(left), as_array(right)
    flipped = view_fn(np.ascontiguousarray(r_arr[:, ::-1]), np.ascontiguousarray(l_arr[:, ::-1]), params)
    return np.ascontiguousarray(flipped[:, ::-1])


def run_sgm(left, right, params: SgmParams | None = None) -> np.ndarray:
    """Census -> cost volume -> path aggregation -> WTA -> post-processing.

    With ``params.paths == ()`` this is plain Census block matching.
    """
    params = params or SgmParams()
    l_arr, r_arr = as_array(left), as_array(right)
    if l_arr.shape != r_arr.shape:
        raise ParameterError(f"image shapes differ: {l_arr.shape} vs {r_arr.shape}")
    disp = _single_view(l_arr, r_arr, params)
    return postprocess(disp, lambda: right_view_disparity(_single_view, l_arr, r_arr, params), params)
