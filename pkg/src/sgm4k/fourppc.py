"""Four-pixel-per-clock SGM.

Pixels travel in groups of four horizontally adjacent samples. The 45, 90
and 135 degree paths only need the previous image line, so they are exact.
The 0 degree path would need each lane's left neighbour within the same
group; instead lanes 2..4 receive an *estimate* of that neighbour's path
cost built from the previous group's last-lane cost and the matching costs
of the earlier lanes (see ``estimate_prev``).

``run_streaming`` is a line-at-a-time model of the same datapath that only
retains line buffers and must agree bit for bit with ``run_4ppc``.
"""
from __future__ import annotations

import math
from collections import deque

import numpy as np
from numba import njit

from .aggregate import (FORWARD_OFFSETS, SgmParams, aggregate_all, aggregate_path, check_lambda,
                        path_step, postprocess, right_view_disparity, select_disparity)
from .cost import census_transform, compute_cost, cost_volume
from .errors import ParameterError
from .imageio import as_array

LANES = 4
RELAXED = math.inf


def lambda_shift(lam) -> int:
    """log2(lam), or -1 for the relaxed mode (correction term disabled)."""
    check_lambda(lam)
    if lam == RELAXED:
        return -1
    return int(lam).bit_length() - 1


def estimate_prev(l_last, c1, c2, c3, lam):
    """Estimated predecessor costs for lanes 2, 3 and 4.

    Every division is an arithmetic right shift, i.e. floor division, also
    for negative differences. Lane 1 uses ``l_last`` unchanged.
    """
    l_last = np.asarray(l_last, dtype=np.int64)
    c1 = np.asarray(c1, dtype=np.int64)
    c2 = np.asarray(c2, dtype=np.int64)
    c3 = np.asarray(c3, dtype=np.int64)
    s = lambda_shift(lam)
    if s < 0:
        return l_last.copy(), l_last.copy(), l_last.copy()
    avg2 = c1
    avg3 = (c1 + c2) >> 1
    avg4 = (avg3 + c3) >> 1
    return (l_last + ((avg2 - l_last) >> s),
            l_last + ((avg3 - l_last) >> s),
            l_last + ((avg4 - l_last) >> s))


@njit(cache=True, nogil=True)
def _step_into(out, y, x, prev, cost, p1, p2):
    nd = prev.shape[0]
    m = prev[0]
    for d in range(1, nd):
        if prev[d] < m:
            m = prev[d]
    for d in range(nd):
        best = prev[d]
        if d > 0 and prev[d - 1] + p1 < best:
            best = prev[d - 1] + p1
        if d < nd - 1 and prev[d + 1] + p1 < best:
            best = prev[d + 1] + p1
        if m + p2 < best:
            best = m + p2
        out[y, x, d] = cost[y, x, d] + best - m


@njit(cache=True, nogil=True)
def _aggregate_0deg_4ppc(cost, p1, p2, shift):
    h, w, nd = cost.shape
    out = np.empty((h, w, nd), dtype=np.int32)
    last = np.empty(nd, dtype=np.int64)
    est = np.empty(nd, dtype=np.int64)
    for y in range(h):
        for x0 in range(0, w, 4):
            if x0 == 0:
                for d in range(nd):
                    out[y, 0, d] = cost[y, 0, d]
                    last[d] = cost[y, 0, d]
            else:
                for d in range(nd):
                    last[d] = out[y, x0 - 1, d]
                _step_into(out, y, x0, last, cost, p1, p2)
            for k in range(1, 4):
                for d in range(nd):
                    if shift < 0:
                        est[d] = last[d]
                        continue
                    c1 = np.int64(cost[y, x0, d])
                    if k == 1:
                        avg = c1
                    else:
                        avg = (c1 + np.int64(cost[y, x0 + 1, d])) >> 1
                        if k == 3:
                            avg = (avg + np.int64(cost[y, x0 + 2, d])) >> 1
                    est[d] = last[d] + ((avg - last[d]) >> shift)
                _step_into(out, y, x0 + k, est, cost, p1, p2)
    return out


def _pad_columns(arr: np.ndarray, multiple: int = LANES) -> np.ndarray:
    extra = (-arr.shape[1]) % multiple
    if extra == 0:
        return arr
    pad = [(0, 0)] * arr.ndim
    pad[1] = (0, extra)
    return np.pad(arr, pad, mode="edge")


def aggregate_0deg_4ppc(cost: np.ndarray, p1: int, p2: int, lam) -> np.ndarray:
    """0 degree path costs computed four lanes at a time.

    Widths that are not a multiple of four are padded by replicating the
    last column; the padding is cropped from the result.
    """
    cost = np.asarray(cost)
    if cost.ndim != 3:
        raise ParameterError(f"cost volume must be (H, W, D), got {cost.shape}")
    w = cost.shape[1]
    padded = np.ascontiguousarray(_pad_columns(cost))
    out = _aggregate_0deg_4ppc(padded, int(p1), int(p2), lambda_shift(lam))
    return np.ascontiguousarray(out[:, :w])


def aggregate_4ppc(cost: np.ndarray, params: SgmParams) -> np.ndarray:
    def path_fn(c, r):
        if r == 0:
            return aggregate_0deg_4ppc(c, params.p1, params.p2, params.lam)
        return aggregate_path(c, r, params.p1, params.p2)
    return aggregate_all(cost, params, path_fn)


def _single_view_4ppc(left, right, params: SgmParams) -> np.ndarray:
    l_arr, r_arr = as_array(left), as_array(right)
    w = l_arr.shape[1]
    cost = compute_cost(_pad_columns(l_arr), _pad_columns(r_arr), params.disp_range)
    disp = select_disparity(aggregate_4ppc(cost, params))
    return np.ascontiguousarray(disp[:, :w])


def run_4ppc(left, right, params: SgmParams | None = None) -> np.ndarray:
    """Same pipeline as ``run_sgm`` with the 0 degree path estimated per lane."""
    params = params or SgmParams()
    l_arr, r_arr = as_array(left), as_array(right)
    if l_arr.shape != r_arr.shape:
        raise ParameterError(f"image shapes differ: {l_arr.shape} vs {r_arr.shape}")
    disp = _single_view_4ppc(l_arr, r_arr, params)
    return postprocess(disp, lambda: right_view_disparity(_single_view_4ppc, l_arr, r_arr, params), params)


class StreamState:
    """Line-buffer state of the streaming model.

    Holds the last five raw rows of both images (Census context), one line
    of path costs per vertical/diagonal direction and the 0 degree cost of
    the last lane of the previous group. Nothing frame-sized is kept.
    """

    def __init__(self, width: int, params: SgmParams):
        bad = [r for r in params.paths if r not in FORWARD_OFFSETS]
        if bad:
            raise ParameterError(f"streaming supports only forward paths, got {bad}")
        self.params = params
        self.width = width
        self.padded_width = width + (-width) % LANES
        self.context_left: deque = deque(maxlen=5)
        self.context_right: deque = deque(maxlen=5)
        self.context_first = 0  # image row index of context_*[0]
        self.line = {r: None for r in params.paths if r != 0}
        self.last_lane = None
        self.rows_in = 0
        self.rows_out = 0
        self.peak_entries = 0

    def retained_entries(self) -> int:
        n = sum(r.size for r in self.context_left) + sum(r.size for r in self.context_right)
        n += sum(v.size for v in self.line.values() if v is not None)
        if self.last_lane is not None:
            n += self.last_lane.size
        return n

    def entry_bound(self) -> int:
        """3 path lines + one D-vector + 2 x 5 context rows, in the padded width."""
        wp, nd = self.padded_width, self.params.disp_range
        return 3 * wp * nd + nd + 2 * 5 * wp

    def _note_peak(self):
        self.peak_entries = max(self.peak_entries, self.retained_entries())

    def push(self, left_row, right_row):
        """Feed one input row; returns the output rows that became ready."""
        self.context_left.append(_pad_columns(np.asarray(left_row, dtype=np.uint8)[None, :])[0])
        self.context_right.append(_pad_columns(np.asarray(right_row, dtype=np.uint8)[None, :])[0])
        self.rows_in += 1
        self.context_first = max(0, self.rows_in - 5)
        self._note_peak()
        out = []
        # row y needs rows up to y + 2
        while self.rows_out + 2 < self.rows_in:
            out.append(self._emit(self.rows_out, last_row=None))
        return out

    def finish(self):
        out = []
        while self.rows_out < self.rows_in:
            out.append(self._emit(self.rows_out, last_row=self.rows_in - 1))
        return out

    def _context_block(self, rows: deque, y: int, last_row) -> np.ndarray:
        top = last_row if last_row is not None else self.rows_in - 1
        picked = []
        for yy in range(y - 2, y + 3):
            yy = min(max(yy, 0), top)
            picked.append(rows[yy - self.context_first])
        return np.stack(picked)

    def _emit(self, y: int, last_row) -> np.ndarray:
        p = self.params
        census_l = census_transform(self._context_block(self.context_left, y, last_row))[2:3]
        census_r = census_transform(self._context_block(self.context_right, y, last_row))[2:3]
        cost = cost_volume(census_l, census_r, p.disp_range)[0].astype(np.int64)  # (Wp, D)

        total = np.zeros(cost.shape, dtype=np.int64) if p.paths else cost.copy()
        for r in p.paths:
            if r == 0:
                row = self._row_0deg(cost)
            else:
                row = self._row_from_line(r, cost)
                self.line[r] = row
            total += row
        self._note_peak()
        self.rows_out += 1
        disp = np.argmin(total, axis=-1).astype(np.int32)
        return disp[: self.width]

    def _row_from_line(self, r: int, cost: np.ndarray) -> np.ndarray:
        prev = self.line[r]
        if prev is None:
            return cost.copy()
        dx, _ = FORWARD_OFFSETS[r]
        wp = cost.shape[0]
        out = cost.copy()
        # predecessor column x + dx lies in the stored line
        xs = np.arange(wp)
        src = xs + dx
        ok = (src >= 0) & (src < wp)
        out[ok] = path_step(prev[src[ok]], cost[ok], p1=self.params.p1, p2=self.params.p2)
        return out

    def _row_0deg(self, cost: np.ndarray) -> np.ndarray:
        p = self.params
        wp = cost.shape[0]
        out = np.empty_like(cost)
        for x0 in range(0, wp, LANES):
            c = cost[x0:x0 + LANES]
            if x0 == 0:
                lane1 = c[0].copy()
            else:
                lane1 = path_step(self.last_lane, c[0], p.p1, p.p2)
            last = lane1 if x0 == 0 else self.last_lane
            e2, e3, e4 = estimate_prev(last, c[0], c[1], c[2], p.lam)
            rest = path_step(np.stack([e2, e3, e4]), c[1:], p.p1, p.p2)
            out[x0] = lane1
            out[x0 + 1:x0 + LANES] = rest
            self.last_lane = out[x0 + LANES - 1].copy()
        return out


def run_streaming(left, right, params: SgmParams | None = None, state_out: list | None = None) -> np.ndarray:
    """Row-streamed 4ppc SGM; bit-exact with ``run_4ppc``.

    Post-processing (median, left-right check) is applied to the assembled
    frame. If ``state_out`` is a list, the StreamState of the left view is
    appended to it so callers can inspect ``peak_entries``.
    """
    params = params or SgmParams()
    l_arr, r_arr = as_array(left), as_array(right)
    if l_arr.shape != r_arr.shape:
        raise ParameterError(f"image shapes differ: {l_arr.shape} vs {r_arr.shape}")

    def one_view(a, b, prm, keep=None):
        state = StreamState(a.shape[1], prm)
        rows = []
        for la, rb in zip(a, b):
            rows.extend(state.push(la, rb))
        rows.extend(state.finish())
        if keep is not None:
            keep.append(state)
        return np.stack(rows).astype(np.int32)

    disp = one_view(l_arr, r_arr, params, state_out)
    return postprocess(disp, lambda: right_view_disparity(one_view, l_arr, r_arr, params), params)
