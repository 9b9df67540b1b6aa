"""Slow, obviously-correct reference implementations.

Nothing in here imports the package's algorithm code; each routine is a
direct per-pixel transcription of the rule it checks.
"""
import struct

INVALID = -1

# step taken when moving forward along a path, per direction in degrees
PATH_STEP = {
    0: (1, 0), 45: (-1, 1), 90: (0, 1), 135: (1, 1),
    180: (-1, 0), 225: (1, -1), 270: (0, -1), 315: (-1, -1),
}


def census(img):
    h, w = len(img), len(img[0])
    out = [[0] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            centre = img[y][x]
            desc, bit = 0, 0
            for dy in range(-2, 3):
                for dx in range(-2, 3):
                    if dy == 0 and dx == 0:
                        continue
                    yy = min(max(y + dy, 0), h - 1)
                    xx = min(max(x + dx, 0), w - 1)
                    if img[yy][xx] < centre:
                        desc |= 1 << bit
                    bit += 1
            out[y][x] = desc
    return out


def popcount(v):
    n = 0
    while v:
        n += v & 1
        v >>= 1
    return n


def cost(cb, cr, ndisp):
    h, w = len(cb), len(cb[0])
    return [[[popcount(cb[y][x] ^ cr[y][max(x - d, 0)]) for d in range(ndisp)]
             for x in range(w)] for y in range(h)]


def eq1(prev, c, p1, p2):
    nd = len(prev)
    lo = min(prev)
    out = []
    for d in range(nd):
        cands = [prev[d], lo + p2]
        if d - 1 >= 0:
            cands.append(prev[d - 1] + p1)
        if d + 1 < nd:
            cands.append(prev[d + 1] + p1)
        out.append(c[d] + min(cands) - lo)
    return out


def enumerate_paths(h, w, direction):
    """Every maximal straight path through the image, as pixel lists."""
    sx, sy = PATH_STEP[direction]
    paths = []
    for y in range(h):
        for x in range(w):
            px, py = x - sx, y - sy
            if 0 <= px < w and 0 <= py < h:
                continue  # not a path start
            path = []
            cx, cy = x, y
            while 0 <= cx < w and 0 <= cy < h:
                path.append((cx, cy))
                cx += sx
                cy += sy
            paths.append(path)
    return paths


def aggregate_path(vol, direction, p1, p2):
    h, w = len(vol), len(vol[0])
    out = [[None] * w for _ in range(h)]
    for path in enumerate_paths(h, w, direction):
        prev = None
        for x, y in path:
            c = vol[y][x]
            cur = list(c) if prev is None else eq1(prev, c, p1, p2)
            out[y][x] = cur
            prev = cur
    return out


def floor_div(a, b):
    # independent of >>: Python's // floors for negative a
    return a // b


def estimate(l_last, c1, c2, c3, lam):
    e2 = [l + floor_div(a - l, lam) for l, a in zip(l_last, c1)]
    avg3 = [floor_div(a + b, 2) for a, b in zip(c1, c2)]
    e3 = [l + floor_div(a - l, lam) for l, a in zip(l_last, avg3)]
    avg4 = [floor_div(a + b, 2) for a, b in zip(avg3, c3)]
    e4 = [l + floor_div(a - l, lam) for l, a in zip(l_last, avg4)]
    return e2, e3, e4


def zero_deg_4ppc(vol, p1, p2, lam):
    """Lane-by-lane scalar model of the estimated 0 degree path.

    ``lam=None`` disables the correction term.
    """
    h, w = len(vol), len(vol[0])
    out = [[None] * w for _ in range(h)]
    for y in range(h):
        for g in range(w // 4):
            x0 = 4 * g
            c = [vol[y][x0 + k] for k in range(4)]
            if g == 0:
                lane1 = list(c[0])
                last = lane1
            else:
                last = out[y][x0 - 1]
                lane1 = eq1(last, c[0], p1, p2)
            out[y][x0] = lane1
            if lam is None:
                preds = [last, last, last]
            else:
                preds = estimate(last, c[0], c[1], c[2], lam)
            for k in range(1, 4):
                out[y][x0 + k] = eq1(preds[k - 1], c[k], p1, p2)
    return out


def relaxation_0deg(vol, p1, p2):
    """Every pixel of a group uses the path cost delivered in the previous
    cycle (last lane of the previous group); row starts take L = C."""
    h, w = len(vol), len(vol[0])
    out = [[None] * w for _ in range(h)]
    for y in range(h):
        carried = None
        for x in range(w):
            if x % 4 == 0:
                carried = out[y][x - 1] if x > 0 else list(vol[y][0])
            if x == 0:
                out[y][x] = list(vol[y][0])
            else:
                out[y][x] = eq1(carried, vol[y][x], p1, p2)
    return out


def median3x3(disp):
    h, w = len(disp), len(disp[0])
    out = [[INVALID] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            vals = []
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    v = disp[min(max(y + dy, 0), h - 1)][min(max(x + dx, 0), w - 1)]
                    if v != INVALID:
                        vals.append(v)
            if vals:
                vals.sort()
                out[y][x] = vals[(len(vals) - 1) // 2]
    return out


def lr_check(dl, dr, thr):
    h, w = len(dl), len(dl[0])
    out = [[INVALID] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            d = dl[y][x]
            if d == INVALID:
                continue
            xr = x - d
            if 0 <= xr < w and dr[y][xr] != INVALID and abs(d - dr[y][xr]) <= thr:
                out[y][x] = d
    return out


def bad_pixel_rate(disp, gt, mask, thr):
    bad = total = 0
    for y in range(len(gt)):
        for x in range(len(gt[0])):
            g = gt[y][x]
            if g != g or g in (float("inf"), float("-inf")):
                continue
            if mask is not None and not mask[y][x]:
                continue
            total += 1
            d = disp[y][x]
            if d == INVALID or abs(d - g) > thr:
                bad += 1
    return 100.0 * bad / total


def read_pfm(path):
    with open(path, "rb") as f:
        data = f.read()
    lines = data.split(b"\n", 3)
    assert lines[0].strip() == b"Pf"
    w, h = map(int, lines[1].split())
    scale = float(lines[2])
    fmt = ("<" if scale < 0 else ">") + "f" * (w * h)
    vals = struct.unpack(fmt, lines[3][: 4 * w * h])
    rows = [list(vals[r * w:(r + 1) * w]) for r in range(h)]
    return rows[::-1]
