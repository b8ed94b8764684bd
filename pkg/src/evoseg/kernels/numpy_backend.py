"""Pure-numpy implementations of the hot kernels.

This backend is the portable fallback: no JIT, no compilation step. Every
function here must produce bit-identical output to its twin in
``numba_backend`` (the agreement suite in tests/test_kernels.py holds both to
that). Accumulation order therefore mirrors the loop order of the jitted
kernels wherever floating point is involved.
"""

import heapq

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

BIG = 1e30


def _pad_reflect(img, mr, mc):
    if mr == 0 and mc == 0:
        return img
    return np.pad(img, ((mr, mr), (mc, mc)), mode="reflect")


def _row_window(img, k):
    # view of shape (H, W, k) over horizontally padded input
    return sliding_window_view(_pad_reflect(img, 0, k // 2), (1, k)).reshape(
        img.shape[0], img.shape[1], k
    )


def _col_window(img, k):
    return sliding_window_view(_pad_reflect(img, k // 2, 0), (k, 1)).reshape(
        img.shape[0], img.shape[1], k
    )


def erode_u8(img, k):
    if k <= 1:
        return img.copy()
    tmp = _row_window(img, k).min(axis=2)
    return _col_window(tmp, k).min(axis=2).astype(np.uint8)


def dilate_u8(img, k):
    if k <= 1:
        return img.copy()
    tmp = _row_window(img, k).max(axis=2)
    return _col_window(tmp, k).max(axis=2).astype(np.uint8)


def median_u8(img, k):
    if k <= 1:
        return img.copy()
    win = sliding_window_view(_pad_reflect(img, k // 2, k // 2), (k, k))
    h, w = img.shape
    return np.median(win.reshape(h, w, k * k), axis=2).astype(np.uint8)


def window_max_f64(img, m):
    """Max over a (2m+1)^2 window truncated at the borders."""
    if m <= 0:
        return img.copy()
    k = 2 * m + 1
    pad = np.pad(img, ((0, 0), (m, m)), mode="constant", constant_values=-BIG)
    tmp = sliding_window_view(pad, (1, k)).reshape(img.shape + (k,)).max(axis=2)
    pad = np.pad(tmp, ((m, m), (0, 0)), mode="constant", constant_values=-BIG)
    return sliding_window_view(pad, (k, 1)).reshape(img.shape + (k,)).max(axis=2)


def sep_convolve_f64(img, taps):
    """Separable correlation with reflected borders, float64 throughout."""
    h, w = img.shape
    k = len(taps)
    m = k // 2
    src = np.ascontiguousarray(img, dtype=np.float64)
    pad = _pad_reflect(src, 0, m)
    tmp = np.zeros((h, w), np.float64)
    for t in range(k):
        tmp += taps[t] * pad[:, t : t + w]
    pad = _pad_reflect(tmp, m, 0)
    out = np.zeros((h, w), np.float64)
    for t in range(k):
        out += taps[t] * pad[t : t + h, :]
    return out


def sep_convolve_u8(img, taps):
    out = sep_convolve_f64(img.astype(np.float64), taps)
    return np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)


def conv3x3_i32(img, kern):
    """Full 3x3 correlation with reflected borders on int32."""
    src = _pad_reflect(img.astype(np.int32), 1, 1)
    h, w = img.shape
    out = np.zeros((h, w), np.int32)
    for dy in range(3):
        for dx in range(3):
            kv = int(kern[dy, dx])
            if kv != 0:
                out += kv * src[dy : dy + h, dx : dx + w]
    return out


def edt_f64(mask):
    """Exact Euclidean distance to the nearest zero pixel.

    Two-pass algorithm: per-row scan for horizontal distance, then the
    lower-envelope pass down each column on squared distances.
    """
    h, w = mask.shape
    big = float(h + w)
    fg = mask != 0
    if not fg.any():
        return np.zeros((h, w), np.float64)
    cols = np.arange(w)
    posl = np.where(~fg, cols, -(10**9))
    left = np.maximum.accumulate(posl, axis=1)
    dl = cols - left
    posr = np.where(~fg, cols, 10**9)
    right = np.minimum.accumulate(posr[:, ::-1], axis=1)[:, ::-1]
    dr = right - cols
    g = np.minimum(dl, dr).astype(np.float64)
    np.minimum(g, big, out=g)

    out = np.empty((h, w), np.float64)
    v = np.empty(h, np.int64)
    z = np.empty(h + 1, np.float64)
    for j in range(w):
        f = g[:, j] * g[:, j]
        kk = 0
        v[0] = 0
        z[0] = -BIG
        z[1] = BIG
        for q in range(1, h):
            s = ((f[q] + q * q) - (f[v[kk]] + v[kk] * v[kk])) / (2 * q - 2 * v[kk])
            while s <= z[kk]:
                kk -= 1
                s = ((f[q] + q * q) - (f[v[kk]] + v[kk] * v[kk])) / (2 * q - 2 * v[kk])
            kk += 1
            v[kk] = q
            z[kk] = s
            z[kk + 1] = BIG
        kk = 0
        for q in range(h):
            while z[kk + 1] < q:
                kk += 1
            dq = q - v[kk]
            out[q, j] = np.sqrt(dq * dq + f[v[kk]])
    return out


def label_8(mask):
    """8-connected components; labels contiguous 1..n in raster-first order."""
    h, w = mask.shape
    labels = np.zeros((h, w), np.int32)
    parent = []

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    prov = np.zeros((h, w), np.int64)
    for i in range(h):
        for j in range(w):
            if mask[i, j] == 0:
                continue
            roots = []
            if i > 0:
                for jj in (j - 1, j, j + 1):
                    if 0 <= jj < w and mask[i - 1, jj] != 0:
                        roots.append(find(prov[i - 1, jj]))
            if j > 0 and mask[i, j - 1] != 0:
                roots.append(find(prov[i, j - 1]))
            if not roots:
                prov[i, j] = len(parent)
                parent.append(len(parent))
            else:
                m = min(roots)
                prov[i, j] = m
                for r in roots:
                    parent[r] = m

    remap = {}
    count = 0
    for i in range(h):
        for j in range(w):
            if mask[i, j] == 0:
                continue
            r = find(prov[i, j])
            lab = remap.get(r)
            if lab is None:
                count += 1
                remap[r] = lab = count
            labels[i, j] = lab
    return labels, count


_NEIGHBORS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


def priority_flood(topo, seeds, mask):
    """Watershed flood: grow seed labels over the mask in topography order.

    Ties in topography break by insertion order, so the first-arriving flood
    claims boundary pixels.
    """
    h, w = topo.shape
    labels = np.zeros((h, w), np.int32)
    heap = []
    order = 0
    for i in range(h):
        for j in range(w):
            if seeds[i, j] > 0 and mask[i, j] != 0:
                labels[i, j] = seeds[i, j]
                heapq.heappush(heap, (topo[i, j], order, i, j))
                order += 1
    while heap:
        _, _, i, j = heapq.heappop(heap)
        lab = labels[i, j]
        for di, dj in _NEIGHBORS:
            ni, nj = i + di, j + dj
            if 0 <= ni < h and 0 <= nj < w and mask[ni, nj] != 0 and labels[ni, nj] == 0:
                labels[ni, nj] = lab
                heapq.heappush(heap, (topo[ni, nj], order, ni, nj))
                order += 1
    return labels


def greedy_select(ys, xs, h, w, min_sep):
    """Greedy suppression: accept points in given order, rejecting any point
    closer than min_sep (euclidean) to an already-accepted one."""
    n = len(ys)
    flags = np.zeros(n, np.uint8)
    taken = np.zeros((h, w), bool)
    sr = max(int(np.ceil(min_sep)) - 1, 0)
    sep2 = min_sep * min_sep
    for i in range(n):
        y = int(ys[i])
        x = int(xs[i])
        ok = True
        for yy in range(max(y - sr, 0), min(y + sr + 1, h)):
            dy2 = (yy - y) * (yy - y)
            for xx in range(max(x - sr, 0), min(x + sr + 1, w)):
                if taken[yy, xx] and dy2 + (xx - x) * (xx - x) < sep2:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            flags[i] = 1
            taken[y, x] = True
    return flags


def hough_votes(ys, xs, r_min, r_max, h, w):
    """Accumulate circle-center votes for every edge pixel and radius.

    A pixel votes for center c at radius r when round(dist(pixel, c)) == r,
    i.e. dist^2 in [(r-0.5)^2, (r+0.5)^2).
    """
    nr = r_max - r_min + 1
    acc = np.zeros((nr, h, w), np.int32)
    for ri in range(nr):
        r = r_min + ri
        lo2 = (r - 0.5) ** 2
        hi2 = (r + 0.5) ** 2
        offs = []
        for dy in range(-r, r + 1):
            rem_hi = hi2 - dy * dy
            if rem_hi <= 0:
                continue
            rem_lo = lo2 - dy * dy
            dx_max = int(np.sqrt(rem_hi))
            while dx_max * dx_max >= rem_hi:
                dx_max -= 1
            if rem_lo <= 0:
                dx_min = 0
            else:
                dx_min = int(np.sqrt(rem_lo))
                while dx_min * dx_min < rem_lo:
                    dx_min += 1
            for dx in range(dx_min, dx_max + 1):
                offs.append((dy, dx))
                if dx > 0:
                    offs.append((dy, -dx))
        for p in range(len(ys)):
            y = ys[p]
            x = xs[p]
            for dy, dx in offs:
                cy = y - dy
                cx = x - dx
                if 0 <= cy < h and 0 <= cx < w:
                    acc[ri, cy, cx] += 1
    return acc
