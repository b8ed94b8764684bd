"""Numba-jitted twins of the numpy kernels.

Each kernel mirrors the reference semantics in ``numpy_backend`` exactly,
including float accumulation order, so the two backends stay bit-identical.
Windowed kernels copy into a reflect-padded buffer first; the hot loops then
run over contiguous memory. All kernels compile lazily and cache to disk.
"""

import numpy as np
from numba import njit

BIG = 1e30


@njit(cache=True, inline="always")
def _reflect(i, n):
    # numpy 'reflect' padding: edge pixel not duplicated
    if n == 1:
        return 0
    period = 2 * n - 2
    i = abs(i) % period
    if i >= n:
        return period - i
    return i


@njit(cache=True)
def _pad_cols_u8(src, m):
    h, w = src.shape
    out = np.empty((h, w + 2 * m), np.uint8)
    out[:, m : m + w] = src
    for d in range(1, m + 1):
        jl = _reflect(-d, w)
        jr = _reflect(w - 1 + d, w)
        for i in range(h):
            out[i, m - d] = src[i, jl]
            out[i, m + w - 1 + d] = src[i, jr]
    return out


@njit(cache=True)
def _pad_rows_u8(src, m):
    h, w = src.shape
    out = np.empty((h + 2 * m, w), np.uint8)
    out[m : m + h, :] = src
    for d in range(1, m + 1):
        out[m - d, :] = src[_reflect(-d, h), :]
        out[m + h - 1 + d, :] = src[_reflect(h - 1 + d, h), :]
    return out


@njit(cache=True)
def _pad_cols_f64(src, m):
    h, w = src.shape
    out = np.empty((h, w + 2 * m), np.float64)
    out[:, m : m + w] = src
    for d in range(1, m + 1):
        jl = _reflect(-d, w)
        jr = _reflect(w - 1 + d, w)
        for i in range(h):
            out[i, m - d] = src[i, jl]
            out[i, m + w - 1 + d] = src[i, jr]
    return out


@njit(cache=True)
def _pad_rows_f64(src, m):
    h, w = src.shape
    out = np.empty((h + 2 * m, w), np.float64)
    out[m : m + h, :] = src
    for d in range(1, m + 1):
        out[m - d, :] = src[_reflect(-d, h), :]
        out[m + h - 1 + d, :] = src[_reflect(h - 1 + d, h), :]
    return out


@njit(cache=True)
def erode_u8(img, k):
    h, w = img.shape
    if k <= 1:
        return img.copy()
    m = k // 2
    pad = _pad_cols_u8(img, m)
    tmp = np.empty((h, w), np.uint8)
    for i in range(h):
        for j in range(w):
            best = pad[i, j]
            for t in range(1, k):
                v = pad[i, j + t]
                if v < best:
                    best = v
            tmp[i, j] = best
    padv = _pad_rows_u8(tmp, m)
    out = np.empty((h, w), np.uint8)
    for i in range(h):
        out[i, :] = padv[i, :]
        for t in range(1, k):
            row = padv[i + t]
            for j in range(w):
                if row[j] < out[i, j]:
                    out[i, j] = row[j]
    return out


@njit(cache=True)
def dilate_u8(img, k):
    h, w = img.shape
    if k <= 1:
        return img.copy()
    m = k // 2
    pad = _pad_cols_u8(img, m)
    tmp = np.empty((h, w), np.uint8)
    for i in range(h):
        for j in range(w):
            best = pad[i, j]
            for t in range(1, k):
                v = pad[i, j + t]
                if v > best:
                    best = v
            tmp[i, j] = best
    padv = _pad_rows_u8(tmp, m)
    out = np.empty((h, w), np.uint8)
    for i in range(h):
        out[i, :] = padv[i, :]
        for t in range(1, k):
            row = padv[i + t]
            for j in range(w):
                if row[j] > out[i, j]:
                    out[i, j] = row[j]
    return out


@njit(cache=True)
def median_u8(img, k):
    h, w = img.shape
    if k <= 1:
        return img.copy()
    m = k // 2
    half = (k * k) // 2 + 1  # rank of the median element, counts from 1
    pad = _pad_rows_u8(_pad_cols_u8(img, m), m)
    out = np.empty((h, w), np.uint8)
    hist = np.zeros(256, np.int32)
    for i in range(h):
        # histogram slides along the row: drop left column, add right column
        hist[:] = 0
        for di in range(k):
            for dj in range(k):
                hist[pad[i + di, dj]] += 1
        for j in range(w):
            if j > 0:
                for di in range(k):
                    hist[pad[i + di, j - 1]] -= 1
                    hist[pad[i + di, j + k - 1]] += 1
            c = 0
            for v in range(256):
                c += hist[v]
                if c >= half:
                    out[i, j] = v
                    break
    return out


@njit(cache=True)
def window_max_f64(img, m):
    h, w = img.shape
    if m <= 0:
        return img.copy()
    k = 2 * m + 1
    tmp = np.empty((h, w), np.float64)
    for i in range(h):
        for j in range(w):
            lo = j - m if j - m > 0 else 0
            hi = j + m + 1 if j + m + 1 < w else w
            best = -BIG
            for jj in range(lo, hi):
                if img[i, jj] > best:
                    best = img[i, jj]
            tmp[i, j] = best
    out = np.full((h, w), -BIG, np.float64)
    for i in range(h):
        lo = i - m if i - m > 0 else 0
        hi = i + m + 1 if i + m + 1 < h else h
        for ii in range(lo, hi):
            row = tmp[ii]
            for j in range(w):
                if row[j] > out[i, j]:
                    out[i, j] = row[j]
    return out


@njit(cache=True)
def sep_convolve_f64(img, taps):
    h, w = img.shape
    k = len(taps)
    m = k // 2
    pad = _pad_cols_f64(img, m)
    tmp = np.zeros((h, w), np.float64)
    for i in range(h):
        src = pad[i]
        dst = tmp[i]
        for t in range(k):
            tv = taps[t]
            for j in range(w):
                dst[j] += tv * src[j + t]
    padv = _pad_rows_f64(tmp, m)
    out = np.zeros((h, w), np.float64)
    for i in range(h):
        dst = out[i]
        for t in range(k):
            tv = taps[t]
            row = padv[i + t]
            for j in range(w):
                dst[j] += tv * row[j]
    return out


@njit(cache=True)
def sep_convolve_u8(img, taps):
    h, w = img.shape
    out = sep_convolve_f64(img.astype(np.float64), taps)
    res = np.empty((h, w), np.uint8)
    for i in range(h):
        for j in range(w):
            v = np.floor(out[i, j] + 0.5)
            if v < 0.0:
                v = 0.0
            elif v > 255.0:
                v = 255.0
            res[i, j] = np.uint8(v)
    return res


@njit(cache=True)
def conv3x3_i32(img, kern):
    h, w = img.shape
    pad = _pad_rows_u8(_pad_cols_u8(img, 1), 1)
    out = np.zeros((h, w), np.int32)
    for i in range(h):
        for dy in range(3):
            row = pad[i + dy]
            for dx in range(3):
                kv = np.int32(kern[dy, dx])
                if kv != 0:
                    for j in range(w):
                        out[i, j] += kv * np.int32(row[j + dx])
    return out


@njit(cache=True)
def edt_f64(mask):
    h, w = mask.shape
    big = float(h + w)
    g = np.empty((h, w), np.float64)
    any_fg = False
    for i in range(h):
        d = big
        for j in range(w):
            if mask[i, j] == 0:
                d = 0.0
            else:
                any_fg = True
                if d < big:
                    d = d + 1.0
            g[i, j] = d
        d = big
        for j in range(w - 1, -1, -1):
            if mask[i, j] == 0:
                d = 0.0
            elif d < big:
                d = d + 1.0
            if d < g[i, j]:
                g[i, j] = d
    if not any_fg:
        return np.zeros((h, w), np.float64)
    gt = g.T.copy()  # contiguous columns for the envelope pass
    outt = np.empty((w, h), np.float64)
    v = np.empty(h, np.int64)
    z = np.empty(h + 1, np.float64)
    f = np.empty(h, np.float64)
    for j in range(w):
        col = gt[j]
        dst = outt[j]
        for i in range(h):
            f[i] = col[i] * col[i]
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
            dst[q] = np.sqrt(dq * dq + f[v[kk]])
    return outt.T.copy()


@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def label_8(mask):
    h, w = mask.shape
    labels = np.zeros((h, w), np.int32)
    prov = np.zeros((h, w), np.int64)
    parent = np.empty(h * w // 2 + 2, np.int64)
    nprov = 0
    for i in range(h):
        for j in range(w):
            if mask[i, j] == 0:
                continue
            best = np.int64(-1)
            r0 = np.int64(-1)
            r1 = np.int64(-1)
            r2 = np.int64(-1)
            r3 = np.int64(-1)
            if i > 0:
                if j > 0 and mask[i - 1, j - 1] != 0:
                    r0 = _find(parent, prov[i - 1, j - 1])
                if mask[i - 1, j] != 0:
                    r1 = _find(parent, prov[i - 1, j])
                if j + 1 < w and mask[i - 1, j + 1] != 0:
                    r2 = _find(parent, prov[i - 1, j + 1])
            if j > 0 and mask[i, j - 1] != 0:
                r3 = _find(parent, prov[i, j - 1])
            for r in (r0, r1, r2, r3):
                if r >= 0 and (best < 0 or r < best):
                    best = r
            if best < 0:
                prov[i, j] = nprov
                parent[nprov] = nprov
                nprov += 1
            else:
                prov[i, j] = best
                for r in (r0, r1, r2, r3):
                    if r >= 0:
                        parent[r] = best
    remap = np.zeros(nprov, np.int32)
    count = 0
    for i in range(h):
        for j in range(w):
            if mask[i, j] == 0:
                continue
            r = _find(parent, prov[i, j])
            if remap[r] == 0:
                count += 1
                remap[r] = count
            labels[i, j] = remap[r]
    return labels, count


@njit(cache=True, inline="always")
def _heap_less(hv, ho, a, b):
    if hv[a] < hv[b]:
        return True
    if hv[a] > hv[b]:
        return False
    return ho[a] < ho[b]


@njit(cache=True)
def _heap_push(hv, ho, hy, hx, size, v, o, y, x):
    i = size
    hv[i] = v
    ho[i] = o
    hy[i] = y
    hx[i] = x
    while i > 0:
        p = (i - 1) >> 1
        if _heap_less(hv, ho, i, p):
            hv[i], hv[p] = hv[p], hv[i]
            ho[i], ho[p] = ho[p], ho[i]
            hy[i], hy[p] = hy[p], hy[i]
            hx[i], hx[p] = hx[p], hx[i]
            i = p
        else:
            break
    return size + 1


@njit(cache=True)
def _heap_pop(hv, ho, hy, hx, size):
    y = hy[0]
    x = hx[0]
    size -= 1
    if size > 0:
        hv[0] = hv[size]
        ho[0] = ho[size]
        hy[0] = hy[size]
        hx[0] = hx[size]
        i = 0
        while True:
            l = 2 * i + 1
            r = l + 1
            small = i
            if l < size and _heap_less(hv, ho, l, small):
                small = l
            if r < size and _heap_less(hv, ho, r, small):
                small = r
            if small == i:
                break
            hv[i], hv[small] = hv[small], hv[i]
            ho[i], ho[small] = ho[small], ho[i]
            hy[i], hy[small] = hy[small], hy[i]
            hx[i], hx[small] = hx[small], hx[i]
            i = small
    return y, x, size


@njit(cache=True)
def priority_flood(topo, seeds, mask):
    h, w = topo.shape
    labels = np.zeros((h, w), np.int32)
    cap = h * w + 1
    hv = np.empty(cap, np.float64)
    ho = np.empty(cap, np.int64)
    hy = np.empty(cap, np.int64)
    hx = np.empty(cap, np.int64)
    size = 0
    order = 0
    for i in range(h):
        for j in range(w):
            if seeds[i, j] > 0 and mask[i, j] != 0:
                labels[i, j] = seeds[i, j]
                size = _heap_push(hv, ho, hy, hx, size, topo[i, j], order, i, j)
                order += 1
    while size > 0:
        i, j, size = _heap_pop(hv, ho, hy, hx, size)
        lab = labels[i, j]
        for di in range(-1, 2):
            ni = i + di
            if ni < 0 or ni >= h:
                continue
            for dj in range(-1, 2):
                if di == 0 and dj == 0:
                    continue
                nj = j + dj
                if nj < 0 or nj >= w:
                    continue
                if mask[ni, nj] != 0 and labels[ni, nj] == 0:
                    labels[ni, nj] = lab
                    size = _heap_push(hv, ho, hy, hx, size, topo[ni, nj], order, ni, nj)
                    order += 1
    return labels


@njit(cache=True)
def greedy_select(ys, xs, h, w, min_sep):
    n = len(ys)
    flags = np.zeros(n, np.uint8)
    taken = np.zeros((h, w), np.uint8)
    sr = int(np.ceil(min_sep)) - 1
    if sr < 0:
        sr = 0
    sep2 = min_sep * min_sep
    for i in range(n):
        y = int(ys[i])
        x = int(xs[i])
        ok = True
        y0 = y - sr if y - sr > 0 else 0
        y1 = y + sr + 1 if y + sr + 1 < h else h
        x0 = x - sr if x - sr > 0 else 0
        x1 = x + sr + 1 if x + sr + 1 < w else w
        for yy in range(y0, y1):
            dy2 = (yy - y) * (yy - y)
            for xx in range(x0, x1):
                if taken[yy, xx] != 0 and dy2 + (xx - x) * (xx - x) < sep2:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            flags[i] = 1
            taken[y, x] = 1
    return flags


@njit(cache=True)
def hough_votes(ys, xs, r_min, r_max, h, w):
    nr = r_max - r_min + 1
    acc = np.zeros((nr, h, w), np.int32)
    for ri in range(nr):
        r = r_min + ri
        lo2 = (r - 0.5) ** 2
        hi2 = (r + 0.5) ** 2
        for p in range(len(ys)):
            y = ys[p]
            x = xs[p]
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
                cy = y - dy
                if cy < 0 or cy >= h:
                    continue
                for dx in range(dx_min, dx_max + 1):
                    cx = x - dx
                    if 0 <= cx < w:
                        acc[ri, cy, cx] += 1
                    if dx > 0:
                        cx = x + dx
                        if 0 <= cx < w:
                            acc[ri, cy, cx] += 1
    return acc
