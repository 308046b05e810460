# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementation of the pixel kernels.

Semantics are identical to ``_reference``; the test suite cross-checks
both backends bit for bit.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def grey_erode(img, offsets, domain):
    cdef double[:, ::1] v = np.ascontiguousarray(img, dtype=np.float64)
    cdef cnp.int64_t[:, ::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef cnp.uint8_t[:, ::1] dom = np.ascontiguousarray(domain, dtype=np.uint8)
    cdef Py_ssize_t h = v.shape[0], w = v.shape[1], k = off.shape[0]
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t y, x, i, qy, qx
    cdef double best, val
    with nogil:
        for y in range(h):
            for x in range(w):
                best = INFINITY
                for i in range(k):
                    qy = y + off[i, 0]
                    qx = x + off[i, 1]
                    if 0 <= qy < h and 0 <= qx < w and dom[qy, qx]:
                        val = v[qy, qx]
                        if val < best:
                            best = val
                out[y, x] = best
    return out_arr


def grey_dilate(img, offsets, domain):
    cdef double[:, ::1] v = np.ascontiguousarray(img, dtype=np.float64)
    cdef cnp.int64_t[:, ::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef cnp.uint8_t[:, ::1] dom = np.ascontiguousarray(domain, dtype=np.uint8)
    cdef Py_ssize_t h = v.shape[0], w = v.shape[1], k = off.shape[0]
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t y, x, i, qy, qx
    cdef double best, val
    with nogil:
        for y in range(h):
            for x in range(w):
                best = -INFINITY
                for i in range(k):
                    qy = y + off[i, 0]
                    qx = x + off[i, 1]
                    if 0 <= qy < h and 0 <= qx < w and dom[qy, qx]:
                        val = v[qy, qx]
                        if val > best:
                            best = val
                out[y, x] = best
    return out_arr


def binary_erode(mask, offsets):
    cdef cnp.uint8_t[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef cnp.int64_t[:, ::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1], k = off.shape[0]
    out_arr = np.zeros((h, w), dtype=bool)
    cdef cnp.uint8_t[:, ::1] out = out_arr.view(np.uint8)
    cdef Py_ssize_t y, x, i, qy, qx
    cdef bint keep
    with nogil:
        for y in range(h):
            for x in range(w):
                keep = True
                for i in range(k):
                    qy = y + off[i, 0]
                    qx = x + off[i, 1]
                    if qy < 0 or qy >= h or qx < 0 or qx >= w or not m[qy, qx]:
                        keep = False
                        break
                out[y, x] = keep
    return out_arr


def binary_median(mask, kernel):
    cdef cnp.uint8_t[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    cdef Py_ssize_t half = kernel // 2, majority = (kernel * kernel) // 2
    out_arr = np.zeros((h, w), dtype=bool)
    cdef cnp.uint8_t[:, ::1] out = out_arr.view(np.uint8)
    cdef Py_ssize_t y, x, dy, dx, qy, qx, count
    with nogil:
        for y in range(h):
            for x in range(w):
                count = 0
                for dy in range(-half, half + 1):
                    qy = y + dy
                    if qy < 0:
                        qy = 0
                    elif qy >= h:
                        qy = h - 1
                    for dx in range(-half, half + 1):
                        qx = x + dx
                        if qx < 0:
                            qx = 0
                        elif qx >= w:
                            qx = w - 1
                        count += m[qy, qx]
                out[y, x] = count > majority
    return out_arr


def fill_holes(mask):
    cdef cnp.uint8_t[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    reach_arr = np.zeros((h, w), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] reach = reach_arr
    stack_arr = np.empty(h * w, dtype=np.int64)
    cdef cnp.int64_t[::1] stack = stack_arr
    cdef Py_ssize_t top = 0, y, x, p, qy, qx, i
    cdef Py_ssize_t[4] dys = [-1, 1, 0, 0]
    cdef Py_ssize_t[4] dxs = [0, 0, -1, 1]
    with nogil:
        # seed with background pixels on the frame border
        for x in range(w):
            if not m[0, x] and not reach[0, x]:
                reach[0, x] = 1
                stack[top] = x
                top += 1
            if not m[h - 1, x] and not reach[h - 1, x]:
                reach[h - 1, x] = 1
                stack[top] = (h - 1) * w + x
                top += 1
        for y in range(h):
            if not m[y, 0] and not reach[y, 0]:
                reach[y, 0] = 1
                stack[top] = y * w
                top += 1
            if not m[y, w - 1] and not reach[y, w - 1]:
                reach[y, w - 1] = 1
                stack[top] = y * w + w - 1
                top += 1
        while top > 0:
            top -= 1
            p = stack[top]
            y = p // w
            x = p - y * w
            for i in range(4):
                qy = y + dys[i]
                qx = x + dxs[i]
                if 0 <= qy < h and 0 <= qx < w and not m[qy, qx] and not reach[qy, qx]:
                    reach[qy, qx] = 1
                    stack[top] = qy * w + qx
                    top += 1
    out_arr = np.empty((h, w), dtype=bool)
    cdef cnp.uint8_t[:, ::1] out = out_arr.view(np.uint8)
    with nogil:
        for y in range(h):
            for x in range(w):
                out[y, x] = m[y, x] or not reach[y, x]
    return out_arr


cdef inline cnp.int32_t _find(cnp.int32_t[::1] parent, cnp.int32_t a) noexcept nogil:
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


def label_components(mask):
    cdef cnp.uint8_t[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    labels_arr = np.zeros((h, w), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] lab = labels_arr
    # provisional labels: a new one only appears when no prior neighbor is
    # labeled, which cannot happen more than every other pixel
    parent_arr = np.zeros(h * w // 2 + 2, dtype=np.int32)
    cdef cnp.int32_t[::1] parent = parent_arr
    remap_arr = np.zeros(h * w // 2 + 2, dtype=np.int32)
    cdef cnp.int32_t[::1] remap = remap_arr
    cdef Py_ssize_t y, x, i, qy, qx
    cdef cnp.int32_t nxt = 0, cur, nb, ra, rb, count = 0
    cdef Py_ssize_t[4] dys = [-1, -1, -1, 0]
    cdef Py_ssize_t[4] dxs = [-1, 0, 1, -1]
    with nogil:
        for y in range(h):
            for x in range(w):
                if not m[y, x]:
                    continue
                cur = 0
                for i in range(4):
                    qy = y + dys[i]
                    qx = x + dxs[i]
                    if qy < 0 or qx < 0 or qx >= w:
                        continue
                    nb = lab[qy, qx]
                    if nb == 0:
                        continue
                    if cur == 0:
                        cur = nb
                    else:
                        ra = _find(parent, cur)
                        rb = _find(parent, nb)
                        if ra != rb:
                            if ra < rb:
                                parent[rb] = ra
                            else:
                                parent[ra] = rb
                                cur = nb
                if cur == 0:
                    nxt += 1
                    parent[nxt] = nxt
                    cur = nxt
                lab[y, x] = cur
        # second pass: number components by first raster encounter
        for y in range(h):
            for x in range(w):
                if lab[y, x]:
                    ra = _find(parent, lab[y, x])
                    if remap[ra] == 0:
                        count += 1
                        remap[ra] = count
                    lab[y, x] = remap[ra]
    return labels_arr, int(count)
