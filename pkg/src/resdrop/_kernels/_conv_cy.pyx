# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled conv packing kernels; semantics match numpy_backend exactly."""

import numpy as np

cimport cython


ctypedef fused floating:
    float
    double


def im2col(floating[:, :, :, ::1] x, int kh, int kw, int stride, int padding):
    cdef Py_ssize_t n = x.shape[0], c = x.shape[1], h = x.shape[2], w = x.shape[3]
    cdef Py_ssize_t ho = (h + 2 * padding - kh) // stride + 1
    cdef Py_ssize_t wo = (w + 2 * padding - kw) // stride + 1
    if floating is float:
        out = np.empty((c * kh * kw, n * ho * wo), dtype=np.float32)
    else:
        out = np.empty((c * kh * kw, n * ho * wo), dtype=np.float64)
    cdef floating[:, ::1] cols = out
    cdef Py_ssize_t ci, i, j, ni, oi, oj, row, base, ih, iw
    for ci in range(c):
        for i in range(kh):
            for j in range(kw):
                row = (ci * kh + i) * kw + j
                for ni in range(n):
                    for oi in range(ho):
                        ih = oi * stride + i - padding
                        base = (ni * ho + oi) * wo
                        if 0 <= ih < h:
                            for oj in range(wo):
                                iw = oj * stride + j - padding
                                if 0 <= iw < w:
                                    cols[row, base + oj] = x[ni, ci, ih, iw]
                                else:
                                    cols[row, base + oj] = 0
                        else:
                            for oj in range(wo):
                                cols[row, base + oj] = 0
    return out, (ho, wo)


def col2im(floating[:, ::1] cols, tuple x_shape, int kh, int kw, int stride, int padding):
    cdef Py_ssize_t n = x_shape[0], c = x_shape[1], h = x_shape[2], w = x_shape[3]
    cdef Py_ssize_t ho = (h + 2 * padding - kh) // stride + 1
    cdef Py_ssize_t wo = (w + 2 * padding - kw) // stride + 1
    if floating is float:
        out = np.zeros((n, c, h, w), dtype=np.float32)
    else:
        out = np.zeros((n, c, h, w), dtype=np.float64)
    cdef floating[:, :, :, ::1] dx = out
    cdef Py_ssize_t ci, i, j, ni, oi, oj, row, base, ih, iw
    for ci in range(c):
        for i in range(kh):
            for j in range(kw):
                row = (ci * kh + i) * kw + j
                for ni in range(n):
                    for oi in range(ho):
                        ih = oi * stride + i - padding
                        if ih < 0 or ih >= h:
                            continue
                        base = (ni * ho + oi) * wo
                        for oj in range(wo):
                            iw = oj * stride + j - padding
                            if 0 <= iw < w:
                                dx[ni, ci, ih, iw] += cols[row, base + oj]
    return out
