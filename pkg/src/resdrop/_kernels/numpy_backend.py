"""Pure-numpy conv packing kernels (fallback when the extension is absent)."""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def im2col(x, kh, kw, stride, padding):
    """Unfold NCHW input into a (C*kh*kw, N*Ho*Wo) patch matrix.

    Column (n*Ho + oi)*Wo + oj holds the receptive field of output pixel
    (oi, oj) of sample n, rows ordered channel-major then kernel row/col.
    Returns (cols, (Ho, Wo)).
    """
    n, c, h, w = x.shape
    if padding:
        xp = np.zeros((n, c, h + 2 * padding, w + 2 * padding), dtype=x.dtype)
        xp[:, :, padding:padding + h, padding:padding + w] = x
    else:
        xp = x
    windows = sliding_window_view(xp, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
    ho, wo = windows.shape[2], windows.shape[3]
    cols = windows.transpose(1, 4, 5, 0, 2, 3).reshape(c * kh * kw, n * ho * wo)
    return cols, (ho, wo)


def col2im(cols, x_shape, kh, kw, stride, padding):
    """Fold a patch matrix back onto the input grid, summing overlaps.

    Exact adjoint of im2col; gradients of conv2d w.r.t. its input flow
    through here.
    """
    n, c, h, w = x_shape
    hp, wp = h + 2 * padding, w + 2 * padding
    ho = (hp - kh) // stride + 1
    wo = (wp - kw) // stride + 1
    dxp = np.zeros((n, c, hp, wp), dtype=cols.dtype)
    cols6 = cols.reshape(c, kh, kw, n, ho, wo)
    for i in range(kh):
        for j in range(kw):
            dxp[:, :, i:i + stride * ho:stride, j:j + stride * wo:stride] += (
                cols6[:, i, j].transpose(1, 0, 2, 3)
            )
    if padding:
        return np.ascontiguousarray(dxp[:, :, padding:padding + h, padding:padding + w])
    return dxp
