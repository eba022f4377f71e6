"""The operator set: conv, batch norm, relu, pooling, linear, loss.

Each op validates shapes, computes forward with numpy (conv via the packing
kernels), and attaches a hand-derived backward closure. All ops preserve the
input dtype, so the same code path serves float32 training and float64
gradient checks.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .autograd import Tensor, make_output


def _as_contiguous(t: Tensor) -> np.ndarray:
    return np.ascontiguousarray(t.data)


def conv2d(x: Tensor, weight: Tensor, stride: int = 1, padding: int = 0) -> Tensor:
    """2-d cross-correlation of NCHW input with OIHW weights, no bias.

    Hout = floor((H + 2*padding - Kh)/stride) + 1, same for Wout.
    """
    if x.ndim != 4 or weight.ndim != 4:
        raise ValueError("conv2d expects 4-d input and weight")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if padding < 0:
        raise ValueError("padding must be >= 0")
    n, cin, h, w = x.shape
    cout, cin_w, kh, kw = weight.shape
    if cin != cin_w:
        raise ValueError(f"conv2d channel mismatch: input has {cin}, weight expects {cin_w}")
    if kh > h + 2 * padding or kw > w + 2 * padding:
        raise ValueError("kernel larger than padded input")
    ho = (h + 2 * padding - kh) // stride + 1
    wo = (w + 2 * padding - kw) // stride + 1
    if ho < 1 or wo < 1:
        raise ValueError("resolution below network minimum")
    if x.dtype != weight.dtype:
        raise ValueError("conv2d input and weight dtypes must match")

    cols, _ = _kernels.im2col(_as_contiguous(x), kh, kw, stride, padding)
    wmat = weight.data.reshape(cout, cin * kh * kw)
    out = (wmat @ cols).reshape(cout, n, ho, wo).transpose(1, 0, 2, 3)
    out = np.ascontiguousarray(out)

    def backward(gout):
        gmat = np.ascontiguousarray(gout.transpose(1, 0, 2, 3)).reshape(cout, n * ho * wo)
        if weight.requires_grad:
            weight.accumulate_grad((gmat @ cols.T).reshape(weight.shape))
        if x.requires_grad:
            dcols = wmat.T @ gmat
            x.accumulate_grad(_kernels.col2im(dcols, (n, cin, h, w), kh, kw, stride, padding))

    return make_output(out, (x, weight), backward)


class RunningStats:
    """Per-channel running mean/variance updated by exponential moving average."""

    __slots__ = ("mean", "var")

    def __init__(self, channels: int, dtype=np.float32):
        self.mean = np.zeros(channels, dtype=dtype)
        self.var = np.ones(channels, dtype=dtype)


def batch_norm2d(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    running: RunningStats,
    training: bool,
    eps: float = 1e-5,
    momentum: float = 0.1,
) -> Tensor:
    """Channel-wise batch normalization over (N, H, W).

    Training mode normalizes by biased batch variance and updates the running
    stats (running variance stored unbiased); eval mode normalizes by the
    running stats.
    """
    if x.ndim != 4:
        raise ValueError("batch_norm2d expects NCHW input")
    n, c, h, w = x.shape
    if gamma.shape != (c,) or beta.shape != (c,):
        raise ValueError("gamma/beta must have shape (C,)")
    count = n * h * w

    if training:
        if count < 2:
            raise ValueError("batch_norm2d needs N*H*W >= 2 in train mode")
        mean = x.data.mean(axis=(0, 2, 3))
        var = x.data.var(axis=(0, 2, 3))
        running.mean[:] = (1.0 - momentum) * running.mean + momentum * mean
        running.var[:] = (1.0 - momentum) * running.var + momentum * var * (count / (count - 1))
    else:
        mean = running.mean
        var = running.var

    ivstd = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mean[None, :, None, None]) * ivstd[None, :, None, None]
    out = gamma.data[None, :, None, None] * xhat + beta.data[None, :, None, None]

    def backward(gout):
        if gamma.requires_grad:
            gamma.accumulate_grad((gout * xhat).sum(axis=(0, 2, 3)))
        if beta.requires_grad:
            beta.accumulate_grad(gout.sum(axis=(0, 2, 3)))
        if x.requires_grad:
            dxhat = gout * gamma.data[None, :, None, None]
            if training:
                sum_dxhat = dxhat.sum(axis=(0, 2, 3), keepdims=True)
                sum_dxhat_xhat = (dxhat * xhat).sum(axis=(0, 2, 3), keepdims=True)
                dx = (ivstd[None, :, None, None] / count) * (
                    count * dxhat - sum_dxhat - xhat * sum_dxhat_xhat
                )
            else:
                dx = dxhat * ivstd[None, :, None, None]
            x.accumulate_grad(dx.astype(x.dtype, copy=False))

    return make_output(out.astype(x.dtype, copy=False), (x, gamma, beta), backward)


def relu(x: Tensor) -> Tensor:
    """Elementwise max(0, x); subgradient at 0 is fixed to 0."""
    mask = x.data > 0
    out = np.where(mask, x.data, 0)

    def backward(gout):
        x.accumulate_grad(gout * mask)

    return make_output(out.astype(x.dtype, copy=False), (x,), backward)


def adaptive_avg_pool2d(x: Tensor, out_h: int, out_w: int) -> Tensor:
    """Average pooling with a fixed output size for any admissible input.

    Cell (i, j) averages input rows [floor(i*H/out_h), ceil((i+1)*H/out_h))
    and the analogous columns, so the output shape never depends on H, W.
    """
    if x.ndim != 4:
        raise ValueError("adaptive_avg_pool2d expects NCHW input")
    n, c, h, w = x.shape
    if out_h > h or out_w > w:
        raise ValueError(f"adaptive pool output {out_h}x{out_w} exceeds input {h}x{w}")
    if out_h < 1 or out_w < 1:
        raise ValueError("pool output must be >= 1")

    row_bounds = [(i * h // out_h, -((-(i + 1) * h) // out_h)) for i in range(out_h)]
    col_bounds = [(j * w // out_w, -((-(j + 1) * w) // out_w)) for j in range(out_w)]
    out = np.empty((n, c, out_h, out_w), dtype=x.dtype)
    for i, (r0, r1) in enumerate(row_bounds):
        for j, (c0, c1) in enumerate(col_bounds):
            out[:, :, i, j] = x.data[:, :, r0:r1, c0:c1].mean(axis=(2, 3))

    def backward(gout):
        dx = np.zeros_like(x.data)
        for i, (r0, r1) in enumerate(row_bounds):
            for j, (c0, c1) in enumerate(col_bounds):
                area = (r1 - r0) * (c1 - c0)
                dx[:, :, r0:r1, c0:c1] += gout[:, :, i:i + 1, j:j + 1] / area
        x.accumulate_grad(dx)

    return make_output(out, (x,), backward)


def flatten(x: Tensor) -> Tensor:
    """Collapse all non-batch dims: (N, ...) -> (N, F)."""
    n = x.shape[0]
    shape = x.shape

    def backward(gout):
        x.accumulate_grad(gout.reshape(shape))

    return make_output(x.data.reshape(n, -1), (x,), backward)


def add(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise sum of same-shape tensors (residual connections)."""
    if a.shape != b.shape:
        raise ValueError(f"add shape mismatch: {a.shape} vs {b.shape}")

    def backward(gout):
        a.accumulate_grad(gout)
        b.accumulate_grad(gout)

    return make_output(a.data + b.data, (a, b), backward)


def linear(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """Affine map: (N, F) @ (K, F)^T + (K,)."""
    if x.ndim != 2 or weight.ndim != 2:
        raise ValueError("linear expects 2-d input and weight")
    n, f = x.shape
    k, f_w = weight.shape
    if f != f_w:
        raise ValueError(f"linear feature mismatch: input has {f}, weight expects {f_w}")
    if bias.shape != (k,):
        raise ValueError("bias must have shape (K,)")
    out = x.data @ weight.data.T + bias.data

    def backward(gout):
        if weight.requires_grad:
            weight.accumulate_grad(gout.T @ x.data)
        if bias.requires_grad:
            bias.accumulate_grad(gout.sum(axis=0))
        if x.requires_grad:
            x.accumulate_grad(gout @ weight.data)

    return make_output(out, (x, weight, bias), backward)


def softmax_cross_entropy(logits: Tensor, labels, label_smoothing: float = 0.0) -> Tensor:
    """Mean cross-entropy of softmax(logits) against smoothed targets.

    labels is either an int vector (hard classes) or a (N, K) float matrix of
    class probabilities (e.g. from mixup); smoothing mixes the target with the
    uniform distribution. Gradient of the logits is (softmax - target)/N.
    """
    if logits.ndim != 2:
        raise ValueError("logits must be (N, K)")
    n, k = logits.shape
    if not 0.0 <= label_smoothing < 1.0:
        raise ValueError("label_smoothing must be in [0, 1)")

    labels = np.asarray(labels)
    if labels.ndim == 1:
        if labels.min(initial=0) < 0 or labels.max(initial=0) >= k:
            raise ValueError(f"label out of range [0, {k})")
        q = np.zeros((n, k), dtype=logits.dtype)
        q[np.arange(n), labels.astype(np.int64)] = 1.0
    elif labels.shape == (n, k):
        q = labels.astype(logits.dtype, copy=True)
    else:
        raise ValueError("labels must be int (N,) or float (N, K)")
    if label_smoothing > 0.0:
        q = (1.0 - label_smoothing) * q + label_smoothing / k

    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    sumexp = exp.sum(axis=1, keepdims=True)
    logp = shifted - np.log(sumexp)
    p = exp / sumexp
    loss = float(-(q * logp).sum() / n)

    def backward(gout):
        logits.accumulate_grad((p - q) * (gout / n))

    return make_output(np.asarray(loss, dtype=logits.dtype), (logits,), backward)
