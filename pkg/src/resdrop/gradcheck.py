"""Finite-difference oracle for the analytic backward passes."""

from __future__ import annotations

import numpy as np

from .autograd import Tensor, no_grad
from .rng import stream


def finite_difference_check(fn, inputs, h: float = 1e-5, projection_seed: int = 0) -> float:
    """Max relative error between analytic and central-difference gradients.

    fn maps the given tensors to one output tensor. The output is projected
    onto a fixed random direction G so a scalar L = sum(fn(x) * G) can be
    differenced coordinate-by-coordinate: (L(x+h) - L(x-h)) / 2h. Inputs
    should be float64; float32 has too little headroom for h ~ 1e-5.
    """
    tensors = []
    for t in inputs:
        if not isinstance(t, Tensor):
            t = Tensor(np.asarray(t, dtype=np.float64), requires_grad=True)
        tensors.append(t)

    out = fn(*tensors)
    g = stream("finite-difference-projection", projection_seed).gaussians(out.size)
    g = g.reshape(out.shape).astype(out.dtype)
    for t in tensors:
        t.zero_grad()
    out.backward(g)

    def loss_at() -> float:
        with no_grad():
            return float((fn(*tensors).data * g).sum())

    max_rel = 0.0
    for t in tensors:
        if not t.requires_grad:
            continue
        analytic = t.grad if t.grad is not None else np.zeros_like(t.data)
        flat = t.data.reshape(-1)
        aflat = analytic.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            plus = loss_at()
            flat[i] = orig - h
            minus = loss_at()
            flat[i] = orig
            numeric = (plus - minus) / (2.0 * h)
            denom = max(abs(aflat[i]), abs(numeric), 1e-6)
            max_rel = max(max_rel, abs(aflat[i] - numeric) / denom)
    return max_rel
