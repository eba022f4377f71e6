"""Reverse-mode autodiff over dense numpy arrays.

Tensors form a tape as ops run; ``Tensor.backward`` walks it in reverse
topological order. Ops attach a single fused backward closure rather than
decomposing into primitives, which keeps the tape short and the arithmetic
explicit.
"""

from __future__ import annotations

import numpy as np

_grad_enabled = True

_FLOAT_DTYPES = (np.float32, np.float64)


def grad_enabled() -> bool:
    return _grad_enabled


class no_grad:
    """Context manager that suspends tape construction."""

    def __enter__(self):
        global _grad_enabled
        self._prev = _grad_enabled
        _grad_enabled = False

    def __exit__(self, *exc):
        global _grad_enabled
        _grad_enabled = self._prev
        return False


class Tensor:
    """Dense N-d array with an optional gradient buffer.

    Image batches follow NCHW. Data is float32 or float64; grad, when
    present, always matches data's shape and dtype.
    """

    __slots__ = ("data", "grad", "requires_grad", "_backward", "_prev")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        arr = np.asarray(data, dtype=dtype)
        if arr.dtype not in _FLOAT_DTYPES:
            arr = arr.astype(np.float32)
        self.data = arr
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._backward = None
        self._prev = ()

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self):
        return self.data.size

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype}, requires_grad={self.requires_grad})"

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self):
        self.grad = None

    def accumulate_grad(self, g: np.ndarray):
        if not self.requires_grad:
            return
        if self.grad is None:
            self.grad = np.array(g, dtype=self.data.dtype, copy=True)
        else:
            self.grad += g

    def backward(self, grad=None):
        """Backpropagate from this tensor through the recorded tape."""
        if grad is None:
            grad = np.ones_like(self.data)
        self.grad = np.asarray(grad, dtype=self.data.dtype)
        if self.grad.shape != self.data.shape:
            raise ValueError("seed gradient shape must match tensor shape")

        topo: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for prev in node._prev:
                if id(prev) not in visited:
                    stack.append((prev, False))

        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)


def make_output(data: np.ndarray, inputs: tuple[Tensor, ...], backward) -> Tensor:
    """Wrap an op result, recording the tape edge when grads are live."""
    track = _grad_enabled and any(t.requires_grad for t in inputs)
    out = Tensor(data, requires_grad=track)
    if track:
        out._prev = tuple(t for t in inputs if t.requires_grad)
        out._backward = backward
    return out


class Parameter:
    """Trainable tensor plus its momentum buffer and a unique name path."""

    __slots__ = ("value", "momentum_buffer", "name")

    def __init__(self, data, name: str):
        self.value = Tensor(data)
        self.value.requires_grad = True
        self.momentum_buffer = np.zeros_like(self.value.data)
        self.name = name

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return f"Parameter({self.name}, shape={self.value.shape})"
