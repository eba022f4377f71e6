"""SGD with momentum, the only optimizer the training protocol needs."""

from __future__ import annotations

from .autograd import Parameter


class SGD:
    """v <- momentum*v + grad + weight_decay*w;  w <- w - lr*v.

    step() consumes and clears gradients; a parameter without a gradient at
    step time is a hard error (the backward pass missed it).
    """

    def __init__(self, parameters: list[Parameter], lr: float, momentum: float = 0.9,
                 weight_decay: float = 0.0):
        if lr < 0:
            raise ValueError("lr must be >= 0")
        self.parameters = list(parameters)
        self.lr = lr
        self.momentum = momentum
        self.weight_decay = weight_decay

    def step(self):
        for p in self.parameters:
            g = p.value.grad
            if g is None:
                raise RuntimeError(f"parameter {p.name!r} has no gradient")
            buf = p.momentum_buffer
            buf *= self.momentum
            buf += g
            if self.weight_decay:
                buf += self.weight_decay * p.value.data
            p.value.data -= self.lr * buf
            p.value.grad = None

    def zero_grad(self):
        for p in self.parameters:
            p.value.grad = None
