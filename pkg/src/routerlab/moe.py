"""Two-expert trainable MoE regressors with hand-derived gradients.

``SoftMoEModel`` mixes two affine experts with an input-dependent sigmoid
router. ``HardMoEModel`` sends each input to a single expert (top-1) and
trains its router with the straight-through estimate
``g_st = g + p - stopgrad(p)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .model import ParameterError


def target(x):
    """Two-regime regression target with a jump of height 2 at ``x = 0``."""
    x = np.asarray(x, dtype=float)
    ripple = 0.05 * np.sin(8.0 * np.pi * x)
    return np.where(x < 0, -1.0 - 0.7 * x, 1.0 + 0.7 * x) + ripple


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def sample_batch(rng: np.random.Generator, size: int):
    x = rng.uniform(-1.0, 1.0, size)
    return x, target(x)


@dataclass
class SoftMoEModel:
    alpha: float
    beta: float
    w: np.ndarray  # expert slopes (w1, w2)
    c: np.ndarray  # expert intercepts (c1, c2)
    h: float = 0.0
    temp: float = 0.2
    reg: float = 1e-4
    lr: float = 0.05

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float).copy()
        self.c = np.asarray(self.c, dtype=float).copy()
        if self.temp <= 0:
            raise ParameterError(f"temp > 0 violated (temp={self.temp!r})")
        if self.reg < 0 or self.lr < 0:
            raise ParameterError("reg >= 0 and lr >= 0 required")

    def copy(self) -> SoftMoEModel:
        return replace(self)

    @property
    def boundary(self) -> float:
        """Decision boundary ``x* = -(beta + h) / alpha``; NaN when ``alpha == 0``."""
        if self.alpha == 0:
            return float("nan")
        return -(self.beta + self.h) / self.alpha

    @classmethod
    def init_random(cls, rng: np.random.Generator, **kw) -> SoftMoEModel:
        return cls(
            alpha=rng.uniform(0.5, 1.5),
            beta=0.0,
            w=rng.uniform(-0.5, 0.5, 2),
            c=rng.uniform(-0.5, 0.5, 2),
            **kw,
        )


def soft_forward(model: SoftMoEModel, x):
    """Return ``(prediction, p1)``."""
    x = np.asarray(x, dtype=float)
    p1 = sigmoid((model.alpha * x + model.beta + model.h) / model.temp)
    f1 = model.w[0] * x + model.c[0]
    f2 = model.w[1] * x + model.c[1]
    return p1 * f1 + (1.0 - p1) * f2, p1


def soft_loss(model: SoftMoEModel, x, y) -> float:
    pred, _ = soft_forward(model, x)
    return float(np.mean((pred - y) ** 2) + model.reg * (model.alpha**2 + model.beta**2))


def soft_gradients(model: SoftMoEModel, x, y) -> dict:
    """Analytic gradient of :func:`soft_loss` by parameter name."""
    x = np.asarray(x, dtype=float)
    p1 = sigmoid((model.alpha * x + model.beta + model.h) / model.temp)
    p2 = 1.0 - p1
    f1 = model.w[0] * x + model.c[0]
    f2 = model.w[1] * x + model.c[1]
    r2 = 2.0 * (p1 * f1 + p2 * f2 - y)  # d(residual^2)/d(pred)
    dz = r2 * (f1 - f2) * p1 * p2 / model.temp
    return {
        "alpha": float(np.mean(dz * x) + 2.0 * model.reg * model.alpha),
        "beta": float(np.mean(dz) + 2.0 * model.reg * model.beta),
        "w": np.array([np.mean(r2 * p1 * x), np.mean(r2 * p2 * x)]),
        "c": np.array([np.mean(r2 * p1), np.mean(r2 * p2)]),
    }


def soft_sgd_step(model: SoftMoEModel, x, y):
    """One SGD step; returns ``(new_model, loss_before_step)``."""
    loss = soft_loss(model, x, y)
    g = soft_gradients(model, x, y)
    lr = model.lr
    new = replace(
        model,
        alpha=model.alpha - lr * g["alpha"],
        beta=model.beta - lr * g["beta"],
        w=model.w - lr * g["w"],
        c=model.c - lr * g["c"],
    )
    return new, loss


def train_soft(model: SoftMoEModel, rng: np.random.Generator, steps: int, batch_size: int = 64) -> SoftMoEModel:
    """Run ``steps`` SGD steps on fresh uniform batches, updating ``model`` in place.

    Numerically identical to iterating :func:`soft_sgd_step`.
    """
    a, b, h, T, reg, lr = model.alpha, model.beta, model.h, model.temp, model.reg, model.lr
    w1, w2 = float(model.w[0]), float(model.w[1])
    c1, c2 = float(model.c[0]), float(model.c[1])
    for _ in range(steps):
        x, y = sample_batch(rng, batch_size)
        p1 = sigmoid((a * x + b + h) / T)
        p2 = 1.0 - p1
        f1 = w1 * x + c1
        f2 = w2 * x + c2
        r2 = 2.0 * (p1 * f1 + p2 * f2 - y)
        dz = r2 * (f1 - f2) * p1 * p2 / T
        ga = np.mean(dz * x) + 2.0 * reg * a
        gb = np.mean(dz) + 2.0 * reg * b
        gw1, gw2 = np.mean(r2 * p1 * x), np.mean(r2 * p2 * x)
        gc1, gc2 = np.mean(r2 * p1), np.mean(r2 * p2)
        a, b = a - lr * ga, b - lr * gb
        w1, w2 = w1 - lr * gw1, w2 - lr * gw2
        c1, c2 = c1 - lr * gc1, c2 - lr * gc2
    model.alpha, model.beta = float(a), float(b)
    model.w = np.array([w1, w2])
    model.c = np.array([c1, c2])
    return model


@dataclass
class HardMoEModel:
    W: np.ndarray  # router weights, logits z = W x + (h/2, -h/2)
    w: np.ndarray
    c: np.ndarray
    h: float = 0.0
    temp: float = 1.0
    lambda_lb: float = 0.0
    lr: float = 0.05

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=float).copy()
        self.w = np.asarray(self.w, dtype=float).copy()
        self.c = np.asarray(self.c, dtype=float).copy()
        if self.temp <= 0:
            raise ParameterError(f"temp > 0 violated (temp={self.temp!r})")
        if self.lambda_lb < 0 or self.lr < 0:
            raise ParameterError("lambda_lb >= 0 and lr >= 0 required")

    def copy(self) -> HardMoEModel:
        return replace(self)

    @classmethod
    def init_random(cls, rng: np.random.Generator, **kw) -> HardMoEModel:
        return cls(
            W=rng.uniform(-0.5, 0.5, 2),
            w=rng.uniform(-0.5, 0.5, 2),
            c=rng.uniform(-0.5, 0.5, 2),
            **kw,
        )


def _logits(model: HardMoEModel, x):
    z1 = model.W[0] * x + 0.5 * model.h
    z2 = model.W[1] * x - 0.5 * model.h
    return z1, z2


def hard_forward(model: HardMoEModel, x):
    """Return ``(prediction, selected index, p1)``; ties go to expert index 0."""
    x = np.asarray(x, dtype=float)
    z1, z2 = _logits(model, x)
    sel = np.where(z1 >= z2, 0, 1)
    p1 = sigmoid((z1 - z2) / model.temp)
    pred = np.where(sel == 0, model.w[0] * x + model.c[0], model.w[1] * x + model.c[1])
    return pred, sel, p1


@dataclass(frozen=True)
class HardStepStats:
    mse: float
    lb_loss: float
    u_hat: float  # hard load (N1 - N2) / B
    importance: float  # batch mean of p1
    dead_expert: int | None = None  # index of an expert that received no samples


def hard_objective(model: HardMoEModel, x, y):
    """``(mse, lb_loss)`` of the hard forward pass."""
    pred, _, p1 = hard_forward(model, x)
    m1 = float(np.mean(p1))
    lb = model.lambda_lb * ((m1 - 0.5) ** 2 + ((1.0 - m1) - 0.5) ** 2)
    return float(np.mean((pred - y) ** 2)), lb


def hard_gradients(model: HardMoEModel, x, y) -> dict:
    """Straight-through gradient of ``MSE + L_lb``.

    Experts receive gradient only from the samples routed to them. The router
    gradient differentiates ``p`` in place of the one-hot selection while the
    residual is taken from the hard prediction.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    pred, sel, p1 = hard_forward(model, x)
    g1 = (sel == 0).astype(float)
    g2 = 1.0 - g1
    f1 = model.w[0] * x + model.c[0]
    f2 = model.w[1] * x + model.c[1]
    r2 = 2.0 * (pred - y)
    pp = p1 * (1.0 - p1) / model.temp
    m1 = np.mean(p1)
    # dL/dz1 per sample; dL/dz2 is its negative
    dz1 = (r2 * (f1 - f2) + 4.0 * model.lambda_lb * (m1 - 0.5)) * pp / n
    gW1 = float(np.sum(dz1 * x))
    return {
        "W": np.array([gW1, -gW1]),
        "w": np.array([np.mean(r2 * g1 * x), np.mean(r2 * g2 * x)]),
        "c": np.array([np.mean(r2 * g1), np.mean(r2 * g2)]),
    }


def hard_sgd_step(model: HardMoEModel, x, y):
    """One straight-through SGD step; returns ``(new_model, HardStepStats)`` measured before the step."""
    x = np.asarray(x, dtype=float)
    _, sel, p1 = hard_forward(model, x)
    mse, lb = hard_objective(model, x, y)
    n1 = int(np.sum(sel == 0))
    dead = 1 if n1 == x.size else 0 if n1 == 0 else None
    stats = HardStepStats(
        mse=mse,
        lb_loss=lb,
        u_hat=(2.0 * n1 - x.size) / x.size,
        importance=float(np.mean(p1)),
        dead_expert=dead,
    )
    g = hard_gradients(model, x, y)
    lr = model.lr
    new = replace(model, W=model.W - lr * g["W"], w=model.w - lr * g["w"], c=model.c - lr * g["c"])
    return new, stats


def straight_through_surrogate(model: HardMoEModel, frozen: HardMoEModel, x, y) -> float:
    """Loss whose ordinary gradient at ``model == frozen`` is the straight-through gradient.

    The selection ``g`` and the stop-gradient copy of ``p`` are taken from
    ``frozen``; only ``p`` itself and the expert outputs depend on ``model``.
    """
    x = np.asarray(x, dtype=float)
    _, sel0, p1_0 = hard_forward(frozen, x)
    g1 = (sel0 == 0).astype(float)
    z1, z2 = _logits(model, x)
    p1 = sigmoid((z1 - z2) / model.temp)
    s1 = g1 + p1 - p1_0
    s2 = (1.0 - g1) + (1.0 - p1) - (1.0 - p1_0)
    f1 = model.w[0] * x + model.c[0]
    f2 = model.w[1] * x + model.c[1]
    m1 = np.mean(p1)
    lb = model.lambda_lb * ((m1 - 0.5) ** 2 + ((1.0 - m1) - 0.5) ** 2)
    return float(np.mean((s1 * f1 + s2 * f2 - y) ** 2) + lb)


def train_hard(model: HardMoEModel, rng: np.random.Generator, steps: int, batch_size: int = 64) -> HardMoEModel:
    """Run ``steps`` straight-through SGD steps in place; same arithmetic as :func:`hard_sgd_step`."""
    W1, W2 = float(model.W[0]), float(model.W[1])
    w1, w2 = float(model.w[0]), float(model.w[1])
    c1, c2 = float(model.c[0]), float(model.c[1])
    hh, T, lam, lr = 0.5 * model.h, model.temp, model.lambda_lb, model.lr
    for _ in range(steps):
        x, y = sample_batch(rng, batch_size)
        n = x.size
        z1 = W1 * x + hh
        z2 = W2 * x - hh
        g1 = z1 >= z2
        p1 = sigmoid((z1 - z2) / T)
        f1 = w1 * x + c1
        f2 = w2 * x + c2
        r2 = 2.0 * (np.where(g1, f1, f2) - y)
        pp = p1 * (1.0 - p1) / T
        m1 = np.mean(p1)
        dz1 = (r2 * (f1 - f2) + 4.0 * lam * (m1 - 0.5)) * pp / n
        gW1 = float(np.sum(dz1 * x))
        g1f = g1.astype(float)
        g2f = 1.0 - g1f
        gw1, gw2 = np.mean(r2 * g1f * x), np.mean(r2 * g2f * x)
        gc1, gc2 = np.mean(r2 * g1f), np.mean(r2 * g2f)
        W1, W2 = W1 - lr * gW1, W2 + lr * gW1
        w1, w2 = w1 - lr * gw1, w2 - lr * gw2
        c1, c2 = c1 - lr * gc1, c2 - lr * gc2
    model.W = np.array([W1, W2])
    model.w = np.array([w1, w2])
    model.c = np.array([c1, c2])
    return model
