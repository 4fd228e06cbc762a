"""Multi-task loss weighting and the learning-rate schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass

CLASS_WEIGHT = 4.0
W_YOD_START = 0.4
W_YOD_STEP = 0.05
W_YOD_EVERY = 3
W_YOD_MAX = 0.8


@dataclass(frozen=True)
class LossBreakdown:
    ce_loss: float
    mse_loss: float
    class_loss: float
    w_yod: float
    total: float
    class_weight: float = CLASS_WEIGHT


def dynamic_weight(epoch: int) -> float:
    """Regression-loss weight: 0.4, plus 0.05 every 3 epochs, capped at 0.8."""
    if epoch < 0:
        raise ValueError("epoch must be non-negative")
    # Integer arithmetic in hundredths keeps each step value exact (0.45, 0.5, ...).
    hundredths = min(40 + 5 * (epoch // W_YOD_EVERY), 80)
    return hundredths / 100


def compose_total(ce, mse, class_ce, w_yod):
    """Summarization CE + w * regression MSE + 4 * classification CE.

    Works on floats and on tensors alike.
    """
    return ce + w_yod * mse + CLASS_WEIGHT * class_ce


def composite_loss(ce: float, mse: float, class_ce: float, epoch: int) -> LossBreakdown:
    if min(ce, mse, class_ce) < 0:
        raise ValueError("loss terms must be non-negative")
    w = dynamic_weight(epoch)
    return LossBreakdown(ce, mse, class_ce, w, compose_total(ce, mse, class_ce, w))


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-5
    warmup_steps: int = 500
    epochs: int = 11
    batch_size: int = 64
    weight_decay: float = 0.01
    clip_norm: float = 1.0
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    seed: int = 0
    sampler: str = "weighted"

    def __post_init__(self):
        if self.lr < 0 or self.warmup_steps < 0 or self.epochs <= 0 or self.batch_size <= 0:
            raise ValueError("invalid training configuration")
        if self.clip_norm <= 0:
            raise ValueError("clip_norm must be positive")
        if self.sampler not in ("weighted", "shuffle", "sequential"):
            raise ValueError(f"unknown sampler {self.sampler!r}")


def lr_schedule(step: int, total_steps: int, cfg: TrainConfig) -> float:
    """Linear warmup from 0 to ``cfg.lr``, then cosine decay to 0 at ``total_steps``."""
    warmup = cfg.warmup_steps
    if not 0 <= step <= total_steps or warmup > total_steps:
        raise ValueError(f"step {step} outside [0, {total_steps}] or warmup too long")
    if step < warmup:
        return cfg.lr * step / warmup
    if total_steps == warmup:
        return cfg.lr if step < total_steps else 0.0
    progress = (step - warmup) / (total_steps - warmup)
    if progress >= 1.0:
        return 0.0
    return cfg.lr * 0.5 * (1.0 + math.cos(math.pi * progress))
