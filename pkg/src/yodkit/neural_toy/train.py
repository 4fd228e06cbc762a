"""Batching, the training step and a small training loop."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
import torch.nn.functional as F

from yodkit.neural_toy.model import ModelConfig, ReadabilitySummarizer
from yodkit.neural_toy.objective import (
    LossBreakdown,
    TrainConfig,
    compose_total,
    dynamic_weight,
    lr_schedule,
)
from yodkit.neural_toy.vocab import ControlVocab, prepend_control_token


class NonFiniteLoss(FloatingPointError):
    pass


@dataclass(frozen=True)
class Example:
    source: str
    summary: str
    level: int


@dataclass
class Batch:
    src_ids: torch.Tensor
    src_mask: torch.Tensor
    tgt_in: torch.Tensor
    tgt_out: torch.Tensor
    level: torch.Tensor
    level_value: torch.Tensor

    def to(self, dtype: torch.dtype) -> "Batch":
        return Batch(self.src_ids, self.src_mask, self.tgt_in, self.tgt_out, self.level,
                     self.level_value.to(dtype))


def _pad(rows: Sequence[Sequence[int]], pad_id: int) -> torch.Tensor:
    width = max(len(r) for r in rows)
    return torch.tensor([list(r) + [pad_id] * (width - len(r)) for r in rows], dtype=torch.long)


def collate(examples: Sequence[Example], vocab: ControlVocab) -> Batch:
    """Encode examples; the control token goes in front of the encoder input only."""
    src = [prepend_control_token(vocab.encode(ex.source), ex.level, vocab) for ex in examples]
    tgt = [vocab.encode(ex.summary) for ex in examples]
    src_ids = _pad(src, vocab.pad_id)
    levels = torch.tensor([ex.level for ex in examples], dtype=torch.long)
    return Batch(
        src_ids=src_ids,
        src_mask=src_ids != vocab.pad_id,
        tgt_in=_pad([[vocab.bos_id, *t] for t in tgt], vocab.pad_id),
        tgt_out=_pad([[*t, vocab.eos_id] for t in tgt], vocab.pad_id),
        level=levels,
        level_value=levels.to(torch.float32),
    )


def loss_terms(model: ReadabilitySummarizer, batch: Batch):
    """The three unweighted loss tensors and the model outputs."""
    out = model(batch.src_ids, batch.src_mask, batch.tgt_in)
    ce = F.cross_entropy(
        out.token_logits.reshape(-1, out.token_logits.shape[-1]),
        batch.tgt_out.reshape(-1),
        ignore_index=model.pad_id,
    )
    mse = F.mse_loss(out.yod_score, batch.level_value.to(out.yod_score.dtype))
    class_ce = F.cross_entropy(out.yod_logits, batch.level - 1)
    return ce, mse, class_ce, out


def total_loss(model: ReadabilitySummarizer, batch: Batch, epoch: int) -> torch.Tensor:
    ce, mse, class_ce, _ = loss_terms(model, batch)
    return compose_total(ce, mse, class_ce, dynamic_weight(epoch))


def global_grad_norm(params) -> float:
    sq = 0.0
    for p in params:
        if p.grad is not None:
            sq += float(p.grad.detach().double().pow(2).sum())
    return math.sqrt(sq)


def clip_gradients(params, max_norm: float) -> float:
    """Rescale gradients so their global L2 norm is at most ``max_norm``.

    Returns the norm before clipping.
    """
    params = [p for p in params if p.grad is not None]
    norm = global_grad_norm(params)
    if norm > max_norm:
        scale = max_norm / norm
        for p in params:
            p.grad.mul_(scale)
    return norm


def make_optimizer(model: torch.nn.Module, cfg: TrainConfig) -> torch.optim.AdamW:
    return torch.optim.AdamW(
        model.parameters(), lr=cfg.lr, betas=cfg.betas, eps=cfg.eps, weight_decay=cfg.weight_decay
    )


@dataclass
class StepResult:
    loss: LossBreakdown
    lr: float
    grad_norm: float


def train_step(
    batch: Batch,
    model: ReadabilitySummarizer,
    optimizer: torch.optim.Optimizer,
    epoch: int,
    lr: float,
    clip_norm: float = 1.0,
) -> StepResult:
    """Forward, composite loss, backward, clip, AdamW update.

    The returned breakdown is measured before the update.
    """
    model.train()
    optimizer.zero_grad(set_to_none=True)
    ce, mse, class_ce, _ = loss_terms(model, batch)
    w = dynamic_weight(epoch)
    total = compose_total(ce, mse, class_ce, w)
    if not torch.isfinite(total):
        raise NonFiniteLoss(
            f"non-finite loss at epoch {epoch}: ce={ce.item()} mse={mse.item()} class={class_ce.item()}"
        )
    total.backward()
    norm = clip_gradients(model.parameters(), clip_norm)
    for group in optimizer.param_groups:
        group["lr"] = lr
    optimizer.step()
    breakdown = LossBreakdown(ce.item(), mse.item(), class_ce.item(), w, total.item())
    return StepResult(breakdown, lr, norm)


def epoch_order(levels: Sequence[int], cfg: TrainConfig, epoch: int,
                weights: np.ndarray | None = None) -> list[int]:
    """Example indices for one epoch, reproducible from ``(cfg.seed, epoch)``.

    ``weighted`` draws with replacement using per-level weights (uniform if
    none are given), ``shuffle`` permutes, ``sequential`` keeps order.
    """
    n = len(levels)
    if cfg.sampler == "sequential":
        return list(range(n))
    rng = np.random.default_rng([cfg.seed, epoch])
    if cfg.sampler == "shuffle":
        return rng.permutation(n).tolist()
    if weights is None:
        p = np.full(n, 1.0 / n)
    else:
        per = np.asarray([weights[level - 1] for level in levels], dtype=np.float64)
        p = per / per.sum()
    return rng.choice(n, size=n, replace=True, p=p).tolist()


@dataclass
class TrainResult:
    history: list[dict] = field(default_factory=list)

    @property
    def totals(self) -> list[float]:
        return [h["total"] for h in self.history]


def train(
    model: ReadabilitySummarizer,
    examples: Sequence[Example],
    vocab: ControlVocab,
    cfg: TrainConfig,
    weights: np.ndarray | None = None,
    log_path: str | Path | None = None,
    max_steps: int | None = None,
) -> TrainResult:
    """Run ``cfg.epochs`` epochs (or stop at ``max_steps``), logging every step."""
    torch.manual_seed(cfg.seed)
    steps_per_epoch = math.ceil(len(examples) / cfg.batch_size)
    total_steps = cfg.epochs * steps_per_epoch
    if max_steps is not None:
        total_steps = min(total_steps, max_steps)
    schedule_cfg = cfg if cfg.warmup_steps <= total_steps else TrainConfig(
        **{**asdict(cfg), "warmup_steps": total_steps}
    )
    optimizer = make_optimizer(model, cfg)
    levels = [ex.level for ex in examples]
    result = TrainResult()
    log = open(log_path, "w", encoding="utf-8") if log_path else None
    try:
        step = 0
        for epoch in range(cfg.epochs):
            order = epoch_order(levels, cfg, epoch, weights)
            for start in range(0, len(order), cfg.batch_size):
                if step >= total_steps:
                    break
                batch = collate([examples[i] for i in order[start : start + cfg.batch_size]], vocab)
                lr = lr_schedule(step, total_steps, schedule_cfg)
                res = train_step(batch, model, optimizer, epoch, lr, cfg.clip_norm)
                entry = {
                    "step": step,
                    "epoch": epoch,
                    "ce": res.loss.ce_loss,
                    "mse": res.loss.mse_loss,
                    "class": res.loss.class_loss,
                    "w_yod": res.loss.w_yod,
                    "total": res.loss.total,
                    "lr": res.lr,
                    "grad_norm": res.grad_norm,
                }
                result.history.append(entry)
                if log:
                    log.write(json.dumps(entry, sort_keys=True) + "\n")
                step += 1
    finally:
        if log:
            log.close()
    return result


@torch.no_grad()
def evaluate_examples(model: ReadabilitySummarizer, examples: Sequence[Example], vocab: ControlVocab) -> dict:
    """Classifier accuracy and total loss (at epoch 0 weighting) in eval mode."""
    model.eval()
    batch = collate(examples, vocab)
    ce, mse, class_ce, out = loss_terms(model, batch)
    pred_levels = out.yod_logits.argmax(-1) + 1
    return {
        "class_accuracy": float((pred_levels == batch.level).double().mean()),
        "ce": float(ce),
        "mse": float(mse),
        "class": float(class_ce),
    }


def build_model(vocab: ControlVocab, **overrides) -> ReadabilitySummarizer:
    return ReadabilitySummarizer(ModelConfig(vocab_size=len(vocab), **overrides), pad_id=vocab.pad_id)
