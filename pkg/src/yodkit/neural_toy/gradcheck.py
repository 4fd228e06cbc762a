"""Central finite differences against autograd for the composite loss."""

from __future__ import annotations

from dataclasses import dataclass, field

import torch

from yodkit.neural_toy.model import ReadabilitySummarizer
from yodkit.neural_toy.train import Batch, total_loss

ABS_FALLBACK = 1e-8

# Parameter groups that must be represented in every check.
DEFAULT_TARGETS = (
    "embed.weight",
    "encoder.layers.0.self_attn.in_proj_weight",
    "encoder.layers.0.self_attn.out_proj.weight",
    "encoder.layers.1.linear1.weight",
    "decoder.layers.0.multihead_attn.in_proj_weight",
    "lm_head.weight",
    "regressor.layers.0.weight",
    "regressor.layers.3.weight",
    "regressor.layers.3.bias",
    "classifier.layers.0.weight",
    "classifier.layers.3.weight",
    "classifier.layers.3.bias",
)


@dataclass
class GradCheckResult:
    max_rel_error: float
    checked: int
    per_parameter: dict[str, float] = field(default_factory=dict)

    def passed(self, threshold: float = 1e-4) -> bool:
        return self.max_rel_error <= threshold


def relative_error(analytic: float, numeric: float) -> float:
    scale = max(abs(analytic), abs(numeric))
    diff = abs(analytic - numeric)
    return diff if scale < ABS_FALLBACK else diff / scale


def _pick_entries(grad: torch.Tensor, k: int, gen: torch.Generator) -> list[int]:
    flat = grad.reshape(-1).abs()
    # Prefer entries whose gradient is large enough for a meaningful ratio.
    floor = max(1e-6, 1e-3 * float(flat.max()))
    candidates = torch.nonzero(flat > floor).reshape(-1)
    if len(candidates) == 0:
        candidates = torch.arange(flat.numel())
    perm = torch.randperm(len(candidates), generator=gen)[:k]
    return sorted(candidates[perm].tolist())


def gradient_check(
    model: ReadabilitySummarizer,
    batch: Batch,
    epsilon: float = 1e-5,
    epoch: int = 0,
    per_tensor: int = 5,
    targets: tuple[str, ...] = DEFAULT_TARGETS,
    seed: int = 0,
    sign_flip: str | None = None,
) -> GradCheckResult:
    """Max relative error between backprop and central differences.

    The model must be double precision. Dropout is switched off for the
    check. ``sign_flip`` names a parameter whose backpropagated gradient is
    negated, simulating a broken backward pass.
    """
    if next(model.parameters()).dtype != torch.float64:
        raise TypeError("gradient_check needs a float64 model")
    batch = batch.to(torch.float64)
    was_training = model.training
    model.eval()
    params = dict(model.named_parameters())
    missing = [t for t in targets if t not in params]
    if missing:
        raise KeyError(f"unknown parameters: {missing}")

    handle = None
    if sign_flip is not None:
        handle = params[sign_flip].register_hook(lambda g: -g)
    try:
        model.zero_grad(set_to_none=True)
        with torch.enable_grad():
            total_loss(model, batch, epoch).backward()
    finally:
        if handle is not None:
            handle.remove()

    gen = torch.Generator().manual_seed(seed)
    result = GradCheckResult(0.0, 0)
    with torch.enable_grad():
        for name in targets:
            p = params[name]
            grad = p.grad.detach().clone()
            worst = 0.0
            for idx in _pick_entries(grad, per_tensor, gen):
                flat = p.data.view(-1)
                orig = flat[idx].item()
                flat[idx] = orig + epsilon
                plus = total_loss(model, batch, epoch).item()
                flat[idx] = orig - epsilon
                minus = total_loss(model, batch, epoch).item()
                flat[idx] = orig
                numeric = (plus - minus) / (2 * epsilon)
                err = relative_error(grad.view(-1)[idx].item(), numeric)
                worst = max(worst, err)
                result.checked += 1
            result.per_parameter[name] = worst
            result.max_rel_error = max(result.max_rel_error, worst)
    model.zero_grad(set_to_none=True)
    model.train(was_training)
    return result
