"""Toy encoder-decoder with readability regression and classification heads."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import torch
from torch import nn

NUM_LEVELS = 16


class AllMasked(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    d_model: int = 64
    encoder_layers: int = 2
    decoder_layers: int = 2
    heads: int = 2
    ff_dim: int = 128
    head_dims: tuple[int, int, int] = (512, 256, 128)
    dropout: float = 0.1
    max_len: int = 512
    seed: int = 0

    def __post_init__(self):
        if self.d_model <= 0 or self.vocab_size <= 0:
            raise ValueError("d_model and vocab_size must be positive")
        if len(self.head_dims) != 3 or not self.head_dims[0] > self.head_dims[1] > self.head_dims[2] > 0:
            raise ValueError(f"head_dims must be three strictly decreasing widths, got {self.head_dims}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")
        if self.d_model % self.heads:
            raise ValueError("d_model must be divisible by heads")

    def to_json(self) -> dict:
        d = asdict(self)
        d["head_dims"] = list(self.head_dims)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "ModelConfig":
        return cls(**{**d, "head_dims": tuple(d["head_dims"])})


def mean_pool(hidden_states: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
    """Average of hidden states over unmasked positions.

    Accepts ``(T, d)`` with mask ``(T,)`` or batched ``(B, T, d)`` with ``(B, T)``.
    """
    if hidden_states.shape[:-1] != attention_mask.shape:
        raise ValueError(
            f"mask shape {tuple(attention_mask.shape)} does not match states {tuple(hidden_states.shape)}"
        )
    mask = attention_mask.to(hidden_states.dtype)
    counts = mask.sum(dim=-1, keepdim=True)
    if (counts == 0).any():
        raise AllMasked("attention mask has no unmasked position")
    return (hidden_states * mask.unsqueeze(-1)).sum(dim=-2) / counts


class MLPHead(nn.Module):
    """d -> h1 -> h2 -> h3 -> out with ReLU and dropout after each hidden layer."""

    def __init__(self, in_dim: int, hidden: tuple[int, int, int], out_dim: int, dropout: float):
        super().__init__()
        dims = (in_dim, *hidden, out_dim)
        self.layers = nn.ModuleList(nn.Linear(a, b) for a, b in zip(dims[:-1], dims[1:]))
        self.dropout = nn.Dropout(dropout)
        for layer in self.layers:
            nn.init.xavier_uniform_(layer.weight)
            nn.init.zeros_(layer.bias)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        for layer in self.layers[:-1]:
            x = self.dropout(torch.relu(layer(x)))
        return self.layers[-1](x)


def yod_regressor(pooled: torch.Tensor, head: MLPHead) -> torch.Tensor:
    """Continuous YOD prediction, one scalar per pooled vector."""
    return head(pooled).squeeze(-1)


def yod_classifier(pooled: torch.Tensor, head: MLPHead) -> torch.Tensor:
    """Sixteen logits; class index ``k`` stands for YOD level ``k + 1``."""
    return head(pooled)


def sinusoidal_positions(max_len: int, d_model: int) -> torch.Tensor:
    pos = torch.arange(max_len, dtype=torch.float64).unsqueeze(1)
    div = torch.exp(torch.arange(0, d_model, 2, dtype=torch.float64) * (-math.log(10000.0) / d_model))
    table = torch.zeros(max_len, d_model, dtype=torch.float64)
    table[:, 0::2] = torch.sin(pos * div)
    table[:, 1::2] = torch.cos(pos * div)[:, : d_model // 2]
    return table.float()


@dataclass
class ModelOutputs:
    token_logits: torch.Tensor
    yod_score: torch.Tensor
    yod_logits: torch.Tensor
    pooled: torch.Tensor


class ReadabilitySummarizer(nn.Module):
    """Seq2seq transformer whose pooled encoder state feeds two YOD heads."""

    def __init__(self, config: ModelConfig, pad_id: int = 0):
        super().__init__()
        self.config = config
        self.pad_id = pad_id
        torch.manual_seed(config.seed)
        d = config.d_model
        self.embed = nn.Embedding(config.vocab_size, d, padding_idx=pad_id)
        self.register_buffer("positions", sinusoidal_positions(config.max_len, d), persistent=False)
        self.encoder = nn.TransformerEncoder(
            nn.TransformerEncoderLayer(d, config.heads, config.ff_dim, config.dropout, batch_first=True),
            config.encoder_layers,
            enable_nested_tensor=False,
        )
        self.decoder = nn.TransformerDecoder(
            nn.TransformerDecoderLayer(d, config.heads, config.ff_dim, config.dropout, batch_first=True),
            config.decoder_layers,
        )
        self.lm_head = nn.Linear(d, config.vocab_size)
        self.regressor = MLPHead(d, config.head_dims, 1, config.dropout)
        self.classifier = MLPHead(d, config.head_dims, NUM_LEVELS, config.dropout)

    def _embed(self, ids: torch.Tensor) -> torch.Tensor:
        x = self.embed(ids) * math.sqrt(self.config.d_model)
        return x + self.positions[: ids.shape[1]].to(x.dtype)

    def encode(self, src_ids: torch.Tensor, src_mask: torch.Tensor) -> torch.Tensor:
        return self.encoder(self._embed(src_ids), src_key_padding_mask=~src_mask.bool())

    def decode(self, memory: torch.Tensor, src_mask: torch.Tensor, tgt_in: torch.Tensor) -> torch.Tensor:
        T = tgt_in.shape[1]
        causal = torch.triu(torch.ones(T, T, dtype=torch.bool, device=tgt_in.device), diagonal=1)
        out = self.decoder(
            self._embed(tgt_in),
            memory,
            tgt_mask=causal,
            tgt_key_padding_mask=tgt_in == self.pad_id,
            memory_key_padding_mask=~src_mask.bool(),
        )
        return self.lm_head(out)

    def forward(self, src_ids: torch.Tensor, src_mask: torch.Tensor, tgt_in: torch.Tensor) -> ModelOutputs:
        memory = self.encode(src_ids, src_mask)
        pooled = mean_pool(memory, src_mask)
        return ModelOutputs(
            token_logits=self.decode(memory, src_mask, tgt_in),
            yod_score=yod_regressor(pooled, self.regressor),
            yod_logits=yod_classifier(pooled, self.classifier),
            pooled=pooled,
        )

    @torch.no_grad()
    def greedy_decode(self, src_ids: torch.Tensor, src_mask: torch.Tensor, bos_id: int, eos_id: int,
                      max_len: int = 64) -> list[list[int]]:
        was_training = self.training
        self.eval()
        memory = self.encode(src_ids, src_mask)
        B = src_ids.shape[0]
        out = torch.full((B, 1), bos_id, dtype=torch.long, device=src_ids.device)
        done = torch.zeros(B, dtype=torch.bool, device=src_ids.device)
        for _ in range(max_len):
            logits = self.decode(memory, src_mask, out)[:, -1]
            nxt = logits.argmax(-1)
            nxt = torch.where(done, torch.full_like(nxt, eos_id), nxt)
            out = torch.cat([out, nxt.unsqueeze(1)], dim=1)
            done |= nxt == eos_id
            if done.all():
                break
        self.train(was_training)
        return [row[1:].tolist() for row in out]
