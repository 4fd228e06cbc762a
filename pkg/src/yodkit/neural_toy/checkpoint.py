"""JSON checkpoints: format version, model config, vocabulary, tensors with shapes."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import torch

from yodkit.neural_toy.model import ModelConfig, ReadabilitySummarizer
from yodkit.neural_toy.vocab import ControlVocab

FORMAT_VERSION = 1


def save_checkpoint(path: str | Path, model: ReadabilitySummarizer, vocab: ControlVocab) -> None:
    path = Path(path)
    payload = {
        "format_version": FORMAT_VERSION,
        "config": model.config.to_json(),
        "vocab": list(vocab.tokens),
        "params": {
            name: {
                "shape": list(t.shape),
                "dtype": str(t.dtype).removeprefix("torch."),
                "data": t.detach().reshape(-1).tolist(),
            }
            for name, t in model.state_dict().items()
        },
    }
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def load_checkpoint(path: str | Path) -> tuple[ReadabilitySummarizer, ControlVocab]:
    payload = json.loads(Path(path).read_text("utf-8"))
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint version {version!r}")
    vocab = ControlVocab(tuple(payload["vocab"]))
    model = ReadabilitySummarizer(ModelConfig.from_json(payload["config"]), pad_id=vocab.pad_id)
    state = {
        name: torch.tensor(entry["data"], dtype=getattr(torch, entry["dtype"])).reshape(entry["shape"])
        for name, entry in payload["params"].items()
    }
    model.load_state_dict(state)
    return model, vocab
