"""Character vocabulary with reserved readability control tokens."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from yodkit.readability import MAX_YOD_LEVEL, MIN_YOD_LEVEL

PAD, BOS, EOS, UNK = "<pad>", "<bos>", "<eos>", "<unk>"
SPECIALS = (PAD, BOS, EOS, UNK)
CONTROL_TOKENS = tuple(f"<yod_{i}>" for i in range(MIN_YOD_LEVEL, MAX_YOD_LEVEL + 1))


class UnknownLevel(ValueError):
    pass


@dataclass(frozen=True)
class ControlVocab:
    """Specials, then ``<yod_1>``..``<yod_16>``, then base characters."""

    tokens: tuple[str, ...]

    def __post_init__(self):
        head = SPECIALS + CONTROL_TOKENS
        if self.tokens[: len(head)] != head:
            raise ValueError("vocabulary must start with specials and control tokens")
        if len(set(self.tokens)) != len(self.tokens):
            raise ValueError("duplicate vocabulary entries")
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.tokens)})

    @classmethod
    def from_texts(cls, texts: Iterable[str]) -> "ControlVocab":
        chars = sorted({ch for text in texts for ch in text})
        return cls(SPECIALS + CONTROL_TOKENS + tuple(chars))

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def pad_id(self) -> int:
        return 0

    @property
    def bos_id(self) -> int:
        return 1

    @property
    def eos_id(self) -> int:
        return 2

    @property
    def unk_id(self) -> int:
        return 3

    @property
    def base_ids(self) -> range:
        return range(len(SPECIALS) + len(CONTROL_TOKENS), len(self.tokens))

    def lookup(self, token: str) -> int:
        return self._index[token]

    def control_id(self, level: int) -> int:
        if isinstance(level, bool) or not isinstance(level, int) or not MIN_YOD_LEVEL <= level <= MAX_YOD_LEVEL:
            raise UnknownLevel(f"no control token for YOD level {level!r}")
        return len(SPECIALS) + level - 1

    def encode(self, text: str) -> list[int]:
        return [self._index.get(ch, self.unk_id) for ch in text]

    def decode(self, ids: Sequence[int]) -> str:
        out = []
        for i in ids:
            if i == self.eos_id:
                break
            if i >= len(SPECIALS) + len(CONTROL_TOKENS):
                out.append(self.tokens[i])
        return "".join(out)


def prepend_control_token(input_ids: Sequence[int], level: int, vocab: ControlVocab) -> list[int]:
    return [vocab.control_id(level), *input_ids]
