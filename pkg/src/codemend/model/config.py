"""Model architecture configuration."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np


@dataclass
class ModelConfig:
    """Shape of the shared encoder-decoder and its task heads.

    The defaults are a deliberately small configuration that trains from
    random initialization on a workstation; dtype float64 is used by the
    gradient-check tests, float32 for ordinary training.
    """

    vocab_size: int
    model_dim: int = 256
    num_heads: int = 4
    ffn_dim: int = 1024
    num_encoder_layers: int = 4
    num_decoder_layers: int = 4
    max_source_len: int = 512
    max_target_len: int = 512
    dropout: float = 0.1
    seed: int = 0
    dtype: str = "float32"

    def __post_init__(self) -> None:
        for name in (
            "vocab_size", "model_dim", "num_heads", "ffn_dim",
            "num_encoder_layers", "num_decoder_layers",
            "max_source_len", "max_target_len",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.model_dim % self.num_heads != 0:
            raise ValueError(
                f"model_dim {self.model_dim} not divisible by num_heads {self.num_heads}"
            )
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")
        np.dtype(self.dtype)  # raises on unknown dtype strings

    @property
    def head_dim(self) -> int:
        return self.model_dim // self.num_heads

    @property
    def np_dtype(self) -> np.dtype:
        return np.dtype(self.dtype)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        return cls(**data)
