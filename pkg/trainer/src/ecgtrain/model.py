"""Residual 1-D convolutional classifier for fixed-length single-lead ECG.

The network stacks conv blocks with additive shortcuts.  Each block runs
[BatchNorm -> ReLU -> Dropout -> Conv] twice; max pooling (width 2) fires on
every second block starting with the first, and the shortcut path is pooled
and zero-padded in channels so it always matches the main path.  Channel
width is base_filters * k with k starting at 1 and incremented every two
blocks.  The head flattens and maps to 4 class logits; softmax gives the
class probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F


@dataclass(frozen=True)
class ModelSpec:
    num_blocks: int = 15
    conv_filter_length: int = 16
    base_filters: int = 8
    dropout_rate: float = 0.3
    num_classes: int = 4
    input_len: int = 3050

    def __post_init__(self):
        if self.num_blocks < 1:
            raise ValueError(f"num_blocks must be >= 1, got {self.num_blocks}")
        if self.conv_filter_length < 1 or self.base_filters < 1:
            raise ValueError("filter length and base filter count must be >= 1")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")
        if self.num_classes < 2:
            raise ValueError(f"num_classes must be >= 2, got {self.num_classes}")
        if self.input_len < 2 ** self.num_pools():
            raise ValueError(
                f"input_len {self.input_len} too short for {self.num_pools()} pooling stages"
            )

    def channels(self) -> list[int]:
        """Per-block output channels: base * k, k incremented every 2 blocks."""
        return [self.base_filters * (1 + i // 2) for i in range(self.num_blocks)]

    def pools(self) -> list[bool]:
        """Pooling pattern: every second block, beginning with the first."""
        return [i % 2 == 0 for i in range(self.num_blocks)]

    def num_pools(self) -> int:
        return sum(self.pools())

    def flattened_len(self) -> int:
        n = self.input_len
        for pooled in self.pools():
            if pooled:
                n //= 2
        return n * self.channels()[-1]


class _SamePadConv1d(nn.Module):
    """Stride-1 conv that preserves length for any (incl. even) kernel size."""

    def __init__(self, in_ch: int, out_ch: int, kernel: int):
        super().__init__()
        total = kernel - 1
        self._pad = (total // 2, total - total // 2)
        self.conv = nn.Conv1d(in_ch, out_ch, kernel)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.conv(F.pad(x, self._pad))


class ConvBlock(nn.Module):
    """Two pre-activation convs with an additive, parameter-free shortcut."""

    def __init__(self, in_ch: int, out_ch: int, kernel: int, dropout: float, pool: bool):
        super().__init__()
        self.pool = pool
        self.extra_ch = out_ch - in_ch
        if self.extra_ch < 0:
            raise ValueError("channel count must be non-decreasing across blocks")
        self.bn1 = nn.BatchNorm1d(in_ch)
        self.drop1 = nn.Dropout(dropout)
        self.conv1 = _SamePadConv1d(in_ch, out_ch, kernel)
        self.bn2 = nn.BatchNorm1d(out_ch)
        self.drop2 = nn.Dropout(dropout)
        self.conv2 = _SamePadConv1d(out_ch, out_ch, kernel)
        self.maxpool = nn.MaxPool1d(2) if pool else None

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h = self.conv1(self.drop1(F.relu(self.bn1(x))))
        h = self.conv2(self.drop2(F.relu(self.bn2(h))))
        shortcut = x
        if self.maxpool is not None:
            h = self.maxpool(h)
            shortcut = self.maxpool(shortcut)
        if self.extra_ch:
            shortcut = F.pad(shortcut, (0, 0, 0, self.extra_ch))
        return h + shortcut


class ConvClassifier(nn.Module):
    """The full classifier: stacked ConvBlocks, flatten, dense head."""

    def __init__(self, spec: ModelSpec):
        super().__init__()
        self.spec = spec
        blocks = []
        in_ch = 1
        for out_ch, pool in zip(spec.channels(), spec.pools()):
            blocks.append(
                ConvBlock(in_ch, out_ch, spec.conv_filter_length, spec.dropout_rate, pool)
            )
            in_ch = out_ch
        self.blocks = nn.ModuleList(blocks)
        self.head = nn.Linear(spec.flattened_len(), spec.num_classes)
        # zero head: initial predictions are uniform, so the starting
        # cross-entropy is exactly ln(num_classes)
        nn.init.zeros_(self.head.weight)
        nn.init.zeros_(self.head.bias)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """(B, 1, T) -> (B, num_classes) logits."""
        for block in self.blocks:
            x = block(x)
        return self.head(torch.flatten(x, 1))

    def predict_proba(self, x: torch.Tensor) -> torch.Tensor:
        """(B, 1, T) -> (B, num_classes) softmax probabilities."""
        return F.softmax(self.forward(x), dim=1)


def build_model(spec: ModelSpec) -> ConvClassifier:
    return ConvClassifier(spec)
