"""Block segmentation and Hann-windowed overlap-add resynthesis.

Analysis blocks are rectangular; the periodic Hann window is applied only at
synthesis. With a hop of half the block length the shifted windows sum to
one, so unmodified blocks reproduce the input away from the first and last
hop of the signal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_SAMPLE_RATE = 16000


@dataclass
class Signal:
    samples: np.ndarray
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError("signal must be mono (one-dimensional)")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("signal contains non-finite samples")

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class FrameConfig:
    block_len: int = 512
    hop: int = 256
    window: str = "hann"

    def validate(self, depth: int | None = None) -> None:
        n = self.block_len
        ok = (
            isinstance(n, (int, np.integer))
            and n > 0
            and n & (n - 1) == 0
            and self.hop * 2 == n
            and self.window in ("hann", "rectangular")
        )
        if ok and depth is not None:
            ok = depth >= 1 and n % (1 << depth) == 0
        if not ok:
            raise ValueError("invalid frame config")


def _samples(signal) -> np.ndarray:
    if isinstance(signal, Signal):
        return signal.samples
    return np.asarray(signal, dtype=np.float64)


def synthesis_window(cfg: FrameConfig) -> np.ndarray:
    if cfg.window == "rectangular":
        return np.ones(cfg.block_len)
    n = np.arange(cfg.block_len)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * n / cfg.block_len))


def block_count(n_samples: int, cfg: FrameConfig) -> int:
    return -(-max(n_samples - cfg.block_len, 0) // cfg.hop) + 1


def segment(signal, cfg: FrameConfig = FrameConfig()) -> np.ndarray:
    """Split into ``(n_blocks, block_len)`` rows; block ``i`` starts at ``i * hop``.

    The last block is zero-padded on the right.
    """
    x = _samples(signal)
    if x.size == 0:
        raise ValueError("empty input")
    cfg.validate()
    count = block_count(len(x), cfg)
    padded_len = (count - 1) * cfg.hop + cfg.block_len
    padded = np.zeros(padded_len)
    padded[: len(x)] = x
    starts = np.arange(count) * cfg.hop
    return padded[starts[:, None] + np.arange(cfg.block_len)[None, :]]


def overlap_add(blocks, cfg: FrameConfig = FrameConfig(), original_len: int | None = None,
                sample_rate: int = DEFAULT_SAMPLE_RATE) -> Signal:
    """Window each block with the synthesis window and sum at ``i * hop``."""
    cfg.validate()
    blocks = [np.asarray(b, dtype=np.float64) for b in blocks]
    for b in blocks:
        if b.shape != (cfg.block_len,):
            raise ValueError("block length mismatch")
    total = (len(blocks) - 1) * cfg.hop + cfg.block_len if blocks else 0
    if original_len is None:
        original_len = total
    out = np.zeros(max(total, original_len))
    w = synthesis_window(cfg)
    for i, b in enumerate(blocks):
        start = i * cfg.hop
        out[start:start + cfg.block_len] += w * b
    return Signal(out[:original_len], sample_rate)
