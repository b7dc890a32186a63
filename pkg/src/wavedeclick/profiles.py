"""Builtin impulse profile learned from seeded synthetic clicks."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

import numpy as np

from .audio_io.synth import click_burst
from .framing import FrameConfig
from .regularity import ImpulseProfile, learn_impulse_profile

BUILTIN_CLICK = "builtin:click"
BUILTIN_SEED = 1729
BUILTIN_CLICKS = 64


def isolated_clicks(count: int, seed: int, width_range_ms=(0.25, 1.0), amp_range=(0.2, 1.0),
                    cfg: FrameConfig = FrameConfig(), sample_rate: int = 16000):
    """``count`` single-click blocks as ``(samples, center)`` pairs, centres jittered around mid-block."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        width = rng.uniform(*width_range_ms) * sample_rate / 1000.0
        amp = rng.uniform(*amp_range)
        pulse = amp * click_burst(width, rng)
        center = cfg.block_len // 2 + int(rng.integers(-cfg.hop // 2, cfg.hop // 2))
        x = np.zeros(cfg.block_len)
        m = len(pulse) // 2
        x[center - m:center + m + 1] = pulse
        out.append((x, center))
    return out


@lru_cache(maxsize=None)
def builtin_click_profile() -> ImpulseProfile:
    """Average decay of clicks from the default click-train distribution (deterministic)."""
    return learn_impulse_profile(isolated_clicks(BUILTIN_CLICKS, BUILTIN_SEED))


def load_profile(spec: str | Path) -> ImpulseProfile:
    if str(spec) == BUILTIN_CLICK:
        return builtin_click_profile()
    return ImpulseProfile.load(spec)
