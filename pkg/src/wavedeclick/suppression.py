"""Impulse suppression on DWT coefficients.

Fine levels are clipped against a dynamic threshold ``k * median(|W|)`` taken
over a sliding window. Every clipped coefficient leaves a detection carrying
its excess over the threshold. Coarse levels are then reduced at the matching
time positions by the excess scaled through the impulse decay profile, so an
impulse seen at a fine scale is also removed where the fine-scale test has
too little time resolution to find it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .framing import FrameConfig, Signal, overlap_add, segment
from .regularity import ImpulseProfile
from .wavelet import WaveletDecomposition, WaveletSpec, daubechies, forward_dwt, inverse_dwt

DISABLED = math.inf


class DetectionRecord(NamedTuple):
    level: int
    index: int
    excess: float
    threshold: float


def _level_map(default: dict) -> field:
    return field(default_factory=lambda: dict(default))


@dataclass
class DenoiseConfig:
    """Empirical knobs of the suppressor. ``k_s`` of ``inf`` disables a fine level."""

    k_s: dict = _level_map({1: 3.0, 2: 3.0, 3: 3.0})
    k_c: dict = _level_map({4: 1.0, 5: 1.0, 6: 1.0})
    median_len: dict = _level_map({1: 65, 2: 33, 3: 17})
    fine_levels: tuple = (1, 2, 3)
    coarse_levels: tuple = (4, 5, 6)
    detection_source_level: int = 1
    strict_literal: bool = False

    @property
    def depth(self) -> int:
        return max(self.fine_levels + self.coarse_levels)

    @classmethod
    def disabled(cls) -> "DenoiseConfig":
        cfg = cls()
        cfg.k_s = {j: DISABLED for j in cfg.fine_levels}
        return cfg

    def validate(self) -> None:
        fine, coarse = set(self.fine_levels), set(self.coarse_levels)
        problems = []
        if not fine:
            problems.append("no fine levels")
        if fine & coarse:
            problems.append("fine and coarse levels overlap")
        if fine and coarse and min(coarse) <= max(fine):
            problems.append("coarse levels must all be deeper than fine levels")
        if min(fine | coarse, default=1) < 1:
            problems.append("levels start at 1")
        if self.detection_source_level not in fine:
            problems.append("detection_source_level must be a fine level")
        for j in fine:
            k = self.k_s.get(j)
            n = self.median_len.get(j)
            if k is None or not k > 0:
                problems.append(f"k_s.{j} must be > 0")
            if n is None or n < 3 or n % 2 == 0:
                problems.append(f"median_len.{j} must be odd and >= 3")
        for name, allowed in (("k_s", fine), ("median_len", fine), ("k_c", coarse)):
            extra = set(getattr(self, name)) - allowed
            if extra:
                problems.append(f"{name} set for unconfigured levels {sorted(extra)}")
        for j in coarse:
            k = self.k_c.get(j)
            if k is None or not (k > 0 and math.isfinite(k)):
                problems.append(f"k_c.{j} must be finite and > 0")
        if problems:
            raise ValueError("invalid denoise config: " + "; ".join(problems))

    def dumps(self) -> str:
        def num(v):
            return "disabled" if v == DISABLED else repr(float(v))

        lines = [
            "fine_levels = " + ",".join(map(str, self.fine_levels)),
            "coarse_levels = " + ",".join(map(str, self.coarse_levels)),
            f"detection_source_level = {self.detection_source_level}",
            f"strict_literal = {str(self.strict_literal).lower()}",
        ]
        lines += [f"k_s.{j} = {num(self.k_s[j])}" for j in sorted(self.k_s)]
        lines += [f"median_len.{j} = {self.median_len[j]}" for j in sorted(self.median_len)]
        lines += [f"k_c.{j} = {num(self.k_c[j])}" for j in sorted(self.k_c)]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "DenoiseConfig":
        """Parse ``key = value`` lines; keys not given keep their defaults."""
        cfg = cls()
        seen_levels = False
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = (part.strip() for part in line.partition("="))
            if not sep or not value:
                raise ValueError(f"line {lineno}: expected 'key = value'")
            try:
                _apply(cfg, key, value)
            except (TypeError, ValueError) as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            seen_levels |= key in ("fine_levels", "coarse_levels")
        if seen_levels:
            # defaults for levels that are no longer configured would be rejected as stale
            cfg.k_s = {j: v for j, v in cfg.k_s.items() if j in cfg.fine_levels}
            cfg.median_len = {j: v for j, v in cfg.median_len.items() if j in cfg.fine_levels}
            cfg.k_c = {j: v for j, v in cfg.k_c.items() if j in cfg.coarse_levels}
        cfg.validate()
        return cfg

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> "DenoiseConfig":
        return cls.loads(Path(path).read_text())


def _parse_factor(value: str) -> float:
    if value.lower() in ("disabled", "inf"):
        return DISABLED
    return float(value)


def _apply(cfg: DenoiseConfig, key: str, value: str) -> None:
    name, _, level = key.partition(".")
    if level:
        if name not in ("k_s", "k_c", "median_len"):
            raise ValueError(f"unknown key {key!r}")
        j = int(level)
        if name == "median_len":
            cfg.median_len[j] = int(value)
        else:
            getattr(cfg, name)[j] = _parse_factor(value)
    elif name in ("fine_levels", "coarse_levels"):
        setattr(cfg, name, tuple(int(v) for v in value.split(",") if v.strip()))
    elif name == "detection_source_level":
        cfg.detection_source_level = int(value)
    elif name == "strict_literal":
        if value.lower() not in ("true", "false"):
            raise ValueError("strict_literal must be true or false")
        cfg.strict_literal = value.lower() == "true"
    else:
        raise ValueError(f"unknown key {key!r}")


def dynamic_threshold(coeffs, k: float, n: int) -> np.ndarray:
    """``k`` times the running median of ``|coeffs|`` over ``n`` taps, edges replicated."""
    if n < 3 or n % 2 == 0:
        raise ValueError("invalid median window")
    if not k > 0:
        raise ValueError("threshold factor must be > 0")
    a = np.abs(np.asarray(coeffs, dtype=np.float64))
    if k == DISABLED:
        return np.full(a.shape, DISABLED)
    half = n // 2
    padded = np.pad(a, half, mode="edge")
    return k * np.median(sliding_window_view(padded, n), axis=-1)


def clip_fine(coeffs, tau, level: int = 1):
    """Limit ``|coeffs|`` to ``tau`` keeping the sign; returns (clipped, detections)."""
    w = np.asarray(coeffs, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    if w.shape != tau.shape:
        raise ValueError("coefficient and threshold lengths differ")
    mag = np.abs(w)
    hit = ~(mag < tau)
    out = w.copy()
    out[hit] = tau[hit] * np.sign(w[hit])
    detections = [
        DetectionRecord(level, int(n), float(mag[n] - tau[n]), float(tau[n]))
        for n in np.flatnonzero(hit & (mag > tau))
    ]
    return out, detections


def subtraction_amounts(n_coeffs: int, detections, level: int, profile: ImpulseProfile,
                        k_c: float) -> np.ndarray:
    """Per-coefficient amount to remove at coarse ``level``; max over detections mapping there."""
    amounts = np.zeros(n_coeffs)
    for det in detections:
        if level <= det.level:
            raise ValueError("coarse level must be deeper than the detection level")
        nc = det.index >> (level - det.level)
        if not 0 <= nc < n_coeffs:
            raise IndexError("scale mapping overflow")
        a = k_c * profile[level] / profile[det.level] * det.excess
        if a > amounts[nc]:
            amounts[nc] = a
    return amounts


def attenuate_coarse(coeffs, detections, profile: ImpulseProfile, k_c: float, level: int,
                     strict_literal: bool = False) -> np.ndarray:
    """Pull coarse coefficients toward zero by the profile-scaled fine-level excess.

    By default the amount is taken off the magnitude and the sign kept. With
    ``strict_literal`` it is subtracted from the signed value and negative
    results become zero, which zeroes every negative coefficient it touches.
    """
    w = np.asarray(coeffs, dtype=np.float64)
    amounts = subtraction_amounts(len(w), detections, level, profile, k_c)
    touched = amounts > 0
    out = w.copy()
    if strict_literal:
        out[touched] = np.maximum(w[touched] - amounts[touched], 0.0)
    else:
        mag = np.maximum(np.abs(w[touched]) - amounts[touched], 0.0)
        out[touched] = np.sign(w[touched]) * mag
    return out


def denoise_block(decomp: WaveletDecomposition, cfg: DenoiseConfig, profile: ImpulseProfile,
                  return_detections: bool = False):
    if decomp.depth < cfg.depth:
        raise ValueError("decomposition too shallow for configured levels")
    if profile.levels < cfg.depth:
        raise ValueError("impulse profile does not cover configured levels")
    out = decomp.copy()
    detections = []
    for j in cfg.fine_levels:
        d = decomp.detail(j)
        tau = dynamic_threshold(d, cfg.k_s[j], cfg.median_len[j])
        clipped, found = clip_fine(d, tau, level=j)
        out.set_detail(j, clipped)
        if j == cfg.detection_source_level:
            detections = found
    if detections:
        for j in cfg.coarse_levels:
            out.set_detail(j, attenuate_coarse(decomp.detail(j), detections, profile, cfg.k_c[j], j,
                                               strict_literal=cfg.strict_literal))
    if return_detections:
        return out, detections
    return out


@dataclass
class DenoiseResult:
    signal: Signal
    detections: int
    blocks: int


def denoise_signal(signal, cfg: DenoiseConfig, profile: ImpulseProfile,
                   frame_cfg: FrameConfig = FrameConfig(), spec: WaveletSpec | None = None,
                   sample_rate: int | None = None) -> DenoiseResult:
    """Segment, transform, suppress, invert and overlap-add a whole signal."""
    spec = spec or daubechies(6)
    cfg.validate()
    frame_cfg.validate(cfg.depth)
    if isinstance(signal, Signal):
        sample_rate = signal.sample_rate if sample_rate is None else sample_rate
        x = signal.samples
    else:
        x = np.asarray(signal, dtype=np.float64)
    sample_rate = sample_rate or 16000
    # one hop of zeros each side gives the first and last samples a second
    # overlapping block, so the synthesis windows sum to one over the whole clip
    pad = frame_cfg.hop
    blocks = segment(np.pad(x, pad), frame_cfg)
    out_blocks = []
    n_det = 0
    for block in blocks:
        decomp, found = denoise_block(forward_dwt(block, spec, cfg.depth), cfg, profile,
                                      return_detections=True)
        n_det += len(found)
        out_blocks.append(inverse_dwt(decomp, spec))
    out = overlap_add(out_blocks, frame_cfg, len(x) + 2 * pad, sample_rate)
    return DenoiseResult(Signal(out.samples[pad:pad + len(x)], sample_rate), n_det, len(blocks))
