"""Decay of wavelet coefficient magnitudes across dyadic scales.

A point's decay profile is the largest coefficient magnitude per level over
the coefficients whose time support touches a small neighbourhood of the
point. The least-squares slope of ``log2`` magnitude against level is a
Lipschitz-exponent estimate: impulses keep large coefficients at every level,
noise-like content decays quickly, and low-band voiced content grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .framing import FrameConfig, Signal
from .wavelet import DEFAULT_DEPTH, WaveletDecomposition, WaveletSpec, daubechies, forward_dwt

DEFAULT_RADIUS = 16


@dataclass
class DecayProfile:
    magnitude: np.ndarray
    normalized: bool = False

    @property
    def levels(self) -> int:
        return len(self.magnitude)

    @property
    def degenerate(self) -> bool:
        return not self.magnitude[0] > 0

    def normalize(self) -> "DecayProfile":
        """Scale so the finest level is 1. Degenerate profiles are returned unchanged."""
        if self.degenerate:
            return DecayProfile(self.magnitude.copy(), normalized=False)
        return DecayProfile(self.magnitude / self.magnitude[0], normalized=True)


@dataclass
class ImpulseProfile:
    """Average normalised decay of an impulse; ``lam[0]`` is the finest level and equals 1."""

    lam: np.ndarray
    segment_count: int
    skipped: int = 0
    wavelet: str = "daubechies6"

    def __post_init__(self):
        self.lam = np.asarray(self.lam, dtype=np.float64)
        if self.lam.ndim != 1 or len(self.lam) == 0:
            raise ValueError("impulse profile needs at least one level")
        if self.lam[0] != 1.0:
            raise ValueError("impulse profile must equal 1 at the finest level")
        if not np.all(self.lam > 0):
            raise ValueError("impulse profile values must be positive")

    @property
    def levels(self) -> int:
        return len(self.lam)

    def __getitem__(self, level: int) -> float:
        if not 1 <= level <= self.levels:
            raise KeyError(f"profile has no level {level}")
        return float(self.lam[level - 1])

    def dumps(self) -> str:
        lines = [
            f"wavelet = {self.wavelet}",
            f"levels = {self.levels}",
            f"segment_count = {self.segment_count}",
        ]
        lines += [f"lambda.{j} = {v!r}" for j, v in enumerate(self.lam.tolist(), start=1)]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ImpulseProfile":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"line {lineno}: expected 'key = value'")
            values[key.strip()] = value.strip()
        try:
            levels = int(values.pop("levels"))
            count = int(values.pop("segment_count"))
            wavelet = values.pop("wavelet", "daubechies6")
            lam = [float(values.pop(f"lambda.{j}")) for j in range(1, levels + 1)]
        except KeyError as exc:
            raise ValueError(f"profile is missing key {exc.args[0]!r}") from None
        if values:
            raise ValueError(f"unknown profile keys: {', '.join(sorted(values))}")
        return cls(np.array(lam), count, wavelet=wavelet)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> "ImpulseProfile":
        return cls.loads(Path(path).read_text())


def support_range(level: int, lo: int, hi: int, n_coeffs: int) -> range:
    """Level-``level`` coefficient indices whose samples intersect ``[lo, hi]``."""
    k0 = max(lo >> level, 0)
    k1 = min(hi >> level, n_coeffs - 1)
    return range(k0, k1 + 1)


def decay_profile(decomp: WaveletDecomposition, center: int, radius: int = DEFAULT_RADIUS) -> DecayProfile:
    if not 0 <= center < decomp.block_len:
        raise IndexError("index out of block")
    if radius < 0:
        raise ValueError("radius must be >= 0")
    mags = np.zeros(decomp.depth)
    for j in range(1, decomp.depth + 1):
        d = decomp.detail(j)
        r = support_range(j, center - radius, center + radius, len(d))
        if len(r):
            mags[j - 1] = np.max(np.abs(d[r.start:r.stop]))
    return DecayProfile(mags)


def lipschitz_slope(profile, levels: tuple[int, int] | None = None) -> float:
    """Least-squares slope of ``log2(magnitude)`` against level.

    ``levels`` optionally restricts the fit to an inclusive ``(first, last)``
    level range. For dyadic scales ``s = 2**j`` this is the slope of log
    magnitude against log scale in base-2 units.
    """
    mags = profile.magnitude if isinstance(profile, DecayProfile) else np.asarray(profile, dtype=np.float64)
    j = np.arange(1, len(mags) + 1, dtype=np.float64)
    if levels is not None:
        first, last = levels
        keep = (j >= first) & (j <= last)
        mags, j = mags[keep], j[keep]
    if len(mags) < 2:
        raise ValueError("need at least two levels to fit a slope")
    if not np.all(mags > 0):
        raise ValueError("degenerate profile")
    y = np.log2(mags)
    jc = j - j.mean()
    return float(np.dot(jc, y - y.mean()) / np.dot(jc, jc))


def containing_block(x: np.ndarray, center: int, block_len: int) -> tuple[np.ndarray, int]:
    """Block of ``block_len`` samples around ``center``; returns (block, center within block)."""
    if len(x) < block_len:
        raise ValueError("segment shorter than one block")
    start = min(max(center - block_len // 2, 0), len(x) - block_len)
    return x[start:start + block_len], center - start


def learn_impulse_profile(segments, spec: WaveletSpec | None = None, cfg: FrameConfig = FrameConfig(),
                          radius: int = DEFAULT_RADIUS, depth: int = DEFAULT_DEPTH) -> ImpulseProfile:
    """Average the normalised decay profiles of marked impulses.

    ``segments`` is an iterable of ``(signal, center)`` pairs. Each impulse is
    analysed in a block centred on it (clamped to the segment). Segments whose
    finest-level magnitude is zero are skipped.
    """
    spec = spec or daubechies(6)
    rows = []
    skipped = 0
    for signal, center in segments:
        x = signal.samples if isinstance(signal, Signal) else np.asarray(signal, dtype=np.float64)
        block, local = containing_block(x, int(center), cfg.block_len)
        prof = decay_profile(forward_dwt(block, spec, depth), local, radius).normalize()
        if not prof.normalized or not np.all(prof.magnitude > 0):
            skipped += 1
            continue
        rows.append(prof.magnitude)
    if not rows:
        raise ValueError("no usable impulses")
    # exactly rounded sums make the mean independent of segment order
    lam = np.array([math.fsum(col) for col in zip(*rows)]) / len(rows)
    return ImpulseProfile(lam, len(rows), skipped, wavelet=spec.name)


def pick_impulse_centers(x, threshold_db: float = 20.0, min_separation: int = 2 * DEFAULT_RADIUS,
                         max_count: int | None = None) -> list[int]:
    """Greedy peak picker for impulse candidates in a noise-only recording.

    A candidate is a local maximum of ``|x|`` at least ``threshold_db`` above
    the median absolute level (floored 100 dB below the clip peak so sparse
    click trains over digital silence still have a reference). Candidates are
    accepted strongest first, skipping any closer than ``min_separation`` to
    one already taken. Returns sorted sample indices.
    """
    a = np.abs(np.asarray(x, dtype=np.float64))
    if a.size < 3 or not a.max() > 0:
        return []
    ref = max(float(np.median(a)), float(a.max()) * 1e-5)
    level = ref * 10 ** (threshold_db / 20.0)
    inner = a[1:-1]
    peaks = np.flatnonzero((inner >= a[:-2]) & (inner > a[2:]) & (inner >= level)) + 1
    order = peaks[np.argsort(-a[peaks], kind="stable")]
    taken = []
    for p in order:
        if all(abs(int(p) - t) >= min_separation for t in taken):
            taken.append(int(p))
            if max_count is not None and len(taken) >= max_count:
                break
    return sorted(taken)
