"""Seeded synthetic test material: click trains, vowel/consonant stand-ins, mixing."""

from __future__ import annotations

import numpy as np
from scipy import signal as sps

from ..framing import DEFAULT_SAMPLE_RATE, Signal

VOWEL_F0 = 300.0
VOWEL_CUTOFF = 4000.0
CONSONANT_CUTOFF = 5000.0
CLICK_WIDTH_MS = 1.0


def raised_cosine(width_samples: float) -> np.ndarray:
    """Symmetric raised-cosine pulse with unit peak on the centre sample.

    Non-zero support is the odd number of samples strictly inside
    ``width_samples``.
    """
    half = width_samples / 2.0
    if half <= 1.0:
        return np.ones(1)
    m = int(np.ceil(half)) - 1
    n = np.arange(-m, m + 1)
    return 0.5 * (1.0 + np.cos(np.pi * n / half))


def click_burst(width_samples: float, rng) -> np.ndarray:
    """Gaussian noise under a raised-cosine envelope, scaled to unit peak magnitude.

    The random carrier makes the click broadband like a real transient; a bare
    raised-cosine bump is a low-pass shape with almost nothing at fine scales.
    """
    env = raised_cosine(width_samples)
    burst = env * rng.standard_normal(len(env))
    peak = np.max(np.abs(burst))
    return burst / peak if peak > 0 else env


def _add_pulse(x: np.ndarray, center: int, pulse: np.ndarray) -> None:
    m = len(pulse) // 2
    lo, hi = center - m, center + m + 1
    a, b = max(lo, 0), min(hi, len(x))
    x[a:b] += pulse[a - lo:b - lo]


def synth_impulse_train(duration_s: float, rate_hz: float = 10.0, amp_range=(0.2, 1.0),
                        width_range_ms=(0.25, 1.0), seed: int = 0,
                        sample_rate: int = DEFAULT_SAMPLE_RATE):
    """Poisson-timed raised-cosine bursts; returns ``(Signal, centers)``.

    Click count is Poisson with mean ``rate_hz * duration_s`` and centres are
    uniform over the clip. Each click draws its peak magnitude and width
    uniformly from the given ranges (see :func:`click_burst`).
    """
    if duration_s <= 0 or rate_hz <= 0:
        raise ValueError("duration and rate must be positive")
    lo_a, hi_a = amp_range
    lo_w, hi_w = width_range_ms
    if hi_a < lo_a or hi_w < lo_w or lo_w <= 0:
        raise ValueError("empty amplitude or width range")
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * sample_rate))
    count = rng.poisson(rate_hz * duration_s)
    centers = np.sort(rng.integers(0, n, size=count))
    amps = rng.uniform(lo_a, hi_a, size=count)
    widths = rng.uniform(lo_w, hi_w, size=count) * sample_rate / 1000.0
    x = np.zeros(n)
    for c, a, w in zip(centers, amps, widths):
        _add_pulse(x, int(c), a * click_burst(w, rng))
    return Signal(x, sample_rate), [int(c) for c in centers]


def _vowel(n: int, rng, sample_rate: int) -> np.ndarray:
    t = np.arange(n) / sample_rate
    nyq = sample_rate / 2.0
    harmonics = np.arange(1, int(nyq // VOWEL_F0) + 1)
    f = harmonics * VOWEL_F0
    f = f[f < nyq]
    # 1/h glottal roll-off times an 8th-order Butterworth magnitude at 4 kHz
    amp = (1.0 / np.arange(1, len(f) + 1)) / np.sqrt(1.0 + (f / VOWEL_CUTOFF) ** 16)
    phase = rng.uniform(0, 2 * np.pi, size=len(f))
    return (amp[:, None] * np.sin(2 * np.pi * f[:, None] * t[None, :] + phase[:, None])).sum(axis=0)


def _consonant(n: int, rng, sample_rate: int) -> np.ndarray:
    sos = sps.butter(8, CONSONANT_CUTOFF, btype="highpass", fs=sample_rate, output="sos")
    pad = 256
    noise = rng.standard_normal(n + 2 * pad)
    return sps.sosfiltfilt(sos, noise)[pad:pad + n]


def synth_surrogates(kind: str, duration_s: float = 0.032, seed: int = 0, rms: float = 0.1,
                     sample_rate: int = DEFAULT_SAMPLE_RATE) -> Signal:
    """Stationary vowel/consonant stand-ins or a single click.

    ``vowel`` is a 300 Hz harmonic series rolled off above 4 kHz with random
    harmonic phases, ``consonant`` is white noise high-passed at 5 kHz; both are
    scaled to ``rms``. ``impulse`` is one 1 ms raised-cosine burst of unit peak
    magnitude in the middle of the clip.
    """
    n = int(round(duration_s * sample_rate))
    if n <= 0:
        raise ValueError("duration must be positive")
    rng = np.random.default_rng(seed)
    if kind == "impulse":
        x = np.zeros(n)
        _add_pulse(x, n // 2, click_burst(CLICK_WIDTH_MS * sample_rate / 1000.0, rng))
        return Signal(x, sample_rate)
    if kind == "vowel":
        x = _vowel(n, rng, sample_rate)
    elif kind == "consonant":
        x = _consonant(n, rng, sample_rate)
    else:
        raise ValueError(f"unknown surrogate kind {kind!r}")
    return Signal(x * (rms / np.sqrt(np.mean(x**2))), sample_rate)


def synth_speech(duration_s: float, seed: int = 0, vowel_ms=(120.0, 220.0), consonant_ms=(50.0, 110.0),
                 consonant_db: float = -6.0, fade_ms: float = 5.0, rms: float = 0.1,
                 sample_rate: int = DEFAULT_SAMPLE_RATE):
    """Alternating vowel and consonant stand-ins; returns ``(Signal, labels)``.

    Segment lengths are drawn uniformly from the given ranges and each segment
    is faded in and out with raised-cosine ramps. ``labels`` lists
    ``(start, stop, kind)`` sample spans.
    """
    n = int(round(duration_s * sample_rate))
    rng = np.random.default_rng(seed)
    x = np.zeros(n)
    labels = []
    pos = 0
    kind = "vowel"
    fade = max(int(fade_ms * sample_rate / 1000.0), 1)
    while pos < n:
        lo, hi = vowel_ms if kind == "vowel" else consonant_ms
        length = min(int(rng.uniform(lo, hi) * sample_rate / 1000.0), n - pos)
        sub_seed = int(rng.integers(2**31))
        seg = synth_surrogates(kind, length / sample_rate, sub_seed, rms, sample_rate).samples
        if kind == "consonant":
            seg = seg * 10 ** (consonant_db / 20.0)
        env = np.ones(length)
        ramp = 0.5 * (1 - np.cos(np.pi * np.arange(min(fade, length // 2)) / fade))
        env[:len(ramp)] = ramp
        env[length - len(ramp):] = ramp[::-1]
        x[pos:pos + length] = seg * env
        labels.append((pos, pos + length, kind))
        pos += length
        kind = "consonant" if kind == "vowel" else "vowel"
    return Signal(x, sample_rate), labels


def power(x) -> float:
    x = x.samples if isinstance(x, Signal) else np.asarray(x, dtype=np.float64)
    return float(np.mean(x**2)) if len(x) else 0.0


def mix_gain(clean, noise, snr_db: float) -> float:
    if not np.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    pc, pn = power(clean), power(noise)
    if pc == 0 or pn == 0:
        raise ValueError("undefined ratio")
    return float(np.sqrt(pc / (pn * 10 ** (snr_db / 10.0))))


def mix(clean: Signal, noise: Signal, snr_db: float) -> Signal:
    """``clean + g * noise`` with ``g`` set so the full-clip SNR is ``snr_db``.

    Noise longer than the clean signal is truncated first.
    """
    if clean.sample_rate != noise.sample_rate:
        raise ValueError("sample rates differ")
    if len(noise) < len(clean):
        raise ValueError("noise shorter than clean signal")
    nz = noise.samples[:len(clean)]
    g = mix_gain(clean, nz, snr_db)
    return Signal(clean.samples + g * nz, clean.sample_rate)
