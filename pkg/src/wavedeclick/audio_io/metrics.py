"""Frame-based objective measures for comparing processed audio with a clean reference."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..framing import Signal

SNR_FLOOR_DB = -10.0
SNR_CEIL_DB = 35.0


@dataclass
class Metrics:
    seg_snr_db: float
    peak_residual_db: float
    active_distortion_db: float
    active_frames: int
    impulse_free_frames: int

    def as_dict(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.as_dict().items())


def _arr(x) -> np.ndarray:
    return x.samples if isinstance(x, Signal) else np.asarray(x, dtype=np.float64)


def frame_length(frame_ms: float, sample_rate: int) -> int:
    return max(int(round(frame_ms * sample_rate / 1000.0)), 1)


def frame_energies(x, frame_len: int) -> np.ndarray:
    """Energy of each non-overlapping frame; a trailing partial frame is dropped
    unless it is the only one."""
    x = _arr(x)
    count = max(len(x) // frame_len, 1)
    x = x[:count * frame_len]
    if len(x) < count * frame_len:
        return np.array([np.sum(x**2)])
    return np.sum(x.reshape(count, frame_len) ** 2, axis=1)


def frame_snr_db(clean, processed, frame_len: int) -> np.ndarray:
    """Per-frame SNR clamped to [-10, 35] dB."""
    c, p = _arr(clean), _arr(processed)
    ec = frame_energies(c, frame_len)
    ee = frame_energies(c - p, frame_len)
    with np.errstate(divide="ignore", invalid="ignore"):
        snr = 10.0 * np.log10(ec / ee)
    snr = np.where(ee == 0, SNR_CEIL_DB, snr)
    snr = np.where((ec == 0) & (ee > 0), SNR_FLOOR_DB, snr)
    return np.clip(snr, SNR_FLOOR_DB, SNR_CEIL_DB)


def active_frames(clean, frame_len: int, silence_floor_db: float = -60.0) -> np.ndarray:
    """Frames whose mean power is within ``silence_floor_db`` of the clip's peak sample power."""
    c = _arr(clean)
    peak = float(np.max(c**2)) if len(c) else 0.0
    if peak == 0:
        return np.zeros(len(frame_energies(c, frame_len)), dtype=bool)
    mean_power = frame_energies(c, frame_len) / frame_len
    return mean_power >= peak * 10 ** (silence_floor_db / 10.0)


def impulse_frames(centers, n_frames: int, frame_len: int) -> np.ndarray:
    marked = np.zeros(n_frames, dtype=bool)
    for c in centers:
        f = int(c) // frame_len
        if 0 <= f < n_frames:
            marked[f] = True
    return marked


def metrics(clean, processed, frame_ms: float = 32.0, silence_floor_db: float = -60.0,
            impulse_centers=None, sample_rate: int | None = None) -> Metrics:
    """Segmental SNR, worst frame residual, and SNR over impulse-free frames.

    ``peak_residual_db`` is the largest frame residual-to-clean ratio, i.e.
    minus the smallest clamped frame SNR. Frames holding any of
    ``impulse_centers`` are left out of ``active_distortion_db``; with no
    centres it equals ``seg_snr_db``. Values are NaN when no frame qualifies.
    """
    c, p = _arr(clean), _arr(processed)
    if len(c) != len(p):
        raise ValueError("length mismatch")
    if isinstance(clean, Signal) and isinstance(processed, Signal) and clean.sample_rate != processed.sample_rate:
        raise ValueError("sample rate mismatch")
    if sample_rate is None:
        sample_rate = clean.sample_rate if isinstance(clean, Signal) else 16000
    flen = frame_length(frame_ms, sample_rate)
    snr = frame_snr_db(c, p, flen)
    act = active_frames(c, flen, silence_floor_db)
    free = act & ~impulse_frames(impulse_centers or [], len(snr), flen)
    nan = float("nan")
    return Metrics(
        seg_snr_db=float(np.mean(snr[act])) if act.any() else nan,
        peak_residual_db=float(-np.min(snr[act])) if act.any() else nan,
        active_distortion_db=float(np.mean(snr[free])) if free.any() else nan,
        active_frames=int(act.sum()),
        impulse_free_frames=int(free.sum()),
    )


def impulse_residual_reduction_db(clean, noisy, processed, centers, frame_len: int = 512) -> float:
    """How far processing lowers the residual energy in frames holding an impulse.

    Ratio in dB of summed ``(noisy - clean)**2`` to summed
    ``(processed - clean)**2`` over all frames containing a centre.
    """
    c, n, p = _arr(clean), _arr(noisy), _arr(processed)
    before = frame_energies(n - c, frame_len)
    after = frame_energies(p - c, frame_len)
    marked = impulse_frames(centers, len(before), frame_len)
    if not marked.any():
        raise ValueError("no impulse frames")
    return float(10.0 * np.log10(before[marked].sum() / after[marked].sum()))
