"""Mono RIFF/WAVE reading and writing for 16-bit PCM and 32-bit IEEE float.

The stdlib ``wave`` module only handles integer PCM, so the container is
parsed directly with ``struct``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..framing import Signal

FORMAT_PCM = 1
FORMAT_FLOAT = 3
PCM16_SCALE = 32768.0


class WavError(ValueError):
    """Raised for malformed or unsupported WAV files."""


@dataclass
class WavFile:
    signal: Signal
    format: str = "pcm16"
    channels: int = 1

    @property
    def sample_rate(self) -> int:
        return self.signal.sample_rate

    @property
    def samples(self) -> np.ndarray:
        return self.signal.samples


def _chunks(data: bytes):
    pos = 12
    while pos + 8 <= len(data):
        cid, size = struct.unpack_from("<4sI", data, pos)
        body = data[pos + 8:pos + 8 + size]
        yield cid, size, body
        pos += 8 + size + (size & 1)


def parse_wav(data: bytes) -> WavFile:
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavError("not a WAV file")
    fmt = None
    samples = None
    for cid, size, body in _chunks(data):
        if cid == b"fmt ":
            if len(body) < 16:
                raise WavError("corrupt file")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data":
            if fmt is None:
                raise WavError("corrupt file")
            if len(body) < size:
                raise WavError("corrupt file")
            samples = body
            break
    if fmt is None or samples is None:
        raise WavError("corrupt file")
    tag, channels, rate, byte_rate, block_align, bits = fmt
    if (tag, bits) == (FORMAT_PCM, 16):
        kind, dtype = "pcm16", "<i2"
    elif (tag, bits) == (FORMAT_FLOAT, 32):
        kind, dtype = "float32", "<f4"
    else:
        raise WavError("unsupported encoding")
    if channels != 1:
        raise WavError("unsupported encoding: only mono files are accepted")
    if rate == 0 or block_align != bits // 8 or byte_rate != rate * block_align:
        raise WavError("corrupt file")
    if len(samples) % block_align:
        raise WavError("corrupt file")
    x = np.frombuffer(samples, dtype=dtype).astype(np.float64)
    if kind == "pcm16":
        x /= PCM16_SCALE
    try:
        sig = Signal(x, rate)
    except ValueError as exc:
        raise WavError(f"corrupt file: {exc}") from None
    return WavFile(sig, kind, channels)


def read_wav(path) -> WavFile:
    return parse_wav(Path(path).read_bytes())


def encode_wav(wav: WavFile) -> bytes:
    x = np.asarray(wav.samples, dtype=np.float64)
    if wav.channels != 1:
        raise WavError("only mono files can be written")
    if not np.all(np.isfinite(x)):
        raise WavError("samples must be finite")
    if wav.format == "pcm16":
        q = np.rint(np.clip(x, -1.0, 1.0 - 1.0 / PCM16_SCALE) * PCM16_SCALE)
        payload = q.astype("<i2").tobytes()
        tag, bits = FORMAT_PCM, 16
    elif wav.format == "float32":
        payload = x.astype("<f4").tobytes()
        tag, bits = FORMAT_FLOAT, 32
    else:
        raise WavError("unsupported encoding")
    align = bits // 8
    rate = int(wav.sample_rate)
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, tag, 1, rate, rate * align, align, bits,
        b"data", len(payload),
    )
    return header + payload


def write_wav(path, wav: WavFile) -> None:
    Path(path).write_bytes(encode_wav(wav))
