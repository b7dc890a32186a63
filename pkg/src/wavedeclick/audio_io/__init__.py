"""WAV files, synthetic test material and objective metrics."""

from .metrics import Metrics, impulse_residual_reduction_db, metrics
from .synth import mix, mix_gain, synth_impulse_train, synth_speech, synth_surrogates
from .wav import WavError, WavFile, encode_wav, parse_wav, read_wav, write_wav

__all__ = [
    "Metrics",
    "WavError",
    "WavFile",
    "encode_wav",
    "impulse_residual_reduction_db",
    "metrics",
    "mix",
    "mix_gain",
    "parse_wav",
    "read_wav",
    "synth_impulse_train",
    "synth_speech",
    "synth_surrogates",
    "write_wav",
]
