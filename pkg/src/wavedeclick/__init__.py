"""Wavelet-domain impulse noise suppression for speech."""

from .framing import FrameConfig, Signal, overlap_add, segment
from .profiles import BUILTIN_CLICK, builtin_click_profile, load_profile
from .regularity import (
    DecayProfile,
    ImpulseProfile,
    decay_profile,
    learn_impulse_profile,
    lipschitz_slope,
    pick_impulse_centers,
)
from .suppression import (
    DISABLED,
    DenoiseConfig,
    DetectionRecord,
    attenuate_coarse,
    clip_fine,
    denoise_block,
    denoise_signal,
    dynamic_threshold,
)
from .wavelet import (
    WaveletDecomposition,
    WaveletSpec,
    daubechies,
    forward_dwt,
    inverse_dwt,
    polynomial_suppression_check,
)

__all__ = [
    "BUILTIN_CLICK",
    "DISABLED",
    "DecayProfile",
    "DenoiseConfig",
    "DetectionRecord",
    "FrameConfig",
    "ImpulseProfile",
    "Signal",
    "WaveletDecomposition",
    "WaveletSpec",
    "attenuate_coarse",
    "builtin_click_profile",
    "clip_fine",
    "daubechies",
    "decay_profile",
    "denoise_block",
    "denoise_signal",
    "dynamic_threshold",
    "forward_dwt",
    "inverse_dwt",
    "learn_impulse_profile",
    "lipschitz_slope",
    "load_profile",
    "overlap_add",
    "pick_impulse_centers",
    "polynomial_suppression_check",
    "segment",
]
