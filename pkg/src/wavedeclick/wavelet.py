"""Orthonormal dyadic DWT on fixed-length blocks with periodic extension.

Coefficients are laid out so that level-``j`` coefficient ``k`` sits over
samples ``[k * 2**j, (k + 1) * 2**j)``. Daubechies filters are minimum phase,
so each branch is shifted by its own group delay (lowpass at DC, highpass at
3*pi/4) rounded to keep the two shifts of equal parity; equal parity keeps the
periodised filter bank orthonormal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import comb

import numpy as np

DEFAULT_DEPTH = 6


def _daubechies_lowpass(order: int) -> np.ndarray:
    """Minimum-phase Daubechies scaling filter with ``order`` vanishing moments.

    Built by spectral factorisation of the Daubechies polynomial
    ``P(y) = sum_k C(order - 1 + k, k) y**k`` with ``y = sin(w/2)**2``.
    """
    if order < 1:
        raise ValueError("wavelet order must be >= 1")
    # np.roots wants highest power first
    p = [comb(order - 1 + k, k) for k in range(order)][::-1]
    y_roots = np.roots(p) if order > 1 else np.array([])

    # y = (2 - z - 1/z) / 4  ->  z**2 - (2 - 4y) z + 1 = 0; keep |z| < 1
    z_roots = []
    for y in y_roots:
        b = 2.0 - 4.0 * y
        disc = np.sqrt(b * b - 4.0 + 0j)
        z1, z2 = (b + disc) / 2.0, (b - disc) / 2.0
        z_roots.append(z1 if abs(z1) < 1.0 else z2)

    h = np.array([1.0])
    for _ in range(order):
        h = np.convolve(h, [1.0, 1.0])
    if z_roots:
        h = np.convolve(h, np.real(np.poly(z_roots)))
    h = np.real(h)
    h = h * (np.sqrt(2.0) / h.sum())
    # np.poly returns descending powers; reverse so the large taps lead
    h = h[::-1].copy()
    if abs(h[0]) < abs(h[-1]):
        h = h[::-1].copy()
    return h


def _group_delay(f: np.ndarray, w: float) -> float:
    n = np.arange(len(f))
    e = np.exp(-1j * w * n)
    return float(np.real(np.sum(n * f * e) / np.sum(f * e)))


@dataclass(frozen=True)
class WaveletSpec:
    """Analysis/synthesis filter pair of an orthonormal wavelet.

    ``dec_lo`` is the scaling filter ``h`` and ``dec_hi`` the wavelet filter
    ``g[k] = (-1)**k * h[2n - 1 - k]``. Orthonormality makes the synthesis
    filters identical to the analysis ones.
    """

    family: str = "daubechies"
    order: int = 6
    dec_lo: np.ndarray = field(default=None, repr=False, compare=False)
    dec_hi: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.family != "daubechies":
            raise ValueError(f"unsupported wavelet family {self.family!r}")
        if self.dec_lo is None:
            h = _daubechies_lowpass(self.order)
        else:
            h = np.asarray(self.dec_lo, dtype=np.float64)
        k = np.arange(len(h))
        g = (-1.0) ** k * h[::-1]
        h.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "dec_lo", h)
        object.__setattr__(self, "dec_hi", g)

    @property
    def name(self) -> str:
        return f"{self.family}{self.order}"

    @property
    def filter_len(self) -> int:
        return len(self.dec_lo)

    @cached_property
    def lo_offset(self) -> int:
        return round(_group_delay(self.dec_lo, 0.0) - 0.5)

    @cached_property
    def hi_offset(self) -> int:
        lo = self.lo_offset
        return lo + 2 * round((_group_delay(self.dec_hi, 0.75 * np.pi) - 0.5 - lo) / 2)

    def validate(self, tol: float = 1e-10, moment_tol: float = 1e-8) -> None:
        """Raise ``ValueError`` if the filters break orthonormality or moments."""
        h, g = self.dec_lo, self.dec_hi
        if abs(h.sum() - np.sqrt(2.0)) > tol:
            raise ValueError("lowpass filter does not sum to sqrt(2)")
        n = len(h)
        for m in range(0, n // 2):
            s = float(np.dot(h[: n - 2 * m], h[2 * m:]))
            if abs(s - (1.0 if m == 0 else 0.0)) > tol:
                raise ValueError(f"lowpass filter not orthonormal at shift {2 * m}")
        k = np.arange(n, dtype=np.float64)
        for p in range(self.order):
            # relative to the moment of |g| so long filters are judged fairly
            moment = float(np.dot(g, k**p)) / float(np.dot(np.abs(g), k**p))
            if abs(moment) > moment_tol:
                raise ValueError(f"wavelet filter moment {p} does not vanish")


@lru_cache(maxsize=None)
def daubechies(order: int = 6) -> WaveletSpec:
    spec = WaveletSpec("daubechies", order)
    spec.validate()
    return spec


@dataclass
class WaveletDecomposition:
    """Detail bands for levels 1..depth (finest first) plus the level-depth approximation."""

    details: list
    approx: np.ndarray
    depth: int
    block_len: int

    def detail(self, level: int) -> np.ndarray:
        if not 1 <= level <= self.depth:
            raise IndexError(f"level {level} outside 1..{self.depth}")
        return self.details[level - 1]

    def set_detail(self, level: int, coeffs) -> None:
        if not 1 <= level <= self.depth:
            raise IndexError(f"level {level} outside 1..{self.depth}")
        self.details[level - 1] = np.asarray(coeffs, dtype=np.float64)

    def copy(self) -> "WaveletDecomposition":
        return WaveletDecomposition(
            [d.copy() for d in self.details], self.approx.copy(), self.depth, self.block_len
        )

    def coefficients(self) -> np.ndarray:
        """All coefficients as one flat vector (details fine to coarse, then approx)."""
        return np.concatenate(list(self.details) + [self.approx])

    def energy(self) -> float:
        return float(sum(np.dot(d, d) for d in self.details) + np.dot(self.approx, self.approx))

    def check(self) -> None:
        if len(self.details) != self.depth or self.depth < 1:
            raise ValueError("malformed decomposition")
        for j, d in enumerate(self.details, start=1):
            if np.ndim(d) != 1 or len(d) != self.block_len >> j:
                raise ValueError("malformed decomposition")
        if np.ndim(self.approx) != 1 or len(self.approx) != self.block_len >> self.depth:
            raise ValueError("malformed decomposition")
        if self.block_len % (1 << self.depth):
            raise ValueError("malformed decomposition")


def _stage_index(m: int, filter_len: int, offset: int) -> np.ndarray:
    """Periodic input index for output k and tap i: (2k + i - offset) mod m."""
    k = np.arange(m // 2)[:, None]
    taps = np.arange(filter_len)[None, :]
    return (2 * k + taps - offset) % m


def analysis_stage(x: np.ndarray, spec: WaveletSpec):
    """One cascade step: returns (approx, detail), each half the input length."""
    m, n = len(x), spec.filter_len
    approx = x[_stage_index(m, n, spec.lo_offset)] @ spec.dec_lo
    detail = x[_stage_index(m, n, spec.hi_offset)] @ spec.dec_hi
    return approx, detail


def synthesis_stage(approx: np.ndarray, detail: np.ndarray, spec: WaveletSpec) -> np.ndarray:
    """Adjoint (= inverse) of :func:`analysis_stage`."""
    m, n = 2 * len(approx), spec.filter_len
    out = np.zeros(m)
    np.add.at(out, _stage_index(m, n, spec.lo_offset).ravel(), np.outer(approx, spec.dec_lo).ravel())
    np.add.at(out, _stage_index(m, n, spec.hi_offset).ravel(), np.outer(detail, spec.dec_hi).ravel())
    return out


def forward_dwt(block, spec: WaveletSpec | None = None, depth: int = DEFAULT_DEPTH) -> WaveletDecomposition:
    """Mallat cascade of ``depth`` levels with circular boundary extension."""
    spec = spec or daubechies(6)
    x = np.asarray(block, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("block must be one-dimensional")
    n = len(x)
    if depth < 1 or n == 0 or n % (1 << depth):
        raise ValueError("depth exceeds block")
    details = []
    approx = x
    for _ in range(depth):
        approx, d = analysis_stage(approx, spec)
        details.append(d)
    return WaveletDecomposition(details, approx, depth, n)


def inverse_dwt(decomp: WaveletDecomposition, spec: WaveletSpec | None = None) -> np.ndarray:
    spec = spec or daubechies(6)
    decomp.check()
    x = np.asarray(decomp.approx, dtype=np.float64)
    for d in reversed(decomp.details):
        x = synthesis_stage(x, np.asarray(d, dtype=np.float64), spec)
    return x


def polynomial_suppression_check(spec: WaveletSpec, degree: int, block_len: int = 512) -> float:
    """Largest level-1 detail magnitude produced by a unit-scale polynomial.

    The block holds ``t**degree`` with ``t`` running over [-1, 1], so the
    signal scale is 1 and the return value is already relative. Only
    coefficients whose taps do not wrap around the block are inspected.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    t = np.linspace(-1.0, 1.0, block_len)
    x = t**degree
    _, d1 = analysis_stage(x, spec)
    k = np.arange(block_len // 2)
    first = 2 * k - spec.hi_offset
    interior = (first >= 0) & (first + spec.filter_len <= block_len)
    return float(np.max(np.abs(d1[interior])))
