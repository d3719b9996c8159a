"""
Acquisition - Multicoset sampler, 1-bit and b-bit quantizers, Bussgang diagnostics
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

import config
from core.errors import ParameterError, QuantizationStateError, ShapeError, UndefinedGainError
from core.signal_model import NyquistSignal, SeedLike, as_rng

INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class CosetPattern:
    """The p distinct time offsets c_i (in Nyquist periods) of the cosets"""

    offsets: Tuple[int, ...]
    L: int

    def __post_init__(self):
        offsets = tuple(int(c) for c in self.offsets)
        if not 1 <= len(offsets) <= self.L:
            raise ParameterError(f"coset count p must lie in [1, L={self.L}], got {len(offsets)}")
        if len(set(offsets)) != len(offsets):
            raise ParameterError(f"coset offsets must be distinct, got {offsets}")
        if min(offsets) < 0 or max(offsets) >= self.L:
            raise ParameterError(f"coset offsets must lie in [0, {self.L - 1}], got {offsets}")
        object.__setattr__(self, "offsets", offsets)

    @property
    def p(self) -> int:
        return len(self.offsets)


@dataclass(frozen=True)
class QuantizerSpec:
    """Quantizer depth; bits=None means no quantizer"""

    bits: Optional[int] = None
    clip_sigma: float = config.CLIP_SIGMA

    def __post_init__(self):
        if self.bits is not None and not 1 <= self.bits <= 64:
            raise ParameterError(f"bits must lie in 1..64, got {self.bits}")
        if self.clip_sigma <= 0:
            raise ParameterError(f"clip_sigma must be positive, got {self.clip_sigma}")

    @property
    def is_identity(self) -> bool:
        return self.bits is None or self.bits >= config.IDENTITY_BITS

    def label(self) -> str:
        return "none" if self.bits is None else str(self.bits)


@dataclass
class CosetSamples:
    """p x N complex samples, row i from coset i"""

    data: np.ndarray
    pattern: CosetPattern
    quantized: Optional[QuantizerSpec] = None

    def __post_init__(self):
        if self.data.ndim != 2 or self.data.shape[0] != self.pattern.p:
            raise ShapeError(f"expected {self.pattern.p} coset rows, got array of shape {self.data.shape}")

    @property
    def p(self) -> int:
        return self.data.shape[0]

    @property
    def N(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class BussgangSplit:
    """q = gain * y + distortion, with the distortion uncorrelated with y"""

    gain: float
    signal_power: float
    distortion_power: float
    distortion: np.ndarray

    @property
    def sqnr_db(self) -> float:
        if self.distortion_power == 0:
            return math.inf
        return 10 * math.log10(self.signal_power / self.distortion_power)


def draw_pattern(L: int, p: int, seed: SeedLike) -> CosetPattern:
    """p distinct offsets drawn without replacement from 0..L-1 (stored sorted)"""
    if not 1 <= p <= L:
        raise ParameterError(f"coset count p must lie in [1, L={L}], got {p}")
    rng = as_rng(seed)
    offsets = np.sort(rng.choice(L, size=p, replace=False))
    return CosetPattern(tuple(int(c) for c in offsets), L)


def multicoset_sample(x: Union[NyquistSignal, np.ndarray], pattern: CosetPattern,
                      N: Optional[int] = None) -> CosetSamples:
    """y_i[m] = x[m*L + c_i] for m = 0..N-1"""
    samples = np.asarray(x.samples if isinstance(x, NyquistSignal) else x)
    L = pattern.L
    if N is None:
        N = len(samples) // L
    if N < 1 or len(samples) < L * N:
        raise ShapeError(f"need at least L*N = {L * max(N, 1)} samples, got {len(samples)}")

    frame = samples[: L * N].reshape(N, L)
    data = np.ascontiguousarray(frame[:, list(pattern.offsets)].T)
    return CosetSamples(data, pattern)


def _sign(values: np.ndarray) -> np.ndarray:
    # sign(0) := +1
    return np.where(values >= 0, 1.0, -1.0)


def quantize_1bit(y: CosetSamples) -> CosetSamples:
    """Keep only the signs of the real and imaginary parts, scaled by 1/sqrt(2)"""
    if y.quantized is not None:
        raise QuantizationStateError(f"samples are already quantized ({y.quantized.label()}-bit)")
    data = (_sign(y.data.real) + 1j * _sign(y.data.imag)) * INV_SQRT2
    return CosetSamples(data, y.pattern, QuantizerSpec(bits=1))


def quantizer_step(row: np.ndarray, spec: QuantizerSpec) -> float:
    """Step of the mid-rise quantizer for one coset row"""
    sigma = math.sqrt(np.mean(np.abs(row) ** 2) / 2)  # per real component
    return 2 * spec.clip_sigma * sigma / 2**spec.bits


def _mid_rise(values: np.ndarray, step: float, bits: int) -> np.ndarray:
    if step == 0:
        return np.zeros_like(values)
    top = 2 ** (bits - 1)
    level = np.clip(np.floor(values / step), -top, top - 1)
    return (level + 0.5) * step


def quantize_bbit(y: CosetSamples, spec: QuantizerSpec) -> CosetSamples:
    """
    Uniform mid-rise quantizer with 2**bits levels per component over
    [-clip_sigma*sigma, +clip_sigma*sigma], sigma estimated per coset row.
    Depths of IDENTITY_BITS and above pass the samples through unchanged.
    """
    if spec.bits is None or spec.bits < 2:
        raise ParameterError(f"quantize_bbit needs bits >= 2, got {spec.bits}")
    if y.quantized is not None:
        raise QuantizationStateError(f"samples are already quantized ({y.quantized.label()}-bit)")
    if spec.is_identity:
        return CosetSamples(y.data.copy(), y.pattern, spec)

    data = np.empty_like(y.data)
    for i, row in enumerate(y.data):
        step = quantizer_step(row, spec)
        data[i] = _mid_rise(row.real, step, spec.bits) + 1j * _mid_rise(row.imag, step, spec.bits)
    return CosetSamples(data, y.pattern, spec)


def quantize(y: CosetSamples, bits: Optional[int], clip_sigma: float = config.CLIP_SIGMA) -> CosetSamples:
    """Dispatch on quantizer depth: None (or >= IDENTITY_BITS) is the unquantized path"""
    spec = QuantizerSpec(bits, clip_sigma)
    if spec.is_identity:
        return y
    if spec.bits == 1:
        return quantize_1bit(y)
    return quantize_bbit(y, spec)


def _as_array(samples: Union[CosetSamples, np.ndarray]) -> np.ndarray:
    return samples.data if isinstance(samples, CosetSamples) else np.asarray(samples)


def bussgang_decompose(y: Union[CosetSamples, np.ndarray],
                       q: Union[CosetSamples, np.ndarray]) -> BussgangSplit:
    """
    Least-squares Bussgang split of q against its input y.

    gain = Re(sum q conj(y)) / sum |y|^2, distortion = q - gain*y.
    """
    if isinstance(y, CosetSamples) and y.quantized is not None:
        raise QuantizationStateError("the Bussgang reference y must be unquantized")
    y_arr = _as_array(y)
    q_arr = _as_array(q)
    if y_arr.shape != q_arr.shape:
        raise ShapeError(f"y has shape {y_arr.shape}, q has shape {q_arr.shape}")

    energy = np.vdot(y_arr, y_arr).real
    if energy == 0:
        raise UndefinedGainError("Bussgang gain is undefined for an all-zero input")
    gain = np.vdot(y_arr, q_arr).real / energy

    distortion = q_arr - gain * y_arr
    count = y_arr.size
    signal_power = gain**2 * energy / count
    distortion_power = np.vdot(distortion, distortion).real / count
    return BussgangSplit(float(gain), float(signal_power), float(distortion_power), distortion)


def bussgang_gain(y: Union[CosetSamples, np.ndarray], q: Union[CosetSamples, np.ndarray]) -> float:
    """Least-squares linear gain relating the quantizer output q to its input y"""
    return bussgang_decompose(y, q).gain


def sqnr(y: Union[CosetSamples, np.ndarray], q: Union[CosetSamples, np.ndarray]) -> float:
    """10*log10(P_s / P_psi) in dB; +inf when q carries no distortion"""
    return bussgang_decompose(y, q).sqnr_db
