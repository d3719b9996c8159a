"""
Signal Model - Multiband Nyquist-rate test signals for wideband sensing

K primary users (PUs) transmit OFDM/BPSK in randomly chosen channels of a
band split into L channels of width B = W/L, on top of circularly symmetric
complex Gaussian noise. A frame holds L*N Nyquist samples so that each of
the multicoset branches later sees exactly N samples.
"""

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Tuple, Union

import numpy as np

import config
from core.errors import ParameterError

SeedLike = Union[None, int, Sequence[int], np.random.SeedSequence, np.random.Generator]


def as_rng(seed: SeedLike) -> np.random.Generator:
    """Turn an int, SeedSequence or Generator into a Generator"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class SpectrumConfig:
    """Static scenario parameters"""

    L: int = config.CHANNELS
    W: float = config.BANDWIDTH_HZ
    frame_len_N: int = config.FRAME_LEN
    subcarriers_C: int = config.SUBCARRIERS
    snr_db: float = config.SNR_DB
    pu_powers: Tuple[float, ...] = ()
    noise_var: float = config.NOISE_VAR

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 2:
            raise ParameterError(f"channel count L must be an integer >= 2, got {self.L}")
        if self.W <= 0:
            raise ParameterError(f"bandwidth W must be positive, got {self.W}")
        if self.frame_len_N < 1:
            raise ParameterError(f"frame_len_N must be >= 1, got {self.frame_len_N}")
        if not 1 <= self.subcarriers_C <= self.frame_len_N:
            # one subcarrier per FFT bin at most; a channel owns N bins of the frame
            raise ParameterError(
                f"subcarriers_C must lie in [1, frame_len_N={self.frame_len_N}], got {self.subcarriers_C}"
            )
        if any(e <= 0 for e in self.pu_powers):
            raise ParameterError("pu_powers must all be positive")
        if self.noise_var < 0:
            raise ParameterError(f"noise_var must be >= 0, got {self.noise_var}")
        if self.noise_var == 0 and not self.noiseless:
            # the PUs are scaled against the noise power, a zero floor would silence them
            raise ParameterError("noise_var = 0 needs snr_db = inf (noiseless mode)")
        object.__setattr__(self, "pu_powers", tuple(float(e) for e in self.pu_powers))

    @property
    def B(self) -> float:
        """Per-channel bandwidth in Hz"""
        return self.W / self.L

    @property
    def T(self) -> float:
        """Nyquist interval in seconds"""
        return 1.0 / self.W

    @property
    def coset_rate(self) -> float:
        """Sampling rate of one coset, f_s = W / L"""
        return self.W / self.L

    @property
    def frame_samples(self) -> int:
        return self.L * self.frame_len_N

    @property
    def frame_duration(self) -> float:
        return self.frame_samples * self.T

    @property
    def noiseless(self) -> bool:
        return math.isinf(self.snr_db) and self.snr_db > 0

    def pu_power(self, rank: int) -> float:
        """E_i for the rank-th active PU, 1.0 when not configured"""
        if rank < len(self.pu_powers):
            return self.pu_powers[rank]
        return 1.0


@dataclass(frozen=True)
class SupportSet:
    """Occupied channel indices, 1-based, kept sorted"""

    indices: Tuple[int, ...]
    L: int

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(set(idx)) != len(idx):
            raise ParameterError(f"support indices must be distinct, got {idx}")
        if idx and (idx[0] < 1 or idx[-1] > self.L):
            raise ParameterError(f"support indices must lie in 1..{self.L}, got {idx}")
        object.__setattr__(self, "indices", idx)

    @property
    def K(self) -> int:
        return len(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, channel) -> bool:
        return channel in self.indices

    def as_set(self) -> frozenset:
        return frozenset(self.indices)

    def __str__(self) -> str:
        return "{" + ", ".join(str(i) for i in self.indices) + "}"


@dataclass
class NyquistSignal:
    """One sensing frame sampled at the Nyquist rate W"""

    samples: np.ndarray
    truth: Optional[SupportSet] = None
    noise_var: float = 0.0
    sample_rate: float = field(default=config.BANDWIDTH_HZ)

    def __len__(self) -> int:
        return len(self.samples)


def draw_support(L: int, K: int, seed: SeedLike) -> SupportSet:
    """Pick K distinct channels uniformly among all size-K subsets"""
    if K < 0 or K > L:
        raise ParameterError(f"sparsity order K must lie in [0, L={L}], got {K}")
    rng = as_rng(seed)
    chosen = rng.choice(L, size=K, replace=False) + 1 if K else []
    return SupportSet(tuple(int(c) for c in chosen), L)


def subcarrier_bins(channel: int, cfg: SpectrumConfig) -> np.ndarray:
    """FFT bins of the L*N frame that carry the C subcarriers of a channel"""
    n = cfg.frame_len_N
    start = (channel - 1) * n
    return start + (np.arange(cfg.subcarriers_C) * n) // cfg.subcarriers_C


def synthesize_pu(channel: int, power: float, cfg: SpectrumConfig, seed: SeedLike) -> np.ndarray:
    """
    One OFDM/BPSK primary user confined to its channel band.

    BPSK symbols go on C equispaced bins inside [(channel-1)B, channel*B),
    every other bin stays zero, and one inverse FFT spanning the whole frame
    gives the time signal (no cyclic prefix). The result is rescaled so its
    empirical mean power equals `power` (E_i with B normalized to one channel).
    """
    if not 1 <= channel <= cfg.L:
        raise ParameterError(f"channel must lie in 1..{cfg.L}, got {channel}")
    if power < 0:
        raise ParameterError(f"PU power must be positive, got {power}")
    if power == 0:
        return np.zeros(cfg.frame_samples, dtype=complex)

    rng = as_rng(seed)
    symbols = 2.0 * rng.integers(0, 2, size=cfg.subcarriers_C) - 1.0
    spectrum = np.zeros(cfg.frame_samples, dtype=complex)
    spectrum[subcarrier_bins(channel, cfg)] = symbols
    waveform = np.fft.ifft(spectrum)

    current = np.mean(np.abs(waveform) ** 2)
    return waveform * np.sqrt(power / current)


def synthesize_frame(cfg: SpectrumConfig, support: SupportSet, seed: SeedLike) -> NyquistSignal:
    """
    Sum of the active PUs plus CN(0, sigma_n^2) noise.

    The PU signals are scaled together so that their total power over the
    noise variance equals snr_db; the E_i keep their relative weights. With
    snr_db = +inf the PUs keep their raw E_i powers and no noise is added.
    """
    if support.L != cfg.L:
        raise ParameterError(f"support was drawn for L={support.L}, config has L={cfg.L}")
    rng = as_rng(seed)

    powers = [cfg.pu_power(rank) for rank in range(support.K)]
    signal = np.zeros(cfg.frame_samples, dtype=complex)
    for channel, power in zip(support, powers):
        signal += synthesize_pu(channel, power, cfg, rng)

    if cfg.noiseless:
        return NyquistSignal(signal, support, 0.0, cfg.W)

    sigma2 = cfg.noise_var
    if support.K:
        target = sigma2 * 10 ** (cfg.snr_db / 10)
        # PUs sit on disjoint FFT bins, so their powers add exactly
        signal *= np.sqrt(target / sum(powers))

    noise = np.sqrt(sigma2 / 2) * (
        rng.standard_normal(cfg.frame_samples) + 1j * rng.standard_normal(cfg.frame_samples)
    )
    return NyquistSignal(signal + noise, support, sigma2, cfg.W)


def channel_powers(samples: np.ndarray, L: int) -> np.ndarray:
    """
    Power of a Nyquist-rate sequence integrated over each of the L channel
    bands. The entries sum to the mean power of the sequence (Parseval).
    """
    samples = np.asarray(samples)
    total = len(samples)
    if total % L:
        raise ParameterError(f"sequence length {total} is not a multiple of L={L}")
    spectrum = np.abs(np.fft.fft(samples)) ** 2 / total**2
    return spectrum.reshape(L, total // L).sum(axis=1)
