"""
Harness - Monte Carlo sweeps over (p, SNR, bits, K) and the quantization-noise
channel profile
"""

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

import config
from core.acquisition import CosetPattern, bussgang_decompose, multicoset_sample, quantize_1bit
from core.errors import ParameterError, TrialError
from core.sensing_engine import SensingEngine, TrialOutcome, TrialSeed, trial_streams
from core.signal_model import SpectrumConfig, SupportSet, as_rng, channel_powers, draw_support, synthesize_frame
from core.statistics_manager import CellStatistics, MetricsRow, StatisticsManager

EIGEN_COLUMNS = ["cell", "trial", "index", "eigenvalue"]
PROFILE_COLUMNS = ["channel", "occupied", "quantization_power", "gaussian_power"]


@dataclass
class ExperimentConfig:
    """One sweep: the Cartesian product of the four axes, `trials` frames per cell"""

    base: SpectrumConfig = field(default_factory=SpectrumConfig)
    p_values: Tuple[int, ...] = (20,)
    snr_values: Tuple[float, ...] = (config.SNR_DB,)
    bits_values: Tuple[Optional[int], ...] = (1,)
    k_values: Tuple[int, ...] = (4,)
    trials: int = config.TRIALS
    master_seed: int = config.MASTER_SEED
    p_false: float = config.EFT_P_FALSE
    order_method: str = config.ORDER_METHOD
    covariance_domain: str = config.COVARIANCE_DOMAIN
    clip_sigma: float = config.CLIP_SIGMA
    threads: Optional[int] = None  # None: single worker unless resolved by the caller
    out: Optional[str] = None
    eigs_out: Optional[str] = None
    record_timing: bool = False

    def __post_init__(self):
        self.p_values = tuple(int(p) for p in self.p_values)
        self.snr_values = tuple(float(s) for s in self.snr_values)
        self.bits_values = tuple(None if b is None else int(b) for b in self.bits_values)
        self.k_values = tuple(int(k) for k in self.k_values)

        if self.trials < 1:
            raise ParameterError(f"trials must be >= 1, got {self.trials}")
        if self.threads is not None and self.threads < 1:
            raise ParameterError(f"threads must be >= 1, got {self.threads}")
        for name, axis in (("p", self.p_values), ("snr_db", self.snr_values),
                           ("bits", self.bits_values), ("K", self.k_values)):
            if not axis:
                raise ParameterError(f"sweep axis '{name}' is empty")
        L = self.base.L
        if any(not 1 <= p <= L for p in self.p_values):
            raise ParameterError(f"every p must lie in [1, L={L}], got {list(self.p_values)}")
        if any(not 0 <= k <= L for k in self.k_values):
            raise ParameterError(f"every K must lie in [0, L={L}], got {list(self.k_values)}")
        if any(b is not None and not 1 <= b <= 64 for b in self.bits_values):
            raise ParameterError(f"bits must lie in 1..64 or be none, got {list(self.bits_values)}")
        if self.base.noise_var == 0 and any(not math.isinf(s) or s < 0 for s in self.snr_values):
            raise ParameterError("noise_var = 0 only works with snr_db = inf")

    def cells(self) -> List[Tuple[int, float, Optional[int], int]]:
        """(p, snr_db, bits, K) per cell; p varies fastest so each curve is contiguous"""
        product = itertools.product(self.snr_values, self.bits_values, self.k_values, self.p_values)
        return [(p, snr, bits, K) for snr, bits, K, p in product]

    def engine(self) -> SensingEngine:
        return SensingEngine(self.base, self.order_method, self.p_false,
                             self.covariance_domain, self.clip_sigma)


def _guarded_trial(engine: SensingEngine, p: int, bits: Optional[int], K: int,
                   seed: TrialSeed, trial_index: int,
                   cell_index: int) -> Union[TrialOutcome, TrialError]:
    try:
        return engine.run_trial(p, bits, K, seed, trial_index, cell_index)
    except TrialError as exc:
        return exc


def run_sweep(cfg: ExperimentConfig, verbose: bool = True) -> List[MetricsRow]:
    """
    Run every cell of the sweep and return one MetricsRow per cell.

    Trial t of cell c is seeded with (master_seed, c, t) and results are
    folded in trial order, so rows do not depend on cfg.threads. Failed
    trials are counted per cell and the sweep moves on.
    """
    cells = cfg.cells()
    manager = StatisticsManager()
    base_engine = cfg.engine()
    eigen_records = []
    workers = cfg.threads or 1

    if verbose:
        print(f"🚀 Sweep: {len(cells)} cells x {cfg.trials} trials on {workers} thread(s)")

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for cell_index, (p, snr_db, bits, K) in enumerate(cells):
            engine = base_engine.with_snr(snr_db)
            stats = CellStatistics(p, snr_db, bits, K)
            start = time.perf_counter()

            futures = [
                pool.submit(_guarded_trial, engine, p, bits, K,
                            (cfg.master_seed, cell_index, trial), trial, cell_index)
                for trial in range(cfg.trials)
            ]
            for trial, future in enumerate(futures):
                result = future.result()
                if isinstance(result, TrialError):
                    stats.record_failure()
                    if verbose:
                        print(f"⚠️ {result}")
                    continue
                stats.record_outcome(result)
                if cfg.eigs_out:
                    eigen_records.extend(
                        (cell_index, trial, index, float(value))
                        for index, value in enumerate(result.eigenvalues, start=1)
                    )

            wall_time = time.perf_counter() - start if cfg.record_timing else 0.0
            row = stats.summary(wall_time)
            manager.record_row(row)
            if verbose:
                bits_label = "none" if bits is None else bits
                print(f"📊 Cell {cell_index + 1}/{len(cells)}: p={p} snr={snr_db:g} dB bits={bits_label} "
                      f"K={K} -> Pd={row.pd:.4f} Pf={row.pf:.4f} mean K_hat={row.mean_k_hat:.2f}")

    if cfg.out:
        manager.export_to_csv(cfg.out)
    if cfg.eigs_out:
        export_eigenvalues(eigen_records, cfg.eigs_out)
    if verbose:
        summary = manager.get_summary_stats()
        status = "✅" if summary["total_failures"] == 0 else "⚠️"
        print(f"{status} Sweep finished: {summary['total_trials']} trials, "
              f"{summary['total_failures']} failed")
    return manager.rows


def export_eigenvalues(records: Sequence[Tuple[int, int, int, float]], filename: str) -> str:
    """Write (cell, trial, index, eigenvalue) rows, index 1 being the largest"""
    df = pd.DataFrame(list(records), columns=EIGEN_COLUMNS)
    df.to_csv(filename, index=False, float_format="%.9e", lineterminator="\n")
    print(f"📊 Eigenvalues exported to: {filename}")
    return filename


@dataclass
class NoiseProfile:
    """Per-channel power of the 1-bit quantization noise psi = q - gain*x"""

    support: SupportSet
    quantization_power: np.ndarray
    gaussian_power: np.ndarray
    gain: float
    distortion_power: float

    @property
    def occupied(self) -> np.ndarray:
        mask = np.zeros(self.support.L, dtype=bool)
        mask[[c - 1 for c in self.support]] = True
        return mask

    @property
    def occupied_mean(self) -> float:
        mask = self.occupied
        return float(self.quantization_power[mask].mean()) if mask.any() else 0.0

    @property
    def vacant_mean(self) -> float:
        mask = ~self.occupied
        return float(self.quantization_power[mask].mean()) if mask.any() else 0.0

    @property
    def vacant_cv(self) -> float:
        """Coefficient of variation of the vacant-channel powers"""
        vacant = self.quantization_power[~self.occupied]
        if vacant.size == 0 or vacant.mean() == 0:
            return 0.0
        return float(vacant.std() / vacant.mean())

    @property
    def occupied_to_vacant(self) -> float:
        if self.vacant_mean == 0:
            return float("inf")
        return self.occupied_mean / self.vacant_mean

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame({
            "channel": np.arange(1, self.support.L + 1),
            "occupied": self.occupied.astype(int),
            "quantization_power": self.quantization_power,
            "gaussian_power": self.gaussian_power,
        }, columns=PROFILE_COLUMNS)

    def export_to_csv(self, filename: str) -> str:
        self.to_dataframe().to_csv(filename, index=False, float_format="%.9e", lineterminator="\n")
        print(f"📊 Noise profile exported to: {filename}")
        return filename


def noise_profile(cfg: SpectrumConfig, trial_seed: TrialSeed, num_active: int = 4) -> NoiseProfile:
    """
    1-bit quantize a whole Nyquist-rate frame and integrate the power of the
    Bussgang distortion over each channel band. White Gaussian noise of the
    same power goes through the same per-channel integration as a reference.
    """
    if not 0 <= num_active <= cfg.L:
        raise ParameterError(f"num_active must lie in [0, L={cfg.L}], got {num_active}")
    support_seed, _, frame_seed, reference_seed = trial_streams(trial_seed, 4)
    support = draw_support(cfg.L, num_active, support_seed)
    frame = synthesize_frame(cfg, support, frame_seed)

    # all L offsets: the cosets together are the Nyquist sequence
    full = CosetPattern(tuple(range(cfg.L)), cfg.L)
    y = multicoset_sample(frame, full, cfg.frame_len_N)
    q = quantize_1bit(y)
    x = y.data.T.reshape(-1)
    split = bussgang_decompose(x, q.data.T.reshape(-1))

    rng = as_rng(reference_seed)
    reference = np.sqrt(split.distortion_power / 2) * (
        rng.standard_normal(x.size) + 1j * rng.standard_normal(x.size)
    )
    return NoiseProfile(
        support=support,
        quantization_power=channel_powers(split.distortion, cfg.L),
        gaussian_power=channel_powers(reference, cfg.L),
        gain=split.gain,
        distortion_power=split.distortion_power,
    )
