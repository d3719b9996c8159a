"""
Sensing Engine - Per-frame subspace-aided sensing pipeline and Monte Carlo trials
Separated from the CLI and the sweep harness
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

import config
from core.acquisition import CosetPattern, draw_pattern, multicoset_sample, quantize
from core.covariance_subspace import (
    CovarianceEstimate,
    SubspaceModel,
    analyze_subspace,
    build_measurement_matrix,
    estimate_covariance,
)
from core.errors import SensingError, TrialError
from core.signal_model import NyquistSignal, SpectrumConfig, SupportSet, draw_support, synthesize_frame
from core.support_recovery import RecoveryResult, somp

TrialSeed = Union[int, Sequence[int]]


def trial_streams(seed: TrialSeed, count: int = 3) -> Tuple[np.random.SeedSequence, ...]:
    """Independent (support, pattern, frame, ...) seed streams for one trial"""
    entropy = int(seed) if isinstance(seed, (int, np.integer)) else [int(s) for s in seed]
    return tuple(np.random.SeedSequence(entropy).spawn(count))


@dataclass
class SensingReport:
    """Everything the pipeline produced for one frame"""

    pattern: CosetPattern
    bits: Optional[int]
    covariance: CovarianceEstimate
    model: SubspaceModel
    recovery: RecoveryResult

    @property
    def estimate(self) -> SupportSet:
        return self.recovery.support

    @property
    def k_hat(self) -> int:
        return self.model.k_hat


@dataclass
class TrialOutcome:
    truth: SupportSet
    estimate: SupportSet
    k_hat: int
    eigenvalues: np.ndarray

    @property
    def hits(self) -> int:
        return len(self.truth.as_set() & self.estimate.as_set())

    @property
    def false_alarms(self) -> int:
        return len(self.estimate.as_set() - self.truth.as_set())

    @property
    def detection_ratio(self) -> float:
        """|S & S_hat| / |S|; with no PU present nothing can be missed, so 1"""
        if self.truth.K == 0:
            return 1.0
        return self.hits / self.truth.K

    @property
    def false_alarm_ratio(self) -> float:
        vacant = self.truth.L - self.truth.K
        return self.false_alarms / vacant if vacant else 0.0


class SensingEngine:
    """Runs multicoset sampling, quantization, subspace estimation and SOMP"""

    def __init__(self, spectrum: Optional[SpectrumConfig] = None,
                 order_method: str = config.ORDER_METHOD,
                 p_false: float = config.EFT_P_FALSE,
                 covariance_domain: str = config.COVARIANCE_DOMAIN,
                 clip_sigma: float = config.CLIP_SIGMA):
        self.spectrum = spectrum or SpectrumConfig()
        self.order_method = order_method
        self.p_false = p_false
        self.covariance_domain = covariance_domain
        self.clip_sigma = clip_sigma

        # Optional hook, called with each finished TrialOutcome
        self.on_trial_complete: Optional[Callable[[TrialOutcome], None]] = None

    def with_snr(self, snr_db: float) -> "SensingEngine":
        """Same detector settings on a scenario with another SNR"""
        engine = SensingEngine(replace(self.spectrum, snr_db=snr_db), self.order_method,
                               self.p_false, self.covariance_domain, self.clip_sigma)
        engine.on_trial_complete = self.on_trial_complete
        return engine

    def sense(self, signal: NyquistSignal, pattern: CosetPattern, bits: Optional[int]) -> SensingReport:
        """Estimate the occupied channels of one Nyquist-rate frame"""
        samples = multicoset_sample(signal, pattern, self.spectrum.frame_len_N)
        quantized = quantize(samples, bits, self.clip_sigma)

        covariance = estimate_covariance(quantized, self.covariance_domain)
        model = analyze_subspace(covariance, self.order_method, self.p_false)

        A = build_measurement_matrix(pattern)
        recovery = somp(A, model.U_s, model.k_hat)
        return SensingReport(pattern, bits, covariance, model, recovery)

    def draw_pattern(self, p: int, seed: TrialSeed) -> CosetPattern:
        _, pattern_seed, _ = trial_streams(seed)
        return draw_pattern(self.spectrum.L, p, pattern_seed)

    def draw_scenario(self, K: int, seed: TrialSeed) -> NyquistSignal:
        support_seed, _, frame_seed = trial_streams(seed)
        support = draw_support(self.spectrum.L, K, support_seed)
        return synthesize_frame(self.spectrum, support, frame_seed)

    def run_trial(self, p: int, bits: Optional[int], K: int, trial_seed: TrialSeed,
                  trial_index: int = 0, cell_index: Optional[int] = None) -> TrialOutcome:
        """Draw support and pattern, synthesize, sense, and score one frame"""
        try:
            signal = self.draw_scenario(K, trial_seed)
            pattern = self.draw_pattern(p, trial_seed)
            report = self.sense(signal, pattern, bits)
        except (SensingError, np.linalg.LinAlgError) as exc:
            raise TrialError(str(exc), trial_index, cell_index) from exc

        outcome = TrialOutcome(signal.truth, report.estimate, report.k_hat, report.model.eigenvalues)
        if self.on_trial_complete:
            self.on_trial_complete(outcome)
        return outcome


def run_trial(cfg: SpectrumConfig, p: int, snr_db: float, bits: Optional[int], K: int,
              trial_seed: TrialSeed, **detector) -> TrialOutcome:
    """Functional form of SensingEngine.run_trial"""
    engine = SensingEngine(replace(cfg, snr_db=snr_db), **detector)
    return engine.run_trial(p, bits, K, trial_seed)
