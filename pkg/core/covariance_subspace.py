"""
Covariance Subspace - Measurement matrix, coset covariance, eigendecomposition,
sparsity-order estimation and the signal subspace U_s = V_s sqrt(Lambda_s)
"""

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import linalg
from scipy.stats import norm

import config
from core.acquisition import CosetPattern, CosetSamples
from core.errors import DecompositionError, ParameterError, ShapeError


@dataclass(frozen=True)
class MeasurementMatrix:
    """p x L partial DFT matrix, A[i, j] = exp(-j 2 pi j c_i / L) (0-based j)"""

    entries: np.ndarray
    pattern: CosetPattern

    @property
    def shape(self):
        return self.entries.shape


@dataclass(frozen=True)
class CovarianceEstimate:
    matrix: np.ndarray
    num_snapshots: int
    domain: str = "time"

    @property
    def p(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SubspaceModel:
    """Eigenvalues in descending order with aligned eigenvector columns"""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    k_hat: Optional[int] = None
    U_s: Optional[np.ndarray] = None

    @property
    def p(self) -> int:
        return len(self.eigenvalues)


def build_measurement_matrix(pattern: CosetPattern) -> MeasurementMatrix:
    offsets = np.asarray(pattern.offsets)
    columns = np.arange(pattern.L)
    entries = np.exp(-2j * np.pi * np.outer(offsets, columns) / pattern.L)
    return MeasurementMatrix(entries, pattern)


def _hermitian(matrix: np.ndarray) -> np.ndarray:
    return (matrix + matrix.conj().T) / 2


def sample_covariance(q: CosetSamples) -> CovarianceEstimate:
    """Time-domain snapshot covariance (1/N) sum_m q[:, m] q[:, m]^H"""
    if q.N < 1:
        raise ShapeError("need at least one snapshot")
    matrix = q.data @ q.data.conj().T / q.N
    return CovarianceEstimate(_hermitian(matrix), q.N, "time")


def aligned_covariance(q: CosetSamples) -> CovarianceEstimate:
    """
    Frequency-domain covariance of the phase-aligned coset spectra.

    Bin r of coset i sits at f = r*B/N; multiplying it by exp(-j 2 pi f c_i T)
    removes the offset delay, which leaves every occupied channel as a single
    steering vector across the cosets. The spectra are conjugated so that
    column j of the measurement matrix steers channel j of the [0, W) band.
    The diagonal equals that of sample_covariance.
    """
    if q.N < 1:
        raise ShapeError("need at least one snapshot")
    offsets = np.asarray(q.pattern.offsets)
    bins = np.arange(q.N)
    phase = np.exp(-2j * np.pi * np.outer(offsets, bins) / (q.N * q.pattern.L))
    spectra = np.conj(np.fft.fft(q.data, axis=1) * phase)
    matrix = spectra @ spectra.conj().T / q.N**2
    return CovarianceEstimate(_hermitian(matrix), q.N, "aligned")


def estimate_covariance(q: CosetSamples, domain: str = config.COVARIANCE_DOMAIN) -> CovarianceEstimate:
    if domain == "aligned":
        return aligned_covariance(q)
    if domain == "time":
        return sample_covariance(q)
    raise ParameterError(f"unknown covariance domain '{domain}' (expected 'aligned' or 'time')")


def eigendecompose(R: CovarianceEstimate) -> SubspaceModel:
    """Eigenpairs of the Hermitian covariance, largest eigenvalue first"""
    try:
        values, vectors = linalg.eigh(R.matrix)
    except (linalg.LinAlgError, ValueError) as exc:
        raise DecompositionError(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(values)[::-1]
    return SubspaceModel(values[order], vectors[:, order])


def _floored(eigenvalues: np.ndarray) -> np.ndarray:
    values = np.asarray(eigenvalues, dtype=float)
    floor = config.EIGEN_FLOOR * max(values[0], 0.0)
    if floor == 0:
        floor = np.finfo(float).tiny
    return np.maximum(values, floor)


def _profile_offset(log_values: np.ndarray) -> np.ndarray:
    """
    Least-squares line through log eigenvalues (last axis, positions 1..P),
    evaluated at position 0.
    """
    positions = np.arange(1, log_values.shape[-1] + 1)
    centered = positions - positions.mean()
    slope = (log_values * centered).sum(axis=-1) / (centered**2).sum()
    return log_values.mean(axis=-1) - slope * positions.mean()


def eft_statistic(eigenvalues: np.ndarray, k: int) -> float:
    """
    Log of lambda_k (0-based) over the value predicted for it by the
    exponential profile fitted to the eigenvalues below it.
    """
    values = np.asarray(eigenvalues, dtype=float)
    below = values[k + 1:]
    if len(below) < config.EFT_MIN_TAIL:
        raise ParameterError(f"need {config.EFT_MIN_TAIL} eigenvalues below index {k}, got {len(below)}")
    return float(math.log(values[k]) - _profile_offset(np.log(below)))


@lru_cache(maxsize=None)
def eft_threshold(size: int, n_snapshots: int, p_false: float = config.EFT_P_FALSE) -> float:
    """
    Level of the top statistic of `size` white-noise eigenvalues estimated
    from `n_snapshots` snapshots, exceeded with probability about p_false.

    Calibrated once per (size, n_snapshots, p_false) on seeded noise-only
    covariances: mean + q(p_false) * std of the simulated statistic.
    """
    if size < config.EFT_MIN_TAIL + 1:
        raise ParameterError(f"need at least {config.EFT_MIN_TAIL + 1} eigenvalues, got {size}")
    rng = np.random.default_rng([config.EFT_CALIBRATION_SEED, size, n_snapshots])
    stats = []
    for start in range(0, config.EFT_CALIBRATION_RUNS, config.EFT_CALIBRATION_BATCH):
        batch = min(config.EFT_CALIBRATION_BATCH, config.EFT_CALIBRATION_RUNS - start)
        shape = (batch, size, n_snapshots)
        noise = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)
        covariances = noise @ noise.conj().transpose(0, 2, 1) / n_snapshots
        values = np.linalg.eigvalsh(covariances)[:, ::-1]
        values = np.maximum(values, config.EIGEN_FLOOR * values[:, :1])
        stats.append(np.log(values[:, 0]) - _profile_offset(np.log(values[:, 1:])))
    stats = np.concatenate(stats)
    return float(stats.mean() + norm.isf(p_false) * stats.std())


def estimate_order_eft(eigenvalues: np.ndarray, N: int, p_false: float = config.EFT_P_FALSE) -> int:
    """
    Exponential fitting test.

    Walks up from the smallest eigenvalues. At index k the eigenvalues below
    it are taken as noise; a decreasing exponential fitted to them predicts
    lambda_k, and lambda_k is declared signal when it rises above the
    prediction by more than noise alone would at level p_false. The first
    such k gives K_hat; 0 means no signal. The fit needs EFT_MIN_TAIL noise
    eigenvalues, so K_hat <= p - EFT_MIN_TAIL, and a spectrum with no flat
    floor (every eigenvalue a signal one) is read as a smooth profile.
    """
    values = _floored(eigenvalues)
    p = len(values)
    if p < 2:
        raise ParameterError(f"need at least two eigenvalues, got {p}")
    if not 0 < p_false < 1:
        raise ParameterError(f"p_false must lie in (0, 1), got {p_false}")

    for k in range(p - 1 - config.EFT_MIN_TAIL, -1, -1):
        if eft_statistic(values, k) > eft_threshold(p - k, N, p_false):
            return k + 1
    return 0


def _information_criterion(eigenvalues: np.ndarray, N: int, penalty) -> int:
    values = _floored(eigenvalues)
    p = len(values)
    scores = []
    for k in range(p):
        tail = values[k:]
        m = p - k
        geometric = np.exp(np.mean(np.log(tail)))
        fit = N * m * math.log(tail.mean() / geometric)
        scores.append(fit + penalty(k, p))
    return int(np.argmin(scores))


def estimate_order_mdl(eigenvalues: np.ndarray, N: int) -> int:
    """Minimum description length source-number estimate"""
    return _information_criterion(eigenvalues, N, lambda k, p: 0.5 * (k * (2 * p - k) + 1) * math.log(N))


def estimate_order_aic(eigenvalues: np.ndarray, N: int) -> int:
    """Akaike source-number estimate; tends to overestimate"""
    return _information_criterion(eigenvalues, N, lambda k, p: k * (2 * p - k))


def estimate_order(eigenvalues: np.ndarray, N: int, method: str = config.ORDER_METHOD,
                   p_false: float = config.EFT_P_FALSE) -> int:
    if method == "eft":
        return estimate_order_eft(eigenvalues, N, p_false)
    if method == "mdl":
        return min(estimate_order_mdl(eigenvalues, N), len(eigenvalues) - 1)
    if method == "aic":
        return min(estimate_order_aic(eigenvalues, N), len(eigenvalues) - 1)
    raise ParameterError(f"unknown order method '{method}' (expected 'eft', 'mdl' or 'aic')")


def signal_subspace(model: SubspaceModel, k_hat: int) -> np.ndarray:
    """
    U_s = V_s sqrt(Lambda_s) over the k_hat leading eigenpairs, negative
    eigenvalues clamped to 0. k_hat = 0 gives an empty p x 0 matrix.
    """
    if not 0 <= k_hat <= model.p:
        raise ParameterError(f"k_hat must lie in [0, p={model.p}], got {k_hat}")
    leading = np.clip(model.eigenvalues[:k_hat], 0.0, None)
    return model.eigenvectors[:, :k_hat] * np.sqrt(leading)


def analyze_subspace(R: CovarianceEstimate, method: str = config.ORDER_METHOD,
                     p_false: float = config.EFT_P_FALSE) -> SubspaceModel:
    """Eigendecompose, estimate K_hat and fill in U_s"""
    model = eigendecompose(R)
    k_hat = estimate_order(model.eigenvalues, R.num_snapshots, method, p_false)
    return replace(model, k_hat=k_hat, U_s=signal_subspace(model, k_hat))
