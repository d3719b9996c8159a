"""
Support Recovery - Simultaneous orthogonal matching pursuit on U_s = A Theta_s

Each iteration picks the dictionary column whose correlation with the
residual, aggregated over the subspace columns with an l2 norm, is largest,
then re-projects U_s onto the orthogonal complement of the selected columns.
"""

from dataclasses import dataclass, field
from typing import List, Tuple, Union

import numpy as np
from numpy.linalg import lstsq, norm

import config
from core.covariance_subspace import MeasurementMatrix
from core.errors import ParameterError, RankDeficiencyError, ShapeError
from core.signal_model import SupportSet


@dataclass
class RecoveryResult:
    support: SupportSet
    residual_norm: float
    selected_order: Tuple[int, ...]  # 1-based channels in selection order
    residual: np.ndarray
    residual_history: List[float] = field(default_factory=list)


def tie_break(scores: np.ndarray) -> int:
    """Index of the largest score; ties go to the lowest index"""
    scores = np.asarray(scores, dtype=float)
    if scores.size == 0:
        raise ParameterError("tie_break needs at least one score")
    return int(np.argmax(scores))


def somp(A: Union[MeasurementMatrix, np.ndarray], U_s: np.ndarray, k_hat: int) -> RecoveryResult:
    dictionary = A.entries if isinstance(A, MeasurementMatrix) else np.asarray(A)
    p, L = dictionary.shape
    U_s = np.asarray(U_s, dtype=complex)
    if U_s.ndim == 1:
        U_s = U_s[:, np.newaxis]
    if U_s.shape[0] != p:
        raise ShapeError(f"U_s has {U_s.shape[0]} rows, A has {p}")
    if not 0 <= k_hat <= p:
        raise ParameterError(f"k_hat must lie in [0, p={p}], got {k_hat}")

    column_norms = norm(dictionary, axis=0)
    if np.any(column_norms == 0):
        raise ParameterError("measurement matrix has an all-zero column")

    selected: List[int] = []
    residual = U_s.copy()
    history = [float(norm(residual))]

    for _ in range(k_hat if U_s.shape[1] else 0):
        scores = norm(dictionary.conj().T @ residual, axis=1) / column_norms
        scores[selected] = -np.inf
        candidate = tie_break(scores)

        trial = selected + [candidate]
        atoms = dictionary[:, trial]
        theta, _, rank, _ = lstsq(atoms, U_s, rcond=None)
        if rank < len(trial):
            raise RankDeficiencyError(
                f"selected columns {[c + 1 for c in trial]} are rank deficient",
                partial_support=tuple(c + 1 for c in selected),
            )
        new_residual = U_s - atoms @ theta
        new_norm = float(norm(new_residual))
        if history[-1] - new_norm <= config.SOMP_MIN_REDUCTION * history[0]:
            break

        selected = trial
        residual = new_residual
        history.append(new_norm)

    channels = tuple(c + 1 for c in selected)
    return RecoveryResult(
        support=SupportSet(channels, L),
        residual_norm=history[-1],
        selected_order=channels,
        residual=residual,
        residual_history=history,
    )
