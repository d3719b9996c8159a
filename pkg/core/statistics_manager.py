"""
Statistics Manager - Aggregate Monte Carlo trial outcomes into P_d / P_f rows
"""

from dataclasses import asdict, dataclass
from typing import Dict, List, Optional

import pandas as pd

import config
from core.sensing_engine import TrialOutcome

CSV_COLUMNS = ["p", "snr_db", "bits", "K", "trials", "pd", "pf", "mean_k_hat", "wall_time_s"]


@dataclass(frozen=True)
class MetricsRow:
    """One sweep cell"""

    p: int
    snr_db: float
    bits: Optional[int]
    K: int
    trials: int
    pd: float
    pf: float
    mean_k_hat: float
    wall_time: float = 0.0
    failures: int = 0

    def as_record(self) -> Dict:
        record = asdict(self)
        record["bits"] = "none" if self.bits is None else str(self.bits)
        record["wall_time_s"] = record.pop("wall_time")
        return {column: record[column] for column in CSV_COLUMNS}


class CellStatistics:
    """Running sums for one (p, snr, bits, K) cell"""

    def __init__(self, p: int, snr_db: float, bits: Optional[int], K: int):
        self.p = p
        self.snr_db = snr_db
        self.bits = bits
        self.K = K

        self.trials = 0
        self.failures = 0
        self.detection_sum = 0.0
        self.false_alarm_sum = 0.0
        self.k_hat_sum = 0

    def record_outcome(self, outcome: TrialOutcome):
        self.trials += 1
        self.detection_sum += outcome.detection_ratio
        self.false_alarm_sum += outcome.false_alarm_ratio
        self.k_hat_sum += outcome.k_hat

    def record_failure(self):
        self.failures += 1

    def summary(self, wall_time: float = 0.0) -> MetricsRow:
        n = max(self.trials, 1)
        return MetricsRow(
            p=self.p,
            snr_db=self.snr_db,
            bits=self.bits,
            K=self.K,
            trials=self.trials,
            pd=self.detection_sum / n,
            pf=self.false_alarm_sum / n,
            mean_k_hat=self.k_hat_sum / n,
            wall_time=wall_time,
            failures=self.failures,
        )


class StatisticsManager:
    """Collect sweep rows and export them"""

    def __init__(self):
        self.rows: List[MetricsRow] = []
        self.total_trials = 0
        self.total_failures = 0

    def record_row(self, row: MetricsRow):
        self.rows.append(row)
        self.total_trials += row.trials
        self.total_failures += row.failures

    def get_summary_stats(self) -> Dict:
        return {
            "cells": len(self.rows),
            "total_trials": self.total_trials,
            "total_failures": self.total_failures,
            "best_pd": max((r.pd for r in self.rows), default=0.0),
            "worst_pf": max((r.pf for r in self.rows), default=0.0),
        }

    def get_rows_dataframe(self) -> pd.DataFrame:
        """Get sweep rows as pandas DataFrame"""
        return pd.DataFrame([row.as_record() for row in self.rows], columns=CSV_COLUMNS)

    def export_to_csv(self, filename: str) -> str:
        """Export sweep rows to CSV file"""
        df = self.get_rows_dataframe()
        df.to_csv(filename, index=False, float_format=config.CSV_FLOAT_FORMAT, lineterminator="\n")
        print(f"📊 Metrics exported to: {filename}")
        return filename
