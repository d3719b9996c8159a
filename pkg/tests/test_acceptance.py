"""
Monte Carlo checks at desk scale (1000 trials per cell). Run with `pytest -m slow`.
"""

import numpy as np
import pytest

from core.harness import ExperimentConfig, noise_profile, run_sweep
from core.sensing_engine import SensingEngine
from core.signal_model import SpectrumConfig

pytestmark = pytest.mark.slow

COSET_COUNTS = (8, 12, 16, 20, 24)


def sweep(**settings):
    settings.setdefault("trials", 1000)
    settings.setdefault("threads", 4)
    return run_sweep(ExperimentConfig(**settings), verbose=False)


def detection_by_p(**settings):
    return {row.p: row.pd for row in sweep(**settings)}


class TestSparsityOrders:
    @pytest.mark.parametrize("K", [2, 4, 8])
    def test_half_nyquist_one_bit_detection(self, K):
        row, = sweep(p_values=(20,), snr_values=(5.0,), bits_values=(1,), k_values=(K,), master_seed=300 + K)
        assert row.failures == 0
        assert row.pd >= 0.95
        assert row.pf <= 0.05


class TestQuantizationGap:
    # one quantizer per sweep with a shared seed, so both curves see the same frames
    def test_four_bit_tracks_unquantized(self):
        common = dict(p_values=COSET_COUNTS, snr_values=(0.0,), k_values=(4,), master_seed=400)
        four_bit = detection_by_p(bits_values=(4,), **common)
        unquantized = detection_by_p(bits_values=(None,), **common)
        for p in COSET_COUNTS:
            assert abs(four_bit[p] - unquantized[p]) <= 0.03

    def test_one_bit_costs_less_than_five_db(self):
        common = dict(p_values=(16, 20, 24), k_values=(4,), master_seed=410)
        one_bit = detection_by_p(snr_values=(5.0,), bits_values=(1,), **common)
        unquantized = detection_by_p(snr_values=(0.0,), bits_values=(None,), **common)
        for p in (16, 20, 24):
            assert abs(one_bit[p] - unquantized[p]) <= 0.05


class TestFalseAlarmPeak:
    def test_false_alarms_rise_then_fall_with_coset_count(self):
        rows = sweep(p_values=(4, 6, 8, 12, 16, 20, 24), snr_values=(5.0,), bits_values=(1,),
                     k_values=(4,), master_seed=450)
        pf = [row.pf for row in rows]
        peak = int(np.argmax(pf))
        assert 0 < peak < len(pf) - 1
        assert rows[0].pd < rows[-1].pd


class TestOrderEstimateCalibration:
    def test_noise_only_frames(self):
        engine = SensingEngine()
        k_hats = [engine.run_trial(20, 1, 0, (500, trial)).k_hat for trial in range(1000)]
        assert np.mean(np.array(k_hats) == 0) >= 0.99

    def test_noiseless_frames(self):
        engine = SensingEngine(SpectrumConfig(snr_db=np.inf))
        k_hats = [engine.run_trial(20, None, 4, (501, trial)).k_hat for trial in range(1000)]
        assert all(k == 4 for k in k_hats)


class TestQuantizationNoiseProfile:
    def test_noise_concentrates_in_occupied_channels(self):
        profiles = [noise_profile(SpectrumConfig(snr_db=20.0), (600, seed)) for seed in range(100)]
        occupied = np.mean([profile.occupied_mean for profile in profiles])
        vacant = np.mean([profile.vacant_mean for profile in profiles])
        assert occupied / vacant > 1.5

    def test_vacant_floor_is_even(self):
        profiles = [noise_profile(SpectrumConfig(snr_db=5.0), (601, seed)) for seed in range(100)]
        assert np.mean([profile.vacant_cv for profile in profiles]) < 0.2
