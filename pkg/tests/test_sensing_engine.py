import math

import numpy as np
import pytest

from core.errors import TrialError
from core.sensing_engine import SensingEngine, TrialOutcome, run_trial, trial_streams
from core.signal_model import SpectrumConfig, SupportSet


class TestTrialStreams:
    def test_deterministic(self):
        a = [s.generate_state(2).tolist() for s in trial_streams((1, 2, 3))]
        b = [s.generate_state(2).tolist() for s in trial_streams((1, 2, 3))]
        assert a == b

    def test_streams_differ(self):
        support, pattern, frame = (s.generate_state(1)[0] for s in trial_streams(5))
        assert len({support, pattern, frame}) == 3

    def test_extra_streams_keep_the_first_three(self):
        three = [s.generate_state(2).tolist() for s in trial_streams(9)]
        four = [s.generate_state(2).tolist() for s in trial_streams(9, 4)]
        assert four[:3] == three


class TestTrialOutcome:
    def test_ratios(self):
        outcome = TrialOutcome(SupportSet((1, 2, 3, 4), 40), SupportSet((1, 2, 9), 40), 3, np.ones(3))
        assert outcome.hits == 2
        assert outcome.false_alarms == 1
        assert outcome.detection_ratio == 0.5
        assert outcome.false_alarm_ratio == pytest.approx(1 / 36)

    def test_no_users_counts_false_alarms_only(self):
        outcome = TrialOutcome(SupportSet((), 40), SupportSet((7,), 40), 1, np.ones(2))
        assert outcome.detection_ratio == 1.0
        assert outcome.false_alarm_ratio == pytest.approx(1 / 40)

    def test_full_occupancy_has_no_false_alarm_rate(self):
        full = SupportSet(tuple(range(1, 9)), 8)
        assert TrialOutcome(full, full, 8, np.ones(8)).false_alarm_ratio == 0.0


class TestSensingEngine:
    def test_sense_report(self):
        engine = SensingEngine()
        signal = engine.draw_scenario(4, seed=11)
        pattern = engine.draw_pattern(20, seed=11)
        report = engine.sense(signal, pattern, 1)
        assert report.bits == 1
        assert report.covariance.p == 20
        assert report.model.eigenvalues.shape == (20,)
        assert report.estimate.K == report.k_hat

    def test_near_oracle_regime(self):
        engine = SensingEngine(SpectrumConfig(snr_db=20.0))
        exact = sum(
            engine.run_trial(40, None, 4, (3, trial)).estimate == engine.draw_scenario(4, (3, trial)).truth
            for trial in range(100)
        )
        assert exact >= 99

    def test_one_bit_default_scenario(self):
        engine = SensingEngine(SpectrumConfig(snr_db=5.0))
        ratios = [engine.run_trial(20, 1, 4, (4, trial)).detection_ratio for trial in range(20)]
        assert np.mean(ratios) >= 0.9

    def test_noise_only_frame(self):
        outcome = SensingEngine().run_trial(20, 1, 0, 42)
        assert outcome.truth.K == 0
        assert outcome.detection_ratio == 1.0

    def test_time_domain_covariance_runs(self):
        engine = SensingEngine(covariance_domain="time")
        outcome = engine.run_trial(20, 1, 4, 8)
        assert 0 <= outcome.k_hat < 20

    def test_errors_carry_trial_index(self):
        with pytest.raises(TrialError, match="cell 2, trial 3"):
            SensingEngine().run_trial(41, 1, 4, 0, trial_index=3, cell_index=2)

    def test_linear_algebra_errors_become_trial_errors(self, monkeypatch):
        def singular(*args, **kwargs):
            raise np.linalg.LinAlgError("SVD did not converge")

        monkeypatch.setattr("core.sensing_engine.somp", singular)
        with pytest.raises(TrialError, match="trial 5"):
            SensingEngine().run_trial(20, 1, 4, 0, trial_index=5, cell_index=0)

    def test_completion_hook(self):
        seen = []
        engine = SensingEngine()
        engine.on_trial_complete = seen.append
        engine.with_snr(10.0).run_trial(20, 1, 2, 1)
        assert len(seen) == 1

    def test_functional_form_matches_engine(self):
        cfg = SpectrumConfig()
        a = run_trial(cfg, 16, 3.0, 4, 4, (1, 2))
        b = SensingEngine(SpectrumConfig(snr_db=3.0)).run_trial(16, 4, 4, (1, 2))
        assert a.estimate == b.estimate
        assert np.array_equal(a.eigenvalues, b.eigenvalues)

    def test_noiseless_unquantized_recovery(self):
        engine = SensingEngine(SpectrumConfig(snr_db=math.inf))
        for trial in range(10):
            outcome = engine.run_trial(20, None, 4, trial)
            assert outcome.k_hat == 4
            assert outcome.estimate == outcome.truth
