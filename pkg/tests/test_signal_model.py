import math

import numpy as np
import pytest

from core.errors import ParameterError
from core.signal_model import (
    SpectrumConfig,
    SupportSet,
    channel_powers,
    draw_support,
    synthesize_frame,
    synthesize_pu,
)


def band_energy(samples, channel, L):
    """Energy fraction of `samples` whose FFT bins fall in the channel band"""
    spectrum = np.abs(np.fft.fft(samples)) ** 2
    n = len(samples) // L
    return spectrum[(channel - 1) * n: channel * n].sum() / spectrum.sum()


class TestSpectrumConfig:
    def test_derived_quantities(self):
        cfg = SpectrumConfig()
        assert cfg.B * cfg.L == cfg.W
        assert cfg.T == 1 / cfg.W
        assert cfg.frame_samples == 40 * 200
        assert math.isclose(cfg.frame_duration, 25e-6)

    def test_rejects_single_channel(self):
        with pytest.raises(ParameterError):
            SpectrumConfig(L=1)

    def test_rejects_more_subcarriers_than_bins(self):
        with pytest.raises(ParameterError):
            SpectrumConfig(frame_len_N=100, subcarriers_C=101)

    def test_infinite_snr_is_noiseless(self):
        assert SpectrumConfig(snr_db=math.inf).noiseless
        assert not SpectrumConfig(snr_db=30.0).noiseless

    def test_zero_noise_needs_noiseless_mode(self):
        with pytest.raises(ParameterError, match="noise_var"):
            SpectrumConfig(noise_var=0.0, snr_db=5.0)
        assert SpectrumConfig(noise_var=0.0, snr_db=math.inf).noiseless


class TestDrawSupport:
    def test_empty_support(self):
        assert draw_support(40, 0, seed=3).K == 0

    def test_full_occupancy(self):
        assert draw_support(40, 40, seed=3).indices == tuple(range(1, 41))

    def test_deterministic(self):
        assert draw_support(40, 4, seed=11) == draw_support(40, 4, seed=11)

    def test_indices_in_range(self):
        for seed in range(20):
            support = draw_support(40, 4, seed)
            assert support.K == 4
            assert all(1 <= c <= 40 for c in support)

    def test_too_many_users(self):
        with pytest.raises(ParameterError):
            draw_support(40, 41, seed=0)

    def test_support_set_validation(self):
        with pytest.raises(ParameterError):
            SupportSet((0, 3), 8)
        with pytest.raises(ParameterError):
            SupportSet((2, 2), 8)
        assert str(SupportSet((5, 2), 8)) == "{2, 5}"


class TestSynthesizePU:
    def test_energy_stays_in_band(self):
        cfg = SpectrumConfig()
        for channel in (1, 17, 40):
            x = synthesize_pu(channel, 1.0, cfg, seed=channel)
            assert band_energy(x, channel, cfg.L) > 0.99

    def test_mean_power_matches_coefficient(self):
        cfg = SpectrumConfig()
        x = synthesize_pu(5, 2.5, cfg, seed=1)
        assert len(x) == cfg.frame_samples
        assert np.mean(np.abs(x) ** 2) == pytest.approx(2.5)

    def test_zero_power_gives_zeros(self):
        x = synthesize_pu(3, 0.0, SpectrumConfig(), seed=1)
        assert not np.any(x)

    def test_independent_seeds_uncorrelated(self):
        cfg = SpectrumConfig(L=4, frame_len_N=2000, subcarriers_C=2000)
        a = synthesize_pu(2, 1.0, cfg, seed=1)
        b = synthesize_pu(2, 1.0, cfg, seed=2)
        correlation = abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
        assert correlation < 0.1

    def test_channel_out_of_range(self):
        with pytest.raises(ParameterError):
            synthesize_pu(41, 1.0, SpectrumConfig(), seed=0)


class TestSynthesizeFrame:
    def test_noise_only_variance(self):
        cfg = SpectrumConfig()
        frame = synthesize_frame(cfg, SupportSet((), cfg.L), seed=5)
        assert len(frame) == cfg.frame_samples
        assert np.mean(np.abs(frame.samples) ** 2) == pytest.approx(cfg.noise_var, rel=0.05)

    def test_measured_snr(self):
        cfg = SpectrumConfig(snr_db=5.0)
        support = draw_support(cfg.L, 4, seed=8)
        frame = synthesize_frame(cfg, support, seed=9)

        powers = channel_powers(frame.samples, cfg.L)
        occupied = np.zeros(cfg.L, dtype=bool)
        occupied[[c - 1 for c in support]] = True
        noise_per_channel = powers[~occupied].mean()
        signal = powers[occupied].sum() - occupied.sum() * noise_per_channel
        snr = 10 * np.log10(signal / (noise_per_channel * cfg.L))
        assert 4.5 <= snr <= 5.5

    def test_occupied_bands_stand_out(self):
        cfg = SpectrumConfig(snr_db=5.0)
        support = draw_support(cfg.L, 4, seed=21)
        powers = channel_powers(synthesize_frame(cfg, support, seed=22).samples, cfg.L)
        top = set(int(c) + 1 for c in np.argsort(powers)[-4:])
        assert top == support.as_set()

    def test_deterministic(self):
        cfg = SpectrumConfig()
        support = SupportSet((3, 9), cfg.L)
        a = synthesize_frame(cfg, support, seed=123)
        b = synthesize_frame(cfg, support, seed=123)
        assert np.array_equal(a.samples, b.samples)

    def test_noiseless_keeps_raw_powers(self):
        cfg = SpectrumConfig(snr_db=math.inf, pu_powers=(1.0, 3.0))
        frame = synthesize_frame(cfg, SupportSet((4, 30), cfg.L), seed=2)
        assert frame.noise_var == 0.0
        assert np.mean(np.abs(frame.samples) ** 2) == pytest.approx(4.0)

    def test_support_for_other_band_plan(self):
        with pytest.raises(ParameterError):
            synthesize_frame(SpectrumConfig(), SupportSet((1,), 8), seed=0)


class TestChannelPowers:
    def test_parseval(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(800) + 1j * rng.standard_normal(800)
        assert channel_powers(x, 40).sum() == pytest.approx(np.mean(np.abs(x) ** 2))

    def test_length_must_split_into_channels(self):
        with pytest.raises(ParameterError):
            channel_powers(np.ones(10), 4)
