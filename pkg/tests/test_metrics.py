import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicmetric.errors import DegenerateSignalError
from cubicmetric.metrics import (
    LTE_DOWNLINK,
    CmParams,
    cm_db_of,
    measure,
    papr_db_of,
    rcm_db_of,
    xi_batch,
    xi_of,
)
from cubicmetric.ofdm import FrequencyFrame, OfdmConfig, TimeSignal, draw_frame, synthesize, trial_rng

IMPULSE = FrequencyFrame(np.ones(1024, dtype=complex))


def tone(n, bin_):
    symbols = np.zeros(n, dtype=complex)
    symbols[bin_] = 1.0
    return FrequencyFrame(symbols)


def random_signal(n, oversample, seed):
    return synthesize(draw_frame(OfdmConfig(n, seed=seed), trial_rng(seed, 0)), oversample)


class TestXi:
    def test_impulse(self):
        xi = xi_of(synthesize(IMPULSE, 1.0), "frame")
        assert xi == pytest.approx(1024**2, rel=1e-12)
        assert math.sqrt(xi) == pytest.approx(1024, rel=1e-12)

    @pytest.mark.parametrize("oversample", [1.0, 1.7, 4.0])
    def test_single_tone_constant_modulus(self, oversample):
        assert xi_of(synthesize(tone(32, 5), oversample), "frame") == pytest.approx(1.0, abs=1e-12)

    def test_batch_matches_scalar(self):
        sigs = [random_signal(64, 2.0, s) for s in range(4)]
        batch = xi_batch(np.stack([s.samples for s in sigs]), "frame")
        np.testing.assert_allclose(batch, [xi_of(s) for s in sigs], rtol=1e-13)

    def test_degenerate(self):
        with pytest.raises(DegenerateSignalError):
            xi_of(TimeSignal(np.zeros(4, dtype=complex), 4), "frame")
        with pytest.raises(DegenerateSignalError):
            xi_batch(np.zeros((2, 4), dtype=complex), "frame")

    @pytest.mark.slow
    def test_ensemble_mean_near_six(self, fig1_xi):
        # 10^5 frames, N = 1024, L = 32
        assert 5.9 <= np.mean(fig1_xi[32.0]) <= 6.1


class TestDecibels:
    def test_rcm_db(self):
        assert rcm_db_of(6.0) == pytest.approx(7.781512503836436, abs=1e-12)
        assert rcm_db_of(1.0) == 0.0
        assert rcm_db_of(1048576.0) == pytest.approx(60.20599913279624, abs=1e-12)

    @pytest.mark.parametrize("xi", [0.0, -2.0])
    def test_rcm_db_rejects(self, xi):
        with pytest.raises(ValueError):
            rcm_db_of(xi)

    def test_rcm_db_equals_twenty_log_rms_of_cubes(self):
        sig = random_signal(64, 2.0, 11)
        r = np.abs(sig.samples) / math.sqrt(np.mean(np.abs(sig.samples) ** 2))
        direct = 20 * math.log10(math.sqrt(np.mean(r**6)))
        assert rcm_db_of(xi_of(sig)) == pytest.approx(direct, abs=1e-12)

    def test_cm_db(self):
        assert cm_db_of(1.52, LTE_DOWNLINK) == 0.0
        assert cm_db_of(7.78, CmParams(1.52, 1.56)) == pytest.approx(4.012820512820513, abs=1e-12)
        assert cm_db_of(3.3, CmParams(0.0, 1.0)) == 3.3

    def test_cm_params_validation(self):
        with pytest.raises(ValueError):
            CmParams(1.0, 0.0)


class TestPapr:
    def test_constant_modulus(self):
        assert papr_db_of(synthesize(tone(16, 3), 2.0)) == pytest.approx(0.0, abs=1e-12)

    def test_impulse(self):
        assert papr_db_of(synthesize(IMPULSE, 1.0), "frame") == pytest.approx(30.10299956639812, abs=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32), oversample=st.sampled_from([1.0, 1.5, 3.0]))
    def test_nonnegative_in_frame_mode(self, seed, oversample):
        assert papr_db_of(random_signal(32, oversample, seed), "frame") >= 0.0


class TestProperties:
    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32),
           scale=st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False,
                                    allow_infinity=False))
    def test_scale_invariance(self, seed, scale):
        sig = random_signal(64, 1.7, seed)
        scaled = TimeSignal(sig.samples * scale, sig.n_subcarriers)
        a, b = measure(sig), measure(scaled)
        assert b.xi == pytest.approx(a.xi, rel=1e-10)
        assert b.rcm == pytest.approx(a.rcm, rel=1e-10)
        assert cm_db_of(b.rcm_db) == pytest.approx(cm_db_of(a.rcm_db), abs=1e-10)
        assert b.papr_db == pytest.approx(a.papr_db, abs=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32), mode=st.sampled_from(["frame", "ensemble"]))
    def test_xi_bounded_by_peak_cubed(self, seed, mode):
        sig = random_signal(32, 2.0, seed)
        m = measure(sig, mode)
        peak = 10 ** (m.papr_db / 10)
        assert m.xi <= peak**3 * (1 + 1e-12)

    def test_sample_invariants(self):
        m = measure(random_signal(128, 1.7, 5))
        assert m.rcm == pytest.approx(math.sqrt(m.xi), rel=1e-12)
        assert m.rcm_db == pytest.approx(20 * math.log10(m.rcm), abs=1e-12)
        assert m.effective_oversample == round(1.7 * 128) / 128

    def test_nested_grid_consistency(self):
        frame = draw_frame(OfdmConfig(64, seed=8), trial_rng(8, 0))
        fine = synthesize(frame, 4.0)
        coarse = synthesize(frame, 2.0)
        sub = TimeSignal(fine.samples[::2], 64)
        assert xi_of(sub, "ensemble") == pytest.approx(xi_of(coarse, "ensemble"), rel=1e-12)
