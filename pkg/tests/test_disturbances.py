"""Disturbance signal generators and profiles."""
import numpy as np
import pytest

from cablelift.disturbances import (DisturbanceProfile, SignalSpec, full_profile,
                                    payload_force_group_b,
                                    payload_moment_group_c, sinusoid,
                                    zero_profile, zero_signal)
from cablelift.errors import ConfigurationError
from cablelift.geometry import normalize

RNG = np.random.default_rng(31)


class TestSignalSpec:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigurationError):
            SignalSpec(kind="sawtooth")

    def test_negative_start_rejected(self):
        with pytest.raises(ConfigurationError):
            sinusoid(amplitude=1.0, freq=1.0, start=-1.0)

    def test_zero_signal(self):
        s = zero_signal()
        assert np.array_equal(s(0.0), np.zeros(3))
        assert np.array_equal(s(17.3), np.zeros(3))

    def test_sinusoid_basic(self):
        s = sinusoid(amplitude=(2.0, 0.0, 0.0), freq=(1.0, 0.0, 0.0))
        assert s(0.0)[0] == pytest.approx(0.0)
        assert s(np.pi / 2)[0] == pytest.approx(2.0)

    def test_sinusoid_start_gating(self):
        s = sinusoid(amplitude=1.0, freq=1.0, start=5.0)
        assert np.array_equal(s(4.999), np.zeros(3))
        assert s(5.0 + np.pi / 2)[0] == pytest.approx(1.0)

    def test_purity(self):
        s = payload_force_group_b()
        t = 12.345
        assert np.array_equal(s(t), s(t))


class TestGroupWaveforms:
    def test_group_b_value_at_zero(self):
        s = payload_force_group_b()
        assert np.allclose(s(0.0), [1.0, 5.0, 1.0], atol=1e-12)

    def test_group_b_closed_form(self):
        # [15 sin(sin(0.02 t) t) + cos(0.5 t),
        #  15 sin(cos(0.04 t + pi) t) + 5 cos(0.5 t),
        #  -25 sin(1.5 t) + cos(0.5 t)]
        s = payload_force_group_b()
        for t in np.linspace(0.0, 30.0, 200):
            ref = np.array([
                15.0 * np.sin(np.sin(0.02 * t) * t) + np.cos(0.5 * t),
                15.0 * np.sin(np.cos(0.04 * t + np.pi) * t) + 5.0 * np.cos(0.5 * t),
                -25.0 * np.sin(1.5 * t) + np.cos(0.5 * t),
            ])
            assert np.allclose(s(t), ref, atol=1e-12), t

    def test_group_b_bounded(self):
        s = payload_force_group_b()
        vals = np.array([s(t) for t in np.linspace(0, 60, 2000)])
        assert np.max(np.abs(vals[:, 0])) <= 16.0
        assert np.max(np.abs(vals[:, 1])) <= 20.0
        assert np.max(np.abs(vals[:, 2])) <= 26.0

    def test_group_c_onset_and_amplitude(self):
        s = payload_moment_group_c()
        assert np.array_equal(s(4.99), np.zeros(3))
        assert np.allclose(s(5.0), [0.0, 0.0, 0.0], atol=1e-12)
        assert np.allclose(s(5.0 + np.pi / 2), [10.0, 0.0, 0.0], atol=1e-12)
        for t in np.linspace(5.0, 30.0, 100):
            assert s(t)[0] == pytest.approx(10.0 * np.sin(t - 5.0), abs=1e-12)
            assert s(t)[1] == s(t)[2] == 0.0


class TestProfiles:
    def test_zero_profile_all_channels_zero(self):
        p = zero_profile(3)
        sample, phi_x, phi_R = p(3.7)
        assert np.array_equal(sample.d_x0, np.zeros(3))
        assert np.array_equal(sample.d_R0, np.zeros(3))
        assert np.array_equal(sample.d_xq, np.zeros((3, 3)))
        assert np.array_equal(sample.d_Rq, np.zeros((3, 3)))
        assert np.array_equal(phi_x, np.zeros(3))
        assert np.array_equal(phi_R, np.zeros(3))

    def test_full_profile_extra_terms_additive(self):
        base = full_profile(3)
        with_b = full_profile(3, extra_x0=payload_force_group_b())
        t = 7.7
        extra = with_b(t)[0].d_x0 - base(t)[0].d_x0
        assert np.allclose(extra, payload_force_group_b()(t), atol=1e-12)

    def test_full_profile_amplitudes(self):
        p = full_profile(3)
        for t in np.linspace(0, 30, 300):
            sample, _, _ = p(t)
            assert np.max(np.abs(sample.d_xq)) <= 1.0 + 1e-12
            assert np.max(np.abs(sample.d_Rq)) <= 0.1 + 1e-12

    def test_channel_count_enforced(self):
        with pytest.raises(ConfigurationError):
            DisturbanceProfile(n=3, d_xq=[zero_signal()] * 2)

    def test_quadrotor_channels_distinct(self):
        p = full_profile(3)
        sample, _, _ = p(1.0)
        assert not np.array_equal(sample.d_xq[0], sample.d_xq[1])

    def test_decomposition_against_projection(self):
        p = full_profile(3)
        sample, _, _ = p(2.5)
        q = np.stack([normalize(RNG.normal(size=3)) for _ in range(3)])
        par, perp = sample.decompose(q)
        assert np.max(np.abs(par + perp - sample.d_xq)) <= 1e-14
        for i in range(3):
            assert abs(np.dot(perp[i], q[i])) <= 1e-13
            assert np.allclose(par[i], np.dot(q[i], sample.d_xq[i]) * q[i])
