import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pipestab.disturbance import DisturbanceSpec, sample_b, verify_noise_bound


def sample_trace(spec, t_end, n):
    ts = np.linspace(0.0, t_end, n)
    vals = np.array([sample_b(spec, t) for t in ts])
    return ts, vals[:, 0], vals[:, 1], vals[:, 2]


class TestSampleB:
    def test_zero_family(self):
        spec = DisturbanceSpec(family="zero")
        for t in (0.0, 0.5, 3.0):
            assert sample_b(spec, t) == (0.0, 0.0, 0.0)

    def test_compatibility_at_start(self):
        spec = DisturbanceSpec(family="decaying_burst", amplitude=1.0,
                               frequency=1.0, gamma=1.0, T_period=1.0)
        assert sample_b(spec, 0.0) == (0.0, 0.0, 0.0)

    def test_hand_value_past_ramp(self):
        # past the ramp: b(t) = e^{-t} sin(2 pi t), so b(2) = 0 and
        # b'(2) = 2 pi e^{-2}
        spec = DisturbanceSpec(family="decaying_burst", amplitude=1.0,
                               frequency=1.0, gamma=1.0, T_period=1.0, seed=0)
        b, bt, _ = sample_b(spec, 2.0)
        assert b == pytest.approx(0.0, abs=1e-14)
        assert bt == pytest.approx(2.0 * math.pi * math.exp(-2.0), rel=1e-12)

    @pytest.mark.parametrize("family", ["decaying_burst", "compact_burst"])
    def test_derivatives_match_finite_differences(self, family):
        spec = DisturbanceSpec(family=family, amplitude=0.7, frequency=1.3,
                               gamma=0.8, T_period=1.0, seed=3, t_off=6.0)
        ts = np.linspace(0.05, 5.0, 37)
        for h_idx, h in enumerate((1e-3, 5e-4)):
            worst_b = worst_bt = 0.0
            for t in ts:
                bm, btm, bttm = sample_b(spec, t - h)
                b0, bt0, btt0 = sample_b(spec, t)
                bp, btp, bttp = sample_b(spec, t + h)
                worst_b = max(worst_b, abs((bp - bm) / (2 * h) - bt0))
                worst_bt = max(worst_bt, abs((btp - btm) / (2 * h) - btt0))
            if h_idx == 0:
                first = (worst_b, worst_bt)
        # O(h^2): halving h shrinks the error by about 4
        assert first[0] / worst_b == pytest.approx(4.0, rel=0.3)
        assert first[1] / worst_bt == pytest.approx(4.0, rel=0.3)

    def test_compact_burst_exactly_zero_after_cutoff(self):
        spec = DisturbanceSpec(family="compact_burst", amplitude=1.0,
                               frequency=2.0, gamma=0.5, T_period=1.0, t_off=4.0)
        for t in (4.0, 4.1, 7.0, 100.0):
            assert sample_b(spec, t) == (0.0, 0.0, 0.0)
        # and genuinely nonzero just before the cutoff ramp
        assert abs(sample_b(spec, 3.2)[0]) > 0

    def test_seed_moves_only_the_phase(self):
        s0 = DisturbanceSpec(family="decaying_burst", amplitude=1.0, seed=1,
                             frequency=1.0, gamma=0.5, T_period=1.0)
        s1 = DisturbanceSpec(family="decaying_burst", amplitude=1.0, seed=2,
                             frequency=1.0, gamma=0.5, T_period=1.0)
        assert s0.phase != s1.phase
        assert s0.phase == DisturbanceSpec(family="zero", seed=1).phase

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            sample_b(DisturbanceSpec(family="zero"), -0.1)


class TestVerifyNoiseBound:
    def test_zero_trace_passes(self):
        ts = np.linspace(0.0, 5.0, 501)
        rep = verify_noise_bound(ts, np.zeros_like(ts), np.zeros_like(ts),
                                 1.0, nu=3.0, C_nu=1e-6)
        assert rep["worst_ratio"] == 0.0
        assert rep["pass"]

    def test_too_short_trace_rejected(self):
        ts = np.linspace(0.0, 0.5, 51)
        with pytest.raises(ValueError):
            verify_noise_bound(ts, np.zeros_like(ts), np.zeros_like(ts), 1.0, 1.0, 1.0)

    def test_overclaimed_rate_fails(self):
        # the window integral decays like exp(-2 gamma t); claiming a
        # faster rate must fail once the horizon is long enough
        gamma = 0.1
        spec = DisturbanceSpec(family="decaying_burst", amplitude=1.0,
                               frequency=1.0, gamma=gamma, T_period=1.0)
        ts, b, bt, _ = sample_trace(spec, 60.0, 6001)
        rep_ok = verify_noise_bound(ts, b, bt, 1.0, nu=2 * gamma - 0.1, C_nu=1.0)
        c_min = rep_ok["minimal_C_nu"]
        assert verify_noise_bound(ts, b, bt, 1.0, nu=2 * gamma - 0.1, C_nu=c_min)["pass"]
        bad = verify_noise_bound(ts, b, bt, 1.0, nu=2 * gamma + 0.1, C_nu=10.0 * c_min)
        assert not bad["pass"]

    def test_minimal_c_nu_stable_under_refinement(self):
        spec = DisturbanceSpec(family="decaying_burst", amplitude=1.0,
                               frequency=1.0, gamma=1.0, T_period=1.0)
        ts1, b1, bt1, _ = sample_trace(spec, 10.0, 8001)
        ts2, b2, bt2, _ = sample_trace(spec, 10.0, 16001)
        nu = 2.0 - 0.1
        c1 = verify_noise_bound(ts1, b1, bt1, 1.0, nu, 1.0)["minimal_C_nu"]
        c2 = verify_noise_bound(ts2, b2, bt2, 1.0, nu, 1.0)["minimal_C_nu"]
        assert c1 == pytest.approx(c2, rel=1e-4)

    @given(st.floats(min_value=1e-8, max_value=1e3),
           st.floats(min_value=1.0, max_value=10.0))
    @settings(max_examples=50, deadline=None)
    def test_monotone_in_envelope_constant(self, c_nu, factor):
        spec = DisturbanceSpec(family="decaying_burst", amplitude=0.5,
                               frequency=1.0, gamma=1.0, T_period=1.0)
        ts, b, bt, _ = sample_trace(spec, 4.0, 401)
        small = verify_noise_bound(ts, b, bt, 1.0, nu=1.5, C_nu=c_nu)
        big = verify_noise_bound(ts, b, bt, 1.0, nu=1.5, C_nu=c_nu * factor)
        if small["pass"]:
            assert big["pass"]
