import math

import pytest
from hypothesis import given, settings, strategies as st

from uavpwe.errors import NonPositivePower, ZeroDistance
from uavpwe.geometry import Point2, angle_diff
from uavpwe.radio import (AntennaPattern, Device, PowerMode, PowerModel, Role, antenna_weight,
                          dbm_to_mw, launch_offsets, launch_rays, mw_to_dbm, path_gain)

LOBE40 = AntennaPattern(0.0, 40.0)


def tx(power=-30.0, az=0.0, lobe=40.0):
    return Device(Point2(2.5, 7.5), AntennaPattern(az, lobe), Role.TX, tx_power_dbm=power)


class TestAntennaWeight:
    def test_boresight_is_one(self):
        assert antenna_weight(LOBE40, 0.0) == 1.0

    @pytest.mark.parametrize("delta", [20.0, -20.0])
    def test_lobe_edge_is_zero(self, delta):
        assert antenna_weight(LOBE40, delta) == 0.0

    def test_closed_form(self):
        # cos(pi * 10 / 40) = cos(pi/4)
        assert antenna_weight(LOBE40, 10.0) == pytest.approx(0.7071067811865476, abs=1e-15)

    def test_outside_lobe(self):
        assert antenna_weight(LOBE40, 90.0) == 0.0

    def test_wraps_through_zero(self):
        assert antenna_weight(LOBE40, 350.0) == pytest.approx(antenna_weight(LOBE40, 10.0))

    @given(st.floats(0.1, 360.0), st.floats(0, 360), st.floats(-400, 400))
    def test_even_and_bounded(self, width, boresight, delta):
        pat = AntennaPattern(boresight, width)
        w = antenna_weight(pat, boresight + delta)
        assert 0.0 <= w <= 1.0
        assert w == pytest.approx(antenna_weight(pat, boresight - delta), abs=1e-12)

    @given(st.floats(0.1, 360.0), st.floats(0, 180), st.floats(0, 180))
    def test_non_increasing_in_offset(self, width, d1, d2):
        lo, hi = sorted((d1, d2))
        assert antenna_weight(AntennaPattern(0, width), lo) >= \
            antenna_weight(AntennaPattern(0, width), hi) - 1e-15

    @pytest.mark.parametrize("bad", [0.0, -5.0, 361.0])
    def test_bad_lobe(self, bad):
        with pytest.raises(ValueError):
            AntennaPattern(0.0, bad)


class TestLaunch:
    def test_single_ray_on_boresight(self):
        (ray,) = launch_rays(tx(), 1)
        assert ray.direction == 0.0
        assert ray.power == pytest.approx(0.001, rel=1e-15)

    def test_three_rays_cell_centred(self):
        assert launch_offsets(3, 40.0) == pytest.approx([-40 / 3, 0.0, 40 / 3])
        rays = launch_rays(tx(), 3)
        assert rays[0].power == pytest.approx(rays[2].power, rel=1e-15)
        assert rays[1].power > rays[0].power

    @pytest.mark.parametrize("n", [1, 2, 7, 1000, 100_000, 1_000_000])
    def test_power_conserved(self, n):
        rays = launch_rays(tx(), n)
        assert len(rays) == n
        assert math.fsum(r.power for r in rays) == pytest.approx(0.001, rel=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 5000), st.floats(-60, 20), st.floats(1, 360), st.floats(0, 360))
    def test_power_conserved_property(self, n, p, lobe, az):
        rays = launch_rays(tx(p, az, lobe), n)
        assert math.fsum(r.power for r in rays) == pytest.approx(dbm_to_mw(p), rel=1e-12)

    def test_directions_inside_lobe(self):
        for r in launch_rays(tx(az=350.0), 50):
            assert abs(angle_diff(r.direction, 350.0)) < 20.0

    def test_jitter_is_seeded(self):
        import random
        a = launch_rays(tx(), 20, jitter=0.5, rng=random.Random(3))
        b = launch_rays(tx(), 20, jitter=0.5, rng=random.Random(3))
        assert [r.direction for r in a] == [r.direction for r in b]
        assert [r.direction for r in a] != [r.direction for r in launch_rays(tx(), 20)]

    def test_needs_a_ray(self):
        with pytest.raises(ValueError):
            launch_rays(tx(), 0)


class TestPathGain:
    def test_bounce_only(self):
        model = PowerModel(PowerMode.BOUNCE_ONLY, bounce_loss=0.01)
        assert path_gain(model, 12.0, 3) == pytest.approx(0.970299, rel=1e-15)

    def test_no_bounces_is_unity(self):
        assert path_gain(PowerModel(), 5.0, 0) == 1.0

    def test_friis_one_metre(self):
        # 20 log10(4 pi / lambda) with lambda = c / 2.4 GHz = 0.124914 m
        g = path_gain(PowerModel(PowerMode.FRIIS), 1.0, 0)
        assert 10 * math.log10(g) == pytest.approx(-40.05, abs=0.005)

    def test_friis_zero_distance(self):
        with pytest.raises(ZeroDistance):
            path_gain(PowerModel(PowerMode.FRIIS), 0.0, 1)

    def test_negative_length(self):
        with pytest.raises(ValueError):
            path_gain(PowerModel(), -1.0, 0)

    @given(st.sampled_from(list(PowerMode)), st.floats(0.01, 500), st.floats(0.01, 500),
           st.integers(0, 20), st.integers(0, 20))
    def test_monotone(self, mode, d1, d2, b1, b2):
        model = PowerModel(mode)
        (dl, dh), (bl, bh) = sorted((d1, d2)), sorted((b1, b2))
        assert path_gain(model, dl, bl) >= path_gain(model, dh, bh)

    @pytest.mark.parametrize("loss", [-0.1, 1.0])
    def test_bad_loss(self, loss):
        with pytest.raises(ValueError):
            PowerModel(bounce_loss=loss)


class TestConversions:
    def test_reference_points(self):
        assert dbm_to_mw(0.0) == 1.0
        assert dbm_to_mw(-30.0) == pytest.approx(0.001, rel=1e-15)
        assert mw_to_dbm(1.0) == 0.0

    @given(st.floats(1e-30, 1e30))
    def test_round_trip(self, x):
        assert dbm_to_mw(mw_to_dbm(x)) == pytest.approx(x, rel=1e-12)

    @pytest.mark.parametrize("p", [0.0, -1.0])
    def test_non_positive(self, p):
        with pytest.raises(NonPositivePower):
            mw_to_dbm(p)


def test_device_validation():
    with pytest.raises(ValueError):
        Device(Point2(0, 0), LOBE40, Role.RX, capture_radius=0.0)
    with pytest.raises(ValueError):
        Device(Point2(0, 0), LOBE40, Role.TX, tx_power_dbm=math.inf)
