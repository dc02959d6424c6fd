import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sscm.antenna import AntennaPattern, Pointing, best_pointing, directional_cir, gain
from sscm.chan_gen import ChannelConfig, OmniChannel, Subpath, SpatialLobe, TimeCluster, generate_channel, substream
from sscm.errors import ConfigurationError, NoPointingError

HORN = AntennaPattern(10.0, 10.0, 0.7)


def test_boresight_gain():
    assert HORN.boresight_gain_linear == pytest.approx(288.771, abs=1e-9)
    assert gain(HORN, 0.0, 0.0) == pytest.approx(288.771, abs=1e-9)


@pytest.mark.parametrize("az, el", [(5.0, 0.0), (-5.0, 0.0), (0.0, 5.0), (0.0, -5.0)])
def test_half_power_at_half_beamwidth(az, el):
    assert gain(HORN, az, el) / HORN.boresight_gain_linear == pytest.approx(0.5, abs=1e-12)


def test_asymmetric_beamwidths():
    p = AntennaPattern(7.0, 30.0, 0.7)
    g0 = p.boresight_gain_linear
    assert gain(p, 3.5, 0.0) / g0 == pytest.approx(0.5, abs=1e-12)
    assert gain(p, 0.0, 15.0) / g0 == pytest.approx(0.5, abs=1e-12)


def test_floor():
    assert gain(HORN, 90.0, 0.0) == pytest.approx(2.88771, abs=1e-9)
    assert gain(HORN, 180.0, 45.0) == pytest.approx(HORN.floor_gain_linear)


@given(st.floats(-720, 720), st.floats(-90, 90))
def test_gain_bounds_and_periodicity(az, el):
    g = gain(HORN, az, el)
    assert HORN.floor_gain_linear - 1e-12 <= g <= HORN.boresight_gain_linear + 1e-12
    assert gain(HORN, az + 360.0, el) == pytest.approx(g, rel=1e-9)
    assert gain(HORN, -az, -el) == pytest.approx(g, rel=1e-9)


def test_vectorized_gain():
    g = gain(HORN, np.array([0.0, 5.0, 90.0]), np.zeros(3))
    assert g.shape == (3,)
    assert g[1] == pytest.approx(g[0] / 2)


def test_isotropic():
    iso = AntennaPattern.omni()
    assert gain(iso, 123.0, -40.0) == 1.0
    assert iso.floor_gain_linear == 0.0


def test_pattern_validation():
    with pytest.raises(ConfigurationError):
        AntennaPattern(0.0, 10.0)
    with pytest.raises(ConfigurationError):
        AntennaPattern(10.0, 10.0, efficiency=1.5)


def test_pointing_parse_and_validation():
    assert Pointing.parse("370,5") == Pointing(10.0, 5.0)
    with pytest.raises(ConfigurationError):
        Pointing.parse("abc")
    with pytest.raises(ConfigurationError):
        Pointing(0.0, 95.0)


def _one_path(power=1e-9, aod=(30.0, -5.0), aoa=(200.0, 4.0), delay=250.0):
    sp = Subpath(1, 1, 0.0, delay, power, 0.3, aod[0], aod[1], aoa[0], aoa[1], 1, 1)
    return OmniChannel("NLOS_28", 28e9, 30.0, 75.0, 250.0, 120.0, 0.0, power,
                       [TimeCluster(1, 0.0, power, [sp])],
                       [SpatialLobe("AOD", 1, *aod)], [SpatialLobe("AOA", 1, *aoa)], False, 1)


def test_boresight_single_subpath():
    ch = _one_path()
    pdp = directional_cir(ch, HORN, HORN, Pointing(30.0, -5.0), Pointing(200.0, 4.0))
    assert pdp.power_mw[0] == pytest.approx(1e-9 * 288.771 ** 2, rel=1e-12)
    assert pdp.taps == [(250.0, pytest.approx(1e-9 * 288.771 ** 2), 0.3)]


def test_both_sides_at_half_power():
    ch = _one_path()
    pdp = directional_cir(ch, HORN, HORN, Pointing(35.0, -5.0), Pointing(200.0, 9.0))
    assert pdp.power_mw[0] == pytest.approx(1e-9 * 288.771 ** 2 / 4, rel=1e-12)


def test_power_far_from_lobes_bounded():
    cfg = ChannelConfig(scenario="NLOS_28")
    for i in range(20):
        ch = generate_channel(cfg, substream(9, i))
        cols = ch.arrays()
        # pick the direction farthest from every AOA
        grid = np.arange(0.0, 360.0, 1.0)
        dist = np.abs(((grid[:, None] - cols["aoa_az_deg"][None, :]) + 180) % 360 - 180).min(axis=1)
        rx_az = float(grid[dist.argmax()])
        if dist.max() < 60:
            continue
        pdp = directional_cir(ch, AntennaPattern.omni(), HORN, Pointing(0, 0), Pointing(rx_az, 0.0))
        # every subpath is at least 60 deg off, so only the floor applies
        assert pdp.total_power_mw <= ch.total_power_mw * HORN.floor_gain_linear * (1 + 1e-9)


def test_unity_patterns_preserve_power():
    cfg = ChannelConfig(scenario="NLOS_28_73")
    iso = AntennaPattern.omni()
    for i in range(20):
        ch = generate_channel(cfg, substream(4, i))
        pdp = directional_cir(ch, iso, iso, Pointing(0, 0), Pointing(0, 0))
        assert math.fsum(pdp.power_mw) == pytest.approx(ch.total_power_mw, rel=1e-9)
        assert np.all(np.diff(pdp.delay_ns) >= 0)


def test_best_pointing():
    ch = _one_path()
    tx, rx = best_pointing(ch)
    assert (tx.az_deg, tx.el_deg, rx.az_deg, rx.el_deg) == (30.0, -5.0, 200.0, 4.0)


def test_best_pointing_targets_strongest():
    ch = generate_channel(ChannelConfig(scenario="NLOS_73", carrier_frequency_hz=73e9), substream(2, 3))
    strongest = max(ch.subpaths(), key=lambda s: s.power_mw)
    tx, rx = best_pointing(ch)
    assert tx.az_deg == pytest.approx(strongest.aod_az_deg) and rx.el_deg == strongest.aoa_el_deg
    pdp = directional_cir(ch, HORN, HORN, tx, rx)
    assert pdp.power_mw.max() >= strongest.power_mw * 288.771 ** 2 * (1 - 1e-12)


def test_best_pointing_outage():
    ch = generate_channel(ChannelConfig(scenario="NLOS_28", d_min_m=1e9, d_max_m=1e9), substream(0, 0))
    with pytest.raises(NoPointingError):
        best_pointing(ch)
