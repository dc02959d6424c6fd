import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sscm.errors import ConfigurationError
from sscm.params import PathLossParams, lookup_pathloss
from sscm.pathloss import (
    dbm_to_mw,
    draw_shadow,
    free_space_ref_pl,
    link_budget,
    mw_to_dbm,
    path_loss,
    received_power,
    wavelength,
)

# 20*log10(4*pi*f/c), evaluated with mpmath at 30 digits
FSPL_28 = 61.3849328129
FSPL_73 = 69.7082293885


def test_free_space_reference():
    assert free_space_ref_pl(28e9) == pytest.approx(FSPL_28, abs=1e-9)
    assert free_space_ref_pl(73e9) == pytest.approx(FSPL_73, abs=1e-9)
    assert round(free_space_ref_pl(28e9), 2) == 61.38
    assert round(free_space_ref_pl(73e9), 2) == 69.71
    # wavelength of 4*pi metres makes the log argument 1
    assert free_space_ref_pl(3e8 / (4 * math.pi)) == pytest.approx(0.0, abs=1e-12)


def test_path_loss_examples():
    nlos28 = PathLossParams(3.4, 9.7)
    assert path_loss(nlos28, 28e9, 100.0, 0.0) == pytest.approx(FSPL_28 + 68.0, abs=1e-9)
    assert path_loss(PathLossParams(2.0, 0.0), 73e9, 10.0, 0.0) == pytest.approx(FSPL_73 + 20.0, abs=1e-9)
    for n in (1.0, 2.0, 3.4):
        assert path_loss(PathLossParams(n, 0.0), 28e9, 1.0) == free_space_ref_pl(28e9)


def test_path_loss_adds_shadow():
    pl = PathLossParams(3.4, 9.7)
    assert path_loss(pl, 28e9, 50.0, 4.5) - path_loss(pl, 28e9, 50.0, 0.0) == pytest.approx(4.5)


def test_path_loss_rejects_short_distance():
    with pytest.raises(ConfigurationError):
        path_loss(PathLossParams(2.0, 0.0), 28e9, 0.5)


@given(st.floats(1.0, 1e4), st.floats(1.0, 6.0))
def test_doubling_distance(d, n):
    pl = PathLossParams(n, 0.0)
    step = path_loss(pl, 28e9, 2 * d) - path_loss(pl, 28e9, d)
    assert step == pytest.approx(10 * n * math.log10(2), abs=1e-9)


@given(st.floats(1.0, 1e4), st.floats(1e-3, 1e3), st.floats(-30, 30))
def test_monotone_in_distance(d, delta, shadow):
    pl = PathLossParams(2.0, 0.0)
    assert path_loss(pl, 73e9, d + delta, shadow) > path_loss(pl, 73e9, d, shadow)


def test_received_power():
    assert received_power(30.0, FSPL_28 + 68.0) == pytest.approx(-99.3849328129)
    assert received_power(17.0, 0.0) == 17.0
    assert received_power(0.0, 120.0) == -120.0
    assert dbm_to_mw(-120.0) == pytest.approx(1e-12, rel=1e-12)


@given(st.floats(-200, 60))
def test_dbm_mw_round_trip(dbm):
    assert mw_to_dbm(dbm_to_mw(dbm)) == pytest.approx(dbm, rel=1e-12, abs=1e-12)


def test_draw_shadow_zero_sigma(rng):
    assert all(draw_shadow(0.0, rng) == 0.0 for _ in range(100))


def test_draw_shadow_moments():
    rng = np.random.default_rng(7)
    draws = np.array([draw_shadow(9.7, rng) for _ in range(1_000_000)])
    assert 9.65 <= draws.std() <= 9.75
    assert abs(draws.mean()) < 0.05


def test_link_budget_invariants():
    budget = link_budget(lookup_pathloss(28, "NLOS"), 28e9, 100.0, 30.0, 2.0)
    assert budget.rx_power_dbm == budget.tx_power_dbm - budget.path_loss_db
    assert budget.wavelength_m == wavelength(28e9) == 3e8 / 28e9
    assert budget.rx_power_mw == pytest.approx(10 ** (budget.rx_power_dbm / 10))
