"""Directive antenna patterns and directional power delay profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from sscm.angles import wrap_180
from sscm.chan_gen import OmniChannel
from sscm.errors import ConfigurationError, NoPointingError

# Square degrees in a sphere, rounded; used for the HPBW to gain approximation.
SPHERE_SQ_DEG = 41253.0
FLOOR_RATIO = 100.0


@dataclass(frozen=True)
class AntennaPattern:
    """Gaussian main beam with a flat floor 20 dB below boresight.

    The isotropic variant has unit gain everywhere and no floor.
    """

    az_hpbw_deg: float = 10.0
    el_hpbw_deg: float = 10.0
    efficiency: float = 0.7
    isotropic: bool = False

    def __post_init__(self):
        if self.isotropic:
            return
        if self.az_hpbw_deg <= 0 or self.el_hpbw_deg <= 0:
            raise ConfigurationError("half-power beamwidths must be positive")
        if not 0 < self.efficiency <= 1:
            raise ConfigurationError("antenna efficiency must lie in (0, 1]")

    @classmethod
    def omni(cls) -> "AntennaPattern":
        return cls(isotropic=True)

    @property
    def boresight_gain_linear(self) -> float:
        if self.isotropic:
            return 1.0
        return SPHERE_SQ_DEG * self.efficiency / (self.az_hpbw_deg * self.el_hpbw_deg)

    @property
    def alpha(self) -> float:
        return 0.0 if self.isotropic else 4.0 * math.log(2.0) / self.az_hpbw_deg ** 2

    @property
    def beta(self) -> float:
        return 0.0 if self.isotropic else 4.0 * math.log(2.0) / self.el_hpbw_deg ** 2

    @property
    def floor_gain_linear(self) -> float:
        return 0.0 if self.isotropic else self.boresight_gain_linear / FLOOR_RATIO


def gain(pattern: AntennaPattern, az_offset_deg, el_offset_deg):
    """Linear power gain at an offset from boresight.

    Azimuth offsets are wrapped to (-180, 180]; elevation offsets are used as given.
    """
    theta = wrap_180(az_offset_deg)
    phi = np.asarray(el_offset_deg, dtype=float)
    g0 = pattern.boresight_gain_linear
    g = np.maximum(g0 * np.exp(-(pattern.alpha * theta ** 2 + pattern.beta * phi ** 2)),
                   pattern.floor_gain_linear)
    return float(g) if g.ndim == 0 else g


@dataclass(frozen=True)
class Pointing:
    az_deg: float
    el_deg: float

    def __post_init__(self):
        if not 0.0 <= self.az_deg < 360.0:
            raise ConfigurationError(f"pointing azimuth {self.az_deg} outside [0, 360)")
        if not -90.0 <= self.el_deg <= 90.0:
            raise ConfigurationError(f"pointing elevation {self.el_deg} outside [-90, 90]")

    @classmethod
    def parse(cls, text: str) -> "Pointing":
        """Parse ``"az,el"`` in degrees."""
        try:
            az, el = (float(v) for v in text.split(","))
        except ValueError:
            raise ConfigurationError(f"pointing must be 'az,el' in degrees, got {text!r}") from None
        return cls(az % 360.0, el)


@dataclass
class DirectionalPdp:
    delay_ns: np.ndarray
    power_mw: np.ndarray
    phase_rad: np.ndarray
    tx_pointing: Pointing
    rx_pointing: Pointing
    taps: list[tuple[float, float, float]] = field(init=False, repr=False)

    def __post_init__(self):
        self.taps = list(zip(self.delay_ns.tolist(), self.power_mw.tolist(), self.phase_rad.tolist()))

    @property
    def total_power_mw(self) -> float:
        return float(math.fsum(self.power_mw))


def directional_cir(channel: OmniChannel, tx_pattern: AntennaPattern, rx_pattern: AntennaPattern,
                    tx_pointing: Pointing, rx_pointing: Pointing) -> DirectionalPdp:
    """Weight every subpath by the TX and RX pattern gains toward its AOD and AOA."""
    cols = channel.arrays()
    g_tx = gain(tx_pattern, tx_pointing.az_deg - cols["aod_az_deg"], tx_pointing.el_deg - cols["aod_el_deg"])
    g_rx = gain(rx_pattern, rx_pointing.az_deg - cols["aoa_az_deg"], rx_pointing.el_deg - cols["aoa_el_deg"])
    power = cols["power_mw"] * g_tx * g_rx
    order = np.argsort(cols["abs_delay_ns"], kind="stable")
    return DirectionalPdp(cols["abs_delay_ns"][order], power[order], cols["phase_rad"][order],
                          tx_pointing, rx_pointing)


def best_pointing(channel: OmniChannel, pattern_tx: Optional[AntennaPattern] = None,
                  pattern_rx: Optional[AntennaPattern] = None) -> tuple[Pointing, Pointing]:
    """TX and RX pointings aligned with the strongest subpath's AOD and AOA."""
    if channel.outage or channel.n_subpaths == 0:
        raise NoPointingError("cannot point at a channel in outage")
    strongest = max(channel.subpaths(), key=lambda sp: sp.power_mw)
    return (Pointing(strongest.aod_az_deg % 360.0, strongest.aod_el_deg),
            Pointing(strongest.aoa_az_deg % 360.0, strongest.aoa_el_deg))
