"""Close-in (1 m free space reference) path loss and omnidirectional received power."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sscm.errors import ConfigurationError
from sscm.params import PathLossParams

SPEED_OF_LIGHT = 3e8  # m/s


def wavelength(carrier_frequency_hz: float) -> float:
    return SPEED_OF_LIGHT / carrier_frequency_hz


def free_space_ref_pl(carrier_frequency_hz: float, ref_distance_m: float = 1.0) -> float:
    """Free space path loss in dB at the reference distance."""
    if carrier_frequency_hz <= 0:
        raise ConfigurationError("carrier frequency must be positive")
    return 20.0 * math.log10(4.0 * math.pi * ref_distance_m / wavelength(carrier_frequency_hz))


def path_loss(pl_params: PathLossParams, frequency_hz: float, distance_m: float,
              shadow_db: float = 0.0) -> float:
    """CI model: ``PL(d0) + 10 n log10(d / d0) + shadow`` in dB."""
    d0 = pl_params.ref_distance_m
    if distance_m < d0:
        raise ConfigurationError(f"distance {distance_m} m is below the {d0} m reference distance")
    return (free_space_ref_pl(frequency_hz, d0)
            + 10.0 * pl_params.ple * math.log10(distance_m / d0)
            + shadow_db)


def draw_shadow(sigma_db: float, rng: np.random.Generator) -> float:
    """Zero-mean Gaussian shadow fading sample in dB."""
    if sigma_db < 0:
        raise ConfigurationError("shadow sigma must be >= 0")
    # Always consume one normal draw so the stream layout does not depend on sigma.
    return float(sigma_db * rng.standard_normal())


def received_power(tx_power_dbm: float, path_loss_db: float) -> float:
    return tx_power_dbm - path_loss_db


def dbm_to_mw(dbm):
    return 10.0 ** (np.asarray(dbm, dtype=float) / 10.0) if np.ndim(dbm) else 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw):
    return 10.0 * np.log10(mw) if np.ndim(mw) else 10.0 * math.log10(mw)


@dataclass(frozen=True)
class LinkBudget:
    tx_power_dbm: float
    distance_m: float
    path_loss_db: float
    shadow_db: float
    rx_power_dbm: float
    wavelength_m: float

    @property
    def rx_power_mw(self) -> float:
        return dbm_to_mw(self.rx_power_dbm)


def link_budget(pl_params: PathLossParams, frequency_hz: float, distance_m: float,
                tx_power_dbm: float, shadow_db: float) -> LinkBudget:
    pl = path_loss(pl_params, frequency_hz, distance_m, shadow_db)
    return LinkBudget(
        tx_power_dbm=tx_power_dbm,
        distance_m=distance_m,
        path_loss_db=pl,
        shadow_db=shadow_db,
        rx_power_dbm=received_power(tx_power_dbm, pl),
        wavelength_m=wavelength(frequency_hz),
    )
