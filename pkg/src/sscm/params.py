"""Scenario parameter tables and path loss constants.

Every numeric model constant lives here so the generator stays table driven.
Presets are immutable; use :meth:`ScenarioParams.with_overrides` or
:func:`load_params` to change individual fields.
"""

from __future__ import annotations

import dataclasses
import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from sscm.errors import ConfigurationError

MIN_CARRIER_HZ = 6e9
MAX_CARRIER_HZ = 100e9


class Environment(str, enum.Enum):
    LOS = "LOS"
    NLOS = "NLOS"


class ScenarioKey(str, enum.Enum):
    LOS_28_73 = "LOS_28_73"
    NLOS_28 = "NLOS_28"
    NLOS_73 = "NLOS_73"
    NLOS_28_73 = "NLOS_28_73"

    @property
    def environment(self) -> Environment:
        return Environment.LOS if self is ScenarioKey.LOS_28_73 else Environment.NLOS

    @classmethod
    def parse(cls, value: "str | ScenarioKey") -> "ScenarioKey":
        """Accept ``NLOS_28_73``, ``nlos-28-73`` and similar spellings."""
        if isinstance(value, cls):
            return value
        norm = str(value).strip().upper().replace("-", "_")
        try:
            return cls(norm)
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ConfigurationError(f"unknown scenario {value!r}; expected one of {valid}") from None


class Band(enum.IntEnum):
    """Tabulated measurement bands, in GHz."""

    GHZ_28 = 28
    GHZ_73 = 73


@dataclass(frozen=True)
class FrequencyScenario:
    carrier_frequency_hz: float
    environment: Environment
    scenario_key: ScenarioKey

    def __post_init__(self):
        if not MIN_CARRIER_HZ <= self.carrier_frequency_hz <= MAX_CARRIER_HZ:
            raise ConfigurationError(
                f"carrier frequency {self.carrier_frequency_hz:g} Hz outside "
                f"[{MIN_CARRIER_HZ:g}, {MAX_CARRIER_HZ:g}]"
            )
        if Environment(self.environment) is not ScenarioKey(self.scenario_key).environment:
            raise ConfigurationError(
                f"scenario {self.scenario_key.value} is inconsistent with environment {self.environment.value}"
            )


@dataclass(frozen=True)
class PathLossParams:
    ple: float
    shadow_sigma_db: float
    ref_distance_m: float = 1.0

    def __post_init__(self):
        if self.ple < 1.0:
            raise ConfigurationError(f"path loss exponent must be >= 1, got {self.ple}")
        if self.shadow_sigma_db < 0:
            raise ConfigurationError(f"shadow sigma must be >= 0, got {self.shadow_sigma_db}")
        if self.ref_distance_m != 1.0:
            raise ConfigurationError("close-in reference distance is fixed at 1 m")


# (band, environment) -> (PLE, shadow sigma dB)
PATHLOSS_TABLE: dict[tuple[Band, Environment], tuple[float, float]] = {
    (Band.GHZ_28, Environment.LOS): (2.1, 3.6),
    (Band.GHZ_28, Environment.NLOS): (3.4, 9.7),
    (Band.GHZ_73, Environment.LOS): (2.0, 5.2),
    (Band.GHZ_73, Environment.NLOS): (3.3, 7.6),
}

# PLE used when simulating LOS links (free space), independent of band.
LOS_SIMULATION_PLE = 2.0


def lookup_pathloss(frequency: "Band | int | float", environment: "Environment | str") -> PathLossParams:
    """Measured (PLE, shadow sigma) pair for a tabulated band and environment.

    ``frequency`` may be a :class:`Band`, the band in GHz (28, 73) or the
    band in Hz (28e9, 73e9).
    """
    try:
        f = float(frequency)
        band = Band(int(round(f / 1e9)) if f > 1e3 else int(round(f)))
        env = Environment(environment)
    except (ValueError, TypeError):
        raise ConfigurationError(
            f"no path loss entry for frequency={frequency!r}, environment={environment!r}"
        ) from None
    ple, sigma = PATHLOSS_TABLE[(band, env)]
    return PathLossParams(ple=ple, shadow_sigma_db=sigma)


def nearest_band(carrier_frequency_hz: float) -> Band:
    return min(Band, key=lambda b: abs(b * 1e9 - carrier_frequency_hz))


@dataclass(frozen=True)
class ScenarioParams:
    """One column of the frequency-scenario parameter table plus fixed model bounds."""

    mu_aod: float
    mu_aoa: float
    x_max: float
    mu_tau_ns: float
    gamma_cluster_ns: float
    sigma_z_db: float
    gamma_subpath_ns: float
    sigma_u_db: float
    lobe_elev_aod_mean_deg: float
    lobe_elev_aod_sigma_deg: float
    lobe_elev_aoa_mean_deg: float
    lobe_elev_aoa_sigma_deg: float
    offset_az_aod_deg: float
    offset_el_aod_deg: float
    offset_az_aoa_deg: float
    offset_el_aoa_deg: float
    n_max_clusters: int = 6
    m_max_subpaths: int = 30
    l_max_lobes: int = 5
    min_void_ns: float = 25.0
    baseband_bw_hz: float = 400e6
    max_path_loss_db: float = 180.0
    # Average first-cluster / first-subpath powers; cancel out under normalization.
    p0_avg: float = 1.0
    pi0_avg: float = 1.0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        positive = ("mu_aod", "mu_aoa", "mu_tau_ns", "gamma_cluster_ns", "gamma_subpath_ns",
                    "baseband_bw_hz", "p0_avg", "pi0_avg")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}")
        nonneg = ("sigma_z_db", "sigma_u_db", "lobe_elev_aod_sigma_deg", "lobe_elev_aoa_sigma_deg",
                  "offset_az_aod_deg", "offset_el_aod_deg", "offset_az_aoa_deg", "offset_el_aoa_deg",
                  "min_void_ns")
        for name in nonneg:
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not 0.0 <= self.x_max <= 1.0:
            raise ConfigurationError(f"x_max must lie in [0, 1], got {self.x_max}")
        if self.baseband_bw_hz > 400e6:
            raise ConfigurationError("baseband bandwidth is limited to 400 MHz")
        for name in ("n_max_clusters", "m_max_subpaths", "l_max_lobes"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")

    def with_overrides(self, **overrides: Any) -> "ScenarioParams":
        unknown = set(overrides) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise ConfigurationError(f"unknown scenario parameter(s): {sorted(unknown)}")
        return dataclasses.replace(self, **overrides)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


_PRESETS: dict[ScenarioKey, ScenarioParams] = {
    ScenarioKey.LOS_28_73: ScenarioParams(
        mu_aod=1.9, mu_aoa=1.8, x_max=0.2, mu_tau_ns=123.0,
        gamma_cluster_ns=25.9, sigma_z_db=1.0, gamma_subpath_ns=16.9, sigma_u_db=6.0,
        lobe_elev_aod_mean_deg=-12.6, lobe_elev_aod_sigma_deg=5.9,
        lobe_elev_aoa_mean_deg=10.8, lobe_elev_aoa_sigma_deg=5.3,
        offset_az_aod_deg=8.5, offset_el_aod_deg=2.5,
        offset_az_aoa_deg=10.5, offset_el_aoa_deg=11.5,
    ),
    ScenarioKey.NLOS_28: ScenarioParams(
        mu_aod=1.6, mu_aoa=1.6, x_max=0.5, mu_tau_ns=83.0,
        gamma_cluster_ns=49.4, sigma_z_db=3.0, gamma_subpath_ns=16.9, sigma_u_db=6.0,
        lobe_elev_aod_mean_deg=-4.9, lobe_elev_aod_sigma_deg=4.5,
        lobe_elev_aoa_mean_deg=3.6, lobe_elev_aoa_sigma_deg=4.8,
        offset_az_aod_deg=9.0, offset_el_aod_deg=2.5,
        offset_az_aoa_deg=10.1, offset_el_aoa_deg=10.5,
    ),
    ScenarioKey.NLOS_73: ScenarioParams(
        mu_aod=1.5, mu_aoa=2.5, x_max=0.5, mu_tau_ns=83.0,
        gamma_cluster_ns=56.0, sigma_z_db=3.0, gamma_subpath_ns=15.3, sigma_u_db=6.0,
        lobe_elev_aod_mean_deg=-4.9, lobe_elev_aod_sigma_deg=4.5,
        lobe_elev_aoa_mean_deg=3.6, lobe_elev_aoa_sigma_deg=4.8,
        offset_az_aod_deg=7.0, offset_el_aod_deg=3.5,
        offset_az_aoa_deg=6.0, offset_el_aoa_deg=3.5,
    ),
    ScenarioKey.NLOS_28_73: ScenarioParams(
        mu_aod=1.5, mu_aoa=2.1, x_max=0.5, mu_tau_ns=83.0,
        gamma_cluster_ns=51.0, sigma_z_db=3.0, gamma_subpath_ns=15.5, sigma_u_db=6.0,
        lobe_elev_aod_mean_deg=-4.9, lobe_elev_aod_sigma_deg=4.5,
        lobe_elev_aoa_mean_deg=3.6, lobe_elev_aoa_sigma_deg=4.8,
        offset_az_aod_deg=11.0, offset_el_aod_deg=3.0,
        offset_az_aoa_deg=7.5, offset_el_aoa_deg=6.0,
    ),
}


def lookup_scenario(scenario_key: "ScenarioKey | str", **overrides: Any) -> ScenarioParams:
    """Preset parameters for ``scenario_key``, with optional field-wise overrides."""
    params = _PRESETS[ScenarioKey.parse(scenario_key)]
    return params.with_overrides(**overrides) if overrides else params


def params_from_mapping(data: Mapping[str, Any], scenario_key: "ScenarioKey | str") -> ScenarioParams:
    """Build parameters from a (possibly partial) mapping; missing fields come from the preset."""
    return lookup_scenario(scenario_key).with_overrides(**dict(data))


def dump_params(params: ScenarioParams, path: "str | Path") -> None:
    Path(path).write_text(json.dumps(params.to_dict(), indent=2) + "\n")


def load_params(path: "str | Path", scenario_key: "ScenarioKey | str") -> ScenarioParams:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: expected a JSON object of parameter fields")
    return params_from_mapping(data, scenario_key)
