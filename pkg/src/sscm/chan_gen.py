"""Random structure of one omnidirectional channel realization.

A realization is built in a fixed order so that a given seed always produces
the same channel:

    distance, shadow fading, (N, L_AOD, L_AOA), subpath counts M_n,
    per-cluster X and intra-cluster delays, cluster delays, cluster powers (Z),
    subpath powers (U, cluster by cluster), phases, AOD lobes, AOA lobes,
    AOD lobe indices, AOA lobe indices, angle offsets
    (AOD azimuth, AOD elevation, AOA azimuth, AOA elevation).

Delays are in ns, powers in mW, angles in degrees unless a name says otherwise.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional, Sequence

import numpy as np

from sscm.angles import wrap_360
from sscm.errors import ConfigurationError
from sscm.params import (
    LOS_SIMULATION_PLE,
    Environment,
    FrequencyScenario,
    PathLossParams,
    ScenarioKey,
    ScenarioParams,
    lookup_pathloss,
    lookup_scenario,
    nearest_band,
)
from sscm.pathloss import SPEED_OF_LIGHT, dbm_to_mw, draw_shadow, link_budget

SCHEMA_VERSION = 1

DEFAULT_DISTANCE_RANGE_M = {
    Environment.LOS: (30.0, 60.0),
    Environment.NLOS: (60.0, 200.0),
}


@dataclass(slots=True)
class Subpath:
    cluster: int
    index: int
    intra_delay_ns: float
    abs_delay_ns: float
    power_mw: float
    phase_rad: float
    aod_az_deg: float
    aod_el_deg: float
    aoa_az_deg: float
    aoa_el_deg: float
    aod_lobe: int
    aoa_lobe: int

    @property
    def amplitude(self) -> float:
        return math.sqrt(self.power_mw)


@dataclass
class TimeCluster:
    index: int
    excess_delay_ns: float
    power_mw: float
    subpaths: list[Subpath] = field(default_factory=list)


@dataclass
class SpatialLobe:
    kind: str  # "AOD" or "AOA"
    index: int
    mean_az_deg: float
    mean_el_deg: float


@dataclass
class OmniChannel:
    """One omnidirectional double-directional impulse response.

    ``clusters`` hold only subpaths that survived the dynamic-range cut, and
    clusters left with no subpath are dropped. ``power_mw`` of a cluster is
    its pre-threshold value.
    """

    scenario: str
    carrier_frequency_hz: float
    tx_power_dbm: float
    distance_m: float
    t0_ns: float
    path_loss_db: float
    shadow_db: float
    rx_power_mw: float
    clusters: list[TimeCluster]
    aod_lobes: list[SpatialLobe]
    aoa_lobes: list[SpatialLobe]
    outage: bool = False
    n_subpaths_generated: int = 0

    @property
    def rx_power_dbm(self) -> float:
        return self.tx_power_dbm - self.path_loss_db

    def subpaths(self) -> Iterator[Subpath]:
        for cluster in self.clusters:
            yield from cluster.subpaths

    @property
    def n_subpaths(self) -> int:
        return sum(len(c.subpaths) for c in self.clusters)

    @property
    def total_power_mw(self) -> float:
        return math.fsum(sp.power_mw for sp in self.subpaths())

    def arrays(self) -> dict[str, np.ndarray]:
        """Column view of all retained subpaths."""
        sps = list(self.subpaths())
        names = ("abs_delay_ns", "power_mw", "phase_rad", "aod_az_deg", "aod_el_deg",
                 "aoa_az_deg", "aoa_el_deg")
        return {name: np.array([getattr(sp, name) for sp in sps], dtype=float) for name in names}

    def to_dict(self) -> dict[str, Any]:
        data = dataclasses.asdict(self)
        data["schema_version"] = SCHEMA_VERSION
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "OmniChannel":
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ConfigurationError(f"unsupported channel schema version {version!r}")
        kwargs = {k: v for k, v in data.items() if k != "schema_version"}
        kwargs["clusters"] = [
            TimeCluster(**{**c, "subpaths": [Subpath(**sp) for sp in c["subpaths"]]})
            for c in data["clusters"]
        ]
        kwargs["aod_lobes"] = [SpatialLobe(**lobe) for lobe in data["aod_lobes"]]
        kwargs["aoa_lobes"] = [SpatialLobe(**lobe) for lobe in data["aoa_lobes"]]
        return cls(**kwargs)


def substream(master_seed: int, index: int) -> np.random.Generator:
    """Independent generator for realization ``index`` of an ensemble."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


# -- individual steps --------------------------------------------------------

def draw_distance(environment: "Environment | str", rng: np.random.Generator,
                  d_min: Optional[float] = None, d_max: Optional[float] = None) -> float:
    lo, hi = DEFAULT_DISTANCE_RANGE_M[Environment(environment)]
    lo = lo if d_min is None else d_min
    hi = hi if d_max is None else d_max
    if not 0 < lo <= hi:
        raise ConfigurationError(f"invalid distance range [{lo}, {hi}]")
    return float(rng.uniform(lo, hi))


def draw_lobe_counts(mu: float, l_max: int, rng: np.random.Generator, size=None):
    """Poisson lobe count clamped to [1, l_max]."""
    return np.clip(rng.poisson(mu, size), 1, l_max)


def draw_counts(params: ScenarioParams, rng: np.random.Generator) -> tuple[int, int, int]:
    """Number of time clusters and of AOD / AOA spatial lobes."""
    n_clusters = int(rng.integers(1, params.n_max_clusters, endpoint=True))
    l_aod = int(draw_lobe_counts(params.mu_aod, params.l_max_lobes, rng))
    l_aoa = int(draw_lobe_counts(params.mu_aoa, params.l_max_lobes, rng))
    return n_clusters, l_aod, l_aoa


def draw_subpath_counts(n_clusters: int, rng: np.random.Generator, m_max: int = 30) -> list[int]:
    return [int(m) for m in rng.integers(1, m_max, size=n_clusters, endpoint=True)]


def intra_delays(n_subpaths: int, baseband_bw_hz: float, x: float) -> np.ndarray:
    """Deterministic part of the intra-cluster delay law for a given exponent ``x``.

    The power law acts on the numeric delay in ns, so at 400 MHz and x = 0
    consecutive subpaths sit 2.5 ns apart.
    """
    resolution_ns = 1e9 / baseband_bw_hz
    return (resolution_ns * np.arange(n_subpaths, dtype=float)) ** (1.0 + x)


def gen_intra_delays(n_subpaths: int, baseband_bw_hz: float, x_max: float,
                     rng: np.random.Generator) -> np.ndarray:
    """Intra-cluster subpath excess delays; one stretching exponent per cluster."""
    if n_subpaths < 1 or baseband_bw_hz <= 0 or x_max < 0:
        raise ConfigurationError("need n_subpaths >= 1, baseband_bw_hz > 0, x_max >= 0")
    x = rng.uniform(0.0, x_max)
    return intra_delays(n_subpaths, baseband_bw_hz, x)


def draw_cluster_offsets(n_clusters: int, mu_tau_ns: float, rng: np.random.Generator) -> np.ndarray:
    """Sorted exponential delays (mean ``mu_tau_ns``) measured from the smallest one."""
    raw = rng.exponential(mu_tau_ns, size=n_clusters)
    return np.sort(raw) - raw.min()


def cluster_delays_from_offsets(delta_tau_ns: Sequence[float], last_intra_delays: Sequence[float],
                                min_void_ns: float = 25.0) -> np.ndarray:
    tau = np.zeros(len(delta_tau_ns))
    for n in range(1, len(tau)):
        tau[n] = tau[n - 1] + last_intra_delays[n - 1] + delta_tau_ns[n] + min_void_ns
    return tau


def gen_cluster_delays(n_clusters: int, mu_tau_ns: float, last_intra_delays: Sequence[float],
                       rng: np.random.Generator, min_void_ns: float = 25.0) -> np.ndarray:
    """Cluster excess delays with a guaranteed void after each cluster's last subpath."""
    if len(last_intra_delays) != n_clusters:
        raise ConfigurationError("need one last intra-cluster delay per cluster")
    delta = draw_cluster_offsets(n_clusters, mu_tau_ns, rng)
    return cluster_delays_from_offsets(delta, last_intra_delays, min_void_ns)


def _normalized_powers(delays: np.ndarray, decay: float, shadow_db: np.ndarray,
                       total_mw: float, mean_first: float) -> np.ndarray:
    raw = mean_first * np.exp(-delays / decay) * 10.0 ** (shadow_db / 10.0)
    return raw / raw.sum() * total_mw


def gen_cluster_powers(tau_ns: Sequence[float], gamma_ns: float, sigma_z_db: float,
                       rx_power_mw: float, rng: np.random.Generator,
                       p0_avg: float = 1.0) -> np.ndarray:
    """Time cluster powers, normalized to sum to the omnidirectional received power."""
    if gamma_ns <= 0 or rx_power_mw <= 0:
        raise ConfigurationError("cluster decay constant and received power must be positive")
    tau = np.asarray(tau_ns, dtype=float)
    z = sigma_z_db * rng.standard_normal(tau.size)
    return _normalized_powers(tau, gamma_ns, z, rx_power_mw, p0_avg)


def gen_subpath_powers(rho_ns: Sequence[float], gamma_ns: float, sigma_u_db: float,
                       cluster_power_mw: float, rng: np.random.Generator,
                       pi0_avg: float = 1.0) -> np.ndarray:
    if gamma_ns <= 0:
        raise ConfigurationError("subpath decay constant must be positive")
    rho = np.asarray(rho_ns, dtype=float)
    u = sigma_u_db * rng.standard_normal(rho.size)
    return _normalized_powers(rho, gamma_ns, u, cluster_power_mw, pi0_avg)


def gen_phases(count: int, rng: np.random.Generator) -> np.ndarray:
    # random() is on [0, 1), so phases stay strictly below 2*pi
    return 2.0 * np.pi * rng.random(count)


def gen_lobe_angles(n_lobes: int, elev_mean_deg: float, elev_sigma_deg: float,
                    rng: np.random.Generator, kind: str = "AOA") -> list[SpatialLobe]:
    """Lobe mean directions; azimuths fall in disjoint equal sectors of the circle."""
    if not 1 <= n_lobes:
        raise ConfigurationError("need at least one lobe")
    i = np.arange(n_lobes)
    az = rng.uniform(360.0 * i / n_lobes, 360.0 * (i + 1) / n_lobes)
    el = np.clip(rng.normal(elev_mean_deg, elev_sigma_deg, n_lobes), -90.0, 90.0)
    return [SpatialLobe(kind, k + 1, float(a), float(e)) for k, (a, e) in enumerate(zip(az, el))]


@dataclass(frozen=True)
class OffsetSigmas:
    aod_az_deg: float
    aod_el_deg: float
    aoa_az_deg: float
    aoa_el_deg: float

    @classmethod
    def from_params(cls, params: ScenarioParams) -> "OffsetSigmas":
        return cls(params.offset_az_aod_deg, params.offset_el_aod_deg,
                   params.offset_az_aoa_deg, params.offset_el_aoa_deg)


def draw_subpath_angles(count: int, aod_lobes: Sequence[SpatialLobe], aoa_lobes: Sequence[SpatialLobe],
                        sigmas: OffsetSigmas, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Lobe membership and AOD/AOA angles for ``count`` subpaths, as arrays."""
    i = rng.integers(0, len(aod_lobes), size=count)
    j = rng.integers(0, len(aoa_lobes), size=count)
    aod_az0 = np.array([lobe.mean_az_deg for lobe in aod_lobes])[i]
    aod_el0 = np.array([lobe.mean_el_deg for lobe in aod_lobes])[i]
    aoa_az0 = np.array([lobe.mean_az_deg for lobe in aoa_lobes])[j]
    aoa_el0 = np.array([lobe.mean_el_deg for lobe in aoa_lobes])[j]
    d_aod_az = rng.normal(0.0, sigmas.aod_az_deg, count)
    d_aod_el = rng.normal(0.0, sigmas.aod_el_deg, count)
    d_aoa_az = rng.normal(0.0, sigmas.aoa_az_deg, count)
    # Laplace scale b gives standard deviation b*sqrt(2)
    d_aoa_el = rng.laplace(0.0, sigmas.aoa_el_deg / math.sqrt(2.0), count)
    return {
        "aod_lobe": i + 1,
        "aoa_lobe": j + 1,
        "aod_az_deg": wrap_360(aod_az0 + d_aod_az),
        "aod_el_deg": np.clip(aod_el0 + d_aod_el, -90.0, 90.0),
        "aoa_az_deg": wrap_360(aoa_az0 + d_aoa_az),
        "aoa_el_deg": np.clip(aoa_el0 + d_aoa_el, -90.0, 90.0),
    }


def assign_subpath_angles(subpaths: Sequence[Subpath], aod_lobes: Sequence[SpatialLobe],
                          aoa_lobes: Sequence[SpatialLobe], sigmas: OffsetSigmas,
                          rng: np.random.Generator) -> list[Subpath]:
    """Copies of ``subpaths`` with lobe indices and angles drawn around the lobe means."""
    ang = draw_subpath_angles(len(subpaths), aod_lobes, aoa_lobes, sigmas, rng)
    out = []
    for k, sp in enumerate(subpaths):
        out.append(dataclasses.replace(
            sp,
            aod_lobe=int(ang["aod_lobe"][k]), aoa_lobe=int(ang["aoa_lobe"][k]),
            aod_az_deg=float(ang["aod_az_deg"][k]), aod_el_deg=float(ang["aod_el_deg"][k]),
            aoa_az_deg=float(ang["aoa_az_deg"][k]), aoa_el_deg=float(ang["aoa_el_deg"][k]),
        ))
    return out


# -- full realization --------------------------------------------------------

@dataclass(frozen=True)
class ChannelConfig:
    """Everything needed to draw realizations for one frequency scenario.

    ``pathloss`` defaults to the measured table entry for the band closest to
    the carrier, except that LOS links use a free space exponent of 2.
    """

    scenario: ScenarioKey = ScenarioKey.NLOS_28_73
    carrier_frequency_hz: float = 28e9
    tx_power_dbm: float = 30.0
    d_min_m: Optional[float] = None
    d_max_m: Optional[float] = None
    params: Optional[ScenarioParams] = None
    pathloss: Optional[PathLossParams] = None
    apply_threshold: bool = True

    def __post_init__(self):
        key = ScenarioKey.parse(self.scenario)
        object.__setattr__(self, "scenario", key)
        FrequencyScenario(self.carrier_frequency_hz, key.environment, key)
        if self.params is None:
            object.__setattr__(self, "params", lookup_scenario(key))
        if self.pathloss is None:
            table = lookup_pathloss(nearest_band(self.carrier_frequency_hz), key.environment)
            if key.environment is Environment.LOS:
                table = dataclasses.replace(table, ple=LOS_SIMULATION_PLE)
            object.__setattr__(self, "pathloss", table)
        lo, hi = DEFAULT_DISTANCE_RANGE_M[key.environment]
        lo = lo if self.d_min_m is None else self.d_min_m
        hi = hi if self.d_max_m is None else self.d_max_m
        if not 1.0 <= lo <= hi:
            raise ConfigurationError(f"invalid distance range [{lo}, {hi}] m (minimum 1 m)")

    @property
    def environment(self) -> Environment:
        return self.scenario.environment


def generate_channel(config: ChannelConfig, rng: np.random.Generator) -> OmniChannel:
    """Draw one omnidirectional channel realization."""
    p = config.params

    distance = draw_distance(config.environment, rng, config.d_min_m, config.d_max_m)
    shadow = draw_shadow(config.pathloss.shadow_sigma_db, rng)
    budget = link_budget(config.pathloss, config.carrier_frequency_hz, distance,
                         config.tx_power_dbm, shadow)
    rx_mw = budget.rx_power_mw

    n_clusters, l_aod, l_aoa = draw_counts(p, rng)
    m_counts = draw_subpath_counts(n_clusters, rng, p.m_max_subpaths)
    rhos = [gen_intra_delays(m, p.baseband_bw_hz, p.x_max, rng) for m in m_counts]
    tau = gen_cluster_delays(n_clusters, p.mu_tau_ns, [r[-1] for r in rhos], rng, p.min_void_ns)
    cluster_pw = gen_cluster_powers(tau, p.gamma_cluster_ns, p.sigma_z_db, rx_mw, rng, p.p0_avg)
    sub_pw = [gen_subpath_powers(r, p.gamma_subpath_ns, p.sigma_u_db, pc, rng, p.pi0_avg)
              for r, pc in zip(rhos, cluster_pw)]
    total = sum(m_counts)
    phases = gen_phases(total, rng)
    aod_lobes = gen_lobe_angles(l_aod, p.lobe_elev_aod_mean_deg, p.lobe_elev_aod_sigma_deg, rng, "AOD")
    aoa_lobes = gen_lobe_angles(l_aoa, p.lobe_elev_aoa_mean_deg, p.lobe_elev_aoa_sigma_deg, rng, "AOA")
    ang = draw_subpath_angles(total, aod_lobes, aoa_lobes, OffsetSigmas.from_params(p), rng)

    t0_ns = distance / SPEED_OF_LIGHT * 1e9
    # subpath kept iff Pt - P_sub(dBm) <= max path loss
    min_power_mw = dbm_to_mw(config.tx_power_dbm - p.max_path_loss_db)

    clusters = []
    k = 0
    for n in range(n_clusters):
        subpaths = []
        for m in range(m_counts[n]):
            power = float(sub_pw[n][m])
            if not config.apply_threshold or power >= min_power_mw:
                subpaths.append(Subpath(
                    cluster=n + 1,
                    index=m + 1,
                    intra_delay_ns=float(rhos[n][m]),
                    abs_delay_ns=float(t0_ns + tau[n] + rhos[n][m]),
                    power_mw=power,
                    phase_rad=float(phases[k]),
                    aod_az_deg=float(ang["aod_az_deg"][k]),
                    aod_el_deg=float(ang["aod_el_deg"][k]),
                    aoa_az_deg=float(ang["aoa_az_deg"][k]),
                    aoa_el_deg=float(ang["aoa_el_deg"][k]),
                    aod_lobe=int(ang["aod_lobe"][k]),
                    aoa_lobe=int(ang["aoa_lobe"][k]),
                ))
            k += 1
        if subpaths:
            clusters.append(TimeCluster(n + 1, float(tau[n]), float(cluster_pw[n]), subpaths))

    return OmniChannel(
        scenario=config.scenario.value,
        carrier_frequency_hz=float(config.carrier_frequency_hz),
        tx_power_dbm=float(config.tx_power_dbm),
        distance_m=distance,
        t0_ns=t0_ns,
        path_loss_db=budget.path_loss_db,
        shadow_db=shadow,
        rx_power_mw=rx_mw,
        clusters=clusters,
        aod_lobes=aod_lobes,
        aoa_lobes=aoa_lobes,
        outage=not clusters,
        n_subpaths_generated=total,
    )
