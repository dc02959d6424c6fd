"""Seeded ensemble runs, file outputs and expectation checks."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np

from sscm import stats
from sscm.antenna import AntennaPattern, Pointing, best_pointing, directional_cir
from sscm.chan_gen import ChannelConfig, OmniChannel, generate_channel, substream
from sscm.errors import ConfigurationError
from sscm.params import Band, ScenarioKey, lookup_scenario, nearest_band
from sscm.pathloss import mw_to_dbm

log = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1
EMIT_CHOICES = frozenset({"pdp", "spectrum", "stats", "cdf", "channels"})
MAX_SEED = 2 ** 64 - 1

# Horn beamwidth used to scan azimuth spectra for lobe detection, per band.
LOBE_SCAN_HPBW_DEG = {Band.GHZ_28: 10.0, Band.GHZ_73: 7.0}

DIRECTIONAL_HPBWS_DEG = (7.0, 10.0, 30.0)

DEFAULT_FREQUENCY_HZ = {
    ScenarioKey.LOS_28_73: 28e9,
    ScenarioKey.NLOS_28: 28e9,
    ScenarioKey.NLOS_73: 73e9,
    ScenarioKey.NLOS_28_73: 28e9,
}

# Simulated medians / means the model is expected to reproduce.
REFERENCE_EXPECTATIONS: dict[ScenarioKey, dict[str, dict[str, float]]] = {
    ScenarioKey.LOS_28_73: {"median_rms_ds_ns": {"expected": 16.0, "rel_tol": 0.2}},
    ScenarioKey.NLOS_28_73: {"median_rms_ds_ns": {"expected": 35.0, "rel_tol": 0.2}},
    ScenarioKey.NLOS_28: {"median_rms_ds_ns": {"expected": 32.0, "rel_tol": 0.2}},
    ScenarioKey.NLOS_73: {
        "median_rms_ds_ns": {"expected": 39.0, "rel_tol": 0.2},
        "mean_aoa_lobe_az_spread_deg": {"expected": 4.0, "abs_tol": 1.5},
        "mean_aoa_lobe_el_spread_deg": {"expected": 2.0, "abs_tol": 1.5},
    },
}


@dataclass(frozen=True)
class AntennaConfig:
    tx_hpbw_az_deg: Optional[float] = None
    tx_hpbw_el_deg: Optional[float] = None
    rx_hpbw_az_deg: Optional[float] = None
    rx_hpbw_el_deg: Optional[float] = None
    efficiency: float = 0.7
    pointing: str = "best"  # "best" or "tx_az,tx_el;rx_az,rx_el"

    def patterns(self) -> Optional[tuple[AntennaPattern, AntennaPattern]]:
        """Explicit TX/RX patterns, or None when no beamwidth was configured."""
        widths = (self.tx_hpbw_az_deg, self.tx_hpbw_el_deg, self.rx_hpbw_az_deg, self.rx_hpbw_el_deg)
        if all(w is None for w in widths):
            return None
        tx_az = self.tx_hpbw_az_deg or self.tx_hpbw_el_deg
        tx_el = self.tx_hpbw_el_deg or tx_az
        rx_az = self.rx_hpbw_az_deg or self.rx_hpbw_el_deg
        rx_el = self.rx_hpbw_el_deg or rx_az
        tx = AntennaPattern(tx_az, tx_el, self.efficiency) if tx_az else AntennaPattern.omni()
        rx = AntennaPattern(rx_az, rx_el, self.efficiency) if rx_az else AntennaPattern.omni()
        return tx, rx

    def pointings(self, channel: OmniChannel) -> tuple[Pointing, Pointing]:
        if self.pointing == "best":
            return best_pointing(channel)
        try:
            tx_text, rx_text = self.pointing.split(";")
        except ValueError:
            raise ConfigurationError(
                f"pointing must be 'best' or 'tx_az,tx_el;rx_az,rx_el', got {self.pointing!r}"
            ) from None
        return Pointing.parse(tx_text), Pointing.parse(rx_text)


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioKey = ScenarioKey.NLOS_28_73
    carrier_frequency_hz: Optional[float] = None
    tx_power_dbm: float = 30.0
    n_realizations: int = 10000
    master_seed: int = 0
    d_min_m: Optional[float] = None
    d_max_m: Optional[float] = None
    param_overrides: Mapping[str, Any] = field(default_factory=dict)
    antenna: AntennaConfig = AntennaConfig()
    out_dir: Optional[str] = None
    emit: frozenset = frozenset({"stats", "cdf"})
    workers: int = 1
    lobe_threshold_db: float = -10.0
    lobe_scan_hpbw_deg: Optional[float] = None  # None: band default, 0: raw 1-degree bins
    directional: bool = False
    n_directional: int = 20

    def __post_init__(self):
        key = ScenarioKey.parse(self.scenario)
        object.__setattr__(self, "scenario", key)
        if self.carrier_frequency_hz is None:
            object.__setattr__(self, "carrier_frequency_hz", DEFAULT_FREQUENCY_HZ[key])
        if isinstance(self.n_realizations, bool) or int(self.n_realizations) != self.n_realizations \
                or self.n_realizations < 1:
            raise ConfigurationError("n_realizations must be an integer >= 1")
        if not 0 <= int(self.master_seed) <= MAX_SEED:
            raise ConfigurationError("seed must be a 64-bit unsigned value")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        unknown = set(self.emit) - EMIT_CHOICES
        if unknown:
            raise ConfigurationError(f"unknown emit flag(s) {sorted(unknown)}; choose from {sorted(EMIT_CHOICES)}")
        object.__setattr__(self, "emit", frozenset(self.emit))
        if isinstance(self.antenna, Mapping):
            object.__setattr__(self, "antenna", AntennaConfig(**self.antenna))
        self.channel_config()  # validates the generator-facing part

    def channel_config(self) -> ChannelConfig:
        params = lookup_scenario(self.scenario, **dict(self.param_overrides))
        return ChannelConfig(
            scenario=self.scenario,
            carrier_frequency_hz=self.carrier_frequency_hz,
            tx_power_dbm=self.tx_power_dbm,
            d_min_m=self.d_min_m,
            d_max_m=self.d_max_m,
            params=params,
        )

    @property
    def scan_hpbw_deg(self) -> Optional[float]:
        if self.lobe_scan_hpbw_deg is None:
            return LOBE_SCAN_HPBW_DEG[nearest_band(self.carrier_frequency_hz)]
        return self.lobe_scan_hpbw_deg or None

    def summary(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario.value,
            "carrier_frequency_hz": self.carrier_frequency_hz,
            "tx_power_dbm": self.tx_power_dbm,
            "n_realizations": self.n_realizations,
            "master_seed": self.master_seed,
            "d_min_m": self.d_min_m,
            "d_max_m": self.d_max_m,
            "param_overrides": dict(sorted(self.param_overrides.items())),
            "lobe_threshold_db": self.lobe_threshold_db,
            "lobe_scan_hpbw_deg": self.scan_hpbw_deg,
        }


def load_run_config(path: "str | Path", **flags: Any) -> RunConfig:
    """Run configuration from JSON; keys in the file take precedence over ``flags``."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError:
        raise
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: expected a JSON object")
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigurationError(f"{path}: unknown run config key(s) {sorted(unknown)}")
    merged = {k: v for k, v in flags.items() if v is not None}
    merged.update(data)
    if "antenna" in flags and isinstance(flags["antenna"], AntennaConfig) and "antenna" in data:
        merged["antenna"] = dataclasses.replace(flags["antenna"], **data["antenna"])
    if "emit" in merged:
        merged["emit"] = frozenset(merged["emit"])
    try:
        return RunConfig(**merged)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from exc


# -- per-realization statistics ----------------------------------------------

def _joined(values: Iterable[float]) -> str:
    return ";".join(repr(round(v, 6)) for v in values)


def realization_stats(channel: OmniChannel, index: int, threshold_db: float = -10.0,
                      scan_hpbw_deg: Optional[float] = None) -> dict[str, Any]:
    """One CSV row of statistics for a realization."""
    row: dict[str, Any] = {
        "seed_index": index,
        "outage": int(channel.outage),
        "distance_m": channel.distance_m,
        "pr_dbm": channel.rx_power_dbm,
        "n_clusters": len(channel.clusters),
        "n_subpaths_total": channel.n_subpaths,
        "n_aod_lobes": len(channel.aod_lobes),
        "n_aoa_lobes": len(channel.aoa_lobes),
    }
    if channel.outage:
        return row
    cols = channel.arrays()
    row["rms_ds_ns"] = stats.rms_delay_spread(cols["abs_delay_ns"], cols["power_mw"])
    for kind in ("aod", "aoa"):
        spectrum = stats.AngularSpectrum(kind.upper(), cols[f"{kind}_az_deg"], cols[f"{kind}_el_deg"],
                                         cols["power_mw"])
        row[f"global_as_{kind}_az"] = stats.global_angular_spread(spectrum, "azimuth")
        row[f"global_as_{kind}_el"] = stats.global_angular_spread(spectrum, "elevation")
        lobes = stats.lobe_statistics(spectrum, threshold_db, 1.0, scan_hpbw_deg)
        row[f"n_{kind}_lobes_detected"] = len(lobes)
        row[f"{kind}_lobe_az_spreads"] = [ls.rms_az_spread_deg for ls in lobes]
        row[f"{kind}_lobe_el_spreads"] = [ls.rms_el_spread_deg for ls in lobes]
    return row


STATS_COLUMNS = (
    "seed_index", "outage", "distance_m", "pr_dbm", "n_clusters", "n_subpaths_total", "rms_ds_ns",
    "global_as_aod_az", "global_as_aoa_az", "global_as_aod_el", "global_as_aoa_el",
    "n_aod_lobes", "n_aoa_lobes", "n_aod_lobes_detected", "n_aoa_lobes_detected",
    "aod_lobe_az_spreads", "aod_lobe_el_spreads", "aoa_lobe_az_spreads", "aoa_lobe_el_spreads",
)


def _realize(cfg: RunConfig, chan_cfg: ChannelConfig, index: int) -> tuple[OmniChannel, dict[str, Any]]:
    channel = generate_channel(chan_cfg, substream(cfg.master_seed, index))
    return channel, realization_stats(channel, index, cfg.lobe_threshold_db, cfg.scan_hpbw_deg)


def _realize_chunk(cfg: RunConfig, indices: Sequence[int], keep_channels: bool):
    chan_cfg = cfg.channel_config()
    out = []
    for i in indices:
        channel, row = _realize(cfg, chan_cfg, i)
        out.append((channel if keep_channels else None, row))
    return out


def _chunks(n: int, size: int) -> list[range]:
    return [range(s, min(s + size, n)) for s in range(0, n, size)]


# -- ensemble ----------------------------------------------------------------

@dataclass
class EnsembleReport:
    config: dict[str, Any]
    rows: list[dict[str, Any]]
    summary: dict[str, Any]
    directional: Optional[dict[str, Any]] = None
    channels: Optional[list[OmniChannel]] = field(default=None, repr=False)

    def to_dict(self) -> dict[str, Any]:
        data = {"schema_version": REPORT_SCHEMA_VERSION, "config": self.config, "summary": self.summary}
        if self.directional is not None:
            data["directional"] = self.directional
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def column(self, name: str) -> list[float]:
        return [row[name] for row in self.rows if name in row]


def _mean(values: Sequence[float]) -> Optional[float]:
    return math.fsum(values) / len(values) if values else None


def summarize(rows: Sequence[dict[str, Any]]) -> dict[str, Any]:
    """Ensemble aggregates; outage realizations only enter the outage count."""
    ok = [r for r in rows if not r["outage"]]
    summary: dict[str, Any] = {
        "n_realizations": len(rows),
        "n_outage": len(rows) - len(ok),
    }
    if not ok:
        return summary
    ds = [r["rms_ds_ns"] for r in ok]
    summary["median_rms_ds_ns"] = stats.median(ds)
    summary["p10_rms_ds_ns"] = stats.percentile(ds, 10)
    summary["p90_rms_ds_ns"] = stats.percentile(ds, 90)
    summary["mean_rms_ds_ns"] = _mean(ds)
    for kind in ("aod", "aoa"):
        for axis in ("az", "el"):
            key = f"global_as_{kind}_{axis}"
            summary[f"median_{key}_deg"] = stats.median([r[key] for r in ok])
            spreads = [s for r in ok for s in r[f"{kind}_lobe_{axis}_spreads"]]
            summary[f"mean_{kind}_lobe_{axis}_spread_deg"] = _mean(spreads)
        summary[f"mean_{kind}_lobes_detected"] = _mean([r[f"n_{kind}_lobes_detected"] for r in ok])
    summary["mean_n_clusters"] = _mean([r["n_clusters"] for r in ok])
    summary["mean_n_subpaths"] = _mean([r["n_subpaths_total"] for r in ok])
    return summary


def run_directional(cfg: RunConfig, channels: Sequence[OmniChannel]) -> dict[str, Any]:
    """Directional RMS delay spreads with beams pointed per the antenna config.

    Uses the first ``cfg.n_directional`` non-outage realizations of the
    ensemble. Without explicit antenna beamwidths, identical TX and RX horns
    of each width in DIRECTIONAL_HPBWS_DEG are evaluated.
    """
    explicit = cfg.antenna.patterns()
    if explicit is None:
        pairs = {f"{h:g}": (AntennaPattern(h, h, cfg.antenna.efficiency),) * 2 for h in DIRECTIONAL_HPBWS_DEG}
    else:
        pairs = {"configured": explicit}
    picked = [ch for ch in channels if not ch.outage][:cfg.n_directional]
    result: dict[str, Any] = {"n_channels": len(picked), "pointing": cfg.antenna.pointing, "hpbw": {}}
    for label, (tx, rx) in pairs.items():
        spreads = []
        for ch in picked:
            tx_point, rx_point = cfg.antenna.pointings(ch)
            pdp = directional_cir(ch, tx, rx, tx_point, rx_point)
            spreads.append(stats.rms_delay_spread(pdp.delay_ns, pdp.power_mw))
        result["hpbw"][label] = {
            "rms_ds_ns": spreads,
            "median_rms_ds_ns": stats.median(spreads) if spreads else None,
        }
    return result


def run_ensemble(cfg: RunConfig, keep_channels: bool = False) -> EnsembleReport:
    """Generate ``cfg.n_realizations`` channels and their statistics.

    Each realization draws from its own substream, so the report does not
    depend on ``cfg.workers``.
    """
    keep = keep_channels or cfg.directional or bool(cfg.emit & {"pdp", "spectrum", "channels"})
    n = cfg.n_realizations
    if cfg.workers == 1:
        results = _realize_chunk(cfg, range(n), keep)
    else:
        chunks = _chunks(n, max(1, math.ceil(n / (cfg.workers * 4))))
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            parts = pool.map(_realize_chunk, [cfg] * len(chunks), chunks, [keep] * len(chunks))
            results = [item for part in parts for item in part]
    rows = [row for _, row in results]
    channels = [ch for ch, _ in results] if keep else None
    report = EnsembleReport(cfg.summary(), rows, summarize(rows), channels=channels)
    if cfg.directional:
        report.directional = run_directional(cfg, channels)
    log.info("%s: %d realizations, %d in outage", cfg.scenario.value, n, report.summary["n_outage"])
    return report


# -- file outputs ------------------------------------------------------------

def pdp_csv(channel: OmniChannel) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["delay_ns", "power_dbm"])
    for sp in sorted(channel.subpaths(), key=lambda s: s.abs_delay_ns):
        writer.writerow([repr(sp.abs_delay_ns), repr(float(mw_to_dbm(sp.power_mw)))])
    return buf.getvalue()


def spectrum_csv(channel: OmniChannel, kind: str = "AOA") -> str:
    spectrum = stats.angular_spectrum(channel, kind)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["az_deg", "el_deg", "power_dbm"])
    for az, el, p in zip(spectrum.az_deg, spectrum.el_deg, spectrum.power_mw):
        writer.writerow([repr(float(az)), repr(float(el)), repr(float(mw_to_dbm(p)))])
    return buf.getvalue()


def directional_pdp_csv(delay_ns: np.ndarray, power_mw: np.ndarray) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["delay_ns", "power_dbm"])
    for t, p in zip(delay_ns, power_mw):
        writer.writerow([repr(float(t)), repr(float(mw_to_dbm(p))) if p > 0 else "-inf"])
    return buf.getvalue()


def channel_json(channel: OmniChannel) -> str:
    return json.dumps(channel.to_dict(), indent=1, sort_keys=True) + "\n"


def load_channel_json(text: str) -> OmniChannel:
    return OmniChannel.from_dict(json.loads(text))


def emit_pdp(channel: OmniChannel, path: "str | Path") -> None:
    Path(path).write_text(pdp_csv(channel))


def emit_spectrum(channel: OmniChannel, path: "str | Path", kind: str = "AOA") -> None:
    Path(path).write_text(spectrum_csv(channel, kind))


def stats_csv(rows: Sequence[dict[str, Any]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=STATS_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        out = {}
        for key in STATS_COLUMNS:
            value = row.get(key, "")
            if isinstance(value, list):
                value = _joined(value)
            elif isinstance(value, float):
                value = repr(value)
            out[key] = value
        writer.writerow(out)
    return buf.getvalue()


def cdf_csv(samples: Sequence[float]) -> str:
    lines = ["value,probability"]
    lines += [f"{v!r},{p!r}" for v, p in stats.empirical_cdf(samples)] if samples else []
    return "\n".join(lines) + "\n"


CDF_STATISTICS = ("rms_ds_ns", "global_as_aod_az", "global_as_aoa_az", "global_as_aod_el", "global_as_aoa_el")


def write_outputs(report: EnsembleReport, cfg: RunConfig, out_dir: "str | Path") -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "report.json"]
    written[0].write_text(report.to_json())
    if "stats" in cfg.emit:
        written.append(out / "stats.csv")
        written[-1].write_text(stats_csv(report.rows))
    if "cdf" in cfg.emit:
        for name in CDF_STATISTICS:
            written.append(out / f"cdf_{name}.csv")
            written[-1].write_text(cdf_csv(report.column(name)))
        for kind in ("aod", "aoa"):
            for axis in ("az", "el"):
                spreads = [s for row in report.rows for s in row.get(f"{kind}_lobe_{axis}_spreads", [])]
                written.append(out / f"cdf_{kind}_lobe_{axis}_spread.csv")
                written[-1].write_text(cdf_csv(spreads))
    for sub, wanted in (("pdp", "pdp"), ("spectrum", "spectrum"), ("channels", "channels")):
        if wanted in cfg.emit:
            (out / sub).mkdir(exist_ok=True)
    for k, channel in enumerate(report.channels or []):
        if "channels" in cfg.emit:
            written.append(out / "channels" / f"channel_{k:06d}.json")
            written[-1].write_text(channel_json(channel))
        if channel.outage:
            continue
        if "pdp" in cfg.emit:
            written.append(out / "pdp" / f"pdp_{k:06d}.csv")
            emit_pdp(channel, written[-1])
        if "spectrum" in cfg.emit:
            for kind in ("AOD", "AOA"):
                written.append(out / "spectrum" / f"{kind.lower()}_{k:06d}.csv")
                emit_spectrum(channel, written[-1], kind)
    return written


# -- validation --------------------------------------------------------------

@dataclass
class CheckResult:
    statistic: str
    expected: float
    observed: Optional[float]
    low: float
    high: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        obs = "missing" if self.observed is None else f"{self.observed:.4g}"
        return f"[{status}] {self.statistic}: observed {obs}, expected {self.expected:g} in [{self.low:.4g}, {self.high:.4g}]"


@dataclass
class ValidationResult:
    checks: list[CheckResult]
    warnings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [f"[WARN] {w}" for w in self.warnings] + [c.line() for c in self.checks]


def validate(summary: Mapping[str, Any], expectations: Mapping[str, Mapping[str, float]]) -> ValidationResult:
    """Compare summary statistics against ``{name: {expected, rel_tol | abs_tol}}``."""
    if not expectations:
        return ValidationResult([], ["no expectations given; nothing checked"])
    checks = []
    for name, entry in expectations.items():
        try:
            expected = float(entry["expected"])
        except (KeyError, TypeError, ValueError):
            raise ConfigurationError(f"expectation {name!r} needs a numeric 'expected' value") from None
        if "abs_tol" in entry:
            tol = float(entry["abs_tol"])
        elif "rel_tol" in entry:
            tol = abs(expected) * float(entry["rel_tol"])
        else:
            raise ConfigurationError(f"expectation {name!r} needs 'rel_tol' or 'abs_tol'")
        observed = summary.get(name)
        low, high = expected - tol, expected + tol
        ok = observed is not None and low <= observed <= high
        checks.append(CheckResult(name, expected, observed, low, high, ok))
    return ValidationResult(checks)


def load_expectations(path: "str | Path") -> dict[str, dict[str, float]]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: expected a JSON object")
    return data
