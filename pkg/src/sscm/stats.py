"""Delay and angular statistics of generated channels.

Angular spectra are the delta-function power spectra of a realization
(one support point per subpath). Azimuth lobes are found on a binned
azimuth spectrum with power integrated over elevation, optionally as seen
through a swept directive horn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from sscm.angles import wrap_180
from sscm.antenna import AntennaPattern, gain
from sscm.chan_gen import OmniChannel
from sscm.errors import UndefinedStatisticError


def _weights(powers) -> np.ndarray:
    p = np.asarray(powers, dtype=float)
    if p.size == 0 or not p.sum() > 0:
        raise UndefinedStatisticError("statistic needs at least one sample with positive power")
    return p / p.sum()


def weighted_rms(values, powers) -> float:
    w = _weights(powers)
    v = np.asarray(values, dtype=float)
    mean = np.dot(w, v)
    return float(math.sqrt(max(np.dot(w, (v - mean) ** 2), 0.0)))


def rms_delay_spread(delays_ns, powers_mw) -> float:
    """Power-weighted RMS delay spread in ns."""
    return weighted_rms(delays_ns, powers_mw)


def channel_rms_delay_spread(channel: OmniChannel) -> float:
    cols = channel.arrays()
    return rms_delay_spread(cols["abs_delay_ns"], cols["power_mw"])


@dataclass
class AngularSpectrum:
    kind: str
    az_deg: np.ndarray
    el_deg: np.ndarray
    power_mw: np.ndarray

    @property
    def total_power_mw(self) -> float:
        return float(self.power_mw.sum())

    def binned_azimuth(self, bin_width_deg: float = 1.0) -> np.ndarray:
        """Power per azimuth bin, integrated over elevation; bin k covers [k*w, (k+1)*w)."""
        n_bins = int(round(360.0 / bin_width_deg))
        if not math.isclose(n_bins * bin_width_deg, 360.0):
            raise ValueError("bin width must divide 360 degrees")
        idx = np.floor(np.mod(self.az_deg, 360.0) / bin_width_deg).astype(int) % n_bins
        return np.bincount(idx, weights=self.power_mw, minlength=n_bins)


def angular_spectrum(channel: OmniChannel, kind: str = "AOA") -> AngularSpectrum:
    """Marginal AOD or AOA power spectrum of a channel."""
    if channel.outage:
        raise UndefinedStatisticError("channel is in outage")
    kind = kind.upper()
    if kind not in ("AOD", "AOA"):
        raise ValueError(f"kind must be AOD or AOA, got {kind!r}")
    cols = channel.arrays()
    prefix = kind.lower()
    return AngularSpectrum(kind, cols[f"{prefix}_az_deg"], cols[f"{prefix}_el_deg"], cols["power_mw"])


def circular_spread(angles_deg, powers, grid_step_deg: float = 1.0) -> float:
    """Circular RMS angular spread, minimized over a grid of angle shifts."""
    w = _weights(powers)
    a = np.asarray(angles_deg, dtype=float)
    shifts = np.arange(-180.0, 180.0, grid_step_deg)
    shifted = wrap_180(a[None, :] + shifts[:, None])
    mean = shifted @ w
    dev = wrap_180(shifted - mean[:, None])
    var = (dev ** 2) @ w
    return float(math.sqrt(max(var.min(), 0.0)))


def global_angular_spread(spectrum: AngularSpectrum, axis: str = "azimuth",
                          grid_step_deg: float = 1.0) -> float:
    """Global spread of a spectrum: circular in azimuth, plain RMS in elevation."""
    if axis == "azimuth":
        return circular_spread(spectrum.az_deg, spectrum.power_mw, grid_step_deg)
    if axis == "elevation":
        return weighted_rms(spectrum.el_deg, spectrum.power_mw)
    raise ValueError(f"axis must be 'azimuth' or 'elevation', got {axis!r}")


@dataclass(frozen=True)
class LobeSegment:
    """Contiguous run of azimuth bins; ``bins`` are indices in circular order.

    ``bin_power_mw`` holds the spectrum values the segment was cut from,
    which are beam-scanned powers when ``scanned`` is set.
    """

    bins: tuple[int, ...]
    bin_width_deg: float
    bin_power_mw: tuple[float, ...]
    scanned: bool = False

    @property
    def power_mw(self) -> float:
        return math.fsum(self.bin_power_mw)

    @property
    def start_deg(self) -> float:
        return self.bins[0] * self.bin_width_deg

    @property
    def width_deg(self) -> float:
        return len(self.bins) * self.bin_width_deg

    @property
    def center_deg(self) -> float:
        return (self.start_deg + self.width_deg / 2.0) % 360.0

    def bin_centers_deg(self) -> np.ndarray:
        return (np.asarray(self.bins) + 0.5) * self.bin_width_deg

    def contains(self, az_deg) -> np.ndarray:
        n_bins = int(round(360.0 / self.bin_width_deg))
        mask = np.zeros(n_bins, dtype=bool)
        mask[list(self.bins)] = True
        idx = np.floor(np.mod(az_deg, 360.0) / self.bin_width_deg).astype(int) % n_bins
        return mask[idx]


def scanned_azimuth(spectrum: AngularSpectrum, scan_hpbw_deg: float,
                    bin_width_deg: float = 1.0) -> np.ndarray:
    """Power collected by a horn of the given beamwidth swept over azimuth bin centers.

    The sweep is elevation-blind: every support point is seen at zero
    elevation offset. Gains are relative to boresight.
    """
    n_bins = int(round(360.0 / bin_width_deg))
    pattern = AntennaPattern(scan_hpbw_deg, scan_hpbw_deg)
    centers = (np.arange(n_bins) + 0.5) * bin_width_deg
    g = gain(pattern, centers[:, None] - spectrum.az_deg[None, :], 0.0)
    return (g @ spectrum.power_mw) / pattern.boresight_gain_linear


def _runs_above(above: np.ndarray) -> list[list[int]]:
    n = above.size
    if above.all():
        return [list(range(n))]
    # start scanning just after a below-threshold bin so no run is split at the seam
    start = int(np.flatnonzero(~above)[0])
    runs: list[list[int]] = []
    run: list[int] = []
    for step in range(1, n + 1):
        k = (start + step) % n
        if above[k]:
            run.append(k)
        elif run:
            runs.append(run)
            run = []
    if run:
        runs.append(run)
    return runs


def segment_lobes(spectrum: AngularSpectrum, threshold_db: float = -10.0,
                  bin_width_deg: float = 1.0,
                  scan_hpbw_deg: Optional[float] = None) -> list[LobeSegment]:
    """Azimuth lobes: maximal runs of bins within ``threshold_db`` of the peak bin.

    By default the bins hold the subpath power falling in each bin. With
    ``scan_hpbw_deg`` they hold the power a directive horn of that beamwidth
    would collect when pointed at the bin, as in a rotated-horn measurement.
    Runs wrap across 0/360 degrees; segments are returned strongest first.
    """
    if scan_hpbw_deg:
        bins = scanned_azimuth(spectrum, scan_hpbw_deg, bin_width_deg)
    else:
        bins = spectrum.binned_azimuth(bin_width_deg)
    return _segments_from_bins(bins, threshold_db, bin_width_deg, bool(scan_hpbw_deg))


def _segments_from_bins(bins: np.ndarray, threshold_db: float, bin_width_deg: float,
                        scanned: bool) -> list[LobeSegment]:
    if not bins.sum() > 0:
        raise UndefinedStatisticError("spectrum has no power")
    above = bins >= bins.max() * 10.0 ** (threshold_db / 10.0)
    out = [LobeSegment(tuple(r), bin_width_deg, tuple(bins[r].tolist()), scanned)
           for r in _runs_above(above)]
    out.sort(key=lambda s: (-s.power_mw, s.bins[0]))
    return out


@dataclass(frozen=True)
class LobeStats:
    lobe_id: int
    power_fraction: float
    rms_az_spread_deg: float
    rms_el_spread_deg: float
    mean_az_deg: float
    mean_el_deg: float


def rms_lobe_spread(spectrum: AngularSpectrum, segment: LobeSegment, lobe_id: int = 1,
                    total_scanned_mw: Optional[float] = None) -> LobeStats:
    """Power-weighted mean and RMS spread of one lobe.

    Elevation statistics always use the subpaths inside the segment. Azimuth
    statistics use those subpaths too, unless the segment was cut from a
    scanned spectrum, in which case the scanned bin powers are the weights.
    Azimuth is unwrapped about the segment center.
    """
    inside = segment.contains(spectrum.az_deg)
    if not inside.any():
        raise UndefinedStatisticError("lobe segment contains no subpath")
    p = spectrum.power_mw[inside]
    el = spectrum.el_deg[inside]
    if segment.scanned:
        az_off = wrap_180(segment.bin_centers_deg() - segment.center_deg)
        az_w = np.asarray(segment.bin_power_mw)
        total = total_scanned_mw if total_scanned_mw is not None else segment.power_mw
        fraction = segment.power_mw / total
    else:
        az_off = wrap_180(spectrum.az_deg[inside] - segment.center_deg)
        az_w = p
        fraction = p.sum() / spectrum.total_power_mw
    return LobeStats(
        lobe_id=lobe_id,
        power_fraction=float(min(fraction, 1.0)),
        rms_az_spread_deg=weighted_rms(az_off, az_w),
        rms_el_spread_deg=weighted_rms(el, p),
        mean_az_deg=float((segment.center_deg + np.dot(_weights(az_w), az_off)) % 360.0),
        mean_el_deg=float(np.dot(_weights(p), el)),
    )


def lobe_statistics(spectrum: AngularSpectrum, threshold_db: float = -10.0,
                    bin_width_deg: float = 1.0,
                    scan_hpbw_deg: Optional[float] = None) -> list[LobeStats]:
    """Statistics of every detected lobe, strongest first.

    Scanned segments that hold no subpath (beam overlap between two
    neighbouring subpaths) are skipped.
    """
    total = None
    if scan_hpbw_deg:
        bins = scanned_azimuth(spectrum, scan_hpbw_deg, bin_width_deg)
        total = float(bins.sum())
        segs = _segments_from_bins(bins, threshold_db, bin_width_deg, True)
    else:
        segs = segment_lobes(spectrum, threshold_db, bin_width_deg)
    out = []
    for seg in segs:
        if seg.contains(spectrum.az_deg).any():
            out.append(rms_lobe_spread(spectrum, seg, len(out) + 1, total))
    return out


def empirical_cdf(samples: Sequence[float]) -> list[tuple[float, float]]:
    """Right-continuous empirical CDF as (value, P[X <= value]) at each distinct value."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise UndefinedStatisticError("empirical CDF of an empty sample")
    values, counts = np.unique(x, return_counts=True)
    probs = np.cumsum(counts) / x.size
    return [(float(v), float(q)) for v, q in zip(values, probs)]


def median(samples: Sequence[float]) -> float:
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise UndefinedStatisticError("median of an empty sample")
    return float(np.percentile(x, 50, method="lower"))


def percentile(samples: Sequence[float], q: float) -> Optional[float]:
    x = np.asarray(samples, dtype=float)
    return float(np.percentile(x, q, method="lower")) if x.size else None
