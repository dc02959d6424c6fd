"""Acceptance criteria. Each test records one PASS/FAIL line, shown in the
"acceptance criteria" section of the pytest terminal summary."""

import json
import math

import numpy as np
import pytest
from scipy import stats as sps

from acceptance_log import record
from invariants import check_channel_invariants
from oracles import circular_spread_bruteforce, rms_delay_spread_pairwise
from sscm import harness
from sscm.antenna import AntennaPattern, Pointing, directional_cir, gain
from sscm.chan_gen import (
    ChannelConfig,
    OffsetSigmas,
    SpatialLobe,
    draw_cluster_offsets,
    draw_subpath_angles,
    draw_subpath_counts,
    gen_cluster_powers,
    gen_phases,
    gen_subpath_powers,
    generate_channel,
    substream,
)
from sscm.params import PathLossParams, lookup_scenario
from sscm.pathloss import free_space_ref_pl, path_loss
from sscm.stats import circular_spread, rms_delay_spread

N_ENSEMBLE = 10_000
N_DRAWS = 1_000_000
SEED = 20160522

DS_TARGETS_NS = {"LOS_28_73": 16.0, "NLOS_28_73": 35.0, "NLOS_28": 32.0, "NLOS_73": 39.0}


def _checked(criterion, checks):
    """Record one line from ``[(label, ok, detail), ...]`` and assert it."""
    passed = all(ok for _, ok, _ in checks)
    detail = "; ".join(f"{label} {detail}{'' if ok else ' (FAIL)'}" for label, ok, detail in checks)
    record(criterion, passed, detail)
    assert passed, detail


@pytest.fixture(scope="module")
def ensembles():
    return {key: harness.run_ensemble(harness.RunConfig(scenario=key, n_realizations=N_ENSEMBLE,
                                                        master_seed=SEED))
            for key in DS_TARGETS_NS}


@pytest.mark.slow
def test_criterion_1_median_delay_spread(ensembles):
    checks = []
    for key, target in DS_TARGETS_NS.items():
        observed = ensembles[key].summary["median_rms_ds_ns"]
        ok = abs(observed - target) <= 0.2 * target
        checks.append((key, ok, f"{observed:.2f} ns vs {target:g} +/-20%"))
    _checked("1 median omni RMS delay spread (10k)", checks)


@pytest.mark.slow
def test_criterion_2_nlos73_aoa_lobe_spreads(ensembles):
    s = ensembles["NLOS_73"].summary
    az, el = s["mean_aoa_lobe_az_spread_deg"], s["mean_aoa_lobe_el_spread_deg"]
    _checked("2 NLOS_73 mean AOA lobe spreads", [
        ("azimuth", abs(az - 4.0) <= 1.5, f"{az:.2f} deg vs 4 +/-1.5"),
        ("elevation", abs(el - 2.0) <= 1.5, f"{el:.2f} deg vs 2 +/-1.5"),
    ])


def test_criterion_3_property_suite():
    n_per = 2500
    checks = []
    for key in DS_TARGETS_NS:
        freq = 73e9 if key == "NLOS_73" else 28e9
        cfg = ChannelConfig(scenario=key, carrier_frequency_hz=freq, apply_threshold=False)
        failures = 0
        for i in range(n_per):
            try:
                check_channel_invariants(generate_channel(cfg, substream(SEED, i)), cfg, thresholded=False)
            except AssertionError:
                failures += 1
        checks.append((key, failures == 0, f"{n_per - failures}/{n_per} realizations"))
    _checked("3 structural properties (pre-threshold)", checks)


def test_criterion_4_path_loss():
    f28, f73 = free_space_ref_pl(28e9), free_space_ref_pl(73e9)
    checks = [
        ("FSPL 28 GHz", abs(f28 - 61.38) <= 0.01, f"{f28:.4f} dB"),
        ("FSPL 73 GHz", abs(f73 - 69.71) <= 0.01, f"{f73:.4f} dB"),
    ]
    worst = 0.0
    for ple in (2.0, 2.1, 3.3, 3.4):
        pl = PathLossParams(ple, 0.0)
        for d in (1.0, 7.5, 60.0, 150.0):
            step = path_loss(pl, 28e9, 2 * d) - path_loss(pl, 28e9, d)
            worst = max(worst, abs(step - 10 * ple * math.log10(2)))
    checks.append(("doubling", worst <= 1e-12, f"max deviation {worst:.1e} dB"))
    _checked("4 path loss", checks)


def test_criterion_5_antenna():
    horn = AntennaPattern(10.0, 7.0, 0.7)
    g0 = horn.boresight_gain_linear
    exact = 41253 * 0.7 / (10.0 * 7.0)
    half = max(abs(gain(horn, 5.0, 0.0) / g0 - 0.5), abs(gain(horn, 0.0, 3.5) / g0 - 0.5),
               abs(gain(horn, -5.0, 0.0) / g0 - 0.5))
    floor = gain(horn, 120.0, 40.0)
    iso = AntennaPattern.omni()
    worst = 0.0
    for i in range(200):
        ch = generate_channel(ChannelConfig(scenario="NLOS_28_73", apply_threshold=False), substream(SEED, i))
        pdp = directional_cir(ch, iso, iso, Pointing(0, 0), Pointing(0, 0))
        worst = max(worst, abs(pdp.total_power_mw / ch.total_power_mw - 1))
    _checked("5 antenna", [
        ("G0", g0 == exact and gain(horn, 0.0, 0.0) == exact, f"{g0:.6f}"),
        ("half-HPBW", half <= 1e-12, f"max rel error {half:.1e}"),
        ("floor", floor == pytest.approx(g0 / 100, rel=1e-15), f"{floor:.6f} = G0/100"),
        ("unity pattern power", worst <= 1e-9, f"max rel error {worst:.1e} over 200 channels"),
    ])


def test_criterion_6_statistics_oracles():
    rng = np.random.default_rng(SEED)
    n_cases = 120
    worst_ds = worst_as = 0.0
    for _ in range(n_cases):
        k = int(rng.integers(1, 9))
        delays = rng.uniform(0, 800, k)
        powers = 10 ** rng.uniform(-12, -6, k)
        worst_ds = max(worst_ds, abs(rms_delay_spread(delays, powers)
                                     - rms_delay_spread_pairwise(delays.tolist(), powers.tolist())))
        az = rng.uniform(0, 360, k)
        worst_as = max(worst_as, abs(circular_spread(az, powers)
                                     - circular_spread_bruteforce(az.tolist(), powers.tolist(), 0.1)))
    _checked("6 statistics vs brute-force oracles", [
        ("delay spread", worst_ds <= 1e-9, f"max |diff| {worst_ds:.1e} ns over {n_cases}"),
        ("circular spread", worst_as <= 0.5, f"max |diff| {worst_as:.3f} deg over {n_cases}"),
    ])


def test_criterion_7_determinism():
    base = dict(scenario="NLOS_28_73", n_realizations=40, master_seed=SEED)
    serial = harness.run_ensemble(harness.RunConfig(workers=1, **base), keep_channels=True)
    parallel = harness.run_ensemble(harness.RunConfig(workers=2, **base), keep_channels=True)
    again = harness.run_ensemble(harness.RunConfig(workers=1, **base), keep_channels=True)
    dump = lambda rep: "".join(harness.channel_json(c) for c in rep.channels)  # noqa: E731
    same = dump(serial) == dump(parallel) == dump(again)
    reports = serial.to_json() == parallel.to_json()
    _checked("7 determinism", [
        ("channel JSON serial vs parallel", same, f"{len(dump(serial))} bytes"),
        ("report JSON", reports, "identical" if reports else "differs"),
    ])


def test_criterion_8_distributions():
    rng = np.random.default_rng(SEED)
    checks = []

    m = np.asarray(draw_subpath_counts(N_DRAWS, rng))
    checks.append(("DU[1,30]", m.min() == 1 and m.max() == 30 and abs(m.mean() - 15.5) < 0.05,
                   f"range [{m.min()},{m.max()}] mean {m.mean():.4f}"))

    mu = lookup_scenario("NLOS_28_73").mu_tau_ns
    exp_mean = draw_cluster_offsets(N_DRAWS, mu, rng).mean()
    checks.append(("Exp mean", abs(exp_mean / mu - 1) <= 0.01, f"{exp_mean:.3f} vs {mu:g} ns"))

    for label, fn, sigma in (("Z", gen_cluster_powers, 3.0), ("U", gen_subpath_powers, 6.0)):
        sd = (10 * np.log10(fn(np.zeros(N_DRAWS), 50.0, sigma, 1.0, rng))).std()
        checks.append((f"{label} std", abs(sd / sigma - 1) <= 0.01, f"{sd:.4f} vs {sigma:g} dB"))

    sig = OffsetSigmas(11.0, 3.0, 7.5, 6.0)
    lobes = [SpatialLobe("AOD", 1, 180.0, 0.0)], [SpatialLobe("AOA", 1, 180.0, 0.0)]
    ang = draw_subpath_angles(N_DRAWS, *lobes, sig, rng)
    for col, sigma, law in (("aod_az_deg", 11.0, "Gaussian"), ("aod_el_deg", 3.0, "Gaussian"),
                            ("aoa_az_deg", 7.5, "Gaussian"), ("aoa_el_deg", 6.0, "Laplace")):
        sd = ang[col].std()
        checks.append((f"{law} {col}", abs(sd / sigma - 1) <= 0.01, f"std {sd:.4f} vs {sigma:g}"))

    phases = gen_phases(100_000, rng)
    p = sps.kstest(phases, sps.uniform(0, 2 * np.pi).cdf).pvalue
    checks.append(("phase KS", p > 0.01, f"p={p:.3f}"))
    _checked("8 distributions (1e6 draws)", checks)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
