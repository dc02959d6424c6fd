"""Command line entry point: ``sscm run | pdp | validate``.

Exit codes: 0 ok, 1 validation failure, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from sscm import harness
from sscm.antenna import directional_cir
from sscm.chan_gen import generate_channel, substream
from sscm.errors import ConfigurationError, NoPointingError, UndefinedStatisticError

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("sscm")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", default=None,
                   help="los-28-73, nlos-28, nlos-73 or nlos-28-73 (default nlos-28-73)")
    p.add_argument("--freq", type=float, default=None, help="carrier frequency in Hz")
    p.add_argument("--seed", type=int, default=None, help="master seed (64-bit)")
    p.add_argument("--tx-power", type=float, default=None, help="transmit power in dBm (default 30)")
    p.add_argument("--d-min", type=float, default=None, help="minimum TX-RX distance in m")
    p.add_argument("--d-max", type=float, default=None, help="maximum TX-RX distance in m")
    p.add_argument("--config", type=Path, default=None,
                   help="JSON run config; its keys override command line flags")
    ant = p.add_argument_group("antenna")
    ant.add_argument("--tx-hpbw-az", type=float, default=None)
    ant.add_argument("--tx-hpbw-el", type=float, default=None)
    ant.add_argument("--rx-hpbw-az", type=float, default=None)
    ant.add_argument("--rx-hpbw-el", type=float, default=None)
    ant.add_argument("--efficiency", type=float, default=None, help="antenna efficiency (default 0.7)")
    ant.add_argument("--pointing", default=None,
                     help="'best' or explicit 'tx_az,tx_el;rx_az,rx_el' in degrees")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sscm", description="mmWave statistical spatial channel simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="generate a seeded ensemble and write statistics")
    _add_common(run)
    run.add_argument("--n", type=int, default=None, help="number of realizations (default 10000)")
    run.add_argument("--out", type=Path, default=None, help="output directory")
    run.add_argument("--workers", type=int, default=None, help="worker processes (default 1)")
    run.add_argument("--emit", default=None,
                     help="comma list from pdp,spectrum,stats,cdf,channels (default stats,cdf)")
    run.add_argument("--directional", action="store_true", default=None,
                     help="also compute directional delay spreads with best pointing")
    run.add_argument("--expect", type=Path, default=None, help="expectations JSON to validate against")
    run.add_argument("--reference", action="store_true",
                     help="validate against the built-in reference values for the scenario")

    pdp = sub.add_parser("pdp", help="emit one realization as PDP CSV (or channel JSON)")
    _add_common(pdp)
    pdp.add_argument("--index", type=int, default=0, help="realization index within the seeded ensemble")
    pdp.add_argument("--format", choices=("pdp", "spectrum-aod", "spectrum-aoa", "json"), default="pdp")
    pdp.add_argument("--out", type=Path, default=None, help="output file (default stdout)")

    val = sub.add_parser("validate", help="check a report.json against expectations")
    val.add_argument("--report", type=Path, required=True, help="report.json written by 'sscm run'")
    val.add_argument("--expect", type=Path, default=None, help="expectations JSON")
    val.add_argument("--reference", action="store_true",
                     help="use the built-in reference values for the report's scenario")
    return parser


def _run_config(args: argparse.Namespace) -> harness.RunConfig:
    antenna_fields = {
        "tx_hpbw_az_deg": args.tx_hpbw_az, "tx_hpbw_el_deg": args.tx_hpbw_el,
        "rx_hpbw_az_deg": args.rx_hpbw_az, "rx_hpbw_el_deg": args.rx_hpbw_el,
        "efficiency": args.efficiency, "pointing": args.pointing,
    }
    antenna = harness.AntennaConfig(**{k: v for k, v in antenna_fields.items() if v is not None})
    flags = {
        "scenario": args.scenario,
        "carrier_frequency_hz": args.freq,
        "master_seed": args.seed,
        "tx_power_dbm": args.tx_power,
        "d_min_m": args.d_min,
        "d_max_m": args.d_max,
        "antenna": antenna,
        "n_realizations": getattr(args, "n", None),
        "out_dir": str(args.out) if getattr(args, "out", None) and args.command == "run" else None,
        "workers": getattr(args, "workers", None),
        "directional": getattr(args, "directional", None),
    }
    emit = getattr(args, "emit", None)
    if emit is not None:
        flags["emit"] = frozenset(e.strip() for e in emit.split(",") if e.strip())
    if args.config is not None:
        return harness.load_run_config(args.config, **flags)
    return harness.RunConfig(**{k: v for k, v in flags.items() if v is not None})


def _expectations(args: argparse.Namespace, scenario: str) -> Optional[dict]:
    if getattr(args, "expect", None) is not None:
        return harness.load_expectations(args.expect)
    if getattr(args, "reference", False):
        return harness.REFERENCE_EXPECTATIONS[harness.ScenarioKey.parse(scenario)]
    return None


def _report_validation(result: harness.ValidationResult) -> int:
    for line in result.lines():
        print(line)
    return EXIT_OK if result.passed else EXIT_VALIDATION


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    expectations = _expectations(args, cfg.scenario.value)
    report = harness.run_ensemble(cfg)
    if cfg.out_dir:
        harness.write_outputs(report, cfg, cfg.out_dir)
    else:
        sys.stdout.write(report.to_json())
    if expectations is not None:
        return _report_validation(harness.validate(report.summary, expectations))
    return EXIT_OK


def cmd_pdp(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    if args.index < 0:
        raise ConfigurationError("index must be >= 0")
    channel = generate_channel(cfg.channel_config(), substream(cfg.master_seed, args.index))
    patterns = cfg.antenna.patterns()
    if args.format == "json":
        text = harness.channel_json(channel)
    elif channel.outage:
        raise UndefinedStatisticError(f"realization {args.index} is in outage")
    elif args.format.startswith("spectrum"):
        text = harness.spectrum_csv(channel, args.format.split("-")[1].upper())
    elif patterns is not None:
        tx_point, rx_point = cfg.antenna.pointings(channel)
        pdp = directional_cir(channel, patterns[0], patterns[1], tx_point, rx_point)
        text = harness.directional_pdp_csv(pdp.delay_ns, pdp.power_mw)
    else:
        text = harness.pdp_csv(channel)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        report = json.loads(args.report.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{args.report}: invalid JSON ({exc})") from exc
    expectations = _expectations(args, report.get("config", {}).get("scenario", "NLOS_28_73"))
    return _report_validation(harness.validate(report.get("summary", {}), expectations or {}))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": cmd_run, "pdp": cmd_pdp, "validate": cmd_validate}[args.command]
    try:
        return handler(args)
    except (ConfigurationError, NoPointingError, UndefinedStatisticError) as exc:
        print(f"sscm: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"sscm: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
