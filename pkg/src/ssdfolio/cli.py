"""Command-line entry point: ``ssdfolio {synth,extract,backtest,phases,verify}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from .backtest import (
    SSD_FAMILY,
    BacktestData,
    compute_extractions,
    default_extraction_cutoff,
    load_weights,
    phase_window,
    Phase,
    plan_windows,
    run_phases,
    run_rolling,
    write_report,
)
from .config import PATH_FIELDS, PhaseSpec, RunConfig
from .data import load_market_data, make_scenarios
from .errors import ConfigError, DataError, SolverError, SsdfolioError
from .pca import extraction_report, extract_a, extract_b, loadings_report
from .ssd import verify_ssd_dominance
from .synth import SyntheticSpec, write_synthetic

log = logging.getLogger("ssdfolio")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DATA, EXIT_SOLVER = 0, 1, 2, 3, 4

# flag -> (RunConfig field, type)
_CONFIG_FLAGS = {
    "prices": str, "ratios": str, "sectors": str, "benchmark": str,
    "alpha": float, "bound": float, "pca_mode": str, "variance_target": float, "component_cap": int,
    "extraction_until": str, "lookback_quarters": int, "formulation": str, "benchmark_mode": str,
    "rf": float, "divisor": str, "in_len": int, "out_len": int, "step": int, "seed": int,
}


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration")
    for name, typ in _CONFIG_FLAGS.items():
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=typ, default=None)
    p.add_argument("--models", help="comma-separated model list, e.g. SSD,MinVar")
    p.add_argument("--levels", help="comma-separated confidence levels, e.g. 0.95,0.97")
    p.add_argument("--raw-ratios", action="store_true", help="use raw ratio values instead of z-scores")
    p.add_argument("--extraction-refresh", action="store_true", help="redo PCA extraction in every window")


def _build_config(args) -> RunConfig:
    cfg = RunConfig.from_json(args.config) if args.config else RunConfig()
    for name in _CONFIG_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            if name in PATH_FIELDS:
                value = str(Path(value).resolve())
            setattr(cfg, name, value)
    if getattr(args, "models", None):
        cfg.models = [m.strip() for m in args.models.split(",") if m.strip()]
    if getattr(args, "levels", None):
        try:
            cfg.levels = [float(a) for a in args.levels.split(",")]
        except ValueError:
            raise ConfigError(f"bad --levels value {args.levels!r}") from None
    if getattr(args, "raw_ratios", False):
        cfg.standardize = False
    if getattr(args, "extraction_refresh", False):
        cfg.extraction_refresh = True
    for spec in getattr(args, "phase", None) or []:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"--phase needs name:start:end, got {spec!r}")
        cfg.phases.append(PhaseSpec(*parts))
    return cfg.validate()


def _load(cfg: RunConfig):
    market = load_market_data(cfg.prices, cfg.ratios, cfg.sectors, cfg.benchmark)
    for asset, reason in market.report.removed:
        log.info("removed %s: %s", asset, reason)
    return BacktestData.from_market(market)


def _inputs(cfg: RunConfig) -> dict:
    return {k: getattr(cfg, k) for k in PATH_FIELDS if getattr(cfg, k)}


# ---------------------------------------------------------------- commands


def cmd_synth(args) -> int:
    spec = SyntheticSpec(n_assets=args.n_assets, n_sectors=args.n_sectors, weeks=args.weeks, seed=args.seed,
                         start=args.start)
    paths = write_synthetic(spec, args.out)
    # paths relative to the config file keep the directory relocatable
    cfg = RunConfig(**{k: Path(v).name for k, v in paths.items()}, seed=args.seed)
    Path(args.out, "config.json").write_text(cfg.to_json() + "\n")
    for k, v in paths.items():
        print(f"{k}: {v}")
    return EXIT_OK


def cmd_extract(args) -> int:
    cfg = _build_config(args)
    data = _load(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ext = compute_extractions(data.ratios, data.sectors, data.assets, default_extraction_cutoff(data, cfg),
                              cfg.pca_mode, cfg.variance_target, cfg.component_cap)
    for group, sol in ext.solutions.items():
        loadings_report(sol).to_csv(out / f"loadings_{group}.csv", index=False, float_format="%.4f",
                                    lineterminator="\n")
    sectors = [s for s in ext.solutions if s != "ALL"]
    extraction_report({s: extract_a(ext.solutions[s]) for s in sectors}).to_csv(
        out / "extraction_A.csv", index=False, lineterminator="\n")
    extraction_report({s: extract_b(ext.solutions[s]) for s in sectors}).to_csv(
        out / "extraction_B.csv", index=False, lineterminator="\n")
    pd.DataFrame([(t.label, t.weight, t.sign) for t in ext.fssd_terms], columns=["ratio", "weight", "sign"]).to_csv(
        out / "fssd_terms.csv", index=False, float_format="%.4f", lineterminator="\n")
    print(f"wrote extraction reports for {len(sectors)} sectors to {out}")
    return EXIT_OK


def cmd_backtest(args) -> int:
    cfg = _build_config(args)
    data = _load(cfg)
    report = run_rolling(cfg, data, jobs=args.jobs)
    write_report(report, args.out, cfg, _inputs(cfg))
    print(f"{len(report.windows)} windows, {len(report.skipped)} skipped model fits; report in {args.out}")
    if report.all_failed:
        print("error: every model failed on every window", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_phases(args) -> int:
    cfg = _build_config(args)
    data = _load(cfg)
    reports = run_phases(cfg, data, jobs=args.jobs)
    if not reports:
        print("no phases configured")
        return EXIT_OK
    for name, rep in reports.items():
        write_report(rep, Path(args.out) / name, cfg, _inputs(cfg))
        print(f"phase {name}: {len(rep.skipped)} skipped model fits")
    if all(r.all_failed for r in reports.values()):
        return EXIT_SOLVER
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _build_config(args)
    data = _load(cfg)
    weights = load_weights(args.weights)
    plan = {w.id: w for w in plan_windows(data.returns.shape[0], cfg.in_len, cfg.out_len, cfg.step).windows}
    for p in cfg.phases:
        plan[p.name] = phase_window(Phase(p.name, pd.Timestamp(p.start), pd.Timestamp(p.end)), data.return_dates,
                                    cfg.in_len)
    pos = {a: i for i, a in enumerate(data.assets)}
    rows = []
    for (wid, model), grp in weights.groupby(["window_id", "model"], sort=False):
        if wid not in plan:
            raise DataError(f"{args.weights}: unknown window_id {wid!r}")
        unknown = set(grp["asset_id"]) - set(pos)
        if unknown:
            raise DataError(f"{args.weights}: unknown asset(s) {sorted(unknown)[:5]}")
        z = np.zeros(len(data.assets))
        z[[pos[a] for a in grp["asset_id"]]] = grp["weight"].to_numpy(dtype=float)
        scen = make_scenarios(data.returns, plan[wid].train, data.benchmark, cfg.benchmark_mode, data.assets)
        chk = verify_ssd_dominance(z, scen)
        rows.append((wid, model, chk.worst_gap, chk.dominates))
    audit = pd.DataFrame(rows, columns=["window_id", "model", "worst_gap", "dominates"])
    if args.out:
        audit.to_csv(args.out, index=False, float_format="%.17g", lineterminator="\n")
    family = audit[audit["model"].isin(SSD_FAMILY)]
    failed = family[~family["dominates"]]
    print(f"checked {len(audit)} portfolios; {len(failed)} SSD-constrained portfolios fail to dominate")
    for _, r in failed.iterrows():
        print(f"  window {r.window_id} {r.model}: worst gap {r.worst_gap:.3g}")
    return EXIT_OK if failed.empty else EXIT_FAIL


# -------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssdfolio", description="SSD-constrained portfolio backtests")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--n-assets", type=int, default=24)
    p.add_argument("--n-sectors", type=int, default=6)
    p.add_argument("--weeks", type=int, default=200)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--start", default="2014-04-04")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="PCA loadings and dominant-ratio reports")
    _add_config_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("backtest", help="rolling-window backtest")
    _add_config_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_backtest)

    p = sub.add_parser("phases", help="market-phase backtest")
    _add_config_flags(p)
    p.add_argument("--phase", action="append", help="name:start:end (repeatable)")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_phases)

    p = sub.add_parser("verify", help="dominance audit of a saved weights file")
    _add_config_flags(p)
    p.add_argument("--phase", action="append", help="name:start:end (repeatable)")
    p.add_argument("--weights", required=True)
    p.add_argument("--out", help="write the audit CSV here")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except SsdfolioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
