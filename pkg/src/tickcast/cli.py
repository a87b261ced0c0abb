"""Command line: ``tickcast run | bench | oracle``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, load_config, parse_synthetic
from .data import gen_synthetic, load_ticks
from .engine import bench, run
from .errors import TickcastError
from .report import emit, plot_svg


def _run(args) -> int:
    overrides = {
        "input": args.input, "synthetic": args.synthetic, "out": args.out,
        "feature_set": args.feature_set, "folds": args.folds, "window": args.window,
        "seed": args.seed, "plot": args.plot or None,
    }
    for item in args.set or ():
        k, sep, v = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        overrides[k.strip()] = v.strip()
    cfg = load_config(args.config, overrides)
    pcfg = cfg.pipeline()
    if bool(cfg["input"]) == bool(cfg["synthetic"]):
        raise ConfigError("exactly one of --input or --synthetic is required")
    if cfg["input"]:
        series = load_ticks(cfg["input"])
    else:
        spec = parse_synthetic(cfg["synthetic"])
        series = gen_synthetic(spec, min_events=pcfg.window.window_len + pcfg.folds)
    result = run(series, pcfg)
    extra = {"symbol": series.symbol, "n_events": len(series), "n_crossed": series.n_crossed}
    if pcfg.window.step > 1:
        extra["note"] = f"models refitted every {pcfg.window.step} events (stride > 1)"
    paths = emit(result, cfg["out"], cfg.echo(), extra)
    if cfg["plot"]:
        plot_svg(result.trace, Path(cfg["out"]) / "forecast.svg")
    for m, met in result.report.overall.items():
        print(f"{m:9s} test RMSE {met.rmse_test:.6g}  RRMSE {met.rrmse_test:.6g}  train RMSE {met.rmse_train:.6g}")
    print(f"regime changes: {result.report.regime_changes}; outputs in {paths['report'].parent}")
    return 0


def _bench(args) -> int:
    from .engine import PipelineConfig
    from .lob import WindowPlan

    cfg = PipelineConfig(feature_set=args.feature_set, window=WindowPlan(args.window))
    stats = bench(cfg, n_steps=args.steps, seed=args.seed)
    print(json.dumps(stats, indent=2))
    ok = stats["median_ms"] <= args.budget_ms
    print(f"median step {stats['median_ms']:.2f} ms vs budget {args.budget_ms} ms: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def _oracle(args) -> int:
    from .oracles import run_all

    results = run_all(trials=args.trials, seed=args.seed)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tickcast", description="Tick-by-tick mid-price forecasting engine")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the online protocol on a tick file or synthetic series")
    src = r.add_mutually_exclusive_group()
    src.add_argument("--input", metavar="PATH")
    src.add_argument("--synthetic", metavar="SPEC", help="e.g. ar1:n=3000,phi=0.95,noise=0.01,seed=1")
    r.add_argument("--config", metavar="FILE", help="flat key = value file")
    r.add_argument("--feature-set", choices=["simple", "extended"])
    r.add_argument("--folds", type=int)
    r.add_argument("--window", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--out", metavar="DIR")
    r.add_argument("--plot", action="store_true", help="also write forecast.svg")
    r.add_argument("--set", action="append", metavar="KEY=VALUE", help="any config key")
    r.set_defaults(func=_run)

    b = sub.add_parser("bench", help="median per-event step time")
    b.add_argument("--feature-set", choices=["simple", "extended"], default="extended")
    b.add_argument("--window", type=int, default=100)
    b.add_argument("--steps", type=int, default=200)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--budget-ms", type=float, default=50.0)
    b.set_defaults(func=_bench)

    o = sub.add_parser("oracle", help="brute-force verification suite")
    o.add_argument("--trials", type=int, default=100)
    o.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (TickcastError, OSError) as exc:
        print(f"tickcast: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
