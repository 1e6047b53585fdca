"""Command-line interface.

Subcommands cover the whole pipeline: ``synth-proxy``,
``estimate-params``, ``init-weights``, ``run``, ``eval``, ``simulate``
and ``benchmark``. Exit codes: 0 success, 1 usage or configuration
error, 2 data error, 3 non-convergence. Every command writes a
manifest JSON with the resolved configuration and SHA-256 hashes of its
outputs; set DISAGG_LOG to a logging level name for diagnostics.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from datetime import timezone
from pathlib import Path

from . import io as dio
from .disagg import DisaggConfig, disaggregate
from .errors import DataError, NonConvergence, UsageError
from .loadmodel import build_features
from .metrics import (
    EvalReport,
    ProxySetting,
    compare_initializations,
    nrmse,
    rmse,
    run_benchmark,
    sweep_length,
)
from .params import fit_pv_params, hemisphere_of
from .pipeline import initialize_weights
from .plots import save_box_plot, save_line_plot
from .pvmodel import PvParams
from .scenario import DEFAULT_START, NoiseConfig, generate_scenario
from .timeseries import SiteLocation, align, upsample_linear

log = logging.getLogger("solardisagg")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        raise UsageError(message)


def _location_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lat", type=float, required=True, help="site latitude [deg]")
    p.add_argument("--lon", type=float, required=True, help="site longitude [deg]")
    p.add_argument("--utc-offset", type=float, default=0.0,
                   help="local clock offset from UTC [h]")


def _loc(args) -> SiteLocation:
    return SiteLocation(args.lat, args.lon, args.utc_offset)


def _build_parser() -> _Parser:
    parser = _Parser(prog="solardisagg",
                     description="Behind-the-meter solar disaggregation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-proxy",
                       help="simulate PV generation from weather")
    p.add_argument("--weather", required=True, help="wide weather CSV")
    _location_args(p)
    p.add_argument("--tilt", type=float, required=True)
    p.add_argument("--orientation", type=float, required=True,
                   help="surface azimuth, degrees clockwise from north")
    p.add_argument("--dc-rating", type=float, required=True, help="kW")
    p.add_argument("--gamma", type=float, default=-0.0047)
    p.add_argument("--e-ref", type=float, default=1000.0)
    p.add_argument("--t-ref", type=float, default=25.0)
    p.add_argument("--out", required=True, help="output generation CSV")

    p = sub.add_parser("estimate-params",
                       help="estimate PV deployment parameters from generation")
    p.add_argument("--gen", required=True, help="generation CSV")
    p.add_argument("--weather", required=True, help="wide weather CSV")
    _location_args(p)
    p.add_argument("--hemisphere", choices=["north", "south", "auto"],
                   default="auto")
    p.add_argument("--out", required=True, help="output parameter JSON")

    p = sub.add_parser("init-weights",
                       help="initialize mixture weights for a target home")
    p.add_argument("--config", required=True, help="run configuration JSON")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output weights JSON")

    p = sub.add_parser("run", help="full disaggregation for one home")
    p.add_argument("--config", required=True, help="run configuration JSON")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", default=None)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--pred-solar", required=True)
    p.add_argument("--truth-solar", required=True)
    p.add_argument("--pred-load", default=None)
    p.add_argument("--truth-load", default=None)
    p.add_argument("--out", required=True, help="output metrics JSON")

    p = sub.add_parser("simulate", help="generate a ground-truth scenario")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--homes", type=int, default=20)
    p.add_argument("--days", type=int, default=30)
    p.add_argument("--step", type=int, default=30, help="minutes per interval")
    _location_args(p)
    p.add_argument("--start", default=None, help="ISO UTC start timestamp")
    p.add_argument("--noiseless", action="store_true",
                   help="clear sky, no stochastic terms")
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("benchmark",
                       help="evaluate proxy settings on a scenario directory")
    p.add_argument("--scenario", required=True, help="simulate output directory")
    p.add_argument("--setting", required=True,
                   help="3proxies | 1p+1sp | 1p+3sp | 3sp")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iterations", type=int, default=100)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--lengths", default=None,
                   help="comma-separated block lengths for a sweep")
    p.add_argument("--compare-inits", action="store_true",
                   help="compare ours/constant/random weight initialization")
    p.add_argument("--out-dir", required=True)
    return parser


def _cmd_synth_proxy(args) -> int:
    weather = dio.read_weather_csv(args.weather)
    params = PvParams(tilt=args.tilt, orientation=args.orientation,
                      dc_rating=args.dc_rating, gamma=args.gamma,
                      e_ref=args.e_ref, t_ref=args.t_ref)
    from .pvmodel import synthesize_proxy

    series = synthesize_proxy(params, _loc(args), weather)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    dio.write_timeseries_csv(series, out)
    dio.write_manifest(
        out.parent / f"{out.stem}.manifest.json", "synth-proxy",
        {"weather": str(args.weather), "tilt": args.tilt,
         "orientation": args.orientation, "dc_rating": args.dc_rating,
         "gamma": args.gamma, "e_ref": args.e_ref, "t_ref": args.t_ref,
         "lat": args.lat, "lon": args.lon, "utc_offset": args.utc_offset},
        [out],
    )
    print(f"wrote {out}")
    return 0


def _cmd_estimate_params(args) -> int:
    gen = dio.read_timeseries_csv(args.gen)
    weather = dio.read_weather_csv(args.weather)
    loc = _loc(args)
    gen_a, ambient = align([gen, weather.require("temp")[0]])
    hemisphere = hemisphere_of(loc) if args.hemisphere == "auto" else args.hemisphere
    params = fit_pv_params(gen_a, loc, ambient, hemisphere)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    dio.write_json(dio.pv_params_to_dict(params), out)
    dio.write_manifest(
        out.parent / f"{out.stem}.manifest.json", "estimate-params",
        {"gen": str(args.gen), "weather": str(args.weather),
         "hemisphere": hemisphere, "lat": args.lat, "lon": args.lon,
         "utc_offset": args.utc_offset},
        [out],
    )
    print(f"tilt={params.tilt:.1f} orientation={params.orientation:.1f} "
          f"dc_rating={params.dc_rating:.3f}")
    return 0


def _load_inputs(cfg: dio.RunConfig):
    net = dio.read_timeseries_csv(cfg.net_load)
    weather = dio.read_weather_csv(cfg.weather)
    proxies = [dio.read_timeseries_csv(p) for p in cfg.proxies]
    channels = list(weather.require("temp", "wind", "dni", "dhi", "ghi"))

    # coarser weather/proxy feeds are interpolated down to meter resolution
    def to_net_step(series):
        if series.step_minutes > net.step_minutes \
                and series.step_minutes % net.step_minutes == 0:
            log.info("upsampling %s series from %d to %d minutes",
                     series.unit.value, series.step_minutes, net.step_minutes)
            return upsample_linear(series, net.step_minutes)
        return series

    channels = [to_net_step(c) for c in channels]
    proxies = [to_net_step(p) for p in proxies]
    aligned = align([net, *channels, *proxies])
    net = aligned[0]
    from .pvmodel import WeatherBundle

    weather = WeatherBundle(temp=aligned[1], wind=aligned[2], dni=aligned[3],
                            dhi=aligned[4], ghi=aligned[5])
    return net, weather, list(aligned[6:])


def _weights_payload(init) -> dict:
    return {
        "weights": [float(w) for w in init.weights.weights],
        "provenance": list(init.proxies.provenance),
        "base_load_kw": init.base_load.value,
        "night_intervals": init.base_load.night_interval_count,
        "target_params": dio.pv_params_to_dict(init.target_params),
        "proxy_params": [dio.pv_params_to_dict(p) for p in init.proxy_params],
    }


def _cmd_init_weights(args) -> int:
    cfg = dio.load_run_config(args.config, seed_override=args.seed)
    net, weather, proxies = _load_inputs(cfg)
    init = initialize_weights(net, cfg.location, weather, proxies,
                              cfg.setting.synthetic_params(cfg.location),
                              percentile=cfg.percentile)
    out = Path(args.out) if args.out else cfg.output_dir / "weights.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    dio.write_json(_weights_payload(init), out)
    dio.write_manifest(
        out.parent / f"{out.stem}.manifest.json", "init-weights",
        {"config": str(args.config), "seed": cfg.disagg.master_seed},
        [out],
    )
    print(f"wrote {out}")
    return 0


def _cmd_run(args) -> int:
    cfg = dio.load_run_config(args.config, seed_override=args.seed,
                              output_override=args.out_dir)
    net, weather, proxies = _load_inputs(cfg)
    init = initialize_weights(net, cfg.location, weather, proxies,
                              cfg.setting.synthetic_params(cfg.location),
                              percentile=cfg.percentile)
    features = build_features(weather.temp, cfg.location)
    result = disaggregate(net, init.proxies, init.weights, features,
                          cfg.disagg, cfg.location)
    out_dir = cfg.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    solar_path = out_dir / "solar.csv"
    load_path = out_dir / "load.csv"
    diag_path = out_dir / "diagnostics.json"
    dio.write_timeseries_csv(result.solar, solar_path)
    dio.write_timeseries_csv(result.load, load_path)
    diagnostics = {
        "seed": cfg.disagg.master_seed,
        "setting": cfg.setting.variant.value,
        "iterations": result.iterations,
        "converged": result.converged,
        "weights": [float(w) for w in result.weights.weights],
        "weight_trajectory": [[float(w) for w in stage]
                              for stage in result.weight_trajectory],
        "residuals": list(result.residuals),
        "init": _weights_payload(init),
    }
    dio.write_json(diagnostics, diag_path)
    dio.write_manifest(
        out_dir / "manifest.json", "run",
        {"config": str(args.config), "seed": cfg.disagg.master_seed,
         "setting": cfg.setting.variant.value,
         "max_iterations": cfg.disagg.max_iterations,
         "epsilon": cfg.disagg.epsilon},
        [solar_path, load_path, diag_path],
    )
    print(f"converged={result.converged} iterations={result.iterations} "
          f"-> {out_dir}")
    return 0


def _cmd_eval(args) -> int:
    if (args.pred_load is None) != (args.truth_load is None):
        raise UsageError("--pred-load and --truth-load go together")
    pred_solar = dio.read_timeseries_csv(args.pred_solar)
    truth_solar = dio.read_timeseries_csv(args.truth_solar)
    ps, ts = align([pred_solar, truth_solar])
    metrics = {"solar": {"nrmse": nrmse(ts, ps), "rmse": rmse(ts, ps)}}
    if args.pred_load is not None:
        pl, tl = align([dio.read_timeseries_csv(args.pred_load),
                        dio.read_timeseries_csv(args.truth_load)])
        metrics["load"] = {"nrmse": nrmse(tl, pl), "rmse": rmse(tl, pl)}
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    dio.write_json(metrics, out)
    dio.write_manifest(
        out.parent / f"{out.stem}.manifest.json", "eval",
        {"pred_solar": str(args.pred_solar),
         "truth_solar": str(args.truth_solar)},
        [out],
    )
    print(f"solar nRMSE={metrics['solar']['nrmse']:.4f} "
          f"RMSE={metrics['solar']['rmse']:.4f}")
    return 0


def _cmd_simulate(args) -> int:
    start = dio.parse_timestamp(args.start) if args.start else DEFAULT_START
    noise = NoiseConfig.zeroed() if args.noiseless else NoiseConfig()
    bundle = generate_scenario(
        seed=args.seed, n_homes=args.homes, days=args.days,
        step_minutes=args.step, loc=_loc(args), noise=noise,
        start=start.astimezone(timezone.utc),
    )
    out_dir = Path(args.out_dir)
    written = dio.export_scenario(bundle, out_dir)
    dio.write_manifest(
        out_dir / "manifest.json", "simulate",
        {"seed": args.seed, "homes": args.homes, "days": args.days,
         "step": args.step, "lat": args.lat, "lon": args.lon,
         "utc_offset": args.utc_offset, "noiseless": args.noiseless,
         "start": dio.format_timestamp(start)},
        written,
    )
    print(f"wrote scenario with {args.homes} homes to {out_dir}")
    return 0


def _report_outputs(report: EvalReport, out_dir: Path, stem: str) -> list[Path]:
    json_path = out_dir / f"{stem}.json"
    csv_path = out_dir / f"{stem}.csv"
    dio.write_report_json(report, json_path)
    dio.write_report_csv(report, csv_path)
    return [json_path, csv_path]


def _cmd_benchmark(args) -> int:
    scenario = dio.load_scenario(args.scenario)
    setting = ProxySetting(variant=dio.parse_variant(args.setting))
    config = DisaggConfig(max_iterations=args.max_iterations,
                          epsilon=args.epsilon, master_seed=args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    if args.lengths:
        lengths = [int(tok) for tok in args.lengths.split(",") if tok.strip()]
        reports = sweep_length(scenario, lengths, setting, args.seed, config)
        mean_curve = []
        for length in lengths:
            written += _report_outputs(reports[length], out_dir,
                                       f"report_T{length}")
            mean_curve.append(reports[length].summary()["solar_nrmse_mean"])
        line_path = out_dir / "length_sweep.svg"
        save_line_plot(lengths, {setting.variant.value: mean_curve},
                       "disaggregation length [intervals]",
                       "mean solar nRMSE", line_path,
                       title="error vs disaggregation length")
        written.append(line_path)
        summary = {str(length): reports[length].summary()["solar_nrmse_mean"]
                   for length in lengths}
    elif args.compare_inits:
        reports = compare_initializations(scenario, setting, args.seed,
                                          trials=args.trials, config=config)
        groups = {}
        for mode, report in reports.items():
            written += _report_outputs(report, out_dir, f"report_{mode}")
            groups[mode] = [stats["solar_nrmse"]
                            for stats in report.per_home().values()]
        box_path = out_dir / "init_comparison_box.svg"
        save_box_plot(groups, "per-home mean solar nRMSE", box_path,
                      title=f"{setting.variant.value}: initialization comparison")
        written.append(box_path)
        summary = {mode: report.summary()["solar_nrmse_mean"]
                   for mode, report in reports.items()}
    else:
        report = run_benchmark(scenario, setting, args.trials, args.seed, config)
        written += _report_outputs(report, out_dir, "report")
        per_home = report.per_home()
        groups = {
            "solar": [stats["solar_nrmse"] for stats in per_home.values()],
            "load": [stats["load_nrmse"] for stats in per_home.values()],
        }
        box_path = out_dir / "nrmse_box.svg"
        save_box_plot(groups, "per-home mean nRMSE", box_path,
                      title=f"{setting.variant.value}: {args.trials} trials")
        written.append(box_path)
        summary = report.summary()

    dio.write_manifest(
        out_dir / "manifest.json", "benchmark",
        {"scenario": str(args.scenario), "setting": args.setting,
         "trials": args.trials, "seed": args.seed,
         "max_iterations": args.max_iterations, "epsilon": args.epsilon,
         "lengths": args.lengths, "compare_inits": args.compare_inits},
        written,
    )
    for key, value in summary.items():
        if isinstance(value, float):
            print(f"{key}: {value:.4f}")
        else:
            print(f"{key}: {value}")
    return 0


_HANDLERS = {
    "synth-proxy": _cmd_synth_proxy,
    "estimate-params": _cmd_estimate_params,
    "init-weights": _cmd_init_weights,
    "run": _cmd_run,
    "eval": _cmd_eval,
    "simulate": _cmd_simulate,
    "benchmark": _cmd_benchmark,
}


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("DISAGG_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NonConvergence as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
