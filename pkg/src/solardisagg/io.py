"""File formats: time-series CSV, wide weather CSV, JSON configs and reports.

Canonical time-series CSV: header ``timestamp,<unit>`` with a lowercase
unit token, ISO-8601 UTC timestamps (``2018-06-01T00:00:00Z``),
6-decimal fixed-point values, ``\\n`` line endings. Re-writing a
canonical file reproduces it byte for byte. The wide weather CSV uses
the fixed header ``timestamp,temp_c,wind_ms,dni,dhi,ghi``.

Eval-report CSV is flat with column order ``home,trial,metric,value``,
one row per home x trial x metric.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .disagg import DisaggConfig
from .errors import ConfigError, ParseError, UnitUnknown
from .metrics import EvalReport, ProxySetting, ProxyVariant
from .pvmodel import PvParams, WeatherBundle
from .scenario import HomeTruth, NoiseConfig, ScenarioBundle
from .timeseries import SiteLocation, TimeSeries, Unit, from_samples

TIMESTAMP_FMT = "%Y-%m-%dT%H:%M:%SZ"

_UNIT_TOKENS = {u.value: u for u in Unit}

REPORT_CSV_COLUMNS = ("home", "trial", "metric", "value")
REPORT_CSV_METRICS = ("solar_nrmse", "solar_rmse", "load_nrmse", "load_rmse",
                      "iterations", "converged")

WEATHER_CSV_HEADER = "timestamp,temp_c,wind_ms,dni,dhi,ghi"
_WEATHER_UNITS = (Unit.DEG_C, Unit.M_PER_S, Unit.W_PER_M2, Unit.W_PER_M2,
                  Unit.W_PER_M2)


def parse_timestamp(token: str) -> datetime:
    try:
        return datetime.fromisoformat(token.replace("Z", "+00:00")) \
            .astimezone(timezone.utc)
    except ValueError as exc:
        raise ValueError(f"bad timestamp {token!r}") from exc


def format_timestamp(t: datetime) -> str:
    return t.astimezone(timezone.utc).strftime(TIMESTAMP_FMT)


def read_timeseries_csv(path: str | Path) -> TimeSeries:
    """Parse one canonical series file; repairs small gaps on ingest."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise ParseError(f"{path}: empty file")
    header = [h.strip() for h in lines[0].split(",")]
    if len(header) != 2 or header[0].lower() != "timestamp":
        raise ParseError(f"{path}:1: header must be 'timestamp,<unit>'")
    unit_token = header[1].lower()
    if unit_token not in _UNIT_TOKENS:
        raise UnitUnknown(
            f"{path}:1: unknown unit {header[1]!r}; "
            f"expected one of {sorted(_UNIT_TOKENS)}"
        )
    samples: list[tuple[datetime, float]] = []
    seen: dict[datetime, int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"{path}:{lineno}: expected 2 fields, got {len(parts)}")
        try:
            t = parse_timestamp(parts[0].strip())
        except ValueError:
            raise ParseError(f"{path}:{lineno}: bad timestamp {parts[0]!r}")
        try:
            v = float(parts[1])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: bad value {parts[1]!r}")
        if not np.isfinite(v):
            raise ParseError(f"{path}:{lineno}: non-finite value {parts[1]!r}")
        if t in seen:
            raise ParseError(
                f"{path}:{lineno}: duplicate timestamp {parts[0].strip()} "
                f"(first seen on line {seen[t]})"
            )
        seen[t] = lineno
        samples.append((t, v))
    if not samples:
        raise ParseError(f"{path}: no data rows")
    return from_samples(samples, _UNIT_TOKENS[unit_token])


def write_timeseries_csv(series: TimeSeries, path: str | Path) -> None:
    path = Path(path)
    rows = [f"timestamp,{series.unit.value}"]
    step = series.step
    t = series.start
    for v in series.values:
        rows.append(f"{format_timestamp(t)},{v:.6f}")
        t = t + step
    path.write_text("\n".join(rows) + "\n")


def read_weather_csv(path: str | Path) -> WeatherBundle:
    """Parse the wide weather CSV into an aligned bundle."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise ParseError(f"{path}: empty file")
    if lines[0].strip().lower() != WEATHER_CSV_HEADER:
        raise ParseError(f"{path}:1: header must be '{WEATHER_CSV_HEADER}'")
    per_channel: list[list[tuple[datetime, float]]] = [[] for _ in range(5)]
    seen: dict[datetime, int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise ParseError(f"{path}:{lineno}: expected 6 fields, got {len(parts)}")
        try:
            t = parse_timestamp(parts[0].strip())
        except ValueError:
            raise ParseError(f"{path}:{lineno}: bad timestamp {parts[0]!r}")
        if t in seen:
            raise ParseError(
                f"{path}:{lineno}: duplicate timestamp {parts[0].strip()} "
                f"(first seen on line {seen[t]})"
            )
        seen[t] = lineno
        try:
            vals = [float(p) for p in parts[1:]]
        except ValueError:
            raise ParseError(f"{path}:{lineno}: bad numeric field")
        for ch, v in zip(per_channel, vals):
            ch.append((t, v))
    if not per_channel[0]:
        raise ParseError(f"{path}: no data rows")
    series = [from_samples(ch, unit) for ch, unit in zip(per_channel, _WEATHER_UNITS)]
    return WeatherBundle(temp=series[0], wind=series[1], dni=series[2],
                         dhi=series[3], ghi=series[4])


def write_weather_csv(weather: WeatherBundle, path: str | Path) -> None:
    temp, wind, dni, dhi, ghi = weather.require("temp", "wind", "dni", "dhi", "ghi")
    rows = [WEATHER_CSV_HEADER]
    step = temp.step
    t = temp.start
    for i in range(len(temp)):
        rows.append(
            f"{format_timestamp(t)},{temp.values[i]:.6f},{wind.values[i]:.6f},"
            f"{dni.values[i]:.6f},{dhi.values[i]:.6f},{ghi.values[i]:.6f}"
        )
        t = t + step
    Path(path).write_text("\n".join(rows) + "\n")


def write_json(payload: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def pv_params_to_dict(p: PvParams) -> dict:
    return {
        "tilt": p.tilt,
        "orientation": p.orientation,
        "dc_rating": p.dc_rating,
        "gamma": p.gamma,
        "e_ref": p.e_ref,
        "t_ref": p.t_ref,
    }


def pv_params_from_dict(d: dict) -> PvParams:
    return PvParams(
        tilt=float(d["tilt"]),
        orientation=float(d["orientation"]),
        dc_rating=float(d["dc_rating"]),
        gamma=float(d.get("gamma", -0.0047)),
        e_ref=float(d.get("e_ref", 1000.0)),
        t_ref=float(d.get("t_ref", 25.0)),
    )


def write_report_json(report: EvalReport, path: str | Path) -> None:
    write_json(report.to_json_dict(), path)


def write_report_csv(report: EvalReport, path: str | Path) -> None:
    """Flat CSV, one row per home x trial x metric."""
    rows = [",".join(REPORT_CSV_COLUMNS)]
    for rec in report.records:
        values = {
            "solar_nrmse": rec.solar_nrmse,
            "solar_rmse": rec.solar_rmse,
            "load_nrmse": rec.load_nrmse,
            "load_rmse": rec.load_rmse,
            "iterations": float(rec.iterations),
            "converged": float(rec.converged),
        }
        for metric in REPORT_CSV_METRICS:
            rows.append(f"{rec.home},{rec.trial},{metric},{values[metric]:.9g}")
    Path(path).write_text("\n".join(rows) + "\n")


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration for the init-weights and run commands."""

    location: SiteLocation
    net_load: Path
    weather: Path
    proxies: tuple[Path, ...]
    setting: ProxySetting
    disagg: DisaggConfig
    percentile: float | None
    output_dir: Path


def parse_variant(token: str) -> ProxyVariant:
    try:
        return ProxyVariant(token.lower())
    except ValueError:
        raise ConfigError(
            f"unknown proxy setting {token!r}; expected one of "
            f"{[v.value for v in ProxyVariant]}"
        )


def load_run_config(path: str | Path, seed_override: int | None = None,
                    output_override: str | None = None) -> RunConfig:
    """Load and validate a run configuration JSON.

    Relative paths resolve against the config file's directory. The
    proxy-file count must equal the real-proxy count of the setting.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})")
    base = path.parent

    try:
        loc_raw = raw["location"]
        loc = SiteLocation(float(loc_raw["latitude"]), float(loc_raw["longitude"]),
                           float(loc_raw.get("utc_offset", 0.0)))
        variant = parse_variant(str(raw["setting"]))
        net_load = base / raw["net_load"]
        weather = base / raw["weather"]
        proxies = tuple(base / p for p in raw.get("proxies", []))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}")

    synth = raw.get("synthetic", {})
    orientations = synth.get("orientations_deg")
    setting = ProxySetting(
        variant=variant,
        tilt_deg=synth.get("tilt_deg"),
        dc_rating_kw=float(synth.get("dc_rating_kw", 3.0)),
        orientations_deg=tuple(orientations) if orientations else None,
    )
    if len(proxies) != setting.n_real:
        raise ConfigError(
            f"setting {variant.value} needs exactly {setting.n_real} "
            f"real proxy files, config lists {len(proxies)}"
        )
    for f in (net_load, weather, *proxies):
        if not f.exists():
            raise ConfigError(f"referenced file {f} does not exist")

    seed = int(raw.get("seed", 0)) if seed_override is None else int(seed_override)
    disagg = DisaggConfig(
        max_iterations=int(raw.get("max_iterations", 100)),
        epsilon=float(raw.get("epsilon", 1e-3)),
        master_seed=seed,
    )
    out_dir = Path(output_override) if output_override is not None \
        else base / raw.get("output_dir", "out")
    percentile = raw.get("percentile")
    return RunConfig(
        location=loc,
        net_load=net_load,
        weather=weather,
        proxies=proxies,
        setting=setting,
        disagg=disagg,
        percentile=None if percentile is None else float(percentile),
        output_dir=out_dir,
    )


def export_scenario(bundle: ScenarioBundle, out_dir: str | Path) -> list[Path]:
    """Write a scenario directory: metadata JSON, weather CSV, per-home CSVs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    meta = {
        "seed": bundle.seed,
        "step_minutes": bundle.step_minutes,
        "start": format_timestamp(bundle.grid().start),
        "location": {
            "latitude": bundle.location.latitude,
            "longitude": bundle.location.longitude,
            "utc_offset": bundle.location.utc_offset,
        },
        "homes": [
            {"name": h.name, "params": pv_params_to_dict(h.params)}
            for h in bundle.homes
        ],
    }
    meta_path = out_dir / "scenario.json"
    write_json(meta, meta_path)
    written.append(meta_path)

    weather_path = out_dir / "weather.csv"
    write_weather_csv(bundle.weather, weather_path)
    written.append(weather_path)

    for home in bundle.homes:
        home_dir = out_dir / "homes" / home.name
        home_dir.mkdir(parents=True, exist_ok=True)
        for stem, series in (("net", home.net), ("solar", home.true_solar),
                             ("load", home.true_load)):
            p = home_dir / f"{stem}.csv"
            write_timeseries_csv(series, p)
            written.append(p)
    return written


def load_scenario(scenario_dir: str | Path) -> ScenarioBundle:
    """Read a scenario directory back into a bundle."""
    scenario_dir = Path(scenario_dir)
    meta_path = scenario_dir / "scenario.json"
    if not meta_path.exists():
        raise ConfigError(f"{scenario_dir} is not a scenario directory "
                          f"(missing scenario.json)")
    meta = read_json(meta_path)
    loc = SiteLocation(
        float(meta["location"]["latitude"]),
        float(meta["location"]["longitude"]),
        float(meta["location"].get("utc_offset", 0.0)),
    )
    weather = read_weather_csv(scenario_dir / "weather.csv")
    homes = []
    for entry in meta["homes"]:
        home_dir = scenario_dir / "homes" / entry["name"]
        net = read_timeseries_csv(home_dir / "net.csv")
        solar = read_timeseries_csv(home_dir / "solar.csv")
        load = read_timeseries_csv(home_dir / "load.csv")
        homes.append(HomeTruth(
            name=entry["name"],
            params=pv_params_from_dict(entry["params"]),
            true_load=load,
            true_solar=solar,
            net=net,
        ))
    return ScenarioBundle(
        location=loc,
        weather=weather,
        homes=tuple(homes),
        seed=int(meta.get("seed", 0)),
        noise=NoiseConfig(),
    )


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    digest.update(Path(path).read_bytes())
    return digest.hexdigest()


def write_manifest(manifest_path: str | Path, command: str, config: dict,
                   outputs: list[Path]) -> Path:
    """Record command, config and output hashes; content is deterministic."""
    manifest_path = Path(manifest_path)
    base = manifest_path.parent
    manifest = {
        "command": command,
        "config": config,
        "outputs": {
            str(p.relative_to(base) if p.is_relative_to(base) else p):
                sha256_file(p)
            for p in sorted(outputs)
        },
    }
    write_json(manifest, manifest_path)
    return manifest_path
