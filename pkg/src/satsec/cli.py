"""Experiment runner: TOML scenario configs to CSV metric sweeps.

Config units are presentation-friendly (degrees, dBm, km); everything in
the CSV is linear. One row is written per (sweep value, method, metric),
with confidence intervals and seeds filled only on Monte-Carlo rows.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from satsec import approx as ap
from satsec import montecarlo as mc
from satsec import secrecy as sec
from satsec.channel import FadingParams, SystemParams, db_to_linear, dbm_to_watts
from satsec.pointprocess import four_case_probabilities
from satsec.snrdist import Scenario, make_scenario

CSV_HEADER = "sweep_var,sweep_value,method,metric,value,ci_halfwidth,n_trials,seed"

SWEEP_VARIABLES = ("a_e", "a_s", "N", "P_dBm", "R_t", "delta_omega_sb", "theta_s")
METHODS = ("exact", "approx", "asymptotic", "mc")
METRICS = ("c_erg", "p_out", "c_out", "cases")

_SYSTEM_DEFAULTS: dict[str, Any] = {
    "r_km": 6378.0, "alpha": 2.0, "c_m_s": 3.0e8, "f_c_hz": 2.0e9,
    "bandwidth_hz": 1.0e6, "p_dbm": 23.0, "n0_dbm_hz": -174.0,
    "g_t_dbi": 0.0, "g_r_ml_dbi": 30.0, "g_r_sl_dbi": 10.0,
    "omega_th_deg": 40.0, "delta_omega_sb_deg": 0.0, "beam_mode": "fixed",
}
_FADING_DEFAULTS = {"b": 0.126, "m": 10.1, "omega": 0.835}
_SERVING_DEFAULTS = {"a_s_km": 600.0, "theta_s_deg": 60.0}
_SWEEP_DEFAULTS: dict[str, Any] = {
    "methods": ["exact"], "metrics": ["c_erg"], "r_t": 3.0,
    "epsilon": 0.1, "mc_trials": 100_000, "seed": 1234,
}


class ConfigError(ValueError):
    """Configuration failed validation; maps to exit code 2."""


def _check_keys(section: str, data: dict, allowed: set[str]) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(unknown)}")


def _as_float(section: str, key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"[{section}] {key} must be a number, got {value!r}")
    return float(value)


def load_config(path: str) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def apply_overrides(cfg: dict, assignments: list[str]) -> None:
    """Apply --set key.path=value overrides onto the parsed config tree."""
    for item in assignments:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        path, raw = item.split("=", 1)
        node: Any = cfg
        parts = path.strip().split(".")
        for part in parts[:-1]:
            if isinstance(node, list):
                node = node[int(part)]
            else:
                node = node.setdefault(part, {})
        leaf = parts[-1]
        value = _parse_literal(raw.strip())
        if isinstance(node, list):
            node[int(leaf)] = value
        else:
            node[leaf] = value


def _parse_literal(raw: str) -> Any:
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    if raw.startswith("[") or raw.startswith('"'):
        return tomllib.loads(f"v = {raw}")["v"]
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


def validate_config(cfg: dict) -> dict:
    """Merge defaults, reject unknown keys, and range-check every field."""
    _check_keys("<root>", cfg, {"system", "fading", "serving", "layers", "sweep"})
    out: dict[str, Any] = {}

    system = {**_SYSTEM_DEFAULTS, **cfg.get("system", {})}
    _check_keys("system", system, set(_SYSTEM_DEFAULTS))
    if system["beam_mode"] not in ("fixed", "steerable"):
        raise ConfigError("beam_mode must be 'fixed' or 'steerable'")
    for key in _SYSTEM_DEFAULTS:
        if key != "beam_mode":
            system[key] = _as_float("system", key, system[key])
    if not 0.0 <= system["omega_th_deg"] < 90.0:
        raise ConfigError("omega_th_deg must be in [0, 90)")
    if system["delta_omega_sb_deg"] < 0.0:
        raise ConfigError("delta_omega_sb_deg must be >= 0")
    if system["alpha"] <= 0.0:
        raise ConfigError("alpha must be > 0")
    out["system"] = system

    fading = {**_FADING_DEFAULTS, **cfg.get("fading", {})}
    _check_keys("fading", fading, set(_FADING_DEFAULTS))
    for key in _FADING_DEFAULTS:
        fading[key] = _as_float("fading", key, fading[key])
        if fading[key] <= 0.0:
            raise ConfigError(f"fading {key} must be > 0")
    out["fading"] = fading

    serving = {**_SERVING_DEFAULTS, **cfg.get("serving", {})}
    _check_keys("serving", serving, set(_SERVING_DEFAULTS))
    for key in _SERVING_DEFAULTS:
        serving[key] = _as_float("serving", key, serving[key])
    if serving["a_s_km"] <= 0.0:
        raise ConfigError("a_s_km must be > 0")
    if not 0.0 <= serving["theta_s_deg"] <= 90.0:
        raise ConfigError("theta_s_deg must be in [0, 90]")
    out["serving"] = serving

    layers = cfg.get("layers", [{"n": 10, "a_e_km": 600.0}])
    if not isinstance(layers, list) or not layers:
        raise ConfigError("[[layers]] must list at least one layer")
    checked = []
    for i, layer in enumerate(layers):
        _check_keys(f"layers.{i}", layer, {"n", "a_e_km"})
        n = layer.get("n", 10)
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            raise ConfigError(f"layers.{i}.n must be an integer >= 0")
        a_e = _as_float(f"layers.{i}", "a_e_km", layer.get("a_e_km", 600.0))
        if a_e <= 0.0:
            raise ConfigError(f"layers.{i}.a_e_km must be > 0")
        checked.append({"n": n, "a_e_km": a_e})
    out["layers"] = checked

    sweep_in = cfg.get("sweep", {})
    sweep = {**_SWEEP_DEFAULTS, **sweep_in}
    _check_keys("sweep", sweep, set(_SWEEP_DEFAULTS) | {"variable", "grid"})
    if "variable" not in sweep or "grid" not in sweep:
        raise ConfigError("[sweep] requires 'variable' and 'grid'")
    if sweep["variable"] not in SWEEP_VARIABLES:
        raise ConfigError(
            f"sweep variable must be one of {', '.join(SWEEP_VARIABLES)}")
    grid = sweep["grid"]
    if not isinstance(grid, list) or not grid:
        raise ConfigError("sweep grid must be a nonempty list")
    sweep["grid"] = [_as_float("sweep", "grid", v) for v in grid]
    if sweep["variable"] == "N":
        for v in sweep["grid"]:
            if v != int(v) or v < 0:
                raise ConfigError("sweep grid for N must be integers >= 0")
    for name, allowed in (("methods", METHODS), ("metrics", METRICS)):
        values = sweep[name]
        if not isinstance(values, list) or not values:
            raise ConfigError(f"sweep {name} must be a nonempty list")
        bad = sorted(set(values) - set(allowed))
        if bad:
            raise ConfigError(f"unknown sweep {name}: {', '.join(bad)}")
    if "cases" in sweep["metrics"] and len(out["layers"]) > 1:
        raise ConfigError("the cases metric requires a single eavesdropper layer")
    sweep["r_t"] = _as_float("sweep", "r_t", sweep["r_t"])
    if sweep["r_t"] < 0.0:
        raise ConfigError("sweep r_t must be >= 0")
    sweep["epsilon"] = _as_float("sweep", "epsilon", sweep["epsilon"])
    if not 0.0 < sweep["epsilon"] < 1.0:
        raise ConfigError("sweep epsilon must be in (0, 1)")
    if not isinstance(sweep["mc_trials"], int) or sweep["mc_trials"] < 1:
        raise ConfigError("sweep mc_trials must be an integer >= 1")
    if not isinstance(sweep["seed"], int):
        raise ConfigError("sweep seed must be an integer")
    out["sweep"] = sweep
    return out


def _apply_sweep_value(cfg: dict, variable: str, value: float) -> dict:
    patched = {
        "system": dict(cfg["system"]),
        "fading": dict(cfg["fading"]),
        "serving": dict(cfg["serving"]),
        "layers": [dict(l) for l in cfg["layers"]],
        "sweep": dict(cfg["sweep"]),
    }
    if variable in ("a_e", "N") and len(patched["layers"]) != 1:
        raise ConfigError(f"sweeping {variable} requires exactly one layer")
    if variable == "a_e":
        patched["layers"][0]["a_e_km"] = value
    elif variable == "a_s":
        patched["serving"]["a_s_km"] = value
    elif variable == "N":
        patched["layers"][0]["n"] = int(value)
    elif variable == "P_dBm":
        patched["system"]["p_dbm"] = value
    elif variable == "R_t":
        patched["sweep"]["r_t"] = value
    elif variable == "delta_omega_sb":
        patched["system"]["delta_omega_sb_deg"] = value
    elif variable == "theta_s":
        patched["serving"]["theta_s_deg"] = value
    return patched


def build_scenario(cfg: dict) -> Scenario:
    s = cfg["system"]
    system = SystemParams(
        r_km=s["r_km"], alpha=s["alpha"], c_m_s=s["c_m_s"], f_c_hz=s["f_c_hz"],
        bandwidth_hz=s["bandwidth_hz"], tx_power_w=dbm_to_watts(s["p_dbm"]),
        noise_psd_w_hz=dbm_to_watts(s["n0_dbm_hz"]),
        g_t=db_to_linear(s["g_t_dbi"]), g_r_ml=db_to_linear(s["g_r_ml_dbi"]),
        g_r_sl=db_to_linear(s["g_r_sl_dbi"]),
        omega_th_rad=math.radians(s["omega_th_deg"]),
        delta_omega_sb_rad=math.radians(s["delta_omega_sb_deg"]))
    fading = FadingParams(**cfg["fading"])
    return make_scenario(
        system, fading, cfg["serving"]["a_s_km"],
        math.radians(cfg["serving"]["theta_s_deg"]),
        [(l["n"], l["a_e_km"]) for l in cfg["layers"]],
        beam_mode=s["beam_mode"])


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.12g}"


def _analytic_rows(scn: Scenario, method: str, metrics: list[str], r_t: float,
                   epsilon: float, workers: int | None) -> list[tuple[str, str, float]]:
    """(method, metric, value) rows for one non-MC method at one sweep point."""
    rows: list[tuple[str, str, float]] = []
    if method == "asymptotic":
        if "c_erg" in metrics:
            rows.append((method, "c_erg", ap.high_snr_characterization(scn).c_erg_inf))
        skipped = [m for m in metrics if m not in ("c_erg", "cases")]
        if skipped:
            print(f"note: asymptotic method provides c_erg only; "
                  f"skipping {', '.join(skipped)}", file=sys.stderr)
    else:
        want = {m: (m in metrics) for m in ("c_erg", "p_out", "c_out")}
        if any(want.values()):
            if method == "exact":
                engine: sec.MetricEngine = sec.ExactEvaluator(scn, workers=workers)
            else:
                engine = ap.PoissonEvaluator(scn, workers=workers)
            report = sec.build_report(engine, method,
                                      r_t if want["p_out"] else None,
                                      epsilon if want["c_out"] else None,
                                      want_c_erg=want["c_erg"])
            for metric in ("c_erg", "p_out", "c_out"):
                if want[metric]:
                    rows.append((method, metric, getattr(report, metric)))
    if "cases" in metrics:
        probs = four_case_probabilities(scn.single_layer, scn.system.r_km)
        rows.extend((method, f"case{i+1}", probs[i]) for i in range(4))
    return rows


def _mc_rows(scn: Scenario, metrics: list[str], r_t: float, epsilon: float,
             trials: int, seed: int, workers: int) -> list[tuple[str, str, float, float]]:
    result = mc.simulate_secrecy(scn, [r_t], trials, seed, workers)
    rows: list[tuple[str, str, float, float]] = []
    if "c_erg" in metrics:
        rows.append(("mc", "c_erg", result.mean_secrecy_rate, result.rate_ci_halfwidth))
    if "p_out" in metrics:
        rows.append(("mc", "p_out", float(result.outage_frequency[0]),
                     float(result.outage_ci_halfwidth[0])))
    if "c_out" in metrics:
        value, half = result.outage_capacity(epsilon)
        rows.append(("mc", "c_out", value, half))
    if "cases" in metrics:
        rows.extend(("mc", f"case{i+1}", float(result.case_frequencies[i]),
                     float(result.case_ci_halfwidth[i])) for i in range(4))
    return rows


def run_sweep(cfg: dict, workers: int) -> list[str]:
    """Evaluate the configured sweep and return CSV lines (header included)."""
    sweep = cfg["sweep"]
    variable = sweep["variable"]
    lines = [CSV_HEADER]
    for value in sweep["grid"]:
        point = _apply_sweep_value(cfg, variable, value)
        scn = build_scenario(point)
        r_t = point["sweep"]["r_t"]
        epsilon = point["sweep"]["epsilon"]
        methods = list(sweep["methods"])
        needs_engine = any(m in ("c_erg", "p_out", "c_out")
                           for m in sweep["metrics"])
        if "exact" in methods and needs_engine:
            n_tot = sum(l["n"] for l in point["layers"])
            if len(point["layers"]) > 1 or n_tot > sec.N_EXACT_CAP:
                methods = [m for m in methods if m != "exact"]
                substitute = "approx" not in methods
                reason = ("multiple layers" if len(point["layers"]) > 1
                          else f"N={n_tot} exceeds cap {sec.N_EXACT_CAP}")
                if substitute:
                    methods.insert(0, "approx")
                print(f"note: exact method invalid at {variable}={value:g} "
                      f"({reason}); using approx", file=sys.stderr)
        for method in methods:
            if method == "mc":
                rows = _mc_rows(scn, sweep["metrics"], r_t, epsilon,
                                sweep["mc_trials"], sweep["seed"], workers)
                lines.extend(
                    f"{variable},{value:.12g},{m},{metric},{_fmt(v)},{_fmt(ci)},"
                    f"{sweep['mc_trials']},{sweep['seed']}"
                    for m, metric, v, ci in rows)
            else:
                rows_a = _analytic_rows(scn, method, sweep["metrics"], r_t,
                                        epsilon, workers)
                lines.extend(
                    f"{variable},{value:.12g},{m},{metric},{_fmt(v)},,,"
                    for m, metric, v in rows_a)
    return lines


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="satsec",
        description="Secrecy-metric sweeps for satellite uplinks under "
                    "eavesdropper constellations")
    parser.add_argument("--config", required=True, help="TOML scenario config")
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--seed", type=int, help="override sweep seed")
    parser.add_argument("--trials", type=int, help="override MC trial count")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker hint (results are worker-invariant)")
    parser.add_argument("--method", help="comma-separated methods override")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="config override, repeatable")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        apply_overrides(cfg, args.overrides)
        cfg = validate_config(cfg)
        if args.seed is not None:
            cfg["sweep"]["seed"] = args.seed
        if args.trials is not None:
            if args.trials < 1:
                raise ConfigError("--trials must be >= 1")
            cfg["sweep"]["mc_trials"] = args.trials
        if args.method is not None:
            methods = [m.strip() for m in args.method.split(",") if m.strip()]
            bad = sorted(set(methods) - set(METHODS))
            if bad or not methods:
                raise ConfigError(f"invalid --method value: {args.method!r}")
            cfg["sweep"]["methods"] = methods
        lines = run_sweep(cfg, max(args.workers, 1))
    except (ConfigError, FileNotFoundError, tomllib.TOMLDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    with open(args.out, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
