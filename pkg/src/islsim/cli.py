"""Command-line entry point: design calculator, graph/matching dumps, single
experiments, multi-spec sweeps, and small-instance oracle comparisons.

Boundary units match the usual presentation (km, GHz, MHz, kbps, W) and are
converted to SI at parse time. Defaults reproduce the baseline evaluation
scenario, so ``islsim run --planes 7`` needs no further flags. The effective
merged configuration is echoed into the output directory next to a run
manifest for provenance.

Exit codes: 0 success, 1 configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import subprocess
import sys

import numpy as np

from . import __version__, allocation, design, linkbudget, matching, oracles
from .geometry import ConstellationConfig, build_constellation, max_doppler, propagate
from .graph import build_feasibility_graph
from .linkbudget import AccessScheme, Antenna, RadioConfig, ResourceSet
from .simharness import (
    DumpWriter,
    ExperimentSpec,
    SweepOutcome,
    allocation_sweep,
    run_experiment,
    sweep,
    write_ksweep,
    write_reports,
)

DEFAULTS = {
    "planes": 7,
    "sats_per_plane": 40,
    "base_altitude_km": 600.0,
    "delta_altitude_km": 10.0,
    "freq_ghz": 2.4,
    "bandwidth_mhz": 20.0,
    "noise_temp_k": 354.81,
    "eirpg_w": 3.74,
    "rmin_kbps": 10.0,
    "transceivers": 2,
    "matching": "giem",
    "allocation": "none",
    "resources": 1,
    "scheme": "ofdma",
    "antenna": "isotropic",
    "period_s": 30.0,
    "nsim": 1000,
    "seed": 1,
}

ANTENNA_FLAGS = {"narrow": Antenna.NARROW_BEAM, "isotropic": Antenna.ISOTROPIC}
ALLOCATION_FLAGS = {"gra": "gra", "rr": "round_robin", "random": "random", "none": "none"}


class ConfigError(Exception):
    pass


def _add_spec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--planes", type=int)
    p.add_argument("--sats-per-plane", type=int)
    p.add_argument("--base-altitude-km", type=float)
    p.add_argument("--delta-altitude-km", type=float)
    p.add_argument("--freq-ghz", type=float)
    p.add_argument("--bandwidth-mhz", type=float)
    p.add_argument("--noise-temp-k", type=float)
    p.add_argument("--eirpg-w", type=float)
    p.add_argument("--rmin-kbps", type=float)
    p.add_argument("--transceivers", type=int, choices=(1, 2))
    p.add_argument("--matching", choices=("giem", "gmm", "geo"))
    p.add_argument("--allocation", choices=tuple(ALLOCATION_FLAGS))
    p.add_argument("--resources", type=int, metavar="K")
    p.add_argument("--scheme", choices=("ofdma", "cdma"))
    p.add_argument("--antenna", choices=tuple(ANTENNA_FLAGS))
    p.add_argument("--period-s", type=float)
    p.add_argument("--nsim", type=int)
    p.add_argument("--seed", type=int)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return data


def _merge_settings(args: argparse.Namespace) -> dict:
    """DEFAULTS <- config file <- explicit flags, flat key space."""
    merged = dict(DEFAULTS)
    file_cfg = _load_config(getattr(args, "config", None))
    for key, value in file_cfg.items():
        if key in ("experiments", "ksweep"):
            continue
        if key not in merged:
            raise ConfigError(f"unknown config key {key!r}")
        merged[key] = value
    for key in merged:
        arg = getattr(args, key, None)
        if arg is not None:
            merged[key] = arg
    return merged


def spec_from_settings(s: dict, label: str = "") -> ExperimentSpec:
    try:
        constellation = ConstellationConfig(
            num_planes=int(s["planes"]),
            sats_per_plane=int(s["sats_per_plane"]),
            base_altitude_m=float(s["base_altitude_km"]) * 1e3,
            altitude_step_m=float(s["delta_altitude_km"]) * 1e3,
        )
        radio = RadioConfig(
            carrier_hz=float(s["freq_ghz"]) * 1e9,
            bandwidth_hz=float(s["bandwidth_mhz"]) * 1e6,
            noise_temp_k=float(s["noise_temp_k"]),
            eirpg_w=float(s["eirpg_w"]),
            min_rate_bps=float(s["rmin_kbps"]) * 1e3,
            antenna=ANTENNA_FLAGS[s["antenna"]] if s["antenna"] in ANTENNA_FLAGS else Antenna(s["antenna"]),
        )
        alloc = ALLOCATION_FLAGS.get(s["allocation"], s["allocation"])
        resources = None
        if alloc != "none":
            resources = ResourceSet(
                num_resources=int(s["resources"]), access_scheme=AccessScheme(s["scheme"])
            )
        spec = ExperimentSpec(
            constellation=constellation,
            radio=radio,
            transceivers=int(s["transceivers"]),
            matching_algo=s["matching"],
            allocation_algo=alloc,
            resources=resources,
            period_s=float(s["period_s"]),
            num_realizations=int(s["nsim"]),
            seed=int(s["seed"]),
            label=label,
        )
        spec.validate()
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return spec


def settings_from_spec(spec: ExperimentSpec) -> dict:
    """Inverse of spec_from_settings, in boundary units (config round-trip)."""
    c, r = spec.constellation, spec.radio
    return {
        "planes": c.num_planes,
        "sats_per_plane": c.sats_per_plane,
        "base_altitude_km": c.base_altitude_m / 1e3,
        "delta_altitude_km": c.altitude_step_m / 1e3,
        "freq_ghz": r.carrier_hz / 1e9,
        "bandwidth_mhz": r.bandwidth_hz / 1e6,
        "noise_temp_k": r.noise_temp_k,
        "eirpg_w": r.eirpg_w,
        "rmin_kbps": r.min_rate_bps / 1e3,
        "transceivers": spec.transceivers,
        "matching": spec.matching_algo,
        "allocation": spec.allocation_algo,
        "resources": spec.resources.num_resources if spec.resources else DEFAULTS["resources"],
        "scheme": spec.resources.access_scheme.value if spec.resources else DEFAULTS["scheme"],
        "antenna": r.antenna.value,
        "period_s": spec.period_s,
        "nsim": spec.num_realizations,
        "seed": spec.seed,
    }


def _git_hash() -> str:
    try:
        out = subprocess.run(
            ["git", "rev-parse", "HEAD"], capture_output=True, text=True, timeout=5,
            cwd=os.path.dirname(os.path.abspath(__file__)),
        )
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def _write_manifest(out_dir: str, payload: dict) -> None:
    os.makedirs(out_dir, exist_ok=True)
    manifest = {
        "islsim_version": __version__,
        "numpy_version": np.__version__,
        "python_version": sys.version.split()[0],
        "git_hash": _git_hash(),
        **payload,
    }
    with open(os.path.join(out_dir, "run_manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _echo_config(out_dir: str, settings) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "effective_config.json"), "w") as fh:
        json.dump(settings, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_design(args) -> int:
    s = _merge_settings(args)
    cfg = spec_from_settings(s).constellation
    l_adj = design.max_adjacent_range(cfg)
    radio = RadioConfig(
        carrier_hz=float(s["freq_ghz"]) * 1e9,
        bandwidth_hz=float(s["bandwidth_mhz"]) * 1e6,
        noise_temp_k=float(s["noise_temp_k"]),
        eirpg_w=1.0,
        min_rate_bps=float(s["rmin_kbps"]) * 1e3,
    )
    mpl = linkbudget.fspl(radio, l_adj)
    eirpg = linkbudget.min_eirpg(radio, mpl)
    print(f"max_adjacent_range_km {l_adj / 1e3:.9g}")
    print(f"mpl_db {10 * np.log10(mpl):.9g}")
    print(f"required_eirpg_w {eirpg:.9g}")
    c = build_constellation(cfg)
    if cfg.num_planes >= 3:
        f_hz = float(s["freq_ghz"]) * 1e9
        seam = max_doppler(c, 1, cfg.num_planes, f_hz)
        adj = max_doppler(c, 1, 2, f_hz)
        print(f"max_doppler_seam_khz {seam / 1e3:.9g}")
        print(f"max_doppler_adjacent_khz {adj / 1e3:.9g}")
    return 0


def cmd_graph(args) -> int:
    s = _merge_settings(args)
    spec = spec_from_settings(s)
    c = build_constellation(spec.constellation)
    if args.at_s > 0:
        c = propagate(c, args.at_s)
    g = build_feasibility_graph(c, spec.radio)
    g.write_csv(args.out)
    print(f"wrote {g.num_edges} edges to {args.out}")
    return 0


def cmd_match(args) -> int:
    s = _merge_settings(args)
    spec = spec_from_settings(s)
    c = build_constellation(spec.constellation)
    c = propagate(c, spec.period_s if args.at_s is None else args.at_s)
    g = build_feasibility_graph(c, spec.radio)
    if spec.matching_algo == "giem":
        result = matching.giem(g, spec.transceivers, spec.radio.min_rate_bps)
    elif spec.matching_algo == "gmm":
        result = matching.gmm(g, spec.transceivers, spec.radio.min_rate_bps, None)
    else:
        result = matching.geo(c, g, spec.transceivers)
    m = result.matching
    m.validate(spec.transceivers)
    print(f"pairs {len(m)}")
    print(f"sum_weight_bps {m.total_weight():.9g}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "u", "v", "rate_snr_bps", "dist_m", "retained_flag"])
            for e in sorted(m, key=lambda e: e.key):
                w.writerow([1, e.u, e.v, f"{e.rate_snr_bps:.9g}", f"{e.dist_m:.9g}", 0])
    return 0


def cmd_run(args) -> int:
    s = _merge_settings(args)
    spec = spec_from_settings(s)
    out = args.out
    dumps = None
    if args.dump_edges or args.dump_matching or args.dump_allocation:
        dumps = DumpWriter(
            out,
            edges=args.dump_edges,
            matchings=args.dump_matching,
            allocations=args.dump_allocation,
        )
    try:
        report = run_experiment(spec, dumps=dumps)
    finally:
        if dumps is not None:
            dumps.close()
    write_reports(out, [SweepOutcome(spec.name, report)])
    _echo_config(out, s)
    _write_manifest(out, {"mode": "run", "specs": [settings_from_spec(spec)]})
    print(f"label {spec.name}")
    print(f"mu_m_hat {report.mu_m_hat:.9g}")
    print(f"mu_r_snr_bps {report.mu_r_snr_bps:.9g}")
    if spec.allocation_algo != "none":
        print(f"mu_r_sinr_hat {report.mu_r_sinr_hat:.9g}")
    return 0


def cmd_sweep(args) -> int:
    file_cfg = _load_config(args.config)
    base = _merge_settings(args)
    specs: list[ExperimentSpec] = []
    for entry in file_cfg.get("experiments", []):
        if not isinstance(entry, dict):
            raise ConfigError("each experiments[] entry must be an object")
        merged = dict(base)
        for key, value in entry.items():
            if key == "label":
                continue
            if key not in merged:
                raise ConfigError(f"unknown experiment key {key!r}")
            merged[key] = value
        specs.append(spec_from_settings(merged, label=entry.get("label", "")))
    out = args.out
    payload: dict = {"mode": "sweep", "specs": [settings_from_spec(sp) for sp in specs]}
    if specs:
        outcomes = sweep(specs, jobs=args.jobs)
        write_reports(out, outcomes)
        for o in outcomes:
            status = "ok" if o.report is not None else f"FAILED ({o.error})"
            print(f"{o.label}: {status}")
    ks = file_cfg.get("ksweep")
    if ks is not None:
        merged = dict(base)
        for key, value in ks.items():
            if key in ("k_values", "schemes", "allocators"):
                continue
            if key not in merged:
                raise ConfigError(f"unknown ksweep key {key!r}")
            merged[key] = value
        merged["allocation"] = "gra"
        merged["resources"] = max(ks.get("k_values", [1]))
        base_spec = spec_from_settings(merged, label="ksweep_base")
        rows = allocation_sweep(
            base_spec,
            k_values=[int(k) for k in ks.get("k_values", [1, 2, 3, 4])],
            schemes=list(ks.get("schemes", ["ofdma", "cdma"])),
            allocators=list(ks.get("allocators", ["gra", "round_robin", "random"])),
        )
        write_ksweep(out, rows)
        payload["ksweep"] = {
            "base": settings_from_spec(base_spec),
            "k_values": ks.get("k_values"),
            "schemes": ks.get("schemes"),
            "allocators": ks.get("allocators"),
        }
        print(f"ksweep: {len(rows)} rows")
    if not specs and ks is None:
        raise ConfigError("sweep config needs an 'experiments' list or a 'ksweep' section")
    _echo_config(out, {**base, "experiments": file_cfg.get("experiments", []), "ksweep": ks})
    _write_manifest(out, payload)
    return 0


def cmd_oracle(args) -> int:
    """Small-instance cross-checks of greedy matching, worst-case
    interference, and greedy allocation against brute force."""
    rng = np.random.default_rng(args.seed)
    failures = 0

    checked = 0
    for _ in range(args.instances):
        c, radio, g = oracles.random_small_instance(rng)
        edges = [g.edge(i) for i in range(g.num_edges) if g.above_min[i]]
        if not edges:
            continue
        checked += 1
        greedy = matching.giem(g, 1, radio.min_rate_bps).matching.total_weight()
        best = oracles.best_matching_weight(edges, g.num_vertices, 1)
        if greedy < 0.5 * best - 1e-9:
            failures += 1
    print(f"greedy half-bound: {checked} instances, {failures} failures")

    checked = 0
    worst_err = 0.0
    for _ in range(args.instances):
        c, radio, g = oracles.random_small_instance(rng)
        m = matching.giem(g, 2, radio.min_rate_bps).matching
        if len(m) < 2:
            continue
        checked += 1
        rs = ResourceSet(num_resources=1)
        alloc = allocation.round_robin(c, radio, rs, m)
        for key, k in alloc.assignments.items():
            for rx in key:
                closed = linkbudget.worst_case_interference(c, radio, alloc, rx, key, k)
                exhaustive = oracles.enumerate_worst_interference(c, radio, alloc, rx, key, k)
                scale = max(closed, exhaustive, 1e-300)
                worst_err = max(worst_err, abs(closed - exhaustive) / scale)
    if worst_err > 1e-9:
        failures += 1
    print(f"worst-case interference: {checked} instances, max rel err {worst_err:.3g}")

    checked = 0
    for _ in range(args.instances):
        c, radio, g = oracles.random_small_instance(rng, max_planes=5, sats_per_plane=3)
        m = matching.giem(g, 2, radio.min_rate_bps).matching
        while len(m) > 5:
            m.remove(m.pairs[-1])
        if len(m) == 0:
            continue
        checked += 1
        k = int(rng.integers(1, 4))
        rs = ResourceSet(num_resources=k)
        gra_val = allocation.gra(c, radio, rs, m).value()
        best_val, _ = oracles.best_allocation_value(c, radio, rs, m)
        if gra_val > best_val + 1e-6 * max(abs(best_val), 1.0):
            failures += 1
        rr_val = allocation.round_robin(c, radio, rs, m).value()
        if gra_val < rr_val - 1e-6 * max(abs(rr_val), 1.0):
            failures += 1
    print(f"greedy allocation vs exhaustive: {checked} instances, total failures {failures}")
    return 2 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="islsim",
        description="Inter-plane inter-satellite link establishment simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="worst-case adjacent range, MPL, and required EIRPG")
    _add_spec_flags(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("graph", help="dump the feasibility graph at an epoch")
    _add_spec_flags(p)
    p.add_argument("--at-s", type=float, default=0.0, help="epoch offset in seconds")
    p.add_argument("--out", required=True, help="edge-list CSV path")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("match", help="single matching realization")
    _add_spec_flags(p)
    p.add_argument("--at-s", type=float, default=None, help="epoch offset (default one period)")
    p.add_argument("--out", help="matching CSV path")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("run", help="full Monte Carlo experiment")
    _add_spec_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--dump-edges", action="store_true")
    p.add_argument("--dump-matching", action="store_true")
    p.add_argument("--dump-allocation", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a list of experiments from a config file")
    _add_spec_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="brute-force cross-checks on small instances")
    p.add_argument("--instances", type=int, default=50)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
