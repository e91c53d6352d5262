"""Monte Carlo experiment runner: propagate, build the feasibility graph,
match, optionally allocate, and accumulate the performance estimators.

Reported metrics follow the estimator definitions used throughout the
experiments: the mean number of established inter-plane links per satellite,
the mean sum of SNR rates of the matching, and the mean allocated sum of
rates normalized by the same run's SNR mean. Rate, delay, and runtime
distributions are kept as full sorted sample arrays; binning is left to the
presentation layer. Wall-clock runtimes are reported but never part of
determinism guarantees.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import allocation as alloc_mod
from . import matching as match_mod
from .constants import LIGHT_SPEED_M_S
from .geometry import Constellation, ConstellationConfig, build_constellation, propagate
from .graph import Matching, build_feasibility_graph
from .linkbudget import AccessScheme, RadioConfig, ResourceSet

MATCHING_ALGOS = ("giem", "gmm", "geo")
ALLOCATION_ALGOS = ("gra", "round_robin", "random", "none")


@dataclass(frozen=True)
class ExperimentSpec:
    """Complete description of one Monte Carlo experiment."""

    constellation: ConstellationConfig
    radio: RadioConfig
    transceivers: int = 2
    matching_algo: str = "giem"
    allocation_algo: str = "none"
    resources: ResourceSet | None = None
    period_s: float = 30.0
    num_realizations: int = 1000
    seed: int = 1
    label: str = ""

    def validate(self) -> None:
        if self.transceivers not in (1, 2):
            raise ValueError("transceivers must be 1 or 2")
        if self.matching_algo not in MATCHING_ALGOS:
            raise ValueError(f"unknown matching algorithm {self.matching_algo!r}")
        if self.allocation_algo not in ALLOCATION_ALGOS:
            raise ValueError(f"unknown allocation algorithm {self.allocation_algo!r}")
        if self.allocation_algo != "none" and self.resources is None:
            raise ValueError("allocation requires a resource set")
        if self.num_realizations < 1:
            raise ValueError("num_realizations must be >= 1")
        if self.period_s <= 0:
            raise ValueError("period_s must be positive")

    def default_label(self) -> str:
        parts = [
            f"P{self.constellation.num_planes}",
            f"Q{self.transceivers}",
            self.matching_algo,
        ]
        if self.allocation_algo != "none" and self.resources is not None:
            parts.append(self.allocation_algo)
            parts.append(f"K{self.resources.num_resources}")
            parts.append(self.resources.access_scheme.value)
        return "_".join(parts)

    @property
    def name(self) -> str:
        return self.label or self.default_label()


@dataclass
class MetricsReport:
    """Aggregated estimators and sample distributions of one experiment."""

    label: str
    num_satellites: int
    num_realizations: int
    mu_m_hat: float
    mu_m_hat_degree_form: float
    mu_m_hat_normalized: float
    mu_r_snr_bps: float
    mu_r_sinr_hat: float
    rate_cdf_bps: np.ndarray
    delay_cdf_s: np.ndarray
    match_runtime_s: np.ndarray
    alloc_runtime_s: np.ndarray
    runtime_cdf_s: np.ndarray
    churn_series: np.ndarray
    min_degree_series: np.ndarray
    degree_map: list[tuple[int, int, float, int]] = field(default_factory=list)


def _match(spec: ExperimentSpec, c: Constellation, g, prev: Matching | None):
    if spec.matching_algo == "giem":
        return match_mod.giem(g, spec.transceivers, spec.radio.min_rate_bps)
    if spec.matching_algo == "gmm":
        return match_mod.gmm(g, spec.transceivers, spec.radio.min_rate_bps, prev)
    return match_mod.geo(c, g, spec.transceivers)


def _allocate(spec: ExperimentSpec, c: Constellation, m: Matching, realization: int):
    rs = spec.resources
    if spec.allocation_algo == "gra":
        return alloc_mod.gra(c, spec.radio, rs, m)
    if spec.allocation_algo == "round_robin":
        return alloc_mod.round_robin(c, spec.radio, rs, m)
    # One independent, reproducible stream per realization.
    return alloc_mod.random_alloc(c, spec.radio, rs, m, seed=spec.seed + realization)


class DumpWriter:
    """Optional per-realization CSV dumps of edges, matchings, allocations."""

    def __init__(self, out_dir: str, edges: bool = False, matchings: bool = False, allocations: bool = False):
        os.makedirs(out_dir, exist_ok=True)
        self._files = []
        self._edges = self._matchings = self._allocations = None
        if edges:
            self._edges = self._open(out_dir, "edges_dump.csv",
                                     ["n", "u", "v", "plane_u", "plane_v", "dist_m", "rate_snr_bps"])
        if matchings:
            self._matchings = self._open(out_dir, "matching_dump.csv",
                                         ["n", "u", "v", "rate_snr_bps", "dist_m", "retained_flag"])
        if allocations:
            self._allocations = self._open(out_dir, "allocation_dump.csv",
                                           ["n", "u", "v", "k", "rate_uv_bps", "rate_vu_bps"])

    def _open(self, out_dir: str, name: str, header: list[str]):
        fh = open(os.path.join(out_dir, name), "w", newline="")
        self._files.append(fh)
        writer = csv.writer(fh)
        writer.writerow(header)
        return writer

    def close(self) -> None:
        for fh in self._files:
            fh.close()
        self._files = []

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def edges(self, n: int, g) -> None:
        if self._edges is None:
            return
        planes = g.constellation.planes
        for i in range(g.num_edges):
            self._edges.writerow(
                [n, int(g.us[i]), int(g.vs[i]), int(planes[g.us[i]]), int(planes[g.vs[i]]),
                 _fmt(float(g.dists[i])), _fmt(float(0.5 * g.weights[i]))]
            )

    def matching(self, n: int, m: Matching, prev_keys: set) -> None:
        if self._matchings is None:
            return
        for e in sorted(m, key=lambda e: e.key):
            self._matchings.writerow(
                [n, e.u, e.v, _fmt(e.rate_snr_bps), _fmt(e.dist_m), int(e.key in prev_keys)]
            )

    def allocation(self, n: int, alloc) -> None:
        if self._allocations is None:
            return
        for key in sorted(alloc.assignments):
            rate_uv, rate_vu = alloc.rates[key]
            self._allocations.writerow(
                [n, key[0], key[1], alloc.assignments[key], _fmt(rate_uv), _fmt(rate_vu)]
            )


def run_experiment(spec: ExperimentSpec, dumps: DumpWriter | None = None) -> MetricsReport:
    """Run all realizations of one spec and aggregate the estimators."""
    spec.validate()
    n_sats = spec.constellation.num_satellites
    c = build_constellation(spec.constellation)

    pair_total = 0
    degree_total = 0
    weight_total = 0.0
    alloc_total = 0.0
    rates, delays, churns, min_degs = [], [], [], []
    match_times, alloc_times = [], []
    prev: Matching | None = None
    prev_keys: set = set()
    degree_map: list[tuple[int, int, float, int]] = []

    for n in range(1, spec.num_realizations + 1):
        c = propagate(c, spec.period_s)
        g = build_feasibility_graph(c, spec.radio)
        result = _match(spec, c, g, prev)
        m = result.matching
        m.validate(spec.transceivers)

        pair_total += len(m)
        degree_total += m.degree_sum()
        weight_total += m.total_weight()
        keys = m.keys
        churns.append(len(keys - prev_keys))
        min_degs.append(g.min_degree(above_min_only=True))
        for e in m:
            rates.append(e.rate_snr_bps)
            delays.append(e.dist_m / LIGHT_SPEED_M_S)
        match_times.append(result.runtime_s)

        if dumps is not None:
            dumps.edges(n, g)
            dumps.matching(n, m, prev_keys)

        if spec.allocation_algo != "none":
            alloc = _allocate(spec, c, m, n)
            alloc.validate_complete(m)
            alloc_total += alloc.value()
            alloc_times.append(alloc.meta.get("runtime_s", 0.0))
            if dumps is not None:
                dumps.allocation(n, alloc)
        else:
            alloc_times.append(0.0)

        prev = m
        prev_keys = keys
        if n == spec.num_realizations:
            deg = {i: 0 for i in range(n_sats)}
            for e in m:
                deg[e.u] += 1
                deg[e.v] += 1
            degree_map = [
                (i, int(c.planes[i]), float(c.phases[i]), deg[i]) for i in range(n_sats)
            ]

    n_sim = spec.num_realizations
    mu_m = pair_total / (n_sim * n_sats)
    mu_m_deg = degree_total / (2 * n_sim * n_sats)
    p = spec.constellation.num_planes
    cap = spec.transceivers * (p - 1) / (2 * p)  # per-satellite ceiling of the pair-count formula
    mu_r_snr = weight_total / n_sim
    mu_r_sinr_hat = (alloc_total / n_sim) / mu_r_snr if spec.allocation_algo != "none" and mu_r_snr > 0 else math.nan

    match_rt = np.array(match_times)
    alloc_rt = np.array(alloc_times)
    return MetricsReport(
        label=spec.name,
        num_satellites=n_sats,
        num_realizations=n_sim,
        mu_m_hat=mu_m,
        mu_m_hat_degree_form=mu_m_deg,
        mu_m_hat_normalized=mu_m / cap if cap > 0 else math.nan,
        mu_r_snr_bps=mu_r_snr,
        mu_r_sinr_hat=mu_r_sinr_hat,
        rate_cdf_bps=np.sort(np.array(rates)),
        delay_cdf_s=np.sort(np.array(delays)),
        match_runtime_s=match_rt,
        alloc_runtime_s=alloc_rt,
        runtime_cdf_s=np.sort(match_rt + alloc_rt),
        churn_series=np.array(churns, dtype=np.int64),
        min_degree_series=np.array(min_degs, dtype=np.int64),
        degree_map=degree_map,
    )


@dataclass
class SweepOutcome:
    label: str
    report: MetricsReport | None
    error: str | None = None


def sweep(specs: list[ExperimentSpec], jobs: int = 1) -> list[SweepOutcome]:
    """Run each spec, preserving input order; failures do not abort the rest."""
    if not specs:
        raise ValueError("sweep needs at least one spec")
    outcomes: list[SweepOutcome] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_experiment, s) for s in specs]
            for s, fut in zip(specs, futures):
                try:
                    outcomes.append(SweepOutcome(s.name, fut.result()))
                except Exception as exc:  # noqa: BLE001 - per-spec isolation
                    outcomes.append(SweepOutcome(s.name, None, f"{type(exc).__name__}: {exc}"))
        return outcomes
    for s in specs:
        try:
            outcomes.append(SweepOutcome(s.name, run_experiment(s)))
        except Exception as exc:  # noqa: BLE001 - per-spec isolation
            outcomes.append(SweepOutcome(s.name, None, f"{type(exc).__name__}: {exc}"))
    return outcomes


@dataclass
class KSweepRow:
    resources: int
    scheme: str
    allocator: str
    mu_r_sinr_hat: float
    mu_r_snr_bps: float
    mean_alloc_sum_bps: float


def allocation_sweep(
    base: ExperimentSpec,
    k_values: list[int],
    schemes: list[str],
    allocators: list[str],
) -> list[KSweepRow]:
    """Allocation comparison sharing one matching per realization.

    The matching does not depend on the resource pool, so each realization's
    matching feeds every (K, scheme, allocator) combination; this is the
    producer of the resource-sweep table.
    """
    base.validate()
    c = build_constellation(base.constellation)
    prev: Matching | None = None
    totals = {
        (k, sch, alg): 0.0 for k in k_values for sch in schemes for alg in allocators
    }
    weight_total = 0.0
    for n in range(1, base.num_realizations + 1):
        c = propagate(c, base.period_s)
        g = build_feasibility_graph(c, base.radio)
        result = _match(base, c, g, prev)
        m = result.matching
        m.validate(base.transceivers)
        prev = m
        weight_total += m.total_weight()
        for k in k_values:
            for sch in schemes:
                rs = ResourceSet(num_resources=k, access_scheme=AccessScheme(sch))
                for alg in allocators:
                    if alg == "gra":
                        a = alloc_mod.gra(c, base.radio, rs, m)
                    elif alg == "round_robin":
                        a = alloc_mod.round_robin(c, base.radio, rs, m)
                    elif alg == "random":
                        a = alloc_mod.random_alloc(c, base.radio, rs, m, seed=base.seed + n)
                    else:
                        raise ValueError(f"unknown allocator {alg!r}")
                    totals[(k, sch, alg)] += a.value()
    mu_r_snr = weight_total / base.num_realizations
    rows = []
    for k in k_values:
        for sch in schemes:
            for alg in allocators:
                mean_alloc = totals[(k, sch, alg)] / base.num_realizations
                rows.append(
                    KSweepRow(
                        resources=k,
                        scheme=sch if isinstance(sch, str) else sch.value,
                        allocator=alg,
                        mu_r_sinr_hat=mean_alloc / mu_r_snr if mu_r_snr > 0 else math.nan,
                        mu_r_snr_bps=mu_r_snr,
                        mean_alloc_sum_bps=mean_alloc,
                    )
                )
    return rows


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def _write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def write_reports(out_dir: str, outcomes: list[SweepOutcome]) -> None:
    """Emit the CSV families for a list of sweep outcomes.

    Column meanings are documented in the repository README. Wall-clock
    samples live only in runtime_cdf.csv so every other file is
    deterministic for a fixed spec and seed.
    """
    os.makedirs(out_dir, exist_ok=True)
    ok = [o for o in outcomes if o.report is not None]
    _write_csv(
        os.path.join(out_dir, "metrics_summary.csv"),
        [
            "label",
            "num_satellites",
            "num_realizations",
            "mu_m_hat",
            "mu_m_hat_degree_form",
            "mu_m_hat_normalized",
            "mu_r_snr_bps",
            "mu_r_sinr_hat",
            "mean_churn",
            "min_degree_overall",
        ],
        (
            [
                o.label,
                o.report.num_satellites,
                o.report.num_realizations,
                o.report.mu_m_hat,
                o.report.mu_m_hat_degree_form,
                o.report.mu_m_hat_normalized,
                o.report.mu_r_snr_bps,
                o.report.mu_r_sinr_hat,
                float(o.report.churn_series.mean()) if len(o.report.churn_series) else math.nan,
                int(o.report.min_degree_series.min()) if len(o.report.min_degree_series) else 0,
            ]
            for o in ok
        ),
    )
    _write_csv(
        os.path.join(out_dir, "rate_cdf.csv"),
        ["label", "rate_snr_bps"],
        ((o.label, float(r)) for o in ok for r in o.report.rate_cdf_bps),
    )
    _write_csv(
        os.path.join(out_dir, "delay_cdf.csv"),
        ["label", "delay_s"],
        ((o.label, float(d)) for o in ok for d in o.report.delay_cdf_s),
    )
    _write_csv(
        os.path.join(out_dir, "churn.csv"),
        ["label", "realization", "new_pairs"],
        (
            (o.label, i + 1, int(x))
            for o in ok
            for i, x in enumerate(o.report.churn_series)
        ),
    )
    _write_csv(
        os.path.join(out_dir, "min_degree.csv"),
        ["label", "realization", "min_degree"],
        (
            (o.label, i + 1, int(x))
            for o in ok
            for i, x in enumerate(o.report.min_degree_series)
        ),
    )
    _write_csv(
        os.path.join(out_dir, "runtime_cdf.csv"),
        ["label", "realization", "match_runtime_s", "alloc_runtime_s", "total_runtime_s"],
        (
            (
                o.label,
                i + 1,
                float(o.report.match_runtime_s[i]),
                float(o.report.alloc_runtime_s[i]),
                float(o.report.match_runtime_s[i] + o.report.alloc_runtime_s[i]),
            )
            for o in ok
            for i in range(len(o.report.match_runtime_s))
        ),
    )
    _write_csv(
        os.path.join(out_dir, "degree_map.csv"),
        ["label", "sat_id", "plane", "phase_rad", "degree"],
        (
            (o.label, sat, plane, phase, deg)
            for o in ok
            for sat, plane, phase, deg in o.report.degree_map
        ),
    )
    failures = [o for o in outcomes if o.error is not None]
    if failures:
        _write_csv(
            os.path.join(out_dir, "failures.csv"),
            ["label", "error"],
            ((o.label, o.error) for o in failures),
        )


def write_ksweep(out_dir: str, rows: list[KSweepRow]) -> None:
    os.makedirs(out_dir, exist_ok=True)
    _write_csv(
        os.path.join(out_dir, "ksweep.csv"),
        ["resources", "scheme", "allocator", "mu_r_sinr_hat", "mu_r_snr_bps", "mean_alloc_sum_bps"],
        (
            (r.resources, r.scheme, r.allocator, r.mu_r_sinr_hat, r.mu_r_snr_bps, r.mean_alloc_sum_bps)
            for r in rows
        ),
    )
