"""Render figure analogues from a completed sweep's CSV families.

Figures: f4 degree maps, f5 matched-pairs bars, f6 sum-rate bars, f7
rate/delay CDF panels, f8 resource-sweep curves, f9 runtime CDFs. Series
values are taken verbatim from the CSVs; with ``--dump-series`` every
plotted series is also written out token-for-token for auditing.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import warnings

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import ResultsError, Table, dump_series, read_table

FIGURES = ("f4", "f5", "f6", "f7", "f8", "f9")

SOURCES = {
    "f4": ["degree_map.csv"],
    "f5": ["metrics_summary.csv"],
    "f6": ["metrics_summary.csv"],
    "f7": ["rate_cdf.csv", "delay_cdf.csv"],
    "f8": ["ksweep.csv"],
    "f9": ["runtime_cdf.csv"],
}

LABEL_PATTERN = re.compile(r"^P(?P<planes>\d+)_Q(?P<q>\d+)_(?P<algo>[a-z_]+)")


def _floats(tokens: list[str]) -> np.ndarray:
    return np.array([float(t) for t in tokens])


def _parse_label(label: str):
    m = LABEL_PATTERN.match(label)
    if m is None:
        return None
    return int(m.group("planes")), int(m.group("q")), m.group("algo")


class Renderer:
    def __init__(self, results_dir: str, out_dir: str, fmt: str, dump_dir: str | None):
        self.results_dir = results_dir
        self.out_dir = out_dir
        self.fmt = fmt
        self.dump_dir = dump_dir
        os.makedirs(out_dir, exist_ok=True)

    def _table(self, name: str) -> Table:
        return read_table(os.path.join(self.results_dir, name))

    def _save(self, fig, figure_id: str) -> str:
        path = os.path.join(self.out_dir, f"{figure_id}.{self.fmt}")
        fig.savefig(path, bbox_inches="tight")
        plt.close(fig)
        return path

    def _dump(self, figure_id: str, name: str, tokens: list[str]) -> None:
        if self.dump_dir is not None:
            dump_series(self.dump_dir, figure_id, name, tokens)

    def f4(self) -> str:
        table = self._table("degree_map.csv")
        labels = table.distinct("label")
        fig, axes = plt.subplots(1, max(len(labels), 1), figsize=(4 * max(len(labels), 1), 4), squeeze=False)
        for ax, label in zip(axes[0], labels):
            rows = table.rows_where(label=label)
            planes = [table.column("plane")[i] for i in rows]
            phases = [table.column("phase_rad")[i] for i in rows]
            degrees = [table.column("degree")[i] for i in rows]
            sc = ax.scatter(
                _floats(planes), _floats(phases), c=_floats(degrees), cmap="viridis", s=14
            )
            ax.set_xlabel("orbital plane")
            ax.set_ylabel("orbit phase [rad]")
            ax.set_title(label)
            fig.colorbar(sc, ax=ax, label="matched links")
            self._dump("f4", f"{label}_degree", degrees)
        if not labels:
            warnings.warn("degree_map.csv holds no series")
        return self._save(fig, "f4")

    def _summary_bars(self, figure_id: str, column: str, ylabel: str, log: bool = False) -> str:
        table = self._table("metrics_summary.csv")
        groups: dict[int, dict[str, tuple[list[str], list[str]]]] = {}
        for i, label in enumerate(table.column("label")):
            parsed = _parse_label(label)
            if parsed is None:
                warnings.warn(f"label {label!r} does not encode planes/transceivers; skipped")
                continue
            planes, q, algo = parsed
            xs, ys = groups.setdefault(q, {}).setdefault(algo, ([], []))
            xs.append(str(planes))
            ys.append(table.column(column)[i])
        if not groups:
            warnings.warn(f"metrics_summary.csv holds no parsable series for {figure_id}")
        fig, axes = plt.subplots(1, max(len(groups), 1), figsize=(5 * max(len(groups), 1), 4), squeeze=False)
        for ax, (q, algos) in zip(axes[0], sorted(groups.items())):
            width = 0.8 / max(len(algos), 1)
            plane_axis = sorted({x for xs, _ in algos.values() for x in xs}, key=int)
            for j, (algo, (xs, ys)) in enumerate(sorted(algos.items())):
                positions = [plane_axis.index(x) + j * width for x in xs]
                ax.bar(positions, _floats(ys), width=width, label=algo)
                self._dump(figure_id, f"Q{q}_{algo}_{column}", ys)
            ax.set_xticks([i + 0.4 - width / 2 for i in range(len(plane_axis))])
            ax.set_xticklabels(plane_axis)
            ax.set_xlabel("orbital planes")
            ax.set_ylabel(ylabel)
            ax.set_title(f"Q = {q}")
            if log:
                ax.set_yscale("log")
            ax.legend()
        return self._save(fig, figure_id)

    def f5(self) -> str:
        return self._summary_bars("f5", "mu_m_hat_normalized", "normalized mean matched links per satellite")

    def f6(self) -> str:
        return self._summary_bars("f6", "mu_r_snr_bps", "mean sum of rates [bit/s]", log=True)

    def f7(self) -> str:
        rates = self._table("rate_cdf.csv")
        delays = self._table("delay_cdf.csv")
        fig, (ax_rate, ax_delay) = plt.subplots(1, 2, figsize=(10, 4))
        for label in rates.distinct("label"):
            rows = rates.rows_where(label=label)
            tokens = [rates.column("rate_snr_bps")[i] for i in rows]
            xs = _floats(tokens)
            ax_rate.plot(xs, np.arange(1, len(xs) + 1) / len(xs), label=label)
            self._dump("f7", f"{label}_rate", tokens)
        for label in delays.distinct("label"):
            rows = delays.rows_where(label=label)
            tokens = [delays.column("delay_s")[i] for i in rows]
            xs = _floats(tokens)
            ax_delay.plot(xs, np.arange(1, len(xs) + 1) / len(xs), label=label)
            self._dump("f7", f"{label}_delay", tokens)
        ax_rate.set_xscale("log")
        ax_rate.set_xlabel("link rate [bit/s]")
        ax_rate.set_ylabel("empirical CDF")
        ax_delay.set_xlabel("propagation delay [s]")
        ax_delay.set_ylabel("empirical CDF")
        for ax in (ax_rate, ax_delay):
            if ax.lines:
                ax.legend(fontsize=7)
        return self._save(fig, "f7")

    def f8(self) -> str:
        table = self._table("ksweep.csv")
        fig, ax = plt.subplots(figsize=(6, 4))
        schemes = table.distinct("scheme")
        allocators = table.distinct("allocator")
        styles = {"gra": "-", "round_robin": "--", "random": ":"}
        plotted = 0
        for scheme in schemes:
            for allocator in allocators:
                rows = table.rows_where(scheme=scheme, allocator=allocator)
                if not rows:
                    warnings.warn(f"ksweep.csv lacks series {scheme}/{allocator}")
                    continue
                rows.sort(key=lambda i: int(table.column("resources")[i]))
                ks = [table.column("resources")[i] for i in rows]
                ys = [table.column("mu_r_sinr_hat")[i] for i in rows]
                ax.plot(
                    _floats(ks),
                    _floats(ys),
                    styles.get(allocator, "-"),
                    marker="o",
                    label=f"{allocator} {scheme}",
                )
                self._dump("f8", f"{scheme}_{allocator}", ys)
                plotted += 1
        if plotted == 0:
            warnings.warn("ksweep.csv holds no series")
        ax.set_xlabel("orthogonal resources")
        ax.set_ylabel("normalized mean sum of rates")
        if ax.lines:
            ax.legend(fontsize=8)
        return self._save(fig, "f8")

    def f9(self) -> str:
        table = self._table("runtime_cdf.csv")
        fig, ax = plt.subplots(figsize=(6, 4))
        for label in table.distinct("label"):
            rows = table.rows_where(label=label)
            tokens = sorted(
                (table.column("total_runtime_s")[i] for i in rows), key=float
            )
            xs = _floats(tokens)
            ax.plot(xs, np.arange(1, len(xs) + 1) / len(xs), label=label)
            self._dump("f9", f"{label}_runtime", tokens)
        ax.set_xscale("log")
        ax.set_xlabel("realization runtime [s]")
        ax.set_ylabel("empirical CDF")
        if ax.lines:
            ax.legend(fontsize=7)
        return self._save(fig, "f9")

    def render(self, figure_id: str) -> list[str]:
        return [getattr(self, figure_id)()]


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="isl-render", description="Render figures from sweep result CSVs."
    )
    parser.add_argument("--results", required=True, help="directory with the CSV families")
    parser.add_argument("--figure", default="all", choices=FIGURES + ("all",))
    parser.add_argument("--format", default="png", choices=("png", "svg"))
    parser.add_argument("--out", default=None, help="output directory (default RESULTS/figures)")
    parser.add_argument(
        "--dump-series",
        action="store_true",
        help="also write every plotted series verbatim under OUT/series",
    )
    args = parser.parse_args(argv)

    wanted = list(FIGURES) if args.figure == "all" else [args.figure]
    missing = []
    for figure_id in wanted:
        for source in SOURCES[figure_id]:
            path = os.path.join(args.results, source)
            if not os.path.exists(path):
                missing.append(path)
    if missing:
        print("error: missing expected results files:", file=sys.stderr)
        for path in missing:
            print(f"  {path}", file=sys.stderr)
        return 1

    out_dir = args.out or os.path.join(args.results, "figures")
    dump_dir = os.path.join(out_dir, "series") if args.dump_series else None
    renderer = Renderer(args.results, out_dir, args.format, dump_dir)
    try:
        for figure_id in wanted:
            for path in renderer.render(figure_id):
                print(path)
    except ResultsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
