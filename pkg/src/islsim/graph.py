"""Feasibility graph over satellite pairs plus the matching and allocation
containers with their degree and direction bookkeeping.

An edge is an unordered satellite pair from different, non-seam planes with
line of sight. Edge weights are twice the symmetric single-direction SNR
rate. Edges whose rate falls below the configured minimum stay in the graph
flagged ``above_min=False``; matching algorithms skip them, while degree
statistics can be taken over either edge set.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .geometry import Constellation, Direction, direction_signs, distance_matrix, max_slant_range
from .linkbudget import RadioConfig

log = logging.getLogger(__name__)

PairKey = tuple[int, int]

_DIRECTIONS = {-1: Direction.MINUS, 0: Direction.ZERO, 1: Direction.PLUS}


def pair_key(u: int, v: int) -> PairKey:
    """Canonical unordered pair key."""
    return (u, v) if u < v else (v, u)


class Edge(NamedTuple):
    """Feasible inter-plane pair with per-orientation directions.

    ``weight_snr_bps`` is the matching weight (both directions of the
    symmetric channel), i.e. twice the one-way SNR rate. ``dir_u`` is the
    direction of v as seen from u, ``dir_v`` the reverse.
    """

    u: int
    v: int
    weight_snr_bps: float
    dist_m: float
    dir_u: Direction
    dir_v: Direction
    above_min: bool = True

    @property
    def rate_snr_bps(self) -> float:
        return 0.5 * self.weight_snr_bps

    @property
    def key(self) -> PairKey:
        return pair_key(self.u, self.v)


class FeasibilityGraph:
    """Array-backed simple graph of feasible inter-plane pairs.

    Hot paths work on the column arrays; ``edge(i)`` materializes one Edge
    record. Edges are stored with ``u < v`` and sorted by (u, v), which makes
    construction deterministic.
    """

    def __init__(
        self,
        constellation: Constellation,
        radio: RadioConfig,
        us: np.ndarray,
        vs: np.ndarray,
        dists: np.ndarray,
        weights: np.ndarray,
        dirs_u: np.ndarray,
        dirs_v: np.ndarray,
        above_min: np.ndarray,
    ):
        order = np.lexsort((vs, us))
        self.constellation = constellation
        self.radio = radio
        self.us = us[order]
        self.vs = vs[order]
        self.dists = dists[order]
        self.weights = weights[order]
        self.dirs_u = dirs_u[order]
        self.dirs_v = dirs_v[order]
        self.above_min = above_min[order]
        self._index: dict[PairKey, int] = {
            (int(a), int(b)): i for i, (a, b) in enumerate(zip(self.us, self.vs))
        }

    @property
    def num_vertices(self) -> int:
        return self.constellation.config.num_satellites

    @property
    def num_edges(self) -> int:
        return len(self.us)

    @property
    def vertices(self) -> range:
        return range(self.num_vertices)

    def edge(self, i: int) -> Edge:
        return Edge(
            u=int(self.us[i]),
            v=int(self.vs[i]),
            weight_snr_bps=float(self.weights[i]),
            dist_m=float(self.dists[i]),
            dir_u=_DIRECTIONS[int(self.dirs_u[i])],
            dir_v=_DIRECTIONS[int(self.dirs_v[i])],
            above_min=bool(self.above_min[i]),
        )

    @property
    def edges(self) -> list[Edge]:
        return [self.edge(i) for i in range(self.num_edges)]

    def find(self, u: int, v: int) -> int | None:
        """Index of the edge for the unordered pair, or None."""
        return self._index.get(pair_key(u, v))

    def degrees(self, above_min_only: bool = True) -> np.ndarray:
        """Per-satellite degree, including isolated satellites as zero."""
        deg = np.zeros(self.num_vertices, dtype=np.int64)
        mask = self.above_min if above_min_only else np.ones(self.num_edges, dtype=bool)
        np.add.at(deg, self.us[mask], 1)
        np.add.at(deg, self.vs[mask], 1)
        return deg

    def min_degree(self, above_min_only: bool = True) -> int:
        if self.num_vertices == 0:
            return 0
        return int(self.degrees(above_min_only).min())

    def write_csv(self, path) -> None:
        """Edge-list dump for debugging and plotting."""
        planes = self.constellation.planes
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["u", "v", "plane_u", "plane_v", "dist_m", "rate_snr_bps"])
            for i in range(self.num_edges):
                w.writerow(
                    [
                        int(self.us[i]),
                        int(self.vs[i]),
                        int(planes[self.us[i]]),
                        int(planes[self.vs[i]]),
                        f"{self.dists[i]:.9g}",
                        f"{0.5 * self.weights[i]:.9g}",
                    ]
                )


def build_feasibility_graph(c: Constellation, cfg: RadioConfig) -> FeasibilityGraph:
    """All unordered pairs from distinct non-seam planes with line of sight.

    Pairs of planes whose index difference equals ``P-1`` (the counter-
    rotating seam) are excluded outright. Edges exactly at the line-of-sight
    boundary are kept (non-strict comparison).
    """
    config = c.config
    n_p = config.sats_per_plane
    p_count = config.num_planes
    us_parts, vs_parts, dist_parts = [], [], []
    for p in range(1, p_count + 1):
        for q in range(p + 1, p_count + 1):
            if q - p == p_count - 1:
                continue
            ids_p = np.arange((p - 1) * n_p, p * n_p, dtype=np.int64)
            ids_q = np.arange((q - 1) * n_p, q * n_p, dtype=np.int64)
            d = distance_matrix(c, ids_p, ids_q)
            los = d <= max_slant_range(config, p, q)
            iu, iv = np.nonzero(los)
            us_parts.append(ids_p[iu])
            vs_parts.append(ids_q[iv])
            dist_parts.append(d[iu, iv])
    if us_parts:
        us = np.concatenate(us_parts)
        vs = np.concatenate(vs_parts)
        dists = np.concatenate(dist_parts)
    else:
        us = np.empty(0, dtype=np.int64)
        vs = np.empty(0, dtype=np.int64)
        dists = np.empty(0)

    loss = (4.0 * np.pi * dists * cfg.carrier_hz / cfg.light_speed_m_s) ** 2
    with np.errstate(divide="ignore"):
        snr = cfg.eirpg_w / (cfg.noise_power_w * loss)
    rate = cfg.bandwidth_hz * np.log2(1.0 + snr)
    weights = 2.0 * rate
    dirs_u = direction_signs(c, us, vs)
    dirs_v = direction_signs(c, vs, us)
    above = rate >= cfg.min_rate_bps
    return FeasibilityGraph(c, cfg, us, vs, dists, weights, dirs_u, dirs_v, above)


class Matching:
    """Set of matched pairs with per-satellite, per-direction counters.

    A permissible state never exceeds the transceiver quota at any satellite
    and uses each pitch-axis direction at most once.
    """

    def __init__(self, num_vertices: int):
        self._deg = [0] * num_vertices
        self._deg_minus = [0] * num_vertices
        self._deg_plus = [0] * num_vertices
        self.pairs: list[Edge] = []
        self._keys: set[PairKey] = set()

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __contains__(self, key: PairKey) -> bool:
        return key in self._keys

    @property
    def keys(self) -> set[PairKey]:
        return set(self._keys)

    def degree(self, sat_id: int) -> int:
        return int(self._deg[sat_id])

    def degree_sum(self) -> int:
        """Sum of per-satellite degrees (twice the pair count by handshake)."""
        return sum(self._deg)

    def directional_degree(self, sat_id: int, d: Direction) -> int:
        if d is Direction.MINUS:
            return int(self._deg_minus[sat_id])
        if d is Direction.PLUS:
            return int(self._deg_plus[sat_id])
        return 0

    def total_weight(self) -> float:
        return float(sum(e.weight_snr_bps for e in self.pairs))

    def can_add(self, e: Edge, quota: int) -> bool:
        """True when adding the edge keeps both endpoint neighborhoods permissible."""
        return self.can_add_values(e.u, e.v, int(e.dir_u), int(e.dir_v), quota)

    def can_add_values(self, u: int, v: int, dir_u: int, dir_v: int, quota: int) -> bool:
        """can_add on raw sign values, avoiding edge materialization."""
        if dir_u == 0 or dir_v == 0:
            # A degenerate crossing-point edge cannot occupy a direction slot.
            log.debug("rejecting zero-direction edge %s-%s", u, v)
            return False
        du = self._deg_minus[u] if dir_u < 0 else self._deg_plus[u]
        dv = self._deg_minus[v] if dir_v < 0 else self._deg_plus[v]
        if du + dv != 0:
            return False
        return self._deg[u] < quota and self._deg[v] < quota

    def admissible_mask(
        self, us: np.ndarray, vs: np.ndarray, dirs_u: np.ndarray, dirs_v: np.ndarray, quota: int
    ) -> np.ndarray:
        """Vectorized can_add over edge arrays against the current state."""
        deg = np.asarray(self._deg)
        minus = np.asarray(self._deg_minus)
        plus = np.asarray(self._deg_plus)
        dir_deg_u = np.where(dirs_u < 0, minus[us], plus[us])
        dir_deg_v = np.where(dirs_v < 0, minus[vs], plus[vs])
        ok = (dirs_u != 0) & (dirs_v != 0)
        ok &= (dir_deg_u + dir_deg_v) == 0
        ok &= (deg[us] < quota) & (deg[vs] < quota)
        return ok

    def add(self, e: Edge) -> None:
        key = e.key
        if key in self._keys:
            raise ValueError(f"pair {key} already matched")
        self._keys.add(key)
        self.pairs.append(e)
        for sat, d in ((e.u, e.dir_u), (e.v, e.dir_v)):
            self._deg[sat] += 1
            if d is Direction.MINUS:
                self._deg_minus[sat] += 1
            elif d is Direction.PLUS:
                self._deg_plus[sat] += 1

    def remove(self, e: Edge) -> None:
        """Remove a previously added pair (supports search backtracking)."""
        key = e.key
        if key not in self._keys:
            raise ValueError(f"pair {key} not in matching")
        self._keys.discard(key)
        for i in range(len(self.pairs) - 1, -1, -1):
            if self.pairs[i].key == key:
                del self.pairs[i]
                break
        for sat, d in ((e.u, e.dir_u), (e.v, e.dir_v)):
            self._deg[sat] -= 1
            if d is Direction.MINUS:
                self._deg_minus[sat] -= 1
            elif d is Direction.PLUS:
                self._deg_plus[sat] -= 1

    def validate(self, quota: int) -> None:
        """Raise if any neighborhood violates the quota or direction limits."""
        if max(self._deg, default=0) > quota:
            raise AssertionError("transceiver quota exceeded")
        if max(self._deg_minus, default=0) > 1 or max(self._deg_plus, default=0) > 1:
            raise AssertionError("directional degree exceeded 1")


def degree_check(m: Matching, e: Edge, quota: int) -> bool:
    """Whether edge e can join matching m without breaking permissibility."""
    return m.can_add(e, quota)


@dataclass
class Allocation:
    """Resource assignment over a matching with the committed directed rates.

    ``assignments`` maps each matched pair to its resource index;
    ``rates`` holds the worst-case directed rates ``(u->v, v->u)`` under the
    access scheme in force. ``meta`` records reproducibility details such as
    the seeded generator used by random allocation.
    """

    assignments: dict[PairKey, int] = field(default_factory=dict)
    rates: dict[PairKey, tuple[float, float]] = field(default_factory=dict)
    edges: dict[PairKey, Edge] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def add(self, e: Edge, k: int, rate_uv: float = 0.0, rate_vu: float = 0.0) -> None:
        key = e.key
        if key in self.assignments:
            raise ValueError(f"pair {key} already allocated")
        self.assignments[key] = k
        self.rates[key] = (rate_uv, rate_vu)
        self.edges[key] = e

    def value(self) -> float:
        """Sum of the committed directed rates over all pairs."""
        return float(sum(a + b for a, b in self.rates.values()))

    def resource_groups(self) -> dict[int, list[PairKey]]:
        groups: dict[int, list[PairKey]] = {}
        for key, k in self.assignments.items():
            groups.setdefault(k, []).append(key)
        return groups

    def validate_complete(self, m: Matching) -> None:
        """Every matched pair must hold exactly one resource."""
        if set(self.assignments) != m.keys or len(self.assignments) != len(m):
            raise AssertionError("allocation is not a perfect matching over the pairs")
