"""Satellite matching algorithms: greedy from-scratch (GIEM), history-
preserving greedy (GMM), and the logical-location benchmark (GEO).

All three emit permissible matchings: per-satellite degree at most the
transceiver quota, at most one neighbor per pitch-axis direction. Runtime is
measured with a monotonic clock around the algorithm body only; building the
feasibility graph is not included.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .geometry import Constellation
from .graph import FeasibilityGraph, Matching

TWO_PI = 2.0 * math.pi


@dataclass
class MatchingResult:
    """One realization's matching plus bookkeeping for the experiment loop."""

    matching: Matching
    realization_index: int = 0
    runtime_s: float = 0.0
    churn: int = 0


def _sorted_candidates(g: FeasibilityGraph, min_rate_bps: float) -> np.ndarray:
    """Edge indices with rate >= min, by descending weight.

    Ties break on ascending (u, v); ids are plane-major so this matches a
    (plane_u, id_u, plane_v, id_v) lexicographic rule and makes runs
    reproducible.
    """
    eligible = np.nonzero(0.5 * g.weights >= min_rate_bps)[0]
    order = np.lexsort((g.vs[eligible], g.us[eligible], -g.weights[eligible]))
    return eligible[order]


def _greedy_pass(g: FeasibilityGraph, candidates: np.ndarray, m: Matching, quota: int) -> None:
    """Admit candidates in order whenever both neighborhoods stay permissible."""
    us, vs = g.us, g.vs
    dirs_u, dirs_v = g.dirs_u, g.dirs_v
    for i in candidates:
        i = int(i)
        if m.can_add_values(int(us[i]), int(vs[i]), int(dirs_u[i]), int(dirs_v[i]), quota):
            m.add(g.edge(i))


def giem(g: FeasibilityGraph, quota: int, min_rate_bps: float) -> MatchingResult:
    """Greedy matching solved from scratch: heaviest feasible edge first."""
    start = time.perf_counter()
    m = Matching(g.num_vertices)
    _greedy_pass(g, _sorted_candidates(g, min_rate_bps), m, quota)
    runtime = time.perf_counter() - start
    return MatchingResult(matching=m, runtime_s=runtime, churn=len(m))


def gmm(
    g: FeasibilityGraph, quota: int, min_rate_bps: float, prev: Matching | None
) -> MatchingResult:
    """Greedy matching that re-admits the previous realization's pairs first.

    A previous pair is retained while it remains a feasible edge at all
    (line of sight, non-seam) and both neighborhoods stay permissible; the
    minimum-rate threshold gates only the fresh greedy pass, so established
    links persist even after degrading below it, until the Earth blocks
    them. Retention runs in descending previous-weight order. Edges the
    retentions make impermissible are dropped before the residual pass, so
    only the (much shorter) residual list is sorted; the residual pass
    continues on the same degree state, which keeps the quota intact for
    any number of transceivers.
    """
    if prev is None or len(prev) == 0:
        result = giem(g, quota, min_rate_bps)
        return result

    start = time.perf_counter()
    m = Matching(g.num_vertices)
    retained = 0
    for e_prev in sorted(prev, key=lambda e: (-e.weight_snr_bps, e.key)):
        i = g.find(*e_prev.key)
        if i is None:
            continue
        if m.can_add_values(
            int(g.us[i]), int(g.vs[i]), int(g.dirs_u[i]), int(g.dirs_v[i]), quota
        ):
            m.add(g.edge(i))
            retained += 1

    eligible = (0.5 * g.weights >= min_rate_bps) & m.admissible_mask(
        g.us, g.vs, g.dirs_u, g.dirs_v, quota
    )
    residual = np.nonzero(eligible)[0]
    order = np.lexsort((g.vs[residual], g.us[residual], -g.weights[residual]))
    _greedy_pass(g, residual[order], m, quota)
    runtime = time.perf_counter() - start
    return MatchingResult(matching=m, runtime_s=runtime, churn=len(m) - retained)


def logical_location(phase: float, sats_per_plane: int) -> int:
    """Index of the latitude band of width 2*pi/N_p containing the phase."""
    loc = int(phase // (TWO_PI / sats_per_plane))
    return min(loc, sats_per_plane - 1)


def geo(c: Constellation, g: FeasibilityGraph, quota: int) -> MatchingResult:
    """Benchmark matching: pair same-logical-location satellites of
    neighboring planes in a single pass over plane pairs (1,2)..(P-1,P).

    A location pair is matched only when its edge is feasible, meets the
    graph's minimum-rate flag, and both neighborhoods stay permissible. With
    one transceiver the scan toward the next plane runs first, so satellites
    already claimed by the previous plane pair are skipped.
    """
    start = time.perf_counter()
    cfg = c.config
    n_p = cfg.sats_per_plane
    n = g.num_vertices
    m = Matching(n)

    # Evenly spaced planes hold exactly one satellite per location; sorting
    # ids by location index gives each plane's location->satellite map.
    locations = np.minimum((c.phases * n_p / TWO_PI).astype(np.int64), n_p - 1)
    by_location = []
    for p in cfg.planes():
        ids = np.arange((p - 1) * n_p, p * n_p)
        by_location.append(ids[np.argsort(locations[ids], kind="stable")])

    # One candidate per location per neighboring plane pair, in scan order;
    # ids are plane-major so candidate pairs are already canonical (u < v),
    # which lets a binary search on the sorted edge keys resolve them all.
    cand_u = np.concatenate(by_location[:-1])
    cand_v = np.concatenate(by_location[1:])
    if g.num_edges:
        edge_keys = g.us * n + g.vs
        cand_keys = cand_u * n + cand_v
        pos = np.minimum(np.searchsorted(edge_keys, cand_keys), len(edge_keys) - 1)
        found = pos[(edge_keys[pos] == cand_keys) & g.above_min[pos]]
    else:
        found = np.empty(0, dtype=np.int64)
    for i, u, v, du, dv in zip(
        found.tolist(),
        g.us[found].tolist(),
        g.vs[found].tolist(),
        g.dirs_u[found].tolist(),
        g.dirs_v[found].tolist(),
    ):
        if m.can_add_values(u, v, du, dv, quota):
            m.add(g.edge(i))
    runtime = time.perf_counter() - start
    return MatchingResult(matching=m, runtime_s=runtime, churn=len(m))
