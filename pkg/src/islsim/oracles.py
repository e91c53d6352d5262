"""Brute-force reference implementations for small instances.

These deliberately avoid the production shortcuts: the matching optimum is
found by exhaustive search over permissible pair sets, worst-case
interference by enumerating every permissible activation pattern, and the
allocation optimum by trying every resource assignment. They back the
property tests and the ``oracle`` CLI subcommand.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from . import linkbudget
from .allocation import committed_rate
from .geometry import Constellation, ConstellationConfig, build_constellation
from .graph import Allocation, Edge, FeasibilityGraph, Matching, PairKey, build_feasibility_graph
from .linkbudget import Antenna, RadioConfig, ResourceSet


def random_small_instance(
    rng: np.random.Generator,
    max_planes: int = 4,
    sats_per_plane: int = 2,
    antenna: Antenna = Antenna.ISOTROPIC,
) -> tuple[Constellation, RadioConfig, FeasibilityGraph]:
    """Random tiny constellation plus its feasibility graph.

    Random per-plane phase offsets break the symmetric geometry so the
    greedy and brute-force searches see varied weight structures.
    """
    planes = int(rng.integers(3, max_planes + 1))
    cfg = ConstellationConfig(
        num_planes=planes,
        sats_per_plane=sats_per_plane,
        base_altitude_m=float(rng.uniform(500e3, 1200e3)),
        altitude_step_m=float(rng.uniform(0.0, 50e3)),
        phase_offsets_rad=tuple(float(x) for x in rng.uniform(0.0, 2.0 * np.pi, planes)),
    )
    radio = RadioConfig(
        carrier_hz=2.4e9,
        bandwidth_hz=20e6,
        noise_temp_k=354.81,
        eirpg_w=float(rng.uniform(1.0, 20.0)),
        min_rate_bps=10e3,
        antenna=antenna,
    )
    c = build_constellation(cfg)
    return c, radio, build_feasibility_graph(c, radio)


def best_matching_weight(edges: list[Edge], num_vertices: int, quota: int) -> float:
    """Maximum total weight over all permissible subsets of the given edges.

    Depth-first include/exclude search with degree and direction state;
    exponential, intended for instances of at most a dozen edges beyond the
    matching size.
    """
    edges = sorted(edges, key=lambda e: (-e.weight_snr_bps, e.key))
    suffix = [0.0] * (len(edges) + 1)
    for i in range(len(edges) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + edges[i].weight_snr_bps

    best = 0.0
    m = Matching(num_vertices)

    def search(i: int, acc: float):
        nonlocal best
        if acc + suffix[i] <= best:
            return
        if i == len(edges):
            best = max(best, acc)
            return
        e = edges[i]
        if m.can_add(e, quota):
            m.add(e)
            search(i + 1, acc + e.weight_snr_bps)
            m.remove(e)
        search(i + 1, acc)

    search(0, 0.0)
    return best


def enumerate_worst_interference(
    c: Constellation,
    cfg: RadioConfig,
    alloc: Allocation,
    rx_id: int,
    pair: PairKey,
    k: int,
) -> float:
    """Worst-case interference by enumerating every permissible pattern.

    Each co-channel pair is idle, or transmits from one endpoint, or from
    the other; all 3^n combinations are evaluated.
    """
    if cfg.antenna is linkbudget.Antenna.NARROW_BEAM:
        return 0.0
    others = [key for key, kk in alloc.assignments.items() if kk == k and key != pair]
    worst = 0.0
    for choice in itertools.product((None, 0, 1), repeat=len(others)):
        total = 0.0
        for key, who in zip(others, choice):
            if who is None:
                continue
            tx = key[who]
            total += cfg.eirpg_w / linkbudget.interference_loss(c, cfg, tx, rx_id)
        worst = max(worst, total)
    return worst


def enumerated_rate(
    c: Constellation,
    cfg: RadioConfig,
    rs: ResourceSet,
    alloc: Allocation,
    rx_id: int,
    pair: PairKey,
    k: int,
) -> float:
    """Committed rate using the enumerated (not closed-form) worst case."""
    e = alloc.edges[pair]
    loss = linkbudget.fspl(cfg, e.dist_m)
    interference = enumerate_worst_interference(c, cfg, alloc, rx_id, pair, k)
    return committed_rate(cfg, rs, loss, interference)


def best_allocation_value(
    c: Constellation, cfg: RadioConfig, rs: ResourceSet, m: Matching
) -> tuple[float, dict[PairKey, int]]:
    """Optimal allocation by exhaustive search over all K^M assignments."""
    pairs = sorted(m, key=lambda e: (-e.weight_snr_bps, e.key))
    best_val = -math.inf
    best_assign: dict[PairKey, int] = {}
    for combo in itertools.product(rs.resources, repeat=len(pairs)):
        alloc = Allocation()
        for e, k in zip(pairs, combo):
            alloc.add(e, k)
        total = 0.0
        for e, k in zip(pairs, combo):
            loss = linkbudget.fspl(cfg, e.dist_m)
            for rx in e.key:
                interference = linkbudget.worst_case_interference(c, cfg, alloc, rx, e.key, k)
                total += committed_rate(cfg, rs, loss, interference)
        if total > best_val:
            best_val = total
            best_assign = dict(zip((e.key for e in pairs), combo))
    return best_val, best_assign
