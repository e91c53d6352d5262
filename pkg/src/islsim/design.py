"""Constellation-design helpers: worst-case nearest-neighbor slant range
between adjacent planes and the EIRPG required for full inter-plane
connectivity at the configured minimum rate.

The closed form evaluates the inter-satellite chord at polar angle pi/2 (the
equator, where adjacent planes are farthest apart) with the neighbor offset
by a worst-case phase gap, checked over every adjacent plane pair so
arbitrary altitude rules are handled. The default gap is the full intra-
plane spacing ``2*pi/N_p``: the worst phase misalignment between a satellite
and the same-index (same logical location) satellite of the next plane. A
nearest-neighbor argument halves that gap to ``pi/N_p``; sizing the link
budget with the full gap is conservative and leaves margin for matching
schemes that pair satellites by location rather than by distance.
"""

from __future__ import annotations

import math

import numpy as np

from . import linkbudget
from .geometry import ConstellationConfig
from .linkbudget import RadioConfig


def max_adjacent_range(cfg: ConstellationConfig, phase_gap_rad: float | None = None) -> float:
    """Worst-case slant range [m] to the neighbor satellite one plane over.

    Closed form at the equator crossing: for planes (p, p+1) at radii
    ``r_p, r_q`` separated by longitude ``de``, the chord is
    ``sqrt(r_p^2 + r_q^2 - 2 r_p r_q cos(de) cos(gap))``; the maximum over
    plane pairs is returned.
    """
    if phase_gap_rad is None:
        phase_gap_rad = 2.0 * math.pi / cfg.sats_per_plane
    best = 0.0
    for p in range(1, cfg.num_planes):
        r_p = cfg.orbit_radius_m(p)
        r_q = cfg.orbit_radius_m(p + 1)
        de = cfg.longitude_rad(p + 1) - cfg.longitude_rad(p)
        x = math.cos(de) * math.cos(phase_gap_rad)
        best = max(best, math.sqrt(r_p**2 + r_q**2 - 2.0 * r_p * r_q * x))
    return best


def grid_adjacent_range(
    cfg: ConstellationConfig,
    phase_gap_rad: float | None = None,
    theta_samples: int = 2000,
    gap_samples: int = 200,
) -> float:
    """Brute-force maximization of the adjacent-plane chord.

    Sweeps the satellite's polar angle over the full orbit and the neighbor
    offset over ``[0, phase_gap]`` for every adjacent plane pair; cross-
    checks the closed form, which pins the polar angle to the equator.
    """
    if phase_gap_rad is None:
        phase_gap_rad = 2.0 * math.pi / cfg.sats_per_plane
    theta = np.linspace(0.0, 2.0 * math.pi, theta_samples, endpoint=False)
    gaps = np.linspace(0.0, phase_gap_rad, gap_samples)
    th, dg = np.meshgrid(theta, gaps, indexing="ij")
    best = 0.0
    for p in range(1, cfg.num_planes):
        r_p = cfg.orbit_radius_m(p)
        r_q = cfg.orbit_radius_m(p + 1)
        de = cfg.longitude_rad(p + 1) - cfg.longitude_rad(p)
        x = np.cos(th) * np.cos(th + dg) + math.cos(de) * np.sin(th) * np.sin(th + dg)
        d = np.sqrt(r_p**2 + r_q**2 - 2.0 * r_p * r_q * x)
        best = max(best, float(d.max()))
    return best


def required_eirpg(
    cfg: ConstellationConfig,
    carrier_hz: float,
    bandwidth_hz: float,
    noise_temp_k: float,
    min_rate_bps: float,
    phase_gap_rad: float | None = None,
) -> float:
    """Smallest EIRPG [W] that closes the link at the worst-case adjacent range.

    The maximum path loss is the free-space loss at ``max_adjacent_range``;
    the returned power sustains the minimum rate exactly at that loss, which
    guarantees every satellite at least one reachable inter-plane neighbor.
    """
    radio = RadioConfig(
        carrier_hz=carrier_hz,
        bandwidth_hz=bandwidth_hz,
        noise_temp_k=noise_temp_k,
        eirpg_w=1.0,
        min_rate_bps=min_rate_bps,
    )
    mpl = linkbudget.fspl(radio, max_adjacent_range(cfg, phase_gap_rad))
    return linkbudget.min_eirpg(radio, mpl)
