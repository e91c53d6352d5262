import math

import pytest

from islsim import (
    ConstellationConfig,
    grid_adjacent_range,
    max_adjacent_range,
    required_eirpg,
)
from conftest import baseline_constellation

HALF_GAP = math.pi / 40
FULL_GAP = 2 * math.pi / 40


def test_adjacent_range_seven_plane_values():
    cfg = baseline_constellation(7)
    # Frozen closed-form values for the baseline seven-plane shell.
    assert max_adjacent_range(cfg) == pytest.approx(3297.3507e3, rel=1e-6)
    assert max_adjacent_range(cfg, HALF_GAP) == pytest.approx(3170.4233e3, rel=1e-6)


def test_adjacent_range_closed_form_matches_grid_search():
    # The closed form pins the polar angle to the equator; the free sweep
    # can beat it only by a sliver that shrinks with the phase gap.
    cfg = baseline_constellation(7)
    closed = max_adjacent_range(cfg, HALF_GAP)
    grid = grid_adjacent_range(cfg, HALF_GAP)
    assert abs(grid - closed) / closed < 1e-3
    full_grid = grid_adjacent_range(cfg, FULL_GAP)
    assert abs(full_grid - max_adjacent_range(cfg)) / full_grid < 4e-3


def test_adjacent_range_high_sat_count_limit():
    # With many satellites per plane the phase-gap term vanishes and the
    # range approaches the pure inter-plane chord at the equator.
    cfg = ConstellationConfig(
        num_planes=7, sats_per_plane=100000, base_altitude_m=600e3, altitude_step_m=10e3
    )
    r_6 = cfg.orbit_radius_m(6)
    r_7 = cfg.orbit_radius_m(7)
    chord = math.sqrt(r_6**2 + r_7**2 - 2 * r_6 * r_7 * math.cos(math.pi / 7))
    assert max_adjacent_range(cfg) == pytest.approx(chord, rel=1e-6)


def test_adjacent_range_checks_all_plane_pairs():
    # A descending altitude rule moves the worst pair away from the last
    # planes; the maximization must still find it.
    up = ConstellationConfig(
        num_planes=5, sats_per_plane=40, base_altitude_m=600e3, altitude_step_m=10e3
    )
    down = ConstellationConfig(
        num_planes=5, sats_per_plane=40, base_altitude_m=640e3, altitude_step_m=-10e3
    )
    assert max_adjacent_range(down) == pytest.approx(max_adjacent_range(up), rel=1e-9)


def test_required_eirpg_baseline_value():
    cfg = baseline_constellation(7)
    got = required_eirpg(cfg, 2.4e9, 20e6, 354.81, 10e3)
    assert got == pytest.approx(3.74, rel=0.03)
    assert got == pytest.approx(3.736707, rel=1e-5)  # frozen from the composition


def test_required_eirpg_decreases_with_more_planes():
    e7 = required_eirpg(baseline_constellation(7), 2.4e9, 20e6, 354.81, 10e3)
    e8 = required_eirpg(baseline_constellation(8), 2.4e9, 20e6, 354.81, 10e3)
    assert e8 < e7


def test_required_eirpg_vanishes_with_min_rate():
    # The threshold factor 2^(R/B)-1 is linear in R for small R, so the
    # required power goes to zero with the minimum rate.
    cfg = baseline_constellation(7)
    at_1mbit = required_eirpg(cfg, 2.4e9, 20e6, 354.81, 1e3)
    at_1bit = required_eirpg(cfg, 2.4e9, 20e6, 354.81, 1.0)
    assert at_1bit < 1e-3 * at_1mbit * 1.01
    assert at_1bit == pytest.approx(1e-3 * at_1mbit, rel=1e-3)


def test_design_runtime_is_fast():
    import time

    cfg = baseline_constellation(7)
    start = time.perf_counter()
    for _ in range(100):
        max_adjacent_range(cfg)
        required_eirpg(cfg, 2.4e9, 20e6, 354.81, 10e3)
    elapsed = (time.perf_counter() - start) / 100
    assert elapsed < 1e-3
