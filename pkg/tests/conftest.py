import pytest

from islsim import Antenna, ConstellationConfig, RadioConfig


def baseline_constellation(num_planes: int = 7) -> ConstellationConfig:
    return ConstellationConfig(
        num_planes=num_planes,
        sats_per_plane=40,
        base_altitude_m=600e3,
        altitude_step_m=10e3,
    )


def baseline_radio(antenna: Antenna = Antenna.ISOTROPIC) -> RadioConfig:
    return RadioConfig(
        carrier_hz=2.4e9,
        bandwidth_hz=20e6,
        noise_temp_k=354.81,
        eirpg_w=3.74,
        min_rate_bps=10e3,
        antenna=antenna,
    )


@pytest.fixture
def table_cfg():
    return baseline_constellation()


@pytest.fixture
def table_radio():
    return baseline_radio()
