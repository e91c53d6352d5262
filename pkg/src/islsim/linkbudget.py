"""Link-budget model: free-space path loss, SNR/SINR, achievable rates,
worst-case interference, access-scheme effective rates, and EIRPG sizing.

Path loss is a dimensionless power ratio; an infinite loss is the sentinel
for blocked (NLoS) paths and makes every derived rate exactly zero. The
product ``EIRPG = P_t * G_max^2`` collapses transmit power and both antenna
gains into one configured value that feeds the signal term always and the
interference terms in the isotropic scenario (where ``G_max = 1``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .constants import BOLTZMANN_J_K, LIGHT_SPEED_M_S
from . import geometry

if TYPE_CHECKING:  # pragma: no cover
    from .graph import Allocation, Edge


class Antenna(str, enum.Enum):
    """Bounding antenna scenarios: perfect narrow beams or isotropic radiators."""

    NARROW_BEAM = "narrow_beam"
    ISOTROPIC = "isotropic"


class AccessScheme(str, enum.Enum):
    ORTHOGONAL_SUBCARRIERS = "ofdma"
    SPREADING_CODES = "cdma"


@dataclass(frozen=True)
class RadioConfig:
    """Radio parameters for every inter-plane link."""

    carrier_hz: float
    bandwidth_hz: float
    noise_temp_k: float
    eirpg_w: float
    min_rate_bps: float
    antenna: Antenna = Antenna.NARROW_BEAM
    light_speed_m_s: float = LIGHT_SPEED_M_S
    boltzmann_j_k: float = BOLTZMANN_J_K

    def __post_init__(self):
        for name in ("carrier_hz", "bandwidth_hz", "noise_temp_k", "eirpg_w", "min_rate_bps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def noise_power_w(self) -> float:
        return self.boltzmann_j_k * self.noise_temp_k * self.bandwidth_hz

    @property
    def min_snr(self) -> float:
        """SNR threshold below which the minimum rate cannot be met."""
        return 2.0 ** (self.min_rate_bps / self.bandwidth_hz) - 1.0

    @property
    def max_path_loss(self) -> float:
        """Largest loss at which the minimum rate is still achievable."""
        return self.eirpg_w / (self.noise_power_w * self.min_snr)


@dataclass(frozen=True)
class ResourceSet:
    """Pool of orthogonal wireless resources shared by the matched pairs."""

    num_resources: int
    access_scheme: AccessScheme = AccessScheme.ORTHOGONAL_SUBCARRIERS

    def __post_init__(self):
        if self.num_resources < 1:
            raise ValueError("num_resources must be >= 1")

    @property
    def resources(self) -> range:
        return range(1, self.num_resources + 1)


def fspl(cfg: RadioConfig, dist_m: float, los: bool = True) -> float:
    """Free-space path loss factor; infinite when the path is blocked."""
    if not los:
        return math.inf
    if dist_m < 0:
        raise ValueError("dist_m must be non-negative")
    if dist_m == 0:
        # The self-interference convention (unit loss at a satellite's own
        # receiver) is applied explicitly by interference calculations.
        raise ValueError("zero-distance path loss is undefined; loss at self is 1 by convention")
    return (4.0 * math.pi * dist_m * cfg.carrier_hz / cfg.light_speed_m_s) ** 2


def snr(cfg: RadioConfig, loss: float) -> float:
    """Signal-to-noise ratio for the given path loss (0 for infinite loss)."""
    if loss <= 0:
        raise ValueError("loss must be positive")
    if math.isinf(loss):
        return 0.0
    return cfg.eirpg_w / (cfg.noise_power_w * loss)


def rate_snr(cfg: RadioConfig, snr_value: float) -> float:
    """Shannon rate over the full band at the given SNR."""
    if snr_value < 0:
        raise ValueError("snr_value must be non-negative")
    return cfg.bandwidth_hz * math.log2(1.0 + snr_value)


def rate_sinr(cfg: RadioConfig, loss: float, interference_w: float) -> float:
    """Shannon rate over the full band with the given interference power."""
    if loss <= 0:
        raise ValueError("loss must be positive")
    if interference_w < 0:
        raise ValueError("interference_w must be non-negative")
    if math.isinf(loss) or math.isinf(interference_w):
        return 0.0
    sinr = cfg.eirpg_w / (loss * (cfg.noise_power_w + interference_w))
    return cfg.bandwidth_hz * math.log2(1.0 + sinr)


def effective_rate(cfg: RadioConfig, rs: ResourceSet, loss: float, interference_w: float) -> float:
    """Rate after resource sharing under the configured access scheme.

    Orthogonal sub-carriers split the band: both the noise floor and the
    log prefactor use ``B/K``. Spreading codes keep the full band and divide
    the resulting rate by the spreading factor ``1 + log2(K)``.
    """
    k = rs.num_resources
    if rs.access_scheme is AccessScheme.ORTHOGONAL_SUBCARRIERS:
        if loss <= 0:
            raise ValueError("loss must be positive")
        if math.isinf(loss) or math.isinf(interference_w):
            return 0.0
        sub_band = cfg.bandwidth_hz / k
        noise = cfg.boltzmann_j_k * cfg.noise_temp_k * sub_band
        sinr = cfg.eirpg_w / (loss * (noise + interference_w))
        return sub_band * math.log2(1.0 + sinr)
    return rate_sinr(cfg, loss, interference_w) / (1.0 + math.log2(k))


def min_eirpg(cfg: RadioConfig, mpl: float) -> float:
    """Smallest EIRPG that sustains the minimum rate at the given path loss.

    Only bandwidth, noise temperature, and minimum rate are read from the
    config; its own ``eirpg_w`` is ignored.
    """
    if mpl <= 0:
        raise ValueError("mpl must be positive")
    return mpl * cfg.noise_power_w * cfg.min_snr


def interference_loss(c: "geometry.Constellation", cfg: RadioConfig, tx_id: int, rx_id: int) -> float:
    """Path-loss factor from a potential interferer to a receiver.

    Unit loss at the receiver's own transmitter (no self-interference
    cancellation); infinite when the Earth blocks the path.
    """
    if tx_id == rx_id:
        return 1.0
    tx = c.satellite(tx_id)
    rx = c.satellite(rx_id)
    d = geometry.distance(c, tx, rx)
    return fspl(cfg, d, los=geometry.has_los(c, tx, rx))


def pair_worst_contribution(
    c: "geometry.Constellation", cfg: RadioConfig, pair: tuple[int, int], rx_id: int
) -> float:
    """Worst-case interference power a co-channel pair can put on a receiver.

    At most one endpoint of the pair transmits at a time, so the worst case
    is the stronger-coupled endpoint transmitting (never less than zero).
    """
    i, j = pair
    return max(
        cfg.eirpg_w / interference_loss(c, cfg, i, rx_id),
        cfg.eirpg_w / interference_loss(c, cfg, j, rx_id),
        0.0,
    )


def worst_case_interference(
    c: "geometry.Constellation",
    cfg: RadioConfig,
    alloc: "Allocation",
    rx_id: int,
    pair: "Edge | tuple[int, int]",
    k: int,
) -> float:
    """Largest total interference [W] any permissible activation can create.

    For the receiver of the given pair on resource ``k``, every other pair
    sharing ``k`` contributes independently (one transmitter per pair at
    most), so the worst case is the sum of per-pair maxima. Narrow-beam
    antennas suppress interference entirely.
    """
    key = pair if isinstance(pair, tuple) else pair.key
    key = (min(key), max(key))
    if alloc.assignments.get(key) != k:
        raise ValueError(f"pair {key} is not allocated resource {k}")
    if rx_id not in key:
        raise ValueError(f"satellite {rx_id} is not an endpoint of pair {key}")
    if cfg.antenna is Antenna.NARROW_BEAM:
        return 0.0
    total = 0.0
    for other, other_k in alloc.assignments.items():
        if other_k != k or other == key:
            continue
        total += pair_worst_contribution(c, cfg, other, rx_id)
    return total
