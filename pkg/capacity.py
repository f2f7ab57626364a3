"""
Shannon capacity of LoS transfer matrices and capacity-gain distance sweeps.

Capacity follows the SVD of H with water-filling over the non-zero
singular values; the capacity gain (CG) of a link is its capacity divided
by the capacity of the reference SISO link at the calibrated receiving SNR.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np
from scipy.optimize import bisect

from channel import LinkSystem, TransferMatrix, calibrate_total_power
from geometry import LinkGeometry

logger = logging.getLogger(__name__)

RANK_CUTOFF = 1e-12


class RankZeroChannelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PowerAllocation:
    powers: np.ndarray
    total: float
    water_level: float

    @property
    def active(self) -> np.ndarray:
        return self.powers > 0


@dataclass(frozen=True, eq=False)
class CapacityCurve:
    """CG versus distance for one system."""
    distances: np.ndarray  # meters, strictly increasing
    capacity_gain: np.ndarray
    capacity_bits: np.ndarray
    wavelength: float
    label: str = ""
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.distances) <= 0):
            raise ValueError("Curve distances must be strictly increasing")

    @property
    def distances_wavelengths(self) -> np.ndarray:
        return self.distances / self.wavelength

    @property
    def peak_cg(self) -> float:
        return float(np.max(self.capacity_gain))


def waterfill(singular_values: Sequence[float], p_total: float, noise_variance: float) -> PowerAllocation:
    """
    Water-filling power allocation over parallel subchannels.

    Args:
        singular_values: Subchannel amplitude gains nu_k (>= 0)
        p_total: Total power to distribute
        noise_variance: Noise power sigma_n^2

    Returns:
        PowerAllocation with P_k = max(0, mu - sigma^2 / nu_k^2) summing to p_total

    Raises:
        RankZeroChannelError: If every singular value is zero
    """
    nu = np.asarray(singular_values, dtype=float)
    if np.any(nu < 0):
        raise ValueError("Singular values must be non-negative")
    if p_total <= 0:
        raise ValueError(f"Total power must be positive, got {p_total}")
    if not np.any(nu > 0):
        raise RankZeroChannelError("rank-zero channel")

    floors = np.full(nu.shape, np.inf)
    floors[nu > 0] = noise_variance / nu[nu > 0] ** 2
    # levels are measured from the lowest floor so the bracket [0, p_total] is exact
    base = floors[np.isfinite(floors)].min()
    heights = floors - base

    def excess(level: float) -> float:
        return float(np.sum(np.maximum(0.0, level - heights)) - p_total)

    level = bisect(excess, 0.0, p_total, rtol=1e-12, xtol=1e-300, maxiter=500)

    # snap to the closed form on the active set so the powers sum exactly
    active = heights < level
    if not active.any():
        active = heights == 0.0
    for _ in range(nu.size + 1):
        level = (p_total + heights[active].sum()) / active.sum()
        refined = heights < level
        if np.array_equal(refined, active):
            break
        active = refined

    powers = np.where(active, level - heights, 0.0)
    return PowerAllocation(powers, float(p_total), float(base + level))


def _effective_singular_values(H: TransferMatrix) -> np.ndarray:
    nu = H.singular_values()
    if nu.size == 0 or nu[0] == 0:
        raise RankZeroChannelError("rank-zero channel")
    return nu[nu > RANK_CUTOFF * nu[0]]


def capacity(H: TransferMatrix, p_total: float, noise_variance: float) -> float:
    """Water-filled Shannon capacity in bits/s/Hz."""
    nu = _effective_singular_values(H)
    allocation = waterfill(nu, p_total, noise_variance)
    return float(np.sum(np.log2(1 + nu ** 2 * allocation.powers / noise_variance)))


@dataclass(frozen=True)
class SweepScenario:
    """
    One capacity-gain curve: a system on a geometry template swept over distance.

    Args:
        system: Transmitter family and its groups/orders
        geometry: Template; its distance is replaced by each grid value
        target_snr_db: Receiving SNR of the reference SISO link at every distance
        distances: Grid in meters, strictly increasing
        noise_variance: sigma_n^2
        beta_a: Common antenna gain factor
        label: Curve name used in outputs
    """
    system: LinkSystem
    geometry: LinkGeometry
    target_snr_db: float
    distances: Sequence[float]
    noise_variance: float = 1.0
    beta_a: float = 1.0
    label: str = ""


def log_distance_grid(wavelength: float, start_wavelengths: float = 10.0,
                      stop_wavelengths: float = 2000.0, points: int = 400) -> np.ndarray:
    """Log-spaced distance grid in meters."""
    return wavelength * np.geomspace(start_wavelengths, stop_wavelengths, points)


def _cg_point(scenario: SweepScenario, distance: float) -> float:
    geom = scenario.geometry.with_distance(distance)
    p_total = calibrate_total_power(geom, scenario.target_snr_db, scenario.noise_variance, scenario.beta_a)
    H = scenario.system.build(geom, scenario.beta_a)
    return capacity(H, p_total, scenario.noise_variance)


def capacity_gain_sweep(scenario: SweepScenario, threads: int = 1) -> CapacityCurve:
    """
    CG over SISO for every distance of the scenario grid.

    Points are independent; with threads > 1 they are evaluated in a pool
    and reassembled in grid order.
    """
    distances = np.asarray(scenario.distances, dtype=float)
    if distances.size == 0:
        raise ValueError("Distance grid must not be empty")
    if np.any(np.diff(distances) <= 0):
        raise ValueError("Distance grid must be strictly increasing")

    label = scenario.label or scenario.system.describe()
    logger.info(f"Sweeping CG for {label} over {distances.size} distances")

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            bits = list(executor.map(lambda d: _cg_point(scenario, d), distances))
    else:
        bits = [_cg_point(scenario, d) for d in distances]
    bits = np.array(bits)

    siso_bits = np.log2(1 + 10 ** (scenario.target_snr_db / 10))
    metadata = {
        "system": scenario.system.kind.value,
        "mode_groups": [mg.label() for mg in scenario.system.mode_groups],
        "orders": list(scenario.system.orders),
        "target_snr_db": scenario.target_snr_db,
        "tx_aperture": scenario.geometry.tx_aperture,
        "rx_aperture": scenario.geometry.rx_aperture,
    }
    return CapacityCurve(distances, bits / siso_bits, bits, scenario.geometry.wavelength, label, metadata)


def distance_at_cg(curve: CapacityCurve, target_cg: float, rtol: float = 1e-3) -> float:
    """
    Largest distance at which the curve still reaches the target CG.

    A point reaches the target when CG >= target * (1 - rtol). The crossing
    is refined by linear interpolation towards the next grid point.

    Returns:
        Distance in meters

    Raises:
        ValueError: If the target is never reached or is not bracketed by the grid
    """
    threshold = target_cg * (1 - rtol)
    reached = np.nonzero(curve.capacity_gain >= threshold)[0]
    if reached.size == 0:
        raise ValueError(f"target CG unreachable: peak {curve.peak_cg:.4f} < {target_cg}")
    i = int(reached[-1])
    if i == curve.distances.size - 1:
        raise ValueError(f"target CG not bracketed: CG >= {threshold:.4f} up to the last grid distance")

    d0, d1 = curve.distances[i], curve.distances[i + 1]
    g0, g1 = curve.capacity_gain[i], curve.capacity_gain[i + 1]
    return float(d0 + (threshold - g0) * (d1 - d0) / (g1 - g0))


def crossing_table(curves: List[CapacityCurve], targets: Sequence[float], rtol: float = 1e-3) -> List[Dict[str, object]]:
    """Crossing distance of every curve for every target; unreachable targets are logged and skipped."""
    rows = []
    for curve in curves:
        for target in targets:
            try:
                distance = distance_at_cg(curve, target, rtol)
            except ValueError as e:
                logger.warning(f"No crossing for {curve.label} at CG={target}: {e}")
                continue
            rows.append({
                "system": curve.label,
                "target_cg": target,
                "distance_wavelengths": distance / curve.wavelength,
                "distance_meters": distance,
                "peak_cg": curve.peak_cg,
            })
    return rows
