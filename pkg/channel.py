"""
Line-of-sight transfer matrices for conventional MIMO, MG-MIMO and PSOAM-MIMO.

Entry (m, n) is the free-space response from transmit element n to receive
element m, optionally weighted by the beam pattern of the mode-group that
element n radiates:

    h_mn = beta_a * lambda / (4 pi d_mn) * exp(-j k d_mn) * BP_n(phi_mn)
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import svd

from geometry import LinkGeometry, Side, element_positions
from modegroup import FeedErrorModel, ModeGroup, beam_pattern, perturb

logger = logging.getLogger(__name__)


class ChannelKind(str, Enum):
    MIMO = "mimo"
    MG_MIMO = "mg_mimo"
    PSOAM_MIMO = "psoam_mimo"


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """Complex n_rx x n_tx amplitude gains with their provenance."""
    entries: np.ndarray
    wavelength: float
    kind: ChannelKind
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2:
            raise ValueError(f"Transfer matrix must be 2-D, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ValueError("Transfer matrix entries must be finite")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "kind", ChannelKind(self.kind))

    @property
    def n_rx(self) -> int:
        return self.entries.shape[0]

    @property
    def n_tx(self) -> int:
        return self.entries.shape[1]

    def singular_values(self) -> np.ndarray:
        return svd(self.entries, compute_uv=False)


@dataclass(frozen=True)
class NoiseModel:
    """Circular complex AWGN per receive element; variance 0 is a noiseless link."""
    variance: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not np.isfinite(self.variance) or self.variance < 0:
            raise ValueError(f"Noise variance must be finite and non-negative, got {self.variance}")


def channel_matrix(
    tx_positions: np.ndarray,
    rx_positions: np.ndarray,
    wavelength: float,
    mode_groups: Optional[Sequence[ModeGroup]] = None,
    beta_a: float = 1.0,
) -> np.ndarray:
    """
    Raw LoS matrix between arbitrary element positions.

    Args:
        tx_positions: (n_tx, 2) transmit coordinates in meters
        rx_positions: (n_rx, 2) receive coordinates in meters
        wavelength: Carrier wavelength in meters
        mode_groups: One mode-group per transmit element, or None for BP = 1
        beta_a: Common antenna gain factor

    Returns:
        Complex array of shape (n_rx, n_tx)

    Raises:
        ValueError: If a transmit/receive pair coincides or the group count is wrong
    """
    tx_positions = np.asarray(tx_positions, dtype=float)
    rx_positions = np.asarray(rx_positions, dtype=float)
    dx = rx_positions[:, None, 0] - tx_positions[None, :, 0]
    dy = rx_positions[:, None, 1] - tx_positions[None, :, 1]
    distances = np.hypot(dx, dy)
    if np.any(distances == 0):
        raise ValueError("zero propagation distance between a transmit and a receive element")

    k = 2 * np.pi / wavelength
    entries = beta_a * (wavelength / (4 * np.pi * distances)) * np.exp(-1j * k * distances)

    if mode_groups is not None:
        if len(mode_groups) != tx_positions.shape[0]:
            raise ValueError(
                f"Need one mode-group per transmit element: got {len(mode_groups)} for {tx_positions.shape[0]}"
            )
        azimuths = np.arctan2(dy, dx)
        patterns = np.column_stack([beam_pattern(mg, azimuths[:, n]) for n, mg in enumerate(mode_groups)])
        entries = entries * patterns
    return entries


def build_mimo_channel(geom: LinkGeometry, beta_a: float = 1.0) -> TransferMatrix:
    """Conventional MIMO channel: path loss and propagation phase only."""
    entries = channel_matrix(
        element_positions(geom, Side.TX), element_positions(geom, Side.RX), geom.wavelength, beta_a=beta_a
    )
    return TransferMatrix(entries, geom.wavelength, ChannelKind.MIMO, {"distance": geom.distance})


def build_mg_channel(
    geom: LinkGeometry,
    mgs: Sequence[ModeGroup],
    beta_a: float = 1.0,
    kind: ChannelKind = ChannelKind.MG_MIMO,
) -> TransferMatrix:
    """MG-MIMO channel: each column weighted by its group's pattern at the receiver azimuths."""
    if len(mgs) != geom.n_tx:
        raise ValueError(f"Need {geom.n_tx} mode-groups, got {len(mgs)}")
    entries = channel_matrix(
        element_positions(geom, Side.TX), element_positions(geom, Side.RX), geom.wavelength, mgs, beta_a
    )
    metadata = {"distance": geom.distance, "mode_groups": [mg.label() for mg in mgs]}
    return TransferMatrix(entries, geom.wavelength, kind, metadata)


def build_psoam_channel(geom: LinkGeometry, orders: Sequence[int], beta_a: float = 1.0) -> TransferMatrix:
    """PSOAM-MIMO: the MG channel with single-mode groups."""
    mgs = [ModeGroup.from_orders([order]) for order in orders]
    return build_mg_channel(geom, mgs, beta_a, kind=ChannelKind.PSOAM_MIMO)


def reference_gain(geom: LinkGeometry, beta_a: float = 1.0) -> float:
    """|h_ref| of a unit-gain element at the transmit centroid to one at the receive centroid."""
    return beta_a * geom.wavelength / (4 * np.pi * geom.distance)


def calibrate_total_power(geom: LinkGeometry, target_snr_db: float, noise_variance: float, beta_a: float = 1.0) -> float:
    """Total transmit power giving the reference SISO link the requested receiving SNR."""
    if not np.isfinite(target_snr_db):
        raise ValueError(f"Target SNR must be finite, got {target_snr_db}")
    snr = 10 ** (target_snr_db / 10)
    return snr * noise_variance / reference_gain(geom, beta_a) ** 2


def received_signal_power(H: TransferMatrix, p_total: float) -> np.ndarray:
    """Mean received signal power per receiver with P_total split equally over the streams."""
    return np.sum(np.abs(H.entries) ** 2, axis=1) * p_total / H.n_tx


@dataclass(frozen=True)
class LinkSystem:
    """
    Which transmitter family drives the link.

    MG-MIMO needs one mode-group per transmit element; PSOAM-MIMO one order
    per element; conventional MIMO neither.
    """
    kind: ChannelKind = ChannelKind.MIMO
    mode_groups: Tuple[ModeGroup, ...] = ()
    orders: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", ChannelKind(self.kind))
        object.__setattr__(self, "mode_groups", tuple(self.mode_groups))
        object.__setattr__(self, "orders", tuple(int(o) for o in self.orders))
        if self.kind is ChannelKind.MG_MIMO and not self.mode_groups:
            raise ValueError("MG-MIMO needs mode-groups")
        if self.kind is ChannelKind.PSOAM_MIMO and not self.orders:
            raise ValueError("PSOAM-MIMO needs mode orders")

    def transmitter_groups(self) -> Optional[Tuple[ModeGroup, ...]]:
        if self.kind is ChannelKind.MG_MIMO:
            return self.mode_groups
        if self.kind is ChannelKind.PSOAM_MIMO:
            return tuple(ModeGroup.from_orders([o]) for o in self.orders)
        return None

    def build(
        self,
        geom: LinkGeometry,
        beta_a: float = 1.0,
        feed_error: Optional[FeedErrorModel] = None,
    ) -> TransferMatrix:
        """Transfer matrix for this system on the given geometry."""
        if self.kind is ChannelKind.MIMO:
            return build_mimo_channel(geom, beta_a)
        if self.kind is ChannelKind.PSOAM_MIMO:
            return build_psoam_channel(geom, self.orders, beta_a)

        mgs = list(self.mode_groups)
        if feed_error is not None and not feed_error.is_ideal:
            mgs = [
                perturb(mg, FeedErrorModel(feed_error.amplitude_error_rms, feed_error.phase_error_rms, feed_error.seed + i))
                for i, mg in enumerate(mgs)
            ]
        return build_mg_channel(geom, mgs, beta_a)

    def describe(self) -> str:
        if self.kind is ChannelKind.MG_MIMO:
            return "MG-MIMO " + " x ".join(mg.label() for mg in self.mode_groups)
        if self.kind is ChannelKind.PSOAM_MIMO:
            return "PSOAM-MIMO l=" + ",".join(str(o) for o in self.orders)
        return "MIMO"
