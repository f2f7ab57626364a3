"""
Planar placement of transmit and receive elements for line-of-sight links.

All geometry lives in the horizontal plane. Boresight is the +x axis: the
transmit array is centred on the origin and the receive array on (D, 0),
with ULA elements spread along y.
"""
import logging
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.constants import speed_of_light

logger = logging.getLogger(__name__)


class TxLayout(str, Enum):
    COAXIAL = "coaxial"
    ULA = "ula"


class Side(str, Enum):
    TX = "tx"
    RX = "rx"


def wavelength_from_frequency(frequency_hz: float) -> float:
    """Free-space wavelength in meters for a carrier frequency in Hz."""
    if frequency_hz <= 0:
        raise ValueError(f"Frequency must be positive, got {frequency_hz}")
    return speed_of_light / frequency_hz


@dataclass(frozen=True)
class LinkGeometry:
    """
    Positions of a point-to-point link.

    Args:
        distance: Boresight separation D between array centroids (m)
        wavelength: Carrier wavelength (m)
        n_tx: Number of transmit elements
        n_rx: Number of receive elements
        rx_aperture: Total span A_r of the receive ULA (m)
        tx_layout: Coaxial (all elements at the origin) or ULA
        tx_aperture: Total span A_t of the transmit ULA (m), ignored when coaxial
    """
    distance: float
    wavelength: float
    n_tx: int = 2
    n_rx: int = 2
    rx_aperture: float = 0.0
    tx_layout: TxLayout = TxLayout.COAXIAL
    tx_aperture: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "tx_layout", TxLayout(self.tx_layout))
        if not self.distance > 0:
            raise ValueError(f"Distance must be positive, got {self.distance}")
        if not self.wavelength > 0:
            raise ValueError(f"Wavelength must be positive, got {self.wavelength}")
        if self.n_tx < 1 or self.n_rx < 1:
            raise ValueError(f"Element counts must be positive, got n_tx={self.n_tx}, n_rx={self.n_rx}")
        if self.rx_aperture < 0:
            raise ValueError(f"Receive aperture must be non-negative, got {self.rx_aperture}")
        if self.tx_layout is TxLayout.ULA and self.tx_aperture < 0:
            raise ValueError(f"Transmit aperture must be non-negative, got {self.tx_aperture}")

    @property
    def wavenumber(self) -> float:
        return 2 * np.pi / self.wavelength

    def with_distance(self, distance: float) -> "LinkGeometry":
        return replace(self, distance=distance)

    def reversed(self) -> "LinkGeometry":
        """Swap the roles of both ULAs (requires a ULA transmitter)."""
        if self.tx_layout is not TxLayout.ULA:
            raise ValueError("Only ULA/ULA links can be reversed")
        return replace(
            self,
            n_tx=self.n_rx,
            n_rx=self.n_tx,
            tx_aperture=self.rx_aperture,
            rx_aperture=self.tx_aperture,
        )


def _ula_offsets(n: int, aperture: float) -> np.ndarray:
    # most-negative transverse coordinate first; singleton sits on the centroid
    if n == 1:
        return np.zeros(1)
    return np.linspace(-aperture / 2, aperture / 2, n)


def element_positions(geom: LinkGeometry, side: Side) -> np.ndarray:
    """
    Element coordinates for one end of the link.

    Args:
        geom: Link geometry
        side: Side.TX or Side.RX

    Returns:
        Array of shape (n, 2) with (x, y) in meters
    """
    side = Side(side)
    if side is Side.TX:
        if geom.tx_layout is TxLayout.COAXIAL:
            return np.zeros((geom.n_tx, 2))
        offsets = _ula_offsets(geom.n_tx, geom.tx_aperture)
        return np.column_stack([np.zeros(geom.n_tx), offsets])

    offsets = _ula_offsets(geom.n_rx, geom.rx_aperture)
    return np.column_stack([np.full(geom.n_rx, float(geom.distance)), offsets])


def path_distance(p, q) -> float:
    """Euclidean distance between two planar points."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return float(np.hypot(q[0] - p[0], q[1] - p[1]))


def azimuth_from_tx(tx, rx) -> float:
    """
    Azimuth of the receiver seen from the transmitter, measured from boresight.

    Returns:
        Angle in (-pi, pi]; exactly 0 on boresight

    Raises:
        ValueError: If both points coincide
    """
    tx = np.asarray(tx, dtype=float)
    rx = np.asarray(rx, dtype=float)
    dx, dy = rx[0] - tx[0], rx[1] - tx[1]
    if dx == 0 and dy == 0:
        raise ValueError("undefined azimuth: transmitter and receiver coincide")
    return float(np.arctan2(dy, dx))


def rayleigh_distance(aperture: float, wavelength: float) -> float:
    """Near/far-field boundary 2*A^2/lambda."""
    if aperture < 0:
        raise ValueError(f"Aperture must be non-negative, got {aperture}")
    if wavelength <= 0:
        raise ValueError(f"Wavelength must be positive, got {wavelength}")
    return 2 * aperture ** 2 / wavelength
