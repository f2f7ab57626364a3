"""
Partial-arc sampling receiving (PASR).

Receivers sit uniformly on an equal-range arc around a coaxial MG
transmitter. Because an MG mainlobe carries the linear phase -l_e * phi,
phase-shifting each receiver and summing demultiplexes two MGs whose
equivalent orders differ by an integer multiple of the arc denominator.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from channel import channel_matrix
from geometry import wavelength_from_frequency
from modegroup import FeedErrorModel, ModeGroup, beam_pattern, equivalent_order, perturb

logger = logging.getLogger(__name__)

CROSSTALK_FLOOR_DB = -400.0
REFERENCE_DBM = 10.0


class PasrUndefinedError(ValueError):
    pass


def _check_vorticity(delta_le: float):
    if delta_le == 0:
        raise PasrUndefinedError("no vorticity difference, PASR undefined")


def pasr_aperture(distance: float, delta_le: float) -> float:
    """
    Receive aperture 2 * D * tan(pi / (2 * |dl_e|)) for a two-receiver arc.

    Args:
        distance: Link distance D in meters
        delta_le: Equivalent-order difference of the two MGs

    Raises:
        PasrUndefinedError: If delta_le is zero
    """
    _check_vorticity(delta_le)
    if distance <= 0:
        raise ValueError(f"Distance must be positive, got {distance}")
    return float(2 * distance * np.tan(np.pi / (2 * abs(delta_le))))


@dataclass(frozen=True)
class PasrArrangement:
    """
    Receivers on an arc of radius D, symmetric about boresight.

    Args:
        n_rx: Number of receivers N_r
        delta: Arc fraction denominator; neighbours are 2*pi/(delta*N_r) apart
        distance: Arc radius D in meters
        phase_shift_sets: Per demux target, one phase shift per receiver (radians)
    """
    n_rx: int
    delta: float
    distance: float
    phase_shift_sets: Tuple[Tuple[float, ...], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_rx < 2:
            raise ValueError(f"PASR needs at least two receivers, got {self.n_rx}")
        if not self.delta > 0:
            raise ValueError(f"Arc denominator must be positive, got {self.delta}")
        if not self.distance > 0:
            raise ValueError(f"Distance must be positive, got {self.distance}")
        sets = tuple(tuple(float(s) for s in shifts) for shifts in self.phase_shift_sets)
        if any(len(shifts) != self.n_rx for shifts in sets):
            raise ValueError(f"Every phase-shift set needs {self.n_rx} entries")
        object.__setattr__(self, "phase_shift_sets", sets)

    @property
    def neighbor_angle(self) -> float:
        """phi_s in radians."""
        return 2 * np.pi / (self.delta * self.n_rx)

    @property
    def azimuths(self) -> np.ndarray:
        return (np.arange(self.n_rx) - (self.n_rx - 1) / 2) * self.neighbor_angle

    @property
    def positions(self) -> np.ndarray:
        phi = self.azimuths
        return self.distance * np.column_stack([np.cos(phi), np.sin(phi)])

    @property
    def aperture(self) -> float:
        """Equivalent linear aperture spanned by the outermost receivers."""
        return float(2 * self.distance * np.tan((self.n_rx - 1) * self.neighbor_angle / 2))


def demux_phase_shifts(mg: ModeGroup, azimuths: Sequence[float]) -> Tuple[float, ...]:
    """
    Shifts that phase-align the mainlobe progression of one MG.

    The raw shifts -l_e * phi_r are wrapped to [0, 2*pi) and expressed
    relative to the receiver giving the smallest largest shift.
    """
    raw = np.mod(-float(equivalent_order(mg)) * np.asarray(azimuths, dtype=float), 2 * np.pi)
    candidates = [np.mod(raw - raw[r], 2 * np.pi) for r in range(raw.size)]
    best = min(candidates, key=lambda c: c.max())
    return tuple(float(s) for s in best)


def pasr_placement(
    distance: float,
    delta_le: float,
    n_rx: int = 2,
    k_prime: int = 1,
    mgs: Optional[Sequence[ModeGroup]] = None,
) -> PasrArrangement:
    """
    Place N_r receivers for a pair whose equivalent orders differ by delta_le.

    Args:
        distance: Arc radius D in meters
        delta_le: Equivalent-order difference
        n_rx: Number of receivers
        k_prime: delta = |delta_le| / k_prime
        mgs: Demux targets; one phase-shift set is derived per group

    Raises:
        PasrUndefinedError: If delta_le is zero
    """
    _check_vorticity(delta_le)
    if k_prime < 1:
        raise ValueError(f"k' must be a positive integer, got {k_prime}")
    arrangement = PasrArrangement(n_rx, abs(delta_le) / k_prime, distance)
    if mgs:
        shifts = tuple(demux_phase_shifts(mg, arrangement.azimuths) for mg in mgs)
        arrangement = PasrArrangement(n_rx, arrangement.delta, distance, shifts)
    logger.info(
        f"PASR placement: N_r={n_rx}, phi_s={np.rad2deg(arrangement.neighbor_angle):.4g} deg, "
        f"aperture={arrangement.aperture:.4g} m at D={distance} m"
    )
    return arrangement


def _is_equal_gain_group(mg: ModeGroup) -> bool:
    return mg.size == 1 or mg.is_consecutive()


def orthogonality_sum(mg1: ModeGroup, mg2: ModeGroup, arrangement: PasrArrangement) -> complex:
    """
    Sum over receivers of BP1 * conj(BP2), each term equalized to the common gain.

    The common gain gamma is the mean of |BP1||BP2| over the receivers; for
    two receivers placed symmetrically every weight is one.

    Raises:
        ValueError: For non-consecutive groups, unequal sizes, or a receiver on a null
    """
    if not (_is_equal_gain_group(mg1) and _is_equal_gain_group(mg2)):
        raise ValueError("Equal-gain sampling needs consecutive mode-groups")
    if mg1.size != mg2.size:
        raise ValueError(f"Equal-gain sampling needs equal group sizes, got {mg1.size} and {mg2.size}")

    phi = arrangement.azimuths
    bp1 = beam_pattern(mg1, phi)
    bp2 = beam_pattern(mg2, phi)
    gains = np.abs(bp1) * np.abs(bp2)
    if np.any(gains == 0):
        raise ValueError("A receiver sits on a pattern null")
    gamma = gains.mean()
    return complex(np.sum(gamma / gains * bp1 * np.conj(bp2)))


def analog_combine(received: np.ndarray, phase_shifts: Sequence[float]) -> np.ndarray:
    """
    Phase-shift and sum: sum_r received_r * exp(-j * shift_r).

    Args:
        received: (N_r, ...) complex samples, one row per receiver
        phase_shifts: N_r shifts in radians
    """
    received = np.asarray(received, dtype=complex)
    shifts = np.asarray(phase_shifts, dtype=float)
    if received.shape[0] != shifts.size:
        raise ValueError(f"Length mismatch: {received.shape[0]} receivers, {shifts.size} phase shifts")
    result = np.tensordot(np.exp(-1j * shifts), received, axes=1)
    if np.ndim(result) == 0:
        return complex(result)
    return result


@dataclass(frozen=True, eq=False)
class PowerTransferMatrix:
    """
    Received power per (transmitted tone, demux setting); the diagonal is expected.

    Powers are linear, relative to a unit-power transmitted tone.
    """
    powers: np.ndarray
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        powers = np.array(self.powers, dtype=float)
        if powers.ndim != 2 or powers.shape[0] != powers.shape[1]:
            raise ValueError(f"Power transfer matrix must be square, got shape {powers.shape}")
        if np.any(powers < 0) or not np.all(np.isfinite(powers)):
            raise ValueError("Powers must be finite and non-negative")
        powers.setflags(write=False)
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_dbm(cls, dbm, labels: Sequence[str] = (), reference_dbm: float = REFERENCE_DBM) -> "PowerTransferMatrix":
        return cls(10 ** ((np.asarray(dbm, dtype=float) - reference_dbm) / 10), tuple(labels))

    def dbm(self, reference_dbm: float = REFERENCE_DBM) -> np.ndarray:
        floored = np.maximum(self.powers, 10 ** (CROSSTALK_FLOOR_DB / 10))
        return reference_dbm + 10 * np.log10(floored)


def crosstalk(ptm: PowerTransferMatrix) -> np.ndarray:
    """
    CT_n = 10 log10(unexpected / expected) for every demux setting n, in dB.

    Raises:
        ValueError: If an expected power is zero
    """
    powers = ptm.powers
    expected = np.diag(powers)
    if np.any(expected == 0):
        raise ValueError("Expected received power is zero; crosstalk undefined")
    unexpected = np.where(np.eye(powers.shape[0], dtype=bool), 0.0, powers).sum(axis=0)
    ratio = np.maximum(unexpected / expected, 10 ** (CROSSTALK_FLOOR_DB / 10))
    return np.maximum(10 * np.log10(ratio), CROSSTALK_FLOOR_DB)


def pasr_experiment(
    mgs: Tuple[ModeGroup, ModeGroup],
    distance: float,
    tones: Tuple[float, float] = (-0.5e6, 0.5e6),
    error: Optional[FeedErrorModel] = None,
    wavelength: Optional[float] = None,
    n_rx: int = 2,
    k_prime: int = 1,
    sample_rate: float = 20e6,
    n_samples: int = 1000,
    beta_a: float = 1.0,
    placement_error_rms: float = 0.0,
    seed: int = 0,
) -> PowerTransferMatrix:
    """
    Two MGs each carry one CW tone to a PASR receiver; both demux settings are applied.

    Args:
        mgs: The multiplexed pair; tone i rides on mgs[i]
        distance: Arc radius D in meters
        tones: Baseband tone offsets in Hz
        error: Feeding-network error, drawn per MG with seed + index
        wavelength: Carrier wavelength (default 10.2 GHz)
        n_rx: Receivers on the arc
        k_prime: Arc denominator divisor
        sample_rate: Baseband sample rate in Hz
        n_samples: Samples per tone; tones should complete whole cycles
        beta_a: Common antenna gain factor
        placement_error_rms: Azimuth error of each receiver in radians
        seed: Seed for the placement error

    Returns:
        PowerTransferMatrix indexed by (tone, setting)
    """
    if len(mgs) != 2 or len(tones) != 2:
        raise ValueError("PASR experiment takes exactly two mode-groups and two tones")
    if tones[0] == tones[1]:
        raise ValueError("Tones must be distinct")
    wavelength = wavelength or wavelength_from_frequency(10.2e9)
    delta_le = float(equivalent_order(mgs[1]) - equivalent_order(mgs[0]))

    arrangement = pasr_placement(distance, delta_le, n_rx, k_prime, mgs)
    positions = arrangement.positions
    if placement_error_rms > 0:
        rng = np.random.default_rng(seed)
        phi = arrangement.azimuths + placement_error_rms * rng.standard_normal(n_rx)
        positions = distance * np.column_stack([np.cos(phi), np.sin(phi)])

    radiated = list(mgs)
    if error is not None and not error.is_ideal:
        radiated = [
            perturb(mg, FeedErrorModel(error.amplitude_error_rms, error.phase_error_rms, error.seed + i))
            for i, mg in enumerate(mgs)
        ]

    H = channel_matrix(np.zeros((2, 2)), positions, wavelength, radiated, beta_a)
    t = np.arange(n_samples) / sample_rate
    signals = np.exp(2j * np.pi * np.outer(tones, t))
    received = H @ signals

    powers = np.empty((2, 2))
    for n, shifts in enumerate(arrangement.phase_shift_sets):
        combined = analog_combine(received, shifts)
        for i in range(2):
            powers[i, n] = abs(np.mean(combined * np.conj(signals[i]))) ** 2

    ptm = PowerTransferMatrix(powers, tuple(mg.label() for mg in mgs))
    logger.info(f"PASR crosstalk for {ptm.labels}: {crosstalk(ptm)} dB")
    return ptm
