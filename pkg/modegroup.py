"""
Plane-spiral OAM modes and mode-groups.

A mode-group (MG) is a weighted superposition of PSOAM modes radiating in
the azimuthal plane. Its complex pattern is

    BP(phi) = 1/sqrt(Q) * sum_q A_q * exp(-j * (l_q * phi + phi0_q))

which for consecutive, equi-amplitude, in-phase modes collapses to a
pencil beam whose mainlobe carries the linear phase -l_e * phi.
"""
import logging
import re
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import bisect

logger = logging.getLogger(__name__)

_SHORTHAND = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")


@dataclass(frozen=True)
class PsoamMode:
    order: int
    amplitude: float = 1.0
    initial_phase: float = 0.0  # radians

    def __post_init__(self):
        if int(self.order) != self.order:
            raise ValueError(f"Mode order must be an integer, got {self.order}")
        object.__setattr__(self, "order", int(self.order))
        if not np.isfinite(self.amplitude) or self.amplitude < 0:
            raise ValueError(f"Mode amplitude must be finite and non-negative, got {self.amplitude}")


@dataclass(frozen=True)
class FeedErrorModel:
    """Gaussian feeding-network errors applied per mode."""
    amplitude_error_rms: float = 0.0  # fraction
    phase_error_rms: float = 0.0  # radians
    seed: int = 0

    def __post_init__(self):
        if self.amplitude_error_rms < 0 or self.phase_error_rms < 0:
            raise ValueError("Feed error RMS values must be non-negative")

    @property
    def is_ideal(self) -> bool:
        return self.amplitude_error_rms == 0 and self.phase_error_rms == 0


@dataclass(frozen=True)
class ModeGroup:
    """
    Ordered set of PSOAM modes defining one transmit beam.

    Modes are kept sorted by ascending order, so the first order l_f is the
    smallest one.
    """
    modes: Tuple[PsoamMode, ...]

    def __post_init__(self):
        modes = tuple(sorted(self.modes, key=lambda m: m.order))
        if not modes:
            raise ValueError("A mode-group needs at least one mode")
        orders = [m.order for m in modes]
        if len(set(orders)) != len(orders):
            raise ValueError(f"Mode orders must be distinct, got {orders}")
        object.__setattr__(self, "modes", modes)

    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> "ModeGroup":
        """Equi-amplitude, in-phase group over the given orders."""
        return cls(tuple(PsoamMode(int(order)) for order in orders))

    @classmethod
    def consecutive(cls, first: int, last: int) -> "ModeGroup":
        step = 1 if last >= first else -1
        return cls.from_orders(range(first, last + step, step))

    @classmethod
    def parse(cls, spec: str) -> "ModeGroup":
        """Parse the shorthand "l_f..l_last" (e.g. "1..10" or "-4..-1")."""
        match = _SHORTHAND.match(spec)
        if not match:
            raise ValueError(f"Mode-group shorthand must look like 'l_f..l_last', got '{spec}'")
        return cls.consecutive(int(match.group(1)), int(match.group(2)))

    @classmethod
    def from_triples(cls, triples: Sequence[Sequence[float]]) -> "ModeGroup":
        """Build from (order, amplitude, phase_deg) triples."""
        return cls(tuple(
            PsoamMode(int(order), float(amplitude), float(np.deg2rad(phase_deg)))
            for order, amplitude, phase_deg in triples
        ))

    @property
    def orders(self) -> np.ndarray:
        return np.array([m.order for m in self.modes], dtype=int)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([m.amplitude for m in self.modes], dtype=float)

    @property
    def initial_phases(self) -> np.ndarray:
        return np.array([m.initial_phase for m in self.modes], dtype=float)

    @property
    def size(self) -> int:
        """Number of modes Q."""
        return len(self.modes)

    @property
    def first_order(self) -> int:
        return self.modes[0].order

    @property
    def mode_interval(self) -> Optional[int]:
        """Common interval of an arithmetic progression, None otherwise (or for Q=1)."""
        if self.size < 2:
            return None
        steps = np.diff(self.orders)
        if np.all(steps == steps[0]):
            return int(steps[0])
        return None

    def is_consecutive(self) -> bool:
        return self.mode_interval == 1

    def is_uniform(self) -> bool:
        """True for equi-amplitude, in-phase groups."""
        return bool(np.all(self.amplitudes == 1.0) and np.all(self.initial_phases == 0.0))

    def shifted(self, k: int) -> "ModeGroup":
        return ModeGroup(tuple(replace(m, order=m.order + k) for m in self.modes))

    def label(self) -> str:
        orders = self.orders
        if self.is_consecutive() and self.is_uniform():
            return f"MG{{{orders[0]}..{orders[-1]}}}"
        return "MG{" + ",".join(str(o) for o in orders) + "}"


def beam_pattern(mg: ModeGroup, phi: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    """
    Complex azimuthal pattern of a mode-group.

    Args:
        mg: Mode-group
        phi: Azimuth in radians, scalar or array

    Returns:
        Complex amplitude with the shape of phi
    """
    phi = np.asarray(phi, dtype=float)
    arguments = np.multiply.outer(phi, mg.orders) + mg.initial_phases
    terms = mg.amplitudes * np.exp(-1j * arguments)
    pattern = terms.sum(axis=-1) / np.sqrt(mg.size)
    if pattern.ndim == 0:
        return complex(pattern)
    return pattern


def equivalent_order(mg: ModeGroup) -> Fraction:
    """
    Equivalent OAM order l_e = l_f + dl * (Q - 1) / 2.

    Raises:
        ValueError: If the orders do not form an arithmetic progression
    """
    if mg.size == 1:
        return Fraction(mg.first_order)
    interval = mg.mode_interval
    if interval is None:
        raise ValueError(f"equivalent order undefined: {mg.label()} is not an arithmetic progression")
    return mg.first_order + Fraction(interval * (mg.size - 1), 2)


def directivity_gain_db(mg: ModeGroup) -> float:
    """Boresight power of the normalized pattern relative to a single mode."""
    return float(10 * np.log10(abs(beam_pattern(mg, 0.0)) ** 2))


def half_power_beamwidth(mg: ModeGroup) -> float:
    """
    Full width between the half-power azimuths around boresight.

    Returns:
        Beamwidth in degrees

    Raises:
        ValueError: For single modes or non-consecutive groups
    """
    if mg.size == 1:
        raise ValueError("omnidirectional, beamwidth undefined")
    if not mg.is_consecutive():
        raise ValueError(f"half-power beamwidth needs consecutive modes, got {mg.label()}")

    half_power = abs(beam_pattern(mg, 0.0)) ** 2 / 2

    def excess(phi: float) -> float:
        return abs(beam_pattern(mg, phi)) ** 2 - half_power

    first_null = 2 * np.pi / mg.size
    try:
        upper = bisect(excess, 0.0, first_null, xtol=1e-9)
        lower = bisect(excess, -first_null, 0.0, xtol=1e-9)
    except ValueError as e:
        raise ValueError(f"Mainlobe of {mg.label()} is not bracketed by its first nulls: {e}") from e
    return float(np.rad2deg(upper - lower))


def mode_spectrum(mg: ModeGroup) -> Dict[int, complex]:
    """Normalized complex weight (A_q / sqrt(Q)) * exp(-j phi0_q) per order."""
    weights = mg.amplitudes / np.sqrt(mg.size) * np.exp(-1j * mg.initial_phases)
    return {int(order): complex(w) for order, w in zip(mg.orders, weights)}


def perturb(mg: ModeGroup, err: FeedErrorModel) -> ModeGroup:
    """
    Apply reproducible feeding-network errors.

    Amplitudes get a multiplicative Gaussian error, phases an additive one;
    both draws come from a generator seeded with err.seed.
    """
    rng = np.random.default_rng(err.seed)
    amplitude_noise = rng.standard_normal(mg.size)
    phase_noise = rng.standard_normal(mg.size)

    amplitudes = np.maximum(mg.amplitudes * (1 + err.amplitude_error_rms * amplitude_noise), 0.0)
    phases = mg.initial_phases + err.phase_error_rms * phase_noise
    return ModeGroup(tuple(
        PsoamMode(m.order, float(a), float(p))
        for m, a, p in zip(mg.modes, amplitudes, phases)
    ))
