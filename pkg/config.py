import os
import json
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from dotenv import load_dotenv

from capacity import log_distance_grid
from channel import ChannelKind, LinkSystem
from geometry import LinkGeometry, TxLayout, wavelength_from_frequency
from modegroup import FeedErrorModel, ModeGroup, equivalent_order
from pasr import pasr_placement
from phy import CsiMode, LinkConfig, Modulation, OfdmConfig

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)


class Scenario(str, Enum):
    CAPACITY_SWEEP = "capacity_sweep"
    BER_SWEEP = "ber_sweep"
    PASR = "pasr"
    ROBUSTNESS = "robustness"
    PATTERN = "pattern"
    DIRECTIONALITY = "directionality"
    LINK_BUDGET = "link_budget"


class ConfigError(ValueError):
    """Raised with every diagnostic of an invalid experiment config."""

    def __init__(self, diagnostics: Sequence[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass(frozen=True)
class Settings:
    """Process-wide settings resolved from the environment (.env supported)."""
    log_level: str = "INFO"
    log_file: Optional[str] = None
    threads: int = 1
    output_dir: str = "results"


def load_settings() -> Settings:
    """
    Read PSOAM_* environment variables.

    Returns:
        Settings with defaults for anything unset or malformed
    """
    threads_raw = os.getenv("PSOAM_THREADS", "1")
    try:
        threads = max(1, int(threads_raw))
    except ValueError:
        logger.warning(f"Ignoring PSOAM_THREADS={threads_raw!r}: not an integer")
        threads = 1
    return Settings(
        log_level=os.getenv("PSOAM_LOG_LEVEL", "INFO").upper(),
        log_file=os.getenv("PSOAM_LOG_FILE") or None,
        threads=threads,
        output_dir=os.getenv("PSOAM_OUTPUT_DIR", "results"),
    )


@dataclass(frozen=True)
class SystemSpec:
    label: str
    system: LinkSystem
    geometry: LinkGeometry


@dataclass(frozen=True)
class CapacitySettings:
    distances: Tuple[float, ...]
    target_snr_db: float = 30.0
    targets: Tuple[float, ...] = (2.0,)
    rtol: float = 1e-3


@dataclass(frozen=True)
class PhySettings:
    modulation: Modulation
    snr_grid: Tuple[float, ...]
    bits_per_point: int
    csi: CsiMode = CsiMode.PERFECT
    frames_per_point: int = 16


@dataclass(frozen=True)
class PasrSettings:
    mode_groups: Tuple[ModeGroup, ModeGroup]
    distance: float
    n_rx: int = 2
    k_prime: int = 1
    tones: Tuple[float, float] = (-0.5e6, 0.5e6)
    sample_rate: float = 20e6
    n_samples: int = 1000
    placement_error_rms: float = 0.0  # radians
    error_levels: Tuple[Tuple[float, float], ...] = ()  # (amplitude fraction, phase radians)
    error_seeds: int = 20


@dataclass(frozen=True)
class PatternSettings:
    mode_groups: Tuple[ModeGroup, ...]
    step_deg: float = 1.0


@dataclass(frozen=True)
class LinkBudgetSettings:
    apertures: Tuple[Tuple[str, float], ...]
    modulations: Tuple[Modulation, ...] = tuple(Modulation)
    n_streams: int = 2


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, typed view of one experiment document."""
    scenario: Scenario
    seed: int
    wavelength: float
    noise_variance: float = 1.0
    beta_a: float = 1.0
    systems: Tuple[SystemSpec, ...] = ()
    capacity: Optional[CapacitySettings] = None
    phy: Optional[PhySettings] = None
    feed_error: Optional[FeedErrorModel] = None
    pasr: Optional[PasrSettings] = None
    pattern: Optional[PatternSettings] = None
    link_budget: Optional[LinkBudgetSettings] = None
    directionality_snr_db: float = 30.0
    threads: int = 1
    output_dir: Optional[str] = None
    document: Dict[str, Any] = field(default_factory=dict, compare=False, repr=False)

    def link_config(self, spec: SystemSpec) -> LinkConfig:
        """LinkConfig for one compared system, sharing the phy settings and seed."""
        if self.phy is None:
            raise ValueError("Experiment has no phy section")
        return LinkConfig(
            modulation=self.phy.modulation,
            geometry=spec.geometry,
            system=spec.system,
            snr_grid=self.phy.snr_grid,
            bits_per_point=self.phy.bits_per_point,
            csi=self.phy.csi,
            seed=self.seed,
            noise_variance=self.noise_variance,
            beta_a=self.beta_a,
            feed_error=self.feed_error,
            frames_per_point=self.phy.frames_per_point,
            label=spec.label,
        )


class _Diagnostics:
    """Collects '<path>: <message>' entries instead of failing on the first one."""

    def __init__(self):
        self.messages: List[str] = []

    def add(self, path: str, message: Any):
        self.messages.append(f"{path}: {message}")

    @contextmanager
    def at(self, path: str):
        try:
            yield
        except (ValueError, TypeError, KeyError) as e:
            self.add(path, e.args[0] if e.args else e)


_MISSING = object()


def _number(section: Dict, key: str, path: str, diags: _Diagnostics, default: Any = _MISSING,
            positive: bool = False, non_negative: bool = False) -> Optional[float]:
    value = section.get(key, default)
    if value is _MISSING:
        diags.add(f"{path}.{key}", "required")
        return None
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
        diags.add(f"{path}.{key}", f"must be a finite number, got {value!r}")
        return None
    if positive and value <= 0:
        diags.add(f"{path}.{key}", f"must be positive, got {value}")
        return None
    if non_negative and value < 0:
        diags.add(f"{path}.{key}", f"must be non-negative, got {value}")
        return None
    return float(value)


def _integer(section: Dict, key: str, path: str, diags: _Diagnostics, default: Any = _MISSING,
             minimum: Optional[int] = None) -> Optional[int]:
    value = section.get(key, default)
    if value is _MISSING:
        diags.add(f"{path}.{key}", "required")
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        diags.add(f"{path}.{key}", f"must be an integer, got {value!r}")
        return None
    if minimum is not None and value < minimum:
        diags.add(f"{path}.{key}", f"must be at least {minimum}, got {value}")
        return None
    return value


def _length(section: Dict, key: str, path: str, diags: _Diagnostics, wavelength: float,
            default: Any = _MISSING) -> Optional[float]:
    """A length given in meters as <key> or in wavelengths as <key>_wavelengths."""
    if f"{key}_wavelengths" in section:
        value = _number(section, f"{key}_wavelengths", path, diags, non_negative=True)
        return None if value is None else value * wavelength
    return _number(section, key, path, diags, default, non_negative=True)


def _orders(values: Sequence[Any]) -> List[int]:
    orders = []
    for value in values:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ValueError(f"mode orders must be integers, got {value!r}")
        orders.append(int(value))
    return orders


def parse_mode_group(value: Any) -> ModeGroup:
    """
    Mode-group from shorthand "l_f..l_last", a list of integer orders, or
    a list of [order, amplitude, phase_deg] triples.
    """
    if isinstance(value, str):
        return ModeGroup.parse(value)
    if isinstance(value, list) and value and all(isinstance(v, list) for v in value):
        for triple in value:
            if len(triple) != 3:
                raise ValueError(f"mode triples must be [order, amplitude, phase_deg], got {triple}")
            _orders([triple[0]])
        return ModeGroup.from_triples(value)
    if isinstance(value, list):
        return ModeGroup.from_orders(_orders(value))
    raise ValueError(f"unsupported mode-group value {value!r}")


def _mode_groups(values: Any, path: str, diags: _Diagnostics) -> Optional[List[ModeGroup]]:
    if not isinstance(values, list) or not values:
        diags.add(path, "must be a non-empty list of mode-groups")
        return None
    groups = []
    for i, value in enumerate(values):
        with diags.at(f"{path}[{i}]"):
            groups.append(parse_mode_group(value))
    return groups if len(groups) == len(values) else None


def _wavelength(link: Dict, diags: _Diagnostics) -> Optional[float]:
    if "wavelength" in link:
        return _number(link, "wavelength", "link", diags, positive=True)
    frequency = _number(link, "frequency_hz", "link", diags, default=10e9, positive=True)
    return None if frequency is None else wavelength_from_frequency(frequency)


def _geometry(link: Dict, path: str, diags: _Diagnostics, wavelength: float,
              distance_default: Any, n_tx_default: int) -> Optional[LinkGeometry]:
    errors_before = len(diags.messages)
    distance = _length(link, "distance", path, diags, wavelength, distance_default)
    n_tx = _integer(link, "n_tx", path, diags, n_tx_default, minimum=1)
    n_rx = _integer(link, "n_rx", path, diags, 2, minimum=1)
    rx_aperture = _length(link, "rx_aperture", path, diags, wavelength, 0.0)
    tx_aperture = _length(link, "tx_aperture", path, diags, wavelength, 0.0)
    layout = link.get("tx_layout", TxLayout.COAXIAL.value)
    if layout not in [t.value for t in TxLayout]:
        diags.add(f"{path}.tx_layout", f"must be one of {[t.value for t in TxLayout]}, got {layout!r}")
    if len(diags.messages) > errors_before:
        return None
    with diags.at(path):
        return LinkGeometry(distance, wavelength, n_tx, n_rx, rx_aperture, TxLayout(layout), tx_aperture)
    return None


def _system(entry: Dict, link: Dict, path: str, diags: _Diagnostics, wavelength: float,
            distance_default: Any) -> Optional[SystemSpec]:
    if not isinstance(entry, dict):
        diags.add(path, "must be an object")
        return None
    kind = entry.get("kind")
    if kind not in [k.value for k in ChannelKind]:
        diags.add(f"{path}.kind", f"must be one of {[k.value for k in ChannelKind]}, got {kind!r}")
        return None
    kind = ChannelKind(kind)

    mgs: List[ModeGroup] = []
    orders: List[int] = []
    if kind is ChannelKind.MG_MIMO:
        mgs = _mode_groups(entry.get("mode_groups"), f"{path}.mode_groups", diags)
        if mgs is None:
            return None
    elif kind is ChannelKind.PSOAM_MIMO:
        with diags.at(f"{path}.orders"):
            if not entry.get("orders"):
                raise ValueError("must list one mode order per transmitter")
            orders = _orders(entry["orders"])
        if not orders:
            return None

    overrides = entry.get("link", {})
    if not isinstance(overrides, dict):
        diags.add(f"{path}.link", "must be an object")
        return None
    merged = {**link, **overrides}
    n_tx_default = len(mgs) or len(orders) or 2
    geometry = _geometry(merged, f"{path}.link", diags, wavelength, distance_default, n_tx_default)
    if geometry is None:
        return None
    if (mgs or orders) and geometry.n_tx != n_tx_default:
        diags.add(path, f"{n_tx_default} transmitters configured for n_tx={geometry.n_tx}")
        return None

    system = LinkSystem(kind, tuple(mgs), tuple(orders))
    return SystemSpec(entry.get("label") or system.describe(), system, geometry)


def _distance_grid(section: Dict, diags: _Diagnostics, wavelength: float) -> Optional[Tuple[float, ...]]:
    path = "capacity"
    if "distances_wavelengths" in section:
        values = section["distances_wavelengths"]
        if not isinstance(values, list) or not values:
            diags.add(f"{path}.distances_wavelengths", "must be a non-empty list")
            return None
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
            diags.add(f"{path}.distances_wavelengths", "distances must be numbers")
            return None
        grid = np.asarray(values, dtype=float) * wavelength
    else:
        spec = section.get("grid", {})
        if not isinstance(spec, dict):
            diags.add(f"{path}.grid", "must be an object")
            return None
        start = _number(spec, "start_wavelengths", f"{path}.grid", diags, 10.0, positive=True)
        stop = _number(spec, "stop_wavelengths", f"{path}.grid", diags, 2000.0, positive=True)
        points = _integer(spec, "points", f"{path}.grid", diags, 400, minimum=2)
        if None in (start, stop, points):
            return None
        grid = log_distance_grid(wavelength, start, stop, points)
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        diags.add(f"{path}.grid", "distances must be positive and strictly increasing")
        return None
    return tuple(float(d) for d in grid)


def _snr_grid(section: Dict, path: str, diags: _Diagnostics) -> Optional[Tuple[float, ...]]:
    values = section.get("snr_grid_db")
    if not isinstance(values, list) or not values:
        diags.add(f"{path}.snr_grid_db", "SNR grid must not be empty")
        return None
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) and np.isfinite(v) for v in values):
        diags.add(f"{path}.snr_grid_db", "SNR values must be finite numbers")
        return None
    if np.any(np.diff(values) <= 0):
        diags.add(f"{path}.snr_grid_db", f"SNR grid must be strictly increasing, got {values}")
        return None
    return tuple(float(v) for v in values)


def _phy(section: Dict, systems: Sequence[SystemSpec], diags: _Diagnostics) -> Optional[PhySettings]:
    path = "phy"
    modulation = section.get("modulation", Modulation.QPSK.value)
    if modulation not in [m.value for m in Modulation]:
        diags.add(f"{path}.modulation", f"must be one of {[m.value for m in Modulation]}, got {modulation!r}")
        return None
    modulation = Modulation(modulation)
    csi = section.get("csi", CsiMode.PERFECT.value)
    if csi not in [c.value for c in CsiMode]:
        diags.add(f"{path}.csi", f"must be one of {[c.value for c in CsiMode]}, got {csi!r}")
        return None

    snr_grid = _snr_grid(section, path, diags)
    bits = _integer(section, "bits_per_point", path, diags, minimum=1)
    frames = _integer(section, "frames_per_point", path, diags, 16, minimum=0)
    if None in (snr_grid, bits, frames):
        return None

    per_symbol = OfdmConfig().bits_per_ofdm_symbol(modulation)
    for spec in systems:
        unit = per_symbol * spec.geometry.n_tx
        if bits % unit:
            diags.add(
                f"{path}.bits_per_point",
                f"{bits} is not divisible by {unit} (bits per symbol x data subcarriers x streams) for {spec.label}",
            )
            return None
        if csi == CsiMode.PILOT.value and bits // unit < spec.geometry.n_tx:
            diags.add(
                f"{path}.bits_per_point",
                f"pilot estimation needs at least {spec.geometry.n_tx} OFDM symbols, "
                f"{bits} bits give {bits // unit} for {spec.label}",
            )
            return None
    return PhySettings(modulation, snr_grid, bits, CsiMode(csi), frames)


def _feed_error(section: Dict, diags: _Diagnostics, seed: int) -> Optional[FeedErrorModel]:
    path = "feed_error"
    amplitude = _number(section, "amplitude_rms", path, diags, 0.0, non_negative=True)
    phase_deg = _number(section, "phase_rms_deg", path, diags, 0.0, non_negative=True)
    error_seed = _integer(section, "seed", path, diags, seed)
    if None in (amplitude, phase_deg, error_seed):
        return None
    return FeedErrorModel(amplitude, float(np.deg2rad(phase_deg)), error_seed)


def _pasr(section: Dict, diags: _Diagnostics, wavelength: float) -> Optional[PasrSettings]:
    path = "pasr"
    mgs = _mode_groups(section.get("mode_groups"), f"{path}.mode_groups", diags)
    distance = _length(section, "distance", path, diags, wavelength)
    n_rx = _integer(section, "n_rx", path, diags, 2, minimum=2)
    k_prime = _integer(section, "k_prime", path, diags, 1, minimum=1)
    sample_rate = _number(section, "sample_rate_hz", path, diags, 20e6, positive=True)
    n_samples = _integer(section, "samples", path, diags, 1000, minimum=1)
    placement = _number(section, "placement_error_deg", path, diags, 0.0, non_negative=True)
    seeds = _integer(section, "error_seeds", path, diags, 20, minimum=1)

    tones = section.get("tones_hz", [-0.5e6, 0.5e6])
    numeric = isinstance(tones, list) and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in tones)
    if not (numeric and len(tones) == 2 and tones[0] != tones[1]):
        diags.add(f"{path}.tones_hz", f"must be two distinct tone offsets, got {tones!r}")
        tones = None

    levels = []
    raw_levels = section.get("error_levels", [])
    if not isinstance(raw_levels, list):
        diags.add(f"{path}.error_levels", "must be a list of [amplitude_rms, phase_rms_deg] pairs")
        raw_levels = []
    for i, level in enumerate(raw_levels):
        if not (isinstance(level, list) and len(level) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) and v >= 0 for v in level)):
            diags.add(f"{path}.error_levels[{i}]", "must be [amplitude_rms, phase_rms_deg] with non-negative values")
            continue
        levels.append((float(level[0]), float(np.deg2rad(level[1]))))

    if mgs is not None and len(mgs) != 2:
        diags.add(f"{path}.mode_groups", f"PASR multiplexes exactly two mode-groups, got {len(mgs)}")
        return None
    if mgs is not None and distance is not None:
        with diags.at(f"{path}.mode_groups"):
            delta_le = float(equivalent_order(mgs[1]) - equivalent_order(mgs[0]))
            pasr_placement(distance if distance > 0 else 1.0, delta_le, n_rx or 2, k_prime or 1)
    if distance is not None and distance <= 0:
        diags.add(f"{path}.distance", f"must be positive, got {distance}")
        return None
    if None in (mgs, distance, n_rx, k_prime, sample_rate, n_samples, placement, seeds, tones):
        return None
    return PasrSettings(
        tuple(mgs), distance, n_rx, k_prime, (float(tones[0]), float(tones[1])), sample_rate, n_samples,
        float(np.deg2rad(placement)), tuple(levels), seeds,
    )


def _pattern(section: Dict, diags: _Diagnostics) -> Optional[PatternSettings]:
    mgs = _mode_groups(section.get("mode_groups"), "pattern.mode_groups", diags)
    step = _number(section, "step_deg", "pattern", diags, 1.0, positive=True)
    if mgs is None or step is None:
        return None
    return PatternSettings(tuple(mgs), step)


def _link_budget(section: Dict, diags: _Diagnostics, wavelength: float) -> Optional[LinkBudgetSettings]:
    path = "link_budget"
    apertures = []
    entries = section.get("apertures", [])
    if not isinstance(entries, list):
        diags.add(f"{path}.apertures", "must be a list")
        entries = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            diags.add(f"{path}.apertures[{i}]", "must be an object")
            continue
        aperture = _length(entry, "aperture", f"{path}.apertures[{i}]", diags, wavelength)
        if aperture is not None:
            apertures.append((str(entry.get("label", f"A={aperture:g} m")), aperture))
    modulations = section.get("modulations", [m.value for m in Modulation])
    if not isinstance(modulations, list):
        diags.add(f"{path}.modulations", "must be a list")
        return None
    unknown = [m for m in modulations if not isinstance(m, str) or m not in [v.value for v in Modulation]]
    if unknown:
        diags.add(f"{path}.modulations", f"unknown modulations {unknown}")
        return None
    n_streams = _integer(section, "n_streams", path, diags, 2, minimum=1)
    if n_streams is None:
        return None
    return LinkBudgetSettings(tuple(apertures), tuple(Modulation(m) for m in modulations), n_streams)


_OBJECT_SECTIONS = ("link", "capacity", "phy", "pasr", "pattern", "link_budget", "feed_error", "directionality")

_REQUIRED_SECTIONS = {
    Scenario.CAPACITY_SWEEP: ("systems", "capacity"),
    Scenario.BER_SWEEP: ("systems", "phy"),
    Scenario.ROBUSTNESS: ("systems", "phy"),
    Scenario.PASR: ("pasr",),
    Scenario.PATTERN: ("pattern",),
    Scenario.DIRECTIONALITY: ("systems",),
    Scenario.LINK_BUDGET: ("link_budget",),
}


def parse_config(document: Any) -> Tuple[Optional[ExperimentConfig], List[str]]:
    """
    Validate an experiment document and build its typed config.

    Args:
        document: Parsed JSON object

    Returns:
        Tuple of (config or None, diagnostics); the config is None whenever
        a diagnostic was produced
    """
    diags = _Diagnostics()
    if not isinstance(document, dict):
        return None, ["$: config must be a JSON object"]

    scenario = document.get("scenario")
    if scenario not in [s.value for s in Scenario]:
        diags.add("scenario", f"unknown scenario {scenario!r} (expected one of {[s.value for s in Scenario]})")
        return None, diags.messages
    scenario = Scenario(scenario)

    for section in _REQUIRED_SECTIONS[scenario]:
        if section not in document:
            diags.add(section, f"required for scenario {scenario.value}")
    for key in _OBJECT_SECTIONS:
        if key in document and not isinstance(document[key], dict):
            diags.add(key, f"must be an object, got {type(document[key]).__name__}")
    if diags.messages:
        return None, diags.messages

    seed = _integer(document, "seed", "$", diags, 0, minimum=0)
    link = document.get("link", {})
    wavelength = _wavelength(link, diags)
    noise_variance = _number(link, "noise_variance", "link", diags, 1.0, positive=True)
    beta_a = _number(link, "beta_a", "link", diags, 1.0, positive=True)
    if None in (seed, wavelength, noise_variance, beta_a):
        return None, diags.messages

    capacity = None
    distance_default: Any = _MISSING
    if scenario is Scenario.CAPACITY_SWEEP:
        section = document["capacity"]
        distances = _distance_grid(section, diags, wavelength)
        target_snr = _number(section, "target_snr_db", "capacity", diags, 30.0)
        targets = section.get("targets", [2.0])
        rtol = _number(section, "rtol", "capacity", diags, 1e-3, non_negative=True)
        if not isinstance(targets, list) or not all(isinstance(t, (int, float)) and t > 0 for t in targets):
            diags.add("capacity.targets", "must be a list of positive CG values")
            targets = None
        # systems are still checked against a placeholder distance when the grid is invalid
        distance_default = distances[0] if distances else 1.0
        if None not in (distances, target_snr, targets, rtol):
            capacity = CapacitySettings(distances, target_snr, tuple(float(t) for t in targets), rtol)

    systems: List[SystemSpec] = []
    if "systems" in _REQUIRED_SECTIONS[scenario]:
        entries = document["systems"]
        if not isinstance(entries, list) or not entries:
            diags.add("systems", "must be a non-empty list")
        else:
            for i, entry in enumerate(entries):
                spec = _system(entry, link, f"systems[{i}]", diags, wavelength, distance_default)
                if spec is not None:
                    systems.append(spec)
        if scenario is Scenario.DIRECTIONALITY and len(systems) < 2:
            diags.add("systems", "directionality compares at least two systems; the first is the reference")

    phy = None
    if "phy" in _REQUIRED_SECTIONS[scenario]:
        phy = _phy(document["phy"], systems, diags)
        if scenario is Scenario.ROBUSTNESS and phy is not None and phy.frames_per_point < 1:
            diags.add("phy.frames_per_point", "robustness needs at least one frame per point")

    feed_error = None
    if "feed_error" in document:
        feed_error = _feed_error(document["feed_error"], diags, seed)

    pasr = _pasr(document["pasr"], diags, wavelength) if scenario is Scenario.PASR else None
    pattern = _pattern(document["pattern"], diags) if scenario is Scenario.PATTERN else None
    link_budget = _link_budget(document["link_budget"], diags, wavelength) if scenario is Scenario.LINK_BUDGET else None
    directionality_snr = _number(document.get("directionality", {}), "target_snr_db", "directionality", diags, 30.0)

    threads = _integer(document, "threads", "$", diags, 1, minimum=1)
    output_dir = document.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        diags.add("output_dir", f"must be a string, got {output_dir!r}")

    if diags.messages:
        return None, diags.messages
    config = ExperimentConfig(
        scenario=scenario,
        seed=seed,
        wavelength=wavelength,
        noise_variance=noise_variance,
        beta_a=beta_a,
        systems=tuple(systems),
        capacity=capacity,
        phy=phy,
        feed_error=feed_error,
        pasr=pasr,
        pattern=pattern,
        link_budget=link_budget,
        directionality_snr_db=directionality_snr,
        threads=threads,
        output_dir=output_dir,
        document=document,
    )
    return config, []


def read_config(config_path: str) -> Tuple[Optional[Dict[str, Any]], List[str]]:
    """
    Read a JSON experiment document.

    Returns:
        Tuple of (document or None, diagnostics)
    """
    try:
        logger.info(f"Reading experiment config from: {config_path}")
        with open(config_path, "r", encoding="utf-8") as f:
            return json.load(f), []
    except OSError as e:
        logger.error(f"Error reading config: {str(e)}")
        return None, [f"$: cannot read {config_path}: {e.strerror or e}"]
    except json.JSONDecodeError as e:
        logger.error(f"Error parsing config: {str(e)}")
        return None, [f"$: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"]


def validate(config_path: str) -> List[str]:
    """Every violated rule of the config file, each with a path locator; no side effects."""
    document, diagnostics = read_config(config_path)
    if document is None:
        return diagnostics
    return parse_config(document)[1]


def load_config(config_path: str, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    Read, override and validate a config file.

    Args:
        config_path: JSON document path
        overrides: Top-level keys (seed, threads, output_dir) replacing file values

    Raises:
        ConfigError: With every diagnostic if the file is unreadable or invalid
    """
    document, diagnostics = read_config(config_path)
    if document is None:
        raise ConfigError(diagnostics)
    if overrides and isinstance(document, dict):
        document = {**document, **{k: v for k, v in overrides.items() if v is not None}}
    config, diagnostics = parse_config(document)
    if config is None:
        raise ConfigError(diagnostics)
    return config
