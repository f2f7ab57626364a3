"""
Monte-Carlo OFDM link simulation over LoS transfer matrices.

Chain per SNR point: bits -> Gray QAM -> OFDM (56 active bins, null DC)
-> y = Hx + n -> CSI -> zero-forcing -> demap -> BER / EVM / CRC frames.
"""
import logging
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.linalg import svd

from channel import LinkSystem, NoiseModel, TransferMatrix, calibrate_total_power
from geometry import LinkGeometry
from modegroup import FeedErrorModel

logger = logging.getLogger(__name__)

PAYLOAD_BITS = 4096
CRC_BITS = 32
FEC_BER_THRESHOLD = 3.8e-3
RANK_TOLERANCE = 1e-12
CHUNK_SYMBOLS = 256


class SingularChannelError(ValueError):
    pass


class Modulation(str, Enum):
    QPSK = "qpsk"
    QAM16 = "qam16"
    QAM64 = "qam64"

    @property
    def bits_per_symbol(self) -> int:
        return {"qpsk": 2, "qam16": 4, "qam64": 6}[self.value]

    @property
    def scale(self) -> float:
        """Normalization giving the square constellation unit average power."""
        order = 2 ** self.bits_per_symbol
        return float(1 / np.sqrt(2 * (order - 1) / 3))


class CsiMode(str, Enum):
    PERFECT = "perfect"
    PILOT = "pilot"


@dataclass(frozen=True)
class OfdmConfig:
    """
    OFDM numerology: active bins are +-1 .. +-active_subcarriers/2 around a
    null DC bin; pilot bins are taken out of them for the data.
    """
    fft_size: int = 64
    active_subcarriers: int = 56
    pilot_bins: Tuple[int, ...] = (-21, -7, 7, 21)
    pilot_values: Tuple[float, ...] = (1.0, 1.0, 1.0, -1.0)
    cyclic_prefix: int = 16
    subcarrier_spacing: float = 312.5e3  # Hz
    bandwidth: float = 20e6  # Hz

    def __post_init__(self):
        object.__setattr__(self, "pilot_bins", tuple(int(b) for b in self.pilot_bins))
        object.__setattr__(self, "pilot_values", tuple(float(v) for v in self.pilot_values))
        half = self.active_subcarriers // 2
        if self.active_subcarriers % 2 or half >= self.fft_size // 2:
            raise ValueError(f"Active subcarriers must be even and fit the {self.fft_size}-point grid")
        if any(b == 0 or abs(b) > half for b in self.pilot_bins):
            raise ValueError(f"Pilot bins must be active, non-DC bins, got {self.pilot_bins}")
        if len(set(self.pilot_bins)) != len(self.pilot_bins):
            raise ValueError("Pilot bins must be distinct")
        if len(self.pilot_values) != len(self.pilot_bins):
            raise ValueError("Need one pilot value per pilot bin")
        if not 0 <= self.cyclic_prefix < self.fft_size:
            raise ValueError(f"Cyclic prefix must lie in [0, {self.fft_size}), got {self.cyclic_prefix}")
        if self.active_subcarriers * self.subcarrier_spacing > self.bandwidth:
            raise ValueError("Active subcarriers do not fit the bandwidth")

    @property
    def active_bins(self) -> np.ndarray:
        half = self.active_subcarriers // 2
        return np.concatenate([np.arange(-half, 0), np.arange(1, half + 1)])

    @property
    def data_bins(self) -> np.ndarray:
        bins = self.active_bins
        return bins[~np.isin(bins, self.pilot_bins)]

    @property
    def pilot_subcarriers(self) -> int:
        return len(self.pilot_bins)

    @property
    def data_subcarriers(self) -> int:
        return self.active_subcarriers - self.pilot_subcarriers

    @property
    def symbol_length(self) -> int:
        return self.fft_size + self.cyclic_prefix

    @property
    def sample_rate(self) -> float:
        return self.fft_size * self.subcarrier_spacing

    def bits_per_ofdm_symbol(self, modulation: Modulation) -> int:
        return Modulation(modulation).bits_per_symbol * self.data_subcarriers

    def symbols_per_frame(self, modulation: Modulation) -> int:
        """OFDM symbols holding one CRC frame (payload + CRC, zero-padded)."""
        return -(-(PAYLOAD_BITS + CRC_BITS) // self.bits_per_ofdm_symbol(modulation))


@dataclass(frozen=True)
class LinkConfig:
    """
    One link-level experiment.

    Args:
        modulation: QPSK, 16-QAM or 64-QAM
        geometry: Link geometry; n_tx is the stream count
        system: Transmitter family
        snr_grid: Receiving SNRs of the reference SISO link (dB), increasing
        bits_per_point: Data bits per SNR point across all streams
        csi: Perfect or pilot-estimated channel knowledge
        seed: Root seed; every SNR point derives its own stream
        ofdm: OFDM numerology
        noise_variance: sigma_n^2 per receive element
        beta_a: Common antenna gain factor
        feed_error: Optional feeding-network error applied to MG transmitters
        frames_per_point: CRC frames per stream used for eta_s (0 skips them)
        label: Name used in outputs
    """
    modulation: Modulation
    geometry: LinkGeometry
    system: LinkSystem
    snr_grid: Tuple[float, ...]
    bits_per_point: int
    csi: CsiMode = CsiMode.PERFECT
    seed: int = 0
    ofdm: OfdmConfig = field(default_factory=OfdmConfig)
    noise_variance: float = 1.0
    beta_a: float = 1.0
    feed_error: Optional[FeedErrorModel] = None
    frames_per_point: int = 16
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "modulation", Modulation(self.modulation))
        object.__setattr__(self, "csi", CsiMode(self.csi))
        object.__setattr__(self, "snr_grid", tuple(float(s) for s in self.snr_grid))
        if not self.snr_grid:
            raise ValueError("SNR grid must not be empty")
        if not np.all(np.isfinite(self.snr_grid)) or np.any(np.diff(self.snr_grid) <= 0):
            raise ValueError(f"SNR grid must be finite and strictly increasing, got {list(self.snr_grid)}")
        unit = self.ofdm.bits_per_ofdm_symbol(self.modulation) * self.n_streams
        if self.bits_per_point <= 0 or self.bits_per_point % unit:
            raise ValueError(
                f"bits_per_point must be a positive multiple of {unit} "
                f"(bits per symbol x data subcarriers x streams), got {self.bits_per_point}"
            )
        if self.csi is CsiMode.PILOT and self.bits_per_point // unit < self.n_streams:
            raise ValueError(
                f"Pilot estimation needs at least {self.n_streams} OFDM symbols per point, "
                f"got {self.bits_per_point // unit} from {self.bits_per_point} bits"
            )
        if self.frames_per_point < 0:
            raise ValueError(f"frames_per_point must be non-negative, got {self.frames_per_point}")
        if not self.noise_variance > 0:
            raise ValueError(f"Noise variance must be positive, got {self.noise_variance}")
        groups = self.system.transmitter_groups()
        if groups is not None and len(groups) != self.geometry.n_tx:
            raise ValueError(f"{len(groups)} transmitters configured for a {self.geometry.n_tx}-element array")

    @property
    def n_streams(self) -> int:
        return self.geometry.n_tx

    def build_channel(self) -> TransferMatrix:
        return self.system.build(self.geometry, self.beta_a, self.feed_error)


@dataclass(frozen=True, eq=False)
class LinkReport:
    """Per-SNR, per-stream results of simulate_link."""
    snr_db: np.ndarray
    ber: np.ndarray  # (n_snr, n_streams)
    evm_pct: np.ndarray  # (n_snr, n_streams)
    eta_s: Optional[np.ndarray]  # (n_snr,) or None when no frames were sent
    spectrum_efficiency: float
    modulation: Modulation
    label: str = ""

    @property
    def mean_ber(self) -> np.ndarray:
        return self.ber.mean(axis=1)

    def below_fec_threshold(self) -> np.ndarray:
        return self.mean_ber < FEC_BER_THRESHOLD

    def rows(self) -> List[Dict[str, object]]:
        rows = []
        for i, snr in enumerate(self.snr_db):
            for stream in range(self.ber.shape[1]):
                rows.append({
                    "snr_db": float(snr),
                    "stream": stream,
                    "ber": float(self.ber[i, stream]),
                    "evm_pct": float(self.evm_pct[i, stream]),
                    "eta_s": None if self.eta_s is None else float(self.eta_s[i]),
                })
        return rows


# Gray-coded PAM per axis; index is the Gray label, value the amplitude
def _pam_levels(bits_per_axis: int) -> np.ndarray:
    n = 1 << bits_per_axis
    k = np.arange(n)
    levels = np.empty(n)
    levels[k ^ (k >> 1)] = 2 * k - (n - 1)
    return levels


def qam_map(bits: np.ndarray, modulation: Modulation) -> np.ndarray:
    """
    Map bits to Gray-coded square QAM symbols of unit average power.

    Each symbol takes bits_per_symbol bits; the first half selects the
    in-phase level and the second half the quadrature level.

    Raises:
        ValueError: If the bit count is not a multiple of bits_per_symbol
    """
    modulation = Modulation(modulation)
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    bps = modulation.bits_per_symbol
    if bits.size % bps:
        raise ValueError(f"Bit count {bits.size} is not divisible by {bps} for {modulation.value}")

    half = bps // 2
    weights = 1 << np.arange(half - 1, -1, -1)
    groups = bits.reshape(-1, 2, half)
    labels = groups @ weights
    levels = _pam_levels(half)
    return modulation.scale * (levels[labels[:, 0]] + 1j * levels[labels[:, 1]])


def qam_demap(symbols: np.ndarray, modulation: Modulation) -> np.ndarray:
    """Hard-decision nearest-point demapping back to Gray labels."""
    modulation = Modulation(modulation)
    symbols = np.asarray(symbols, dtype=complex).ravel() / modulation.scale
    half = modulation.bits_per_symbol // 2
    n = 1 << half
    shifts = np.arange(half - 1, -1, -1)

    def axis_bits(values: np.ndarray) -> np.ndarray:
        k = np.clip(np.rint((values + n - 1) / 2), 0, n - 1).astype(int)
        labels = k ^ (k >> 1)
        return ((labels[:, None] >> shifts) & 1).astype(np.uint8)

    return np.hstack([axis_bits(symbols.real), axis_bits(symbols.imag)]).ravel()


def ofdm_modulate(symbols: np.ndarray, cfg: OfdmConfig, pilots: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Place data symbols on the data bins and return time samples with cyclic prefix.

    Args:
        symbols: (..., n) complex, n a multiple of data_subcarriers
        cfg: OFDM numerology
        pilots: Values broadcastable to (..., n_ofdm_symbols, pilot_subcarriers);
            pilot bins stay empty when None

    Returns:
        (..., n_ofdm_symbols * symbol_length) complex samples
    """
    symbols = np.asarray(symbols, dtype=complex)
    if symbols.shape[-1] % cfg.data_subcarriers:
        raise ValueError(
            f"Symbol count {symbols.shape[-1]} is not a multiple of {cfg.data_subcarriers} data subcarriers"
        )
    lead = symbols.shape[:-1]
    n_sym = symbols.shape[-1] // cfg.data_subcarriers

    grid = np.zeros(lead + (n_sym, cfg.fft_size), dtype=complex)
    grid[..., cfg.data_bins % cfg.fft_size] = symbols.reshape(lead + (n_sym, cfg.data_subcarriers))
    if pilots is not None:
        grid[..., np.array(cfg.pilot_bins) % cfg.fft_size] = pilots

    time = np.fft.ifft(grid, axis=-1, norm="ortho")
    if cfg.cyclic_prefix:
        time = np.concatenate([time[..., -cfg.cyclic_prefix:], time], axis=-1)
    return time.reshape(lead + (n_sym * cfg.symbol_length,))


def ofdm_demodulate(
    samples: np.ndarray, cfg: OfdmConfig, return_pilots: bool = False
) -> Union[np.ndarray, Tuple[np.ndarray, np.ndarray]]:
    """Strip the cyclic prefix, transform, and read back the data (and optionally pilot) bins."""
    samples = np.asarray(samples, dtype=complex)
    if samples.shape[-1] % cfg.symbol_length:
        raise ValueError(f"Sample count {samples.shape[-1]} is not a multiple of {cfg.symbol_length}")
    lead = samples.shape[:-1]
    n_sym = samples.shape[-1] // cfg.symbol_length

    blocks = samples.reshape(lead + (n_sym, cfg.symbol_length))[..., cfg.cyclic_prefix:]
    grid = np.fft.fft(blocks, axis=-1, norm="ortho")
    data = grid[..., cfg.data_bins % cfg.fft_size].reshape(lead + (n_sym * cfg.data_subcarriers,))
    if return_pilots:
        return data, grid[..., np.array(cfg.pilot_bins) % cfg.fft_size]
    return data


def transmit(
    streams: np.ndarray,
    H: TransferMatrix,
    noise: NoiseModel,
    p_total: float,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """
    Narrowband LoS transmission y = H x + n.

    Args:
        streams: (n_tx, n_samples) unit-power baseband streams
        H: Transfer matrix
        noise: AWGN model; its seed is used when no generator is given
        p_total: Total transmit power split equally over the streams
        rng: Optional generator shared with the caller

    Returns:
        (n_rx, n_samples) received samples
    """
    streams = np.atleast_2d(np.asarray(streams, dtype=complex))
    if streams.shape[0] != H.n_tx:
        raise ValueError(f"dimension mismatch: {streams.shape[0]} streams for {H.n_tx} transmit elements")
    if p_total < 0:
        raise ValueError(f"Transmit power must be non-negative, got {p_total}")

    x = np.sqrt(p_total / H.n_tx) * streams
    y = H.entries @ x
    if noise.variance > 0:
        rng = rng if rng is not None else np.random.default_rng(noise.seed)
        y = y + np.sqrt(noise.variance / 2) * (
            rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)
        )
    return y


def _pinv(H: np.ndarray, rank: Optional[int] = None) -> np.ndarray:
    u, s, vh = svd(H, full_matrices=False)
    rank = s.size if rank is None else rank
    return (vh[:rank].conj().T / s[:rank]) @ u[:, :rank].conj().T


def zf_matrix(H_est: Union[np.ndarray, TransferMatrix]) -> np.ndarray:
    """
    Zero-forcing detector pinv(H_est).

    Raises:
        SingularChannelError: If H_est lacks full column rank
    """
    H = H_est.entries if isinstance(H_est, TransferMatrix) else np.asarray(H_est, dtype=complex)
    s = svd(H, compute_uv=False)
    if H.shape[0] < H.shape[1] or s[0] == 0 or s[-1] <= RANK_TOLERANCE * s[0]:
        raise SingularChannelError("ZF undefined, singular channel")
    return _pinv(H)


def zf_detect(y: np.ndarray, H_est: Union[np.ndarray, TransferMatrix]) -> np.ndarray:
    """x_hat = pinv(H_est) y for (n_rx, ...) observations."""
    return zf_matrix(H_est) @ np.asarray(y, dtype=complex)


def _equalizer(H_eff: np.ndarray) -> np.ndarray:
    try:
        return zf_matrix(H_eff)
    except SingularChannelError:
        s = svd(H_eff, compute_uv=False)
        rank = max(1, int(np.sum(s > RANK_TOLERANCE * s[0])))
        logger.warning(f"ZF undefined, singular channel; detecting with rank-{rank} pseudo-inverse")
        return _pinv(H_eff, rank)


def _cover_codes(n_symbols: int, n_tx: int) -> np.ndarray:
    """(n_symbols, n_tx) DFT cover code separating the streams' pilots."""
    t = np.arange(n_symbols)[:, None] % n_tx
    u = np.arange(n_tx)[None, :]
    return np.exp(-2j * np.pi * t * u / n_tx)


def estimate_channel(rx_pilots: np.ndarray, cfg: OfdmConfig, n_tx: int) -> np.ndarray:
    """
    Least-squares estimate of the effective channel from DFT-covered pilots.

    Args:
        rx_pilots: (n_rx, n_ofdm_symbols, pilot_subcarriers) received pilot bins
        cfg: OFDM numerology
        n_tx: Number of streams

    Returns:
        (n_rx, n_tx) estimate, scaled like the transmit streams
    """
    n_sym = rx_pilots.shape[1]
    used = (n_sym // n_tx) * n_tx
    if used == 0:
        raise ValueError(f"Pilot estimation needs at least {n_tx} OFDM symbols, got {n_sym}")
    codes = _cover_codes(used, n_tx)
    reference = np.asarray(cfg.pilot_values)
    # sum over symbols t and pilot bins k of Y[r, t, k] * conj(p_k * w[t, u])
    correlation = np.einsum("rtk,k,tu->ru", rx_pilots[:, :used], reference, codes.conj())
    return correlation / (used * np.sum(reference ** 2))


@dataclass
class _PointResult:
    ber: np.ndarray
    evm_pct: np.ndarray
    eta_s: Optional[float]


class _Transceiver:
    """Runs OFDM blocks of one SNR point through a fixed channel."""

    def __init__(self, cfg: LinkConfig, H: TransferMatrix, snr_db: float):
        self.cfg = cfg
        self.H = H
        self.noise = NoiseModel(cfg.noise_variance)
        self.p_total = calibrate_total_power(cfg.geometry, snr_db, cfg.noise_variance, cfg.beta_a)
        self.h_eff = H.entries * np.sqrt(self.p_total / H.n_tx)
        self.perfect_detector = _equalizer(self.h_eff) if cfg.csi is CsiMode.PERFECT else None

    def run(self, bits: np.ndarray, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Args:
            bits: (n_tx, n_bits) with n_bits a whole number of OFDM symbols

        Returns:
            (received bits, transmitted symbols, detected symbols), stream-major
        """
        cfg, ofdm = self.cfg, self.cfg.ofdm
        n_tx = self.H.n_tx
        symbols = np.vstack([qam_map(b, cfg.modulation) for b in bits])
        n_sym = symbols.shape[1] // ofdm.data_subcarriers

        pilots = None
        if cfg.csi is CsiMode.PILOT:
            codes = _cover_codes(n_sym, n_tx)
            pilots = codes.T[:, :, None] * np.asarray(ofdm.pilot_values)[None, None, :]

        samples = ofdm_modulate(symbols, ofdm, pilots)
        received = transmit(samples, self.H, self.noise, self.p_total, rng)

        if cfg.csi is CsiMode.PILOT:
            data, rx_pilots = ofdm_demodulate(received, ofdm, return_pilots=True)
            detector = _equalizer(estimate_channel(rx_pilots, ofdm, n_tx))
        else:
            data = ofdm_demodulate(received, ofdm)
            detector = self.perfect_detector

        detected = detector @ data
        rx_bits = np.vstack([qam_demap(d, cfg.modulation) for d in detected])
        return rx_bits, symbols, detected


def _crc_bits(payload: np.ndarray) -> np.ndarray:
    crc = zlib.crc32(np.packbits(payload).tobytes())
    return np.unpackbits(np.array([crc], dtype=">u4").view(np.uint8))


def _frame_bits(rng: np.random.Generator, cfg: LinkConfig) -> np.ndarray:
    payload = rng.integers(0, 2, PAYLOAD_BITS, dtype=np.uint8)
    frame_length = cfg.ofdm.symbols_per_frame(cfg.modulation) * cfg.ofdm.bits_per_ofdm_symbol(cfg.modulation)
    frame = np.zeros(frame_length, dtype=np.uint8)
    frame[:PAYLOAD_BITS] = payload
    frame[PAYLOAD_BITS:PAYLOAD_BITS + CRC_BITS] = _crc_bits(payload)
    return frame


def _frame_passes(frame: np.ndarray) -> bool:
    payload = frame[:PAYLOAD_BITS]
    return bool(np.array_equal(_crc_bits(payload), frame[PAYLOAD_BITS:PAYLOAD_BITS + CRC_BITS]))


def _run_frames(transceiver: _Transceiver, n_frames: int, rng: np.random.Generator) -> float:
    cfg = transceiver.cfg
    n_tx = transceiver.H.n_tx
    bits = np.stack([
        np.concatenate([_frame_bits(rng, cfg) for _ in range(n_frames)]) for _ in range(n_tx)
    ])
    rx_bits, _, _ = transceiver.run(bits, rng)
    frames = rx_bits.reshape(n_tx, n_frames, -1)
    passed = sum(_frame_passes(frames[u, f]) for u in range(n_tx) for f in range(n_frames))
    return passed / (n_tx * n_frames)


def _run_ber(transceiver: _Transceiver, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    cfg = transceiver.cfg
    n_tx = transceiver.H.n_tx
    bits_per_symbol = cfg.ofdm.bits_per_ofdm_symbol(cfg.modulation)
    remaining = cfg.bits_per_point // (bits_per_symbol * n_tx)

    errors = np.zeros(n_tx)
    error_power = np.zeros(n_tx)
    reference_power = np.zeros(n_tx)
    while remaining > 0:
        # a short tail joins the last chunk so pilot estimation always sees n_tx symbols
        chunk = remaining if remaining < CHUNK_SYMBOLS + n_tx else CHUNK_SYMBOLS
        bits = rng.integers(0, 2, (n_tx, chunk * bits_per_symbol), dtype=np.uint8)
        rx_bits, symbols, detected = transceiver.run(bits, rng)
        errors += np.sum(rx_bits != bits, axis=1)
        error_power += np.sum(np.abs(detected - symbols) ** 2, axis=1)
        reference_power += np.sum(np.abs(symbols) ** 2, axis=1)
        remaining -= chunk

    ber = errors / (cfg.bits_per_point // n_tx)
    evm = 100 * np.sqrt(error_power / reference_power)
    return ber, evm


def _point_seeds(cfg: LinkConfig) -> List[Tuple[np.random.SeedSequence, np.random.SeedSequence]]:
    # one (ber, frames) pair per SNR point, independent of scheduling
    return [tuple(child.spawn(2)) for child in np.random.SeedSequence(cfg.seed).spawn(len(cfg.snr_grid))]


def _simulate_point(cfg: LinkConfig, H: TransferMatrix, index: int, with_ber: bool = True) -> _PointResult:
    snr_db = cfg.snr_grid[index]
    ber_seed, frame_seed = _point_seeds(cfg)[index]
    transceiver = _Transceiver(cfg, H, snr_db)

    ber = evm = None
    if with_ber:
        ber, evm = _run_ber(transceiver, np.random.default_rng(ber_seed))
    eta_s = None
    if cfg.frames_per_point:
        eta_s = _run_frames(transceiver, cfg.frames_per_point, np.random.default_rng(frame_seed))
    summary = f"BER={ber.mean():.3e}" if ber is not None else "frames only"
    logger.info(f"{cfg.label or cfg.system.describe()} at {snr_db:g} dB: {summary}, eta_s={eta_s}")
    return _PointResult(ber, evm, eta_s)


def _map_points(fn, n_points: int, threads: int) -> list:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            return list(executor.map(fn, range(n_points)))
    return [fn(i) for i in range(n_points)]


def simulate_link(cfg: LinkConfig, threads: int = 1) -> LinkReport:
    """
    Full Monte-Carlo chain for every SNR point of the config.

    Args:
        cfg: Link configuration
        threads: Worker threads across SNR points; results do not depend on it

    Returns:
        LinkReport with per-stream BER and EVM and per-point eta_s
    """
    H = cfg.build_channel()
    logger.info(
        f"Simulating {cfg.modulation.value} over {cfg.label or cfg.system.describe()}: "
        f"{len(cfg.snr_grid)} SNR points, {cfg.bits_per_point} bits each"
    )
    results = _map_points(lambda i: _simulate_point(cfg, H, i), len(cfg.snr_grid), threads)

    eta_s = None
    if cfg.frames_per_point:
        eta_s = np.array([r.eta_s for r in results])
    return LinkReport(
        snr_db=np.array(cfg.snr_grid),
        ber=np.vstack([r.ber for r in results]),
        evm_pct=np.vstack([r.evm_pct for r in results]),
        eta_s=eta_s,
        spectrum_efficiency=spectrum_efficiency(cfg.modulation, cfg.n_streams, cfg.ofdm),
        modulation=cfg.modulation,
        label=cfg.label or cfg.system.describe(),
    )


def frame_success_rate(cfg: LinkConfig, n_frames: int, threads: int = 1) -> np.ndarray:
    """
    Fraction of CRC-verified frames at every SNR point of the config.

    Returns:
        Array of eta_s values, one per SNR point
    """
    if n_frames < 1:
        raise ValueError(f"n_frames must be at least 1, got {n_frames}")
    frame_cfg = replace(cfg, frames_per_point=n_frames)
    H = frame_cfg.build_channel()
    results = _map_points(
        lambda i: _simulate_point(frame_cfg, H, i, with_ber=False), len(cfg.snr_grid), threads
    )
    return np.array([r.eta_s for r in results])


def spectrum_efficiency(modulation: Modulation, n_streams: int, cfg: Optional[OfdmConfig] = None) -> float:
    """Bits per symbol x streams x data/active subcarrier ratio, in bits/s/Hz."""
    cfg = cfg or OfdmConfig()
    return Modulation(modulation).bits_per_symbol * n_streams * cfg.data_subcarriers / cfg.active_subcarriers
