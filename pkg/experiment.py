import logging
from typing import Dict, List, Optional

import numpy as np

from capacity import RankZeroChannelError, SweepScenario, capacity_gain_sweep, crossing_table
from channel import calibrate_total_power, received_signal_power
from config import ExperimentConfig, Scenario
from geometry import rayleigh_distance
from modegroup import (
    FeedErrorModel,
    beam_pattern,
    directivity_gain_db,
    equivalent_order,
    half_power_beamwidth,
)
from pasr import crosstalk, pasr_experiment
from phy import SingularChannelError, simulate_link, spectrum_efficiency

logger = logging.getLogger(__name__)

PATTERN_FLOOR_DB = -300.0

Rows = List[Dict[str, object]]


class ExperimentRunner:
    """
    Experiment runner that orchestrates one scenario from config to result tables.
    """
    def __init__(self, config: ExperimentConfig, threads: Optional[int] = None):
        """
        Initialize the runner with a validated config.

        Args:
            config: Typed experiment config
            threads: Worker threads, defaults to the config value
        """
        if config is None:
            raise ValueError("An experiment config is required. Load one with config.load_config.")
        self.config = config
        self.threads = threads or config.threads
        logger.info(f"Experiment runner initialized for scenario '{config.scenario.value}'")

    def run(self) -> Dict:
        """
        Execute the scenario.

        Returns:
            Dictionary with success flag, result tables keyed by file name,
            a scenario summary, and an error message on failure
        """
        scenario = self.config.scenario
        logger.info(f"Starting scenario: '{scenario.value}' (seed {self.config.seed})")
        handlers = {
            Scenario.CAPACITY_SWEEP: self._capacity_sweep,
            Scenario.BER_SWEEP: self._ber_sweep,
            Scenario.ROBUSTNESS: self._robustness,
            Scenario.PASR: self._pasr,
            Scenario.PATTERN: self._pattern,
            Scenario.DIRECTIONALITY: self._directionality,
            Scenario.LINK_BUDGET: self._link_budget,
        }
        try:
            tables, summary = handlers[scenario]()
        except (SingularChannelError, RankZeroChannelError, ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
            logger.error(f"Scenario '{scenario.value}' failed: {str(e)}")
            return {"success": False, "scenario": scenario.value, "error": str(e), "tables": {}, "summary": {}}

        logger.info(f"Scenario '{scenario.value}' produced {sum(len(rows) for rows in tables.values())} rows")
        return {"success": True, "scenario": scenario.value, "tables": tables, "summary": summary}

    def _capacity_sweep(self):
        cfg = self.config
        settings = cfg.capacity
        curves = []
        rows: Rows = []
        for spec in cfg.systems:
            scenario = SweepScenario(
                system=spec.system,
                geometry=spec.geometry,
                target_snr_db=settings.target_snr_db,
                distances=settings.distances,
                noise_variance=cfg.noise_variance,
                beta_a=cfg.beta_a,
                label=spec.label,
            )
            curve = capacity_gain_sweep(scenario, self.threads)
            logger.info(f"{spec.label}: peak CG {curve.peak_cg:.4f}")
            curves.append(curve)
            for d, d_wl, cg, bits in zip(curve.distances, curve.distances_wavelengths, curve.capacity_gain, curve.capacity_bits):
                rows.append({"system": spec.label, "D_wavelengths": d_wl, "D_meters": d, "cg": cg, "capacity_bits": bits})

        crossings = crossing_table(curves, settings.targets, settings.rtol)
        summary = {"peak_cg": {c.label: c.peak_cg for c in curves}}
        return {"results.csv": rows, "crossings.csv": crossings}, summary

    def _ber_sweep(self):
        rows: Rows = []
        summary = {}
        for spec in self.config.systems:
            report = simulate_link(self.config.link_config(spec), self.threads)
            for row in report.rows():
                rows.append({"system": spec.label, **row})
            summary[spec.label] = {
                "mean_ber": [float(b) for b in report.mean_ber],
                "below_fec_threshold": [bool(b) for b in report.below_fec_threshold()],
            }
        return {"results.csv": rows}, summary

    def _robustness(self):
        rows: Rows = []
        summary = {}
        for spec in self.config.systems:
            report = simulate_link(self.config.link_config(spec), self.threads)
            for i, snr in enumerate(report.snr_db):
                rows.append({
                    "system": spec.label,
                    "snr_db": snr,
                    "eta_s": report.eta_s[i],
                    "ber": report.mean_ber[i],
                    "evm_pct": report.evm_pct[i].mean(),
                    "spectrum_efficiency": report.spectrum_efficiency,
                    "effective_efficiency": report.eta_s[i] * report.spectrum_efficiency,
                })
            summary[spec.label] = {"eta_s": [float(e) for e in report.eta_s]}
        return {"results.csv": rows}, summary

    def _pasr(self):
        cfg = self.config
        settings = cfg.pasr

        def run(error: Optional[FeedErrorModel]):
            return pasr_experiment(
                settings.mode_groups,
                settings.distance,
                tones=settings.tones,
                error=error,
                wavelength=cfg.wavelength,
                n_rx=settings.n_rx,
                k_prime=settings.k_prime,
                sample_rate=settings.sample_rate,
                n_samples=settings.n_samples,
                beta_a=cfg.beta_a,
                placement_error_rms=settings.placement_error_rms,
                seed=cfg.seed,
            )

        ptm = run(cfg.feed_error)
        dbm = ptm.dbm()
        matrix_rows: Rows = []
        for i, label in enumerate(ptm.labels):
            row: Dict[str, object] = {"transmitted": label}
            for n, setting in enumerate(ptm.labels):
                row[f"demux_{n + 1}_dbm"] = dbm[i, n]
            matrix_rows.append(row)

        error = cfg.feed_error or FeedErrorModel()
        ct_rows: Rows = []
        for n, value in enumerate(crosstalk(ptm)):
            ct_rows.append({
                "amplitude_rms": error.amplitude_error_rms,
                "phase_rms_deg": np.rad2deg(error.phase_error_rms),
                "seeds": 1,
                "demux": ptm.labels[n],
                "ct_db": value,
            })

        for amplitude, phase in settings.error_levels:
            cts = np.array([
                crosstalk(run(FeedErrorModel(amplitude, phase, cfg.seed + 2 * s)))
                for s in range(settings.error_seeds)
            ])
            for n in range(cts.shape[1]):
                ct_rows.append({
                    "amplitude_rms": amplitude,
                    "phase_rms_deg": np.rad2deg(phase),
                    "seeds": settings.error_seeds,
                    "demux": ptm.labels[n],
                    "ct_db": cts[:, n].mean(),
                })

        summary = {"crosstalk_db": [float(v) for v in crosstalk(ptm)]}
        return {"results.csv": matrix_rows, "crosstalk.csv": ct_rows}, summary

    def _pattern(self):
        settings = self.config.pattern
        phi_deg = np.arange(-180.0, 180.0 + settings.step_deg / 2, settings.step_deg)
        phi_deg = phi_deg[phi_deg <= 180.0]
        rows: Rows = []
        summary = {}
        for mg in settings.mode_groups:
            pattern = beam_pattern(mg, np.deg2rad(phi_deg))
            power = np.abs(pattern) ** 2
            gain_db = np.maximum(10 * np.log10(np.maximum(power, 1e-300)), PATTERN_FLOOR_DB)
            phase_deg = np.rad2deg(np.angle(pattern))
            for p, g, ph in zip(phi_deg, gain_db, phase_deg):
                rows.append({"mode_group": mg.label(), "phi_deg": p, "gain_db": g, "phase_deg": ph})

            entry = {"directivity_gain_db": directivity_gain_db(mg)}
            try:
                entry["equivalent_order"] = float(equivalent_order(mg))
                entry["half_power_beamwidth_deg"] = half_power_beamwidth(mg)
            except ValueError as e:
                logger.warning(f"{mg.label()}: {e}")
            summary[mg.label()] = entry
        return {"results.csv": rows}, summary

    def _directionality(self):
        cfg = self.config
        reference = cfg.systems[0]
        rows: Rows = []
        summary = {}

        def powers(spec):
            p_total = calibrate_total_power(spec.geometry, cfg.directionality_snr_db, cfg.noise_variance, cfg.beta_a)
            return received_signal_power(spec.system.build(spec.geometry, cfg.beta_a, cfg.feed_error), p_total)

        reference_power = powers(reference)
        for spec in cfg.systems:
            power = powers(spec)
            if power.shape != reference_power.shape:
                raise ValueError(f"{spec.label} has {power.size} receivers, the reference has {reference_power.size}")
            gain_db = 10 * np.log10(power / reference_power)
            for r, (p, g) in enumerate(zip(power, gain_db)):
                rows.append({"system": spec.label, "receiver": r, "signal_power": p, "gain_db_vs_reference": g})
            mean_gain = float(10 * np.log10(power.mean() / reference_power.mean()))
            logger.info(f"{spec.label}: mean received power {mean_gain:+.2f} dB vs {reference.label}")
            summary[spec.label] = {"mean_gain_db": mean_gain}
        return {"results.csv": rows}, summary

    def _link_budget(self):
        cfg = self.config
        settings = cfg.link_budget
        rayleigh_rows: Rows = []
        for label, aperture in settings.apertures:
            distance = rayleigh_distance(aperture, cfg.wavelength)
            rayleigh_rows.append({
                "label": label,
                "aperture_m": aperture,
                "rayleigh_m": distance,
                "rayleigh_wavelengths": distance / cfg.wavelength,
            })
        efficiency_rows: Rows = [
            {
                "modulation": modulation.value,
                "n_streams": settings.n_streams,
                "spectrum_efficiency": spectrum_efficiency(modulation, settings.n_streams),
            }
            for modulation in settings.modulations
        ]
        summary = {"rayleigh_m": {row["label"]: row["rayleigh_m"] for row in rayleigh_rows}}
        return {"results.csv": rayleigh_rows, "spectrum_efficiency.csv": efficiency_rows}, summary
