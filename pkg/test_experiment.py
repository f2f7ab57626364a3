import pytest
import numpy as np
from unittest.mock import patch
from config import parse_config
from experiment import ExperimentRunner
from geometry import rayleigh_distance, wavelength_from_frequency
from phy import LinkReport, Modulation, SingularChannelError


def _config(document):
    config, diagnostics = parse_config(document)
    assert diagnostics == []
    return config


def _report(label="MG", eta=(0.5, 1.0)):
    return LinkReport(
        snr_db=np.array([10.0, 20.0]),
        ber=np.array([[0.01, 0.02], [0.0, 0.0]]),
        evm_pct=np.array([[30.0, 32.0], [10.0, 12.0]]),
        eta_s=np.array(eta),
        spectrum_efficiency=6.5,
        modulation=Modulation.QPSK,
        label=label,
    )


BER_DOC = {
    "scenario": "ber_sweep",
    "link": {"frequency_hz": 10.2e9, "distance": 5.0, "rx_aperture": 0.6},
    "systems": [{"kind": "mg_mimo", "label": "dl_e=5", "mode_groups": ["1..4", "6..9"]}],
    "phy": {"snr_grid_db": [10, 20], "bits_per_point": 2080},
}


class TestExperimentRunner:

    def test_requires_config(self):
        with pytest.raises(ValueError) as excinfo:
            ExperimentRunner(None)
        assert "An experiment config is required" in str(excinfo.value)

    @patch('experiment.simulate_link')
    def test_ber_sweep_flow(self, mock_simulate):
        mock_simulate.return_value = _report()
        result = ExperimentRunner(_config(BER_DOC)).run()

        assert result["success"] is True
        rows = result["tables"]["results.csv"]
        assert len(rows) == 4
        assert rows[0] == {"system": "dl_e=5", "snr_db": 10.0, "stream": 0, "ber": 0.01, "evm_pct": 30.0, "eta_s": 0.5}
        assert result["summary"]["dl_e=5"]["below_fec_threshold"] == [False, True]

        link_config = mock_simulate.call_args[0][0]
        assert link_config.label == "dl_e=5"
        assert link_config.bits_per_point == 2080

    @patch('experiment.simulate_link')
    def test_singular_channel_failure(self, mock_simulate):
        mock_simulate.side_effect = SingularChannelError("ZF undefined, singular channel")
        result = ExperimentRunner(_config(BER_DOC)).run()
        assert result["success"] is False
        assert "ZF undefined" in result["error"]
        assert result["tables"] == {}

    @patch('experiment.simulate_link')
    def test_robustness_rows(self, mock_simulate):
        mock_simulate.return_value = _report(eta=(0.25, 1.0))
        document = dict(BER_DOC, scenario="robustness")
        result = ExperimentRunner(_config(document)).run()
        rows = result["tables"]["results.csv"]
        assert [row["eta_s"] for row in rows] == [0.25, 1.0]
        assert rows[0]["effective_efficiency"] == pytest.approx(0.25 * 6.5)
        assert rows[0]["ber"] == pytest.approx(0.015)


class TestScenarios:

    def test_capacity_sweep(self):
        document = {
            "scenario": "capacity_sweep",
            "link": {"frequency_hz": 10e9, "rx_aperture_wavelengths": 6.366},
            "systems": [{"kind": "mg_mimo", "mode_groups": ["1..10", "11..20"]}],
            "capacity": {"grid": {"points": 200}, "targets": [2.0, 2.9]},
        }
        result = ExperimentRunner(_config(document), threads=2).run()
        assert result["success"] is True
        assert len(result["tables"]["results.csv"]) == 200
        assert result["summary"]["peak_cg"]["MG-MIMO MG{1..10} x MG{11..20}"] == pytest.approx(2.6, abs=0.15)
        crossings = result["tables"]["crossings.csv"]
        assert [row["target_cg"] for row in crossings] == [2.0]

    def test_pattern(self):
        document = {"scenario": "pattern", "pattern": {"mode_groups": ["1..4", [3]], "step_deg": 1.0}}
        result = ExperimentRunner(_config(document)).run()
        rows = result["tables"]["results.csv"]
        assert len(rows) == 2 * 361
        boresight = [r for r in rows if r["mode_group"] == "MG{1..4}" and r["phi_deg"] == 0.0][0]
        assert boresight["gain_db"] == pytest.approx(6.0206, abs=1e-4)
        assert result["summary"]["MG{1..4}"]["equivalent_order"] == 2.5
        assert "half_power_beamwidth_deg" not in result["summary"]["MG{3}"]

    def test_pasr(self):
        document = {
            "scenario": "pasr",
            "link": {"frequency_hz": 10.2e9},
            "pasr": {
                "mode_groups": ["1..4", "-4..-1"],
                "distance": 2.0,
                "error_levels": [[0.03, 3.0]],
                "error_seeds": 3,
            },
        }
        result = ExperimentRunner(_config(document)).run()
        matrix = result["tables"]["results.csv"]
        assert [row["transmitted"] for row in matrix] == ["MG{1..4}", "MG{-4..-1}"]
        assert matrix[0]["demux_1_dbm"] > matrix[1]["demux_1_dbm"]
        ct_rows = result["tables"]["crosstalk.csv"]
        assert len(ct_rows) == 4
        assert all(row["ct_db"] <= -200 for row in ct_rows[:2])
        assert all(-200 < row["ct_db"] < 0 for row in ct_rows[2:])
        assert ct_rows[2]["seeds"] == 3

    def test_directionality(self):
        document = {
            "scenario": "directionality",
            "link": {"frequency_hz": 10.2e9, "distance": 25.0, "rx_aperture": 0.35, "tx_layout": "ula", "tx_aperture": 0.35},
            "systems": [
                {"kind": "psoam_mimo", "label": "PSOAM", "orders": [2, -3]},
                {"kind": "mg_mimo", "label": "MG", "mode_groups": ["-4..-1", "1..4"]},
            ],
        }
        result = ExperimentRunner(_config(document)).run()
        assert result["summary"]["PSOAM"]["mean_gain_db"] == pytest.approx(0.0, abs=1e-12)
        assert result["summary"]["MG"]["mean_gain_db"] == pytest.approx(6.0, abs=0.2)
        assert len(result["tables"]["results.csv"]) == 4

    def test_link_budget(self):
        document = {
            "scenario": "link_budget",
            "link": {"frequency_hz": 10.2e9},
            "link_budget": {"apertures": [{"label": "ULA", "aperture": 0.35}], "modulations": ["qpsk", "qam64"]},
        }
        result = ExperimentRunner(_config(document)).run()
        row = result["tables"]["results.csv"][0]
        wavelength = wavelength_from_frequency(10.2e9)
        assert row["rayleigh_m"] == pytest.approx(rayleigh_distance(0.35, wavelength))
        assert row["rayleigh_wavelengths"] == pytest.approx(2 * 0.35 ** 2 / wavelength ** 2)
        efficiencies = result["tables"]["spectrum_efficiency.csv"]
        assert [r["modulation"] for r in efficiencies] == ["qpsk", "qam64"]
        assert efficiencies[1]["spectrum_efficiency"] > efficiencies[0]["spectrum_efficiency"]
