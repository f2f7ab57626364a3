import pytest
import numpy as np
from channel import (
    ChannelKind,
    LinkSystem,
    TransferMatrix,
    build_mg_channel,
    build_mimo_channel,
    build_psoam_channel,
    calibrate_total_power,
    channel_matrix,
    received_signal_power,
    reference_gain,
)
from geometry import LinkGeometry, Side, TxLayout, element_positions, wavelength_from_frequency
from modegroup import FeedErrorModel, ModeGroup, beam_pattern, equivalent_order, perturb

LAMBDA = wavelength_from_frequency(10.2e9)


class TestChannelConstruction:

    def setup_method(self):
        self.coaxial = LinkGeometry(distance=5.0, wavelength=LAMBDA, rx_aperture=0.6)
        self.ula = LinkGeometry(
            distance=25.0, wavelength=LAMBDA, rx_aperture=0.35, tx_layout=TxLayout.ULA, tx_aperture=0.35
        )

    def test_siso_entry_is_reference_link(self):
        geom = LinkGeometry(distance=3.0, wavelength=LAMBDA, n_tx=1, n_rx=1)
        H = build_mimo_channel(geom, beta_a=2.0)
        assert H.entries.shape == (1, 1)
        assert abs(H.entries[0, 0]) == pytest.approx(reference_gain(geom, beta_a=2.0), rel=1e-12)
        assert np.angle(H.entries[0, 0]) == pytest.approx(np.angle(np.exp(-2j * np.pi * 3.0 / LAMBDA)), abs=1e-9)

    def test_zero_order_groups_match_mimo(self):
        flat = [ModeGroup.from_orders([0]), ModeGroup.from_orders([0])]
        mimo = build_mimo_channel(self.ula)
        mg = build_mg_channel(self.ula, flat)
        assert np.array_equal(mg.entries, mimo.entries)

    def test_columns_weighted_by_pattern(self):
        mgs = [ModeGroup.parse("-4..-1"), ModeGroup.parse("1..4")]
        mimo = build_mimo_channel(self.ula).entries
        mg = build_mg_channel(self.ula, mgs).entries

        tx = element_positions(self.ula, Side.TX)
        rx = element_positions(self.ula, Side.RX)
        for n, group in enumerate(mgs):
            phi = np.arctan2(rx[:, 1] - tx[n, 1], rx[:, 0] - tx[n, 0])
            assert np.allclose(mg[:, n], mimo[:, n] * beam_pattern(group, phi), rtol=1e-12, atol=0)

    def test_beta_a_scales_entries_and_singular_values(self):
        mgs = [ModeGroup.parse("1..4"), ModeGroup.parse("6..9")]
        for scale in (0.5, 3.0, 10.0):
            base = build_mg_channel(self.coaxial, mgs)
            scaled = build_mg_channel(self.coaxial, mgs, beta_a=scale)
            assert np.allclose(scaled.entries, scale * base.entries, rtol=1e-14, atol=0)
            assert np.allclose(scaled.singular_values(), scale * base.singular_values(), rtol=1e-12, atol=0)

    def test_ideal_feed_error_leaves_channel_unchanged(self):
        mgs = [ModeGroup.parse("1..4"), ModeGroup.parse("-4..-1")]
        ideal = build_mg_channel(self.coaxial, mgs)
        unperturbed = build_mg_channel(self.coaxial, [perturb(mg, FeedErrorModel(seed=9)) for mg in mgs])
        assert np.array_equal(unperturbed.entries, ideal.entries)

    def test_symmetric_ula_link(self):
        geom = LinkGeometry(distance=7.0, wavelength=LAMBDA, rx_aperture=0.35, tx_layout=TxLayout.ULA, tx_aperture=0.35)
        h = build_mimo_channel(geom).entries
        assert h[0, 0] == h[1, 1]
        assert h[0, 1] == h[1, 0]

    def test_coaxial_phase_structure(self):
        # receivers at -phi0 and +phi0; each group's mainlobe carries exp(-j l_e phi)
        mgs = [ModeGroup.parse("1..4"), ModeGroup.parse("-4..-1")]
        H = build_mg_channel(self.coaxial, mgs).entries
        mimo = build_mimo_channel(self.coaxial).entries
        phi0 = np.arctan2(0.3, 5.0)
        for n, mg in enumerate(mgs):
            l_e = float(equivalent_order(mg))
            for m, phi in enumerate((-phi0, phi0)):
                amplitude = np.sin(mg.size * phi / 2) / (np.sqrt(mg.size) * np.sin(phi / 2))
                assert H[m, n] == pytest.approx(mimo[m, n] * amplitude * np.exp(-1j * l_e * phi), rel=1e-12)
            assert H[0, n] / H[1, n] == pytest.approx(np.exp(2j * l_e * phi0), rel=1e-12)

    def test_zero_vorticity_difference_is_rank_one(self):
        H = build_mg_channel(self.coaxial, [ModeGroup.from_orders([-1, 1]), ModeGroup.from_orders([-2, 2])])
        s = H.singular_values()
        assert s[-1] < 1e-10 * s[0]

    def test_reversed_link_transposes(self):
        geom = LinkGeometry(distance=4.0, wavelength=LAMBDA, rx_aperture=0.5, tx_layout=TxLayout.ULA, tx_aperture=0.2)
        forward = build_mimo_channel(geom).entries
        backward = build_mimo_channel(geom.reversed()).entries
        assert np.allclose(backward, forward.T, rtol=1e-12, atol=0)

    def test_psoam_channel(self):
        H = build_psoam_channel(self.coaxial, [10, 20])
        assert H.kind is ChannelKind.PSOAM_MIMO
        assert H.metadata["mode_groups"] == ["MG{10}", "MG{20}"]

    def test_errors(self):
        with pytest.raises(ValueError) as excinfo:
            channel_matrix(np.zeros((1, 2)), np.zeros((1, 2)), LAMBDA)
        assert "zero propagation distance" in str(excinfo.value)

        with pytest.raises(ValueError):
            build_mg_channel(self.coaxial, [ModeGroup.parse("1..4")])

        with pytest.raises(ValueError):
            TransferMatrix(np.array([[np.nan]]), LAMBDA, ChannelKind.MIMO)

    def test_entries_read_only(self):
        H = build_mimo_channel(self.coaxial)
        with pytest.raises(ValueError):
            H.entries[0, 0] = 1.0


class TestCalibration:

    def test_reference_snr(self):
        geom = LinkGeometry(distance=7.0, wavelength=LAMBDA, n_tx=1, n_rx=1)
        p_total = calibrate_total_power(geom, 30.0, noise_variance=2.0)
        H = build_mimo_channel(geom)
        snr = abs(H.entries[0, 0]) ** 2 * p_total / 2.0
        assert snr == pytest.approx(1000.0, rel=1e-12)

    def test_non_finite_snr(self):
        geom = LinkGeometry(distance=7.0, wavelength=LAMBDA)
        with pytest.raises(ValueError):
            calibrate_total_power(geom, float("inf"), 1.0)

    def test_mode_groups_raise_received_power(self):
        # Q=4 groups against single-mode transmitters at the same geometry and power
        geom = LinkGeometry(
            distance=25.0, wavelength=LAMBDA, rx_aperture=0.35, tx_layout=TxLayout.ULA, tx_aperture=0.35
        )
        p_total = calibrate_total_power(geom, 30.0, 1.0)
        single = LinkSystem(ChannelKind.PSOAM_MIMO, orders=(2, -3)).build(geom)
        groups = LinkSystem(
            ChannelKind.MG_MIMO, mode_groups=(ModeGroup.parse("-4..-1"), ModeGroup.parse("1..4"))
        ).build(geom)

        gain = received_signal_power(groups, p_total) / received_signal_power(single, p_total)
        assert np.all(np.abs(10 * np.log10(gain) - 6.0) <= 0.2)


class TestLinkSystem:

    def test_validation(self):
        with pytest.raises(ValueError) as excinfo:
            LinkSystem(ChannelKind.MG_MIMO)
        assert "needs mode-groups" in str(excinfo.value)
        with pytest.raises(ValueError):
            LinkSystem("psoam_mimo")

    def test_describe(self):
        system = LinkSystem("mg_mimo", mode_groups=(ModeGroup.parse("1..10"), ModeGroup.parse("11..20")))
        assert system.describe() == "MG-MIMO MG{1..10} x MG{11..20}"
        assert LinkSystem().describe() == "MIMO"

    def test_feed_error_changes_channel(self):
        geom = LinkGeometry(distance=5.0, wavelength=LAMBDA, rx_aperture=0.6)
        system = LinkSystem("mg_mimo", mode_groups=(ModeGroup.parse("1..2"), ModeGroup.parse("6..7")))
        ideal = system.build(geom)
        perturbed = system.build(geom, feed_error=FeedErrorModel(0.05, 0.05, seed=1))
        again = system.build(geom, feed_error=FeedErrorModel(0.05, 0.05, seed=1))
        assert not np.allclose(ideal.entries, perturbed.entries)
        assert np.array_equal(perturbed.entries, again.entries)
