import pytest
import numpy as np
from geometry import (
    LinkGeometry,
    Side,
    TxLayout,
    azimuth_from_tx,
    element_positions,
    path_distance,
    rayleigh_distance,
    wavelength_from_frequency,
)

LAMBDA_10GHZ = wavelength_from_frequency(10e9)
LAMBDA_10_2GHZ = wavelength_from_frequency(10.2e9)


class TestLinkGeometry:

    def setup_method(self):
        self.ula = LinkGeometry(
            distance=10.0,
            wavelength=LAMBDA_10_2GHZ,
            rx_aperture=0.35,
            tx_layout=TxLayout.ULA,
            tx_aperture=0.2,
        )

    def test_wavelength(self):
        assert LAMBDA_10GHZ == pytest.approx(0.02998, rel=1e-4)
        assert LAMBDA_10_2GHZ == pytest.approx(0.02939, rel=1e-4)
        with pytest.raises(ValueError):
            wavelength_from_frequency(0)

    def test_invalid_geometry(self):
        with pytest.raises(ValueError) as excinfo:
            LinkGeometry(distance=0, wavelength=0.03)
        assert "Distance must be positive" in str(excinfo.value)

        with pytest.raises(ValueError) as excinfo:
            LinkGeometry(distance=1, wavelength=0.03, rx_aperture=-0.1)
        assert "non-negative" in str(excinfo.value)

    def test_coaxial_elements_at_origin(self):
        geom = LinkGeometry(distance=5.0, wavelength=0.03, rx_aperture=0.6)
        assert np.array_equal(element_positions(geom, Side.TX), np.zeros((2, 2)))

    def test_ula_positions(self):
        rx = element_positions(self.ula, Side.RX)
        tx = element_positions(self.ula, Side.TX)

        assert np.allclose(rx[:, 0], 10.0)
        assert np.allclose(rx[:, 1], [-0.175, 0.175])
        assert np.allclose(tx[:, 0], 0.0)
        assert np.allclose(tx[:, 1], [-0.1, 0.1])

    def test_ula_centered_on_boresight(self):
        for n in (2, 3, 4, 7, 10):
            geom = LinkGeometry(distance=8.0, wavelength=LAMBDA_10GHZ, n_tx=n, n_rx=n, rx_aperture=0.85,
                                tx_layout=TxLayout.ULA, tx_aperture=0.35)
            rx = element_positions(geom, Side.RX)
            tx = element_positions(geom, Side.TX)
            assert abs(rx[:, 1].mean()) <= 1e-12 * 0.85
            assert abs(tx[:, 1].mean()) <= 1e-12 * 0.35
            assert np.allclose(np.diff(rx[:, 1]), 0.85 / (n - 1))
            assert rx[-1, 1] - rx[0, 1] == pytest.approx(0.85)

    def test_single_element_on_centroid(self):
        geom = LinkGeometry(distance=3.0, wavelength=0.03, n_tx=1, n_rx=1, rx_aperture=1.0)
        assert np.array_equal(element_positions(geom, Side.RX), [[3.0, 0.0]])

    def test_with_distance_and_reverse(self):
        moved = self.ula.with_distance(20.0)
        assert moved.distance == 20.0
        assert moved.rx_aperture == self.ula.rx_aperture

        reversed_geom = self.ula.reversed()
        assert reversed_geom.tx_aperture == 0.35
        assert reversed_geom.rx_aperture == 0.2

        with pytest.raises(ValueError):
            LinkGeometry(distance=1, wavelength=0.03).reversed()


class TestGeometryHelpers:

    def test_path_distance(self):
        assert path_distance((0, 0), (3, 4)) == 5.0

    def test_azimuth(self):
        assert azimuth_from_tx((0, 0), (5, 0)) == 0.0
        assert azimuth_from_tx((0, 0), (1, 1)) == pytest.approx(np.pi / 4)
        assert azimuth_from_tx((0, 0), (1, -1)) == pytest.approx(-np.pi / 4)

        with pytest.raises(ValueError) as excinfo:
            azimuth_from_tx((1, 2), (1, 2))
        assert "undefined azimuth" in str(excinfo.value)

    def test_rayleigh_distances(self):
        # 20*lambda/pi receive aperture
        aperture = 20 * LAMBDA_10GHZ / np.pi
        assert rayleigh_distance(aperture, LAMBDA_10GHZ) / LAMBDA_10GHZ == pytest.approx(81.1, rel=0.015)
        assert rayleigh_distance(0.35, LAMBDA_10_2GHZ) == pytest.approx(8.3, rel=0.015)
        assert rayleigh_distance(0.85, LAMBDA_10_2GHZ) == pytest.approx(49.0, rel=0.015)

    def test_path_distance_examples(self):
        assert path_distance((0, 0), (5, 0)) == 5.0
        assert path_distance((0, 0), (5, 0.3)) == pytest.approx(5.00899, abs=1e-5)
        assert path_distance((2, 1), (2, 1)) == 0.0

    def test_triangle_inequality(self):
        rng = np.random.default_rng(5)
        for p, q, r in rng.uniform(-10, 10, (1000, 3, 2)):
            assert path_distance(p, r) <= path_distance(p, q) + path_distance(q, r) + 1e-12
            assert path_distance(p, q) == path_distance(q, p)

    def test_mirrored_receiver_negates_azimuth(self):
        rng = np.random.default_rng(6)
        for x, y in rng.uniform(0.1, 20, (200, 2)):
            assert azimuth_from_tx((0, 0), (x, -y)) == pytest.approx(-azimuth_from_tx((0, 0), (x, y)), rel=0, abs=1e-15)

    def test_rayleigh_distance_is_quadratic(self):
        for aperture in (0.1, 0.35, 0.85, 1.3):
            assert rayleigh_distance(2 * aperture, LAMBDA_10_2GHZ) == 4 * rayleigh_distance(aperture, LAMBDA_10_2GHZ)
