import numpy as np
import pytest
from scipy.optimize import brentq

from models.beams import CellGeometry, ProbeBeam, TrappingSample
from models.config import load_config
from models.errors import DomainError, RegressionError
from models.species import CESIUM
from utils.broadening_utils import (
    critical_density,
    fit_gradient_series,
    gradient_broadening,
    gradient_coefficient,
    photon_scattering_rate,
    resolution_criterion,
    saturation_intensity,
    thermal_speed,
)
from utils.zeeman_utils import g_factor, larmor_frequency, qz_splitting

G_F = g_factor(CESIUM, 4.0)


@pytest.fixture
def estimate_section(configs_dir):
    return load_config(str(configs_dir / "estimate.cfg")).estimate


# === DISPERSIÓN DE FOTONES ===

def test_saturation_intensity():
    assert saturation_intensity(852.3e-9, 5.234e6) == pytest.approx(11.05, rel=1e-2)


def test_scattering_rate_forms_agree_far_from_resonance(estimate_section):
    full = photon_scattering_rate(estimate_section.probe)
    far = photon_scattering_rate(estimate_section.probe, far_detuned=True)
    assert full.value == pytest.approx(102.0, rel=2e-2)
    assert far.value == pytest.approx(full.value, rel=1e-3)
    assert full.order_of_magnitude


def test_scattering_rate_near_resonance_warns(caplog):
    beam = ProbeBeam.from_mw_per_cm2(1.0, wavelength=852.3e-9, natural_linewidth=5.234e6, detuning=1e6)
    assert beam.intensity == pytest.approx(10.0)
    with caplog.at_level("WARNING", logger="Broadening"):
        photon_scattering_rate(beam)
    assert "desintonía" in caplog.text


def test_far_detuned_form_needs_detuning():
    beam = ProbeBeam(intensity=10.0, wavelength=852.3e-9, natural_linewidth=5.234e6, detuning=0.0)
    with pytest.raises(DomainError):
        photon_scattering_rate(beam, far_detuned=True)


# === GRADIENTE ===

def test_thermal_speed_room_temperature():
    assert thermal_speed(300.0, CellGeometry(length=0.03, temperature=300.0, bias_field=0.93).atomic_mass) == pytest.approx(137.0, rel=5e-3)


def test_gradient_coefficient_for_cesium_cell(estimate_section):
    assert gradient_coefficient(estimate_section.cell, G_F) == pytest.approx(0.0241, rel=1e-2)


def test_gradient_broadening_is_quadratic(estimate_section):
    cell = estimate_section.cell
    doubled = cell.model_copy(update={"gradient": 2.0 * cell.gradient})
    assert gradient_broadening(doubled, G_F).value == pytest.approx(4.0 * gradient_broadening(cell, G_F).value)


def test_tesla_gradient_conversion():
    cell = CellGeometry.from_tesla_per_meter(2e-6, length=0.03, temperature=300.0, bias_field=0.93)
    assert cell.gradient == pytest.approx(20.0)
    assert cell.gradient_tesla_per_meter == pytest.approx(2e-6)


def test_gradient_series_recovers_offset_and_slope(estimate_section):
    series = estimate_section.gradient_series
    result = fit_gradient_series(series.gradients, series.widths)
    assert result.value == pytest.approx(0.0158, rel=1e-9)
    assert result.details["offset_hz"] == pytest.approx(8.7, rel=1e-9)
    assert not result.order_of_magnitude


def test_gradient_series_needs_three_distinct_points():
    with pytest.raises(RegressionError):
        fit_gradient_series([0.0, 10.0], [8.7, 10.28])
    with pytest.raises(RegressionError):
        fit_gradient_series([10.0, -10.0, 10.0], [1.0, 2.0, 3.0])


# === CRITERIO DE RESOLUCIÓN ===

def test_resolution_threshold_with_measured_coefficient(estimate_section):
    cell = estimate_section.cell
    estimate = resolution_criterion(cell, G_F, CESIUM.hyperfine_splitting, coefficient=0.0158)
    assert estimate.value == pytest.approx(1.23e-3, rel=1e-2)

    nu_qz = qz_splitting(larmor_frequency(CESIUM, cell.bias_field), CESIUM.hyperfine_splitting)
    gradient = brentq(lambda g: 0.0158 * g**2 - nu_qz, 0.0, 1e4)
    assert estimate.details["threshold_gradient_mg_m"] == pytest.approx(gradient, rel=1e-3)
    assert estimate.details["resolved"]


def test_resolution_threshold_with_theoretical_coefficient(estimate_section):
    estimate = resolution_criterion(estimate_section.cell, G_F, CESIUM.hyperfine_splitting)
    assert estimate.value == pytest.approx(1.0e-3, rel=5e-2)


# === ATRAPAMIENTO ===

def test_critical_density(estimate_section):
    estimate = critical_density(estimate_section.trapping)
    assert estimate.unit == "1/cm^3"
    assert estimate.value == pytest.approx(2.15e10, rel=1e-2)


def test_critical_density_for_d1_pumping():
    # la fórmula da ~2·10¹⁰ cm⁻³; el valor citado habitualmente es 2·10¹¹
    sample = TrappingSample(wavelength=894.6e-9, natural_linewidth=4.6e6, doppler_width=378e6, extent=0.03)
    cross_section = (894.6e-9) ** 2 / (2.0 * np.pi) * 4.6e6 / 378e6
    estimate = critical_density(sample)
    assert estimate.value == pytest.approx(1e-6 / (cross_section * 0.03), rel=1e-12)
    assert estimate.value == pytest.approx(2.15e10, rel=1e-2)
    assert estimate.order_of_magnitude


def test_critical_density_scales_inversely_with_extent():
    small = TrappingSample(wavelength=852.3e-9, natural_linewidth=5.234e6, doppler_width=3.7e8, extent=0.01)
    large = small.model_copy(update={"extent": 0.04})
    assert critical_density(small).value == pytest.approx(4.0 * critical_density(large).value)
