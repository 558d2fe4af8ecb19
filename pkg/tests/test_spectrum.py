import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st
from scipy.signal import find_peaks

from models.config import load_config
from models.errors import DomainError, SingularResponseError
from models.spin import PopulationDistribution, SpinModel
from models.trace import SpectrumTrace, TraceKind
from utils.spin_utils import coupling_coefficient, epsilon_from_orientation
from utils.spectrum_utils import (
    add_gaussian_noise,
    dc_faraday,
    display_amplitude,
    frequency_grid,
    incoherent_mors,
    mors,
    steady_state_coherence,
    two_level_mors,
    unresolved_mors,
)


def _model_from(configs_dir, name):
    config = load_config(str(configs_dir / name))
    return config.model.to_spin_model(config.species.to_species())


# === ESPECTRO MORS ===

def test_power_matches_complex_response(fig1_model, fig1_grid):
    trace, response = mors(fig1_model, fig1_grid)
    assert trace.kind == TraceKind.MORS_POWER
    assert np.all(trace.values >= 0)
    assert trace.values == pytest.approx(response.power, rel=1e-12)


def test_low_orientation_shows_all_lines(fig1_trace):
    peaks, _ = find_peaks(fig1_trace.values)
    assert peaks.size == 8


def test_pump_broadened_peak_ratio(configs_dir):
    grid = np.linspace(325100.0, 325400.0, 3001)
    low, _ = mors(_model_from(configs_dir, "fig2a.cfg"), grid)
    high, _ = mors(_model_from(configs_dir, "fig2b.cfg"), grid)
    ratio = np.max(high.values) / np.max(low.values)
    assert 2.5 <= ratio <= 3.5


@hyp_settings(deadline=None, max_examples=40)
@given(
    st.floats(min_value=-0.95, max_value=0.95),
    st.floats(min_value=1.0, max_value=30.0),
)
def test_unresolved_limit_is_exact(p, gamma_com):
    model = SpinModel.from_orientation(p, atom_number=0.1, gamma_com=gamma_com, omega_center=500.0, amplitude=2.0)
    grid = np.linspace(400.0, 600.0, 201)
    trace, _ = mors(model, grid)
    limit = unresolved_mors(model.j_z, gamma_com, 500.0, grid, amplitude=2.0)
    assert trace.values == pytest.approx(limit.values, rel=1e-9, abs=1e-15)


@hyp_settings(deadline=None, max_examples=100)
@given(
    st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=9, max_size=9).filter(lambda v: sum(v) > 1e-3),
    st.floats(min_value=1.0, max_value=30.0),
)
def test_unresolved_limit_for_any_distribution(values, gamma_com):
    dist = PopulationDistribution.from_array(4.0, np.asarray(values))
    model = SpinModel.from_atom_number(0.1, 0.5, gamma_com=gamma_com, omega_center=500.0, omega_split=0.0)
    grid = np.linspace(400.0, 600.0, 201)
    trace, _ = mors(model, grid, populations=dist)
    # Σ C²Δρ_m = 2F·p para cualquier ρ_mm normalizada
    j_z = model.atom_number * float(np.dot(dist.m_values, dist.as_array()))
    limit = unresolved_mors(j_z, gamma_com, 500.0, grid)
    assert trace.values == pytest.approx(limit.values, rel=1e-10, abs=1e-16)


def test_resolved_comb_approaches_unresolved_limit():
    gamma_com = 30.0
    grid = np.linspace(-300.0, 300.0, 1201)
    deviations = []
    for ratio in (10.0, 30.0, 100.0):
        model = SpinModel.from_orientation(0.5, atom_number=0.1, gamma_com=gamma_com, omega_center=0.0, omega_split=gamma_com / ratio)
        trace, _ = mors(model, grid)
        limit = unresolved_mors(model.j_z, gamma_com, 0.0, grid)
        deviations.append(float(np.max(np.abs(trace.values - limit.values)) / np.max(limit.values)))
    assert deviations[0] > deviations[1] > deviations[2]
    assert deviations[2] < deviations[0] / 5.0


@pytest.mark.parametrize("epsilon", [0.6, 0.8, 1.25, 1.6])
def test_resolved_comb_shows_every_line(epsilon):
    model = SpinModel.from_atom_number(0.1, epsilon, gamma_com=4.0, omega_center=0.0, omega_split=40.0)
    trace, _ = mors(model, np.linspace(-200.0, 200.0, 4001))
    peaks, _ = find_peaks(trace.values)
    assert peaks.size == 8


def test_distribution_must_match_model_spin():
    dist = PopulationDistribution.from_array(3.0, np.ones(7))
    with pytest.raises(DomainError):
        mors(SpinModel(), np.linspace(-10.0, 10.0, 5), populations=dist)


@hyp_settings(deadline=None, max_examples=25)
@given(factor=st.floats(min_value=0.1, max_value=10.0))
def test_power_scales_with_atom_number_squared(factor):
    model = SpinModel.from_orientation(0.5, atom_number=0.1, gamma_com=9.4, omega_center=1000.0, omega_split=20.0)
    grid = np.linspace(850.0, 1150.0, 601)
    base, _ = mors(model, grid)
    scaled, _ = mors(model.model_copy(update={"n4": model.n4 * factor}), grid)
    assert scaled.values == pytest.approx(factor**2 * base.values, rel=1e-10)


def test_mirrored_populations_give_mirrored_comb():
    common = dict(gamma_com=9.4, omega_center=0.0)
    grid = np.linspace(-150.0, 150.0, 601)
    direct, _ = mors(SpinModel.from_atom_number(0.1, 0.4, omega_split=22.0, **common), grid)
    mirror, _ = mors(SpinModel.from_atom_number(0.1, 1.0 / 0.4, omega_split=-22.0, **common), grid)
    assert direct.values == pytest.approx(mirror.values, rel=1e-9)


def test_coherent_sum_exceeds_incoherent_when_lines_overlap():
    model = SpinModel.from_atom_number(1.0, 0.5, gamma_com=10.0, omega_center=0.0, omega_split=0.0)
    grid = np.array([0.0])
    coherent, _ = mors(model, grid)
    assert coherent.values[0] > incoherent_mors(model, grid)[0]


def test_line_coherences_build_the_response(fig1_model):
    grid = np.array([fig1_model.omega_center + 30.0])
    total = sum(
        coupling_coefficient(4.0, m) * steady_state_coherence(m, fig1_model, None, grid)[0]
        for m in np.arange(-4.0, 4.0)
    )
    _, response = mors(fig1_model, grid)
    assert fig1_model.atom_number * total == pytest.approx(response.as_complex()[0], rel=1e-12)


def test_zero_width_on_resonance_is_singular():
    model = SpinModel.from_atom_number(1.0, 0.5, gamma_com=0.0, omega_center=100.0, omega_split=0.0)
    with pytest.raises(SingularResponseError):
        mors(model, np.array([99.0, 100.0, 101.0]))


def test_empty_grid():
    with pytest.raises(DomainError):
        mors(SpinModel(), np.array([]))


# === DC-FARADAY Y LÍNEA AISLADA ===

def test_dc_faraday_equals_collective_spin(fig1_model):
    assert dc_faraday(fig1_model.populations, fig1_model.atom_number) == pytest.approx(fig1_model.j_z, rel=1e-12)


def test_two_level_lineshape():
    grid = np.linspace(-200.0, 200.0, 4001)
    trace = two_level_mors(grid, 0.0, 20.0, 3.0, 0.5)
    peak = (3.0 * 0.5) ** 2 / (np.pi * 20.0) ** 2
    assert np.max(trace.values) == pytest.approx(peak, rel=1e-12)
    # FWHM en Hz igual a gamma_hz
    half = grid[trace.values >= 0.5 * peak]
    assert half[-1] - half[0] == pytest.approx(20.0, abs=0.2)


# === MALLAS, RUIDO, VISUALIZACIÓN ===

def test_default_grid_span(fig1_model):
    grid = frequency_grid(fig1_model, points=101)
    assert grid[0] == pytest.approx(fig1_model.omega_center - 880.0)
    assert grid[-1] == pytest.approx(fig1_model.omega_center + 880.0)


def test_default_grid_needs_a_scale():
    model = SpinModel(gamma_com=0.0, omega_split=0.0)
    with pytest.raises(DomainError):
        frequency_grid(model)


def test_noise_is_reproducible_and_clipped(fig1_trace):
    first = add_gaussian_noise(fig1_trace, 0.05, seed=7)
    second = add_gaussian_noise(fig1_trace, 0.05, seed=7)
    other = add_gaussian_noise(fig1_trace, 0.05, seed=8)
    assert np.array_equal(first.values, second.values)
    assert not np.array_equal(first.values, other.values)
    assert np.all(first.values >= 0)
    assert first.meta["noise_seed"] == 7


def test_display_amplitude_is_square_root(fig1_trace):
    assert display_amplitude(fig1_trace) ** 2 == pytest.approx(fig1_trace.values, rel=1e-12)


def test_trace_validation():
    with pytest.raises(ValueError):
        SpectrumTrace(frequencies=[1.0, 1.0], values=[0.0, 0.0])
    with pytest.raises(ValueError):
        SpectrumTrace(frequencies=[1.0, 2.0], values=[0.0, -1.0])
    SpectrumTrace(frequencies=[1.0, 2.0], values=[0.0, -1.0], kind=TraceKind.DC_ANGLE)
