import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from models.config import load_config
from models.errors import ConvergenceError, DomainError, EstimationError
from models.pulses import PulseSchedule, PulseSegment
from models.settings import settings
from models.trace import SpectrumTrace
from utils.pulsed_utils import (
    area_width_estimate,
    evolve_coherence,
    periodic_fixed_point,
    pulsed_mors,
    ripple_period,
    ripple_spacing,
    schedule_from_timeline,
    simulate_pulsed,
)
from utils.spectrum_utils import two_level_mors


def _continuous(gamma_hz: float = 20.0) -> PulseSchedule:
    segment = PulseSegment(duration=0.05, gamma_total=gamma_hz, drive_on=True, probe_window=True)
    return PulseSchedule(segments=[segment], chi=3.0, delta_rho=0.5, center_frequency=100.0)


@pytest.fixture
def fig5_schedule(configs_dir) -> PulseSchedule:
    return load_config(str(configs_dir / "fig5.cfg")).pulses.to_schedule()


# === NÚCLEO ===

def test_evolution_at_zero_time_is_identity():
    assert evolve_coherence(0.3 + 0.1j, 50.0, 20.0, 1.0, 1.0, 0.0) == pytest.approx(0.3 + 0.1j)


def test_evolution_undamped_on_resonance_is_linear():
    assert evolve_coherence(0.2j, 0.0, 0.0, 2.0, 0.5, 0.1) == pytest.approx(0.2j + 1j * 2.0 * 0.5 * 0.1)


def test_evolution_rejects_negative_time():
    with pytest.raises(DomainError):
        evolve_coherence(0.0, 1.0, 1.0, 1.0, 1.0, -1e-3)


@hyp_settings(deadline=None, max_examples=50)
@given(
    delta=st.floats(min_value=-500.0, max_value=500.0),
    gamma=st.floats(min_value=0.0, max_value=200.0),
    t1=st.floats(min_value=0.0, max_value=0.05),
    t2=st.floats(min_value=0.0, max_value=0.05),
)
def test_evolution_composes_over_time(delta, gamma, t1, t2):
    rho0 = 0.1 - 0.2j
    split = evolve_coherence(evolve_coherence(rho0, delta, gamma, 3.0, 0.5, t1), delta, gamma, 3.0, 0.5, t2)
    whole = evolve_coherence(rho0, delta, gamma, 3.0, 0.5, t1 + t2)
    assert split == pytest.approx(whole, rel=1e-9, abs=1e-12)


def test_long_evolution_reaches_cw_steady_state():
    delta, gamma = 2.0 * np.pi * 15.0, 2.0 * np.pi * 20.0
    rho = evolve_coherence(0.0, delta, gamma, 3.0, 0.5, 1.0)
    steady = -1j * 3.0 * 0.5 / (1j * delta - 0.5 * gamma)
    assert rho == pytest.approx(steady, rel=1e-10)


# === ESTADO PERIÓDICO ===

def test_continuous_drive_reproduces_cw_lineshape():
    schedule = _continuous()
    grid = np.linspace(0.0, 200.0, 401)
    trace, diagnostics = simulate_pulsed(schedule, grid)
    cw = two_level_mors(grid, 100.0, 20.0, 3.0, 0.5)
    assert diagnostics.all_converged
    assert trace.values == pytest.approx(cw.values, rel=1e-6)


def test_iteration_agrees_with_closed_fixed_point(fig5_schedule):
    grid = np.linspace(-300.0, 300.0, 301)
    _, diagnostics = simulate_pulsed(fig5_schedule, grid)
    assert diagnostics.all_converged
    assert np.max(diagnostics.fixed_point_gap) < 1e-8
    closed = periodic_fixed_point(fig5_schedule, 2.0 * np.pi * grid)
    assert np.all(np.isfinite(closed))


@pytest.mark.parametrize("gamma_hz", [2.0, 20.0])
def test_fixed_point_within_tolerance(gamma_hz):
    schedule = _continuous(gamma_hz)
    grid = np.linspace(0.0, 200.0, 81)
    _, diagnostics = simulate_pulsed(schedule, grid)
    tolerance = settings.pulsed_tolerance * abs(schedule.chi * schedule.delta_rho)
    assert diagnostics.all_converged
    assert np.max(diagnostics.fixed_point_gap) <= tolerance


def test_spectrum_is_symmetric_about_center(fig5_schedule):
    offsets = np.linspace(-300.0, 300.0, 301)
    trace, _ = simulate_pulsed(fig5_schedule, fig5_schedule.center_frequency + offsets)
    assert trace.values == pytest.approx(trace.values[::-1], rel=1e-6)


def test_spectrum_scales_with_drive_squared(fig5_schedule):
    grid = fig5_schedule.center_frequency + np.linspace(-300.0, 300.0, 101)
    base, _ = simulate_pulsed(fig5_schedule, grid)
    stronger = fig5_schedule.model_copy(update={"chi": 3.0 * fig5_schedule.chi, "delta_rho": 0.5 * fig5_schedule.delta_rho})
    scaled, _ = simulate_pulsed(stronger, grid)
    assert scaled.values == pytest.approx(2.25 * base.values, rel=1e-8)


@pytest.mark.parametrize("update", [{"chi": 0.0}, {"delta_rho": 0.0}])
def test_zero_drive_gives_zero_spectrum(update):
    schedule = _continuous().model_copy(update=update)
    trace, diagnostics = simulate_pulsed(schedule, np.linspace(50.0, 150.0, 21))
    assert diagnostics.all_converged
    assert np.all(trace.values == 0.0)


def test_threaded_sweep_matches_serial(monkeypatch, fig5_schedule):
    grid = np.linspace(-300.0, 300.0, 301)
    serial, _ = simulate_pulsed(fig5_schedule, grid)
    monkeypatch.setattr(settings, "threads", 4)
    threaded, _ = simulate_pulsed(fig5_schedule, grid)
    assert threaded.values == pytest.approx(serial.values, rel=1e-12)


def test_non_convergence_is_reported(monkeypatch):
    monkeypatch.setattr(settings, "pulsed_max_cycles", 1)
    grid = np.linspace(50.0, 150.0, 11)
    trace, diagnostics = simulate_pulsed(_continuous(), grid)
    assert not diagnostics.all_converged
    assert len(trace) == 11
    with pytest.raises(ConvergenceError) as excinfo:
        pulsed_mors(_continuous(), grid)
    assert excinfo.value.exit_code == 4
    assert excinfo.value.diagnostics is not None


# === SECUENCIAS ===

def test_fig5_timeline(fig5_schedule):
    labels = [segment.label for segment in fig5_schedule.segments]
    assert labels == ["pump", "dark", "probe", "dark"]
    assert fig5_schedule.period == pytest.approx(15e-3)
    assert fig5_schedule.probe_time == pytest.approx(0.5e-3)
    assert ripple_period(fig5_schedule) == pytest.approx(66.667, rel=1e-4)


def test_timeline_longer_than_period():
    with pytest.raises(DomainError):
        schedule_from_timeline(5e-3, 788.0, 1e-3, 5e-3, 20.0, 18.0, 10e-3)


def test_schedule_needs_probe_window():
    with pytest.raises(ValueError):
        PulseSchedule(segments=[PulseSegment(duration=1e-3, gamma_total=10.0)])


def test_memory_ripple_spacing(fig5_schedule):
    grid = np.linspace(-600.0, 600.0, 2001)
    trace, _ = simulate_pulsed(fig5_schedule, grid)
    nominal = ripple_period(fig5_schedule)
    assert ripple_spacing(trace, nominal) == pytest.approx(nominal, rel=0.05)


# === ÁREA Y ANCHO ===

def test_area_width_on_lorentzian():
    grid = np.linspace(-500.0, 500.0, 10001)
    estimate = area_width_estimate(two_level_mors(grid, 0.0, 20.0, 1.0, 1.0))
    assert estimate.width == pytest.approx(20.0, rel=1e-2)
    assert estimate.peak_frequency == pytest.approx(0.0, abs=0.1)
    assert estimate.j_z_proxy == pytest.approx(np.sqrt(estimate.area * estimate.width))


def test_area_width_needs_a_peak():
    flat = SpectrumTrace(frequencies=np.arange(10.0), values=np.zeros(10))
    with pytest.raises(EstimationError):
        area_width_estimate(flat)
