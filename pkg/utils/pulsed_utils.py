"""
Simulador pulsado: evolución en forma cerrada de la coherencia de dos niveles
(m = F−1, F) bajo una secuencia periódica de tramos, estado periódico
estacionario y espectro lock-in promediado en las ventanas de prueba.

El núcleo trabaja en rad/s. Los tramos declaran su decaimiento en Hz FWHM y
se convierten como Γ = 2π·gamma_total; la desintonía es Δ = 2π(ω − centro).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import find_peaks, peak_widths, savgol_filter
from scipy.special import expm1

from models.errors import ConvergenceError, DomainError, EstimationError
from models.pulses import AreaWidthEstimate, PulseSchedule, PulseSegment, PulsedDiagnostics
from models.settings import settings
from models.trace import SpectrumTrace, TraceKind

logger = logging.getLogger("Pulsed")

_SERIES_THRESHOLD = 1e-4


# === NÚCLEO EN FORMA CERRADA ===

def _phi1(lam: np.ndarray, t: float) -> np.ndarray:
    """(e^{λt} − 1)/λ, con límite t."""
    z = lam * t
    small = np.abs(z) < _SERIES_THRESHOLD
    safe = np.where(small, 1.0, lam)
    exact = expm1(z) / safe
    series = t * (1.0 + z / 2.0 + z**2 / 6.0)
    return np.where(small, series, exact)


def _phi2(lam: np.ndarray, t: float) -> np.ndarray:
    """(e^{λt} − 1 − λt)/λ², con límite t²/2."""
    z = lam * t
    small = np.abs(z) < _SERIES_THRESHOLD
    safe = np.where(small, 1.0, lam)
    exact = (expm1(z) - z) / safe**2
    series = t**2 * (0.5 + z / 6.0 + z**2 / 24.0)
    return np.where(small, series, exact)


def evolve_coherence(rho0, delta, gamma, chi: float, delta_rho: float, t: float):
    """
    ρ̃(t) = ρ̃₀ e^{λt} − (iχΔρ/λ)(1 − e^{λt}), λ = iΔ − Γ/2 (rad/s).

    Con Δ = Γ = 0 se usa el límite ρ̃₀ + iχΔρ·t.
    """
    if t < 0:
        raise DomainError("El tiempo de evolución debe ser ≥ 0")
    lam = 1j * np.asarray(delta, dtype=float) - 0.5 * np.asarray(gamma, dtype=float)
    result = np.asarray(rho0, dtype=complex) * np.exp(lam * t) + 1j * chi * delta_rho * _phi1(lam, t)
    if np.ndim(result) == 0:
        return complex(result)
    return result


def segment_map(segment: PulseSegment, detuning: np.ndarray, chi: float, delta_rho: float) -> Tuple[np.ndarray, np.ndarray]:
    """Coeficientes (a, b) de ρ ↦ aρ + b para un tramo."""
    lam = 1j * detuning - np.pi * segment.gamma_total
    drive = chi if segment.drive_on else 0.0
    a = np.exp(lam * segment.duration)
    b = 1j * drive * delta_rho * _phi1(lam, segment.duration)
    return a, b


def segment_integral(segment: PulseSegment, detuning: np.ndarray, rho0: np.ndarray, chi: float, delta_rho: float) -> np.ndarray:
    """∫₀ᵀ ρ̃(t) dt analítica para un tramo que parte de ρ0."""
    lam = 1j * detuning - np.pi * segment.gamma_total
    drive = chi if segment.drive_on else 0.0
    return rho0 * _phi1(lam, segment.duration) + 1j * drive * delta_rho * _phi2(lam, segment.duration)


def one_period_map(schedule: PulseSchedule, detuning) -> Tuple[np.ndarray, np.ndarray]:
    """Composición de los tramos de un periodo: ρ ↦ aρ + b."""
    detuning = np.asarray(detuning, dtype=float)
    a = np.ones_like(detuning, dtype=complex)
    b = np.zeros_like(detuning, dtype=complex)
    for segment in schedule.segments:
        a_seg, b_seg = segment_map(segment, detuning, schedule.chi, schedule.delta_rho)
        a, b = a_seg * a, a_seg * b + b_seg
    return a, b


def periodic_fixed_point(schedule: PulseSchedule, detuning) -> np.ndarray:
    """Punto fijo cerrado b/(1 − a) del mapa de un periodo."""
    a, b = one_period_map(schedule, detuning)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(a != 1.0, b / (1.0 - a), np.nan + 0j)


def _probe_average(schedule: PulseSchedule, detuning: np.ndarray, rho_start: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Promedio en las ventanas de prueba de un ciclo y coherencia al final del ciclo."""
    rho = rho_start
    integral = np.zeros_like(detuning, dtype=complex)
    for segment in schedule.segments:
        if segment.probe_window:
            integral = integral + segment_integral(segment, detuning, rho, schedule.chi, schedule.delta_rho)
        a_seg, b_seg = segment_map(segment, detuning, schedule.chi, schedule.delta_rho)
        rho = a_seg * rho + b_seg
    return integral / schedule.probe_time, rho


def _simulate_chunk(schedule: PulseSchedule, detuning: np.ndarray) -> Tuple[np.ndarray, dict]:
    a, b = one_period_map(schedule, detuning)
    tolerance = settings.pulsed_tolerance * abs(schedule.chi * schedule.delta_rho)
    # |ρ_k − ρ*| = |a|/|1 − a|·|ρ_k − ρ_{k−1}|
    with np.errstate(divide="ignore", invalid="ignore"):
        contraction = np.abs(a) / np.abs(1.0 - a)

    rho = np.zeros_like(detuning, dtype=complex)
    cycles = np.zeros(detuning.shape, dtype=int)
    last_step = np.full(detuning.shape, np.inf)
    done = np.zeros(detuning.shape, dtype=bool)

    for cycle in range(1, settings.pulsed_max_cycles + 1):
        updated = a * rho + b
        step = np.abs(updated - rho)
        active = ~done
        rho = np.where(active, updated, rho)
        last_step = np.where(active, step, last_step)
        cycles = np.where(active, cycle, cycles)
        error = np.where(step == 0.0, 0.0, contraction * step)
        done = done | (error <= tolerance)
        if np.all(done):
            break

    with np.errstate(divide="ignore", invalid="ignore"):
        closed = np.where(a != 1.0, b / (1.0 - a), np.nan + 0j)
    gap = np.abs(rho - closed)

    average = np.zeros_like(detuning, dtype=complex)
    start = rho
    for _ in range(schedule.cycles_per_point):
        cycle_average, start = _probe_average(schedule, detuning, start)
        average = average + cycle_average
    average = average / schedule.cycles_per_point

    return average, {"cycles": cycles, "last_step": last_step, "fixed_point_gap": gap, "converged": done}


def simulate_pulsed(schedule: PulseSchedule, grid) -> Tuple[SpectrumTrace, PulsedDiagnostics]:
    """
    Espectro pulsado y diagnóstico por frecuencia, sin lanzar por falta de
    convergencia. Los puntos se reparten en bloques entre hasta
    `settings.threads` hilos; cada punto es independiente.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("La malla de frecuencias está vacía")
    detuning = 2.0 * np.pi * (grid - schedule.center_frequency)

    workers = max(1, min(settings.threads, grid.size))
    chunks = np.array_split(np.arange(grid.size), workers)
    logger.info(f"Simulando {grid.size} frecuencias en {len(chunks)} bloque(s), periodo {schedule.period * 1e3:.3f} ms")

    if workers == 1:
        results = [_simulate_chunk(schedule, detuning)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(lambda idx: _simulate_chunk(schedule, detuning[idx]), chunks))

    average = np.concatenate([r[0] for r in results])
    diag = {key: np.concatenate([r[1][key] for r in results]) for key in results[0][1]}
    diagnostics = PulsedDiagnostics(frequencies=grid, **diag)

    # Promediar cuadraturas primero, luego elevar al cuadrado
    values = average.real**2 + average.imag**2
    trace = SpectrumTrace(
        frequencies=grid,
        values=values,
        kind=TraceKind.MORS_POWER,
        meta={"source": "pulsed_mors", "period_s": schedule.period, "cycles_per_point": schedule.cycles_per_point},
    )
    return trace, diagnostics


def pulsed_mors(schedule: PulseSchedule, grid) -> SpectrumTrace:
    """
    Espectro lock-in promediado en el tiempo bajo la secuencia periódica.

    Raises:
        ConvergenceError: Si algún punto no alcanza el estado periódico
            dentro de `settings.pulsed_max_cycles` (lleva el diagnóstico)
    """
    trace, diagnostics = simulate_pulsed(schedule, grid)
    if not diagnostics.all_converged:
        failed = int(np.count_nonzero(~diagnostics.converged))
        raise ConvergenceError(
            f"{failed} frecuencia(s) sin estado periódico tras {settings.pulsed_max_cycles} ciclos",
            diagnostics=diagnostics,
        )
    return trace


# === SECUENCIAS Y ANÁLISIS ===

def schedule_from_timeline(
    pump_duration: float,
    pump_gamma: float,
    delay_duration: float,
    probe_duration: float,
    probe_gamma: float,
    dark_gamma: float,
    period: float,
    chi: float = 1.0,
    delta_rho: float = 1.0,
    center_frequency: float = 0.0,
    drive_always_on: bool = True,
) -> PulseSchedule:
    """Secuencia bombeo → oscuro → prueba → oscuro hasta completar `period`."""
    remainder = period - pump_duration - delay_duration - probe_duration
    if remainder < 0:
        raise DomainError("Los tramos exceden el periodo")
    segments = [
        PulseSegment(duration=pump_duration, gamma_total=pump_gamma, drive_on=True, label="pump"),
        PulseSegment(duration=delay_duration, gamma_total=dark_gamma, drive_on=drive_always_on, label="dark"),
        PulseSegment(duration=probe_duration, gamma_total=probe_gamma, drive_on=drive_always_on, probe_window=True, label="probe"),
    ]
    if remainder > 0:
        segments.append(PulseSegment(duration=remainder, gamma_total=dark_gamma, drive_on=drive_always_on, label="dark"))
    return PulseSchedule(segments=segments, chi=chi, delta_rho=delta_rho, center_frequency=center_frequency)


def ripple_period(schedule: PulseSchedule) -> float:
    """Espaciado nominal del peine de memoria periódica, 1/periodo (Hz)."""
    return 1.0 / schedule.period


def ripple_spacing(trace: SpectrumTrace, nominal_hz: float) -> Optional[float]:
    """
    Espaciado mediano entre máximos del fondo ondulado, tras restar una
    tendencia suave (Savitzky–Golay sobre ~2 periodos nominales).
    None si no hay al menos tres máximos.
    """
    step = float(np.median(np.diff(trace.frequencies)))
    window = int(round(2.0 * nominal_hz / step)) | 1
    if window < 5 or window >= trace.values.size:
        return None
    residual = trace.values - savgol_filter(trace.values, window, 2)
    peaks, _ = find_peaks(residual, distance=max(1, int(0.5 * nominal_hz / step)))
    if peaks.size < 3:
        return None
    return float(np.median(np.diff(trace.frequencies[peaks])))


def area_width_estimate(trace: SpectrumTrace) -> AreaWidthEstimate:
    """
    Área (trapecios), FWHM de la característica dominante y √(área·ancho)
    como proxy relativo de J_z.

    Raises:
        EstimationError: Si no hay un pico identificable
    """
    values = np.asarray(trace.values, dtype=float)
    if values.size < 3 or not np.any(values > 0):
        raise EstimationError("La traza no tiene ningún pico identificable")

    peaks, _ = find_peaks(values)
    if peaks.size == 0:
        raise EstimationError("La traza no tiene máximos locales")
    main = int(peaks[np.argmax(values[peaks])])

    _, _, left, right = peak_widths(values, [main], rel_height=0.5)
    index = np.arange(values.size)
    width = float(np.interp(right[0], index, trace.frequencies) - np.interp(left[0], index, trace.frequencies))
    area = float(trapezoid(values, trace.frequencies))
    if width <= 0 or area <= 0:
        raise EstimationError("Área o ancho no positivos")

    return AreaWidthEstimate(
        area=area,
        width=width,
        j_z_proxy=float(np.sqrt(area * width)),
        peak_frequency=float(trace.frequencies[main]),
    )
