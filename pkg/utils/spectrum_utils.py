"""
Observables cw en estado estacionario: coherencias por línea, espectro MORS
(suma coherente de las 2F líneas), ángulo DC-Faraday y el límite no resuelto.

Frecuencias y anchos en Hz (anchos FWHM).
"""

import logging
from typing import Optional, Tuple

import numpy as np

from models.errors import DomainError, SingularResponseError
from models.settings import settings
from models.spin import PopulationDistribution, SpinModel, geometric_weights, magnetic_numbers
from models.trace import ComplexResponse, SpectrumTrace, TraceKind
from utils.spin_utils import (
    coupling_coefficient,
    coupling_weights,
    linewidth,
    linewidths,
    population_differences,
    resonance_frequencies,
    resonance_frequency,
)

logger = logging.getLogger("Spectrum")


def _lorentzian_denominator(line_hz: np.ndarray, width_hz: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """i(ω_line − ω) − Γ/2, con una fila por línea."""
    line = np.atleast_1d(line_hz)[:, None]
    width = np.atleast_1d(width_hz)[:, None]
    denominator = 1j * (line - grid[None, :]) - 0.5 * width
    if np.any(denominator == 0):
        raise SingularResponseError("Ancho de línea cero sobre un punto de resonancia de la malla")
    return denominator


# === COHERENCIAS ===

def steady_state_coherence(
    m: float,
    model: SpinModel,
    populations: Optional[np.ndarray],
    omega_drive,
):
    """
    Coherencia estacionaria de la línea m → m+1, salvo el prefactor común:
    Δρ_m·C(F,m) / (i(ω_{m+1,m} − ω) − Γ_{m+1,m}/2).

    Raises:
        SingularResponseError: Γ = 0 y ω exactamente en resonancia
    """
    F = model.F
    rho = model.populations if populations is None else np.asarray(populations, dtype=float)
    line = resonance_frequency(F, m, model.omega_center, model.omega_split)
    width = linewidth(F, m, model.gamma_com, model.gamma_pump)
    index = int(round(m + F))
    delta = population_differences(rho)[index]
    grid = np.atleast_1d(np.asarray(omega_drive, dtype=float))
    response = delta * coupling_coefficient(F, m) / _lorentzian_denominator(np.array([line]), np.array([width]), grid)[0]
    return complex(response[0]) if np.ndim(omega_drive) == 0 else response


def _line_matrix(
    F: float,
    epsilon: float,
    gamma_com: float,
    gamma_pump: float,
    omega_center: float,
    omega_split: float,
    grid: np.ndarray,
    populations: Optional[np.ndarray] = None,
) -> np.ndarray:
    rho = geometric_weights(F, epsilon) if populations is None else np.asarray(populations, dtype=float)
    weights = coupling_weights(F) * population_differences(rho)
    centers = resonance_frequencies(F, omega_center, omega_split)
    widths = linewidths(F, gamma_com, gamma_pump)
    return weights[:, None] / _lorentzian_denominator(centers, widths, np.asarray(grid, dtype=float))


def coherent_sum(
    F: float,
    epsilon: float,
    gamma_com: float,
    gamma_pump: float,
    omega_center: float,
    omega_split: float,
    grid: np.ndarray,
) -> np.ndarray:
    """Σ_m C²Δρ_m / (i(ω_{m+1,m} − ω) − Γ_{m+1,m}/2) con poblaciones normalizadas."""
    return _line_matrix(F, epsilon, gamma_com, gamma_pump, omega_center, omega_split, grid).sum(axis=0)


def line_responses(model: SpinModel, grid: np.ndarray, populations: Optional[PopulationDistribution] = None) -> np.ndarray:
    """
    Respuesta C²Δρ/(i(ω_line − ω) − Γ/2) de cada línea; forma (2F, len(grid)).

    Con `populations` se usan esas ρ_mm en lugar de la familia geométrica de ε.
    """
    rho = None
    if populations is not None:
        if abs(populations.F - model.F) > 1e-9:
            raise DomainError(f"Distribución con F={populations.F} para un modelo con F={model.F}")
        rho = populations.as_array()
    return _line_matrix(
        model.F, model.epsilon, model.gamma_com, model.gamma_pump, model.omega_center, model.omega_split, grid, rho
    )


# === ESPECTROS ===

def mors(
    model: SpinModel,
    grid,
    populations: Optional[PopulationDistribution] = None,
) -> Tuple[SpectrumTrace, ComplexResponse]:
    """
    Señal MORS: amplitude·|N Σ_m C²Δρ_m / (i(ω_{m+1,m} − ω) − Γ_{m+1,m}/2)|².

    Por defecto las poblaciones son las de la familia de ε del modelo; una
    `PopulationDistribution` explícita las sustituye (N sigue siendo el del
    modelo).

    La suma es coherente (a nivel de amplitud). Se devuelve también A(ω)
    escalado por sqrt(amplitude), de modo que |A|² coincide con la traza.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("La malla de frecuencias está vacía")
    amplitude_field = model.atom_number * line_responses(model, grid, populations).sum(axis=0)
    p = model.orientation if populations is None else float(np.dot(populations.m_values, populations.as_array()) / model.F)
    response = np.sqrt(model.amplitude) * amplitude_field
    power = response.real**2 + response.imag**2
    trace = SpectrumTrace(
        frequencies=grid,
        values=power,
        kind=TraceKind.MORS_POWER,
        meta={"source": "mors", "orientation": p, "j_z": model.atom_number * model.F * p},
    )
    return trace, ComplexResponse.from_complex(response)


def incoherent_mors(model: SpinModel, grid) -> np.ndarray:
    """Σ|línea|² (suma de potencias); solo sirve de contraste con la suma coherente."""
    grid = np.asarray(grid, dtype=float)
    lines = model.atom_number * line_responses(model, grid)
    return model.amplitude * np.sum(np.abs(lines) ** 2, axis=0)


def dc_faraday(populations, atom_number: float, constant: float = 1.0) -> float:
    """θ_DC = const·N·Σ m ρ_mm (unidades angulares arbitrarias)."""
    if isinstance(populations, PopulationDistribution):
        rho, m = populations.as_array(), populations.m_values
    else:
        rho = np.asarray(populations, dtype=float)
        m = magnetic_numbers((rho.size - 1) / 2.0)
    return float(constant * atom_number * np.dot(m, rho))


def unresolved_mors(
    j_z: float,
    gamma_com: float,
    omega_center: float,
    grid,
    amplitude: float = 1.0,
) -> SpectrumTrace:
    """
    Límite no resuelto: amplitude·|2J_z / (i(ω₀ − ω) − Γ_com/2)|².

    Coincide exactamente con `mors` cuando ω_split = 0 y Γ_pump = 0.
    """
    if gamma_com <= 0:
        raise DomainError("El límite no resuelto requiere Γ_com > 0")
    grid = np.asarray(grid, dtype=float)
    response = 2.0 * j_z / (1j * (omega_center - grid) - 0.5 * gamma_com)
    values = amplitude * (response.real**2 + response.imag**2)
    return SpectrumTrace(frequencies=grid, values=values, kind=TraceKind.MORS_POWER, meta={"source": "unresolved_mors", "j_z": j_z})


def two_level_mors(
    grid,
    center_hz: float,
    gamma_hz: float,
    chi: float,
    delta_rho: float,
) -> SpectrumTrace:
    """
    Espectro cw de la línea aislada m = F−1 → F con la convención del
    simulador pulsado: |χΔρ / (iΔ − Γ/2)|² con Δ = 2π(ω − centro), Γ = 2π·gamma_hz.
    """
    grid = np.asarray(grid, dtype=float)
    detuning = 2.0 * np.pi * (grid - center_hz)
    decay = 2.0 * np.pi * gamma_hz
    denominator = 1j * detuning - 0.5 * decay
    if np.any(denominator == 0):
        raise SingularResponseError("Ancho cero en resonancia para la línea aislada")
    values = np.abs(chi * delta_rho / denominator) ** 2
    return SpectrumTrace(frequencies=grid, values=values, kind=TraceKind.MORS_POWER, meta={"source": "two_level_mors"})


# === MALLAS, RUIDO Y VISUALIZACIÓN ===

def frequency_grid(model: SpinModel, span: Optional[float] = None, points: Optional[int] = None) -> np.ndarray:
    """
    Malla lineal centrada en ω_center. Semiancho por defecto:
    10·max(Γ_máx, F·|ω_split|).
    """
    points = points or settings.default_grid_points
    if span is None:
        widest = float(np.max(linewidths(model.F, model.gamma_com, model.gamma_pump)))
        half = 10.0 * max(widest, model.F * abs(model.omega_split))
    else:
        half = 0.5 * span
    if half <= 0:
        raise DomainError("No se puede inferir el ancho de la malla: Γ = 0 y ω_split = 0")
    return np.linspace(model.omega_center - half, model.omega_center + half, points)


def display_amplitude(trace: SpectrumTrace) -> np.ndarray:
    """Modo de visualización en raíz cuadrada; nunca entra al ajuste."""
    return np.sqrt(np.clip(trace.values, 0.0, None))


def add_gaussian_noise(trace: SpectrumTrace, level: float, seed: int) -> SpectrumTrace:
    """
    Ruido aditivo gaussiano con σ = level·max(valores). Las trazas de
    potencia se recortan en cero.
    """
    if level < 0:
        raise DomainError("El nivel de ruido debe ser ≥ 0")
    rng = np.random.default_rng(seed)
    sigma = level * float(np.max(np.abs(trace.values))) if trace.values.size else 0.0
    noisy = trace.values + rng.normal(0.0, 1.0, size=trace.values.shape) * sigma
    if trace.kind == TraceKind.MORS_POWER:
        noisy = np.clip(noisy, 0.0, None)
    meta = {**trace.meta, "noise_level": level, "noise_seed": seed}
    return SpectrumTrace(frequencies=trace.frequencies, values=noisy, kind=trace.kind, meta=meta)
