"""
Estimadores de orden de magnitud para la decoherencia: dispersión de fotones
del haz de prueba, ensanchamiento por gradiente magnético, criterio de
resolución del desdoblamiento cuadrático y densidad crítica de atrapamiento.

Son estimaciones gruesas (factores 2 y π sin controlar); todas devuelven un
`Estimate` con order_of_magnitude=True.
"""

import logging
from typing import Optional

import numpy as np
from scipy.constants import Boltzmann, c, hbar
from scipy.stats import linregress

from models.beams import CellGeometry, Estimate, ProbeBeam, TrappingSample
from models.errors import DomainError, RegressionError
from models.species import MU_B_HZ_PER_GAUSS
from utils.zeeman_utils import qz_splitting

logger = logging.getLogger("Broadening")


# === DISPERSIÓN DE FOTONES ===

def saturation_intensity(wavelength: float, natural_linewidth_hz: float) -> float:
    """I_sat = 2π²ħcγ/(3λ³) con γ angular; W/m²."""
    gamma = 2.0 * np.pi * natural_linewidth_hz
    return 2.0 * np.pi**2 * hbar * c * gamma / (3.0 * wavelength**3)


def photon_scattering_rate(beam: ProbeBeam, far_detuned: bool = False) -> Estimate:
    """
    Tasa de dispersión Γ_ph (s⁻¹).

    Forma completa: (γ/2)·s/(1+s), s = (I/I_sat)/(1 + (2Δ/γ)²).
    Forma muy desintonizada: 3Iλ³γ²/(16π²ħcΔ²). γ y Δ se pasan a rad/s.
    """
    gamma = 2.0 * np.pi * beam.natural_linewidth
    delta = 2.0 * np.pi * beam.detuning
    i_sat = saturation_intensity(beam.wavelength, beam.natural_linewidth)

    if abs(beam.detuning) < 10.0 * beam.natural_linewidth:
        logger.warning(
            f"|Δ| = {abs(beam.detuning):.3g} Hz no es ≫ γ = {beam.natural_linewidth:.3g} Hz; "
            "la aproximación de gran desintonía no es válida"
        )

    saturation = (beam.intensity / i_sat) / (1.0 + (2.0 * beam.detuning / beam.natural_linewidth) ** 2)
    if far_detuned:
        if delta == 0:
            raise DomainError("La forma de gran desintonía requiere Δ ≠ 0")
        rate = 3.0 * beam.intensity * beam.wavelength**3 * gamma**2 / (16.0 * np.pi**2 * hbar * c * delta**2)
    else:
        rate = 0.5 * gamma * saturation / (1.0 + saturation)

    return Estimate(
        name="photon_scattering_rate",
        value=float(rate),
        unit="1/s",
        details={"saturation_intensity_w_m2": i_sat, "saturation_parameter": saturation, "far_detuned": far_detuned},
    )


# === GRADIENTE MAGNÉTICO ===

def thermal_speed(temperature: float, atomic_mass: float) -> float:
    """v = sqrt(k_B T / m) en m/s."""
    return float(np.sqrt(Boltzmann * temperature / atomic_mass))


def gradient_coefficient(geom: CellGeometry, g_f: float) -> float:
    """
    (g_F μ_B/h)²·L³/v en Hz·m²/mG². g_F μ_B/h se toma en Hz/mG
    (≈ 350 Hz/mG para cesio F=4).
    """
    zeeman_hz_per_mg = abs(g_f) * MU_B_HZ_PER_GAUSS * 1e-3
    speed = thermal_speed(geom.temperature, geom.atomic_mass)
    return float(zeeman_hz_per_mg**2 * geom.length**3 / speed)


def gradient_broadening(geom: CellGeometry, g_f: float) -> Estimate:
    """Γ_inh = coeficiente·(∂B/∂z)² en Hz, con el coeficiente en `details`."""
    coefficient = gradient_coefficient(geom, g_f)
    return Estimate(
        name="gradient_broadening",
        value=coefficient * geom.gradient**2,
        unit="Hz",
        details={
            "coefficient_hz_m2_per_mg2": coefficient,
            "thermal_speed_m_s": thermal_speed(geom.temperature, geom.atomic_mass),
            "zeeman_hz_per_mg": abs(g_f) * MU_B_HZ_PER_GAUSS * 1e-3,
        },
    )


def fit_gradient_series(gradients, widths) -> Estimate:
    """Ajuste lineal de Γ = a + b·(∂B/∂z)²; `value` es b (Hz·m²/mG²)."""
    g = np.asarray(gradients, dtype=float)
    w = np.asarray(widths, dtype=float)
    if g.size != w.size or g.size < 3:
        raise RegressionError("Se necesitan al menos tres pares (gradiente, ancho)")
    x = g**2
    if np.ptp(x) == 0:
        raise RegressionError("Todos los gradientes tienen la misma magnitud")
    fit = linregress(x, w)
    return Estimate(
        name="gradient_series_fit",
        value=float(fit.slope),
        unit="Hz*m^2/mG^2",
        order_of_magnitude=False,
        details={
            "offset_hz": float(fit.intercept),
            "slope_stderr": float(fit.stderr),
            "offset_stderr": float(fit.intercept_stderr),
            "r_value": float(fit.rvalue),
        },
    )


def resolution_criterion(
    geom: CellGeometry,
    g_f: float,
    hyperfine_hz: float,
    coefficient: Optional[float] = None,
) -> Estimate:
    """
    Inhomogeneidad relativa (1/B)(∂B/∂z)L y su umbral, definido por
    Γ_inh = ν_QZ. `coefficient` permite usar un coeficiente medido en vez
    del teórico. `value` es el umbral relativo.
    """
    larmor = abs(g_f) * MU_B_HZ_PER_GAUSS * geom.bias_field
    nu_qz = float(qz_splitting(larmor, hyperfine_hz))
    theoretical = gradient_coefficient(geom, g_f)
    used = theoretical if coefficient is None else float(coefficient)
    if used <= 0:
        raise DomainError("El coeficiente de gradiente debe ser positivo")

    threshold_gradient = float(np.sqrt(nu_qz / used))
    threshold = threshold_gradient * 1e-3 * geom.length / geom.bias_field
    relative = abs(geom.gradient) * 1e-3 * geom.length / geom.bias_field

    return Estimate(
        name="resolution_criterion",
        value=threshold,
        unit="1",
        details={
            "relative_inhomogeneity": relative,
            "threshold_gradient_mg_m": threshold_gradient,
            "qz_splitting_hz": nu_qz,
            "larmor_hz": larmor,
            "coefficient_used_hz_m2_per_mg2": used,
            "coefficient_theoretical_hz_m2_per_mg2": theoretical,
            "resolved": relative < threshold,
        },
    )


# === ATRAPAMIENTO DE RADIACIÓN ===

def critical_density(sample: TrappingSample) -> Estimate:
    """ρ_C = [λ²/2π · γ/δν_D · R]⁻¹ en átomos/cm³."""
    cross_section = sample.wavelength**2 / (2.0 * np.pi) * sample.natural_linewidth / sample.doppler_width
    density_m3 = 1.0 / (cross_section * sample.extent)
    return Estimate(
        name="critical_density",
        value=float(density_m3 * 1e-6),
        unit="1/cm^3",
        details={"effective_cross_section_m2": cross_section},
    )
