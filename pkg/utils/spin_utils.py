"""
Operaciones del modelo de estado de espín: poblaciones ε, orientación,
anchos de línea Clebsch–Gordan, frecuencias de resonancia y coeficientes
de acoplamiento.
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from models.errors import DomainError
from models.settings import settings
from models.spin import (
    PopulationDistribution,
    SpinModel,
    geometric_sum,
    geometric_weights,
    magnetic_numbers,
)

logger = logging.getLogger("SpinModel")


def _check_transition(F: float, m: float) -> None:
    if m < -F - 1e-9 or m > F - 1.0 + 1e-9 or abs((F - m) - round(F - m)) > 1e-9:
        raise DomainError(f"m={m} fuera de rango para transiciones en F={F} (−F ≤ m ≤ F−1)")


def transition_numbers(F: float) -> np.ndarray:
    """m = −F, …, F−1 (nivel inferior de cada transición m → m+1)."""
    return np.arange(-F, F - 0.5, 1.0)


# === POBLACIONES ===

def populations_from_epsilon(F: float, n4: float, epsilon: float) -> Tuple[PopulationDistribution, float]:
    """
    N_m = N₄ ε^(F−m).

    Returns:
        (distribución normalizada, N total)
    """
    if epsilon <= 0:
        raise DomainError(f"ε debe ser positivo (ε={epsilon})")
    if n4 < 0:
        raise DomainError(f"N₄ debe ser ≥ 0 (N₄={n4})")
    weights = geometric_weights(F, epsilon)
    total = n4 * geometric_sum(F, epsilon)
    return PopulationDistribution.from_array(F, weights), total


def orientation(dist: PopulationDistribution) -> float:
    """p = (1/F) Σ m ρ_mm."""
    return float(np.dot(dist.m_values, dist.as_array()) / dist.F)


def _orientation_of_log_epsilon(F: float, log_epsilon: float) -> float:
    weights = geometric_weights(F, float(np.exp(log_epsilon)))
    return float(np.dot(magnetic_numbers(F), weights) / F)


def epsilon_from_orientation(F: float, p: float, bounds: Optional[Tuple[float, float]] = None) -> float:
    """
    Inversa de la familia de máxima entropía: ε > 0 tal que la orientación vale p.

    El mapa ε ↦ p es estrictamente decreciente; se resuelve por brentq en
    log ε dentro de `bounds`. Para |p| = 1 (o p fuera del alcance de los
    límites) se devuelve el límite correspondiente y se emite un warning.

    Raises:
        DomainError: Si |p| > 1
    """
    if abs(p) > 1.0:
        raise DomainError(f"La orientación debe cumplir |p| ≤ 1 (p={p})")

    low, high = bounds or settings.epsilon_bounds
    log_low, log_high = np.log(low), np.log(high)
    p_at_low = _orientation_of_log_epsilon(F, log_low)
    p_at_high = _orientation_of_log_epsilon(F, log_high)

    if p >= p_at_low:
        logger.warning(f"p={p} en el límite de orientación; se devuelve ε={low:g} (cota inferior)")
        return float(low)
    if p <= p_at_high:
        logger.warning(f"p={p} en el límite de orientación; se devuelve ε={high:g} (cota superior)")
        return float(high)
    if p == 0.0:
        return 1.0

    log_eps = brentq(
        lambda le: _orientation_of_log_epsilon(F, le) - p,
        log_low,
        log_high,
        xtol=settings.orientation_tolerance,
        rtol=4 * np.finfo(float).eps,
        maxiter=500,
    )
    return float(np.exp(log_eps))


def entropy(dist: PopulationDistribution) -> float:
    """Entropía de von Neumann de la parte diagonal, −Σ ρ ln ρ."""
    values = dist.as_array()
    nonzero = values[values > 0]
    return float(-np.sum(nonzero * np.log(nonzero)))


def population_differences(populations: np.ndarray) -> np.ndarray:
    """Δρ_m = ρ_{m+1,m+1} − ρ_{m,m} para m = −F..F−1."""
    return np.diff(np.asarray(populations, dtype=float))


# === ANCHOS Y FRECUENCIAS ===

def linewidth_profile(F: float) -> np.ndarray:
    """
    Perfil de bombeo (γ_m + γ_{m+1}) / (2F) con γ_m ∝ (F−m)(F+1+m),
    normalizado a 1 en la transición m = F−1 → F.
    """
    m = transition_numbers(F)
    gamma_m = (F - m) * (F + 1 + m)
    gamma_next = (F - m - 1) * (F + 2 + m)
    return (gamma_m + gamma_next) / (2.0 * F)


def linewidths(F: float, gamma_com: float, gamma_pump: float) -> np.ndarray:
    """Γ_{m+1,m} para todas las transiciones, m = −F..F−1."""
    return gamma_com + gamma_pump * linewidth_profile(F)


def linewidth(F: float, m: float, gamma_com: float, gamma_pump: float) -> float:
    """Γ_{m+1,m} = Γ_com + Γ_pump·perfil(m); a F=4 el perfil es (19 − 2m − m²)/4."""
    _check_transition(F, m)
    index = int(round(m + F))
    return float(linewidths(F, gamma_com, gamma_pump)[index])


def resonance_frequencies(F: float, omega_center: float, omega_split: float) -> np.ndarray:
    """ω_{m+1,m} = ω_center + ω_split·(m + 1/2) para m = −F..F−1."""
    return omega_center + omega_split * (transition_numbers(F) + 0.5)


def resonance_frequency(F: float, m: float, omega_center: float, omega_split: float) -> float:
    _check_transition(F, m)
    return float(omega_center + omega_split * (m + 0.5))


def coupling_weights(F: float) -> np.ndarray:
    """C² = F(F+1) − m(m+1) para m = −F..F−1."""
    m = transition_numbers(F)
    return F * (F + 1) - m * (m + 1)


def coupling_coefficient(F: float, m: float) -> float:
    """C(F, m) = sqrt(F(F+1) − m(m+1))."""
    _check_transition(F, m)
    return float(np.sqrt(F * (F + 1) - m * (m + 1)))


def line_table(model: SpinModel) -> List[Dict[str, Any]]:
    """Una fila por transición: m, centro, ancho y peso C²Δρ."""
    F = model.F
    centers = resonance_frequencies(F, model.omega_center, model.omega_split)
    widths = linewidths(F, model.gamma_com, model.gamma_pump)
    weights = coupling_weights(F) * population_differences(model.populations)
    return [
        {
            "m": float(m),
            "center_hz": float(c),
            "width_hz": float(w),
            "weight": float(k),
        }
        for m, c, w, k in zip(transition_numbers(F), centers, widths, weights)
    ]
