"""
Estructura Zeeman del estado fundamental: energías exactas de Breit–Rabi,
factores g_F, frecuencias de transición y desdoblamiento Zeeman cuadrático.

Energías en Hz (E/h), campo en Gauss.
"""

import logging
from typing import List, Literal, Union

import numpy as np
from scipy.optimize import brentq

from models.errors import DomainError
from models.species import (
    GAUSS_PER_TESLA,
    MU_B_HZ_PER_GAUSS,
    MU_N_HZ_PER_GAUSS,
    AtomSpecies,
    ZeemanLevel,
)

logger = logging.getLogger("Zeeman")

FieldLike = Union[float, np.ndarray]


# === VALIDACIÓN DE NÚMEROS CUÁNTICOS ===

def _branch_sign(species: AtomSpecies, F: float) -> int:
    """+1 para F = I + 1/2, −1 para F = I − 1/2."""
    if abs(F - species.upper_f) < 1e-9:
        return 1
    if abs(F - species.lower_f) < 1e-9 and species.lower_f >= 0:
        return -1
    raise DomainError(
        f"F={F} no pertenece al estado fundamental de {species.name} "
        f"(F ∈ {{{species.lower_f}, {species.upper_f}}})"
    )


def _check_m(F: float, m: float) -> None:
    if abs(m) > F + 1e-9 or abs((F - m) - round(F - m)) > 1e-9:
        raise DomainError(f"m={m} inválido para F={F}")


def _check_field(B: FieldLike) -> np.ndarray:
    field = np.asarray(B, dtype=float)
    if np.any(field < 0):
        raise DomainError("El campo magnético debe ser B ≥ 0")
    return field


def _as_output(value: np.ndarray, like: FieldLike) -> FieldLike:
    return float(value) if np.ndim(like) == 0 else value


# === CONVERSIONES ===

def field_from_tesla(B_tesla: FieldLike) -> FieldLike:
    """Convierte tesla a Gauss."""
    return _as_output(np.asarray(B_tesla, dtype=float) * GAUSS_PER_TESLA, B_tesla)


def breit_rabi_parameter(species: AtomSpecies, B: FieldLike) -> FieldLike:
    """x = (g_J − g_I) μ_B B / (h ν_hfs)."""
    field = _check_field(B)
    x = (species.electron_g - species.nuclear_g) * MU_B_HZ_PER_GAUSS * field / species.hyperfine_splitting
    return _as_output(x, B)


def larmor_frequency(species: AtomSpecies, B: FieldLike) -> FieldLike:
    """Frecuencia de Larmor electrónica ν_L = x ν_hfs / (2I+1) en Hz."""
    x = np.asarray(breit_rabi_parameter(species, B))
    return _as_output(x * species.hyperfine_splitting / species.multiplicity, B)


def field_for_larmor(species: AtomSpecies, larmor_hz: float) -> float:
    """Inversa de `larmor_frequency`: campo en Gauss que produce ν_L."""
    if larmor_hz < 0:
        raise DomainError("La frecuencia de Larmor debe ser ≥ 0")
    slope = (species.electron_g - species.nuclear_g) * MU_B_HZ_PER_GAUSS / species.multiplicity
    return float(larmor_hz / slope)


def nuclear_shift(species: AtomSpecies, B: FieldLike) -> FieldLike:
    """Corrimiento nuclear lineal (μ_I/I)·B/h por unidad de m, en Hz."""
    field = _check_field(B)
    return _as_output(species.nuclear_moment / species.nuclear_spin * MU_N_HZ_PER_GAUSS * field, B)


# === ENERGÍAS EXACTAS ===

def breit_rabi_energy(species: AtomSpecies, F: float, m: float, B: FieldLike) -> FieldLike:
    """
    Energía exacta E_{F,m}/h (Hz) de la fórmula de Breit–Rabi.

    Para el nivel extremo m = −(I+1/2) la raíz vale |1 − x|; se usa la
    continuación analítica (1 − x), que coincide con |1 − x| para x ≤ 1
    (todo el régimen de campo bajo) y mantiene el nivel suave al cruzar x = 1;
    para x > 1 difiere de |1 − x| en el signo.

    Args:
        species: Especie atómica
        F: Momento angular total (I ± 1/2)
        m: Número cuántico magnético, |m| ≤ F
        B: Campo en Gauss (escalar o array)

    Returns:
        Energía en Hz (mismo tipo que B)

    Raises:
        DomainError: Si (F, m) no es una combinación válida o B < 0
    """
    sign = _branch_sign(species, F)
    _check_m(F, m)
    field = _check_field(B)

    nu_hfs = species.hyperfine_splitting
    two_i_plus_one = species.multiplicity
    x = (species.electron_g - species.nuclear_g) * MU_B_HZ_PER_GAUSS * field / nu_hfs
    nuclear = -(species.nuclear_moment / species.nuclear_spin) * MU_N_HZ_PER_GAUSS * field * m

    if abs(m + species.upper_f) < 1e-9:
        # Solo existe la rama superior; radicando (1 − x)², y 1 − x = |1 − x| si x ≤ 1
        root = 1.0 - x
    else:
        root = np.sqrt(1.0 + 4.0 * m * x / two_i_plus_one + x**2)

    energy = -nu_hfs / (2.0 * two_i_plus_one) + nuclear + sign * 0.5 * nu_hfs * root
    return _as_output(energy, B)


def zeeman_levels(species: AtomSpecies, B: float) -> List[ZeemanLevel]:
    """Todos los subniveles de ambas variedades hiperfinas a campo B."""
    levels: List[ZeemanLevel] = []
    for F in (species.upper_f, species.lower_f):
        if F < 0:
            continue
        for m in np.arange(-F, F + 1.0, 1.0):
            levels.append(ZeemanLevel(F=F, m=float(m), energy=breit_rabi_energy(species, F, float(m), B)))
    return levels


# === FACTORES g Y TRANSICIONES ===

def g_factor(species: AtomSpecies, F: float) -> float:
    """
    Factor de Landé g_F = g_I ± (g_J − g_I)/(2I+1), con g_I = −μ_I/I en μ_B.

    Raises:
        DomainError: Si F no es I ± 1/2
    """
    sign = _branch_sign(species, F)
    g_i = species.nuclear_g
    return float(g_i + sign * (species.electron_g - g_i) / species.multiplicity)


def transition_frequency(
    species: AtomSpecies,
    F: float,
    m: float,
    B: FieldLike,
    order: Literal["exact", "second"] = "exact",
) -> FieldLike:
    """
    Frecuencia de la transición m → m+1 dentro de la variedad F, en Hz.

    order="exact" devuelve E_{F,m+1} − E_{F,m}; order="second" devuelve el
    desarrollo a segundo orden ν_L(1 − (ν_L/ν_hfs)(2m+1)) − ν_N para la rama
    superior (con signos espejados para la inferior), donde ν_N es el
    corrimiento nuclear.
    """
    if m < -F - 1e-9 or m > F - 1.0 + 1e-9:
        raise DomainError(f"m={m} fuera de rango para transiciones en F={F} (−F ≤ m ≤ F−1)")

    if order == "exact":
        upper = np.asarray(breit_rabi_energy(species, F, m + 1.0, B))
        lower = np.asarray(breit_rabi_energy(species, F, m, B))
        return _as_output(upper - lower, B)

    if order != "second":
        raise DomainError(f"Orden desconocido '{order}' (use 'exact' o 'second')")

    sign = _branch_sign(species, F)
    _check_m(F, m)
    nu_l = np.asarray(larmor_frequency(species, B))
    nu_n = np.asarray(nuclear_shift(species, B))
    quadratic = nu_l**2 * (2.0 * m + 1.0) / species.hyperfine_splitting
    return _as_output(sign * (nu_l - quadratic) - nu_n, B)


def qz_splitting(larmor_hz: FieldLike, hyperfine_hz: float) -> FieldLike:
    """Desdoblamiento Zeeman cuadrático ν_QZ = 2 ν_L² / ν_hfs."""
    if hyperfine_hz <= 0:
        raise DomainError("ν_hfs debe ser positivo")
    nu = np.asarray(larmor_hz, dtype=float)
    return _as_output(2.0 * nu**2 / hyperfine_hz, larmor_hz)


def field_for_transition(species: AtomSpecies, F: float, m: float, frequency_hz: float, b_max: float = 1.0e4) -> float:
    """Campo en Gauss para el que la transición exacta m → m+1 vale `frequency_hz`."""
    target = abs(frequency_hz)

    def objective(b: float) -> float:
        return abs(float(transition_frequency(species, F, m, b))) - target

    try:
        return float(brentq(objective, 0.0, b_max, xtol=1e-14, rtol=1e-14))
    except ValueError as exc:
        raise DomainError(f"No hay campo en [0, {b_max}] G con transición {frequency_hz} Hz") from exc
