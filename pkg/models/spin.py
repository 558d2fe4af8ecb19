"""
Modelo de estado de espín: distribución de poblaciones y los seis parámetros
del modelo cw (N₄, ε, Γ_com, Γ_pump, ω_center, ω_split) más la amplitud.
"""

from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def _validate_spin(v: float) -> float:
    if v <= 0 or abs(2.0 * v - round(2.0 * v)) > 1e-12:
        raise ValueError(f"F={v} debe ser entero o semientero positivo")
    return float(v)


def magnetic_numbers(F: float) -> np.ndarray:
    """m = −F, …, F."""
    return np.arange(-F, F + 0.5, 1.0)


def geometric_weights(F: float, epsilon: float) -> np.ndarray:
    """ρ_mm ∝ ε^(F−m) normalizado, evaluado en escala logarítmica."""
    exponents = (F - magnetic_numbers(F)) * np.log(epsilon)
    exponents -= exponents.max()
    weights = np.exp(exponents)
    return weights / weights.sum()


def geometric_sum(F: float, epsilon: float) -> float:
    """Σ_m ε^(F−m) = N / N₄."""
    return float(np.sum(np.power(epsilon, F - magnetic_numbers(F))))


class PopulationDistribution(BaseModel):
    """Poblaciones diagonales ρ_mm indexadas m = −F..F, normalizadas."""

    model_config = ConfigDict(frozen=True)

    F: float = Field(default=4.0, description="Momento angular total")
    populations: List[float] = Field(..., description="ρ_mm para m = −F..F")

    @field_validator("F")
    @classmethod
    def validate_spin(cls, v: float) -> float:
        return _validate_spin(v)

    @model_validator(mode="after")
    def validate_populations(self) -> "PopulationDistribution":
        expected = int(round(2 * self.F + 1))
        if len(self.populations) != expected:
            raise ValueError(f"Se esperaban {expected} poblaciones para F={self.F}, hay {len(self.populations)}")
        values = np.asarray(self.populations)
        if np.any(values < 0):
            raise ValueError("Las poblaciones deben ser no negativas")
        if abs(values.sum() - 1.0) > 1e-12:
            raise ValueError(f"Las poblaciones deben sumar 1 (suma = {values.sum():.15g})")
        return self

    @classmethod
    def from_array(cls, F: float, values: np.ndarray) -> "PopulationDistribution":
        """Normaliza `values` y construye la distribución."""
        arr = np.clip(np.asarray(values, dtype=float), 0.0, None)
        total = arr.sum()
        if total <= 0:
            raise ValueError("La distribución no puede ser idénticamente cero")
        return cls(F=F, populations=(arr / total).tolist())

    def as_array(self) -> np.ndarray:
        return np.asarray(self.populations, dtype=float)

    @property
    def m_values(self) -> np.ndarray:
        return magnetic_numbers(self.F)


class SpinModel(BaseModel):
    """Modelo cw de seis parámetros más la constante global de la señal."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    F: float = Field(default=4.0, description="Variedad hiperfina observada")
    n4: float = Field(default=1.0, ge=0.0, description="Población del nivel m = F (unidades arbitrarias)")
    epsilon: float = Field(default=0.5, gt=0.0, description="Parámetro geométrico ε de poblaciones")
    gamma_com: float = Field(default=10.0, ge=0.0, description="Ancho común Γ_com (Hz, FWHM)")
    gamma_pump: float = Field(default=0.0, ge=0.0, description="Ancho de bombeo Γ_pump (Hz, FWHM)")
    omega_center: float = Field(default=0.0, description="Frecuencia central ω_center (Hz)")
    omega_split: float = Field(default=0.0, description="Desdoblamiento ω_split entre líneas (Hz)")
    amplitude: float = Field(default=1.0, gt=0.0, description="Constante global de la señal MORS")

    @field_validator("F")
    @classmethod
    def validate_spin(cls, v: float) -> float:
        return _validate_spin(v)

    # === CONSTRUCTORES ===

    @classmethod
    def from_atom_number(cls, atom_number: float, epsilon: float, **kwargs) -> "SpinModel":
        """Construye el modelo a partir de N total en vez de N₄."""
        F = kwargs.get("F", 4.0)
        return cls(n4=atom_number / geometric_sum(F, epsilon), epsilon=epsilon, **kwargs)

    @classmethod
    def from_orientation(cls, orientation: float, atom_number: float = 1.0, **kwargs) -> "SpinModel":
        """Construye el modelo a partir de la orientación p y N total."""
        from utils.spin_utils import epsilon_from_orientation

        F = kwargs.get("F", 4.0)
        epsilon = epsilon_from_orientation(F, orientation)
        return cls.from_atom_number(atom_number, epsilon, **kwargs)

    # === PROPIEDADES DERIVADAS ===

    @property
    def atom_number(self) -> float:
        """N = Σ N_m."""
        return self.n4 * geometric_sum(self.F, self.epsilon)

    @property
    def populations(self) -> np.ndarray:
        """ρ_mm normalizadas, m = −F..F."""
        return geometric_weights(self.F, self.epsilon)

    @property
    def orientation(self) -> float:
        """p = (1/F) Σ m ρ_mm."""
        return float(np.dot(magnetic_numbers(self.F), self.populations) / self.F)

    @property
    def j_z(self) -> float:
        """Espín longitudinal colectivo N·Σ m ρ_mm."""
        return self.atom_number * self.F * self.orientation
