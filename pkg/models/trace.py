"""Trazas espectrales y respuesta compleja del lock-in."""

from enum import Enum
from typing import Any, Dict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class TraceKind(str, Enum):
    MORS_POWER = "mors_power"
    QUADRATURE_PAIR = "quadrature_pair"
    DC_ANGLE = "dc_angle"


class SpectrumTrace(BaseModel):
    """Muestras ordenadas (frecuencia, valor) con metadatos libres."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True, use_enum_values=False)

    frequencies: np.ndarray = Field(..., description="Frecuencias en Hz, estrictamente crecientes")
    values: np.ndarray = Field(..., description="Valores de la señal (unidades arbitrarias)")
    kind: TraceKind = Field(default=TraceKind.MORS_POWER)
    meta: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("frequencies", "values", mode="before")
    @classmethod
    def as_float_array(cls, v: Any) -> np.ndarray:
        arr = np.asarray(v, dtype=float)
        if arr.ndim != 1:
            raise ValueError("Se esperaba un array unidimensional")
        return arr

    @model_validator(mode="after")
    def validate_samples(self) -> "SpectrumTrace":
        if self.frequencies.size == 0:
            raise ValueError("La traza no puede estar vacía")
        if self.frequencies.shape != self.values.shape:
            raise ValueError(
                f"Longitudes distintas: {self.frequencies.size} frecuencias, {self.values.size} valores"
            )
        if not np.all(np.isfinite(self.frequencies)) or not np.all(np.isfinite(self.values)):
            raise ValueError("La traza contiene valores no finitos")
        if np.any(np.diff(self.frequencies) <= 0):
            raise ValueError("Las frecuencias deben ser estrictamente crecientes")
        if self.kind == TraceKind.MORS_POWER and np.any(self.values < 0):
            raise ValueError("Una traza mors_power no admite valores negativos")
        return self

    def __len__(self) -> int:
        return int(self.frequencies.size)

    def scaled(self, factor: float) -> "SpectrumTrace":
        """Copia con los valores multiplicados por `factor`."""
        return SpectrumTrace(frequencies=self.frequencies, values=self.values * factor, kind=self.kind, meta=dict(self.meta))


class ComplexResponse(BaseModel):
    """Componentes en fase y cuadratura A(ω) del lock-in."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    real_part: np.ndarray
    imag_part: np.ndarray

    @classmethod
    def from_complex(cls, values: np.ndarray) -> "ComplexResponse":
        values = np.asarray(values, dtype=complex)
        return cls(real_part=values.real.copy(), imag_part=values.imag.copy())

    @property
    def power(self) -> np.ndarray:
        """|A|² = real² + imag²."""
        return self.real_part**2 + self.imag_part**2

    def as_complex(self) -> np.ndarray:
        return self.real_part + 1j * self.imag_part
