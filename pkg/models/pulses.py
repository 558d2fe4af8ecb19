"""
Secuencias periódicas de pulsos para el simulador de coherencia transitoria.
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class PulseSegment(BaseModel):
    """Tramo de la secuencia con decaimiento transversal constante."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    duration: float = Field(..., gt=0.0, description="Duración en segundos")
    gamma_total: float = Field(..., ge=0.0, description="Decaimiento transversal total (Hz, FWHM)")
    drive_on: bool = Field(default=True, description="Campo RF activo durante el tramo")
    probe_window: bool = Field(default=False, description="El tramo contribuye al promedio medido")
    label: Optional[str] = Field(default=None, description="Etiqueta libre (pump, dark, probe...)")


class PulseSchedule(BaseModel):
    """Secuencia periódica: tramos, intensidad de la RF y diferencia de poblaciones."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    segments: List[PulseSegment] = Field(..., min_length=1)
    cycles_per_point: int = Field(default=1, ge=1, description="Ciclos promediados por punto tras el estado periódico")
    chi: float = Field(default=1.0, description="Intensidad de la RF χ (rad/s)")
    delta_rho: float = Field(default=1.0, description="Δρ = ρ_FF − ρ_F−1,F−1, constante")
    center_frequency: float = Field(default=0.0, description="Resonancia de la línea (Hz)")

    @model_validator(mode="after")
    def validate_probe(self) -> "PulseSchedule":
        if not any(segment.probe_window for segment in self.segments):
            raise ValueError("La secuencia necesita al menos un tramo con probe_window = true")
        return self

    @property
    def period(self) -> float:
        """Σ duraciones (s)."""
        return float(np.sum([segment.duration for segment in self.segments]))

    @property
    def probe_time(self) -> float:
        return float(np.sum([s.duration for s in self.segments if s.probe_window]))


class PulsedDiagnostics(BaseModel):
    """Diagnóstico de convergencia del estado periódico, un valor por frecuencia."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    frequencies: np.ndarray
    cycles: np.ndarray = Field(..., description="Ciclos iterados hasta converger")
    last_step: np.ndarray = Field(..., description="|ρ_{k+1} − ρ_k| al detenerse")
    fixed_point_gap: np.ndarray = Field(..., description="|ρ iterado − punto fijo cerrado|")
    converged: np.ndarray

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    def summary(self) -> dict:
        return {
            "points": int(self.frequencies.size),
            "converged_points": int(np.count_nonzero(self.converged)),
            "max_cycles": int(np.max(self.cycles)) if self.cycles.size else 0,
            "max_last_step": float(np.max(self.last_step)) if self.last_step.size else 0.0,
            "max_fixed_point_gap": float(np.nanmax(self.fixed_point_gap)) if np.any(np.isfinite(self.fixed_point_gap)) else None,
        }


class AreaWidthEstimate(BaseModel):
    """Área, FWHM y el proxy relativo de J_z √(área·ancho)."""

    area: float
    width: float
    j_z_proxy: float
    peak_frequency: float
