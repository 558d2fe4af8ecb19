"""Haz de prueba, geometría de la celda y resultados de los estimadores."""

from typing import Any, Dict

from pydantic import BaseModel, ConfigDict, Field

# 1 mW/cm² = 10 W/m²;  1 T/m = 10⁷ mG/m
W_PER_M2_PER_MW_PER_CM2 = 10.0
MILLIGAUSS_PER_M_PER_TESLA_PER_M = 1.0e7

CESIUM_MASS_KG = 132.905451933 * 1.66053906660e-27


class ProbeBeam(BaseModel):
    """Haz de prueba de dos niveles; γ y Δ en Hz ordinarios."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    intensity: float = Field(..., ge=0.0, description="Intensidad en W/m²")
    wavelength: float = Field(..., gt=0.0, description="Longitud de onda en m")
    natural_linewidth: float = Field(..., gt=0.0, description="γ natural en Hz")
    detuning: float = Field(..., description="Desintonía Δ en Hz (con signo)")

    @classmethod
    def from_mw_per_cm2(cls, intensity_mw_cm2: float, **kwargs: Any) -> "ProbeBeam":
        return cls(intensity=intensity_mw_cm2 * W_PER_M2_PER_MW_PER_CM2, **kwargs)


class CellGeometry(BaseModel):
    """Celda de vapor en campo de sesgo con gradiente lineal."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    length: float = Field(..., gt=0.0, description="Longitud L en m")
    temperature: float = Field(..., gt=0.0, description="Temperatura en K")
    atomic_mass: float = Field(default=CESIUM_MASS_KG, gt=0.0, description="Masa atómica en kg")
    bias_field: float = Field(..., gt=0.0, description="Campo de sesgo B₀ en Gauss")
    gradient: float = Field(default=0.0, description="Gradiente ∂B/∂z en mG/m (con signo)")

    @classmethod
    def from_tesla_per_meter(cls, gradient_t_per_m: float, **kwargs: Any) -> "CellGeometry":
        return cls(gradient=gradient_t_per_m * MILLIGAUSS_PER_M_PER_TESLA_PER_M, **kwargs)

    @property
    def gradient_tesla_per_meter(self) -> float:
        return self.gradient / MILLIGAUSS_PER_M_PER_TESLA_PER_M


class TrappingSample(BaseModel):
    """Muestra para la densidad crítica de atrapamiento de radiación."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    wavelength: float = Field(..., gt=0.0, description="λ en m")
    natural_linewidth: float = Field(..., gt=0.0, description="γ en Hz")
    doppler_width: float = Field(..., gt=0.0, description="δν_D en Hz")
    extent: float = Field(..., gt=0.0, description="R en m")


class Estimate(BaseModel):
    """Resultado de un estimador: válido solo como orden de magnitud."""

    name: str
    value: float
    unit: str
    order_of_magnitude: bool = True
    details: Dict[str, Any] = Field(default_factory=dict)
