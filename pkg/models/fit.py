"""
Tipos del ajuste: problema, resultado, chequeo de consistencia y barrido
de degeneración.
"""

from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.errors import EstimationError
from models.spin import SpinModel
from models.trace import SpectrumTrace

# scale = amplitude·N²: la señal MORS es proporcional a esta combinación
PARAMETER_NAMES: Tuple[str, ...] = (
    "scale",
    "epsilon",
    "gamma_com",
    "gamma_pump",
    "omega_center",
    "omega_split",
)
LOG_PARAMETERS = ("scale", "epsilon", "gamma_com", "gamma_pump")


class FitProblem(BaseModel):
    """Problema de mínimos cuadrados ponderados sobre una traza MORS."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    trace: SpectrumTrace
    free_parameters: List[str] = Field(default_factory=lambda: ["scale", "epsilon", "gamma_com", "omega_center", "omega_split"])
    fixed_values: Dict[str, float] = Field(default_factory=dict, description="Valores de los parámetros no libres")
    initial: Optional[Dict[str, float]] = Field(default=None, description="Semilla; si falta se usa initialize()")
    weights: Optional[np.ndarray] = Field(default=None, description="Pesos por punto (por defecto 1)")
    bounds: Dict[str, Tuple[float, float]] = Field(default_factory=dict)
    F: float = Field(default=4.0)
    population_coordinate: Literal["epsilon", "orientation"] = "epsilon"
    restarts: bool = Field(default=True, description="Reinicios por hipercubo latino si el ajuste falla")

    @field_validator("free_parameters")
    @classmethod
    def validate_free(cls, v: List[str]) -> List[str]:
        if not v:
            raise ValueError("Se necesita al menos un parámetro libre")
        unknown = sorted(set(v) - set(PARAMETER_NAMES))
        if unknown:
            raise ValueError(f"Parámetros desconocidos: {unknown}")
        # Orden canónico
        return [name for name in PARAMETER_NAMES if name in v]

    @model_validator(mode="after")
    def validate_problem(self) -> "FitProblem":
        unknown = sorted(set(self.fixed_values) - set(PARAMETER_NAMES))
        if unknown:
            raise ValueError(f"Parámetros fijos desconocidos: {unknown}")
        overlap = sorted(set(self.fixed_values) & set(self.free_parameters))
        if overlap:
            raise ValueError(f"Parámetros a la vez libres y fijos: {overlap}")
        for name, (low, high) in self.bounds.items():
            if name not in PARAMETER_NAMES:
                raise ValueError(f"Cota para parámetro desconocido '{name}'")
            if not low < high:
                raise ValueError(f"Cota inconsistente para {name}: {low} ≥ {high}")
        if len(self.trace) < len(self.free_parameters):
            raise ValueError("La traza tiene menos puntos que parámetros libres")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float)
            if self.weights.shape != self.trace.values.shape:
                raise ValueError("Los pesos deben tener la misma longitud que la traza")
            if np.any(self.weights < 0):
                raise ValueError("Los pesos deben ser no negativos")
        return self


class FitResult(BaseModel):
    """Mejor modelo, derivados, residuo, incertidumbres y diagnóstico."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    model: SpinModel
    scale: float
    orientation: float
    j_z: float
    line_widths: List[float]
    line_centers: List[float]
    residual_norm: float = Field(..., ge=0.0)
    relative_residual: float = Field(default=0.0, ge=0.0)
    reduced_chi_square: Optional[float] = None
    parameter_uncertainties: Dict[str, Optional[float]] = Field(default_factory=dict)
    converged: bool
    iterations: int
    restarts_used: int = 0
    degenerate: bool = False
    singular_values: List[float] = Field(default_factory=list)
    free_parameters: List[str] = Field(default_factory=list)
    message: str = ""

    def parameters(self) -> Dict[str, float]:
        m = self.model
        return {
            "scale": self.scale,
            "epsilon": m.epsilon,
            "gamma_com": m.gamma_com,
            "gamma_pump": m.gamma_pump,
            "omega_center": m.omega_center,
            "omega_split": m.omega_split,
        }

    def to_report(self) -> Dict[str, Any]:
        """Diccionario con el conjunto de claves estable del reporte JSON."""
        return {
            "parameters": self.parameters(),
            "derived": {
                "orientation": self.orientation,
                "j_z": self.j_z,
                "atom_number": self.model.atom_number,
                "n4": self.model.n4,
                "line_widths_hz": self.line_widths,
                "line_centers_hz": self.line_centers,
            },
            "uncertainties": self.parameter_uncertainties,
            "residual_norm": self.residual_norm,
            "relative_residual": self.relative_residual,
            "reduced_chi_square": self.reduced_chi_square,
            "converged": self.converged,
            "iterations": self.iterations,
            "restarts_used": self.restarts_used,
            "degenerate": self.degenerate,
            "singular_values": self.singular_values,
            "free_parameters": self.free_parameters,
            "message": self.message,
        }


class ConsistencyReport(BaseModel):
    """Recta J_z ajustado vs θ_DC."""

    slope: float
    intercept: float
    intercept_ratio: float = Field(..., description="|intercepto| / RMS de J_z")
    correlation: float
    slope_stderr: float
    points: int
    negative_slope: bool


class DegeneracyScan(BaseModel):
    """Familia de ajustes restringidos a p fijo (Γ_com = ω_split = 0)."""

    orientations: List[float]
    j_z: List[float]
    gamma_pump: List[float]
    omega_center: List[float]
    scale: List[float]
    residual_norm: List[float]
    converged: List[bool]

    def is_monotonic(self) -> bool:
        diffs = np.diff(np.asarray(self.j_z)[np.argsort(self.orientations)])
        return bool(np.all(diffs > 0) or np.all(diffs < 0))

    def orientation_interval(self, j_z_reference: float, relative_accuracy: float) -> Tuple[float, float]:
        """
        Intervalo de p compatible con J_z = referencia·(1 ± precisión),
        interpolando la curva J_z(p) del barrido.

        Raises:
            EstimationError: Si algún extremo cae fuera del rango de J_z barrido
        """
        jz = np.asarray(self.j_z)
        p = np.asarray(self.orientations)
        order = np.argsort(jz)
        targets = [j_z_reference * (1.0 + s * relative_accuracy) for s in (-1.0, 1.0)]
        low_jz, high_jz = float(jz[order][0]), float(jz[order][-1])
        outside = [t for t in targets if not low_jz <= t <= high_jz]
        if outside:
            raise EstimationError(
                f"J_z = {outside[0]:.6g} fuera del rango barrido [{low_jz:.6g}, {high_jz:.6g}]; ampliar la malla de p"
            )
        bounds = [float(np.interp(t, jz[order], p[order])) for t in targets]
        return min(bounds), max(bounds)
