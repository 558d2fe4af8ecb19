from typing import Dict, Any, Optional, List
from pydantic import BaseModel, Field, ConfigDict
from datetime import datetime

from models.fit import FitResult
from models.species import CESIUM
from models.trace import SpectrumTrace

# === MODELOS AUXILIARES ===

class TraceInfo(BaseModel):
    """Origen de la traza a ajustar."""
    file_path: str = Field(default="", description="Ruta del CSV de la traza")
    filename: str = Field(default="", description="Nombre del archivo")
    points: int = Field(default=0, description="Número de puntos leídos")
    sha256: Optional[str] = Field(default=None, description="SHA-256 del archivo de traza")


class FitControl(BaseModel):
    """Control de flujo del ajuste."""
    processing_stage: str = Field(default="trace_ingestion", description="Etapa actual")
    status: str = Field(default="PROCESSING", description="Estado del ajuste")


class FitSettings(BaseModel):
    """Opciones del ajuste tomadas de la sección [fit] de la configuración."""
    free_parameters: List[str] = Field(default_factory=lambda: ["scale", "epsilon", "gamma_com", "omega_center", "omega_split"])
    fixed_values: Dict[str, float] = Field(default_factory=dict)
    initial: Optional[Dict[str, float]] = None
    bounds: Dict[str, Any] = Field(default_factory=dict)
    weights: str = Field(default="uniform", description="uniform | poisson")
    weight_floor: Optional[float] = None
    population_coordinate: str = Field(default="epsilon")
    restarts: bool = True
    F: float = 4.0
    hyperfine_splitting: float = Field(default=CESIUM.hyperfine_splitting, description="ν_hfs de la especie (Hz)")


class LoggingData(BaseModel):
    """Mensajes, errores y warnings del ajuste."""
    messages: List[str] = Field(default_factory=list, description="Mensajes del proceso")
    errors: List[str] = Field(default_factory=list, description="Errores encontrados")
    warnings: List[str] = Field(default_factory=list, description="Warnings generados")
    error_code: Optional[int] = Field(default=None, description="Código de salida del primer error")


# === MODELO PRINCIPAL ===

class FitPipelineState(BaseModel):
    """
    Estado del pipeline de ajuste: traza → semilla → ajuste → reporte.
    """

    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        validate_assignment=True,
        populate_by_name=True
    )

    trace_info: TraceInfo = Field(default_factory=TraceInfo)
    fit_settings: FitSettings = Field(default_factory=FitSettings)
    control: FitControl = Field(default_factory=FitControl)
    logging: LoggingData = Field(default_factory=LoggingData)

    config_digest: Optional[str] = Field(default=None, description="SHA-256 de la configuración")
    trace: Optional[SpectrumTrace] = None
    initial_parameters: Dict[str, float] = Field(default_factory=dict)
    result: Optional[FitResult] = None
    report: Dict[str, Any] = Field(default_factory=dict)

    # === PROPIEDADES DE CONVENIENCIA ===

    @property
    def status(self) -> str:
        return self.control.status

    @property
    def processing_stage(self) -> str:
        return self.control.processing_stage

    # === MÉTODOS DE ESTADO ===

    def update_stage(self, stage: str) -> 'FitPipelineState':
        """Actualizar etapa de procesamiento."""
        self.control.processing_stage = stage
        return self.add_message(f"Iniciando etapa: {stage}")

    def add_message(self, message: str) -> 'FitPipelineState':
        timestamp = datetime.now().strftime("%H:%M:%S")
        self.logging.messages.append(f"[{timestamp}] {message}")
        return self

    def add_error(self, error: str, exit_code: Optional[int] = None) -> 'FitPipelineState':
        """Agregar error y marcar el estado como FAILED."""
        timestamp = datetime.now().strftime("%H:%M:%S")
        self.logging.errors.append(f"[{timestamp}] {error}")
        if self.logging.error_code is None:
            self.logging.error_code = exit_code
        self.control.status = "FAILED"
        return self

    def add_warning(self, warning: str) -> 'FitPipelineState':
        timestamp = datetime.now().strftime("%H:%M:%S")
        self.logging.warnings.append(f"[{timestamp}] {warning}")
        return self

    def log_summary(self) -> Dict[str, Any]:
        """Bloque de log para el reporte; sin marcas de tiempo para que sea reproducible."""
        strip = lambda entries: [entry.split("] ", 1)[-1] for entry in entries]
        return {
            "messages": strip(self.logging.messages),
            "warnings": strip(self.logging.warnings),
            "errors": strip(self.logging.errors),
        }
