"""
Configuración de ejecución centralizada para morsekit.
Pydantic Settings V2: valores por defecto sobreescribibles por variables
de entorno con prefijo MORSEKIT_ o por un archivo .env.
"""

from pathlib import Path
from typing import Tuple

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Configuración principal del toolkit."""

    # === PARALELISMO ===
    threads: int = Field(default=1, ge=1, le=256, description="Máximo de hilos para barridos por frecuencia (MORSEKIT_THREADS)")

    # === MALLA DE FRECUENCIAS ===
    default_grid_points: int = Field(default=2001, ge=3, description="Puntos por defecto de la malla de frecuencias")

    # === MODELO DE POBLACIONES ===
    epsilon_bounds: Tuple[float, float] = Field(default=(1e-6, 1e6), description="Intervalo de búsqueda de ε en la inversión p → ε")
    orientation_tolerance: float = Field(default=1e-12, gt=0.0, description="Tolerancia absoluta en log ε para la inversión")

    # === AJUSTE ===
    fit_ftol: float = Field(default=1e-10, gt=0.0, description="Cambio relativo del residuo para declarar convergencia")
    fit_xtol: float = Field(default=1e-12, gt=0.0, description="Norma relativa del paso para declarar convergencia")
    fit_max_evaluations: int = Field(default=20000, ge=10, description="Máximo de evaluaciones del modelo por ajuste")
    restart_points: int = Field(default=8, ge=1, le=64, description="Puntos del hipercubo latino para reinicios")
    restart_threshold: float = Field(default=1e-2, ge=0.0, description="Residuo relativo sobre el cual se reinicia")
    degeneracy_condition: float = Field(default=1e-6, gt=0.0, description="Umbral σ_min/σ_max que dispara la advertencia de degeneración")

    # === SIMULADOR PULSADO ===
    pulsed_max_cycles: int = Field(default=10000, ge=1, description="Máximo de ciclos para alcanzar el estado periódico")
    pulsed_tolerance: float = Field(default=1e-10, gt=0.0, description="Tolerancia relativa a |χΔρ| del punto fijo periódico")

    # === ARCHIVOS ===
    temp_dir: str = Field(default="./temp", description="Directorio temporal para trazas subidas al servicio")
    max_trace_size_mb: int = Field(default=20, gt=0, le=200, description="Tamaño máximo de traza subida en MB")
    max_stored_jobs: int = Field(default=200, ge=1, description="Jobs terminados que se conservan en memoria antes de descartar los más antiguos")

    # === LOGGING ===
    log_level: str = Field(default="INFO", description="Nivel de logging")
    enable_file_logging: bool = Field(default=False, description="Habilitar logging a archivo")
    log_file_path: str = Field(default="morsekit.log", description="Ruta del archivo de log")

    model_config = SettingsConfigDict(
        env_prefix="MORSEKIT_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # === VALIDATORS ===

    @field_validator("temp_dir", mode="before")
    @classmethod
    def validate_temp_dir(cls, v: str) -> str:
        """Crear directorio temporal si no existe."""
        path = Path(v)
        path.mkdir(parents=True, exist_ok=True)
        return str(path)

    @field_validator("log_level", mode="before")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validar nivel de logging."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if str(v).upper() not in valid_levels:
            raise ValueError(f"Log level debe ser uno de: {valid_levels}")
        return str(v).upper()

    @field_validator("epsilon_bounds")
    @classmethod
    def validate_epsilon_bounds(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        low, high = v
        if not (0.0 < low < 1.0 < high):
            raise ValueError("epsilon_bounds debe cumplir 0 < bajo < 1 < alto")
        return v


TOOLKIT_NAME = "morsekit"
TOOLKIT_VERSION = "1.0.0"

# Instancia global de configuración
settings = Settings()
