"""
Jerarquía de errores del toolkit.

Cada error lleva el código de salida que la CLI devuelve al sistema operativo.
"""

from typing import Any, Dict, Optional


class MorsekitError(Exception):
    """Error base; `exit_code` es el código de salida de la CLI."""

    exit_code: int = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = dict(details)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
            **self.details,
        }


class DomainError(MorsekitError, ValueError):
    """Argumentos fuera del dominio físico (F, m, p, campo negativo...)."""

    exit_code = 2


class ConfigError(MorsekitError):
    """Configuración inválida; `line` apunta a la línea del archivo cuando se conoce."""

    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None, **details: Any):
        super().__init__(message, line=line, path=path, **details)
        self.line = line
        self.path = path

    def __str__(self) -> str:
        location = ""
        if self.path:
            location = f"{self.path}:"
            if self.line is not None:
                location += f"{self.line}:"
            location += " "
        elif self.line is not None:
            location = f"línea {self.line}: "
        return f"{location}{self.message}"


class TraceParseError(MorsekitError):
    """CSV de traza mal formado; `row` es la fila de datos (1 = primera tras el header)."""

    exit_code = 3

    def __init__(self, message: str, row: Optional[int] = None, **details: Any):
        super().__init__(message, row=row, **details)
        self.row = row

    def __str__(self) -> str:
        if self.row is not None:
            return f"fila {self.row}: {self.message}"
        return self.message


class ConvergenceError(MorsekitError):
    """Un proceso iterativo no alcanzó su criterio de convergencia."""

    exit_code = 4

    def __init__(self, message: str, diagnostics: Optional[Any] = None, **details: Any):
        super().__init__(message, **details)
        self.diagnostics = diagnostics


class SingularResponseError(MorsekitError):
    """Respuesta singular: ancho de línea cero exactamente en resonancia."""

    exit_code = 5


class InitializationError(MorsekitError):
    """No se pudo construir una semilla para el ajuste (traza plana o vacía)."""

    exit_code = 6


class EstimationError(MorsekitError):
    """Un estimador no encontró la característica que necesita (p.ej. ningún pico)."""

    exit_code = 6


class RegressionError(MorsekitError):
    """Regresión degenerada en el chequeo de consistencia."""

    exit_code = 6
