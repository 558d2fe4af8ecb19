"""
Lectura y escritura de trazas, reportes y manifiestos.

CSV: línea opcional `# morsekit <versión> config_sha256=<hex>` y cabecera
`frequency_hz,value`. JSON: objeto `provenance` sin marcas de tiempo, de
modo que repetir una corrida produce archivos idénticos byte a byte.
Toda escritura es atómica (temporal en el mismo directorio + os.replace).
"""

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import numpy as np
import pandas as pd

from models.errors import TraceParseError
from models.fit import FitResult
from models.pulses import PulsedDiagnostics
from models.settings import TOOLKIT_NAME, TOOLKIT_VERSION
from models.trace import SpectrumTrace, TraceKind

logger = logging.getLogger("IO")

TRACE_COLUMNS = ("frequency_hz", "value")
FLOAT_FORMAT = "%.15e"


# === HASHES Y PROCEDENCIA ===

def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def provenance(config_digest: Optional[str], **extra: Any) -> Dict[str, Any]:
    """Bloque de procedencia de los JSON de salida."""
    return {"toolkit": TOOLKIT_NAME, "version": TOOLKIT_VERSION, "config_sha256": config_digest, **extra}


def provenance_line(config_digest: Optional[str]) -> str:
    return f"# {TOOLKIT_NAME} {TOOLKIT_VERSION} config_sha256={config_digest or 'none'}"


# === ESCRITURA ATÓMICA ===

def atomic_write_text(path: str, text: str) -> Path:
    """Escribe en un temporal del mismo directorio y lo renombra sobre `path`."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_name, target)
    except Exception:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return target


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.bool_):
        return bool(value)
    if hasattr(value, "model_dump"):
        return value.model_dump()
    raise TypeError(f"Tipo no serializable: {type(value).__name__}")


def to_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False, default=_jsonable) + "\n"


def write_json(path: str, payload: Dict[str, Any]) -> Path:
    return atomic_write_text(path, to_json(payload))


# === TRAZAS CSV ===

def trace_to_csv(trace: SpectrumTrace, config_digest: Optional[str] = None, values: Optional[np.ndarray] = None) -> str:
    frame = pd.DataFrame(
        {
            TRACE_COLUMNS[0]: trace.frequencies,
            TRACE_COLUMNS[1]: trace.values if values is None else np.asarray(values, dtype=float),
        }
    )
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return provenance_line(config_digest) + "\n" + body


def write_trace_csv(
    path: str,
    trace: SpectrumTrace,
    config_digest: Optional[str] = None,
    values: Optional[np.ndarray] = None,
) -> Path:
    """Escribe la traza; `values` reemplaza la columna de valores (residuo, modelo)."""
    written = atomic_write_text(path, trace_to_csv(trace, config_digest, values))
    logger.info(f"Traza escrita: {written} ({len(trace)} puntos)")
    return written


def read_trace_csv(path: str, kind: TraceKind = TraceKind.MORS_POWER) -> SpectrumTrace:
    """
    Lee una traza `frequency_hz,value`; las líneas que empiezan con '#' se
    ignoran y las columnas adicionales también.

    Raises:
        TraceParseError: Archivo ilegible, columnas ausentes, valores no
            numéricos, frecuencias no crecientes o potencia negativa. `row`
            es la fila de datos (1 = primera después de la cabecera).
    """
    try:
        frame = pd.read_csv(path, comment="#", skip_blank_lines=True, dtype=str)
    except FileNotFoundError:
        raise TraceParseError(f"No existe el archivo de traza: {path}")
    except pd.errors.EmptyDataError:
        raise TraceParseError("El archivo de traza está vacío")
    except pd.errors.ParserError as e:
        raise TraceParseError(f"CSV mal formado: {e}")

    frame.columns = [str(c).strip() for c in frame.columns]
    missing = [c for c in TRACE_COLUMNS if c not in frame.columns]
    if missing:
        raise TraceParseError(f"Faltan columnas {missing}; se espera la cabecera 'frequency_hz,value'", row=0)
    if frame.empty:
        raise TraceParseError("La traza no tiene filas de datos")

    columns = {}
    for name in TRACE_COLUMNS:
        numeric = pd.to_numeric(frame[name].str.strip(), errors="coerce")
        bad = np.flatnonzero(~np.isfinite(numeric.to_numpy(dtype=float)))
        if bad.size:
            row = int(bad[0]) + 1
            raise TraceParseError(f"Valor no numérico en '{name}': {frame[name].iloc[bad[0]]!r}", row=row)
        columns[name] = numeric.to_numpy(dtype=float)

    frequencies, values = columns["frequency_hz"], columns["value"]
    steps = np.flatnonzero(np.diff(frequencies) <= 0)
    if steps.size:
        raise TraceParseError("Las frecuencias deben ser estrictamente crecientes", row=int(steps[0]) + 2)
    if kind == TraceKind.MORS_POWER:
        negative = np.flatnonzero(values < 0)
        if negative.size:
            raise TraceParseError("Valor negativo en una traza de potencia MORS", row=int(negative[0]) + 1)

    logger.info(f"Traza leída: {path} ({frequencies.size} puntos)")
    return SpectrumTrace(frequencies=frequencies, values=values, kind=kind, meta={"source": Path(path).name})


# === REPORTES ===

def fit_report(
    result: FitResult,
    config_digest: Optional[str],
    trace_digest: Optional[str] = None,
    pipeline_log: Optional[Dict[str, Any]] = None,
    extra: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """Reporte JSON con el conjunto de claves estable de `FitResult.to_report`."""
    report = result.to_report()
    report["provenance"] = provenance(config_digest, trace_sha256=trace_digest)
    if pipeline_log is not None:
        report["pipeline"] = pipeline_log
    if extra:
        report.update(extra)
    return report


def diagnostics_to_csv(diagnostics: PulsedDiagnostics, config_digest: Optional[str] = None) -> str:
    frame = pd.DataFrame(
        {
            "frequency_hz": diagnostics.frequencies,
            "cycles": diagnostics.cycles.astype(int),
            "last_step": diagnostics.last_step,
            "fixed_point_gap": diagnostics.fixed_point_gap,
            "converged": diagnostics.converged.astype(int),
        }
    )
    return provenance_line(config_digest) + "\n" + frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def write_manifest(
    out_dir: str,
    command: str,
    config_path: Optional[str],
    config_digest: Optional[str],
    outputs: Iterable[Path],
    seed: Optional[int] = None,
) -> Path:
    """Manifiesto de la corrida: comando, config, semilla y SHA-256 de cada salida."""
    files = {Path(p).name: sha256_file(str(p)) for p in sorted(outputs, key=lambda p: Path(p).name)}
    payload = {
        "command": command,
        "config": Path(config_path).name if config_path else None,
        "seed": seed,
        "outputs": files,
        "provenance": provenance(config_digest),
    }
    return write_json(str(Path(out_dir) / f"{command}_manifest.json"), payload)
