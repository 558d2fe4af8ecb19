import logging
import traceback
from pathlib import Path

from models.errors import MorsekitError
from models.settings import settings
from models.state import FitPipelineState
from utils.io_utils import read_trace_csv, sha256_file

logger = logging.getLogger("TraceIngestion")


def trace_ingestion_node(state: FitPipelineState) -> FitPipelineState:
    """
    Lee y valida la traza CSV.

    Args:
        state: Estado con la ruta de la traza

    Returns:
        Estado con la traza cargada o marcado como FAILED
    """
    logger.info("Iniciando lectura de la traza")
    state = state.update_stage("trace_ingestion")

    try:
        file_path = Path(state.trace_info.file_path)
        if not file_path.exists():
            return state.add_error(f"Archivo de traza no encontrado: {file_path}", exit_code=3)

        size_mb = file_path.stat().st_size / (1024 * 1024)
        if size_mb > settings.max_trace_size_mb:
            return state.add_error(
                f"Traza demasiado grande: {size_mb:.1f}MB > {settings.max_trace_size_mb}MB", exit_code=3
            )

        trace = read_trace_csv(str(file_path))
        state.trace = trace
        state.trace_info.points = len(trace)
        state.trace_info.sha256 = sha256_file(str(file_path))

        logger.info(f"Traza válida: {file_path.name} ({len(trace)} puntos)")
        return state.add_message(
            f"Traza leída: {len(trace)} puntos entre {trace.frequencies[0]:.3f} y {trace.frequencies[-1]:.3f} Hz"
        )

    except MorsekitError as e:
        logger.error(f"Traza inválida: {e}")
        return state.add_error(f"Traza inválida: {e}", exit_code=e.exit_code)
    except Exception as e:
        logger.error(f"Error leyendo la traza: {e}")
        logger.error(traceback.format_exc())
        return state.add_error(f"Error leyendo la traza: {e}", exit_code=3)
