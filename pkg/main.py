import logging
import traceback
import uuid
import shutil
from datetime import datetime
from pathlib import Path
from typing import Dict, Any, Callable, Optional

from fastapi import FastAPI, File, UploadFile, HTTPException, BackgroundTasks
from fastapi.middleware.cors import CORSMiddleware
from dotenv import load_dotenv
from pydantic import ValidationError

# Cargar variables de entorno
load_dotenv()

from morsekit import configure_logging, cmd_simulate, cmd_fit, cmd_pulsed, cmd_estimate
from models.config import parse_config, RunConfig
from models.errors import MorsekitError
from models.settings import settings, TOOLKIT_VERSION
from utils.api_utils import validate_config, validate_trace, save_temp_file
from utils.io_utils import sha256_bytes

configure_logging()
logger = logging.getLogger("MainApp")

app = FastAPI(
    title="morsekit",
    description="Simulación y ajuste de espectros de resonancia magneto-óptica (MORS)",
    version=TOOLKIT_VERSION
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# ================================
# ALMACENAMIENTO EN MEMORIA
# ================================

job_storage = {}  # {job_id: job_data}


class JobStatus:
    PENDING = "PENDING"
    PROCESSING = "PROCESSING"
    COMPLETED = "COMPLETED"
    FAILED = "FAILED"

# ================================
# FUNCIONES AUXILIARES
# ================================

def create_job_id() -> str:
    """Genera un ID único para el trabajo."""
    return str(uuid.uuid4())


def job_dir(job_id: str) -> Path:
    """Directorio de trabajo del job (subidas y salidas)."""
    return Path(settings.temp_dir) / job_id


def read_config(file: UploadFile) -> RunConfig:
    """
    Valida y parsea la configuración subida.

    Raises:
        HTTPException: 400 si el archivo no es texto; 422 con la línea si la configuración es inválida.
    """
    content = validate_config(file)
    try:
        config = parse_config(content.decode("utf-8"), path=file.filename)
    except MorsekitError as e:
        raise HTTPException(status_code=422, detail=e.to_dict())
    config._digest = sha256_bytes(content)
    config._source_path = file.filename
    return config


def remove_job_files(job_id: str) -> None:
    """Borra el directorio de trabajo del job si existe."""
    directory = job_dir(job_id)
    if directory.exists():
        try:
            shutil.rmtree(directory)
            logger.info(f"Directorio eliminado: {directory}")
        except Exception as e:
            logger.warning(f"No se pudo eliminar directorio: {e}")


def evict_finished_jobs() -> None:
    """Descarta los jobs terminados más antiguos hasta dejar sitio para uno nuevo."""
    finished = sorted(
        (job for job in job_storage.values() if job["status"] in (JobStatus.COMPLETED, JobStatus.FAILED)),
        key=lambda job: job["created_at"],
    )
    excess = len(job_storage) - settings.max_stored_jobs + 1
    for job in finished[:max(excess, 0)]:
        job_storage.pop(job["job_id"], None)
        remove_job_files(job["job_id"])
        logger.info(f"[{job['job_id']}] Descartado por límite de {settings.max_stored_jobs} jobs")


def register_job(command: str, filename: str) -> str:
    evict_finished_jobs()
    job_id = create_job_id()
    job_storage[job_id] = {
        "job_id": job_id,
        "command": command,
        "status": JobStatus.PENDING,
        "filename": filename,
        "created_at": datetime.now().isoformat(),
    }
    return job_id


def run_job(job_id: str, command: Callable[..., Dict[str, Any]], *args) -> None:
    """Ejecuta un comando en background y actualiza el estado del job."""
    try:
        logger.info(f"[{job_id}] Iniciando {job_storage[job_id]['command']}")
        job_storage[job_id].update({
            "status": JobStatus.PROCESSING,
            "started_at": datetime.now().isoformat()
        })

        outcome = command(*args)

        job_storage[job_id].update({
            "status": JobStatus.COMPLETED,
            "completed_at": datetime.now().isoformat(),
            "result": {
                "report": outcome["report"],
                "files": [Path(f).name for f in outcome["files"]],
            }
        })
        logger.info(f"[{job_id}] Completado exitosamente")

    except MorsekitError as e:
        logger.error(f"[{job_id}] {type(e).__name__}: {e}")
        job_storage[job_id].update({
            "status": JobStatus.FAILED,
            "completed_at": datetime.now().isoformat(),
            "error": str(e),
            "error_details": e.to_dict()
        })
    except (ValidationError, ValueError) as e:
        logger.error(f"[{job_id}] Valores inválidos: {e}")
        job_storage[job_id].update({
            "status": JobStatus.FAILED,
            "completed_at": datetime.now().isoformat(),
            "error": str(e),
            "error_details": {"exit_code": 2}
        })
    except Exception as e:
        logger.error(f"[{job_id}] Error en procesamiento: {str(e)}")
        logger.error(traceback.format_exc())
        job_storage[job_id].update({
            "status": JobStatus.FAILED,
            "completed_at": datetime.now().isoformat(),
            "error": str(e)
        })


def accepted(job_id: str) -> Dict[str, Any]:
    job = job_storage[job_id]
    return {
        "job_id": job_id,
        "status": job["status"],
        "command": job["command"],
        "message": f"Trabajo '{job['command']}' creado. Procesamiento iniciado.",
        "filename": job["filename"],
    }

# ================================
# ENDPOINTS
# ================================

@app.post("/simulate")
async def simulate(
    background_tasks: BackgroundTasks,
    config: UploadFile = File(...),
    seed: Optional[int] = None
) -> Dict[str, Any]:
    """Espectro MORS cw a partir de una configuración con [model] y [grid]."""
    run_config = read_config(config)
    job_id = register_job("simulate", config.filename)
    background_tasks.add_task(run_job, job_id, cmd_simulate, run_config, str(job_dir(job_id)), seed)
    return accepted(job_id)


@app.post("/fit")
async def fit(
    background_tasks: BackgroundTasks,
    config: UploadFile = File(...),
    trace: UploadFile = File(...)
) -> Dict[str, Any]:
    """
    Ajuste de una traza CSV `frequency_hz,value` con la sección [fit] de la configuración.
    """
    try:
        run_config = read_config(config)
        trace_content = validate_trace(trace)
        job_id = register_job("fit", trace.filename)

        trace_path = save_temp_file(trace_content, trace.filename, job_dir(job_id))
        job_storage[job_id]["file_path"] = str(trace_path)
        job_storage[job_id]["file_size_mb"] = round(len(trace_content) / (1024 * 1024), 3)
        logger.info(f"[{job_id}] Traza guardada: {trace_path}")

        background_tasks.add_task(run_job, job_id, cmd_fit, run_config, str(trace_path), str(job_dir(job_id)))
        return accepted(job_id)

    except HTTPException:
        raise
    except Exception as e:
        logger.error(f"Error en fit: {str(e)}")
        logger.error(traceback.format_exc())
        raise HTTPException(status_code=500, detail=f"Error interno: {str(e)}")


@app.post("/pulsed")
async def pulsed(
    background_tasks: BackgroundTasks,
    config: UploadFile = File(...)
) -> Dict[str, Any]:
    """Espectro pulsado en estado periódico a partir de la sección [pulses]."""
    run_config = read_config(config)
    job_id = register_job("pulsed", config.filename)
    background_tasks.add_task(run_job, job_id, cmd_pulsed, run_config, str(job_dir(job_id)))
    return accepted(job_id)


@app.post("/estimate")
async def estimate(
    background_tasks: BackgroundTasks,
    config: UploadFile = File(...)
) -> Dict[str, Any]:
    """Estimadores de orden de magnitud de la sección [estimate]."""
    run_config = read_config(config)
    job_id = register_job("estimate", config.filename)
    background_tasks.add_task(run_job, job_id, cmd_estimate, run_config, str(job_dir(job_id)))
    return accepted(job_id)


@app.get("/status/{job_id}")
async def get_job_status(job_id: str) -> Dict[str, Any]:
    """
    Consulta el estado de un trabajo.

    Args:
        job_id: ID del trabajo
    """
    if job_id not in job_storage:
        raise HTTPException(status_code=404, detail="Job ID no encontrado")

    job_data = job_storage[job_id]

    response = {
        "job_id": job_id,
        "command": job_data["command"],
        "status": job_data["status"],
        "filename": job_data["filename"],
        "created_at": job_data["created_at"]
    }

    if job_data["status"] == JobStatus.PROCESSING and "started_at" in job_data:
        response["started_at"] = job_data["started_at"]

    elif job_data["status"] == JobStatus.COMPLETED:
        response.update({
            "completed_at": job_data["completed_at"],
            "result_available": True
        })

    elif job_data["status"] == JobStatus.FAILED:
        response.update({
            "completed_at": job_data["completed_at"],
            "error": job_data["error"],
            "error_details": job_data.get("error_details", {})
        })

    return response


@app.get("/result/{job_id}")
async def get_job_result(job_id: str) -> Dict[str, Any]:
    """Resultado completo de un trabajo COMPLETED."""
    if job_id not in job_storage:
        raise HTTPException(status_code=404, detail="Job ID no encontrado")

    job_data = job_storage[job_id]

    if job_data["status"] != JobStatus.COMPLETED:
        raise HTTPException(
            status_code=400,
            detail=f"El trabajo está en estado '{job_data['status']}'. Solo trabajos COMPLETED tienen resultados."
        )

    result = dict(job_data["result"])
    result["job_metadata"] = {
        "job_id": job_id,
        "command": job_data["command"],
        "filename": job_data["filename"],
        "created_at": job_data["created_at"],
        "completed_at": job_data["completed_at"]
    }
    return result


@app.get("/jobs")
async def list_jobs(limit: int = 10) -> Dict[str, Any]:
    """
    Lista los trabajos recientes.

    Args:
        limit: Número máximo de trabajos a retornar
    """
    jobs = sorted(job_storage.values(), key=lambda x: x["created_at"], reverse=True)[:limit]

    simplified_jobs = []
    for job in jobs:
        simplified = {
            "job_id": job["job_id"],
            "command": job["command"],
            "status": job["status"],
            "filename": job["filename"],
            "created_at": job["created_at"]
        }
        if job["status"] == JobStatus.COMPLETED:
            simplified["completed_at"] = job["completed_at"]
        elif job["status"] == JobStatus.FAILED:
            simplified["error"] = job.get("error", "Unknown error")
        simplified_jobs.append(simplified)

    return {
        "total_jobs": len(job_storage),
        "jobs": simplified_jobs
    }


@app.delete("/jobs/{job_id}")
async def delete_job(job_id: str) -> Dict[str, Any]:
    """Elimina un trabajo y su directorio de archivos."""
    if job_id not in job_storage:
        raise HTTPException(status_code=404, detail="Job ID no encontrado")

    job_data = job_storage.pop(job_id)
    remove_job_files(job_id)

    return {
        "message": f"Job {job_id} eliminado exitosamente",
        "deleted_job": {
            "job_id": job_id,
            "filename": job_data["filename"],
            "status": job_data["status"]
        }
    }


# ================================
# ENDPOINT DE SALUD
# ================================

@app.get("/health")
async def health_check() -> Dict[str, Any]:
    """Endpoint de salud para monitoreo."""
    return {
        "status": "healthy",
        "timestamp": datetime.now().isoformat(),
        "active_jobs": len([j for j in job_storage.values() if j["status"] in [JobStatus.PENDING, JobStatus.PROCESSING]]),
        "total_jobs": len(job_storage),
        "threads": settings.threads,
        "version": TOOLKIT_VERSION
    }


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        "main:app",
        host="0.0.0.0",
        port=8000,
        reload=True,
        log_level="info"
    )
