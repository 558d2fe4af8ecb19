from pathlib import Path
from fastapi import UploadFile, HTTPException
import uuid
from models.settings import settings


TRACE_EXTENSIONS = ['.csv', '.txt']
CONFIG_EXTENSIONS = ['.cfg', '.toml']


def validate_upload(file: UploadFile, extensions: list) -> bytes:
    """
    Valida que el archivo subido tenga una extensión permitida, no esté vacío,
    sea texto UTF-8 y no supere el tamaño máximo.

    Args:
        file: Archivo subido por el usuario.
        extensions: Extensiones aceptadas (con punto).

    Returns:
        El contenido del archivo en bytes.

    Raises:
        HTTPException: Si el archivo no es válido.
    """
    if not file.filename:
        raise HTTPException(status_code=400, detail="El archivo debe tener un nombre")

    filename_lower = file.filename.lower()
    if not any(filename_lower.endswith(ext) for ext in extensions):
        allowed_formats = ", ".join(extensions)
        raise HTTPException(
            status_code=400,
            detail=f"Formato no soportado para '{file.filename}'. Formatos permitidos: {allowed_formats}"
        )

    file_content = file.file.read()
    file_size_mb = len(file_content) / (1024 * 1024)

    max_size = settings.max_trace_size_mb
    if file_size_mb > max_size:
        raise HTTPException(
            status_code=413,
            detail=f"Archivo demasiado grande: {file_size_mb:.1f}MB. Máximo permitido: {max_size}MB"
        )

    if not _is_text_content(file_content):
        raise HTTPException(status_code=400, detail=f"'{file.filename}' no es un archivo de texto UTF-8")

    return file_content


def validate_trace(file: UploadFile) -> bytes:
    """Traza CSV `frequency_hz,value`."""
    return validate_upload(file, TRACE_EXTENSIONS)


def validate_config(file: UploadFile) -> bytes:
    """Configuración TOML (.cfg)."""
    return validate_upload(file, CONFIG_EXTENSIONS)


def _is_text_content(content: bytes) -> bool:
    if not content or b'\x00' in content:
        return False
    try:
        content.decode('utf-8')
    except UnicodeDecodeError:
        return False
    return True


def save_temp_file(file_content: bytes, filename: str, temp_dir: Path) -> Path:
    """
    Guarda el contenido del archivo en un archivo temporal.

    Args:
        file_content: Contenido del archivo en bytes.
        filename: Nombre original del archivo.
        temp_dir: Directorio temporal donde guardar el archivo.

    Returns:
        La ruta al archivo temporal creado.
    """
    temp_dir.mkdir(parents=True, exist_ok=True)
    temp_filename = f"upload_{uuid.uuid4().hex}_{Path(filename).name}"
    temp_file_path = temp_dir / temp_filename

    with open(temp_file_path, 'wb') as temp_file:
        temp_file.write(file_content)

    return temp_file_path
