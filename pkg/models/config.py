"""
Configuración de una corrida (simulate / fit / pulsed / estimate).

Los archivos `.cfg` son TOML. Los errores de sintaxis y de validación se
reportan con la línea de la clave responsable.
"""

import re

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    ValidationError,
    ValidationInfo,
    field_validator,
    model_validator,
)

from models.beams import CellGeometry, ProbeBeam, TrappingSample
from models.errors import ConfigError
from models.fit import PARAMETER_NAMES
from models.pulses import PulseSchedule, PulseSegment
from models.species import AtomSpecies, get_species
from models.spin import SpinModel

SCHEMA_VERSION = 1


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


# === SECCIONES ===

class SpeciesSection(_Section):
    """Preset por nombre, con campos sueltos que lo sobreescriben."""

    preset: str = Field(default="cesium", description="cesium | cs | rubidium87 | rb87")
    name: Optional[str] = None
    nuclear_spin: Optional[float] = None
    hyperfine_splitting: Optional[float] = Field(default=None, gt=0.0)
    electron_moment: Optional[float] = None
    nuclear_moment: Optional[float] = None

    @field_validator("preset")
    @classmethod
    def validate_preset(cls, v: str) -> str:
        try:
            get_species(v)
        except KeyError as e:
            raise ValueError(str(e).strip("'\""))
        return v

    def to_species(self) -> AtomSpecies:
        base = get_species(self.preset)
        overrides = {k: v for k, v in self.model_dump(exclude={"preset"}).items() if v is not None}
        return base if not overrides else AtomSpecies(**{**base.model_dump(), **overrides})


class ModelSection(_Section):
    """
    Modelo de espín. Poblaciones por `orientation` o `epsilon`; tamaño por
    `atom_number` o `n4`; centro por `omega_center` o `bias_field` (Gauss).
    Sin `omega_split` se usa ν_QZ del centro.
    """

    F: float = 4.0
    orientation: Optional[float] = Field(default=None, ge=-1.0, le=1.0)
    epsilon: Optional[float] = Field(default=None, gt=0.0)
    atom_number: Optional[float] = Field(default=None, ge=0.0)
    n4: Optional[float] = Field(default=None, ge=0.0)
    gamma_com: float = Field(default=10.0, ge=0.0)
    gamma_pump: float = Field(default=0.0, ge=0.0)
    omega_center: Optional[float] = None
    bias_field: Optional[float] = Field(default=None, ge=0.0)
    omega_split: Optional[float] = None
    amplitude: float = Field(default=1.0, gt=0.0)

    @model_validator(mode="after")
    def validate_choices(self) -> "ModelSection":
        if (self.orientation is None) == (self.epsilon is None):
            raise ValueError("Indique exactamente uno de 'orientation' o 'epsilon'")
        if self.atom_number is not None and self.n4 is not None:
            raise ValueError("Indique solo uno de 'atom_number' o 'n4'")
        if (self.omega_center is None) == (self.bias_field is None):
            raise ValueError("Indique exactamente uno de 'omega_center' o 'bias_field'")
        return self

    def to_spin_model(self, species: AtomSpecies) -> SpinModel:
        from utils.zeeman_utils import larmor_frequency, qz_splitting

        center = self.omega_center
        if center is None:
            center = float(larmor_frequency(species, self.bias_field))
        split = self.omega_split
        if split is None:
            split = float(qz_splitting(abs(center), species.hyperfine_splitting))

        common = dict(
            F=self.F,
            gamma_com=self.gamma_com,
            gamma_pump=self.gamma_pump,
            omega_center=center,
            omega_split=split,
            amplitude=self.amplitude,
        )
        if self.orientation is not None:
            return SpinModel.from_orientation(self.orientation, atom_number=self._atom_number_or_default(), **common)
        if self.n4 is not None:
            return SpinModel(n4=self.n4, epsilon=self.epsilon, **common)
        return SpinModel.from_atom_number(self._atom_number_or_default(), self.epsilon, **common)

    def _atom_number_or_default(self) -> float:
        return 1.0 if self.atom_number is None else self.atom_number


class GridSection(_Section):
    """Malla lineal: `start`/`stop` explícitos o `span` centrado en ω_center."""

    start: Optional[float] = None
    stop: Optional[float] = None
    span: Optional[float] = Field(default=None, gt=0.0)
    points: Optional[int] = Field(default=None, ge=3)

    @model_validator(mode="after")
    def validate_limits(self) -> "GridSection":
        if (self.start is None) != (self.stop is None):
            raise ValueError("'start' y 'stop' van juntos")
        if self.start is not None:
            if self.span is not None:
                raise ValueError("Use 'start'/'stop' o 'span', no ambos")
            if not self.start < self.stop:
                raise ValueError("Se requiere start < stop")
        return self


class NoiseSection(_Section):
    kind: Literal["none", "gaussian"] = "none"
    level: float = Field(default=0.0, ge=0.0, description="σ relativo al máximo de la traza")
    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)

    @model_validator(mode="after")
    def validate_seed(self) -> "NoiseSection":
        if self.kind == "gaussian" and self.seed is None:
            raise ValueError("El ruido gaussiano requiere 'seed'")
        return self


class SegmentSection(_Section):
    duration: float = Field(..., gt=0.0)
    gamma_total: float = Field(..., ge=0.0)
    drive_on: bool = True
    probe_window: bool = False
    label: Optional[str] = None


class PulsesSection(_Section):
    """
    Secuencia pulsada: lista explícita `segments` o la línea de tiempo
    bombeo → oscuro → prueba → oscuro (`pump_duration`, `period`, ...).
    """

    segments: Optional[List[SegmentSection]] = None
    pump_duration: Optional[float] = Field(default=None, gt=0.0)
    pump_gamma: Optional[float] = Field(default=None, ge=0.0)
    delay_duration: float = Field(default=0.0, ge=0.0)
    probe_duration: Optional[float] = Field(default=None, gt=0.0)
    probe_gamma: Optional[float] = Field(default=None, ge=0.0)
    dark_gamma: Optional[float] = Field(default=None, ge=0.0)
    period: Optional[float] = Field(default=None, gt=0.0)
    drive_always_on: bool = True
    chi: float = 1.0
    delta_rho: float = 1.0
    center_frequency: float = 0.0
    cycles_per_point: int = Field(default=1, ge=1)
    span: float = Field(default=1200.0, gt=0.0)
    points: Optional[int] = Field(default=None, ge=3)

    @model_validator(mode="after")
    def validate_form(self) -> "PulsesSection":
        timeline = [self.pump_duration, self.pump_gamma, self.probe_duration, self.probe_gamma, self.dark_gamma, self.period]
        if self.segments is None and any(v is None for v in timeline):
            raise ValueError(
                "Sin 'segments' se requieren pump_duration, pump_gamma, probe_duration, probe_gamma, dark_gamma y period"
            )
        if self.segments is not None and any(v is not None for v in timeline):
            raise ValueError("Use 'segments' o la línea de tiempo, no ambos")
        return self

    def to_schedule(self) -> PulseSchedule:
        if self.segments is not None:
            return PulseSchedule(
                segments=[PulseSegment(**s.model_dump()) for s in self.segments],
                cycles_per_point=self.cycles_per_point,
                chi=self.chi,
                delta_rho=self.delta_rho,
                center_frequency=self.center_frequency,
            )
        from utils.pulsed_utils import schedule_from_timeline

        schedule = schedule_from_timeline(
            pump_duration=self.pump_duration,
            pump_gamma=self.pump_gamma,
            delay_duration=self.delay_duration,
            probe_duration=self.probe_duration,
            probe_gamma=self.probe_gamma,
            dark_gamma=self.dark_gamma,
            period=self.period,
            chi=self.chi,
            delta_rho=self.delta_rho,
            center_frequency=self.center_frequency,
            drive_always_on=self.drive_always_on,
        )
        return schedule.model_copy(update={"cycles_per_point": self.cycles_per_point})


class FitSection(_Section):
    free: List[str] = Field(default_factory=lambda: ["scale", "epsilon", "gamma_com", "omega_center", "omega_split"])
    fixed: Dict[str, float] = Field(default_factory=dict)
    initial: Optional[Dict[str, float]] = None
    bounds: Dict[str, Tuple[float, float]] = Field(default_factory=dict)
    weights: Literal["uniform", "poisson"] = "uniform"
    weight_floor: Optional[float] = Field(default=None, gt=0.0)
    population_coordinate: Literal["epsilon", "orientation"] = "epsilon"
    restarts: bool = True
    write_model: bool = Field(default=True, description="Escribir también modelo y residuo en CSV")

    @field_validator("free")
    @classmethod
    def validate_free(cls, v: List[str]) -> List[str]:
        if not v:
            raise ValueError("Se necesita al menos un parámetro libre")
        _check_names(v)
        if len(set(v)) != len(v):
            raise ValueError("Parámetros libres repetidos")
        return v

    @field_validator("fixed")
    @classmethod
    def validate_fixed(cls, v: Dict[str, float], info: ValidationInfo) -> Dict[str, float]:
        _check_names(v)
        overlap = sorted(set(v) & set(info.data.get("free") or []))
        if overlap:
            raise ValueError(f"Parámetros a la vez libres y fijos: {overlap}")
        return v

    @field_validator("initial")
    @classmethod
    def validate_initial(cls, v: Optional[Dict[str, float]]) -> Optional[Dict[str, float]]:
        if v is not None:
            _check_names(v)
        return v

    @field_validator("bounds")
    @classmethod
    def validate_bounds(cls, v: Dict[str, Tuple[float, float]]) -> Dict[str, Tuple[float, float]]:
        _check_names(v)
        for name, (low, high) in v.items():
            if not low < high:
                raise ValueError(f"Cota inconsistente para {name}: {low} ≥ {high}")
        return v


def _check_names(names) -> None:
    unknown = sorted(set(names) - set(PARAMETER_NAMES))
    if unknown:
        raise ValueError(f"Parámetros desconocidos: {unknown}; válidos: {list(PARAMETER_NAMES)}")


class GradientSeriesSection(_Section):
    gradients: List[float] = Field(..., description="∂B/∂z en mG/m")
    widths: List[float] = Field(..., description="Anchos medidos en Hz")


class EstimateSection(_Section):
    """Entradas de los estimadores; cada bloque presente produce una estimación."""

    F: float = 4.0
    probe: Optional[ProbeBeam] = None
    far_detuned: bool = False
    cell: Optional[CellGeometry] = None
    gradient_coefficient: Optional[float] = Field(default=None, gt=0.0, description="Coeficiente medido (Hz·m²/mG²)")
    gradient_series: Optional[GradientSeriesSection] = None
    trapping: Optional[TrappingSample] = None


class OutputSection(_Section):
    prefix: str = Field(default="morsekit", min_length=1)
    display: Literal["power", "amplitude"] = "power"

    @field_validator("prefix")
    @classmethod
    def validate_prefix(cls, v: str) -> str:
        if not re.fullmatch(r"[A-Za-z0-9_.-]+", v):
            raise ValueError("El prefijo solo admite letras, dígitos, '_', '-' y '.'")
        return v


# === CONFIGURACIÓN COMPLETA ===

class RunConfig(_Section):
    """Configuración versionada de una corrida."""

    schema_version: int = Field(...)
    species: SpeciesSection = Field(default_factory=SpeciesSection)
    model: Optional[ModelSection] = None
    grid: GridSection = Field(default_factory=GridSection)
    noise: NoiseSection = Field(default_factory=NoiseSection)
    pulses: Optional[PulsesSection] = None
    fit: FitSection = Field(default_factory=FitSection)
    estimate: Optional[EstimateSection] = None
    output: OutputSection = Field(default_factory=OutputSection)

    _source_path: Optional[str] = PrivateAttr(default=None)
    _digest: Optional[str] = PrivateAttr(default=None)

    @field_validator("schema_version")
    @classmethod
    def validate_schema(cls, v: int) -> int:
        if v != SCHEMA_VERSION:
            raise ValueError(f"schema_version {v} no soportada (se espera {SCHEMA_VERSION})")
        return v

    @property
    def source_path(self) -> Optional[str]:
        return self._source_path

    @property
    def digest(self) -> Optional[str]:
        """SHA-256 de los bytes del archivo de configuración."""
        return self._digest

    def with_seed(self, seed: Optional[int]) -> "RunConfig":
        """Copia con `noise.seed` sobreescrito (opción --seed)."""
        if seed is None:
            return self
        updated = self.model_copy(update={"noise": self.noise.model_copy(update={"seed": seed})})
        updated._source_path = self._source_path
        updated._digest = self._digest
        return updated

    def require(self, section: str) -> Any:
        value = getattr(self, section)
        if value is None:
            raise ConfigError(f"Falta la sección [{section}]", path=self._source_path)
        return value


# === CARGA ===

_TOML_LINE = re.compile(r"at line (\d+)")


def locate_key(text: str, loc: Tuple[Any, ...]) -> Optional[int]:
    """
    Línea (1-based) de la clave indicada por `loc` de pydantic. Cae a la
    cabecera de la tabla, y si no existe, a None.
    """
    keys = [str(k) for k in loc if not isinstance(k, int)]
    if not keys:
        return None
    table = ""
    header_line = None
    target_table = ".".join(keys[:-1])
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        header = re.fullmatch(r"\[\[?\s*([^\]]+?)\s*\]\]?", line)
        if header:
            table = header.group(1)
            if table == ".".join(keys):
                header_line = header_line or number
            if table == target_table and header_line is None and len(keys) > 1:
                header_line = number
            continue
        key = re.match(r"([A-Za-z0-9_\-\"]+)\s*=", line)
        if key and table == target_table and key.group(1).strip('"') == keys[-1]:
            return number
        # claves en línea: [model] ... probe = { intensity = ... }
        if key and len(keys) > 1 and ".".join(filter(None, [table, key.group(1)])) in {".".join(keys[:i]) for i in range(1, len(keys))}:
            if re.search(rf"\b{re.escape(keys[-1])}\s*=", line):
                return number
    return header_line


def parse_config(text: str, path: Optional[str] = None) -> RunConfig:
    """Valida el texto TOML y devuelve la configuración."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        match = _TOML_LINE.search(str(e))
        raise ConfigError(f"TOML inválido: {e}", line=int(match.group(1)) if match else None, path=path)

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(k) for k in first["loc"])
        raise ConfigError(
            f"{location}: {first['msg']}",
            line=locate_key(text, tuple(first["loc"])),
            path=path,
            errors=len(e.errors()),
        )


def load_config(path: str) -> RunConfig:
    """
    Lee y valida un `.cfg`; guarda la ruta y el SHA-256 de los bytes.

    Raises:
        ConfigError: Archivo inexistente, TOML inválido o esquema no válido
    """
    from utils.io_utils import sha256_bytes

    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigError("El archivo de configuración no existe", path=str(path))
    raw = config_path.read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise ConfigError("El archivo no está en UTF-8", path=str(path))

    config = parse_config(text, path=str(path))
    config._source_path = str(path)
    config._digest = sha256_bytes(raw)
    return config
