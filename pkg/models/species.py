"""
Especies atómicas: espín nuclear, desdoblamiento hiperfino y momentos magnéticos
del estado fundamental de un alcalino.
"""

from typing import Dict

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# === CONSTANTES COMPILADAS (Hz/G) ===
# μ_B/h y μ_N/h en valores CODATA redondeados; todas las energías del
# toolkit se guardan como frecuencias.
MU_B_HZ_PER_GAUSS = 1.399624604e6
MU_N_HZ_PER_GAUSS = 762.2593
MU_N_OVER_MU_B = MU_N_HZ_PER_GAUSS / MU_B_HZ_PER_GAUSS

GAUSS_PER_TESLA = 1.0e4


def _is_half_integer_multiple(value: float) -> bool:
    return abs(2.0 * value - round(2.0 * value)) < 1e-12


class AtomSpecies(BaseModel):
    """Parámetros del Hamiltoniano hiperfino + Zeeman de un estado S."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(default="custom", description="Nombre de la especie")
    nuclear_spin: float = Field(..., gt=0.0, description="Espín nuclear I")
    hyperfine_splitting: float = Field(..., gt=0.0, description="ν_hfs en Hz")
    electron_moment: float = Field(..., description="μ_J en unidades de μ_B (con signo)")
    nuclear_moment: float = Field(..., description="μ_I en unidades de μ_N (con signo)")
    electron_j: float = Field(default=0.5, gt=0.0, description="J electrónico (1/2 para estados S)")

    @field_validator("nuclear_spin", "electron_j")
    @classmethod
    def validate_half_integer(cls, v: float) -> float:
        if not _is_half_integer_multiple(v):
            raise ValueError(f"{v} no es entero ni semientero")
        return float(v)

    @model_validator(mode="after")
    def validate_s_state(self) -> "AtomSpecies":
        if abs(self.electron_j - 0.5) > 1e-12:
            raise ValueError("Solo se soportan estados fundamentales con J = 1/2")
        return self

    # === PROPIEDADES DERIVADAS ===

    @property
    def upper_f(self) -> float:
        return self.nuclear_spin + 0.5

    @property
    def lower_f(self) -> float:
        return self.nuclear_spin - 0.5

    @property
    def multiplicity(self) -> int:
        """2I + 1."""
        return int(round(2.0 * self.nuclear_spin + 1.0))

    @property
    def electron_g(self) -> float:
        """g_J = −μ_J/J (μ_B)."""
        return -self.electron_moment / self.electron_j

    @property
    def nuclear_g(self) -> float:
        """g_I = −μ_I/I expresado en μ_B."""
        return -self.nuclear_moment * MU_N_OVER_MU_B / self.nuclear_spin


class ZeemanLevel(BaseModel):
    """Subnivel |F, m> con su energía en Hz."""

    model_config = ConfigDict(frozen=True)

    F: float
    m: float
    energy: float = Field(..., description="E/h en Hz")


# === PRESETS ===

CESIUM = AtomSpecies(
    name="cesium",
    nuclear_spin=3.5,
    hyperfine_splitting=9.1926e9,
    electron_moment=-1.0011596521869,
    nuclear_moment=2.582025,
    electron_j=0.5,
)

RUBIDIUM87 = AtomSpecies(
    name="rubidium87",
    nuclear_spin=1.5,
    hyperfine_splitting=6.834682610904e9,
    electron_moment=-1.0011596521869,
    nuclear_moment=2.751818,
    electron_j=0.5,
)

SPECIES_PRESETS: Dict[str, AtomSpecies] = {
    "cesium": CESIUM,
    "cs": CESIUM,
    "rubidium87": RUBIDIUM87,
    "rb87": RUBIDIUM87,
}


def get_species(name: str) -> AtomSpecies:
    """Devuelve un preset por nombre (sin distinguir mayúsculas)."""
    key = name.strip().lower()
    if key not in SPECIES_PRESETS:
        available = ", ".join(sorted(SPECIES_PRESETS))
        raise KeyError(f"Especie desconocida '{name}'. Disponibles: {available}")
    return SPECIES_PRESETS[key]
