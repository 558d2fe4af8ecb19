"""
morsekit: simulación y ajuste de señales de resonancia magneto-óptica.

Uso:
    python morsekit.py simulate|fit|pulsed|estimate --config <ruta> [--trace <ruta>] [--out <dir>] [--seed <u64>]

Códigos de salida: 0 ok, 2 configuración, 3 traza mal formada, 4 sin
convergencia, 5 singularidad numérica, 6 inicialización/estimación.
"""

import argparse
import logging
import sys
import traceback
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from dotenv import load_dotenv
from pydantic import ValidationError

from models.config import RunConfig, load_config
from models.errors import ConvergenceError, EstimationError, MorsekitError
from models.settings import settings
from models.species import MU_B_HZ_PER_GAUSS
from utils.broadening_utils import (
    critical_density,
    fit_gradient_series,
    gradient_broadening,
    photon_scattering_rate,
    resolution_criterion,
)
from utils.io_utils import (
    atomic_write_text,
    diagnostics_to_csv,
    provenance,
    write_json,
    write_manifest,
    write_trace_csv,
)
from utils.pulsed_utils import area_width_estimate, ripple_period, ripple_spacing, simulate_pulsed
from utils.spectrum_utils import add_gaussian_noise, dc_faraday, display_amplitude, frequency_grid, mors
from utils.spin_utils import line_table
from utils.zeeman_utils import g_factor, qz_splitting, zeeman_levels

logger = logging.getLogger("MorseKit")

COMMANDS = ("simulate", "fit", "pulsed", "estimate")


def configure_logging() -> None:
    """Formato común de logging y archivo opcional según settings."""
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if settings.enable_file_logging:
        handlers.append(logging.FileHandler(settings.log_file_path, encoding="utf-8"))
    logging.basicConfig(
        level=getattr(logging, settings.log_level),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )


def _out_path(out_dir: str, config: RunConfig, suffix: str) -> str:
    return str(Path(out_dir) / f"{config.output.prefix}_{suffix}")


def _grid_for(config: RunConfig, model) -> np.ndarray:
    grid = config.grid
    points = grid.points or settings.default_grid_points
    if grid.start is not None:
        return np.linspace(grid.start, grid.stop, points)
    return frequency_grid(model, span=grid.span, points=points)


# === COMANDOS ===

def cmd_simulate(config: RunConfig, out_dir: str = ".", seed: Optional[int] = None) -> Dict[str, Any]:
    """Espectro MORS cw del modelo de la configuración (con ruido opcional)."""
    config = config.with_seed(seed)
    species = config.species.to_species()
    model = config.require("model").to_spin_model(species)
    grid = _grid_for(config, model)

    trace, _ = mors(model, grid)
    if config.noise.kind == "gaussian":
        trace = add_gaussian_noise(trace, config.noise.level, config.noise.seed)
        logger.info(f"Ruido gaussiano σ = {config.noise.level:g}·max, semilla {config.noise.seed}")

    files = [write_trace_csv(_out_path(out_dir, config, "spectrum.csv"), trace, config.digest)]
    if config.output.display == "amplitude":
        files.append(
            write_trace_csv(_out_path(out_dir, config, "display.csv"), trace, config.digest, display_amplitude(trace))
        )

    report = {
        "model": model.model_dump(),
        "derived": {
            "orientation": model.orientation,
            "j_z": model.j_z,
            "atom_number": model.atom_number,
            "dc_faraday": dc_faraday(model.populations, model.atom_number),
            "peak_value": float(np.max(trace.values)),
        },
        "lines": line_table(model),
        "grid": {"start": float(grid[0]), "stop": float(grid[-1]), "points": int(grid.size)},
        "provenance": provenance(config.digest, seed=config.noise.seed),
    }
    files.append(write_json(_out_path(out_dir, config, "simulate.json"), report))
    files.append(write_manifest(out_dir, "simulate", config.source_path, config.digest, files, config.noise.seed))
    logger.info(f"Simulación completa: p = {model.orientation:.4f}, {grid.size} puntos")
    return {"files": [str(f) for f in files], "report": report}


def cmd_fit(config: RunConfig, trace_path: str, out_dir: str = ".") -> Dict[str, Any]:
    """
    Ajuste de una traza a través del pipeline. Los archivos se escriben
    también cuando el ajuste no converge; luego se propaga el error.
    """
    from pipeline import FitPipeline

    state = FitPipeline().run(trace_path, config)
    files = []
    if state.report:
        files.append(write_json(_out_path(out_dir, config, "fit.json"), state.report))
    if state.result is not None and state.trace is not None and config.fit.write_model:
        model_trace, _ = mors(state.result.model, state.trace.frequencies)
        residual = model_trace.values - state.trace.values
        files.append(write_trace_csv(_out_path(out_dir, config, "model.csv"), model_trace, config.digest))
        files.append(write_trace_csv(_out_path(out_dir, config, "residual.csv"), state.trace, config.digest, residual))
    if files:
        files.append(write_manifest(out_dir, "fit", config.source_path, config.digest, files))

    if state.status == "FAILED":
        error = MorsekitError("; ".join(state.log_summary()["errors"]) or "El ajuste falló")
        error.exit_code = state.logging.error_code or 1
        raise error
    return {"files": [str(f) for f in files], "report": state.report}


def cmd_pulsed(config: RunConfig, out_dir: str = ".") -> Dict[str, Any]:
    """Espectro de la secuencia pulsada en estado periódico y su diagnóstico."""
    section = config.require("pulses")
    schedule = section.to_schedule()
    points = section.points or settings.default_grid_points
    half = 0.5 * section.span
    grid = np.linspace(schedule.center_frequency - half, schedule.center_frequency + half, points)

    trace, diagnostics = simulate_pulsed(schedule, grid)
    nominal = ripple_period(schedule)
    report = {
        "schedule": schedule.model_dump(),
        "period_s": schedule.period,
        "ripple_nominal_hz": nominal,
        "ripple_measured_hz": ripple_spacing(trace, nominal),
        "diagnostics": diagnostics.summary(),
        "provenance": provenance(config.digest),
    }
    try:
        report["area_width"] = area_width_estimate(trace).model_dump()
    except EstimationError as e:
        logger.warning(f"Sin estimación área-ancho: {e}")
        report["area_width"] = None

    files = [
        write_trace_csv(_out_path(out_dir, config, "pulsed.csv"), trace, config.digest),
        atomic_write_text(_out_path(out_dir, config, "pulsed_diagnostics.csv"), diagnostics_to_csv(diagnostics, config.digest)),
        write_json(_out_path(out_dir, config, "pulsed.json"), report),
    ]
    files.append(write_manifest(out_dir, "pulsed", config.source_path, config.digest, files))

    if not diagnostics.all_converged:
        raise ConvergenceError(
            f"{int(np.count_nonzero(~diagnostics.converged))} frecuencias sin estado periódico "
            f"tras {settings.pulsed_max_cycles} ciclos",
            diagnostics=diagnostics.summary(),
        )
    return {"files": [str(f) for f in files], "report": report}


def cmd_estimate(config: RunConfig, out_dir: str = ".") -> Dict[str, Any]:
    """Estimadores de orden de magnitud para cada bloque presente en [estimate]."""
    section = config.require("estimate")
    species = config.species.to_species()
    g_f = g_factor(species, section.F)

    estimates = []
    if section.probe is not None:
        estimates.append(photon_scattering_rate(section.probe, far_detuned=section.far_detuned))
    if section.cell is not None:
        estimates.append(gradient_broadening(section.cell, g_f))
        estimates.append(
            resolution_criterion(section.cell, g_f, species.hyperfine_splitting, coefficient=section.gradient_coefficient)
        )
    if section.gradient_series is not None:
        estimates.append(fit_gradient_series(section.gradient_series.gradients, section.gradient_series.widths))
    if section.trapping is not None:
        estimates.append(critical_density(section.trapping))
    if not estimates:
        raise EstimationError("La sección [estimate] no contiene ningún bloque (probe, cell, gradient_series, trapping)")

    report = {
        "g_factor": g_f,
        "g_factors": {
            f"{F:g}": g_factor(species, F) for F in (species.upper_f, species.lower_f)
        },
        "estimates": {estimate.name: estimate.model_dump() for estimate in estimates},
        "provenance": provenance(config.digest),
    }
    if section.cell is not None:
        field = section.cell.bias_field
        larmor = abs(g_f) * MU_B_HZ_PER_GAUSS * field
        report["zeeman"] = {
            "bias_field_gauss": field,
            "larmor_hz": larmor,
            "qz_splitting_hz": float(qz_splitting(larmor, species.hyperfine_splitting)),
            "levels": [level.model_dump() for level in zeeman_levels(species, field)],
        }
    files = [write_json(_out_path(out_dir, config, "estimate.json"), report)]
    files.append(write_manifest(out_dir, "estimate", config.source_path, config.digest, files))
    return {"files": [str(f) for f in files], "report": report}


# === ENTRADA ===

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="morsekit", description="Simulación y ajuste de espectros MORS")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="Archivo de configuración TOML (.cfg)")
    parser.add_argument("--trace", default=None, help="Traza CSV a ajustar (fit)")
    parser.add_argument("--out", default=".", help="Directorio de salida")
    parser.add_argument("--seed", type=int, default=None, help="Sobrescribe noise.seed")
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Ejecuta la CLI y devuelve el código de salida."""
    args = build_parser().parse_args(argv)
    if args.seed is not None and not 0 <= args.seed < 2**64:
        logger.error("--seed debe ser un entero sin signo de 64 bits")
        return 2

    try:
        config = load_config(args.config)
        Path(args.out).mkdir(parents=True, exist_ok=True)
        if args.command == "simulate":
            outcome = cmd_simulate(config, args.out, args.seed)
        elif args.command == "fit":
            if not args.trace:
                logger.error("El comando fit requiere --trace")
                return 2
            outcome = cmd_fit(config, args.trace, args.out)
        elif args.command == "pulsed":
            outcome = cmd_pulsed(config, args.out)
        else:
            outcome = cmd_estimate(config, args.out)

        for path in outcome["files"]:
            print(path)
        return 0

    except MorsekitError as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        logger.error(f"Valores inválidos: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.error(f"Error inesperado: {e}")
        logger.error(traceback.format_exc())
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    load_dotenv()
    configure_logging()
    sys.exit(run())
