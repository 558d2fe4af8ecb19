import logging
import traceback

from models.errors import MorsekitError
from models.fit import PARAMETER_NAMES
from models.state import FitPipelineState
from utils.fit_utils import initialize

logger = logging.getLogger("Initialization")


def initialization_node(state: FitPipelineState) -> FitPipelineState:
    """Semilla de los seis parámetros: la de la configuración o la heurística de picos."""
    if state.status == "FAILED":
        logger.warning("Saltando inicialización: el estado ya falló")
        return state

    logger.info("Iniciando inicialización")
    state = state.update_stage("initialization")

    try:
        options = state.fit_settings
        given = dict(options.initial or {})
        if set(PARAMETER_NAMES) <= set(given) | set(options.fixed_values):
            seed = {name: given.get(name, options.fixed_values.get(name)) for name in PARAMETER_NAMES}
            state = state.add_message("Semilla tomada de la configuración")
        elif given:
            seed = initialize(state.trace, F=options.F, hyperfine_hz=options.hyperfine_splitting)
            seed.update(given)
            state = state.add_message("Semilla parcial de la configuración, completada con la heurística")
        else:
            seed = initialize(state.trace, F=options.F, hyperfine_hz=options.hyperfine_splitting)
            state = state.add_message("Semilla heurística a partir de los máximos de la traza")

        seed.update(options.fixed_values)
        state.initial_parameters = seed
        return state.add_message(
            "Semilla: " + ", ".join(f"{name}={value:.6g}" for name, value in seed.items())
        )

    except MorsekitError as e:
        logger.error(f"Inicialización fallida: {e}")
        return state.add_error(f"Inicialización fallida: {e}", exit_code=e.exit_code)
    except Exception as e:
        logger.error(f"Error en inicialización: {e}")
        logger.error(traceback.format_exc())
        return state.add_error(f"Error en inicialización: {e}", exit_code=6)
