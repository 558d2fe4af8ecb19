import logging
import time
import traceback

from pydantic import ValidationError

from models.errors import ConvergenceError, MorsekitError
from models.fit import FitProblem
from models.state import FitPipelineState
from utils.fit_utils import fit, weights_for

logger = logging.getLogger("Fitting")


def fitting_node(state: FitPipelineState) -> FitPipelineState:
    """
    Ajuste por mínimos cuadrados ponderados desde la semilla.

    Un ajuste que no converge deja el resultado en el estado (para el
    reporte) y marca el estado como FAILED con código 4.
    """
    if state.status == "FAILED":
        logger.warning("Saltando ajuste: el estado ya falló")
        return state

    logger.info("Iniciando ajuste")
    state = state.update_stage("fitting")
    start_time = time.time()

    try:
        options = state.fit_settings
        problem = FitProblem(
            trace=state.trace,
            free_parameters=options.free_parameters,
            fixed_values=options.fixed_values,
            initial=state.initial_parameters,
            weights=weights_for(state.trace, options.weights, options.weight_floor),
            bounds={k: tuple(v) for k, v in options.bounds.items()},
            F=options.F,
            population_coordinate=options.population_coordinate,
            restarts=options.restarts,
        )
        result = fit(problem)
        state.result = result
        logger.info(f"Ajuste terminado en {time.time() - start_time:.2f}s")

        state = state.add_message(
            f"Ajuste: {result.iterations} evaluaciones, "
            f"{result.restarts_used} reinicios, residuo relativo {result.relative_residual:.3e}"
        )
        if result.degenerate:
            state = state.add_warning(
                "Sensibilidades casi colineales: parámetros no identificables por separado (régimen no resuelto)"
            )
        if not result.converged:
            error = ConvergenceError(f"El ajuste no convergió: {result.message}")
            return state.add_error(str(error), exit_code=error.exit_code)
        return state

    except MorsekitError as e:
        logger.error(f"Ajuste fallido: {e}")
        return state.add_error(f"Ajuste fallido: {e}", exit_code=e.exit_code)
    except ValidationError as e:
        logger.error(f"Problema de ajuste inválido: {e}")
        return state.add_error(f"Problema de ajuste inválido: {e}", exit_code=2)
    except Exception as e:
        logger.error(f"Error en ajuste: {e}")
        logger.error(traceback.format_exc())
        return state.add_error(f"Error en ajuste: {e}", exit_code=4)
