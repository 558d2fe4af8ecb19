import logging
import traceback

from models.state import FitPipelineState
from utils.io_utils import fit_report

logger = logging.getLogger("Report")


def report_node(state: FitPipelineState) -> FitPipelineState:
    """Arma el reporte JSON; también se genera para ajustes no convergidos."""
    if state.result is None:
        logger.warning("Sin resultado de ajuste: no se genera reporte")
        return state

    state = state.update_stage("report")
    try:
        state.report = fit_report(
            state.result,
            state.config_digest,
            trace_digest=state.trace_info.sha256,
            pipeline_log=state.log_summary(),
            extra={
                "initial_parameters": dict(state.initial_parameters),
                "status": "FAILED" if state.status == "FAILED" else "COMPLETED",
            },
        )
        return state.add_message("Reporte generado")
    except Exception as e:
        logger.error(f"Error generando reporte: {e}")
        logger.error(traceback.format_exc())
        return state.add_error(f"Error generando reporte: {e}", exit_code=1)
