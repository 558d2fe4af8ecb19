# Pipeline de ajuste: lectura de traza → semilla → ajuste → reporte
import logging
import traceback
from pathlib import Path
from typing import Any, Dict, Optional

from langgraph.graph import StateGraph, END

from models.config import RunConfig
from models.state import FitPipelineState, FitSettings, TraceInfo
from nodes import trace_ingestion_node, initialization_node, fitting_node, report_node

logger = logging.getLogger("Pipeline")


class FitPipeline:

    def __init__(self):
        self.app = None
        self.initialize_pipeline()

    def initialize_pipeline(self):
        """Inicializar grafo lineal de cuatro nodos."""
        try:
            workflow = StateGraph(FitPipelineState)

            workflow.add_node("trace_ingestion", trace_ingestion_node)
            workflow.add_node("initialization", initialization_node)
            workflow.add_node("fitting", fitting_node)
            workflow.add_node("report", report_node)

            workflow.set_entry_point("trace_ingestion")
            workflow.add_edge("trace_ingestion", "initialization")
            workflow.add_edge("initialization", "fitting")
            workflow.add_edge("fitting", "report")
            workflow.add_edge("report", END)

            self.app = workflow.compile()
            logger.info("Pipeline de ajuste inicializado correctamente")

        except Exception as e:
            logger.error(f"Error inicializando pipeline: {e}")
            logger.error(traceback.format_exc())
            raise

    def run(self, trace_path: str, config: Optional[RunConfig] = None) -> FitPipelineState:
        """
        Ejecuta el ajuste de forma síncrona (CLI).

        Args:
            trace_path: Ruta del CSV de la traza.
            config: Configuración de la corrida; sin ella se usan los valores por defecto.

        Returns:
            Estado final; `status` vale FAILED si algún nodo falló.
        """
        logger.info(f"Iniciando ajuste de: {trace_path}")
        final_state = self.app.invoke(self.create_initial_state(trace_path, config))
        return self._as_state(final_state)

    async def process(self, trace_path: str, config: Optional[RunConfig] = None) -> Dict[str, Any]:
        """
        Ejecuta el ajuste de forma asíncrona (servicio).

        Returns:
            Dict con control, reporte y detalles de error si los hay.
        """
        try:
            final_state = self._as_state(await self.app.ainvoke(self.create_initial_state(trace_path, config)))
        except Exception as e:
            logger.error(f"Error en pipeline: {e}")
            logger.error(traceback.format_exc())
            return None

        result = {
            "processing_control": {
                "status": "FAILED" if final_state.status == "FAILED" else "COMPLETED",
                "processing_stage": final_state.processing_stage,
            },
            "report": final_state.report,
        }
        if final_state.status == "FAILED":
            logger.error("Pipeline falló durante el ajuste")
            result["error_details"] = {
                "errors": final_state.logging.errors,
                "warnings": final_state.logging.warnings,
                "last_stage": final_state.processing_stage,
                "exit_code": final_state.logging.error_code,
            }
        else:
            logger.info("Ajuste completado exitosamente")
        return result

    def create_initial_state(self, trace_path: str, config: Optional[RunConfig] = None) -> FitPipelineState:
        """Estado inicial a partir de la ruta de la traza y la sección [fit]."""
        fit_settings = FitSettings()
        digest = None
        if config is not None:
            section = config.fit
            species = config.species.to_species()
            fit_settings = FitSettings(
                free_parameters=section.free,
                fixed_values=section.fixed,
                initial=section.initial,
                bounds={k: list(v) for k, v in section.bounds.items()},
                weights=section.weights,
                weight_floor=section.weight_floor,
                population_coordinate=section.population_coordinate,
                restarts=section.restarts,
                F=config.model.F if config.model is not None else species.upper_f,
                hyperfine_splitting=species.hyperfine_splitting,
            )
            digest = config.digest
        return FitPipelineState(
            trace_info=TraceInfo(file_path=str(trace_path), filename=Path(trace_path).name),
            fit_settings=fit_settings,
            config_digest=digest,
        )

    @staticmethod
    def _as_state(final_state: Any) -> FitPipelineState:
        if isinstance(final_state, FitPipelineState):
            return final_state
        return FitPipelineState.model_validate(dict(final_state))
