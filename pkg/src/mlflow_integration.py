# src/mlflow_integration.py
"""
Integración de MLflow para los experimentos DDG.

- Usa la carpeta 'mlruns/' en el directorio raíz del proyecto (como 'resultados/').
- Construye el tracking URI con Path(...).as_uri() para que sea portable (Windows/Linux).
- Provee un tracker con helpers para registrar la configuración resuelta,
  métricas por nivel de malla, información del sistema y artefactos.
"""

from __future__ import annotations

import logging
import platform
import time
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

import mlflow
import psutil

LOGGER = logging.getLogger(__name__)


class DDGMLflowTracker:
    """Tracker de MLflow especializado en corridas y estudios de convergencia DDG."""

    def __init__(
        self,
        experiment_name: str = "DDG-Difusion",
        tracking_subdir: str = "mlruns",
    ):
        """Inicializa el tracker de MLflow usando 'mlruns/' en el raíz del proyecto."""
        self.experiment_name = experiment_name

        root = Path(__file__).resolve().parents[1]
        mlruns_dir = (root / tracking_subdir).resolve()
        mlruns_dir.mkdir(exist_ok=True)

        mlflow.set_tracking_uri(mlruns_dir.as_uri())
        mlflow.set_experiment(experiment_name)

        self.run_id: Optional[str] = None
        self.start_time: Optional[float] = None
        self.levels_logged = 0

        LOGGER.info("🔧 MLflow tracking: %s  |  exp: %s", mlruns_dir.as_uri(), experiment_name)

    # ------------------------------------------------------------------
    # Runs
    # ------------------------------------------------------------------
    def start_experiment_run(self, config, tags: Dict[str, Any] | None = None) -> str:
        """Inicia un run (cierra el anterior si existía)."""
        if self.run_id is not None:
            self.end_experiment_run()

        default_tags = {
            "mlflow.source.type": "LOCAL",
            "mlflow.source.name": "ddg_difusion",
            "model": str(getattr(config, "model", "")),
            "variant": str(getattr(config, "variant", "")),
            "task_type": "nonlinear_diffusion",
            "timestamp": datetime.now().isoformat(),
        }
        if tags:
            default_tags.update(tags)

        run = mlflow.start_run(run_name=getattr(config, "display_name", None), tags=default_tags)
        self.run_id = run.info.run_id
        self.start_time = time.time()

        self._log_configuration_parameters(config)
        LOGGER.info("🚀 MLflow Run: %s", self.run_id)
        return self.run_id

    def end_experiment_run(self, status: str = "FINISHED") -> None:
        """Finaliza el run actual y limpia estado interno."""
        if not self.run_id:
            return
        try:
            if self.start_time:
                mlflow.log_metric("total_experiment_duration_seconds", time.time() - self.start_time)
            mlflow.end_run(status=status)
            LOGGER.info("🏁 Run finalizado (%s)", status)
        finally:
            self.run_id = None
            self.start_time = None
            self.levels_logged = 0

    # ------------------------------------------------------------------
    # Parámetros
    # ------------------------------------------------------------------
    def _log_configuration_parameters(self, config) -> None:
        """Registra los campos de RunConfig (las listas como texto)."""
        data = config.to_dict() if hasattr(config, "to_dict") else dict(vars(config))
        params = {
            key: ",".join(str(v) for v in value) if isinstance(value, (list, tuple)) else value
            for key, value in data.items()
        }
        mlflow.log_params(params)

    def log_system_info(self) -> None:
        """Registra CPU, memoria y plataforma como parámetros."""
        if not self.run_id:
            return
        memory = psutil.virtual_memory()
        mlflow.log_params(
            {
                "cpu_count": psutil.cpu_count(),
                "memory_total_gb": round(memory.total / (1024**3), 2),
                "memory_available_gb": round(memory.available / (1024**3), 2),
                "memory_used_percent": memory.percent,
                "platform_system": platform.system(),
                "platform_release": platform.release(),
                "python_version": platform.python_version(),
            }
        )

    # ------------------------------------------------------------------
    # Métricas
    # ------------------------------------------------------------------
    def log_level_metrics(
        self,
        level: int,
        l2_error: float | None = None,
        linf_error: float | None = None,
        l2_order: float | None = None,
        linf_order: float | None = None,
        steps: int | None = None,
        restarts: int | None = None,
        wall_seconds: float | None = None,
    ) -> None:
        """Métricas de un nivel de malla; el step de MLflow es n por lado."""
        if not self.run_id:
            return
        candidates = {
            "l2_error": l2_error,
            "linf_error": linf_error,
            "l2_order": l2_order,
            "linf_order": linf_order,
            "steps": steps,
            "restarts": restarts,
            "wall_seconds": wall_seconds,
        }
        metrics = {name: float(v) for name, v in candidates.items() if v is not None}
        if metrics:
            mlflow.log_metrics(metrics, step=int(level))
        self.levels_logged += 1

    def log_run_summary(self, final_time: float, steps: int, restarts: int, status: str) -> None:
        """Resumen de una integración individual."""
        if not self.run_id:
            return
        mlflow.log_metrics(
            {"final_time": float(final_time), "total_steps": float(steps), "total_restarts": float(restarts)}
        )
        mlflow.set_tag("final_status", status)

    def log_artifact(self, path: str | Path, artifact_path: str | None = None) -> None:
        """Sube un archivo existente; los errores se registran y no interrumpen."""
        if not self.run_id:
            return
        p = Path(path)
        if not p.exists():
            LOGGER.warning("⚠️ Artefacto inexistente: %s", p)
            return
        try:
            mlflow.log_artifact(str(p), artifact_path=artifact_path)
        except Exception as e:
            LOGGER.warning("⚠️ MLflow artifact error (%s): %s", p.name, e)


# ----------------------------------------------------------------------
# Helpers globales
# ----------------------------------------------------------------------
_global_tracker: Optional[DDGMLflowTracker] = None


def get_mlflow_tracker() -> DDGMLflowTracker:
    """Obtiene (o crea) la instancia global del tracker."""
    global _global_tracker
    if _global_tracker is None:
        _global_tracker = DDGMLflowTracker()
    return _global_tracker


def initialize_mlflow_tracking(
    experiment_name: str = "DDG-Difusion",
    tracking_subdir: str = "mlruns",
) -> DDGMLflowTracker:
    """Reinicia/crea el tracker global con experimento y carpeta dados."""
    global _global_tracker
    _global_tracker = DDGMLflowTracker(experiment_name, tracking_subdir)
    return _global_tracker
