# src/runner.py
"""
Ejecución de una corrida DDG completa sobre un nivel de malla.

Incluye la clase `SimulationRunner`, que:
- Construye malla, modelo, esquema, operador y limitador desde `RunConfig`.
- Proyecta el dato inicial e integra con SSP-RK3 y reinicio.
- Escribe el registro de eventos en CSV (`;`, utf-8-sig) con fila SUMMARY.
- Calcula errores L₂/L∞ si el modelo tiene solución exacta.
- Exporta el campo final (CSV y opcionalmente VTK), la malla y perfiles.
- Registra parámetros y métricas en MLflow (opcional).
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from config import RunConfig
from ddg import DDGOperator, DGField, SchemeConfig, cell_averages, project_initial
from export import ExportError, export_field, export_profile, line_profile, profile_gap
from limiter import LimiterConfig, ScalingLimiter
from mesh import Mesh, build_uniform_mesh, export_mesh_csv
from models import DiffusionModel, build_model
from norms import l2_error, linf_error
from timestep import (
    BLOWUP,
    BLOWUP_DECLARED,
    COMPLETED,
    EVENT_HEADER,
    FAILED,
    IntegrationResult,
    StepEvent,
    TimeConfig,
    compute_dt,
    run_with_restart,
)
from utils import elapsed

LOGGER = logging.getLogger(__name__)

# Segmentos de perfil por modelo; el resto usa la horizontal central del dominio
PROFILE_SEGMENTS: dict[str, tuple[tuple[float, float], tuple[float, float]]] = {
    "bumps": ((-10.0, 10.0), (10.0, -10.0)),
    "block": ((-1.0, 0.0), (1.0, 0.0)),
}


def open_tracker(config: RunConfig):
    """Tracker de MLflow si está habilitado e instalado; None en otro caso."""
    if not config.enable_mlflow:
        return None
    try:
        from mlflow_integration import initialize_mlflow_tracking
    except ImportError:
        LOGGER.warning("⚠️ MLflow no está instalado. Las métricas no se registrarán.")
        return None
    try:
        return initialize_mlflow_tracking(config.experiment_name)
    except Exception as e:
        LOGGER.warning("⚠️ Error inicializando MLflow: %s", e)
        return None


def profile_segment(model: DiffusionModel) -> tuple[tuple[float, float], tuple[float, float]]:
    if model.name in PROFILE_SEGMENTS:
        return PROFILE_SEGMENTS[model.name]
    x0, y0 = model.origin
    yc = y0 + 0.5 * model.side
    return (x0, yc), (x0 + model.side, yc)


@dataclass
class RunResult:
    """Resultado de una corrida en un nivel de malla."""

    config: RunConfig
    n: int
    mesh: Mesh
    field: DGField
    status: str
    time: float
    steps: int
    restarts: int
    message: str = ""
    l2_error: Optional[float] = None
    linf_error: Optional[float] = None
    wall_seconds: float = 0.0
    event_log: Optional[Path] = None
    exports: list[Path] = field(default_factory=list)

    @property
    def blowup_time(self) -> Optional[float]:
        return self.time if self.status == BLOWUP_DECLARED else None

    @property
    def ok(self) -> bool:
        """Terminó en T, o declaró blow-up en un experimento de blow-up."""
        if self.status == COMPLETED:
            return True
        return self.status == BLOWUP_DECLARED and self.config.cfl_mode == BLOWUP


class SimulationRunner:
    """Prepara y ejecuta una integración DDG para un nivel de malla."""

    def __init__(
        self,
        config: RunConfig,
        n: int | None = None,
        on_error: Callable[[str], None] | None = None,
        on_progress: Callable[[float], None] | None = None,
        on_event: Callable[[StepEvent], None] | None = None,
        tracker: Any = None,
        write_outputs: bool = True,
    ) -> None:
        """Construye todos los objetos numéricos (los errores de entrada se propagan).

        Raises:
            ConfigError / ValueError: Configuración o parámetros inválidos.
        """
        self.config = config.resolved().validate()
        self.n = int(n if n is not None else self.config.levels[0])
        self.on_error = on_error
        self.on_progress = on_progress
        self.on_event = on_event
        self.tracker = tracker
        self.write_outputs = write_outputs

        cfg = self.config
        self.model = build_model(cfg.model, cfg.mu, cfg.gamma_exp)
        self.mesh = build_uniform_mesh(
            self.n, side=self.model.side, origin=self.model.origin, boundary_kind=self.model.boundary_kind
        )
        self.scheme = SchemeConfig.with_defaults(cfg.variant, cfg.k, cfg.beta0, cfg.beta1, cfg.beta0v)
        self.exactness = cfg.quadrature_exactness(self.model.strongly_nonlinear)
        self.operator = DDGOperator(self.mesh, self.model, self.scheme, self.exactness)
        self.limiter = self._build_limiter()
        self.time_config = TimeConfig(
            cfl=cfg.cfl,
            final_time=cfg.final_time,
            cfl_mode=cfg.cfl_mode,
            restart_enabled=bool(cfg.restart),
            dt_floor=cfg.dt_floor,
            safety=cfg.safety,
            max_steps=cfg.max_steps,
        )

        self.output_dir = Path(cfg.output_dir) / cfg.display_name
        self.csv_fp = None
        self.csv_writer = None
        self._csv_path: Optional[Path] = None
        self._last_event: Optional[StepEvent] = None

    # ------------------------------------------------------------------
    # Construcción
    # ------------------------------------------------------------------
    def _build_limiter(self) -> Optional[ScalingLimiter]:
        cfg = self.config
        if not cfg.limiter:
            return None
        lower, upper = self.model.invariant_bounds or (-np.inf, np.inf)
        bounds = LimiterConfig(
            lower=lower if cfg.limiter_lower is None else cfg.limiter_lower,
            upper=upper if cfg.limiter_upper is None else cfg.limiter_upper,
        )
        return ScalingLimiter(self.scheme.k, self.operator.volume_rule, self.operator.edge_rule, bounds)

    def initial_field(self) -> DGField:
        """Proyección L² de U₀ (limitada si hay limitador)."""
        field_ = project_initial(
            self.mesh, self.scheme.k, self.model.initial_data, max(self.exactness, 2 * self.scheme.k + 1)
        )
        if self.limiter is not None:
            field_ = field_.with_coefficients(self.limiter.apply(field_.coefficients))
        return field_

    def dt_rule(self, coefficients: np.ndarray, t: float) -> float:
        """Δt CFL para el estado actual, recortado a T."""
        cfg = self.time_config
        if cfg.cfl_mode == BLOWUP:
            return compute_dt(
                self.mesh,
                self.model,
                self.operator.omega,
                cfg.cfl,
                BLOWUP,
                cfg.safety,
                max_average=float(np.max(cell_averages(coefficients))),
                t=t,
                final_time=cfg.final_time,
            )
        u_range = None
        if not self.model.linear:
            values = self.operator.values_at_quadrature(coefficients)
            u_range = (float(np.min(values)), float(np.max(values)))
        return compute_dt(
            self.mesh,
            self.model,
            self.operator.omega,
            cfg.cfl,
            cfg.cfl_mode,
            cfg.safety,
            u_range=u_range,
            t=t,
            final_time=cfg.final_time,
        )

    # ------------------------------------------------------------------
    # Utilidades internas
    # ------------------------------------------------------------------
    def _notify_error(self, msg: str) -> None:
        """Notifica un error al callback o lo registra en el log."""
        if self.on_error:
            try:
                self.on_error(msg)
                return
            except Exception:
                pass
        LOGGER.error(msg)

    # ------------------------------------------------------------------
    # CSV de eventos
    # ------------------------------------------------------------------
    def _init_csv(self) -> None:
        """Abre el registro de eventos `eventos_n{n}.csv`."""
        if not self.write_outputs:
            return
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
            csv_path = self.output_dir / f"eventos_n{self.n}.csv"
            self.csv_fp = open(csv_path, "w", newline="", encoding="utf-8-sig")
            self.csv_writer = csv.writer(self.csv_fp, delimiter=";")
            self.csv_writer.writerow(EVENT_HEADER)
            self._csv_path = csv_path
        except OSError as e:
            self._notify_error(f"No se pudo inicializar CSV: {e}")

    def _write_event_rows(self, event: StepEvent) -> None:
        self._last_event = event
        LOGGER.debug("%s t=%.6e dt=%.3e max ū=%.6e", event.status, event.time, event.dt, event.max_average)
        if self.csv_writer:
            self.csv_writer.writerow(event.as_row())
        if self.on_progress and self.time_config.final_time > 0:
            try:
                self.on_progress(min(1.0, event.time / self.time_config.final_time))
            except Exception:
                pass
        if self.on_event:
            self.on_event(event)

    def _write_summary(self, result: IntegrationResult) -> None:
        """Fila final `SUMMARY` con tiempo, pasos, reinicios y estado."""
        if not self.csv_writer:
            return
        last = self._last_event
        self.csv_writer.writerow(
            [
                "SUMMARY",
                f"{result.time:.10e}",
                "-",
                result.total_restarts,
                f"{last.max_average:.10e}" if last else "-",
                f"{last.min_average:.10e}" if last else "-",
                f"{last.energy:.10e}" if last else "-",
                f"{last.mass:.10e}" if last else "-",
                result.status,
            ]
        )

    def _close_csv(self) -> None:
        if self.csv_fp:
            try:
                self.csv_fp.flush()
            finally:
                self.csv_fp.close()
                self.csv_fp = None
                self.csv_writer = None

    # ------------------------------------------------------------------
    # Salidas
    # ------------------------------------------------------------------
    def _write_config(self) -> Optional[Path]:
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
            path = self.output_dir / "config.json"
            path.write_text(json.dumps(self.config.to_dict(), indent=2, ensure_ascii=False), encoding="utf-8")
            return path
        except OSError as e:
            self._notify_error(f"No se pudo escribir config.json: {e}")
            return None

    def _export_outputs(self, field_: DGField) -> list[Path]:
        cfg = self.config
        paths: list[Path] = []
        try:
            paths.append(export_field(field_, self.mesh, self.output_dir / f"campo_n{self.n}.csv", cfg.export_resolution))
            paths.extend(export_mesh_csv(self.mesh, self.output_dir / f"malla_n{self.n}"))
        except (ExportError, OSError) as e:
            self._notify_error(str(e))
        if cfg.export_vtk:
            try:
                paths.append(
                    export_field(field_, self.mesh, self.output_dir / f"campo_n{self.n}.vtu", cfg.export_resolution)
                )
            except ExportError as e:
                self._notify_error(str(e))
        if cfg.export_profile:
            start, end = profile_segment(self.model)
            try:
                paths.append(export_profile(field_, self.mesh, start, end, self.output_dir / f"perfil_n{self.n}.csv"))
                _, _, values = line_profile(field_, self.mesh, start, end)
                LOGGER.info(
                    "Perfil %s→%s: min=%.3e max=%.3e hueco=%s",
                    start,
                    end,
                    float(np.min(values)),
                    float(np.max(values)),
                    "sí" if profile_gap(values) else "no",
                )
            except (ExportError, ValueError) as e:
                self._notify_error(str(e))
        return paths

    # ------------------------------------------------------------------
    # Ejecución
    # ------------------------------------------------------------------
    def run(self) -> RunResult:
        """Integra hasta T (o blow-up) y produce errores y salidas."""
        cfg = self.config
        own_tracker = False
        if self.tracker is None and cfg.enable_mlflow:
            self.tracker = open_tracker(cfg)
            own_tracker = self.tracker is not None
            if own_tracker:
                try:
                    self.tracker.start_experiment_run(cfg, tags={"level": str(self.n)})
                    self.tracker.log_system_info()
                except Exception as e:
                    LOGGER.warning("⚠️ Error iniciando run de MLflow: %s", e)
                    self.tracker, own_tracker = None, False

        LOGGER.info(
            "▶️ %s | %s k=%d | n=%d (%d elementos) | T=%g",
            self.model.name,
            self.scheme.variant.value,
            self.scheme.k,
            self.n,
            self.mesh.n_elements,
            cfg.final_time,
        )
        field0 = self.initial_field()
        self._init_csv()
        integration: Optional[IntegrationResult] = None
        with elapsed() as clock:
            try:
                integration = run_with_restart(
                    field0.coefficients,
                    self.time_config,
                    self.operator,
                    self.dt_rule,
                    self.limiter,
                    energy=self.operator.energy,
                    mass=self.operator.mass,
                    on_event=self._write_event_rows,
                )
            except Exception as e:
                self._notify_error(f"Fallo en la integración (n={self.n}): {e}")
                integration = IntegrationResult(field0.coefficients, 0.0, 0, FAILED, message=str(e))
            finally:
                if integration is not None:
                    self._write_summary(integration)
                self._close_csv()

        final = DGField(integration.coefficients, self.scheme.k, integration.time)
        result = RunResult(
            config=cfg,
            n=self.n,
            mesh=self.mesh,
            field=final,
            status=integration.status,
            time=integration.time,
            steps=integration.steps,
            restarts=integration.total_restarts,
            message=integration.message,
            wall_seconds=clock["seconds"],
            event_log=self._csv_path,
        )

        if integration.status == COMPLETED and self.model.has_exact_solution:
            result.l2_error = l2_error(final, self.mesh, self.model.exact_solution, integration.time)
            result.linf_error = linf_error(final, self.mesh, self.model.exact_solution, integration.time)

        if self.write_outputs:
            config_path = self._write_config()
            result.exports = self._export_outputs(final)
            if config_path is not None:
                result.exports.insert(0, config_path)

        self._log_result(result)
        if self.tracker is not None:
            self._track(result, own_tracker)
        return result

    def _log_result(self, result: RunResult) -> None:
        if result.status == BLOWUP_DECLARED:
            LOGGER.info("💥 Blow-up en t=%.6e tras %d pasos (%d reinicios)", result.time, result.steps, result.restarts)
        elif result.status == COMPLETED:
            if result.l2_error is not None:
                LOGGER.info(
                    "✅ n=%d: L2=%.3e  Linf=%.3e  (%d pasos, %.1f s)",
                    result.n,
                    result.l2_error,
                    result.linf_error,
                    result.steps,
                    result.wall_seconds,
                )
            else:
                LOGGER.info("✅ n=%d: t=%g alcanzado en %d pasos", result.n, result.time, result.steps)
        else:
            self._notify_error(f"Corrida n={self.n} terminó con estado {result.status}: {result.message}")

    def _track(self, result: RunResult, own_run: bool) -> None:
        try:
            self.tracker.log_level_metrics(
                result.n,
                l2_error=result.l2_error,
                linf_error=result.linf_error,
                steps=result.steps,
                restarts=result.restarts,
                wall_seconds=result.wall_seconds,
            )
            if own_run:
                self.tracker.log_run_summary(result.time, result.steps, result.restarts, result.status)
                for path in [result.event_log, *result.exports]:
                    if path is not None:
                        self.tracker.log_artifact(path, "resultados")
        except Exception as e:
            LOGGER.warning("⚠️ Error registrando en MLflow: %s", e)
        finally:
            if own_run:
                self.tracker.end_experiment_run("FINISHED" if result.ok else "FAILED")
