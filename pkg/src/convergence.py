# src/convergence.py
"""
Estudios de convergencia: una corrida por nivel de malla, errores L₂/L∞ y
órdenes entre niveles consecutivos.

La tabla se emite como CSV (`;`) y como texto alineado con columnas
n | h | L2 | orden | Linf | orden. El texto comienza con la configuración
resuelta, una línea `# clave = valor` por campo.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

from config import ConfigError, RunConfig
from models import build_model
from norms import ErrorReport
from runner import RunResult, SimulationRunner, open_tracker
from utils import format_float

LOGGER = logging.getLogger(__name__)

TABLE_HEADER = ["n", "h", "error_L2", "orden_L2", "error_Linf", "orden_Linf", "nota"]


@dataclass
class ConvergenceResult:
    """Reporte de errores, tabla formateada y rutas escritas."""

    report: ErrorReport
    table: str
    runs: list[RunResult] = field(default_factory=list)
    csv_path: Optional[Path] = None
    text_path: Optional[Path] = None

    @property
    def all_levels_ok(self) -> bool:
        return all(not note for note in self.report.notes)


def _format_order(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.2f}"


def format_table(report: ErrorReport, side: float, config: RunConfig | None = None) -> str:
    """Tabla de texto alineada; si se da `config`, se antepone su eco."""
    lines: list[str] = []
    if config is not None:
        for key, value in config.to_dict().items():
            lines.append(f"# {key} = {json.dumps(value, ensure_ascii=False)}")
        lines.append("")
    lines.append(f"{'n':>5}  {'h':>10}  {'L2':>10}  {'orden':>6}  {'Linf':>10}  {'orden':>6}")
    for i, n in enumerate(report.levels):
        row = (
            f"{n:>5}  {side / n:>10.4e}  {format_float(report.l2[i]):>10}  "
            f"{_format_order(report.l2_orders[i]):>6}  {format_float(report.linf[i]):>10}  "
            f"{_format_order(report.linf_orders[i]):>6}"
        )
        if report.notes[i]:
            row += f"  ({report.notes[i]})"
        lines.append(row)
    return "\n".join(lines) + "\n"


def write_table_csv(report: ErrorReport, side: float, path: str | Path) -> Path:
    """Escribe la tabla de errores en CSV (delimitador `;`)."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    l2_orders, linf_orders = report.l2_orders, report.linf_orders
    with open(out, "w", newline="", encoding="utf-8-sig") as fp:
        writer = csv.writer(fp, delimiter=";")
        writer.writerow(TABLE_HEADER)
        for i, n in enumerate(report.levels):
            writer.writerow(
                [
                    n,
                    f"{side / n:.6e}",
                    f"{report.l2[i]:.6e}",
                    "" if l2_orders[i] is None else f"{l2_orders[i]:.4f}",
                    f"{report.linf[i]:.6e}",
                    "" if linf_orders[i] is None else f"{linf_orders[i]:.4f}",
                    report.notes[i],
                ]
            )
    return out


def convergence_study(
    config: RunConfig,
    on_level: Callable[[RunResult], None] | None = None,
    write_outputs: bool = True,
) -> ConvergenceResult:
    """Corre todos los niveles de `config.levels` y arma el reporte.

    Un nivel que falla queda con errores NaN y una nota; los demás continúan.

    Raises:
        ConfigError: Si el modelo no tiene solución exacta o la configuración es inválida.
    """
    cfg = config.resolved().validate()
    model = build_model(cfg.model, cfg.mu, cfg.gamma_exp)
    if not model.has_exact_solution:
        raise ConfigError(f"El modelo {cfg.model!r} no tiene solución exacta; no admite estudio de convergencia")

    tracker = open_tracker(cfg)
    if tracker is not None:
        try:
            tracker.start_experiment_run(cfg, tags={"study": "convergence"})
            tracker.log_system_info()
        except Exception as e:
            LOGGER.warning("⚠️ Error iniciando run de MLflow: %s", e)
            tracker = None

    level_config = replace(cfg, enable_mlflow=False)
    report = ErrorReport()
    runs: list[RunResult] = []
    for n in cfg.levels:
        note = ""
        try:
            result = SimulationRunner(level_config, n, write_outputs=write_outputs).run()
            runs.append(result)
            if on_level is not None:
                on_level(result)
            if result.l2_error is None:
                note = f"{result.status}: {result.message}".strip(": ")
                l2, linf = math.nan, math.nan
            else:
                l2, linf = result.l2_error, result.linf_error
        except ConfigError:
            raise
        except Exception as e:
            LOGGER.warning("⚠️ Nivel n=%d falló: %s", n, e)
            note = f"error: {e}"
            l2, linf = math.nan, math.nan
        report.add(n, l2, linf, note)

    text = format_table(report, model.side, cfg)
    out = ConvergenceResult(report, text, runs)
    if write_outputs:
        out_dir = Path(cfg.output_dir) / cfg.display_name
        out.csv_path = write_table_csv(report, model.side, out_dir / "convergencia.csv")
        out.text_path = out_dir / "convergencia.txt"
        out.text_path.write_text(text, encoding="utf-8")
        LOGGER.info("📄 Tabla escrita en %s", out.text_path)

    if tracker is not None:
        try:
            for i, n in enumerate(report.levels):
                tracker.log_level_metrics(
                    n,
                    l2_error=report.l2[i] if math.isfinite(report.l2[i]) else None,
                    linf_error=report.linf[i] if math.isfinite(report.linf[i]) else None,
                    l2_order=report.l2_orders[i],
                    linf_order=report.linf_orders[i],
                )
            for path in (out.csv_path, out.text_path):
                if path is not None:
                    tracker.log_artifact(path, "tablas")
        except Exception as e:
            LOGGER.warning("⚠️ Error registrando en MLflow: %s", e)
        finally:
            tracker.end_experiment_run("FINISHED" if out.all_levels_ok else "FAILED")
    return out
