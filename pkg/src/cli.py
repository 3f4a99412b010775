# src/cli.py
"""
Interfaz de línea de comandos (CLI) del solver DDG.

Subcomandos:
- `run`: una corrida en un nivel de malla, con registro de eventos y exportación.
- `convergence`: estudio de convergencia sobre `levels` (tablas CSV y texto).
- `stability`: estudio aleatorio de estabilidad de energía.
- `verify`: batería de invariantes.

La configuración sale de un archivo JSON/TOML (`--config`) más overrides
`--set clave=valor`. Códigos de salida: 0 éxito, 1 fallo numérico o de
chequeo, 2 entrada inválida.
"""

from __future__ import annotations

import argparse
from argparse import Namespace
from pathlib import Path

from config import ConfigError, RunConfig, apply_overrides, load_config
from convergence import convergence_study
from models import MODEL_FACTORIES, build_model
from runner import SimulationRunner
from utils import LOG_LEVELS, setup_logging
from verify import energy_stability_study, run_checks

COMMANDS = ("run", "convergence", "stability", "verify")


def _common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, default=None, help="Archivo de configuración (.json o .toml)")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="CLAVE=VALOR",
        help="Override de un campo de configuración (repetible), ej. --set k=3",
    )
    parser.add_argument("--model", type=str, default=None, choices=sorted(MODEL_FACTORIES), help="Modelo a resolver")
    parser.add_argument(
        "--variant",
        type=str,
        default=None,
        choices=["baseline", "ddgic", "symmetric", "nonsymmetric"],
        help="Variante del esquema DDG",
    )
    parser.add_argument("-k", "--degree", dest="k", type=int, default=None, help="Grado polinomial (0–4)")
    parser.add_argument("--output-dir", type=str, default=None, help="Carpeta destino de resultados")
    parser.add_argument("--mlflow", action="store_true", help="Registrar la corrida en MLflow (mlruns/)")
    parser.add_argument("--log-level", type=str.upper, default="INFO", choices=LOG_LEVELS, help="Nivel de log")


def parse_cli_args(argv: list[str]) -> Namespace:
    """Define y parsea los argumentos disponibles.

    Args:
        argv: Lista de argumentos de entrada (ej. sys.argv[1:]).

    Returns:
        Objeto Namespace con los parámetros parseados (`command` indica el subcomando).
    """
    parser = argparse.ArgumentParser(description="Solver DDG para difusión no lineal en mallas triangulares")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="Resolver un nivel de malla y exportar el campo")
    _common_arguments(run_p)
    run_p.add_argument("-n", "--level", type=int, default=None, help="Cuadrados por lado (default: primer nivel)")
    run_p.add_argument("--vtk", action="store_true", help="Exportar también .vtu (requiere vtk)")
    run_p.add_argument("--profile", action="store_true", help="Exportar perfil de línea")

    conv_p = sub.add_parser("convergence", help="Estudio de convergencia (errores y órdenes)")
    _common_arguments(conv_p)
    conv_p.add_argument("--levels", type=str, default=None, help="Niveles separados por coma, ej. 5,10,20")

    stab_p = sub.add_parser("stability", help="Estudio aleatorio de estabilidad de energía")
    _common_arguments(stab_p)
    stab_p.add_argument("-n", "--level", type=int, default=5, help="Cuadrados por lado")
    stab_p.add_argument("--trials", type=int, default=None, help="Número de campos aleatorios")
    stab_p.add_argument("--steps", type=int, default=None, help="Pasos SSP-RK3 por ensayo")

    ver_p = sub.add_parser("verify", help="Batería de invariantes")
    _common_arguments(ver_p)

    return parser.parse_args(argv)


def build_config(ns: Namespace) -> RunConfig:
    """Combina archivo, banderas y overrides en un RunConfig resuelto y validado.

    Raises:
        ConfigError: Configuración inválida o archivo inexistente.
    """
    cfg = load_config(ns.config) if ns.config else RunConfig()
    flags: list[str] = []
    if ns.model:
        flags.append(f"model={ns.model}")
    if ns.variant:
        flags.append(f"variant={ns.variant}")
    if ns.k is not None:
        flags.append(f"k={ns.k}")
    if ns.output_dir:
        flags.append(f"output_dir={ns.output_dir}")
    if ns.mlflow:
        flags.append("enable_mlflow=true")
    if getattr(ns, "levels", None):
        flags.append(f"levels={ns.levels}")
    if getattr(ns, "vtk", False):
        flags.append("export_vtk=true")
    if getattr(ns, "profile", False):
        flags.append("export_profile=true")
    if getattr(ns, "trials", None) is not None:
        flags.append(f"stability_trials={ns.trials}")
    if getattr(ns, "steps", None) is not None:
        flags.append(f"stability_steps={ns.steps}")
    cfg = apply_overrides(cfg, flags)
    cfg = apply_overrides(cfg, ns.overrides)
    return cfg.resolved().validate()


def _cmd_run(cfg: RunConfig, ns: Namespace) -> int:
    result = SimulationRunner(cfg, ns.level, on_error=lambda msg: print("[ERROR]", msg)).run()
    print(f"estado={result.status} t={result.time:.6e} pasos={result.steps} reinicios={result.restarts}")
    if result.l2_error is not None:
        print(f"L2={result.l2_error:.6e} Linf={result.linf_error:.6e}")
    if result.event_log is not None:
        print(f"eventos: {result.event_log}")
    return 0 if result.ok else 1


def _cmd_convergence(cfg: RunConfig) -> int:
    result = convergence_study(cfg)
    print(result.table, end="")
    return 0 if result.all_levels_ok else 1


def _cmd_stability(cfg: RunConfig, ns: Namespace) -> int:
    model = build_model(cfg.model, cfg.mu, cfg.gamma_exp)
    report = energy_stability_study(
        model,
        cfg.variant,
        k=cfg.k,
        n=ns.level,
        trials=cfg.stability_trials,
        steps=cfg.stability_steps,
        seed=cfg.seed,
        cfl=cfg.cfl,
    )
    print(
        f"{report.model}/{report.variant} k={report.k} n={report.n}: "
        f"max <u,L(u)>/|u|^2 = {report.max_semi_discrete_ratio:.3e} | "
        f"max crecimiento de energía = {report.max_energy_growth:.3e} | "
        f"{'OK' if report.passed else 'FALLA'}"
    )
    return 0 if report.passed else 1


def _cmd_verify(cfg: RunConfig) -> int:
    results = run_checks(cfg.k)
    for result in results:
        print(result.as_line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} chequeos correctos")
    return 0 if not failed else 1


def main_cli(ns: Namespace) -> int:
    """Ejecuta el subcomando indicado.

    Args:
        ns: Argumentos ya parseados con `parse_cli_args`.

    Returns:
        Código de salida (0 = éxito, 1 = fallo numérico/chequeo, 2 = error de entrada).
    """
    setup_logging(ns.log_level)
    if ns.config and not Path(ns.config).exists():
        print(f"[ERROR] Archivo no encontrado: {ns.config}")
        return 2
    try:
        cfg = build_config(ns)
    except ConfigError as e:
        print(f"[ERROR] {e}")
        return 2

    try:
        if ns.command == "run":
            return _cmd_run(cfg, ns)
        if ns.command == "convergence":
            return _cmd_convergence(cfg)
        if ns.command == "stability":
            return _cmd_stability(cfg, ns)
        if ns.command == "verify":
            return _cmd_verify(cfg)
    except (ConfigError, ValueError) as e:
        print(f"[ERROR] {e}")
        return 2
    print(f"[ERROR] Subcomando desconocido: {ns.command}")
    return 2
