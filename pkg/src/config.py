# src/config.py
"""
Módulo de configuración central de los experimentos DDG.

Define la clase `RunConfig`, que concentra todos los parámetros de una
corrida (modelo, esquema, tiempo, limitador, salidas), los presets de cada
ejemplo numérico y las utilidades de carga: archivos JSON/TOML, overrides
`clave=valor` desde la línea de comandos y sanitización de nombres.
"""

from __future__ import annotations

import json
import tomllib
import typing
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional

from ddg import Variant
from models import MODEL_FACTORIES


class ConfigError(ValueError):
    """Configuración inválida (clave desconocida, valor mal formado, archivo ilegible)."""


def sanitize_filename(name: str) -> str:
    """Normaliza un nombre de archivo removiendo caracteres inválidos.

    Reemplaza caracteres reservados en Windows/macOS/Linux y espacios por
    guiones bajos. Si el resultado queda vacío, retorna `"corrida"`.

    Args:
        name: Nombre original (posiblemente con caracteres inválidos).

    Returns:
        Nombre seguro para archivos de resultados.
    """
    invalid = '<>:"/\\|?* '
    cleaned = "".join("_" if ch in invalid else ch for ch in name.strip()).strip("_")
    return cleaned or "corrida"


@dataclass
class RunConfig:
    """Estructura de configuración de una corrida o estudio de convergencia.

    Los campos en None se completan con el preset del modelo (`resolved()`).
    """

    # --- Problema ---
    model: str = "heat"  # Nombre en MODEL_FACTORIES
    mu: Optional[float] = None  # Escala de difusión μ
    gamma_exp: Optional[float] = None  # Exponente γ del medio poroso

    # --- Esquema DDG ---
    variant: str = "ddgic"  # baseline | ddgic | symmetric | nonsymmetric
    k: int = 2  # Grado polinomial (0–4)
    beta0: Optional[float] = None  # None = (k+1)²
    beta0v: Optional[float] = None  # None = β₀/2
    beta1: Optional[float] = None  # None = 1/(2k(k+1))
    quadrature: str = "auto"  # auto | 2k+1 | 4k+1 | grado entero

    # --- Mallas ---
    levels: list[int] = field(default_factory=lambda: [5, 10, 20])  # n por lado

    # --- Tiempo ---
    cfl: Optional[float] = None  # λ
    final_time: Optional[float] = None  # T
    cfl_mode: Optional[str] = None  # standard | blowup
    safety: float = 1.0
    restart: Optional[bool] = None
    dt_floor: float = 1e-13
    max_steps: Optional[int] = None

    # --- Limitador ---
    limiter: Optional[bool] = None
    limiter_lower: Optional[float] = None
    limiter_upper: Optional[float] = None

    # --- Salidas ---
    output_dir: str = "resultados"
    run_name: Optional[str] = None
    export_resolution: int = 4  # Subdivisiones por arista para CSV/VTK
    export_vtk: bool = False
    export_profile: bool = False  # Perfil de línea (y=0 o y=−x según el modelo)

    # --- Estudio de estabilidad ---
    seed: int = 0
    stability_trials: int = 20
    stability_steps: int = 100

    # --- Configuración de MLflow ---
    enable_mlflow: bool = False
    experiment_name: str = "DDG-Difusion"

    def resolved(self) -> "RunConfig":
        """Copia con los valores None completados por el preset del modelo."""
        preset = MODEL_PRESETS.get(self.model, {})
        updates = {
            name: value
            for name, value in preset.items()
            if getattr(self, name) is None
        }
        return replace(self, **updates)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @property
    def display_name(self) -> str:
        base = self.run_name or f"{self.model}_{self.variant}_k{self.k}"
        return sanitize_filename(base)

    def quadrature_exactness(self, strongly_nonlinear: bool) -> int:
        """Exactitud de ensamblaje según `quadrature`."""
        mode = str(self.quadrature).strip().lower()
        if mode == "auto":
            return 4 * self.k + 1 if strongly_nonlinear else 2 * self.k + 1
        if mode == "2k+1":
            return 2 * self.k + 1
        if mode == "4k+1":
            return 4 * self.k + 1
        try:
            return int(mode)
        except ValueError:
            raise ConfigError(f"Cuadratura inválida: {self.quadrature!r}") from None

    def validate(self) -> "RunConfig":
        """Valida nombres y rangos; devuelve self para encadenar."""
        if self.model not in MODEL_FACTORIES:
            known = ", ".join(sorted(MODEL_FACTORIES))
            raise ConfigError(f"Modelo desconocido: {self.model!r} (disponibles: {known})")
        try:
            Variant.parse(self.variant)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not 0 <= self.k <= 4:
            raise ConfigError(f"k fuera de rango [0, 4]: {self.k}")
        if not self.levels or any(n < 1 for n in self.levels):
            raise ConfigError(f"Niveles de malla inválidos: {self.levels}")
        if self.cfl is not None and self.cfl <= 0:
            raise ConfigError(f"λ debe ser positivo: {self.cfl}")
        if self.final_time is not None and self.final_time <= 0:
            raise ConfigError(f"T debe ser positivo: {self.final_time}")
        if self.cfl_mode not in (None, "standard", "blowup"):
            raise ConfigError(f"Modo CFL desconocido: {self.cfl_mode!r}")
        if self.export_resolution < 1:
            raise ConfigError(f"Resolución de exportación inválida: {self.export_resolution}")
        self.quadrature_exactness(False)
        return self


# Presets de los ejemplos numéricos (λ, T, niveles, limitador, modo CFL)
MODEL_PRESETS: dict[str, dict[str, Any]] = {
    "heat": {"cfl": 0.1, "final_time": 1.0, "cfl_mode": "standard", "restart": False, "limiter": False},
    "anisotropic": {"cfl": 0.1, "final_time": 1.0, "cfl_mode": "standard", "restart": False, "limiter": False},
    "anisotropic_symmetric": {
        "cfl": 0.1,
        "final_time": 1.0,
        "cfl_mode": "standard",
        "restart": False,
        "limiter": False,
    },
    "porous_manufactured": {
        "cfl": 0.1,
        "final_time": 1.0,
        "cfl_mode": "standard",
        "restart": False,
        "limiter": False,
    },
    "porous": {"cfl": 0.1, "final_time": 1.0, "cfl_mode": "standard", "restart": False, "limiter": False},
    "bumps": {
        "cfl": 0.1,
        "final_time": 4.0,
        "cfl_mode": "standard",
        "restart": False,
        "limiter": True,
        "limiter_lower": 0.0,
        "limiter_upper": 1.0,
    },
    "block": {
        "cfl": 0.1,
        "final_time": 0.005,
        "cfl_mode": "standard",
        "restart": False,
        "limiter": True,
        "limiter_lower": 0.0,
        "limiter_upper": 1.0,
    },
    "blowup": {
        "cfl": 0.01,
        "final_time": 0.05,
        "cfl_mode": "blowup",
        "restart": True,
        "limiter": True,
        "limiter_lower": 0.0,
        "limiter_upper": float("inf"),
    },
}

_TRUE = {"true", "1", "si", "sí", "yes", "on"}
_FALSE = {"false", "0", "no", "off"}


def _field_types() -> dict[str, Any]:
    hints = typing.get_type_hints(RunConfig)
    return {f.name: hints[f.name] for f in fields(RunConfig)}


def _coerce(name: str, raw: Any, annotation: Any) -> Any:
    origin = typing.get_origin(annotation)
    args = [a for a in typing.get_args(annotation) if a is not type(None)]
    if origin is typing.Union or (origin is not None and type(None) in typing.get_args(annotation)):
        if raw is None or (isinstance(raw, str) and raw.strip().lower() in ("none", "null", "")):
            return None
        return _coerce(name, raw, args[0])
    if origin is list:
        items = raw if isinstance(raw, (list, tuple)) else [p for p in str(raw).split(",") if p.strip()]
        return [_coerce(name, item, args[0]) for item in items]
    try:
        if annotation is bool:
            if isinstance(raw, bool):
                return raw
            text = str(raw).strip().lower()
            if text in _TRUE:
                return True
            if text in _FALSE:
                return False
            raise ValueError(raw)
        if annotation is int:
            if isinstance(raw, bool) or (isinstance(raw, float) and not raw.is_integer()):
                raise ValueError(raw)
            return int(str(raw).strip()) if isinstance(raw, str) else int(raw)
        if annotation is float:
            return float(raw)
        if annotation is str:
            return str(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"Valor inválido para {name!r}: {raw!r}") from None
    return raw


def config_from_mapping(data: dict[str, Any], base: RunConfig | None = None) -> RunConfig:
    """Crea un RunConfig desde un diccionario clave-valor."""
    types = _field_types()
    unknown = sorted(set(data) - set(types))
    if unknown:
        raise ConfigError(f"Clave(s) de configuración desconocida(s): {', '.join(unknown)}")
    values = {name: _coerce(name, raw, types[name]) for name, raw in data.items()}
    return replace(base or RunConfig(), **values)


def load_config(path: str | Path) -> RunConfig:
    """Lee un archivo JSON (.json) o TOML (.toml) con campos de RunConfig.

    Raises:
        ConfigError: Si el archivo no existe, no se puede leer o tiene claves inválidas.
    """
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"Archivo de configuración no encontrado: {p}")
    try:
        if p.suffix.lower() == ".toml":
            with open(p, "rb") as fp:
                data = tomllib.load(fp)
        else:
            data = json.loads(p.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"No se pudo leer {p}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{p} debe contener un objeto clave-valor")
    return config_from_mapping(data)


def apply_overrides(config: RunConfig, overrides: list[str] | None) -> RunConfig:
    """Aplica overrides `clave=valor` (ej. `k=3`, `levels=5,10,20`)."""
    if not overrides:
        return config
    data: dict[str, str] = {}
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"Override mal formado (se espera clave=valor): {item!r}")
        data[key.strip()] = value.strip()
    return config_from_mapping(data, config)
