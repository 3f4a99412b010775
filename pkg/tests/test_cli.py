# tests/test_cli.py
"""
Tests para el módulo cli.py

Prueba:
- Parsing de subcomandos y argumentos
- Combinación de archivo, banderas y overrides en RunConfig
- Códigos de salida (0 éxito, 1 fallo numérico, 2 entrada inválida)
"""

import json
import sys
from pathlib import Path
from unittest.mock import MagicMock, patch

import pytest

# Añadir src al path
ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from cli import build_config, main_cli, parse_cli_args
from verify import CheckResult


def test_parse_run_arguments():
    """Test parsing del subcomando run con todas las banderas."""
    args = parse_cli_args(
        [
            "run",
            "--model", "porous_manufactured",
            "--variant", "symmetric",
            "-k", "3",
            "-n", "8",
            "--vtk",
            "--profile",
            "--set", "final_time=0.5",
            "--set", "cfl=0.05",
            "--log-level", "debug",
        ]
    )
    assert args.command == "run"
    assert args.model == "porous_manufactured"
    assert args.variant == "symmetric"
    assert args.k == 3
    assert args.level == 8
    assert args.vtk is True
    assert args.profile is True
    assert args.overrides == ["final_time=0.5", "cfl=0.05"]
    assert args.log_level == "DEBUG"


def test_parse_defaults():
    args = parse_cli_args(["stability"])
    assert args.level == 5
    assert args.trials is None
    assert args.config is None
    assert args.mlflow is False


def test_parse_invalid_choice():
    with pytest.raises(SystemExit):
        parse_cli_args(["run", "--variant", "upwind"])
    with pytest.raises(SystemExit):
        parse_cli_args([])


def test_build_config_flags_and_overrides(tmp_path):
    """Test los overrides --set tienen prioridad sobre archivo y banderas."""
    cfg_file = tmp_path / "corrida.json"
    cfg_file.write_text(json.dumps({"model": "anisotropic", "k": 1, "cfl": 0.2}), encoding="utf-8")
    args = parse_cli_args(
        ["convergence", "--config", str(cfg_file), "-k", "2", "--levels", "4,8", "--set", "k=3", "--mlflow"]
    )
    cfg = build_config(args)
    assert cfg.model == "anisotropic"
    assert cfg.k == 3
    assert cfg.levels == [4, 8]
    assert cfg.cfl == pytest.approx(0.2)
    assert cfg.final_time == pytest.approx(1.0)
    assert cfg.enable_mlflow is True


def test_main_cli_missing_config(capsys):
    code = main_cli(parse_cli_args(["run", "--config", "no_existe.toml"]))
    assert code == 2
    assert "Archivo no encontrado" in capsys.readouterr().out


def test_main_cli_invalid_override(capsys):
    code = main_cli(parse_cli_args(["run", "--set", "k=9"]))
    assert code == 2
    assert "[ERROR]" in capsys.readouterr().out


def test_main_cli_run_small(tmp_path, capsys):
    """Test corrida real mínima: calor, k=1, n=2, T=1e-3."""
    code = main_cli(
        parse_cli_args(
            ["run", "-k", "1", "-n", "2", "--output-dir", str(tmp_path), "--set", "final_time=0.001"]
        )
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "estado=completed" in out
    assert "L2=" in out
    assert (tmp_path / "heat_ddgic_k1" / "eventos_n2.csv").exists()


def test_main_cli_convergence_rejects_model_without_exact(tmp_path, capsys):
    code = main_cli(parse_cli_args(["convergence", "--model", "bumps", "--output-dir", str(tmp_path)]))
    assert code == 2
    assert "solución exacta" in capsys.readouterr().out


@patch("cli.convergence_study")
def test_main_cli_convergence_exit_codes(mock_study, capsys):
    mock_study.return_value = MagicMock(table="n h\n", all_levels_ok=False)
    assert main_cli(parse_cli_args(["convergence"])) == 1
    mock_study.return_value = MagicMock(table="n h\n", all_levels_ok=True)
    assert main_cli(parse_cli_args(["convergence"])) == 0
    assert "n h" in capsys.readouterr().out


@patch("cli.run_checks")
def test_main_cli_verify(mock_checks, capsys):
    mock_checks.return_value = [
        CheckResult("malla", True, 0.0, 1e-12),
        CheckResult("limitador", False, 1.0, 1e-12),
    ]
    assert main_cli(parse_cli_args(["verify", "-k", "1"])) == 1
    mock_checks.assert_called_once_with(1)
    out = capsys.readouterr().out
    assert "[FALLA] limitador" in out
    assert "1/2 chequeos correctos" in out


@patch("cli.energy_stability_study")
def test_main_cli_stability(mock_study, capsys):
    mock_study.return_value = MagicMock(
        model="heat",
        variant="nonsymmetric",
        k=2,
        n=4,
        max_semi_discrete_ratio=-1.0,
        max_energy_growth=-0.1,
        passed=True,
    )
    code = main_cli(parse_cli_args(["stability", "--variant", "nonsymmetric", "--trials", "3", "--steps", "5"]))
    assert code == 0
    kwargs = mock_study.call_args.kwargs
    assert kwargs["trials"] == 3
    assert kwargs["steps"] == 5
    assert kwargs["n"] == 5
    assert "OK" in capsys.readouterr().out
