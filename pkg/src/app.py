# src/app.py
"""
Punto de entrada principal de la aplicación.

Uso:
    python src/app.py run --model heat -k 2 -n 10
    python src/app.py convergence --config configs/calor_ddgic.toml
    python src/app.py verify
"""

from __future__ import annotations

import sys

from cli import main_cli, parse_cli_args


def main(argv: list[str] | None = None) -> None:
    """Parsea la línea de comandos y sale con el código del subcomando."""
    ns = parse_cli_args(sys.argv[1:] if argv is None else argv)
    raise SystemExit(main_cli(ns))


if __name__ == "__main__":
    main()
