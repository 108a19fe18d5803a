"""Command-line entry point: ``figures <panel> --in <csv> --out <img>``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .panels import PANEL_KINDS, PanelSpec, render_panel


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures", description="Render panels from twostagegt CSV output."
    )
    parser.add_argument("panel", choices=PANEL_KINDS, help="panel kind")
    parser.add_argument("--in", dest="source", required=True, help="input CSV")
    parser.add_argument("--out", dest="output", required=True, help="output image path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        written = render_panel(
            PanelSpec(kind=args.panel, source=Path(args.source), output=Path(args.output))
        )
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
