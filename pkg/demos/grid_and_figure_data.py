"""Build a grid over T, save it, and write the data behind every figure id.

Usage: python3 demos/grid_and_figure_data.py [output directory] [--small]
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

from rational_painleve.cli import FIGURE_IDS, export_figure_data
from rational_painleve.gridstore import build_grid, save


def main(argv: list[str]) -> None:
    small = "--small" in argv
    paths = [a for a in argv if not a.startswith("--")]
    out_dir = Path(paths[0] if paths else "figure-data")
    out_dir.mkdir(parents=True, exist_ok=True)

    shape = (12, 12, 0.05) if small else (48, 60, 0.02)
    cache = build_grid(*shape, progress=lambda done, total: print(f"\rray {done}/{total}", end="", flush=True))
    print()
    save(cache, out_dir / "grid.jsonl")

    for figure_id in FIGURE_IDS:
        for name, rows in export_figure_data(figure_id, cache).items():
            path = out_dir / f"{figure_id}-{name}.csv"
            with open(path, "w", newline="") as handle:
                if rows:
                    writer = csv.DictWriter(handle, fieldnames=list(rows[0]))
                    writer.writeheader()
                    writer.writerows(rows)
            print(f"{path}: {len(rows)} rows")


if __name__ == "__main__":
    main(sys.argv[1:])
