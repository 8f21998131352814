"""Regenerate src/scdforge/data/catalog.json from the projected decompositions."""

from __future__ import annotations

from pathlib import Path

from scdforge.catalog import freeze

if __name__ == "__main__":
    target = Path(__file__).resolve().parents[1] / "src" / "scdforge" / "data" / "catalog.json"
    freeze(target)
    print(f"wrote {target}")
