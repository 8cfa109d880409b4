"""Shipped example specs, addressable by short name."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

NAMES = ("top_exa", "irred1", "irred2", "lines", "noether_demo", "negative_control")


def path(name: str) -> Path:
    """Filesystem path of a catalog file; ``name`` may omit the ``.ind`` suffix."""
    stem = name[:-4] if name.endswith(".ind") else name
    if stem not in NAMES:
        raise KeyError(f"no catalog entry {name!r}; known: {', '.join(NAMES)}")
    return Path(str(resources.files(__package__).joinpath("catalog", f"{stem}.ind")))


def read(name: str) -> str:
    return path(name).read_text(encoding="utf-8")
