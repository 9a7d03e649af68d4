"""Bundled scenario files: coherence, reciprocity, accessibility."""

from importlib.resources import files
from pathlib import Path

NAMES = ("coherence", "reciprocity", "accessibility")


def path(name: str) -> Path:
    """Filesystem path of a bundled scenario file."""
    if name not in NAMES:
        raise KeyError(f"unknown scenario {name!r}; bundled: {', '.join(NAMES)}")
    return Path(str(files(__package__).joinpath(f"{name}.eclc")))


def read(name: str) -> str:
    return path(name).read_text(encoding="utf-8")
