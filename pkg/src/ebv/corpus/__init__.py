"""The shipped model corpus: five verified sequential-algorithm models."""

from importlib import resources
from pathlib import Path

MODELS = ("binary_search", "minimum", "search", "square_root", "inverse")


def path(name: str) -> Path:
    """Filesystem path of a corpus model (name with or without .eb)."""
    if not name.endswith(".eb"):
        name += ".eb"
    p = resources.files(__package__) / name
    return Path(str(p))


def paths() -> list[Path]:
    return [path(n) for n in MODELS]
