"""Bundled data files.

Ships the 108-language registry with family labels, the 8-language lexical
similarity table, the matching 8-language embedding-similarity matrix, a
known-good 4-way reference partition of the full language set, and a small
self-contained demo corpus with precomputed sentence embeddings. Everything
the tests and demos need runs offline from these files.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def path(name: str) -> Path:
    """Filesystem path of a bundled data file, e.g. ``path("registry.json")``."""
    p = Path(str(resources.files(__package__).joinpath(name)))
    if not p.exists():
        raise FileNotFoundError(f"no bundled data file named {name!r}")
    return p
