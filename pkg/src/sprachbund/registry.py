"""Language registry: codes, family labels, syntax features, lexical similarity.

The registry is the canonical store of which languages exist, which family
each belongs to, and (optionally) categorical syntax feature labels. A
separate table holds pairwise lexical similarity values; pairs without data
are simply absent, never imputed as zero.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import ValidationError

CODE_PATTERN = re.compile(r"^[a-z]{2,4}$")

# the three categorical syntax features the analysis suite understands
SYNTAX_FEATURES = ("word_order", "adjective_position", "adposition_position")


@dataclass(frozen=True)
class LanguageRecord:
    """One language: lowercase code, optional family, optional syntax labels."""

    code: str
    family: str | None = None
    syntax: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not CODE_PATTERN.match(self.code):
            raise ValidationError(
                f"language code {self.code!r} does not match [a-z]{{2,4}}")
        object.__setattr__(self, "syntax", dict(self.syntax))


class Registry:
    """Immutable collection of :class:`LanguageRecord`, indexed by code."""

    def __init__(self, records: Iterable[LanguageRecord]):
        self._by_code: dict[str, LanguageRecord] = {}
        for rec in records:
            if rec.code in self._by_code:
                raise ValidationError(f"duplicate language code {rec.code!r}")
            self._by_code[rec.code] = rec

    def __len__(self) -> int:
        return len(self._by_code)

    def __iter__(self) -> Iterator[LanguageRecord]:
        return iter(self._by_code.values())

    def __contains__(self, code: str) -> bool:
        return code in self._by_code

    def get(self, code: str) -> LanguageRecord | None:
        return self._by_code.get(code)

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(self._by_code)

    @property
    def families(self) -> tuple[str, ...]:
        """Sorted set of family names present in the registry."""
        return tuple(sorted({r.family for r in self if r.family is not None}))

    @property
    def feature_names(self) -> tuple[str, ...]:
        """Known syntax features plus any extra ones the records carry."""
        observed = {name for r in self for name in r.syntax}
        extra = sorted(observed - set(SYNTAX_FEATURES))
        return SYNTAX_FEATURES + tuple(extra)

    def to_json(self) -> dict:
        return {
            "v": 1,
            "languages": [
                {"code": r.code, "family": r.family, "syntax": dict(r.syntax)}
                for r in self
            ],
        }


def _load_json(path: str | Path) -> dict:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: expected a JSON object at top level")
    if doc.get("v") != 1:
        raise ValidationError(f"{path}: unsupported or missing schema version 'v'")
    return doc


def load_registry(path: str | Path) -> Registry:
    """Parse a registry file: ``{"v": 1, "languages": [{code, family, syntax}]}``."""
    doc = _load_json(path)
    entries = doc.get("languages")
    if not isinstance(entries, list):
        raise ValidationError(f"{path}: 'languages' must be a list")
    records = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or "code" not in entry:
            raise ValidationError(f"{path}: languages[{i}] lacks a 'code'")
        syntax = entry.get("syntax") or {}
        if not isinstance(syntax, dict) or not all(
                isinstance(k, str) and isinstance(v, str) for k, v in syntax.items()):
            raise ValidationError(
                f"{path}: languages[{i}].syntax must map feature names to strings")
        records.append(LanguageRecord(
            code=entry["code"], family=entry.get("family"), syntax=syntax))
    return Registry(records)


def save_registry(registry: Registry, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(registry.to_json(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8")


class LexicalSimilarityTable:
    """Unordered-pair map of lexical similarity values in [0, 1].

    Lookups are order-insensitive; pairs with no datum return ``None``.
    """

    def __init__(self, entries: Mapping[tuple[str, str], float]):
        self._entries: dict[tuple[str, str], float] = {}
        for (a, b), sim in entries.items():
            key = (a, b) if a <= b else (b, a)
            if not 0.0 <= sim <= 1.0:
                raise ValidationError(
                    f"lexical similarity for ({a}, {b}) is {sim}, outside [0, 1]")
            if a == b and sim != 1.0:
                raise ValidationError(
                    f"self-pair ({a}, {a}) must be 1.0, got {sim}")
            prior = self._entries.get(key)
            if prior is not None and prior != sim:
                raise ValidationError(
                    f"asymmetric lexical similarity for ({a}, {b}): "
                    f"{prior} vs {sim}")
            self._entries[key] = sim

    def get(self, a: str, b: str) -> float | None:
        return self._entries.get((a, b) if a <= b else (b, a))

    def pairs(self) -> Iterator[tuple[str, str, float]]:
        for (a, b), sim in sorted(self._entries.items()):
            yield a, b, sim

    @property
    def languages(self) -> tuple[str, ...]:
        return tuple(sorted({c for key in self._entries for c in key}))

    def __len__(self) -> int:
        return len(self._entries)

    def to_json(self) -> dict:
        return {
            "v": 1,
            "pairs": [{"a": a, "b": b, "sim": sim} for a, b, sim in self.pairs()],
        }


def load_lexical_table(path: str | Path) -> LexicalSimilarityTable:
    """Parse a lexical table file: ``{"v": 1, "pairs": [{a, b, sim}]}``."""
    doc = _load_json(path)
    pairs = doc.get("pairs")
    if not isinstance(pairs, list):
        raise ValidationError(f"{path}: 'pairs' must be a list")
    entries: dict[tuple[str, str], float] = {}
    for i, p in enumerate(pairs):
        try:
            a, b, sim = p["a"], p["b"], p["sim"]
        except (TypeError, KeyError):
            raise ValidationError(f"{path}: pairs[{i}] needs keys a, b, sim")
        if not isinstance(sim, (int, float)):
            raise ValidationError(f"{path}: pairs[{i}].sim is not numeric")
        key = (a, b) if a <= b else (b, a)
        sim = float(sim)
        if key in entries and entries[key] != sim:
            raise ValidationError(
                f"{path}: asymmetric values for pair ({a}, {b}): "
                f"{entries[key]} vs {sim}")
        entries[key] = sim
    return LexicalSimilarityTable(entries)


def validate_feature_labels(records: Iterable[LanguageRecord]) -> dict[str, list[str]]:
    """Which languages lack which syntax feature.

    Returns a map from feature name to the sorted codes missing it; features
    nobody is missing are omitted, so full coverage yields ``{}``. Missing
    labels are expected and never an error.
    """
    records = list(records)
    observed = {name for r in records for name in r.syntax}
    report: dict[str, list[str]] = {}
    for feature in list(SYNTAX_FEATURES) + sorted(observed - set(SYNTAX_FEATURES)):
        missing = sorted(r.code for r in records if feature not in r.syntax)
        if missing:
            report[feature] = missing
    return report


def bundled_registry() -> Registry:
    """The 108-language registry with its 22 family labels."""
    from . import data
    return load_registry(data.path("registry.json"))


def bundled_lexical_table() -> LexicalSimilarityTable:
    """The 8-language lexical similarity table (15 pairs; the rest missing)."""
    from . import data
    return load_lexical_table(data.path("lexical_similarity.json"))
