"""Cosine similarity between language representations, plus Pearson utilities.

The similarity matrix is dense and symmetric by construction: each pair is
computed once and mirrored, the diagonal is set to exactly 1.0, and entries
are clamped into [-1, 1] so that the derived distance 1 - sim stays in [0, 2].
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .embedding import LanguageRepresentation
from .errors import ValidationError
from .registry import LexicalSimilarityTable


def cosine(a, b) -> float:
    """dot(a, b) / (|a| |b|), clamped into [-1, 1].

    The denominator is evaluated as sqrt((a.a)(b.b)) so that the identity
    cosine(v, v) == 1.0 holds exactly.
    """
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape or va.ndim != 1:
        raise ValidationError(
            f"cosine needs two equal-length vectors, got shapes "
            f"{va.shape} and {vb.shape}")
    na2 = float(va @ va)
    nb2 = float(vb @ vb)
    if na2 == 0.0:
        raise ValidationError("cosine: first argument has zero norm")
    if nb2 == 0.0:
        raise ValidationError("cosine: second argument has zero norm")
    return float(np.clip(float(va @ vb) / math.sqrt(na2 * nb2), -1.0, 1.0))


@dataclass(eq=False)
class SimilarityMatrix:
    """Symmetric cosine-similarity matrix over an ordered language list."""

    languages: tuple[str, ...]
    values: np.ndarray  # float64, shape (M, M)

    def __post_init__(self):
        self.languages = tuple(self.languages)
        self.values = np.asarray(self.values, dtype=np.float64)
        m = len(self.languages)
        if len(set(self.languages)) != m:
            raise ValidationError("duplicate language codes in matrix")
        if self.values.shape != (m, m):
            raise ValidationError(
                f"matrix shape {self.values.shape} does not match "
                f"{m} languages")
        if not np.array_equal(self.values, self.values.T):
            raise ValidationError("similarity matrix is not symmetric")
        if not np.all(np.diag(self.values) == 1.0):
            raise ValidationError("similarity matrix diagonal must be 1.0")
        if np.any(np.abs(self.values) > 1.0 + 1e-9):
            raise ValidationError("similarity values must lie in [-1, 1]")
        self._index = {code: i for i, code in enumerate(self.languages)}

    def __len__(self) -> int:
        return len(self.languages)

    def index(self, code: str) -> int:
        try:
            return self._index[code]
        except KeyError:
            raise ValidationError(f"language {code!r} is not in the matrix")

    def get(self, a: str, b: str) -> float:
        return float(self.values[self.index(a), self.index(b)])

    def to_json(self) -> dict:
        return {"languages": list(self.languages),
                "values": [[float(x) for x in row] for row in self.values]}

    @classmethod
    def from_json(cls, doc: dict) -> "SimilarityMatrix":
        if "languages" not in doc or "values" not in doc:
            raise ValidationError("matrix JSON needs 'languages' and 'values'")
        return cls(tuple(doc["languages"]), np.asarray(doc["values"]))

    def to_csv(self) -> str:
        lines = ["," + ",".join(self.languages)]
        for code, row in zip(self.languages, self.values):
            lines.append(code + "," + ",".join(repr(float(x)) for x in row))
        return "\n".join(lines) + "\n"


def build_matrix(reps: Sequence[LanguageRepresentation]) -> SimilarityMatrix:
    """Pairwise cosine similarity; each pair computed once and mirrored."""
    if len(reps) < 2:
        raise ValidationError("need at least 2 representations for a matrix")
    dims = {r.dim for r in reps}
    if len(dims) > 1:
        raise ValidationError(
            f"representations disagree on dimension: {sorted(dims)}")
    vectors = np.vstack([r.vector for r in reps]).astype(np.float64)
    norms = np.linalg.norm(vectors, axis=1)
    for r, nrm in zip(reps, norms):
        if nrm == 0.0:
            raise ValidationError(
                f"representation for {r.language!r} has zero norm")
    unit = vectors / norms[:, None]
    gram = unit @ unit.T
    upper = np.triu(gram, k=1)
    values = upper + upper.T
    np.fill_diagonal(values, 1.0)
    np.clip(values, -1.0, 1.0, out=values)
    return SimilarityMatrix(tuple(r.language for r in reps), values)


def load_matrix(path: str | Path) -> SimilarityMatrix:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return SimilarityMatrix.from_json(doc)


def bundled_embedding_similarity() -> SimilarityMatrix:
    """The 8-language embedding-similarity matrix that pairs with the bundled
    lexical table."""
    from . import data
    return load_matrix(data.path("embedding_similarity.json"))


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation via the two-pass (mean first) formula."""
    xa = np.asarray(xs, dtype=np.float64)
    ya = np.asarray(ys, dtype=np.float64)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValidationError(
            f"pearson needs two equal-length sequences, got shapes "
            f"{xa.shape} and {ya.shape}")
    if len(xa) < 3:
        raise ValidationError(f"pearson needs at least 3 points, got {len(xa)}")
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sx = float(dx @ dx)
    sy = float(dy @ dy)
    if sx == 0.0:
        raise ValidationError("pearson: first sequence is constant")
    if sy == 0.0:
        raise ValidationError("pearson: second sequence is constant")
    return float(np.clip(float(dx @ dy) / math.sqrt(sx * sy), -1.0, 1.0))


def paired_similarity_vectors(
        matrix: SimilarityMatrix,
        table: LexicalSimilarityTable) -> tuple[list[float], list[float]]:
    """Align matrix entries with lexical values over pairs present in both.

    Walks the matrix's off-diagonal pairs in language order and keeps those
    the table has data for; self-pairs and missing pairs are excluded.
    """
    xs: list[float] = []
    ys: list[float] = []
    codes = matrix.languages
    for i in range(len(codes)):
        for j in range(i + 1, len(codes)):
            lex = table.get(codes[i], codes[j])
            if lex is None:
                continue
            xs.append(float(matrix.values[i, j]))
            ys.append(lex)
    if len(xs) < 3:
        raise ValidationError(
            f"only {len(xs)} pairs are present in both the matrix and the "
            f"lexical table; need at least 3")
    return xs, ys
