"""Sentence embeddings and per-language centroid representations.

Embeddings arrive either from a JSON Lines file or from an HTTP service that
embeds batches of sentences. Each language is then reduced to the mean of its
sentence vectors. Vectors are held in float32; sums are accumulated in
float64 with compensated (Kahan) combination of block partial sums, so a
10k x 768 average does not drift.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import requests

from .corpus import CorpusShard
from .errors import PartialEmbeddingError, ServiceError, ValidationError

_SUM_BLOCK = 256


@dataclass(eq=False)
class SentenceEmbeddingSet:
    """Fixed-dimension vectors for one language's sentences."""

    language: str
    dim: int
    ids: tuple[int, ...]
    matrix: np.ndarray  # float32, shape (len(ids), dim)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float32)
        if self.matrix.ndim != 2 or self.matrix.shape != (len(self.ids), self.dim):
            raise ValidationError(
                f"embedding matrix for {self.language!r} must be "
                f"{len(self.ids)} x {self.dim}, got {self.matrix.shape}")
        if self.dim < 1:
            raise ValidationError("embedding dimension must be positive")
        if len(set(self.ids)) != len(self.ids):
            raise ValidationError(
                f"duplicate sentence ids in embedding set for {self.language!r}")
        if self.matrix.size and not np.isfinite(self.matrix).all():
            bad = int(np.argwhere(~np.isfinite(self.matrix))[0][0])
            raise ValidationError(
                f"non-finite component in vector for lang={self.language} "
                f"id={self.ids[bad]}")

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(eq=False)
class LanguageRepresentation:
    """One language's centroid vector and how many sentences went into it."""

    language: str
    vector: np.ndarray  # float32, shape (dim,)
    sample_count: int

    def __post_init__(self):
        self.vector = np.asarray(self.vector, dtype=np.float32)
        if self.vector.ndim != 1:
            raise ValidationError("representation vector must be 1-D")
        if self.sample_count < 1:
            raise ValidationError("sample_count must be >= 1")
        if not np.isfinite(self.vector).all():
            raise ValidationError(
                f"non-finite component in representation for {self.language!r}")

    @property
    def dim(self) -> int:
        return int(self.vector.shape[0])


def load_embeddings(path: str | Path) -> list[SentenceEmbeddingSet]:
    """Read a JSON Lines embedding file.

    First line is a header ``{"v": 1, "dim": D}``; every other line is
    ``{"lang": code, "id": int, "vec": [floats]}``. Records are grouped by
    language in order of first appearance.
    """
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"embedding file not found: {path}")
    grouped: dict[str, tuple[list[int], list[list[float]]]] = {}
    dim: int | None = None
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: line {lineno}: {exc.msg}") from exc
            if lineno == 1:
                if rec.get("v") != 1 or "dim" not in rec:
                    raise ValidationError(
                        f"{path}: first line must be a header with v=1 and dim")
                dim = int(rec["dim"])
                if dim < 1:
                    raise ValidationError(f"{path}: header dim must be positive")
                continue
            try:
                lang, sid, vec = rec["lang"], int(rec["id"]), rec["vec"]
            except (TypeError, KeyError):
                raise ValidationError(
                    f"{path}: line {lineno}: record needs lang, id, vec")
            if len(vec) != dim:
                raise ValidationError(
                    f"{path}: line {lineno}: vector for lang={lang} id={sid} "
                    f"has dimension {len(vec)}, header says {dim}")
            arr = np.asarray(vec, dtype=np.float32)
            if not np.isfinite(arr).all():
                raise ValidationError(
                    f"{path}: line {lineno}: non-finite value in vector for "
                    f"lang={lang} id={sid}")
            ids, vecs = grouped.setdefault(lang, ([], []))
            ids.append(sid)
            vecs.append(arr)
    if dim is None:
        raise ValidationError(f"{path}: empty embedding file (no header)")
    return [
        SentenceEmbeddingSet(
            language=lang, dim=dim, ids=tuple(ids),
            matrix=np.vstack(vecs) if vecs else np.zeros((0, dim), np.float32))
        for lang, (ids, vecs) in grouped.items()
    ]


def write_embeddings(sets: Iterable[SentenceEmbeddingSet], path: str | Path,
                     extra_header: dict | None = None) -> None:
    """Write sets in the JSON Lines format that :func:`load_embeddings` reads."""
    sets = list(sets)
    dims = {s.dim for s in sets}
    if len(dims) > 1:
        raise ValidationError(f"cannot mix dimensions in one file: {sorted(dims)}")
    header = {"v": 1, "dim": dims.pop() if dims else 0}
    if extra_header:
        header.update(extra_header)
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for s in sets:
            for sid, row in zip(s.ids, s.matrix):
                fh.write(json.dumps(
                    {"lang": s.language, "id": sid,
                     "vec": [float(x) for x in row]}, sort_keys=True) + "\n")


def fetch_embeddings(endpoint: str, shard: CorpusShard, batch: int, *,
                     retries: int = 3, timeout: float = 30.0,
                     auth_token: str | None = None,
                     session: requests.Session | None = None,
                     retry_wait: float = 0.2) -> SentenceEmbeddingSet:
    """Embed a shard's sentences via the HTTP service at ``endpoint``.

    Protocol: ``GET /info`` declares the dimension; ``POST /embed`` with
    ``{"texts": [...]}`` answers ``{"vectors": [[...], ...]}`` positionally.
    Sentences are sent in batches of at most ``batch``; transient failures
    (connection errors, 5xx) are retried up to ``retries`` times per request.
    A response with fewer vectors than texts, or null entries, leaves those
    sentences without vectors and raises :class:`PartialEmbeddingError` after
    all batches complete.
    """
    if batch < 1:
        raise ValidationError(f"batch size must be >= 1, got {batch}")
    base = endpoint.rstrip("/")
    sess = session or requests.Session()
    headers = {}
    if auth_token:
        headers["Authorization"] = f"Bearer {auth_token}"

    def _request(method: str, url: str, payload: dict | None) -> dict:
        last_exc: Exception | None = None
        for attempt in range(retries + 1):
            try:
                if method == "GET":
                    resp = sess.get(url, headers=headers, timeout=timeout)
                else:
                    resp = sess.post(url, json=payload, headers=headers,
                                     timeout=timeout)
            except (requests.ConnectionError, requests.Timeout) as exc:
                last_exc = exc
                if attempt < retries:
                    time.sleep(retry_wait * (attempt + 1))
                continue
            if resp.status_code >= 500:
                last_exc = ServiceError(
                    f"{url} answered {resp.status_code}")
                if attempt < retries:
                    time.sleep(retry_wait * (attempt + 1))
                continue
            if resp.status_code != 200:
                raise ServiceError(f"{url} answered {resp.status_code}")
            try:
                return resp.json()
            except ValueError as exc:
                raise ServiceError(f"{url}: response is not JSON") from exc
        raise ServiceError(
            f"{url}: giving up after {retries + 1} attempts: {last_exc}")

    info = _request("GET", f"{base}/info", None)
    if not isinstance(info.get("dim"), int) or info["dim"] < 1:
        raise ServiceError(f"{base}/info did not declare a positive 'dim'")
    dim = info["dim"]

    ids: list[int] = []
    rows: list[np.ndarray] = []
    missing: list[int] = []
    sentences = list(shard.sentences)
    for start in range(0, len(sentences), batch):
        chunk = sentences[start:start + batch]
        reply = _request("POST", f"{base}/embed",
                         {"texts": [text for _, text in chunk]})
        vectors = reply.get("vectors")
        if not isinstance(vectors, list):
            raise ServiceError(f"{base}/embed: response lacks a 'vectors' list")
        if len(vectors) > len(chunk):
            raise ServiceError(
                f"{base}/embed: got {len(vectors)} vectors for "
                f"{len(chunk)} texts")
        for offset, (sid, _) in enumerate(chunk):
            vec = vectors[offset] if offset < len(vectors) else None
            if vec is None:
                missing.append(sid)
                continue
            if len(vec) != dim:
                raise ServiceError(
                    f"{base}/embed: vector for id={sid} has dimension "
                    f"{len(vec)}, /info declared {dim}")
            ids.append(sid)
            rows.append(np.asarray(vec, dtype=np.float32))
    if missing:
        raise PartialEmbeddingError(shard.language, missing)
    order = np.argsort(ids, kind="stable")
    matrix = (np.vstack(rows)[order] if rows
              else np.zeros((0, dim), np.float32))
    return SentenceEmbeddingSet(
        language=shard.language, dim=dim,
        ids=tuple(ids[i] for i in order), matrix=matrix)


def _compensated_mean(matrix: np.ndarray) -> np.ndarray:
    """Mean over axis 0: float64 block sums combined with Kahan compensation."""
    n, dim = matrix.shape
    total = np.zeros(dim, dtype=np.float64)
    comp = np.zeros(dim, dtype=np.float64)
    for start in range(0, n, _SUM_BLOCK):
        block = matrix[start:start + _SUM_BLOCK].sum(axis=0, dtype=np.float64)
        y = block - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total / n


def centroid(emb_set: SentenceEmbeddingSet) -> LanguageRepresentation:
    """Componentwise mean of a language's sentence vectors."""
    if len(emb_set) == 0:
        raise ValidationError(
            f"cannot take the centroid of an empty set for {emb_set.language!r}")
    mean = _compensated_mean(emb_set.matrix)
    return LanguageRepresentation(
        language=emb_set.language,
        vector=mean.astype(np.float32),
        sample_count=len(emb_set),
    )


def centroid_all(sets: Sequence[SentenceEmbeddingSet]) -> list[LanguageRepresentation]:
    """Centroid per language, preserving input order."""
    seen: set[str] = set()
    dims = {s.dim for s in sets}
    if len(dims) > 1:
        raise ValidationError(
            f"embedding sets disagree on dimension: {sorted(dims)}")
    out = []
    for s in sets:
        if s.language in seen:
            raise ValidationError(f"duplicate language {s.language!r}")
        seen.add(s.language)
        out.append(centroid(s))
    return out
