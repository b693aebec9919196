"""Pipeline orchestration over a directory of flat JSON artifacts.

Subcommands run the stages sample -> embed -> repr -> simmat -> cluster ->
partition -> analyze -> project individually or chained (``all``). Every
stage reads the previous stage's artifact from the workspace, writes its own
versioned JSON artifact stamped with the digest of the effective config, and
appends a line to the run log. Reruns with identical inputs, config, and
seed reproduce identical artifact bytes; timestamps live only in the log.

Exit codes: 0 success, 1 usage error, 2 data/validation error,
3 external-service error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import build_report
from .cluster import SprachbundAssignment, agglomerate, cut
from .corpus import CorpusShard, SamplingPolicy, corpus_stats, ingest_shard, sample
from .embedding import (LanguageRepresentation, SentenceEmbeddingSet,
                        centroid_all, fetch_embeddings, load_embeddings,
                        write_embeddings)
from .errors import ServiceError, SprachbundError, UsageError, ValidationError
from .partition import build_manifest, sweep
from .projection import TsneParams, emit_plot, project
from .registry import (Registry, bundled_lexical_table, bundled_registry,
                       load_lexical_table, load_registry)
from .simmatrix import SimilarityMatrix, build_matrix, load_matrix

AUTH_TOKEN_ENV = "SPRACHBUND_TOKEN"

STAGE_ORDER = ("sample", "embed", "repr", "simmat", "cluster",
               "partition", "analyze", "project")

_CONFIG_KEYS = {
    "corpus_root", "registry", "lexical_table", "matrix", "embeddings",
    "endpoint", "cap", "seed", "k", "sweep", "batch", "allow_missing",
    "languages", "color_by", "point_radius", "font_size", "tsne", "out",
}

_TSNE_KEYS = set(TsneParams.__dataclass_fields__)


@dataclass
class PipelineConfig:
    corpus_root: str | None = None
    registry: str | None = None
    lexical_table: str | None = None
    matrix: str | None = None
    embeddings: str | None = None
    endpoint: str | None = None
    cap: int = 10000
    seed: int = 0
    k: int = 4
    sweep: list[int] | None = None
    batch: int = 32
    allow_missing: list[str] = field(default_factory=list)
    languages: list[str] | None = None
    color_by: str = "family"
    point_radius: float = 5.0
    font_size: int = 11
    tsne: dict = field(default_factory=dict)
    out: str | None = None

    def digest(self) -> str:
        """Digest of the semantic parameters (workspace location excluded)."""
        payload = {k: v for k, v in self.__dict__.items() if k != "out"}
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    def workspace(self) -> Path:
        if not self.out:
            raise UsageError("no output directory: pass --out or set 'out' "
                             "in the config file")
        return Path(self.out)

    def load_registry(self) -> Registry:
        if self.registry:
            return load_registry(self.registry)
        return bundled_registry()

    def load_lexical_table(self):
        if self.lexical_table:
            return load_lexical_table(self.lexical_table)
        return bundled_lexical_table()

    def tsne_params(self) -> TsneParams:
        unknown = set(self.tsne) - _TSNE_KEYS
        if unknown:
            raise ValidationError(
                f"unknown tsne parameter(s): {', '.join(sorted(unknown))}")
        params = dict(self.tsne)
        params.setdefault("seed", self.seed)
        return TsneParams(**params)


def load_config(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ValidationError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: config must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS - {"v"}
    if unknown:
        raise ValidationError(
            f"{path}: unknown config key(s): {', '.join(sorted(unknown))}")
    return doc


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    """Config file first, then flags override."""
    cfg = PipelineConfig()
    if args.config:
        file_values = load_config(args.config)
        file_values.pop("v", None)
        cfg = replace(cfg, **file_values)
    overrides: dict = {}
    for name in ("k", "cap", "seed", "endpoint", "embeddings", "out",
                 "point_radius", "font_size"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "sweep", None):
        overrides["sweep"] = [int(x) for x in args.sweep.split(",") if x]
    if getattr(args, "allow_missing", None):
        overrides["allow_missing"] = [c for c in args.allow_missing.split(",") if c]
    cfg = replace(cfg, **overrides)
    if cfg.embeddings and cfg.endpoint:
        raise UsageError("choose one embedding source: --embeddings or "
                         "--endpoint, not both")
    return cfg


# ---------------------------------------------------------------------------
# workspace plumbing

def _write_json(path: Path, payload: dict, digest: str) -> None:
    doc = {"v": 1, "config_digest": digest}
    doc.update(payload)
    path.write_text(
        json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8")


def _read_artifact(workspace: Path, name: str, produced_by: str) -> dict:
    path = workspace / name
    if not path.exists():
        raise ValidationError(
            f"missing input {name}; run `sprachbund {produced_by}` first")
    doc = json.loads(path.read_text(encoding="utf-8"))
    if doc.get("v") != 1:
        raise ValidationError(f"{path}: unsupported artifact version")
    return doc


def _log(workspace: Path, message: str) -> None:
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    with (workspace / "run.log").open("a", encoding="utf-8") as fh:
        fh.write(f"{stamp} {message}\n")


class _WorkspaceLock:
    """Advisory single-process lock: a .lock file holding the owner's pid."""

    def __init__(self, workspace: Path):
        self.path = workspace / ".lock"

    def __enter__(self):
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise ValidationError(
                f"workspace {self.path.parent} is locked by another process "
                f"(remove {self.path.name} if that process is gone)")
        with os.fdopen(fd, "w") as fh:
            fh.write(str(os.getpid()))
        return self

    def __exit__(self, *exc):
        try:
            self.path.unlink()
        except FileNotFoundError:
            pass
        return False


# ---------------------------------------------------------------------------
# stages

def stage_sample(cfg: PipelineConfig, ws: Path) -> None:
    if not cfg.corpus_root:
        raise ValidationError("sample needs a corpus root: set 'corpus_root' "
                              "in the config file")
    root = Path(cfg.corpus_root)
    registry = cfg.load_registry()
    if cfg.languages:
        codes = list(cfg.languages)
        missing = [c for c in codes if not (root / f"{c}.txt").exists()]
        if missing:
            raise ValidationError(
                f"no corpus file for configured language(s): "
                f"{', '.join(sorted(missing))}")
    else:
        codes = sorted(c for c in registry.codes if (root / f"{c}.txt").exists())
    if not codes:
        raise ValidationError(f"no <code>.txt corpus files found in {root}")
    policy = SamplingPolicy(cap=cfg.cap, seed=cfg.seed)
    shards = [sample(ingest_shard(root / f"{c}.txt", c, registry), policy)
              for c in codes]
    _write_json(ws / "sampled.json", {
        "policy": {"cap": policy.cap, "seed": policy.seed},
        "shards": [
            {"language": s.language, "source_tag": f"{s.language}.txt",
             "sentences": [[i, t] for i, t in s.sentences]}
            for s in shards
        ],
        "stats": corpus_stats(shards),
    }, cfg.digest())


def _sampled_shards(ws: Path) -> list[CorpusShard]:
    doc = _read_artifact(ws, "sampled.json", "sample")
    return [
        CorpusShard(language=s["language"],
                    sentences=tuple((int(i), t) for i, t in s["sentences"]),
                    source_tag=s.get("source_tag", ""))
        for s in doc["shards"]
    ]


def stage_embed(cfg: PipelineConfig, ws: Path) -> None:
    shards = _sampled_shards(ws)
    if bool(cfg.embeddings) == bool(cfg.endpoint):
        raise ValidationError("embed needs exactly one source: --embeddings "
                              "<file> or --endpoint <url>")
    sets: list[SentenceEmbeddingSet] = []
    if cfg.embeddings:
        available = {s.language: s for s in load_embeddings(cfg.embeddings)}
        for shard in shards:
            source = available.get(shard.language)
            if source is None:
                raise ValidationError(
                    f"{cfg.embeddings} has no vectors for language "
                    f"{shard.language!r}")
            by_id = {sid: row for sid, row in zip(source.ids, source.matrix)}
            missing = [i for i, _ in shard.sentences if i not in by_id]
            if missing:
                raise ValidationError(
                    f"{cfg.embeddings} lacks vectors for {shard.language!r} "
                    f"sentence ids {missing}")
            ids = tuple(i for i, _ in shard.sentences)
            sets.append(SentenceEmbeddingSet(
                language=shard.language, dim=source.dim, ids=ids,
                matrix=np.vstack([by_id[i] for i in ids])))
    else:
        token = os.environ.get(AUTH_TOKEN_ENV)
        for shard in shards:
            sets.append(fetch_embeddings(cfg.endpoint, shard, cfg.batch,
                                         auth_token=token))
    write_embeddings(sets, ws / "embeddings.jsonl",
                     extra_header={"config_digest": cfg.digest()})


def stage_repr(cfg: PipelineConfig, ws: Path) -> None:
    path = ws / "embeddings.jsonl"
    if not path.exists():
        raise ValidationError(
            "missing input embeddings.jsonl; run `sprachbund embed` first")
    sets = load_embeddings(path)
    reps = centroid_all(sets)
    _write_json(ws / "representations.json", {
        "dim": reps[0].dim if reps else 0,
        "representations": [
            {"lang": r.language, "vec": [float(x) for x in r.vector],
             "sample_count": r.sample_count}
            for r in reps
        ],
    }, cfg.digest())


def _load_reps(ws: Path) -> list[LanguageRepresentation]:
    doc = _read_artifact(ws, "representations.json", "repr")
    return [
        LanguageRepresentation(language=r["lang"],
                               vector=np.asarray(r["vec"], dtype=np.float32),
                               sample_count=int(r["sample_count"]))
        for r in doc["representations"]
    ]


def stage_simmat(cfg: PipelineConfig, ws: Path) -> None:
    matrix = build_matrix(_load_reps(ws))
    _write_json(ws / "simmat.json", matrix.to_json(), cfg.digest())
    (ws / "simmat.csv").write_text(
        f"# v=1 config_digest={cfg.digest()}\n" + matrix.to_csv(),
        encoding="utf-8")


def _load_simmat(cfg: PipelineConfig, ws: Path) -> SimilarityMatrix:
    if cfg.matrix:
        return load_matrix(cfg.matrix)
    return SimilarityMatrix.from_json(_read_artifact(ws, "simmat.json", "simmat"))


def stage_cluster(cfg: PipelineConfig, ws: Path) -> None:
    matrix = _load_simmat(cfg, ws)
    dendrogram = agglomerate(matrix)
    _write_json(ws / "dendrogram.json", dendrogram.to_json(), cfg.digest())
    assignment = cut(dendrogram, cfg.k)
    _write_json(ws / "assignment.json", assignment.to_json(), cfg.digest())


def _shard_index(cfg: PipelineConfig, codes) -> dict[str, list[str]]:
    root = Path(cfg.corpus_root) if cfg.corpus_root else None
    index: dict[str, list[str]] = {}
    for code in codes:
        if root is not None and (root / f"{code}.txt").exists():
            index[code] = [f"{code}.txt"]
    return index


def stage_partition(cfg: PipelineConfig, ws: Path) -> None:
    matrix = _load_simmat(cfg, ws)
    source_digest = None
    if cfg.embeddings and Path(cfg.embeddings).exists():
        source_digest = hashlib.sha256(
            Path(cfg.embeddings).read_bytes()).hexdigest()[:16]
    provenance = {
        "seed": cfg.seed,
        "embedding_source": (f"file:{cfg.embeddings}" if cfg.embeddings
                             else f"endpoint:{cfg.endpoint}" if cfg.endpoint
                             else "unspecified"),
        "embedding_source_digest": source_digest,
        "corpus_root": cfg.corpus_root,
        "config_digest": cfg.digest(),
    }
    index = _shard_index(cfg, matrix.languages)
    if cfg.sweep:
        manifests = sweep(matrix, cfg.sweep, index,
                          allow_missing=cfg.allow_missing,
                          provenance=provenance)
    else:
        doc = _read_artifact(ws, "assignment.json", "cluster")
        assignment = SprachbundAssignment.from_json(doc)
        manifests = [build_manifest(assignment, matrix, index,
                                    allow_missing=cfg.allow_missing,
                                    provenance=provenance)]
    for manifest in manifests:
        payload = manifest.to_json()
        payload.pop("v", None)
        _write_json(ws / f"manifest_k{manifest.k}.json", payload, cfg.digest())


def stage_analyze(cfg: PipelineConfig, ws: Path) -> None:
    matrix = _load_simmat(cfg, ws)
    registry = cfg.load_registry()
    table = cfg.load_lexical_table()
    assignment = None
    if (ws / "assignment.json").exists():
        assignment = SprachbundAssignment.from_json(
            _read_artifact(ws, "assignment.json", "cluster"))
    features = tuple(
        f for f in registry.feature_names
        if any(f in r.syntax for r in registry))
    report = build_report(matrix, table, registry, assignment, features)
    _write_json(ws / "analysis.json", {"report": report.to_json()}, cfg.digest())
    sys.stdout.write(report.format_table())


def stage_project(cfg: PipelineConfig, ws: Path) -> None:
    reps = _load_reps(ws)
    registry = cfg.load_registry()
    projection = project(reps, cfg.tsne_params())
    svg, data_doc = emit_plot(projection, registry, cfg.color_by,
                              point_radius=cfg.point_radius,
                              font_size=cfg.font_size)
    _write_json(ws / "projection.json", data_doc, cfg.digest())
    (ws / "projection.svg").write_text(
        f"<!-- v=1 config_digest={cfg.digest()} -->\n" + svg,
        encoding="utf-8")


_STAGES = {
    "sample": stage_sample,
    "embed": stage_embed,
    "repr": stage_repr,
    "simmat": stage_simmat,
    "cluster": stage_cluster,
    "partition": stage_partition,
    "analyze": stage_analyze,
    "project": stage_project,
}


def run(subcommand: str, cfg: PipelineConfig) -> None:
    ws = cfg.workspace()
    try:
        ws.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ValidationError(f"output directory {ws} is not writable: {exc}")
    stages = STAGE_ORDER if subcommand == "all" else (subcommand,)
    with _WorkspaceLock(ws):
        for stage in stages:
            try:
                _STAGES[stage](cfg, ws)
            except SprachbundError as exc:
                _log(ws, f"{stage} digest={cfg.digest()} status=error: {exc}")
                raise
            _log(ws, f"{stage} digest={cfg.digest()} status=ok")


# ---------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A003 - argparse API
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="sprachbund", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", metavar="subcommand")
    for name, help_text in [
        ("sample", "ingest corpus shards and apply capped random sampling"),
        ("embed", "obtain sentence embeddings from a file or service"),
        ("repr", "reduce each language's embeddings to its centroid"),
        ("simmat", "build the cosine similarity matrix"),
        ("cluster", "agglomerate and cut into K clusters"),
        ("partition", "emit corpus-partition manifest(s) with pivots"),
        ("analyze", "lexical correlation, family purity, syntax agreement"),
        ("project", "t-SNE to 2-D and render the labeled scatter plot"),
        ("all", "run every stage in order"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--k", type=int, help="number of clusters")
        p.add_argument("--sweep", help="comma-separated K list, e.g. 1,2,4,8")
        p.add_argument("--cap", type=int, help="max sentences per language")
        p.add_argument("--seed", type=int, help="seed for sampling/clustering")
        p.add_argument("--endpoint", help="embedding service base URL")
        p.add_argument("--embeddings", help="precomputed embeddings file")
        p.add_argument("--out", help="workspace directory for artifacts")
        p.add_argument("--allow-missing", dest="allow_missing",
                       help="codes allowed to lack corpus shards")
        p.add_argument("--point-radius", dest="point_radius", type=float,
                       help="plot point radius")
        p.add_argument("--font-size", dest="font_size", type=int,
                       help="plot label font size")
        p.add_argument("--json-errors", dest="json_errors", action="store_true",
                       help="emit machine-readable error JSON on stderr")
    return parser


def _emit_error(exc: SprachbundError, kind: str, json_errors: bool) -> None:
    if json_errors:
        payload = {"error": kind, "message": str(exc)}
        missing = getattr(exc, "missing_ids", None)
        if missing is not None:
            payload["missing_ids"] = missing
            payload["language"] = getattr(exc, "language", None)
        sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        sys.stderr.write(f"sprachbund: error: {exc}\n")


def main(argv=None) -> int:
    parser = build_parser()
    raw_args = list(argv) if argv is not None else sys.argv[1:]
    json_errors = "--json-errors" in raw_args
    try:
        args = parser.parse_args(argv)
        if not args.subcommand:
            raise UsageError("a subcommand is required "
                             f"(one of: {', '.join(STAGE_ORDER)}, all)")
        json_errors = getattr(args, "json_errors", json_errors)
        cfg = resolve_config(args)
        run(args.subcommand, cfg)
        return 0
    except UsageError as exc:
        _emit_error(exc, "usage", json_errors)
        return 1
    except ValidationError as exc:
        _emit_error(exc, "validation", json_errors)
        return 2
    except ServiceError as exc:
        _emit_error(exc, "service", json_errors)
        return 3


if __name__ == "__main__":
    sys.exit(main())
