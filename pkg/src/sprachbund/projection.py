"""2-D projection of language representations via exact t-SNE, plus plotting.

The t-SNE here is the exact O(M^2) algorithm, not a tree approximation:
Gaussian conditional affinities with a per-row bandwidth found by binary
search so every conditional distribution hits the target perplexity, a
symmetrized joint distribution, and gradient descent on KL(P || Q) against a
Student-t Q with early exaggeration, momentum, and per-coordinate adaptive
gains. Everything is seeded and pure numpy, so a fixed seed reproduces the
embedding bit for bit.

Input distances are cosine distances (1 - cos), matching the metric used for
clustering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .registry import Registry

_EPS = 1e-12


@dataclass(frozen=True)
class TsneParams:
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    initial_momentum: float = 0.5
    final_momentum: float = 0.8
    momentum_switch_iter: int = 250
    seed: int = 0
    init_scale: float = 1e-4
    min_gain: float = 0.01

    def to_json(self) -> dict:
        return {
            "perplexity": self.perplexity,
            "iterations": self.iterations,
            "learning_rate": self.learning_rate,
            "early_exaggeration": self.early_exaggeration,
            "exaggeration_iters": self.exaggeration_iters,
            "initial_momentum": self.initial_momentum,
            "final_momentum": self.final_momentum,
            "momentum_switch_iter": self.momentum_switch_iter,
            "seed": self.seed,
        }


@dataclass(eq=False)
class TsneResult:
    points: np.ndarray  # float64, shape (M, 2), unnormalized
    kl_trace: tuple[tuple[int, float], ...]  # (iteration, KL against true P)
    params: TsneParams


def cosine_distances(vectors: np.ndarray) -> np.ndarray:
    """Pairwise 1 - cosine over row vectors, clamped into [0, 2], zero diagonal."""
    v = np.asarray(vectors, dtype=np.float64)
    norms = np.linalg.norm(v, axis=1)
    if np.any(norms == 0.0):
        raise ValidationError("cannot take cosine distances of a zero vector")
    unit = v / norms[:, None]
    d = 1.0 - unit @ unit.T
    np.clip(d, 0.0, 2.0, out=d)
    np.fill_diagonal(d, 0.0)
    return d


def _entropy_and_row(dist_row: np.ndarray, beta: float) -> tuple[float, np.ndarray]:
    """Shannon entropy (bits) and the conditional distribution for one bandwidth."""
    logits = -dist_row * beta
    logits -= logits.max()
    p = np.exp(logits)
    total = p.sum()
    p /= total
    nz = p > 0
    entropy_nats = -float(np.sum(p[nz] * np.log(p[nz])))
    return entropy_nats / math.log(2.0), p


def conditional_affinities(distances: np.ndarray, perplexity: float, *,
                           tol: float = 1e-6, max_steps: int = 200) -> np.ndarray:
    """Row-stochastic conditional affinities with per-row bandwidth search.

    For each row i the precision beta_i of the Gaussian kernel
    exp(-d_ij * beta_i) is bisected until the conditional distribution's
    Shannon entropy matches log2(perplexity) within ``tol`` bits. The
    diagonal is zero.
    """
    d = np.asarray(distances, dtype=np.float64)
    m = d.shape[0]
    if d.ndim != 2 or d.shape != (m, m):
        raise ValidationError("distance matrix must be square")
    if np.any(d < 0):
        raise ValidationError("distances must be non-negative")
    if not 1.0 < perplexity <= m - 1:
        raise ValidationError(
            f"perplexity must lie in (1, {m - 1}] for {m} points, "
            f"got {perplexity}")
    target_bits = math.log2(perplexity)
    p = np.zeros((m, m), dtype=np.float64)
    others = np.arange(m)
    for i in range(m):
        row = d[i, others != i]
        beta, beta_lo, beta_hi = 1.0, 0.0, math.inf
        entropy, cond = _entropy_and_row(row, beta)
        for _ in range(max_steps):
            diff = entropy - target_bits
            if abs(diff) <= tol:
                break
            if diff > 0:  # too flat: sharpen
                beta_lo = beta
                beta = beta * 2.0 if math.isinf(beta_hi) else (beta + beta_hi) / 2.0
            else:
                beta_hi = beta
                beta = (beta + beta_lo) / 2.0
            entropy, cond = _entropy_and_row(row, beta)
        p[i, others != i] = cond
    return p


def joint_affinities(conditional: np.ndarray) -> np.ndarray:
    """Symmetrized joint distribution: (P + P^T) / 2M. Sums to 1."""
    m = conditional.shape[0]
    return (conditional + conditional.T) / (2.0 * m)


def _kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / np.maximum(q[mask], _EPS))))


def tsne(reps: Sequence, params: TsneParams = TsneParams()) -> TsneResult:
    """Exact t-SNE of language representations down to 2-D.

    ``reps`` is a sequence of objects with ``.vector`` (or raw row vectors).
    Requires at least 4 points and perplexity < (M - 1) / 3.
    """
    vectors = np.vstack([getattr(r, "vector", r) for r in reps]).astype(np.float64)
    m = vectors.shape[0]
    if m < 4:
        raise ValidationError(f"t-SNE needs at least 4 points, got {m}")
    if params.perplexity >= (m - 1) / 3.0:
        raise ValidationError(
            f"perplexity {params.perplexity} too large for {m} points; "
            f"needs perplexity < {(m - 1) / 3.0:.2f}")
    distances = cosine_distances(vectors)
    if float(distances.max()) == 0.0:
        raise ValidationError("degenerate input: all points are identical")

    p_true = joint_affinities(conditional_affinities(distances, params.perplexity))

    rng = np.random.default_rng(params.seed)
    y = rng.standard_normal((m, 2)) * params.init_scale
    velocity = np.zeros_like(y)
    gains = np.ones_like(y)
    trace: list[tuple[int, float]] = []

    for it in range(params.iterations):
        exaggerating = it < params.exaggeration_iters
        p = p_true * params.early_exaggeration if exaggerating else p_true

        sq = np.sum(np.square(y), axis=1)
        num = 1.0 / (1.0 + np.add(np.add(-2.0 * (y @ y.T), sq).T, sq))
        np.fill_diagonal(num, 0.0)
        q = num / num.sum()

        grad_coeff = (p - np.maximum(q, _EPS)) * num
        grad = 4.0 * (np.diag(grad_coeff.sum(axis=1)) - grad_coeff) @ y

        momentum = (params.initial_momentum
                    if it < params.momentum_switch_iter
                    else params.final_momentum)
        same_sign = np.sign(grad) == np.sign(velocity)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        np.maximum(gains, params.min_gain, out=gains)
        velocity = momentum * velocity - params.learning_rate * gains * grad
        y = y + velocity
        y = y - y.mean(axis=0)

        last_exaggerated = it == params.exaggeration_iters - 1
        if (it + 1) % 50 == 0 or last_exaggerated or it == params.iterations - 1:
            trace.append((it + 1, _kl_divergence(p_true, np.maximum(q, _EPS))))

    return TsneResult(points=y, kl_trace=tuple(trace), params=params)


def minmax_normalize(points: np.ndarray) -> np.ndarray:
    """Per-axis (x - min) / (max - min) into [0, 1]; constant axes map to 0.5."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValidationError("need a non-empty (n, d) array of points")
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = hi - lo
    out = np.empty_like(pts)
    for axis in range(pts.shape[1]):
        if span[axis] == 0.0:
            out[:, axis] = 0.5
        else:
            out[:, axis] = (pts[:, axis] - lo[axis]) / span[axis]
    return out


@dataclass(eq=False)
class Projection2D:
    """Normalized 2-D coordinates per language, with the run's parameters."""

    languages: tuple[str, ...]
    points: np.ndarray  # float64, shape (M, 2), in [0, 1]^2
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.languages = tuple(self.languages)
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.shape != (len(self.languages), 2):
            raise ValidationError(
                f"need one (x, y) point per language, got shape "
                f"{self.points.shape} for {len(self.languages)} languages")
        if np.any(self.points < 0.0) or np.any(self.points > 1.0):
            raise ValidationError("projection coordinates must lie in [0, 1]")
        self.params = dict(self.params)

    def to_json(self) -> dict:
        return {
            "languages": list(self.languages),
            "xy": [[float(x), float(y)] for x, y in self.points],
            "params": dict(self.params),
        }


def project(reps: Sequence, params: TsneParams = TsneParams()) -> Projection2D:
    """t-SNE then min-max normalization, packaged with language codes."""
    languages = tuple(getattr(r, "language") for r in reps)
    result = tsne(reps, params)
    return Projection2D(
        languages=languages,
        points=minmax_normalize(result.points),
        params=params.to_json(),
    )


# 24 visually distinct fills; categories are assigned in sorted order and the
# palette wraps if there are ever more categories than colors
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
    "#98df8a", "#ff9896", "#c5b0d5", "#c49c94", "#f7b6d2", "#dbdb8d",
    "#9edae5", "#393b79", "#637939", "#8c6d31", "#843c39", "#7b4173",
)
MISSING_COLOR = "#999999"


def emit_plot(projection: Projection2D, registry: Registry,
              color_by: str = "family", *,
              point_radius: float = 5.0, font_size: int = 11,
              size: int = 1000) -> tuple[str, dict]:
    """Labeled SVG scatter plot plus its JSON data.

    Every point is labeled with its language code and colored by the chosen
    attribute ("family" or a syntax feature name); languages missing the
    attribute are gray. Output bytes are deterministic for fixed inputs.
    """
    if color_by != "family" and color_by not in registry.feature_names:
        raise ValidationError(
            f"unknown color_by attribute {color_by!r}; expected 'family' or "
            f"one of {', '.join(registry.feature_names)}")
    attrs: dict[str, str | None] = {}
    for code in projection.languages:
        record = registry.get(code)
        if record is None:
            raise ValidationError(f"projected language {code!r} is not registered")
        if color_by == "family":
            attrs[code] = record.family
        else:
            attrs[code] = record.syntax.get(color_by)
    categories = sorted({v for v in attrs.values() if v is not None})
    colors = {cat: PALETTE[i % len(PALETTE)] for i, cat in enumerate(categories)}

    margin = 60.0
    span = size - 2 * margin
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}" '
        f'width="{size}" height="{size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for code, (x, y) in zip(projection.languages, projection.points):
        px = margin + float(x) * span
        py = size - margin - float(y) * span
        fill = colors.get(attrs[code], MISSING_COLOR)
        parts.append(
            f'<circle cx="{px:.2f}" cy="{py:.2f}" r="{point_radius:g}" '
            f'fill="{fill}" fill-opacity="0.85"/>')
        parts.append(
            f'<text x="{px + point_radius + 2:.2f}" y="{py + font_size / 3:.2f}" '
            f'font-size="{font_size}" font-family="sans-serif">{code}</text>')
    legend_y = margin / 2
    for i, cat in enumerate(categories):
        ly = legend_y + i * (font_size + 6)
        parts.append(
            f'<rect x="{size - margin * 3:.2f}" y="{ly:.2f}" width="12" '
            f'height="12" fill="{colors[cat]}"/>')
        parts.append(
            f'<text x="{size - margin * 3 + 16:.2f}" y="{ly + 10:.2f}" '
            f'font-size="{font_size}" font-family="sans-serif">{cat}</text>')
    parts.append("</svg>")
    svg = "\n".join(parts) + "\n"

    data = projection.to_json()
    data["color_by"] = color_by
    data["categories"] = categories
    return svg, data
