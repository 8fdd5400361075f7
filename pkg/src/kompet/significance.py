"""Almost Stochastic Order testing over score samples, with Bonferroni correction.

The violation ratio compares empirical quantile functions on a midpoint grid:
with Q the nearest-rank quantile function and t_i = (i - 0.5) / G,

    eps = sum_i max(Q_b(t_i) - Q_a(t_i), 0)^2 / sum_i (Q_a(t_i) - Q_b(t_i))^2

so eps(a, b) + eps(b, a) = 1 whenever the denominator is nonzero, and 0.5 by
convention otherwise. eps_min subtracts a normal-quantile multiple of the
bootstrap standard deviation and clips to [0, 1]; strict eps_min < 0.5 is the
dominance verdict. Everything is deterministic for a fixed seed: bootstrap
resample indices are pre-drawn from a seeded generator and then evaluated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from statistics import NormalDist
from typing import IO, Sequence

import numpy as np

from .errors import InputError

DOMINANCE_THRESHOLD = 0.5


@dataclass(frozen=True)
class ScoreSample:
    """Scores of one model over multiple runs (e.g. random seeds)."""

    model_id: str
    scores: tuple[float, ...]

    def __post_init__(self):
        if len(self.scores) < 2:
            raise InputError(f"sample {self.model_id!r} needs >= 2 scores, got {len(self.scores)}")
        if not all(np.isfinite(self.scores)):
            raise InputError(f"sample {self.model_id!r} contains non-finite scores")


@dataclass(frozen=True)
class AsoResult:
    epsilon_hat: float
    sigma_boot: float
    epsilon_min: float
    alpha: float
    dominant: bool

    def to_dict(self) -> dict:
        return {
            "epsilon_hat": self.epsilon_hat,
            "sigma_boot": self.sigma_boot,
            "epsilon_min": self.epsilon_min,
            "alpha": self.alpha,
            "dominant": self.dominant,
        }


def _scores(sample) -> np.ndarray:
    if isinstance(sample, ScoreSample):
        return np.asarray(sample.scores, dtype=np.float64)
    arr = np.asarray(sample, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 2:
        raise InputError("a score sample needs at least 2 values")
    if not np.all(np.isfinite(arr)):
        raise InputError("score sample contains non-finite values")
    return arr


def _quantile_indices(n: int, grid_size: int) -> np.ndarray:
    # Nearest rank: Q(t) is the sorted sample at index ceil(t * n), 1-based.
    t = (np.arange(1, grid_size + 1) - 0.5) / grid_size
    return np.ceil(t * n).astype(np.int64) - 1


def violation_ratio(a, b, grid_size: int = 1000) -> float:
    """Degree to which 'a stochastically dominates b' is violated, in [0, 1].

    Higher scores are better; 0 means full dominance of a, 0.5 is returned
    for identical quantile functions.
    """
    if grid_size < 1:
        raise InputError(f"grid_size must be positive, got {grid_size}")
    sa = np.sort(_scores(a))
    sb = np.sort(_scores(b))
    qa = sa[_quantile_indices(sa.size, grid_size)]
    qb = sb[_quantile_indices(sb.size, grid_size)]
    diff = qb - qa
    den = float(np.sum(diff * diff))
    if den == 0.0:
        return 0.5
    pos = np.where(diff > 0.0, diff, 0.0)
    return float(np.sum(pos * pos) / den)


def aso(
    a,
    b,
    alpha: float = 0.05,
    bootstrap_iters: int = 1000,
    seed=None,
    *,
    grid_size: int = 1000,
    threshold: float = DOMINANCE_THRESHOLD,
) -> AsoResult:
    """Almost Stochastic Order test of 'a better than b' at confidence alpha."""
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must be in (0, 1), got {alpha}")
    if bootstrap_iters < 100:
        raise InputError(f"bootstrap_iters below 100 is unstable, got {bootstrap_iters}")
    sa = _scores(a)
    sb = _scores(b)
    eps_hat = violation_ratio(sa, sb, grid_size)

    rng = np.random.default_rng(seed)
    idx_a = rng.integers(0, sa.size, size=(bootstrap_iters, sa.size))
    idx_b = rng.integers(0, sb.size, size=(bootstrap_iters, sb.size))
    ra = np.sort(sa[idx_a], axis=1)
    rb = np.sort(sb[idx_b], axis=1)
    qa = ra[:, _quantile_indices(sa.size, grid_size)]
    qb = rb[:, _quantile_indices(sb.size, grid_size)]
    diff = qb - qa
    den = np.sum(diff * diff, axis=1)
    pos = np.where(diff > 0.0, diff, 0.0)
    num = np.sum(pos * pos, axis=1)
    eps_boot = np.where(den == 0.0, 0.5, np.divide(num, den, where=den != 0.0))
    sigma = float(np.std(eps_boot))

    z = NormalDist().inv_cdf(1.0 - alpha)
    eps_min = min(max(eps_hat - z * sigma, 0.0), 1.0)
    return AsoResult(
        epsilon_hat=eps_hat,
        sigma_boot=sigma,
        epsilon_min=eps_min,
        alpha=alpha,
        dominant=eps_min < threshold,
    )


def bonferroni(alpha: float, m: int) -> float:
    """Significance level divided by the number of simultaneous comparisons."""
    if m < 1:
        raise InputError(f"number of comparisons must be >= 1, got {m}")
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must be in (0, 1), got {alpha}")
    return alpha / m


@dataclass(frozen=True)
class AsoMatrix:
    """All-pairs ASO results; entry (i, j) tests 'model i better than model j'."""

    model_ids: tuple[str, ...]
    results: tuple[tuple[AsoResult | None, ...], ...]
    alpha: float
    alpha_adjusted: float
    threshold: float

    def to_tsv(self) -> str:
        """Grid of epsilon_min values; dominance cells carry a trailing '*'."""
        lines = ["model\t" + "\t".join(self.model_ids)]
        for i, mid in enumerate(self.model_ids):
            cells = [mid]
            for j in range(len(self.model_ids)):
                r = self.results[i][j]
                if r is None:
                    cells.append("-")
                else:
                    cells.append(f"{r.epsilon_min:.4f}" + ("*" if r.dominant else ""))
            lines.append("\t".join(cells))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        pairs = []
        for i, a in enumerate(self.model_ids):
            for j, b in enumerate(self.model_ids):
                r = self.results[i][j]
                if r is not None:
                    pairs.append({"a": a, "b": b, **r.to_dict()})
        return {
            "models": list(self.model_ids),
            "alpha": self.alpha,
            "alpha_adjusted": self.alpha_adjusted,
            "threshold": self.threshold,
            "comparisons": pairs,
        }


def compare_all(
    samples: Sequence[ScoreSample],
    alpha: float = 0.05,
    *,
    bootstrap_iters: int = 1000,
    grid_size: int = 1000,
    seed=0,
    threshold: float = DOMINANCE_THRESHOLD,
) -> AsoMatrix:
    """ASO over every ordered model pair, Bonferroni-adjusted for their count."""
    if len(samples) < 2:
        raise InputError(f"need at least 2 samples, got {len(samples)}")
    ids = [s.model_id for s in samples]
    if len(set(ids)) != len(ids):
        raise InputError("duplicate model_ids in samples")
    m = len(samples) * (len(samples) - 1)
    adjusted = bonferroni(alpha, m)
    rows = []
    for i, si in enumerate(samples):
        row: list[AsoResult | None] = []
        for j, sj in enumerate(samples):
            if i == j:
                row.append(None)
                continue
            cell_seed = None if seed is None else np.random.SeedSequence((seed, i, j))
            row.append(
                aso(
                    si,
                    sj,
                    adjusted,
                    bootstrap_iters=bootstrap_iters,
                    seed=cell_seed,
                    grid_size=grid_size,
                    threshold=threshold,
                )
            )
        rows.append(tuple(row))
    return AsoMatrix(
        model_ids=tuple(ids),
        results=tuple(rows),
        alpha=alpha,
        alpha_adjusted=adjusted,
        threshold=threshold,
    )


def read_runs(source: str | Path | IO[str]) -> list[ScoreSample]:
    """Read the runs file: JSON [{"model": str, "scores": [float, ...]}]."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"runs file is not valid JSON ({exc.msg})") from None
    if not isinstance(data, list):
        raise InputError("runs file must be a JSON array")
    samples = []
    for i, entry in enumerate(data):
        if not isinstance(entry, dict) or "model" not in entry or "scores" not in entry:
            raise InputError(f"runs entry {i} must have 'model' and 'scores'")
        scores = entry["scores"]
        if not isinstance(scores, list):
            raise InputError(f"runs entry {i}: scores must be a list")
        samples.append(ScoreSample(model_id=str(entry["model"]), scores=tuple(float(x) for x in scores)))
    return samples
