"""Distance classifiers and the random baseline.

Note on naming: ``chebyshev_distance`` is the city-block (L1) sum, not the
L-infinity maximum that usually carries that name.  The command line flag
``-cheb`` selects it, so the name is kept.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

DEFAULT_MINKOWSKI_R = 6.0
DEFAULT_DIFF_ERROR = 1e-4
DEFAULT_DIFF_PENALTY = 1.0


class Metric(str, Enum):
    CHEBYSHEV = "cheb"
    EUCLIDEAN = "eucl"
    MINKOWSKI = "mink"
    MAHALANOBIS = "mah"
    DIFF = "diff"
    HAMMING = "hamming"
    COSINE = "cos"


@dataclass(frozen=True, order=True)
class Result:
    score: float
    subject_id: int

    def __post_init__(self):
        if self.subject_id < 0:
            raise ValueError(f"subject id must be >= 0, got {self.subject_id}")


class ResultSet:
    """Results ordered by ascending score; ties go to the smaller id."""

    def __init__(self, results: Sequence[Result] = ()):
        self.results = sorted(results, key=lambda r: (r.score, r.subject_id))

    def __len__(self):
        return len(self.results)

    def __iter__(self):
        return iter(self.results)

    def __getitem__(self, i):
        return self.results[i]

    @property
    def closest(self) -> Result:
        if not self.results:
            raise LookupError("empty result set")
        return self.results[0]

    @property
    def second_closest(self) -> Result:
        if len(self.results) < 2:
            raise LookupError("second closest needs at least two results")
        return self.results[1]

    @property
    def ids(self) -> list[int]:
        return [r.subject_id for r in self.results]


def _pair(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"vector lengths differ: {x.size} vs {y.size}")
    return x, y


def chebyshev_distance(x, y) -> float:
    x, y = _pair(x, y)
    return float(np.sum(np.abs(x - y)))


def euclidean_distance(x, y) -> float:
    x, y = _pair(x, y)
    d = x - y
    return float(np.sqrt(np.dot(d, d)))


def minkowski_distance(x, y, r: float = DEFAULT_MINKOWSKI_R) -> float:
    if r < 1:
        raise ValueError(f"Minkowski factor must be >= 1, got {r}")
    x, y = _pair(x, y)
    d = np.abs(x - y)
    if r == 1:
        return float(np.sum(d))
    if r == 2:
        return float(np.sqrt(np.dot(d, d)))
    return float(np.sum(d ** r) ** (1.0 / r))


def mahalanobis_distance(x, y, cov=None) -> float:
    """``sqrt((x-y) C^-1 (x-y)^T)``; ``cov=None`` means the identity."""
    x, y = _pair(x, y)
    d = x - y
    if cov is None:
        return float(np.sqrt(np.dot(d, d)))
    c = np.asarray(cov, dtype=np.float64)
    if c.shape != (d.size, d.size):
        raise ValueError(f"covariance must be {d.size}x{d.size}, got {c.shape}")
    if not np.allclose(c, c.T):
        raise ValueError("covariance matrix is not symmetric")
    try:
        chol = np.linalg.cholesky(c)
    except np.linalg.LinAlgError as exc:
        raise ValueError("covariance matrix is not positive definite") from exc
    z = np.linalg.solve(chol, d)
    return float(np.sqrt(np.dot(z, z)))


def diff_distance(x, y, e: float = DEFAULT_DIFF_ERROR, p: float = DEFAULT_DIFF_PENALTY) -> float:
    """Close elements earn a bonus of ``-e``; the rest cost ``|d| + p``. Can be negative."""
    if e <= 0:
        raise ValueError(f"error threshold must be positive, got {e}")
    x, y = _pair(x, y)
    d = np.abs(x - y)
    return float(np.sum(np.where(d > e, d + p, -e)))


def hamming_distance(x, y) -> float:
    """Number of positions that differ exactly."""
    x, y = _pair(x, y)
    return float(np.count_nonzero(x != y))


def cosine_similarity(x, y) -> float:
    x, y = _pair(x, y)
    nx = np.linalg.norm(x)
    ny = np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise ValueError("cosine similarity is undefined for a zero vector")
    return float(np.dot(x, y) / (nx * ny))


@dataclass(frozen=True)
class DistanceParams:
    minkowski_r: float = DEFAULT_MINKOWSKI_R
    diff_error: float = DEFAULT_DIFF_ERROR
    diff_penalty: float = DEFAULT_DIFF_PENALTY
    covariance: object = None


def distance(metric: Metric, x, y, params: DistanceParams | None = None) -> float:
    """Dissimilarity under ``metric``; cosine is turned into ``1 - similarity``."""
    params = params or DistanceParams()
    metric = Metric(metric)
    if metric is Metric.CHEBYSHEV:
        return chebyshev_distance(x, y)
    if metric is Metric.EUCLIDEAN:
        return euclidean_distance(x, y)
    if metric is Metric.MINKOWSKI:
        return minkowski_distance(x, y, params.minkowski_r)
    if metric is Metric.MAHALANOBIS:
        return mahalanobis_distance(x, y, params.covariance)
    if metric is Metric.DIFF:
        return diff_distance(x, y, params.diff_error, params.diff_penalty)
    if metric is Metric.HAMMING:
        return hamming_distance(x, y)
    if metric is Metric.COSINE:
        return 1.0 - cosine_similarity(x, y)
    raise ValueError(f"unknown metric {metric!r}")


def classify_distance(v, clusters: Mapping[int, object], metric: Metric,
                      params: DistanceParams | None = None) -> ResultSet:
    """Rank every cluster by its distance to ``v``."""
    if not clusters:
        raise ValueError("no clusters to classify against")
    v = np.asarray(v, dtype=np.float64)
    results = []
    for sid, mean in clusters.items():
        mean = np.asarray(mean, dtype=np.float64)
        if mean.shape != v.shape:
            raise ValueError(
                f"cluster for subject {sid} has length {mean.size}, feature vector {v.size}")
        results.append(Result(distance(metric, v, mean, params), int(sid)))
    return ResultSet(results)


def classify_random(ids: Sequence[int], seed=None) -> ResultSet:
    """Uniform pick, plus a different uniform pick as runner-up when possible."""
    ids = list(dict.fromkeys(int(i) for i in ids))
    if not ids:
        raise ValueError("no subject ids to pick from")
    rng = random.Random(seed)
    first = rng.choice(ids)
    results = [Result(0.0, first)]
    rest = [i for i in ids if i != first]
    if rest:
        results.append(Result(1.0, rng.choice(rest)))
    return ResultSet(results)
