"""Representative-interval selection.

Two methods: uniform random sampling without replacement, and k-means
over instruction-weighted block vectors with silhouette-driven choice
of k. Both are fully determined by (inputs, seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyPool, KOutOfRange, NTooLarge, SingleCluster
from .ir import BlockTable
from .profiles import IntervalProfile, ProfileSet

METHOD_RANDOM = "random"
METHOD_KMEANS = "kmeans"

DEFAULT_MAX_CLUSTERS = 50
KMEANS_RESTARTS = 10


@dataclass(frozen=True)
class ChosenInterval:
    interval_id: int
    weight: float


@dataclass(frozen=True)
class SelectionResult:
    method: str
    seed: int
    chosen: tuple[ChosenInterval, ...]
    k_used: int | None = None
    silhouette_by_k: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        ids = [c.interval_id for c in self.chosen]
        if len(ids) != len(set(ids)):
            raise ValueError("chosen interval ids must be distinct")
        if self.chosen and abs(sum(c.weight for c in self.chosen) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")

    def weight_of(self, interval_id: int) -> float:
        for c in self.chosen:
            if c.interval_id == interval_id:
                return c.weight
        raise KeyError(interval_id)


def _candidate_pool(profiles: ProfileSet) -> list[IntervalProfile]:
    """Full intervals only; a trailing partial interval is not a unit of work."""
    return [iv for iv in profiles.intervals if not iv.partial]


def select_random(profiles: ProfileSet, n: int, seed: int) -> SelectionResult:
    pool = _candidate_pool(profiles)
    if not pool:
        raise EmptyPool("no complete intervals to sample from")
    if n < 1 or n > len(pool):
        raise NTooLarge(f"sample count {n} outside [1, {len(pool)}]")
    rng = np.random.default_rng(seed)
    picked = rng.choice([iv.interval_id for iv in pool], size=n, replace=False)
    weight = 1.0 / n
    return SelectionResult(
        method=METHOD_RANDOM,
        seed=seed,
        chosen=tuple(ChosenInterval(int(i), weight) for i in sorted(picked)),
    )


def normalize_bbv(interval: IntervalProfile, table: BlockTable) -> np.ndarray:
    """Dense vector of each block's instruction share of the interval.

    Weighting by inst_count makes intervals of unequal actual_size
    comparable; entries sum to 1 by the conservation invariant.
    """
    if interval.actual_size <= 0:
        raise ValueError("interval has no instructions")
    v = np.zeros(len(table), dtype=np.float64)
    for bb_id, count in interval.bbv.items():
        v[bb_id] = count * table.inst_count(bb_id)
    return v / interval.actual_size


def _kmeanspp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    centroids = np.empty((k, points.shape[1]), dtype=np.float64)
    centroids[0] = points[int(rng.integers(n))]
    d2 = np.sum((points - centroids[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        centroids[j] = points[idx]
        d2 = np.minimum(d2, np.sum((points - centroids[j]) ** 2, axis=1))
    return centroids


def _lloyd(points: np.ndarray, centroids: np.ndarray, max_iters: int):
    n = len(points)
    k = len(centroids)
    prev = None
    assign = np.zeros(n, dtype=np.int64)
    for _ in range(max_iters):
        d2 = np.sum((points[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
        assign = np.argmin(d2, axis=1)  # argmin ties resolve to the lowest index
        taken: set[int] = set()
        while True:
            empty = [c for c in range(k) if not np.any(assign == c)]
            if not empty:
                break
            # revive an emptied cluster with the point farthest from its
            # assigned centroid; stealing can cascade, hence the loop
            for c in empty:
                own = d2[np.arange(n), assign].copy()
                for t in taken:
                    own[t] = -1.0
                far = int(np.argmax(own))
                centroids[c] = points[far]
                assign[far] = c
                taken.add(far)
                d2[:, c] = np.sum((points - centroids[c]) ** 2, axis=1)
        if prev is not None and np.array_equal(assign, prev):
            break
        prev = assign
        for c in range(k):
            centroids[c] = points[assign == c].mean(axis=0)
    wcss = float(
        np.sum((points - centroids[assign]) ** 2)
    )
    return assign, centroids, wcss


def kmeans(
    points,
    k: int,
    seed: int,
    max_iters: int = 100,
    restarts: int = KMEANS_RESTARTS,
) -> tuple[np.ndarray, np.ndarray]:
    """Seeded k-means++ plus Lloyd iteration; best of `restarts` runs by WCSS."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        pts = pts.reshape(len(points), -1)
    if k < 1 or k > len(pts):
        raise KOutOfRange(f"k={k} outside [1, {len(pts)}]")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, restarts)):
        centroids = _kmeanspp_init(pts, k, rng)
        assign, centroids, wcss = _lloyd(pts, centroids.copy(), max_iters)
        if best is None or wcss < best[2]:
            best = (assign, centroids, wcss)
    return best[0], best[1]


def silhouette(points, assignments) -> float:
    """Mean silhouette score; singleton-cluster points score 0."""
    pts = np.asarray(points, dtype=np.float64)
    assign = np.asarray(assignments, dtype=np.int64)
    labels = np.unique(assign)
    if len(labels) < 2:
        raise SingleCluster("silhouette needs at least two nonempty clusters")
    n = len(pts)
    dist = np.sqrt(
        np.maximum(np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=2), 0.0)
    )
    scores = np.zeros(n, dtype=np.float64)
    for i in range(n):
        same = assign == assign[i]
        if same.sum() == 1:
            continue
        a = dist[i, same].sum() / (same.sum() - 1)
        b = min(
            dist[i, assign == other].mean() for other in labels if other != assign[i]
        )
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0 else (b - a) / denom
    return float(scores.mean())


def select_kmeans(
    profiles: ProfileSet,
    n_max: int = DEFAULT_MAX_CLUSTERS,
    seed: int = 0,
) -> SelectionResult:
    pool = _candidate_pool(profiles)
    if not pool:
        raise EmptyPool("no complete intervals to cluster")
    table = profiles.block_table
    points = np.stack([normalize_bbv(iv, table) for iv in pool])
    n = len(pool)

    if n == 1 or np.all(points == points[0]):
        return SelectionResult(
            method=METHOD_KMEANS,
            seed=seed,
            chosen=(ChosenInterval(pool[0].interval_id, 1.0),),
            k_used=1,
        )

    ks = list(range(2, min(n_max, n - 1) + 1)) or [2]
    scores: dict[int, float] = {}
    runs: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for k in ks:
        assign, centroids = kmeans(points, k, seed)
        runs[k] = (assign, centroids)
        scores[k] = silhouette(points, assign)

    k_used = max(ks, key=lambda k: (scores[k], -k))
    assign, centroids = runs[k_used]
    chosen = []
    for c in range(k_used):
        members = np.flatnonzero(assign == c)
        d2 = np.sum((points[members] - centroids[c]) ** 2, axis=1)
        rep = members[int(np.argmin(d2))]  # ties: argmin picks first = lowest id
        chosen.append(
            ChosenInterval(pool[int(rep)].interval_id, len(members) / n)
        )
    chosen.sort(key=lambda c: c.interval_id)
    return SelectionResult(
        method=METHOD_KMEANS,
        seed=seed,
        chosen=tuple(chosen),
        k_used=k_used,
        silhouette_by_k=scores,
    )


def selection_to_json(result: SelectionResult) -> str:
    payload = {
        "method": result.method,
        "seed": result.seed,
        "k_used": result.k_used,
        "chosen": [
            {"interval_id": c.interval_id, "weight": c.weight} for c in result.chosen
        ],
        "silhouette_by_k": {str(k): result.silhouette_by_k[k] for k in sorted(result.silhouette_by_k)},
    }
    return json.dumps(payload, indent=2) + "\n"


def selection_from_json(text: str) -> SelectionResult:
    obj = json.loads(text)
    return SelectionResult(
        method=obj["method"],
        seed=obj["seed"],
        chosen=tuple(
            ChosenInterval(c["interval_id"], c["weight"]) for c in obj["chosen"]
        ),
        k_used=obj["k_used"],
        silhouette_by_k={int(k): v for k, v in obj["silhouette_by_k"].items()},
    )


def write_selection(result: SelectionResult, path: str | Path) -> None:
    Path(path).write_text(selection_to_json(result), encoding="utf-8")


def read_selection(path: str | Path) -> SelectionResult:
    return selection_from_json(Path(path).read_text(encoding="utf-8"))
