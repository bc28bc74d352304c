"""Lloyd's K-means with k-means++ seeding."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from tidkit.errors import PreconditionError

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITERS = 100
DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class KMeansResult:
    centroids: np.ndarray
    labels: np.ndarray
    objective_history: tuple[float, ...]
    iterations: int
    converged: bool

    @property
    def objective(self) -> float:
        return self.objective_history[-1]


def squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """(n, k) matrix of squared Euclidean distances, clipped at zero."""
    d2 = (
        np.sum(points**2, axis=1)[:, None]
        - 2.0 * points @ centroids.T
        + np.sum(centroids**2, axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def kmeans_plus_plus(
    points: np.ndarray, k: int, rng: np.random.Generator
) -> np.ndarray:
    """Pick ``k`` initial centers, each with probability proportional to D^2."""
    n = points.shape[0]
    chosen = [int(rng.integers(n))]
    min_d2 = squared_distances(points, points[chosen])[:, 0]
    for _ in range(1, k):
        total = min_d2.sum()
        if total > 0:
            index = int(rng.choice(n, p=min_d2 / total))
        else:
            # every point coincides with a center already
            remaining = np.setdiff1d(np.arange(n), chosen)
            index = int(rng.choice(remaining))
        chosen.append(index)
        min_d2 = np.minimum(min_d2, squared_distances(points, points[[index]])[:, 0])
    return points[chosen].copy()


def _assign(points: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, float]:
    """Nearest-centroid labels; empty clusters take the farthest point.

    Re-seeded centroids are written into ``centroids`` in place.
    """
    k = centroids.shape[0]
    d2 = squared_distances(points, centroids)
    labels = np.argmin(d2, axis=1)
    dist = d2[np.arange(len(points)), labels]
    counts = np.bincount(labels, minlength=k)
    for cluster in np.flatnonzero(counts == 0):
        donors = np.flatnonzero(counts[labels] > 1)
        index = donors[np.argmax(dist[donors])]
        counts[labels[index]] -= 1
        labels[index] = cluster
        counts[cluster] = 1
        centroids[cluster] = points[index]
        dist[index] = 0.0
    return labels, float(dist.sum())


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int = 0,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> KMeansResult:
    """Cluster ``points`` (n, d) into ``k`` groups.

    Stops after ``max_iters`` updates or once the summed squared centroid
    movement drops below ``tol``. ``objective_history`` holds the sum of
    squared distances after every assignment step and never increases.

    Raises:
        PreconditionError: if ``k`` is not in 1..n.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] == 0:
        raise PreconditionError("kmeans needs a nonempty (n, d) array")
    n = points.shape[0]
    if not 1 <= k <= n:
        raise PreconditionError(f"K must be in 1..{n}, got {k}")

    if k == n:
        return KMeansResult(
            centroids=points.copy(),
            labels=np.arange(n),
            objective_history=(0.0,),
            iterations=0,
            converged=True,
        )

    rng = np.random.default_rng(seed)
    centroids = kmeans_plus_plus(points, k, rng)
    labels, objective = _assign(points, centroids)
    history = [objective]
    converged = False
    iterations = 0
    while iterations < max_iters:
        iterations += 1
        updated = centroids.copy()
        for cluster in range(k):
            updated[cluster] = points[labels == cluster].mean(axis=0)
        movement = float(np.sum((updated - centroids) ** 2))
        centroids = updated
        labels, objective = _assign(points, centroids)
        history.append(objective)
        if movement < tol:
            converged = True
            break
    logger.debug(
        "kmeans k=%d: %d iterations, objective %.6g", k, iterations, history[-1]
    )
    return KMeansResult(
        centroids=centroids,
        labels=labels,
        objective_history=tuple(history),
        iterations=iterations,
        converged=converged,
    )
