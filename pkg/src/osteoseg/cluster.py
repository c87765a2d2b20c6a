"""Deterministic 1-D K-means on pixel intensities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, ParameterError
from .image import GrayImage

MAX_ITER = 300
CENTROID_TOL = 1e-4
N_INIT = 10


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray       # (h, w) cluster indices, 0 = darkest centroid
    centroids: np.ndarray    # ascending intensities, one per cluster
    sse: float               # within-cluster sum of squares
    iterations: int


def _kmeans_pp_init(values, k, rng):
    """k-means++ seeding over the flat intensity vector."""
    n = values.size
    centers = np.empty(k)
    centers[0] = values[rng.integers(n)]
    d2 = (values - centers[0]) ** 2
    for i in range(1, k):
        total = d2.sum()
        if total <= 0:
            # all remaining mass sits on chosen centers; pick uniformly
            centers[i] = values[rng.integers(n)]
        else:
            centers[i] = values[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, (values - centers[i]) ** 2)
    return centers


def _lloyd(values, centers):
    """Lloyd iterations until centroid movement < CENTROID_TOL."""
    for it in range(1, MAX_ITER + 1):
        assign = np.argmin(np.abs(values[:, None] - centers[None, :]), axis=1)
        new_centers = centers.copy()
        for c in range(centers.size):
            members = values[assign == c]
            if members.size:
                new_centers[c] = members.mean()
            else:
                # re-seed an empty cluster at the point farthest from its center
                new_centers[c] = values[np.argmax(np.abs(values - centers[c]))]
        movement = np.max(np.abs(new_centers - centers))
        centers = new_centers
        if movement < CENTROID_TOL:
            break
    assign = np.argmin(np.abs(values[:, None] - centers[None, :]), axis=1)
    return assign, centers, it


EXACT_DP_MAX_UNIQUE = 2048


def _exact_1d_kmeans(values, k):
    """Globally optimal 1-D k-means by dynamic programming.

    Optimal 1-D clusters are contiguous in sorted order, so the problem
    reduces to segmenting the sorted unique values (weighted by their
    multiplicity). Returns (centers, sse) or None when the value count
    makes the O(n^2) table impractical.
    """
    uniq, counts = np.unique(values, return_counts=True)
    n = uniq.size
    if n > EXACT_DP_MAX_UNIQUE:
        return None
    w = counts.astype(np.float64)
    cw = np.concatenate([[0.0], np.cumsum(w)])
    cs = np.concatenate([[0.0], np.cumsum(w * uniq)])
    cq = np.concatenate([[0.0], np.cumsum(w * uniq * uniq)])

    ii = np.arange(n)
    # cost[j, i]: weighted SSE of the segment uniq[j..i] (inf for j > i)
    seg_w = cw[ii[None, :] + 1] - cw[ii[:, None]]
    seg_s = cs[ii[None, :] + 1] - cs[ii[:, None]]
    seg_q = cq[ii[None, :] + 1] - cq[ii[:, None]]
    with np.errstate(divide="ignore", invalid="ignore"):
        cost = seg_q - seg_s**2 / seg_w
    cost[seg_w <= 0] = np.inf
    np.maximum(cost, 0.0, out=cost)

    dp = cost[0].copy()
    back = np.zeros((k, n), dtype=np.intp)
    for m in range(1, k):
        # candidate[j, i] = dp[j-1] + cost[j, i]
        cand = np.full((n, n), np.inf)
        cand[1:, :] = dp[:-1, None] + cost[1:, :]
        back[m] = np.argmin(cand, axis=0)
        dp = np.min(cand, axis=0)

    centers = np.empty(k)
    hi = n - 1
    for m in range(k - 1, 0, -1):
        lo = int(back[m, hi])
        centers[m] = (cs[hi + 1] - cs[lo]) / (cw[hi + 1] - cw[lo])
        hi = lo - 1
    centers[0] = cs[hi + 1] / cw[hi + 1]
    return np.sort(centers), float(dp[n - 1])


def kmeans_segment(img: GrayImage, k=3, seed=0) -> KMeansResult:
    """Cluster intensities into k groups, labels ordered by ascending centroid.

    k-means++ initialization is driven by a generator seeded with `seed`,
    so results are bit-reproducible for a fixed seed. N_INIT restarts are
    drawn from the same generator and the lowest-SSE run wins.
    """
    if k < 2:
        raise ParameterError("k must be >= 2")
    values = img.pixels.ravel()
    if np.unique(values).size < k:
        raise DegenerateInputError(
            f"image has fewer than {k} distinct intensities"
        )
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(N_INIT):
        centers = _kmeans_pp_init(values, k, rng)
        assign, centers, iterations = _lloyd(values, centers)
        sse = float(np.sum((values - centers[assign]) ** 2))
        if best is None or sse < best[0]:
            best = (sse, assign, centers, iterations)
    _, assign, centers, iterations = best

    # Lloyd's converges to a local optimum; 1-D admits an exact DP solution,
    # so refine to the global one when it is strictly better
    exact = _exact_1d_kmeans(values, k)
    if exact is not None and exact[1] < best[0] - 1e-12:
        centers = exact[0]
        assign = np.argmin(np.abs(values[:, None] - centers[None, :]), axis=1)

    order = np.argsort(centers, kind="stable")
    relabel = np.empty(k, dtype=np.intp)
    relabel[order] = np.arange(k)
    labels = relabel[assign].reshape(img.shape)
    centroids = centers[order]
    sse = float(np.sum((values - centers[assign]) ** 2))
    return KMeansResult(labels, centroids, sse, iterations)
