"""Weighted squared-Hamming distances under diagonal per-cluster metrics.

The squared distance between two messages is sum_f a_f * [x_f != y_f]
where a_f are non-negative per-position weights.  Weights are floored at
EPS_WEIGHT so log(a_f) stays finite and capped at 1/EPS_WEIGHT so that
zero-dispersion fields do not produce infinities.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ArityMismatch, EmptyCluster

EPS_WEIGHT = 1e-6
EPS_DENOM = 1e-9


@dataclass(frozen=True)
class DiagonalMetric:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if np.any(w < 0):
            raise ValueError("metric weights must be non-negative")

    @property
    def arity(self):
        return self.weights.shape[0]


def unit_metric(arity):
    return DiagonalMetric(np.ones(arity))


def distance_sq(a, b, m):
    """Weighted squared-Hamming distance between two messages."""
    if a.arity != b.arity or a.arity != m.arity:
        raise ArityMismatch(
            "arities differ: %d, %d, metric %d" % (a.arity, b.arity, m.arity)
        )
    mism = np.fromiter(
        (x != y for x, y in zip(a.fields, b.fields)), dtype=bool, count=a.arity
    )
    return float(m.weights[mism].sum())


def distance_sq_codes(row_a, row_b, weights):
    """distance_sq over integer code rows (internal fast path)."""
    return float(weights[row_a != row_b].sum())


def log_det(m):
    """Log-determinant of the diagonal metric: sum of log-weights."""
    if np.any(m.weights < EPS_WEIGHT):
        raise ValueError("weights below the floor %g have no finite log" % EPS_WEIGHT)
    return float(np.log(m.weights).sum())


@dataclass(frozen=True)
class MaxPair:
    first: int
    second: int
    sq_distance: float


def max_separated_pair(indices, corpus, m):
    """Brute-force argmax of distance_sq over unordered index pairs.

    Deterministic: among ties the smallest (first, second) pair wins.
    A singleton domain yields (i, i, 0.0).
    """
    idx = np.asarray(sorted(indices), dtype=np.int64)
    if idx.size == 0:
        raise EmptyCluster("max_separated_pair needs at least one index")
    if idx.size == 1:
        i = int(idx[0])
        return MaxPair(i, i, 0.0)
    x = corpus.codes[idx]
    w = np.asarray(m.weights, dtype=np.float64)
    # (n, n) pairwise weighted mismatch totals, accumulated per field to
    # keep memory at O(n^2)
    d = np.zeros((idx.size, idx.size))
    for f in range(x.shape[1]):
        d += w[f] * (x[:, None, f] != x[None, :, f])
    iu = np.triu_indices(idx.size, k=1)
    flat = d[iu]
    best = int(np.argmax(flat))  # first occurrence = smallest (i, j) in row-major order
    i, j = int(iu[0][best]), int(iu[1][best])
    return MaxPair(int(idx[i]), int(idx[j]), float(flat[best]))


def update_metric(
    corpus,
    member_indices,
    centroid,
    violations=None,
    eps_w=EPS_WEIGHT,
    eps_d=EPS_DENOM,
):
    """Closed-form diagonal weight update for one cluster.

    a_f = n / max(eps_d, D_f) where D_f is the per-field mismatch tally:
    the dispersion of members around the centroid plus the caller-supplied
    constraint-violation tallies (already weighted; see clustering).
    Weights are clamped to [eps_w, 1/eps_w].
    """
    idx = np.asarray(sorted(member_indices), dtype=np.int64)
    if idx.size == 0:
        raise EmptyCluster("cannot update the metric of an empty cluster")
    cent = corpus.encode(centroid)
    disp = (corpus.codes[idx] != cent[None, :]).sum(axis=0).astype(np.float64)
    if violations is not None:
        disp = disp + np.asarray(violations, dtype=np.float64)
    weights = idx.size / np.maximum(eps_d, disp)
    weights = np.clip(weights, eps_w, 1.0 / eps_w)
    return DiagonalMetric(weights)
