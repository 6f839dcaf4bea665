"""Experiment harness: seeded label draws, single clustering runs and the
K / labels-per-class sweeps, with deterministic CSV rows.

Wall-clock durations are reported on stdout only; CSV, JSON and SVG
artifacts must be byte-identical across reruns with the same seeds.
"""

import csv
import io
import os
import time
from dataclasses import dataclass

import numpy as np

from .clustering import MpckConfig, run_kmeans, run_mpck
from .constraints import LabeledSample, constraints_from_labels
from .errors import InsufficientLabels
from .evaluation import evaluate
from .model import UNLABELED


def draw_labeled_samples(labels, per_class, seed, mode="balanced"):
    """Seeded per-class draw of labeled examples from the reference labels.

    balanced: exactly per_class samples from every class.
    unbalanced: per-class counts drawn uniformly from 1..per_class, with at
    least one class kept at per_class.
    """
    rng = np.random.default_rng(seed)
    lab = np.asarray(labels.labels)
    j = labels.n_classes
    counts = np.full(j, per_class)
    if mode == "unbalanced":
        counts = rng.integers(1, per_class + 1, size=j)
        if counts.max() < per_class:
            counts[int(rng.integers(j))] = per_class
    elif mode != "balanced":
        raise ValueError("mode must be balanced or unbalanced")
    samples = []
    for c in range(j):
        members = np.flatnonzero(lab == c)
        if members.size < counts[c]:
            raise InsufficientLabels(
                "class %d has %d members, need %d labels" % (c, members.size, counts[c])
            )
        picks = rng.choice(members, size=counts[c], replace=False)
        samples.extend(LabeledSample(int(i), c) for i in sorted(picks))
    return samples


@dataclass
class ExperimentResult:
    algorithm: str
    k: int
    labels_per_class: int
    seed: int
    report: object          # EvalReport
    model: object           # ClusterModel
    n_must: int
    n_cannot: int
    duration: float


def run_experiment(
    corpus,
    labels,
    algorithm="mpck",
    k=None,
    labels_per_class=5,
    seed=0,
    w=1.0,
    w_bar=1.0,
    max_iterations=200,
    tol=1e-6,
    mode="balanced",
):
    if k is None:
        k = labels.n_classes
    config = MpckConfig(k=k, max_iterations=max_iterations, tol=tol, seed=seed)
    start = time.perf_counter()
    n_must = n_cannot = 0
    if algorithm == "kmeans":
        model = run_kmeans(corpus, config)
    elif algorithm == "mpck":
        samples = draw_labeled_samples(labels, labels_per_class, seed, mode=mode)
        cs = constraints_from_labels(samples, w=w, w_bar=w_bar)
        n_must, n_cannot = len(cs.must_links), len(cs.cannot_links)
        model = run_mpck(corpus, cs, config)
    else:
        raise ValueError("unknown algorithm %r" % algorithm)
    duration = time.perf_counter() - start
    report = evaluate(model.assignments, labels)
    return ExperimentResult(
        algorithm=algorithm,
        k=k,
        labels_per_class=labels_per_class if algorithm == "mpck" else 0,
        seed=seed,
        report=report,
        model=model,
        n_must=n_must,
        n_cannot=n_cannot,
        duration=duration,
    )


def sweep_k(corpus, labels, k_values, seeds, labels_per_class=1, **kwargs):
    """One run per (K, seed); returns (rows, per-K means, argmax-ARI K)."""
    rows = []
    for k in k_values:
        for seed in seeds:
            res = run_experiment(
                corpus, labels, algorithm="mpck", k=k,
                labels_per_class=labels_per_class, seed=seed, **kwargs
            )
            rows.append(res)
    means = {}
    for k in k_values:
        sub = [r for r in rows if r.k == k]
        means[k] = (
            float(np.mean([r.report.purity for r in sub])),
            float(np.mean([r.report.ari for r in sub])),
        )
    best_k = max(k_values, key=lambda k: (means[k][1], -k))
    return rows, means, best_k


def sweep_labels(corpus, labels, counts, seeds, mode="balanced", k=None, **kwargs):
    """One run per (labels_per_class, seed) with K = J unless overridden."""
    rows = []
    for c in counts:
        for seed in seeds:
            res = run_experiment(
                corpus, labels, algorithm="mpck", k=k,
                labels_per_class=c, seed=seed, mode=mode, **kwargs
            )
            rows.append(res)
    means = {}
    for c in counts:
        sub = [r for r in rows if r.labels_per_class == c]
        means[c] = (
            float(np.mean([r.report.purity for r in sub])),
            float(np.mean([r.report.ari for r in sub])),
        )
    return rows, means


def sweep_csv(rows, means, x_field):
    """CSV with one row per run plus per-x mean rows; deterministic."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([x_field, "seed", "purity", "ari", "objective", "iterations"])
    for r in rows:
        x = getattr(r, x_field)
        writer.writerow(
            [x, r.seed, repr(r.report.purity), repr(r.report.ari),
             repr(r.model.objective), r.model.iterations]
        )
    for x in sorted(means):
        writer.writerow([x, "mean", repr(means[x][0]), repr(means[x][1]), "", ""])
    return buf.getvalue()


def write_atomic(path, text):
    """Write via a temp file and rename so partial artifacts never appear."""
    tmp = "%s.tmp.%d" % (path, os.getpid())
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)
