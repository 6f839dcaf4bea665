import numpy as np
import pytest

from protoabs.clustering import (
    ClusterModel,
    MpckConfig,
    PenaltyContext,
    assign_point,
    evaluate_objective,
    f_cannot,
    f_must,
    run_kmeans,
    run_mpck,
    update_centroids,
)
from protoabs.constraints import ConstraintSet, LabeledSample, constraints_from_labels
from protoabs.errors import EmptyCluster, StaleContext, TooManyClusters
from protoabs.evaluation import evaluate
from protoabs.experiments import draw_labeled_samples
from protoabs.metric import DiagonalMetric, distance_sq, unit_metric
from protoabs.model import Message, build_corpus
from protoabs.tls_default import default_synth_spec
from protoabs.corpus_tools import generate_synthetic


def msg(*tokens):
    return Message(tuple(tokens))


def random_corpus(rng, n, arity, alphabet=3):
    raw = [["t%d" % rng.integers(alphabet) for _ in range(arity)] for _ in range(n)]
    return build_corpus(raw, arity=arity)


def make_model(corpus, assignments, k, metrics=None):
    assignments = np.asarray(assignments, dtype=np.int64)
    centroids = update_centroids(corpus, assignments, k)
    if metrics is None:
        metrics = tuple(unit_metric(corpus.arity) for _ in range(k))
    return ClusterModel(
        k=k, centroids=centroids, metrics=metrics,
        assignments=assignments, objective=0.0,
    )


class TestPenalties:
    def test_f_must_zero_for_equal_points(self):
        m = unit_metric(2)
        assert f_must(msg("a", "b"), msg("a", "b"), m, m) == 0.0

    def test_f_must_averages_equal_metrics(self):
        m = unit_metric(3)
        a, b = msg("a", "b", "c"), msg("x", "y", "z")
        assert f_must(a, b, m, m) == pytest.approx(3.0)

    def test_f_must_averages_different_metrics(self):
        a, b = msg("a", "b"), msg("x", "y")
        mi = unit_metric(2)                       # d^2 = 2
        mj = DiagonalMetric(np.array([1.0, 3.0]))  # d^2 = 4
        assert f_must(a, b, mi, mj) == pytest.approx(3.0)

    def test_f_cannot_zero_for_max_pair(self):
        corpus = build_corpus([["a", "a"], ["b", "b"], ["a", "b"]], arity=2)
        metrics = (unit_metric(2),)
        ctx = PenaltyContext.build(corpus, [0, 0, 0], metrics)
        i, j = ctx.maxpairs[0].first, ctx.maxpairs[0].second
        assert f_cannot(corpus.messages[i], corpus.messages[j], 0, ctx) == 0.0

    def test_f_cannot_equal_points_get_full_gap(self):
        corpus = build_corpus(
            [["a"] * 5, ["b"] * 5, ["a"] * 5], arity=5
        )
        ctx = PenaltyContext.build(corpus, [0, 0, 0], (unit_metric(5),))
        assert ctx.maxpairs[0].sq_distance == 5.0
        assert f_cannot(corpus.messages[0], corpus.messages[2], 0, ctx) == 5.0

    def test_f_cannot_matches_brute_force(self):
        rng = np.random.default_rng(2)
        corpus = random_corpus(rng, 3, 4)
        m = DiagonalMetric(rng.uniform(0.2, 2.0, size=4))
        ctx = PenaltyContext.build(corpus, [0, 0, 0], (m,))
        best = max(
            distance_sq(corpus.messages[i], corpus.messages[j], m)
            for i in range(3) for j in range(i + 1, 3)
        )
        for i in range(3):
            for j in range(i + 1, 3):
                got = f_cannot(corpus.messages[i], corpus.messages[j], 0, ctx)
                want = best - distance_sq(corpus.messages[i], corpus.messages[j], m)
                assert got == pytest.approx(max(0.0, want))
                assert got >= 0.0

    def test_f_cannot_stale_context(self):
        corpus = build_corpus([["a"], ["b"]], arity=1)
        ctx = PenaltyContext.build(corpus, [0, 0], (unit_metric(1),))
        ctx.mark_stale()
        with pytest.raises(StaleContext):
            f_cannot(corpus.messages[0], corpus.messages[1], 0, ctx)


class TestObjective:
    def test_identical_points_single_cluster(self):
        corpus = build_corpus([["a", "b"]] * 4, arity=2)
        model = make_model(corpus, [0, 0, 0, 0], k=1)
        assert evaluate_objective(corpus, model, ConstraintSet()) == 0.0

    def test_single_violated_must_link(self):
        corpus = build_corpus([["a"], ["a"], ["b"]], arity=1)
        model = make_model(corpus, [0, 0, 1], k=2)
        cs = ConstraintSet(frozenset({(0, 2)}), frozenset(), w=1.0)
        # dispersion 0, log-dets 0; only the violated must-link contributes
        want = f_must(corpus.messages[0], corpus.messages[2],
                      model.metrics[0], model.metrics[1])
        assert evaluate_objective(corpus, model, cs) == pytest.approx(want)

    def test_converged_model_beats_single_swaps(self):
        rng = np.random.default_rng(9)
        for trial in range(8):
            corpus = random_corpus(rng, 8, 3)
            samples = [LabeledSample(0, 0), LabeledSample(1, 0), LabeledSample(2, 1)]
            cs = constraints_from_labels(samples, w=1.5, w_bar=1.5)
            cfg = MpckConfig(k=2, seed=trial, tol=1e-12)
            model = run_mpck(corpus, cs, cfg)
            if model.converged_by != "fixpoint":
                continue
            ctx = PenaltyContext.build(corpus, model.assignments, model.metrics)
            base = evaluate_objective(corpus, model, cs, ctx=ctx)
            for i in range(8):
                for h in range(2):
                    if h == model.assignments[i]:
                        continue
                    swapped = ClusterModel(
                        k=2, centroids=model.centroids, metrics=model.metrics,
                        assignments=np.where(np.arange(8) == i, h, model.assignments),
                        objective=0.0,
                    )
                    assert base <= evaluate_objective(corpus, swapped, cs, ctx=ctx) + 1e-9


class TestAssignPoint:
    def test_tie_breaks_to_lower_cluster_id(self):
        corpus = build_corpus([["a"], ["a"], ["b"]], arity=1)
        model = make_model(corpus, [0, 1, 1], k=2)
        # identical centroids: point 2 is equidistant
        model = ClusterModel(
            k=2, centroids=(msg("a"), msg("a")), metrics=model.metrics,
            assignments=model.assignments, objective=0.0,
        )
        ctx = PenaltyContext.build(corpus, model.assignments, model.metrics)
        assert assign_point(2, corpus, model, ConstraintSet(), ctx) == 0

    def test_cannot_link_pushes_point_away(self):
        # cluster 0 holds a distant member, so the close cannot-link pair
        # (0, 1) sits well inside the cluster's max separation
        corpus = build_corpus([["a", "x"], ["a", "x"], ["b", "z"], ["a", "w"]], arity=2)
        model = make_model(corpus, [0, 0, 1, 0], k=2)
        cs = ConstraintSet(frozenset(), frozenset({(0, 1)}), w_bar=100.0)
        ctx = PenaltyContext.build(corpus, model.assignments, model.metrics)
        # point 1 sits on cluster 0's centroid but the cannot-link dominates
        assert assign_point(1, corpus, model, cs, ctx) == 1

    def test_reduces_to_nearest_centroid_without_constraints(self):
        rng = np.random.default_rng(4)
        corpus = random_corpus(rng, 12, 3)
        assignments = rng.integers(0, 3, size=12)
        model = make_model(corpus, assignments, k=3)
        ctx = PenaltyContext.build(corpus, model.assignments, model.metrics)
        for i in range(12):
            dists = [
                distance_sq(corpus.messages[i], model.centroids[h], model.metrics[h])
                for h in range(3)
            ]
            assert assign_point(i, corpus, model, ConstraintSet(), ctx) == int(np.argmin(dists))


class TestCentroids:
    def test_mode_with_lexicographic_tie(self):
        corpus = build_corpus([["A", "B"], ["A", "C"]], arity=2)
        (centroid,) = update_centroids(corpus, [0, 0], k=1)
        assert centroid.fields == ("A", "B")

    def test_singleton_cluster(self):
        corpus = build_corpus([["A", "B"], ["C", "D"]], arity=2)
        centroids = update_centroids(corpus, [0, 1], k=2)
        assert centroids[1].fields == ("C", "D")

    def test_majority_wins(self):
        corpus = build_corpus([["A"], ["A"], ["B"]], arity=1)
        (centroid,) = update_centroids(corpus, [0, 0, 0], k=1)
        assert centroid.fields == ("A",)

    def test_empty_cluster_rejected(self):
        corpus = build_corpus([["A"]], arity=1)
        with pytest.raises(EmptyCluster):
            update_centroids(corpus, [0], k=2)


class TestRunMpck:
    def test_perfect_recovery_on_separable_corpus(self):
        corpus, labels = generate_synthetic(default_synth_spec(n_messages=500, seed=1))
        samples = draw_labeled_samples(labels, 5, seed=0)
        cs = constraints_from_labels(samples)
        model = run_mpck(corpus, cs, MpckConfig(k=21, seed=0))
        report = evaluate(model.assignments, labels)
        assert report.purity == 1.0
        assert report.ari == 1.0

    def test_too_many_clusters(self):
        corpus = build_corpus([["a"], ["b"]], arity=1)
        with pytest.raises(TooManyClusters):
            run_mpck(corpus, ConstraintSet(), MpckConfig(k=3))

    def test_determinism(self):
        rng = np.random.default_rng(8)
        corpus = random_corpus(rng, 40, 4)
        cs = constraints_from_labels(
            [LabeledSample(i, i % 3) for i in range(9)], w=2.0, w_bar=2.0
        )
        cfg = MpckConfig(k=3, seed=5)
        m1 = run_mpck(corpus, cs, cfg)
        m2 = run_mpck(corpus, cs, cfg)
        assert np.array_equal(m1.assignments, m2.assignments)
        assert m1.objective == m2.objective
        assert m1.objective_history == m2.objective_history
        assert all(a.fields == b.fields for a, b in zip(m1.centroids, m2.centroids))
        assert all(
            np.array_equal(a.weights, b.weights) for a, b in zip(m1.metrics, m2.metrics)
        )

    def test_stored_objective_matches_recomputation(self):
        rng = np.random.default_rng(12)
        corpus = random_corpus(rng, 30, 4)
        cs = constraints_from_labels([LabeledSample(i, i % 2) for i in range(6)])
        model = run_mpck(corpus, cs, MpckConfig(k=3, seed=1))
        assert model.objective == pytest.approx(
            evaluate_objective(corpus, model, cs), abs=1e-9
        )

    def test_monotone_objective_with_frozen_metrics(self):
        rng = np.random.default_rng(21)
        for trial in range(10):
            corpus = random_corpus(rng, 25, 4)
            cs = constraints_from_labels(
                [LabeledSample(int(i), int(i % 3)) for i in rng.choice(25, 8, replace=False)]
            )
            cfg = MpckConfig(k=3, seed=trial, metric_update_enabled=False)
            model = run_mpck(corpus, cs, cfg)
            hist = model.objective_history
            for a, b in zip(hist, hist[1:]):
                assert b <= a + 1e-9

    def test_reduction_to_kmeans(self):
        rng = np.random.default_rng(33)
        corpus = random_corpus(rng, 30, 4)
        cfg = MpckConfig(k=4, seed=2, metric_update_enabled=False)
        mpck = run_mpck(corpus, ConstraintSet(), cfg)
        kmeans = run_kmeans(corpus, MpckConfig(k=4, seed=2))
        assert np.array_equal(mpck.assignments, kmeans.assignments)
        assert mpck.objective == kmeans.objective

    def test_model_roundtrip_exact(self):
        rng = np.random.default_rng(44)
        corpus = random_corpus(rng, 20, 3)
        cs = constraints_from_labels([LabeledSample(i, i % 2) for i in range(4)])
        model = run_mpck(corpus, cs, MpckConfig(k=2, seed=3))
        again = ClusterModel.from_dict(model.to_dict())
        assert again.to_dict() == model.to_dict()
        assert again.objective == model.objective
        assert np.array_equal(again.assignments, model.assignments)


class TestRunKmeans:
    def test_k_equals_n(self):
        corpus = build_corpus([["a"], ["b"], ["c"], ["d"]], arity=1)
        model = run_kmeans(corpus, MpckConfig(k=4, seed=0))
        assert len(set(model.assignments.tolist())) == 4
        assert model.objective == 0.0

    def test_k_one_centroid_is_corpus_mode(self):
        corpus = build_corpus([["a", "x"], ["a", "y"], ["b", "x"]], arity=2)
        model = run_kmeans(corpus, MpckConfig(k=1, seed=0))
        assert model.centroids[0].fields == ("a", "x")

    def test_baseline_below_mpck_on_separable_corpus(self):
        corpus, labels = generate_synthetic(default_synth_spec(n_messages=500, seed=1))
        km = run_kmeans(corpus, MpckConfig(k=21, seed=0))
        km_report = evaluate(km.assignments, labels)
        assert km_report.purity < 1.0
