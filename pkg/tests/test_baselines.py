import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from oracles import blm_tabulate, flm_repeated_max, nearest_centroid
from vfsl import (
    AssignmentModel,
    DimensionMismatchError,
    EmbeddingMatrix,
    EmptyClassError,
    InsufficientPromptsError,
    LabelVector,
    NotNormalizedError,
    ShotSet,
    SimilarityMatrix,
    assignment_scores,
    centroid_scores,
    fit_blm,
    fit_centroids,
    fit_flm,
    l2_normalize,
    predict,
)


def sims(rows):
    return SimilarityMatrix(np.asarray(rows, dtype=np.float32))


def labels(values, c):
    return LabelVector(np.asarray(values), num_classes=c)


def shot_set(indices, label_values, c, spc):
    return ShotSet(np.asarray(indices), labels(label_values, c), spc)


def unit(rows):
    return l2_normalize(EmbeddingMatrix(np.asarray(rows, dtype=np.float32)))


class TestCentroids:
    def test_single_shot_means(self):
        feats = unit([[1, 0], [0, 1]])
        model = fit_centroids(feats, shot_set([0, 1], [0, 1], 2, 1))
        assert_allclose(model.centroids.data, np.eye(2), atol=1e-7)

    def test_mean_then_normalize(self):
        feats = unit([[1, 0], [0, 1]])
        model = fit_centroids(feats, shot_set([0, 1], [0, 0], 1, 2))
        assert_allclose(model.centroids.data, [[0.7071, 0.7071]], atol=1e-4)

    def test_idempotent_on_single_shots(self):
        rng = np.random.default_rng(61)
        feats = unit(rng.standard_normal((4, 8)))
        model = fit_centroids(feats, shot_set([0, 1, 2, 3], [0, 1, 2, 3], 4, 1))
        assert_allclose(model.centroids.data, feats.data, atol=1e-6)

    def test_requires_normalized_features(self):
        feats = EmbeddingMatrix(np.eye(2, dtype=np.float32))
        with pytest.raises(NotNormalizedError):
            fit_centroids(feats, shot_set([0, 1], [0, 1], 2, 1))

    def test_separated_clusters_classify_perfectly(self):
        # two cones more than 60 degrees apart, 16 shots each
        rng = np.random.default_rng(67)
        axes = np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0]])
        rows = []
        for c in range(2):
            rows.append(axes[c] + 0.05 * rng.standard_normal((26, 4)))
        feats = unit(np.vstack(rows))
        lab = labels(np.repeat([0, 1], 26), 2)
        shots = shot_set(
            np.concatenate([np.arange(16), 26 + np.arange(16)]),
            np.repeat([0, 1], 16),
            2,
            16,
        )
        model = fit_centroids(feats, shots)
        held_out = np.concatenate([np.arange(16, 26), 26 + np.arange(16, 26)])
        test_feats = EmbeddingMatrix(feats.data[held_out], normalized=True)
        got = predict(centroid_scores(model, test_feats)).labels
        assert_array_equal(got, lab.labels[held_out])
        # brute-force oracle agrees on every item
        means = [feats.data[shots.indices[:16]].mean(0), feats.data[shots.indices[16:]].mean(0)]
        assert_array_equal(got, nearest_centroid(test_feats.data, means))


class TestFlm:
    def test_unambiguous_frequencies(self):
        # class 0 always lands on prompt 2, class 1 on prompt 0
        rows = [[0.1, 0.2, 0.9], [0.0, 0.1, 0.8], [0.9, 0.1, 0.0], [0.7, 0.2, 0.1]]
        model = fit_flm(sims(rows), labels([0, 0, 1, 1], 2))
        assert_array_equal(model.mapping, [2, 0])

    def test_greedy_tie_breaks(self):
        # counts class0 {p0: 2, p1: 1}, class1 {p0: 2, p1: 0}; class0 wins
        # p0 on the class tie-break, class1 falls through to p1
        rows = [
            [0.9, 0.1],
            [0.8, 0.2],
            [0.1, 0.9],
            [0.9, 0.0],
            [0.8, 0.1],
        ]
        model = fit_flm(sims(rows), labels([0, 0, 0, 1, 1], 2))
        assert_array_equal(model.mapping, [0, 1])
        oracle = flm_repeated_max(np.array([[2, 1], [2, 0]]))
        assert_array_equal(model.mapping, oracle)

    def test_insufficient_prompts(self):
        with pytest.raises(InsufficientPromptsError):
            fit_flm(sims([[0.5, 0.5], [0.5, 0.5], [0.5, 0.5]]), labels([0, 1, 2], 3))

    def test_missing_class(self):
        with pytest.raises(EmptyClassError):
            fit_flm(sims(np.eye(3)), labels([0, 0, 0], 2))

    def test_injective_and_matches_oracle(self):
        rng = np.random.default_rng(71)
        for _ in range(30):
            c = int(rng.integers(2, 7))
            k = int(rng.integers(c, 12))
            n = int(rng.integers(c, 40))
            lab = np.concatenate([np.arange(c), rng.integers(0, c, size=n - c)])
            data = rng.uniform(-1, 1, size=(n, k)).astype(np.float32)
            model = fit_flm(sims(data), labels(lab, c))
            assert np.unique(model.mapping).size == c
            preds = np.argmax(data, axis=1)
            counts = np.zeros((c, k), dtype=int)
            np.add.at(counts, (lab, preds), 1)
            assert_array_equal(model.mapping, flm_repeated_max(counts))

    def test_deterministic(self):
        rng = np.random.default_rng(73)
        data = rng.uniform(-1, 1, size=(12, 6)).astype(np.float32)
        lab = labels([0, 1, 2] * 4, 3)
        first = fit_flm(sims(data), lab).mapping
        second = fit_flm(sims(data), lab).mapping
        assert_array_equal(first, second)

    def test_scores_select_assigned_columns(self):
        model = AssignmentModel(kind="one_to_one", num_prompts=3, mapping=np.array([2, 0]))
        out = assignment_scores(model, sims([[0.1, 0.2, 0.3]]))
        assert_allclose(out.data, [[0.3, 0.1]], atol=1e-7)


class TestBlm:
    def test_pure_counts_identity(self):
        # class 0 shots hit prompt 0, class 1 shots hit prompt 1
        rows = [[0.9, 0.1, 0.0], [0.8, 0.0, 0.1], [0.1, 0.9, 0.0], [0.0, 0.8, 0.1]]
        model = fit_blm(sims(rows), labels([0, 0, 1, 1], 2), smoothing=0.0)
        assert_allclose(model.weights[:2], np.eye(2))
        assert_allclose(model.weights[2], [0.0, 0.0])

    def test_uniform_conditional(self):
        # one prompt, two classes, two shots each
        rows = [[0.9], [0.8], [0.7], [0.6]]
        model = fit_blm(sims(rows), labels([0, 0, 1, 1], 2), smoothing=0.0)
        assert_allclose(model.weights, [[0.5, 0.5]])

    def test_matches_tabulation_oracle(self):
        rng = np.random.default_rng(79)
        for _ in range(25):
            c = int(rng.integers(2, 5))
            k = int(rng.integers(2, 9))
            n = int(rng.integers(c, 30))
            lab = np.concatenate([np.arange(c), rng.integers(0, c, size=n - c)])
            data = rng.uniform(-1, 1, size=(n, k)).astype(np.float32)
            for smoothing in (0.0, 1.0, 2.5):
                model = fit_blm(sims(data), labels(lab, c), smoothing)
                oracle = blm_tabulate(np.argmax(data, axis=1), lab, k, c, smoothing)
                assert_allclose(model.weights, oracle, atol=1e-12)

    def test_smoothing_strictly_positive_weights(self):
        rng = np.random.default_rng(83)
        data = rng.uniform(-1, 1, size=(8, 5)).astype(np.float32)
        model = fit_blm(sims(data), labels([0, 1] * 4, 2), smoothing=1.0)
        assert (model.weights > 0).all()

    def test_zero_smoothing_zeroes_unseen_pairs(self):
        rows = [[0.9, 0.1], [0.8, 0.2]]
        model = fit_blm(sims(rows), labels([0, 1], 2), smoothing=0.0)
        assert model.weights[0, 0] == 0.5  # both classes predicted prompt 0
        assert_array_equal(model.weights[1], [0.0, 0.0])

    def test_negative_smoothing_rejected(self):
        with pytest.raises(ValueError):
            fit_blm(sims(np.eye(2)), labels([0, 1], 2), smoothing=-0.1)


class TestAssignmentModel:
    def test_mapping_must_be_injective(self):
        with pytest.raises(ValueError, match="injective"):
            AssignmentModel(kind="one_to_one", num_prompts=4, mapping=np.array([1, 1]))

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            AssignmentModel(kind="other", num_prompts=2, mapping=np.array([0]))

    def test_negative_weights_rejected(self):
        with pytest.raises(ValueError):
            AssignmentModel(
                kind="bayesian", num_prompts=1, weights=np.array([[-0.5, 0.5]])
            )

    def test_score_dimension_check(self):
        model = AssignmentModel(kind="one_to_one", num_prompts=3, mapping=np.array([0, 1]))
        with pytest.raises(DimensionMismatchError):
            assignment_scores(model, sims([[0.1, 0.2]]))
