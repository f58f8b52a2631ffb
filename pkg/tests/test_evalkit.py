"""Tests for the classification-via-alignment evaluation harness."""

import numpy as np
import pytest

from curvealign import (
    CongealConfig,
    CurveSet,
    EvalConfig,
    EvalMode,
    ObjectiveKind,
    Transform,
    eval_no_alignment,
    eval_no_alignment_split,
    eval_supervised,
    eval_unsupervised,
    knn_classify,
    stratified_folds,
)

WARP_ONLY = frozenset({Transform.TIME_WARP})


def labeled_set(matrix, labels):
    return CurveSet.from_samples(np.asarray(matrix, dtype=float), labels=labels)


def cluster_set(n_per_class=6, m=20, gap=4.0, noise=0.3, seed=0):
    """Two well-separated amplitude clusters; trivially classifiable."""
    rng = np.random.default_rng(seed)
    rows, labels = [], []
    for cls in (0, 1):
        center = cls * gap
        for _ in range(n_per_class):
            rows.append(center + noise * rng.normal(size=m))
            labels.append(cls)
    return labeled_set(rows, labels)


def unsupervised_config(**congeal_overrides):
    defaults = dict(
        objective_kind=ObjectiveKind.VARIANCE_SUM,
        enabled_transforms=WARP_ONLY,
        max_iterations=10,
        rng_seed=0,
    )
    defaults.update(congeal_overrides)
    return EvalConfig(
        k_neighbors=3,
        folds=3,
        mode=EvalMode.UNSUPERVISED,
        congeal_config=CongealConfig(**defaults),
        rng_seed=0,
    )


class TestConfigValidation:
    def test_bounds(self):
        with pytest.raises(ValueError):
            EvalConfig(k_neighbors=0)
        with pytest.raises(ValueError):
            EvalConfig(folds=1)
        with pytest.raises(TypeError):
            EvalConfig(mode="unsupervised")


class TestKnnClassify:
    def test_exact_match_wins_at_k1(self):
        train = labeled_set([[0, 0, 0, 0], [5, 5, 5, 5]], [3, 8])
        test = labeled_set([[5, 5, 5, 5], [0, 0, 0, 0]], [0, 0])
        assert list(knn_classify(train, test, k=1)) == [8, 3]

    def test_vote_tie_goes_to_lowest_class_id(self):
        # The probe sits exactly midway, so k=2 sees one vote per class.
        train = labeled_set([[0, 0, 0, 0], [2, 2, 2, 2]], [2, 1])
        test = labeled_set([[1, 1, 1, 1], [1, 1, 1, 1]], [0, 0])
        assert list(knn_classify(train, test, k=2)) == [1, 1]

    def test_distance_tie_goes_to_lowest_index(self):
        # Two identical training curves with different labels: the earlier
        # row must win at k=1.
        train = labeled_set([[1, 1, 1, 1], [1, 1, 1, 1], [9, 9, 9, 9]], [5, 4, 0])
        test = labeled_set([[1, 1, 1, 1], [1, 1, 1, 1]], [0, 0])
        assert list(knn_classify(train, test, k=1)) == [5, 5]

    def test_majority_beats_proximity(self):
        train = labeled_set(
            [[0, 0, 0, 0], [3, 3, 3, 3], [3.5, 3.5, 3.5, 3.5]], [0, 1, 1]
        )
        test = labeled_set([[2, 2, 2, 2], [2, 2, 2, 2]], [0, 0])
        assert list(knn_classify(train, test, k=3)) == [1, 1]

    def test_matches_brute_force(self):
        rng = np.random.default_rng(14)
        train = labeled_set(rng.normal(size=(9, 6)), rng.integers(0, 3, size=9))
        test = labeled_set(rng.normal(size=(5, 6)), [0] * 5)
        k = 3
        predictions = knn_classify(train, test, k)
        train_matrix = train.sample_matrix()
        labels = np.asarray(train.labels)
        for i, row in enumerate(test.sample_matrix()):
            distances = [float(np.linalg.norm(t - row)) for t in train_matrix]
            nearest = sorted(range(9), key=lambda j: (distances[j], j))[:k]
            votes = {}
            for j in nearest:
                votes[labels[j]] = votes.get(labels[j], 0) + 1
            best = max(votes.values())
            expected = min(lab for lab, v in votes.items() if v == best)
            assert predictions[i] == expected

    def test_validation(self):
        train = labeled_set([[0, 0, 0, 0], [1, 1, 1, 1]], [0, 1])
        test = labeled_set([[0, 0, 0, 0], [1, 1, 1, 1]], [0, 1])
        with pytest.raises(ValueError, match="k must be"):
            knn_classify(train, test, k=0)
        with pytest.raises(ValueError, match="k must be"):
            knn_classify(train, test, k=3)
        with pytest.raises(ValueError, match="labeled"):
            knn_classify(train.unlabeled(), test, k=1)
        short = CurveSet.from_samples(np.zeros((2, 5)), labels=[0, 1])
        with pytest.raises(ValueError, match="lengths differ"):
            knn_classify(train, short, k=1)

    def test_self_classification_is_perfect(self):
        rng = np.random.default_rng(3)
        s = labeled_set(rng.normal(size=(8, 10)), [0, 1, 2, 3, 0, 1, 2, 3])
        assert np.array_equal(knn_classify(s, s, k=1), np.asarray(s.labels))


class TestStratifiedFolds:
    def test_exact_balance(self):
        labels = [0] * 10 + [1] * 10
        assignment = stratified_folds(labels, folds=10, rng_seed=0)
        for f in range(10):
            members = [labels[i] for i in np.flatnonzero(assignment == f)]
            assert sorted(members) == [0, 1]

    def test_uneven_classes_spread_by_at_most_one(self):
        labels = [0] * 11 + [1] * 10
        assignment = stratified_folds(labels, folds=10, rng_seed=1)
        for cls, total in ((0, 11), (1, 10)):
            counts = [
                int(np.sum((assignment == f) & (np.asarray(labels) == cls)))
                for f in range(10)
            ]
            assert sum(counts) == total
            assert max(counts) - min(counts) <= 1

    def test_deterministic(self):
        labels = [0, 1] * 15
        a = stratified_folds(labels, folds=5, rng_seed=7)
        b = stratified_folds(labels, folds=5, rng_seed=7)
        assert np.array_equal(a, b)

    def test_small_class_shrinks_folds_with_warning(self):
        labels = [0] * 12 + [1] * 3
        with pytest.warns(UserWarning, match="reducing folds"):
            assignment = stratified_folds(labels, folds=10, rng_seed=0)
        assert assignment.max() == 2

    def test_singleton_class_rejected(self):
        with pytest.raises(ValueError, match="single member"):
            stratified_folds([0, 0, 0, 1], folds=2, rng_seed=0)


class TestSupervised:
    def test_identical_classes_classify_perfectly(self):
        # Each class is many copies of its own prototype, so even without
        # alignment k=1 classification is exact; with it, still exact.
        proto = {0: np.sin(np.linspace(0, 3, 20)), 1: np.cos(np.linspace(0, 3, 20))}
        train = labeled_set([proto[0]] * 4 + [proto[1]] * 4, [0] * 4 + [1] * 4)
        test = labeled_set([proto[0], proto[1]], [0, 1])
        config = EvalConfig(
            k_neighbors=1,
            folds=2,
            mode=EvalMode.SUPERVISED,
            congeal_config=CongealConfig(
                objective_kind=ObjectiveKind.VARIANCE_SUM, max_iterations=5
            ),
        )
        result = eval_supervised(train, test, config)
        assert result.mode is EvalMode.SUPERVISED
        assert result.aligned.accuracy == 1.0
        assert result.baseline.accuracy == 1.0
        assert result.aligned.classes == (0, 1)

    def test_needs_labels_on_both_splits(self):
        s = cluster_set()
        config = EvalConfig(mode=EvalMode.SUPERVISED)
        with pytest.raises(ValueError, match="labels"):
            eval_supervised(s.unlabeled(), s, config)
        with pytest.raises(ValueError, match="labels"):
            eval_supervised(s, s.unlabeled(), config)

    def test_confusion_counts_the_test_split(self):
        s = cluster_set(n_per_class=5)
        train = s.subset(range(0, 8))
        test = s.subset(range(8, 10))
        config = EvalConfig(
            k_neighbors=3,
            mode=EvalMode.SUPERVISED,
            congeal_config=CongealConfig(
                objective_kind=ObjectiveKind.VARIANCE_SUM, max_iterations=5
            ),
        )
        result = eval_supervised(train, test, config)
        assert result.aligned.confusion.sum() == len(test)
        assert result.baseline.confusion.sum() == len(test)


class TestUnsupervised:
    def test_protocol_allows_warp_only(self):
        s = cluster_set()
        for extra in (Transform.AMPLITUDE_SCALE, Transform.AMPLITUDE_OFFSET):
            config = unsupervised_config(
                enabled_transforms=frozenset({Transform.TIME_WARP, extra})
            )
            with pytest.raises(ValueError, match="time warping only"):
                eval_unsupervised(s, config)

    def test_needs_labels(self):
        with pytest.raises(ValueError, match="labels"):
            eval_unsupervised(cluster_set().unlabeled(), unsupervised_config())

    def test_baseline_and_aligned_share_folds(self):
        s = cluster_set(seed=5)
        config = unsupervised_config()
        paired = eval_unsupervised(s, config)
        baseline = eval_no_alignment(
            s,
            EvalConfig(
                k_neighbors=config.k_neighbors,
                folds=config.folds,
                mode=EvalMode.NO_ALIGNMENT,
                rng_seed=config.rng_seed,
            ),
        )
        assert np.array_equal(paired.baseline.per_fold, baseline.per_fold)
        assert np.array_equal(paired.baseline.confusion, baseline.confusion)

    def test_identical_curves_follow_the_tie_rules(self):
        # Every distance is zero, so each fold's prediction is forced by
        # the index and class-id tie rules; alignment cannot move anything.
        labels = [1] * 6 + [2] * 6
        s = labeled_set(np.tile(np.linspace(0, 1, 12), (12, 1)), labels)
        config = EvalConfig(
            k_neighbors=3,
            folds=3,
            mode=EvalMode.UNSUPERVISED,
            congeal_config=CongealConfig(
                objective_kind=ObjectiveKind.VARIANCE_SUM,
                enabled_transforms=WARP_ONLY,
                max_iterations=8,
                rng_seed=0,
            ),
            rng_seed=0,
        )
        paired = eval_unsupervised(s, config)
        assignment = stratified_folds(labels, folds=3, rng_seed=0)
        all_labels = np.asarray(labels)
        for f in range(3):
            train_idx = np.flatnonzero(assignment != f)
            test_idx = np.flatnonzero(assignment == f)
            # Stable sort on equal distances picks the first k train rows.
            votes = all_labels[train_idx[: config.k_neighbors]]
            values, counts = np.unique(votes, return_counts=True)
            forced = values[np.argmax(counts)]
            expected = float(np.mean(all_labels[test_idx] == forced))
            assert paired.aligned.per_fold[f] == expected
            assert paired.baseline.per_fold[f] == expected

    def test_accuracy_is_pooled_not_averaged(self):
        s = cluster_set(n_per_class=7, seed=2)
        paired = eval_unsupervised(s, unsupervised_config())
        for result in (paired.aligned, paired.baseline):
            assert result.confusion.sum() == len(s)
            correct = np.trace(result.confusion)
            assert result.accuracy == pytest.approx(correct / len(s))


class TestNoAlignment:
    def test_separated_clusters_are_easy(self):
        s = cluster_set(gap=10.0, noise=0.1)
        config = EvalConfig(
            k_neighbors=3, folds=3, mode=EvalMode.NO_ALIGNMENT, rng_seed=0
        )
        result = eval_no_alignment(s, config)
        assert result.accuracy == 1.0
        assert result.per_fold.size == 3

    def test_needs_labels(self):
        config = EvalConfig(mode=EvalMode.NO_ALIGNMENT)
        with pytest.raises(ValueError, match="labels"):
            eval_no_alignment(cluster_set().unlabeled(), config)

    def test_split_variant(self):
        s = cluster_set(gap=10.0, noise=0.1, seed=3)
        train = s.subset(range(0, 10))
        test = s.subset(range(10, 12))
        config = EvalConfig(k_neighbors=3, mode=EvalMode.NO_ALIGNMENT)
        result = eval_no_alignment_split(train, test, config)
        assert result.accuracy == 1.0
        assert result.per_fold.size == 1
        assert result.confusion.sum() == 2
