"""Classification-via-alignment evaluation harness.

Provides a K-nearest-neighbor classifier on raw sample vectors, stratified
cross-validation folds, and two alignment protocols:

* supervised: each class (train and test members together) is congealed
  independently before classification.  This mirrors a protocol that is
  known to leak grouping information from test labels into the aligned
  representation; it is reproduced deliberately and paired with a
  no-alignment baseline on the identical split so the effect is visible.
* unsupervised: all curves are congealed together, label-blind, with time
  warping only, then classified fold by fold.

Every aligned evaluation returns the paired no-alignment result computed
on byte-identical splits.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .congeal import CongealConfig, Transform, align_per_class, congeal
from .curves import CurveSet


class EvalMode(enum.Enum):
    SUPERVISED = "supervised"
    UNSUPERVISED = "unsupervised"
    NO_ALIGNMENT = "none"


@dataclass(frozen=True)
class EvalConfig:
    """Settings shared by the evaluation pipelines."""

    k_neighbors: int = 10
    folds: int = 10
    mode: EvalMode = EvalMode.UNSUPERVISED
    congeal_config: CongealConfig = field(default_factory=CongealConfig)
    rng_seed: int = 0

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError(f"k_neighbors must be >= 1, got {self.k_neighbors}")
        if self.folds < 2:
            raise ValueError(f"folds must be >= 2, got {self.folds}")
        if not isinstance(self.mode, EvalMode):
            raise TypeError(f"mode must be an EvalMode, got {self.mode!r}")


@dataclass(frozen=True)
class EvalResult:
    """Accuracy plus per-fold breakdown and a confusion matrix.

    ``confusion[i, j]`` counts test curves of class ``classes[i]`` predicted
    as ``classes[j]``; ``accuracy`` is pooled correct/total over all folds.
    """

    accuracy: float
    per_fold: np.ndarray
    confusion: np.ndarray
    classes: tuple

    def __post_init__(self):
        per_fold = np.asarray(self.per_fold, dtype=float)
        per_fold.flags.writeable = False
        confusion = np.asarray(self.confusion, dtype=int)
        confusion.flags.writeable = False
        object.__setattr__(self, "per_fold", per_fold)
        object.__setattr__(self, "confusion", confusion)
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError(f"accuracy out of [0, 1]: {self.accuracy}")


@dataclass(frozen=True)
class PairedEvalResult:
    """An aligned evaluation with its no-alignment twin on identical folds."""

    mode: EvalMode
    aligned: EvalResult
    baseline: EvalResult


def knn_classify(train: CurveSet, test: CurveSet, k: int) -> np.ndarray:
    """Predict test labels by majority vote among the k nearest train curves.

    Distance is plain Euclidean between sample vectors.  Ties on distance
    go to the lower training index; ties on vote count go to the lowest
    class id.  Both rules make predictions order-independent.
    """
    if train.labels is None:
        raise ValueError("training set must be labeled")
    if train.curve_length != test.curve_length:
        raise ValueError(
            f"train and test lengths differ: {train.curve_length} vs {test.curve_length}"
        )
    if not 1 <= k <= len(train):
        raise ValueError(f"k must be in 1..{len(train)}, got {k}")

    train_matrix = train.sample_matrix()
    test_matrix = test.sample_matrix()
    labels = np.asarray(train.labels)
    predictions = np.empty(len(test), dtype=labels.dtype)
    for i, row in enumerate(test_matrix):
        distances = np.linalg.norm(train_matrix - row, axis=1)
        nearest = np.argsort(distances, kind="stable")[:k]
        votes, counts = np.unique(labels[nearest], return_counts=True)
        predictions[i] = votes[np.argmax(counts)]
    return predictions


def stratified_folds(labels, folds: int, rng_seed: int) -> np.ndarray:
    """Assign each item to a fold, preserving class proportions.

    Members of each class are shuffled with the seeded generator and dealt
    round-robin.  If the smallest class has fewer members than ``folds``
    the fold count shrinks to that size, with a warning.
    """
    labels = list(labels)
    classes = sorted(set(labels))
    sizes = {cls: labels.count(cls) for cls in classes}
    smallest = min(sizes.values())
    if smallest == 1 and folds >= 2:
        offender = next(cls for cls in classes if sizes[cls] == 1)
        raise ValueError(f"class {offender} has a single member; cannot stratify")
    if smallest < folds:
        warnings.warn(
            f"smallest class has {smallest} members; reducing folds from "
            f"{folds} to {smallest}",
            stacklevel=2,
        )
        folds = smallest

    rng = np.random.default_rng(rng_seed)
    assignment = np.empty(len(labels), dtype=int)
    for cls in classes:
        members = np.flatnonzero(np.asarray(labels) == cls)
        order = rng.permutation(members.size)
        for slot, member in enumerate(members[order]):
            assignment[member] = slot % folds
    return assignment


def _confusion(true_labels, predicted, classes) -> np.ndarray:
    index = {cls: i for i, cls in enumerate(classes)}
    matrix = np.zeros((len(classes), len(classes)), dtype=int)
    for t, p in zip(true_labels, predicted):
        matrix[index[int(t)], index[int(p)]] += 1
    return matrix


def _single_split_result(
    train: CurveSet, test: CurveSet, true_labels, k: int, classes
) -> EvalResult:
    predicted = knn_classify(train, test, k)
    correct = int(np.sum(np.asarray(true_labels) == predicted))
    accuracy = correct / len(true_labels)
    return EvalResult(
        accuracy=accuracy,
        per_fold=np.array([accuracy]),
        confusion=_confusion(true_labels, predicted, classes),
        classes=tuple(classes),
    )


def eval_supervised(
    train: CurveSet, test: CurveSet, config: EvalConfig
) -> PairedEvalResult:
    """Per-class alignment of train+test together, then classification.

    Test labels take part in the alignment grouping, which can leak
    information; the paired baseline on the identical split quantifies
    how much the alignment changed the outcome.
    """
    if train.labels is None or test.labels is None:
        raise ValueError("supervised evaluation needs labels on both splits")
    classes = sorted(set(train.labels) | set(test.labels))

    pooled = CurveSet(
        curves=train.curves + test.curves,
        params=train.params + test.params,
        labels=train.labels + test.labels,
    )
    aligned_all = align_per_class(pooled, config.congeal_config).combined
    n_train = len(train)
    aligned_train = aligned_all.subset(range(n_train))
    aligned_test = aligned_all.subset(range(n_train, len(pooled)))

    aligned = _single_split_result(
        aligned_train, aligned_test, test.labels, config.k_neighbors, classes
    )
    baseline = _single_split_result(
        train, test, test.labels, config.k_neighbors, classes
    )
    return PairedEvalResult(
        mode=EvalMode.SUPERVISED, aligned=aligned, baseline=baseline
    )


def _cv_result(fold_assignment, predictions_by_fold, labels, classes) -> EvalResult:
    labels = np.asarray(labels)
    n_folds = int(fold_assignment.max()) + 1
    per_fold = np.empty(n_folds)
    confusion = np.zeros((len(classes), len(classes)), dtype=int)
    correct_total = 0
    for f in range(n_folds):
        test_idx = np.flatnonzero(fold_assignment == f)
        predicted = predictions_by_fold[f]
        correct = int(np.sum(labels[test_idx] == predicted))
        correct_total += correct
        per_fold[f] = correct / test_idx.size
        confusion += _confusion(labels[test_idx], predicted, classes)
    return EvalResult(
        accuracy=correct_total / labels.size,
        per_fold=per_fold,
        confusion=confusion,
        classes=tuple(classes),
    )


def eval_no_alignment(curve_set: CurveSet, config: EvalConfig) -> EvalResult:
    """Cross-validated classification of the raw curves, no alignment."""
    if curve_set.labels is None:
        raise ValueError("cross-validated evaluation needs labels")
    labels = np.asarray(curve_set.labels)
    classes = sorted(set(curve_set.labels))
    assignment = stratified_folds(curve_set.labels, config.folds, config.rng_seed)
    predictions = []
    for f in range(int(assignment.max()) + 1):
        test_idx = np.flatnonzero(assignment == f)
        train_idx = np.flatnonzero(assignment != f)
        predictions.append(
            knn_classify(
                curve_set.subset(train_idx),
                curve_set.subset(test_idx),
                config.k_neighbors,
            )
        )
    return _cv_result(assignment, predictions, labels, classes)


def eval_no_alignment_split(
    train: CurveSet, test: CurveSet, config: EvalConfig
) -> EvalResult:
    """Single-split classification of the raw curves, no alignment."""
    if train.labels is None or test.labels is None:
        raise ValueError("split evaluation needs labels on both splits")
    classes = sorted(set(train.labels) | set(test.labels))
    return _single_split_result(
        train, test, test.labels, config.k_neighbors, classes
    )


def eval_unsupervised(curve_set: CurveSet, config: EvalConfig) -> PairedEvalResult:
    """Label-blind joint alignment inside stratified cross-validation.

    Each fold congeals the union of its train and test curves together,
    never seeing a label (the congealing entry point receives an unlabeled
    view), with time warping as the only enabled transform.  The paired
    baseline classifies the raw curves on the identical folds.
    """
    if curve_set.labels is None:
        raise ValueError("cross-validated evaluation needs labels")
    enabled = config.congeal_config.enabled_transforms
    if enabled != frozenset({Transform.TIME_WARP}):
        extras = sorted(t.value for t in enabled if t is not Transform.TIME_WARP)
        raise ValueError(
            "label-blind alignment admits time warping only; "
            f"disable transforms: {', '.join(extras) or '(none enabled)'}"
        )

    labels = np.asarray(curve_set.labels)
    classes = sorted(set(curve_set.labels))
    assignment = stratified_folds(curve_set.labels, config.folds, config.rng_seed)
    n_folds = int(assignment.max()) + 1

    aligned_preds = []
    baseline_preds = []
    for f in range(n_folds):
        test_idx = np.flatnonzero(assignment == f)
        train_idx = np.flatnonzero(assignment != f)

        fold_config = replace(
            config.congeal_config, rng_seed=config.congeal_config.rng_seed + f
        )
        report = congeal(curve_set.unlabeled(), fold_config)
        aligned = CurveSet(
            curves=report.final_set.curves,
            params=report.final_set.params,
            labels=curve_set.labels,
        )

        k = config.k_neighbors
        aligned_preds.append(
            knn_classify(aligned.subset(train_idx), aligned.subset(test_idx), k)
        )
        baseline_preds.append(
            knn_classify(curve_set.subset(train_idx), curve_set.subset(test_idx), k)
        )

    return PairedEvalResult(
        mode=EvalMode.UNSUPERVISED,
        aligned=_cv_result(assignment, aligned_preds, labels, classes),
        baseline=_cv_result(assignment, baseline_preds, labels, classes),
    )
