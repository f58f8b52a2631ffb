"""Joint alignment by randomized coordinate descent.

Each pass visits every curve in index order and, within a curve, every
enabled parameter in a fixed order (warp weights, then log amplitude
scale, then amplitude offset).  A uniform random perturbation is tried at
the parameter's current step size; it is kept only if the joint objective
strictly decreases, otherwise the negated perturbation gets one try.
After each pass the parameter set is recentered so the mean transform stays
near identity, the objective is recorded, and step sizes are annealed
whenever a full pass accepted nothing.  The search stops once the
objective stagnates for a configured number of passes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .curves import (
    CurveSet,
    ParameterRangeError,
    TransformParams,
    WARP_FREQUENCIES,
    _warp_values,
    time_grid,
)
from .objective import MIN_ENTROPY_SAMPLES, ObjectiveKind, location_scores


class Transform(enum.Enum):
    """The three allowable transform families."""

    TIME_WARP = "warp"
    AMPLITUDE_SCALE = "scale"
    AMPLITUDE_OFFSET = "offset"


ALL_TRANSFORMS = frozenset(Transform)

_N_WEIGHTS = 2 * len(WARP_FREQUENCIES)
_WEIGHT_NAMES = tuple(
    [f"sin@{f:g}" for f in WARP_FREQUENCIES] + [f"cos@{f:g}" for f in WARP_FREQUENCIES]
)


@dataclass(frozen=True)
class CongealConfig:
    """Settings for one congealing run.

    ``step_beta`` is expressed in units of the input set's amplitude
    standard deviation; the other step sizes are dimensionless.
    """

    objective_kind: ObjectiveKind = ObjectiveKind.ENTROPY_SUM
    enabled_transforms: frozenset = ALL_TRANSFORMS
    step_weights: float = 0.05
    step_log_alpha: float = 0.02
    step_beta: float = 0.02
    max_iterations: int = 200
    stagnation_window: int = 5
    stagnation_tolerance: float = 1e-8
    anneal_factor: float = 0.9
    rng_seed: int = 0
    recenter_enabled: bool = True

    def __post_init__(self):
        object.__setattr__(
            self, "enabled_transforms", frozenset(self.enabled_transforms)
        )
        if not self.enabled_transforms:
            raise ValueError("at least one transform family must be enabled")
        for name in ("step_weights", "step_log_alpha", "step_beta"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.stagnation_window < 1:
            raise ValueError("stagnation_window must be >= 1")
        if self.stagnation_tolerance < 0:
            raise ValueError("stagnation_tolerance must be >= 0")
        if not 0.0 < self.anneal_factor <= 1.0:
            raise ValueError("anneal_factor must lie in (0, 1]")


@dataclass(frozen=True)
class AlignmentReport:
    """Outcome of a congealing run."""

    final_set: CurveSet
    objective_trace: np.ndarray
    iterations_run: int
    converged: bool
    accepted_moves: int

    def __post_init__(self):
        trace = np.asarray(self.objective_trace, dtype=float)
        trace.flags.writeable = False
        object.__setattr__(self, "objective_trace", trace)
        if np.any(np.diff(trace) > 0):
            raise AssertionError("objective trace increased between iterations")


class _State:
    """Mutable optimizer state: parameter arrays plus cached transforms."""

    def __init__(self, curve_set: CurveSet, kind: ObjectiveKind):
        self.originals = curve_set.sample_matrix()
        self.n, self.m = self.originals.shape
        self.grid = time_grid(self.m)
        self.kind = kind
        self.weights = np.stack(
            [np.concatenate([p.sin_weights, p.cos_weights]) for p in curve_set.params]
        )
        self.alphas = np.array([p.alpha for p in curve_set.params])
        self.betas = np.array([p.beta for p in curve_set.params])
        self.weight_bound = min(p.weight_bound for p in curve_set.params)
        # Warped-but-not-amplitude-mapped samples, one row per curve.
        self.warped = np.stack(
            [self._warp_row(i, self.weights[i]) for i in range(self.n)]
        )
        self.transformed = self.alphas[:, None] * self.warped + self.betas[:, None]
        self.total = self.evaluate(self.transformed)

    def _warp_row(self, i: int, weights: np.ndarray) -> np.ndarray:
        h = _warp_values(weights, self.m)
        return np.interp(h, self.grid, self.originals[i])

    def evaluate(self, matrix: np.ndarray) -> float:
        return float(np.sum(location_scores(matrix, self.kind)))

    def try_row(self, i: int, candidate_row: np.ndarray) -> float:
        """Objective with curve ``i`` replaced by ``candidate_row``."""
        saved = self.transformed[i].copy()
        self.transformed[i] = candidate_row
        total = self.evaluate(self.transformed)
        self.transformed[i] = saved
        return total

    def final_params(self) -> tuple:
        k = len(WARP_FREQUENCIES)
        return tuple(
            TransformParams(
                alpha=float(self.alphas[i]),
                beta=float(self.betas[i]),
                sin_weights=self.weights[i, :k],
                cos_weights=self.weights[i, k:],
                weight_bound=self.weight_bound,
            )
            for i in range(self.n)
        )


def _relative_drop(old: float, new: float) -> float:
    return (old - new) / max(abs(old), abs(new), 1e-12)


def congeal(curve_set: CurveSet, config: CongealConfig) -> AlignmentReport:
    """Jointly align the set by minimizing the configured objective.

    Deterministic given ``config.rng_seed``.  The returned report carries
    the transformed curves, the per-curve parameters that produced them,
    and the per-pass objective trace (non-increasing by construction).
    """
    kind = config.objective_kind
    if kind is ObjectiveKind.ENTROPY_SUM and len(curve_set) < MIN_ENTROPY_SAMPLES:
        raise ValueError(
            f"entropy objective needs >= {MIN_ENTROPY_SAMPLES} curves, got {len(curve_set)}"
        )

    state = _State(curve_set, kind)
    rng = np.random.default_rng(config.rng_seed)

    warp_on = Transform.TIME_WARP in config.enabled_transforms
    scale_on = Transform.AMPLITUDE_SCALE in config.enabled_transforms
    offset_on = Transform.AMPLITUDE_OFFSET in config.enabled_transforms

    amp_std = curve_set.amplitude_std()
    step_weights = config.step_weights
    step_log_alpha = config.step_log_alpha
    step_beta = config.step_beta * (amp_std if amp_std > 0 else 1.0)

    trace: list[float] = []
    accepted_total = 0
    converged = False

    for _ in range(config.max_iterations):
        accepted_this_pass = 0
        for i in range(state.n):
            if warp_on:
                for j in range(_N_WEIGHTS):
                    delta = rng.uniform(-step_weights, step_weights)
                    accepted_this_pass += _try_weight(state, i, j, delta)
            if scale_on:
                delta = rng.uniform(-step_log_alpha, step_log_alpha)
                accepted_this_pass += _try_log_alpha(state, i, delta)
            if offset_on:
                delta = rng.uniform(-step_beta, step_beta)
                accepted_this_pass += _try_beta(state, i, delta)
        accepted_total += accepted_this_pass

        if config.recenter_enabled:
            _recenter_state(state)

        trace.append(state.total)
        if accepted_this_pass == 0:
            step_weights *= config.anneal_factor
            step_log_alpha *= config.anneal_factor
            step_beta *= config.anneal_factor

        w = config.stagnation_window
        if len(trace) > w and _relative_drop(trace[-w - 1], trace[-1]) < config.stagnation_tolerance:
            converged = True
            break

    transformed = CurveSet.from_samples(
        state.transformed, labels=curve_set.labels, params=state.final_params()
    )
    return AlignmentReport(
        final_set=transformed,
        objective_trace=np.array(trace),
        iterations_run=len(trace),
        converged=converged,
        accepted_moves=accepted_total,
    )


def _try_weight(state: _State, i: int, j: int, delta: float) -> int:
    base = state.weights[i, j]
    for signed in (delta, -delta):
        candidate = base + signed
        if abs(candidate) > state.weight_bound:
            continue  # out-of-bound proposals are rejected before evaluation
        weights = state.weights[i].copy()
        weights[j] = candidate
        try:
            warped_row = state._warp_row(i, weights)
        except ParameterRangeError as exc:
            raise ParameterRangeError(
                f"warp evaluation failed for curve {i}, weight {_WEIGHT_NAMES[j]}: {exc}"
            ) from exc
        row = state.alphas[i] * warped_row + state.betas[i]
        total = state.try_row(i, row)
        if total < state.total:
            state.weights[i, j] = candidate
            state.warped[i] = warped_row
            state.transformed[i] = row
            state.total = total
            return 1
    return 0


def _try_log_alpha(state: _State, i: int, delta: float) -> int:
    for signed in (delta, -delta):
        candidate = state.alphas[i] * math.exp(signed)
        row = candidate * state.warped[i] + state.betas[i]
        total = state.try_row(i, row)
        if total < state.total:
            state.alphas[i] = candidate
            state.transformed[i] = row
            state.total = total
            return 1
    return 0


def _try_beta(state: _State, i: int, delta: float) -> int:
    for signed in (delta, -delta):
        candidate = state.betas[i] + signed
        row = state.alphas[i] * state.warped[i] + candidate
        total = state.try_row(i, row)
        if total < state.total:
            state.betas[i] = candidate
            state.transformed[i] = row
            state.total = total
            return 1
    return 0


def _recenter_state(state: _State) -> None:
    """Recenter parameters; roll back if it worsens the objective.

    Shifting every beta by a constant leaves per-location spreads intact,
    but recentering scales and warps can change the objective, and mean
    subtraction could push a weight past its bound.  Either condition
    cancels the recentering so the trace stays non-increasing and weights
    stay bounded.
    """
    w_mean = state.weights.mean(axis=0)
    weights = state.weights - w_mean
    if np.abs(weights).max() > state.weight_bound:
        return
    alphas = state.alphas / math.exp(float(np.mean(np.log(state.alphas))))
    betas = state.betas - state.betas.mean()

    if np.any(w_mean != 0.0):
        warped = np.stack([state._warp_row(i, weights[i]) for i in range(state.n)])
    else:
        warped = state.warped
    transformed = alphas[:, None] * warped + betas[:, None]
    total = state.evaluate(transformed)
    if total > state.total:
        return
    state.weights = weights
    state.alphas = alphas
    state.betas = betas
    state.warped = warped
    state.transformed = transformed
    state.total = total


@dataclass(frozen=True)
class PerClassAlignment:
    """Per-class congealing reports plus the reassembled set."""

    reports: dict
    combined: CurveSet


def min_class_size(kind: ObjectiveKind) -> int:
    return MIN_ENTROPY_SAMPLES if kind is ObjectiveKind.ENTROPY_SUM else 2


def align_per_class(curve_set: CurveSet, config: CongealConfig) -> PerClassAlignment:
    """Congeal each labeled class independently.

    Classes run in ascending label order with per-class seeds derived from
    the configured seed plus the class rank, so a single-class set
    reproduces a plain :func:`congeal` run exactly.  The combined set
    restores every curve to its original position.
    """
    if curve_set.labels is None:
        raise ValueError("per-class alignment needs class labels")
    classes = sorted(set(curve_set.labels))
    needed = min_class_size(config.objective_kind)

    n = len(curve_set)
    curves: list = [None] * n
    params: list = [None] * n
    reports: dict = {}
    for rank, cls in enumerate(classes):
        indices = [i for i, lab in enumerate(curve_set.labels) if lab == cls]
        if len(indices) < needed:
            raise ValueError(
                f"class {cls} has {len(indices)} curves; needs >= {needed} "
                f"for the {config.objective_kind.value} objective"
            )
        subset = curve_set.subset(indices)
        report = congeal(subset, replace(config, rng_seed=config.rng_seed + rank))
        reports[cls] = report
        for pos, idx in enumerate(indices):
            curves[idx] = report.final_set.curves[pos]
            params[idx] = report.final_set.params[pos]

    combined = CurveSet(
        curves=tuple(curves), params=tuple(params), labels=curve_set.labels
    )
    return PerClassAlignment(reports=reports, combined=combined)
