"""Synthetic benchmark generation with retained ground truth.

A benchmark dataset is built by transforming one seed curve many times,
drawing the parameters of a single transform family from difficulty-scaled
ranges.  The generating parameters are kept alongside the curves so that
alignment quality can be scored against the known answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .congeal import Transform
from .curves import (
    Curve,
    CurveSet,
    DEFAULT_WEIGHT_BOUND,
    TransformParams,
    apply_transform,
    time_grid,
)

DEFAULT_SEED_LENGTH = 150


def _gauss(t: np.ndarray, center: float, width: float) -> np.ndarray:
    return np.exp(-(((t - center) / width) ** 2))


def _bumps2(t):
    """exp(-((t-0.3)/0.08)^2) + 0.7*exp(-((t-0.7)/0.08)^2)"""
    return _gauss(t, 0.3, 0.08) + 0.7 * _gauss(t, 0.7, 0.08)


def _bumps2r(t):
    """0.7*exp(-((t-0.3)/0.08)^2) + exp(-((t-0.7)/0.08)^2)"""
    return 0.7 * _gauss(t, 0.3, 0.08) + _gauss(t, 0.7, 0.08)


def _bumps3(t):
    """0.9*g(t;0.2,0.06) + 0.6*g(t;0.5,0.07) + 0.8*g(t;0.8,0.05), g Gaussian"""
    return 0.9 * _gauss(t, 0.2, 0.06) + 0.6 * _gauss(t, 0.5, 0.07) + 0.8 * _gauss(t, 0.8, 0.05)


def _dampedsine(t):
    """exp(-1.5*t) * sin(6*pi*t)"""
    return np.exp(-1.5 * t) * np.sin(6.0 * np.pi * t)


def _dampedsine2(t):
    """0.8*exp(-2.5*t)*cos(4*pi*t) + 0.3*exp(-((t-0.75)/0.1)^2)"""
    return 0.8 * np.exp(-2.5 * t) * np.cos(4.0 * np.pi * t) + 0.3 * _gauss(t, 0.75, 0.1)


_BUILTIN_SEEDS = {
    "bumps2": _bumps2,
    "bumps2r": _bumps2r,
    "bumps3": _bumps3,
    "dampedsine": _dampedsine,
    "dampedsine2": _dampedsine2,
}

BUILTIN_SEED_NAMES = tuple(sorted(_BUILTIN_SEEDS))


def builtin_seed(name: str, length: int = DEFAULT_SEED_LENGTH) -> Curve:
    """One of the bundled analytic seed curves, sampled on the unit grid.

    The closed forms are documented on the generating functions; all are
    mixtures of Gaussian bumps and damped sinusoids.
    """
    try:
        func = _BUILTIN_SEEDS[name]
    except KeyError:
        raise ValueError(
            f"unknown builtin seed curve {name!r}; available: {', '.join(BUILTIN_SEED_NAMES)}"
        ) from None
    return Curve(func(time_grid(length)))


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic dataset: seed, family, difficulty, count."""

    seed_curve: Curve
    family: Transform
    difficulty: int
    copies: int = 50
    rng_seed: int = 0
    # Scales the parameter range width; 0.0 collapses every draw to the
    # identity transform (test hook for degenerate generation).
    range_scale: float = 1.0

    def __post_init__(self):
        if not isinstance(self.family, Transform):
            raise TypeError(f"family must be a Transform, got {self.family!r}")
        if not 1 <= int(self.difficulty) <= 5:
            raise ValueError(f"difficulty must be in 1..5, got {self.difficulty}")
        if self.copies < 2:
            raise ValueError(f"copies must be >= 2, got {self.copies}")
        if not 0.0 <= self.range_scale:
            raise ValueError(f"range_scale must be >= 0, got {self.range_scale}")


@dataclass(frozen=True)
class SynthDataset:
    """Generated curves plus the parameters that produced each of them."""

    curves: CurveSet
    ground_truth_params: tuple
    seed_curve: Curve


def _draw_params(
    family: Transform,
    difficulty: int,
    amp_std: float,
    rng: np.random.Generator,
    range_scale: float,
) -> TransformParams:
    """One parameter draw from the difficulty-scaled family ranges.

    Scale: alpha log-uniform on [1/(1+0.3d), 1+0.3d].  Offset: beta uniform
    on +-0.4d amplitude standard deviations.  Warp: each Fourier weight
    uniform on +-0.5d, clipped to the default weight bound.
    """
    if family is Transform.AMPLITUDE_SCALE:
        half = math.log1p(0.3 * difficulty) * range_scale
        return TransformParams(alpha=math.exp(rng.uniform(-half, half)))
    if family is Transform.AMPLITUDE_OFFSET:
        half = 0.4 * difficulty * amp_std * range_scale
        return TransformParams(beta=rng.uniform(-half, half))
    half = 0.5 * difficulty * range_scale
    w = np.clip(
        rng.uniform(-half, half, size=4), -DEFAULT_WEIGHT_BOUND, DEFAULT_WEIGHT_BOUND
    )
    return TransformParams(sin_weights=w[:2], cos_weights=w[2:])


def generate(spec: SynthSpec) -> SynthDataset:
    """Transform the seed curve ``spec.copies`` times within one family.

    Deterministic given ``spec.rng_seed``; copy ``c`` draws from its own
    generator seeded with ``rng_seed + c``, so copies are independent of
    the total count and could be produced in parallel.
    """
    amp_std = float(np.std(spec.seed_curve.samples))
    truths = []
    rows = []
    for c in range(spec.copies):
        rng = np.random.default_rng(spec.rng_seed + c)
        params = _draw_params(
            spec.family, spec.difficulty, amp_std, rng, spec.range_scale
        )
        truths.append(params)
        rows.append(apply_transform(spec.seed_curve, params).samples)
    return SynthDataset(
        curves=CurveSet.from_samples(np.stack(rows)),
        ground_truth_params=tuple(truths),
        seed_curve=spec.seed_curve,
    )


def recovery_error(aligned: CurveSet, seed: Curve) -> float:
    """Mean RMSE between the aligned curves and the generating seed.

    Joint alignment fixes curves relative to each other, not to the seed's
    absolute scale and offset, so a single shared affine map (fit by least
    squares from the mean aligned curve onto the seed) is applied to every
    curve before measuring.
    """
    if aligned.curve_length != len(seed):
        raise ValueError(
            f"aligned curves have {aligned.curve_length} samples, seed has {len(seed)}"
        )
    matrix = aligned.sample_matrix()
    mean_curve = matrix.mean(axis=0)
    design = np.column_stack([mean_curve, np.ones(mean_curve.size)])
    (a, b), *_ = np.linalg.lstsq(design, seed.samples, rcond=None)
    residuals = a * matrix + b - seed.samples
    return float(np.mean(np.sqrt(np.mean(residuals**2, axis=1))))
