"""Curve and transform-parameter types plus the transform machinery.

A curve is a fixed-length vector of amplitude samples on the uniform unit
time grid t_i = i/(M-1).  Each curve carries a six-parameter transform:
a nonlinear monotone time warp h(t) driven by four Fourier coefficients,
a positive amplitude scale and an amplitude offset.  The warp follows
Ramsay's construction: any coefficient function w(t) yields a strictly
monotone h via

    h(t) = (1/Z) * integral_0^t exp( integral_0^r w(s) ds ) dr

normalized so h(0) = 0 and h(1) = 1.  Monotonicity is automatic because
the integrand exp(.) is positive.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

# Frequencies of the sine/cosine basis for the coefficient function.
# Two frequencies (1/2, 1) give four basis functions, which is enough
# modeling capacity for smooth warps.
WARP_FREQUENCIES = (0.5, 1.0)

# Default bound on each Fourier weight.  Keeps exp of the inner integral
# well inside representable range and the warps physically plausible.
DEFAULT_WEIGHT_BOUND = 5.0

MIN_CURVE_LENGTH = 4


class ParameterRangeError(ValueError):
    """Transform parameters drove the warp integrals out of numeric range."""


def time_grid(length: int) -> np.ndarray:
    """Uniform sample grid t_i = i/(length-1) on the unit interval."""
    if length < 2:
        raise ValueError(f"grid needs at least 2 points, got {length}")
    return np.arange(length, dtype=float) / (length - 1)


def _as_readonly(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Curve:
    """A 1-D signal: amplitude samples on the uniform unit-time grid."""

    samples: np.ndarray

    def __post_init__(self):
        arr = _as_readonly(self.samples, "samples")
        if arr.size < MIN_CURVE_LENGTH:
            raise ValueError(
                f"curve needs at least {MIN_CURVE_LENGTH} samples, got {arr.size}"
            )
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def grid(self) -> np.ndarray:
        return time_grid(self.samples.size)


@dataclass(frozen=True)
class TransformParams:
    """Per-curve transform parameters: amplitude scale/offset + warp weights.

    ``sin_weights[k]`` and ``cos_weights[k]`` drive the basis functions
    sin(2*pi*f_k*t) and cos(2*pi*f_k*t) with f_k from ``WARP_FREQUENCIES``.
    ``alpha`` must be positive; a zero or negative scale would annihilate
    or reflect the curve and is never a useful alignment move.
    """

    alpha: float = 1.0
    beta: float = 0.0
    sin_weights: np.ndarray = field(default_factory=lambda: np.zeros(2))
    cos_weights: np.ndarray = field(default_factory=lambda: np.zeros(2))
    weight_bound: float = DEFAULT_WEIGHT_BOUND

    def __post_init__(self):
        sw = _as_readonly(self.sin_weights, "sin_weights")
        cw = _as_readonly(self.cos_weights, "cos_weights")
        if sw.size != cw.size:
            raise ValueError(
                f"sin_weights and cos_weights differ in length: {sw.size} vs {cw.size}"
            )
        if sw.size != len(WARP_FREQUENCIES):
            raise ValueError(
                f"expected {len(WARP_FREQUENCIES)} weights per basis, got {sw.size}"
            )
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be positive and finite, got {self.alpha}")
        if not math.isfinite(self.beta):
            raise ValueError(f"beta must be finite, got {self.beta}")
        bound = self.weight_bound
        if np.any(np.abs(sw) > bound) or np.any(np.abs(cw) > bound):
            raise ValueError(f"warp weights exceed the bound |w| <= {bound}")
        object.__setattr__(self, "sin_weights", sw)
        object.__setattr__(self, "cos_weights", cw)

    @property
    def is_identity(self) -> bool:
        return (
            self.alpha == 1.0
            and self.beta == 0.0
            and not self.sin_weights.any()
            and not self.cos_weights.any()
        )


def identity_params(weight_bound: float = DEFAULT_WEIGHT_BOUND) -> TransformParams:
    """Parameters of the identity transform."""
    return TransformParams(weight_bound=weight_bound)


@dataclass(frozen=True)
class WarpTable:
    """Discretized warp h(t_i): endpoints pinned, strictly increasing."""

    h_values: np.ndarray

    def __post_init__(self):
        h = _as_readonly(self.h_values, "h_values")
        if h.size < MIN_CURVE_LENGTH:
            raise ValueError(f"warp table needs >= {MIN_CURVE_LENGTH} nodes")
        if h[0] != 0.0 or h[-1] != 1.0:
            raise ValueError(
                f"warp endpoints must be exactly (0, 1), got ({h[0]!r}, {h[-1]!r})"
            )
        if np.any(np.diff(h) <= 0.0):
            raise ValueError("warp table is not strictly increasing")
        object.__setattr__(self, "h_values", h)

    def __len__(self) -> int:
        return self.h_values.size


@dataclass(frozen=True)
class CurveSet:
    """N curves of equal length, their transform parameters and labels."""

    curves: tuple
    params: tuple
    labels: tuple | None = None

    def __post_init__(self):
        curves = tuple(self.curves)
        params = tuple(self.params)
        if len(curves) < 2:
            raise ValueError(f"a curve set needs at least 2 curves, got {len(curves)}")
        lengths = {len(c) for c in curves}
        if len(lengths) != 1:
            raise ValueError(f"curves differ in length: {sorted(lengths)}")
        if len(params) != len(curves):
            raise ValueError(
                f"{len(params)} parameter records for {len(curves)} curves"
            )
        labels = self.labels
        if labels is not None:
            labels = tuple(int(x) for x in labels)
            if len(labels) != len(curves):
                raise ValueError(f"{len(labels)} labels for {len(curves)} curves")
        object.__setattr__(self, "curves", curves)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_samples(cls, matrix, labels=None, params=None) -> "CurveSet":
        """Build a set from an (N, M) sample matrix with identity transforms."""
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2:
            raise ValueError(f"expected an (N, M) matrix, got shape {matrix.shape}")
        curves = tuple(Curve(row) for row in matrix)
        if params is None:
            params = tuple(identity_params() for _ in curves)
        return cls(curves=curves, params=tuple(params), labels=labels)

    def __len__(self) -> int:
        return len(self.curves)

    @property
    def curve_length(self) -> int:
        return len(self.curves[0])

    def sample_matrix(self) -> np.ndarray:
        """Stack the curves into an (N, M) array."""
        return np.stack([c.samples for c in self.curves])

    def amplitude_std(self) -> float:
        """Population standard deviation over every sample in the set."""
        return float(np.std(self.sample_matrix()))

    def with_params(self, params) -> "CurveSet":
        return CurveSet(curves=self.curves, params=tuple(params), labels=self.labels)

    def unlabeled(self) -> "CurveSet":
        """A label-blind view of the same curves and parameters."""
        return CurveSet(curves=self.curves, params=self.params, labels=None)

    def subset(self, indices) -> "CurveSet":
        idx = list(indices)
        labels = None if self.labels is None else tuple(self.labels[i] for i in idx)
        return CurveSet(
            curves=tuple(self.curves[i] for i in idx),
            params=tuple(self.params[i] for i in idx),
            labels=labels,
        )


@functools.lru_cache(maxsize=32)
def _basis_readonly(length: int) -> np.ndarray:
    t = time_grid(length)
    rows = [np.sin(2.0 * np.pi * f * t) for f in WARP_FREQUENCIES]
    rows += [np.cos(2.0 * np.pi * f * t) for f in WARP_FREQUENCIES]
    basis = np.stack(rows)
    basis.flags.writeable = False
    return basis


def basis_matrix(length: int) -> np.ndarray:
    """Values of the four warp basis functions on the sample grid.

    Row order: sin at each frequency, then cos at each frequency.
    """
    return _basis_readonly(length).copy()


def coefficient_function(params: TransformParams, t) -> float | np.ndarray:
    """Evaluate the warp coefficient function w(t).

    w(t) = sum_k sin_weights[k]*sin(2*pi*f_k*t) + cos_weights[k]*cos(2*pi*f_k*t)
    with the frequency set ``WARP_FREQUENCIES``.
    """
    t = np.asarray(t, dtype=float)
    angles = 2.0 * np.pi * np.multiply.outer(np.asarray(WARP_FREQUENCIES), t)
    value = np.tensordot(params.sin_weights, np.sin(angles), axes=1) + np.tensordot(
        params.cos_weights, np.cos(angles), axes=1
    )
    return float(value) if value.ndim == 0 else value


def _warp_values(weights: np.ndarray, length: int) -> np.ndarray:
    """Normalized warp values on an ``length``-point grid.

    ``weights`` is the concatenation (sin_weights, cos_weights).  Both nested
    integrals use the cumulative trapezoidal rule on the curve's own grid; the
    constant step factor of the outer integral cancels in the normalization
    and is omitted so the zero-weight warp reproduces the grid bit for bit.
    """
    step = 1.0 / (length - 1)
    w = weights @ _basis_readonly(length)
    inner = np.empty(length)
    inner[0] = 0.0
    np.cumsum((w[:-1] + w[1:]) * (0.5 * step), out=inner[1:])
    growth = np.exp(inner)
    if not np.all(np.isfinite(growth)):
        raise ParameterRangeError(
            "exp of the inner warp integral overflowed; weights are out of range"
        )
    h = np.empty(length)
    h[0] = 0.0
    np.cumsum(growth[:-1] + growth[1:], out=h[1:])
    h /= h[-1]
    return h


def warp_function(params: TransformParams, length: int) -> WarpTable:
    """Monotone warp h(t) induced by the parameters, tabulated on the grid."""
    if length < MIN_CURVE_LENGTH:
        raise ValueError(f"grid size must be >= {MIN_CURVE_LENGTH}, got {length}")
    weights = np.concatenate([params.sin_weights, params.cos_weights])
    return WarpTable(_warp_values(weights, length))


def _transform_samples(
    samples: np.ndarray, grid: np.ndarray, alpha: float, beta: float, h: np.ndarray
) -> np.ndarray:
    warped = np.interp(h, grid, samples)
    return alpha * warped + beta


def apply_transform(curve: Curve, params: TransformParams) -> Curve:
    """Warp the curve in time, then map amplitude y -> alpha*y + beta.

    The output samples the input at h(t_i) by piecewise-linear interpolation;
    h maps into [0, 1] by construction so no extrapolation can occur.
    """
    table = warp_function(params, len(curve))
    out = _transform_samples(
        curve.samples, curve.grid, params.alpha, params.beta, table.h_values
    )
    return Curve(out)


def recenter(curve_set: CurveSet) -> CurveSet:
    """Renormalize the set's parameters so the mean transform is identity.

    Subtracts the across-curve mean of each Fourier weight and of beta and
    divides every alpha by the geometric mean of the alphas.  This keeps the
    ensemble from drifting toward trivial alignments while preserving all
    relative transforms.
    """
    params = curve_set.params
    sin_w = np.stack([p.sin_weights for p in params])
    cos_w = np.stack([p.cos_weights for p in params])
    alphas = np.array([p.alpha for p in params])
    betas = np.array([p.beta for p in params])

    sin_w = sin_w - sin_w.mean(axis=0)
    cos_w = cos_w - cos_w.mean(axis=0)
    betas = betas - betas.mean()
    alphas = alphas / math.exp(float(np.mean(np.log(alphas))))

    # Mean subtraction may push a weight slightly past the original bound;
    # recentering must stay total, so widen the recorded bound to cover it.
    bound = max(p.weight_bound for p in params)
    observed = max(np.abs(sin_w).max(), np.abs(cos_w).max())
    bound = max(bound, float(observed))
    new_params = tuple(
        TransformParams(
            alpha=float(alphas[i]),
            beta=float(betas[i]),
            sin_weights=sin_w[i],
            cos_weights=cos_w[i],
            weight_bound=bound,
        )
        for i in range(len(params))
    )
    return curve_set.with_params(new_params)
