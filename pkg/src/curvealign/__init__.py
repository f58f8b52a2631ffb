"""Joint alignment (congealing) of 1-D curves.

Curves living on a shared unit time grid are jointly aligned by giving
each one a six-parameter transform (a nonlinear monotone time warp driven
by four Fourier coefficients, an amplitude scale and an amplitude offset)
and minimizing the summed location-wise spread of the ensemble, measured
either by a nonparametric differential-entropy estimator or by variance.
The package adds synthetic benchmark generation with retained ground
truth, a classification-via-alignment evaluation harness, dataset and
report serialization, figure rendering, and a command-line interface.
"""

__version__ = "0.1.0"

from .congeal import (
    ALL_TRANSFORMS,
    AlignmentReport,
    CongealConfig,
    PerClassAlignment,
    Transform,
    align_per_class,
    congeal,
)
from .curves import (
    Curve,
    CurveSet,
    DEFAULT_WEIGHT_BOUND,
    ParameterRangeError,
    TransformParams,
    WARP_FREQUENCIES,
    WarpTable,
    apply_transform,
    basis_matrix,
    coefficient_function,
    identity_params,
    recenter,
    time_grid,
    warp_function,
)
from .dataio import (
    DataFormatError,
    PARAM_COLUMNS,
    RunManifest,
    read_dataset,
    read_manifest,
    read_params,
    write_curve,
    write_dataset,
    write_manifest,
    write_params,
    write_report,
)
from .evalkit import (
    EvalConfig,
    EvalMode,
    EvalResult,
    PairedEvalResult,
    eval_no_alignment,
    eval_no_alignment_split,
    eval_supervised,
    eval_unsupervised,
    knn_classify,
    stratified_folds,
)
from .objective import (
    ObjectiveKind,
    ObjectiveValue,
    default_window,
    joint_objective,
    location_scores,
    location_variance,
    vasicek_entropy,
)
from .synthgen import (
    BUILTIN_SEED_NAMES,
    SynthDataset,
    SynthSpec,
    builtin_seed,
    generate,
    recovery_error,
)

__all__ = [
    "ALL_TRANSFORMS",
    "AlignmentReport",
    "BUILTIN_SEED_NAMES",
    "CongealConfig",
    "Curve",
    "CurveSet",
    "DEFAULT_WEIGHT_BOUND",
    "DataFormatError",
    "EvalConfig",
    "EvalMode",
    "EvalResult",
    "ObjectiveKind",
    "ObjectiveValue",
    "PARAM_COLUMNS",
    "PairedEvalResult",
    "ParameterRangeError",
    "PerClassAlignment",
    "RunManifest",
    "SynthDataset",
    "SynthSpec",
    "Transform",
    "TransformParams",
    "WARP_FREQUENCIES",
    "WarpTable",
    "align_per_class",
    "apply_transform",
    "basis_matrix",
    "builtin_seed",
    "coefficient_function",
    "congeal",
    "default_window",
    "eval_no_alignment",
    "eval_no_alignment_split",
    "eval_supervised",
    "eval_unsupervised",
    "generate",
    "identity_params",
    "joint_objective",
    "knn_classify",
    "location_scores",
    "location_variance",
    "read_dataset",
    "read_manifest",
    "read_params",
    "recenter",
    "recovery_error",
    "stratified_folds",
    "time_grid",
    "vasicek_entropy",
    "warp_function",
    "write_curve",
    "write_dataset",
    "write_manifest",
    "write_params",
    "write_report",
    "__version__",
]
