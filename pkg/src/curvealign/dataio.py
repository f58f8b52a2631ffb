"""Dataset and report serialization.

Two dataset formats are supported:

* ``ucr``: one curve per line, first token an integer class label, remaining
  tokens the samples; comma- or whitespace-delimited.
* ``csv``: comma-separated with an optional header row; a ``label`` column
  (any position, case-insensitive) carries class labels.

Reals are written with 17 significant digits, which round-trips double
precision exactly.  Run manifests record everything a rerun needs; they
deliberately carry no wall-clock fields so identical runs produce
byte-identical output trees.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .congeal import AlignmentReport
from .curves import (
    CurveSet,
    DEFAULT_WEIGHT_BOUND,
    TransformParams,
    time_grid,
    warp_function,
)

FORMATS = ("ucr", "csv")

# Column order of every parameter table; phi are sine weights and omega
# cosine weights, at basis frequencies 1/2 and 1.
PARAM_COLUMNS = (
    "curve_index",
    "alpha",
    "beta",
    "phi_half",
    "omega_half",
    "phi_one",
    "omega_one",
)


class DataFormatError(ValueError):
    """A file failed to parse; the message cites the offending line."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_real(token: str, path, line_no: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise DataFormatError(
            f"{path}: line {line_no}: cannot parse {token!r} as a number"
        ) from None


def _split_line(line: str) -> list:
    return line.replace(",", " ").split()


def _read_lines(path) -> list:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataFormatError(f"{path}: cannot read file: {exc}") from exc
    lines = [
        (i, line) for i, line in enumerate(text.splitlines(), start=1) if line.strip()
    ]
    if not lines:
        raise DataFormatError(f"{path}: file is empty")
    return lines


def _read_ucr(path) -> tuple:
    rows, labels = [], []
    width = None
    for line_no, line in _read_lines(path):
        tokens = _split_line(line)
        if width is None:
            width = len(tokens)
        elif len(tokens) != width:
            raise DataFormatError(
                f"{path}: line {line_no} has {len(tokens)} fields, expected "
                f"{width} (established by line 1)"
            )
        label = _parse_real(tokens[0], path, line_no)
        if not label.is_integer():
            raise DataFormatError(
                f"{path}: line {line_no}: label {tokens[0]!r} is not an integer"
            )
        labels.append(int(label))
        rows.append([_parse_real(t, path, line_no) for t in tokens[1:]])
    return rows, labels


def _read_csv(path) -> tuple:
    lines = _read_lines(path)
    first_tokens = [t.strip() for t in lines[0][1].split(",")]

    def is_number(tok: str) -> bool:
        try:
            float(tok)
            return True
        except ValueError:
            return False

    label_col = None
    if not all(is_number(t) for t in first_tokens):
        header = [t.lower() for t in first_tokens]
        for i, name in enumerate(header):
            if name == "label":
                label_col = i
        width = len(first_tokens)
        body = lines[1:]
        if not body:
            raise DataFormatError(f"{path}: header only, no data rows")
    else:
        width = len(first_tokens)
        body = lines

    rows, labels = [], []
    for line_no, line in body:
        tokens = [t.strip() for t in line.split(",")]
        if len(tokens) != width:
            raise DataFormatError(
                f"{path}: line {line_no} has {len(tokens)} fields, expected "
                f"{width} (established by line 1)"
            )
        values = [_parse_real(t, path, line_no) for t in tokens]
        if label_col is not None:
            label = values.pop(label_col)
            if not label.is_integer():
                raise DataFormatError(
                    f"{path}: line {line_no}: label {tokens[label_col]!r} "
                    "is not an integer"
                )
            labels.append(int(label))
        rows.append(values)
    return rows, (labels if label_col is not None else None)


def read_dataset(path, format: str = "csv") -> CurveSet:
    """Parse a dataset file into a curve set with identity transforms."""
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    rows, labels = _read_ucr(path) if format == "ucr" else _read_csv(path)
    try:
        return CurveSet.from_samples(np.asarray(rows, dtype=float), labels=labels)
    except ValueError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc


def write_dataset(curve_set: CurveSet, path, format: str = "csv") -> None:
    """Serialize the set; inverse of :func:`read_dataset`."""
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    matrix = curve_set.sample_matrix()
    lines = []
    if format == "ucr":
        if curve_set.labels is None:
            raise ValueError("ucr format requires labels; use csv for unlabeled sets")
        for label, row in zip(curve_set.labels, matrix):
            lines.append(",".join([str(label)] + [_fmt(x) for x in row]))
    else:
        n_cols = matrix.shape[1]
        header = [f"s{j}" for j in range(n_cols)]
        if curve_set.labels is not None:
            header = ["label"] + header
        lines.append(",".join(header))
        for i, row in enumerate(matrix):
            fields = [_fmt(x) for x in row]
            if curve_set.labels is not None:
                fields = [str(curve_set.labels[i])] + fields
            lines.append(",".join(fields))
    Path(path).write_text("\n".join(lines) + "\n")


def write_curve(curve, path) -> None:
    """Write a single curve as a one-row csv dataset."""
    samples = curve.samples
    header = ",".join(f"s{j}" for j in range(samples.size))
    row = ",".join(_fmt(x) for x in samples)
    Path(path).write_text(header + "\n" + row + "\n")


def write_params(params, path) -> None:
    """Write per-curve transform parameters as a delimited table."""
    lines = [",".join(PARAM_COLUMNS)]
    for i, p in enumerate(params):
        lines.append(
            ",".join(
                [str(i)]
                + [
                    _fmt(v)
                    for v in (
                        p.alpha,
                        p.beta,
                        p.sin_weights[0],
                        p.cos_weights[0],
                        p.sin_weights[1],
                        p.cos_weights[1],
                    )
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_params(path) -> tuple:
    """Read a parameter table written by :func:`write_params`."""
    lines = _read_lines(path)
    header = [t.strip() for t in lines[0][1].split(",")]
    if tuple(header) != PARAM_COLUMNS:
        raise DataFormatError(
            f"{path}: unexpected parameter columns {header}; "
            f"expected {list(PARAM_COLUMNS)}"
        )
    params = []
    for line_no, line in lines[1:]:
        tokens = [t.strip() for t in line.split(",")]
        if len(tokens) != len(PARAM_COLUMNS):
            raise DataFormatError(
                f"{path}: line {line_no} has {len(tokens)} fields, expected "
                f"{len(PARAM_COLUMNS)}"
            )
        values = [_parse_real(t, path, line_no) for t in tokens]
        weights = np.array(values[3:])
        # Recentered parameter sets may carry weights past the default
        # bound; widen so any written table reads back.
        bound = max(DEFAULT_WEIGHT_BOUND, float(np.abs(weights).max()))
        params.append(
            TransformParams(
                alpha=values[1],
                beta=values[2],
                sin_weights=np.array([values[3], values[5]]),
                cos_weights=np.array([values[4], values[6]]),
                weight_bound=bound,
            )
        )
    return tuple(params)


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a run bit for bit.

    No wall-clock fields: rerunning with identical inputs must produce an
    identical manifest, and by extension an identical output tree.
    """

    tool_version: str
    command: str
    arguments: dict
    rng_seed: int
    input_digests: dict

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls(**json.loads(text))


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(manifest: RunManifest, out_dir) -> Path:
    path = Path(out_dir) / "manifest.json"
    path.write_text(manifest.to_json())
    return path


def read_manifest(path) -> RunManifest:
    try:
        return RunManifest.from_json(Path(path).read_text())
    except (OSError, json.JSONDecodeError, TypeError) as exc:
        raise DataFormatError(f"{path}: cannot read manifest: {exc}") from exc


def write_report(report: AlignmentReport, out_dir, manifest: RunManifest = None) -> dict:
    """Write an alignment report as a set of delimited files.

    Produces ``aligned.csv`` (the transformed curves), ``params.csv`` (one
    row per curve, columns :data:`PARAM_COLUMNS`), ``trace.csv`` (iteration,
    total objective), ``warps.csv`` (long-format warp tables: curve_index,
    t, h) and, when a manifest is given, ``manifest.json``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    final = report.final_set
    paths = {}

    paths["aligned"] = out / "aligned.csv"
    write_dataset(final, paths["aligned"], format="csv")

    paths["params"] = out / "params.csv"
    write_params(final.params, paths["params"])

    paths["trace"] = out / "trace.csv"
    lines = ["iteration,total"]
    for i, total in enumerate(report.objective_trace, start=1):
        lines.append(f"{i},{_fmt(total)}")
    paths["trace"].write_text("\n".join(lines) + "\n")

    paths["warps"] = out / "warps.csv"
    grid = time_grid(final.curve_length)
    lines = ["curve_index,t,h"]
    for i, p in enumerate(final.params):
        h = warp_function(p, final.curve_length).h_values
        for t, ht in zip(grid, h):
            lines.append(f"{i},{_fmt(t)},{_fmt(ht)}")
    paths["warps"].write_text("\n".join(lines) + "\n")

    if manifest is not None:
        paths["manifest"] = write_manifest(manifest, out)
    return paths
