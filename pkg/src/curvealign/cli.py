"""Command-line interface.

Subcommands: ``align`` (congeal a dataset), ``synth`` (generate a
synthetic benchmark), ``classify`` (alignment-based evaluation with a
paired no-alignment baseline), ``recover`` (re-align a synthetic dataset
and score against its seed curve).

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
All randomness flows from ``--seed``; every output directory receives a
manifest that pins the run, and reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .congeal import CongealConfig, Transform, congeal
from .curves import Curve, ParameterRangeError
from .dataio import (
    DataFormatError,
    RunManifest,
    file_digest,
    read_dataset,
    read_manifest,
    write_curve,
    write_dataset,
    write_manifest,
    write_params,
    write_report,
)
from .evalkit import (
    EvalConfig,
    EvalMode,
    eval_no_alignment,
    eval_no_alignment_split,
    eval_supervised,
    eval_unsupervised,
)
from .objective import ObjectiveKind
from .synthgen import (
    BUILTIN_SEED_NAMES,
    SynthSpec,
    builtin_seed,
    generate,
    recovery_error,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

_FAMILY_BY_NAME = {t.value: t for t in Transform}
_OBJECTIVE_BY_NAME = {k.value: k for k in ObjectiveKind}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage problems via exit code 1."""

    def error(self, message):
        raise UsageError(message)


def _parse_transforms(text: str) -> frozenset:
    names = [t.strip() for t in text.split(",") if t.strip()]
    if not names:
        raise UsageError("--transforms needs at least one of: warp, scale, offset")
    unknown = [n for n in names if n not in _FAMILY_BY_NAME]
    if unknown:
        raise UsageError(
            f"--transforms: unknown transform {unknown[0]!r} "
            "(choose from warp, scale, offset)"
        )
    return frozenset(_FAMILY_BY_NAME[n] for n in names)


def _congeal_config(args) -> CongealConfig:
    return CongealConfig(
        objective_kind=_OBJECTIVE_BY_NAME[args.objective],
        enabled_transforms=_parse_transforms(args.transforms),
        max_iterations=args.max_iters,
        rng_seed=args.seed,
    )


def _manifest(args, command: str, input_paths) -> RunManifest:
    arguments = {
        k: v for k, v in sorted(vars(args).items()) if k != "func" and v is not None
    }
    return RunManifest(
        tool_version=__version__,
        command=command,
        arguments=arguments,
        rng_seed=args.seed,
        input_digests={str(p): file_digest(p) for p in input_paths},
    )


def _load_seed_curve(spec: str) -> tuple:
    """Resolve ``builtin:<name>`` or a one-curve dataset file."""
    if spec.startswith("builtin:"):
        name = spec[len("builtin:") :]
        return builtin_seed(name), None
    path = Path(spec)
    try:
        lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    except OSError as exc:
        raise DataFormatError(f"{path}: cannot read file: {exc}") from exc
    if not lines:
        raise DataFormatError(f"{path}: file is empty")

    def parse_row(line):
        try:
            return [float(t) for t in line.replace(",", " ").split()]
        except ValueError:
            return None

    rows = [r for r in (parse_row(ln) for ln in lines) if r is not None]
    if len(rows) != 1:
        raise DataFormatError(
            f"{path}: a seed curve file must hold exactly one curve, "
            f"found {len(rows)} data rows"
        )
    try:
        return Curve(np.array(rows[0], dtype=float)), path
    except ValueError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc


def _cmd_align(args) -> int:
    from . import plots

    curve_set = read_dataset(args.input, format=args.format)
    report = congeal(curve_set, _congeal_config(args))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_report(report, out, manifest=_manifest(args, "align", [args.input]))
    plots.alignment_figure(curve_set, report, out / "alignment.png")
    plots.trace_figure(report, out / "trace.png")
    plots.warp_figure(report, out / "warps.png")

    trace = report.objective_trace
    print(
        f"aligned {len(curve_set)} curves in {report.iterations_run} iterations "
        f"(converged: {report.converged}, accepted moves: {report.accepted_moves})"
    )
    print(f"objective: {trace[0]:.6g} -> {trace[-1]:.6g}")
    print(f"report written to {out}")
    return EXIT_OK


def _cmd_synth(args) -> int:
    from . import plots

    seed_curve, seed_path = _load_seed_curve(args.seed_curve)
    spec = SynthSpec(
        seed_curve=seed_curve,
        family=_FAMILY_BY_NAME[args.family],
        difficulty=args.difficulty,
        copies=args.copies,
        rng_seed=args.seed,
    )
    dataset = generate(spec)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_dataset(dataset.curves, out / "dataset.csv", format="csv")
    write_params(dataset.ground_truth_params, out / "ground_truth.csv")
    write_curve(seed_curve, out / "seed_curve.csv")
    write_manifest(
        _manifest(args, "synth", [seed_path] if seed_path else []), out
    )
    plots.dataset_figure(
        dataset.curves, out / "dataset.png", title=f"{args.family} difficulty {args.difficulty}"
    )

    print(
        f"generated {args.copies} copies of {args.seed_curve} "
        f"({args.family}, difficulty {args.difficulty}) in {out}"
    )
    return EXIT_OK


def _cmd_classify(args) -> int:
    from . import plots

    mode = EvalMode(args.mode)
    if mode is EvalMode.UNSUPERVISED:
        transforms = _parse_transforms(args.transforms)
        if transforms != frozenset({Transform.TIME_WARP}):
            raise UsageError(
                "--mode unsupervised allows --transforms warp only "
                "(label-blind protocol); drop the other transforms"
            )
    if args.test is not None and mode is EvalMode.UNSUPERVISED:
        raise UsageError(
            "--mode unsupervised cross-validates a single file; drop --test"
        )
    if mode is EvalMode.SUPERVISED and args.test is None:
        raise UsageError("--mode supervised needs --test with the test split")

    curve_set = read_dataset(args.input, format=args.format)
    inputs = [args.input]
    config = EvalConfig(
        k_neighbors=args.k,
        folds=args.folds,
        mode=mode,
        congeal_config=_congeal_config(args),
        rng_seed=args.seed,
    )

    if mode is EvalMode.SUPERVISED:
        test_set = read_dataset(args.test, format=args.format)
        inputs.append(args.test)
        result = eval_supervised(curve_set, test_set, config)
    elif mode is EvalMode.UNSUPERVISED:
        result = eval_unsupervised(curve_set, config)
    else:
        if args.test is not None:
            test_set = read_dataset(args.test, format=args.format)
            inputs.append(args.test)
            baseline = eval_no_alignment_split(curve_set, test_set, config)
        else:
            baseline = eval_no_alignment(curve_set, config)
        result = None

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def result_lines(name, res):
        lines = [f"{name},accuracy,{res.accuracy:.17g}"]
        for i, acc in enumerate(res.per_fold):
            lines.append(f"{name},fold_{i},{acc:.17g}")
        return lines

    if result is not None:
        lines = ["series,metric,value"]
        lines += result_lines("aligned", result.aligned)
        lines += result_lines("baseline", result.baseline)
        (out / "results.csv").write_text("\n".join(lines) + "\n")
        _write_confusion(result.aligned, out / "confusion_aligned.csv")
        _write_confusion(result.baseline, out / "confusion_baseline.csv")
        plots.classification_figure(result, out / "classification.png")
        print(f"mode: {mode.value}")
        print(f"accuracy with alignment:    {result.aligned.accuracy:.4f}")
        print(f"accuracy without alignment: {result.baseline.accuracy:.4f}")
    else:
        lines = ["series,metric,value"] + result_lines("baseline", baseline)
        (out / "results.csv").write_text("\n".join(lines) + "\n")
        _write_confusion(baseline, out / "confusion_baseline.csv")
        print(f"mode: {mode.value}")
        print(f"accuracy without alignment: {baseline.accuracy:.4f}")

    write_manifest(_manifest(args, "classify", inputs), out)
    print(f"results written to {out}")
    return EXIT_OK


def _write_confusion(result, path) -> None:
    lines = ["true\\predicted," + ",".join(str(c) for c in result.classes)]
    for i, cls in enumerate(result.classes):
        lines.append(
            ",".join([str(cls)] + [str(v) for v in result.confusion[i]])
        )
    Path(path).write_text("\n".join(lines) + "\n")


def _cmd_recover(args) -> int:
    from . import plots

    dataset_dir = Path(args.dataset)
    manifest = read_manifest(dataset_dir / "manifest.json")
    if manifest.command != "synth":
        raise DataFormatError(
            f"{dataset_dir}: manifest describes a {manifest.command!r} run; "
            "recover needs a synth output directory"
        )
    family = _FAMILY_BY_NAME[manifest.arguments["family"]]

    curves = read_dataset(dataset_dir / "dataset.csv", format="csv")
    seed_curve, _ = _load_seed_curve(str(dataset_dir / "seed_curve.csv"))

    config = CongealConfig(
        objective_kind=_OBJECTIVE_BY_NAME[args.objective],
        enabled_transforms=frozenset({family}),
        max_iterations=args.max_iters,
        rng_seed=args.seed,
    )
    before = recovery_error(curves, seed_curve)
    report = congeal(curves, config)
    after = recovery_error(report.final_set, seed_curve)

    print(f"transform family: {family.value}")
    print(f"recovery_error before alignment: {before:.17g}")
    print(f"recovery_error after alignment:  {after:.17g}")

    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_report(
            report, out, manifest=_manifest(args, "recover", [dataset_dir / "dataset.csv"])
        )
        plots.recovery_figure(
            curves, report.final_set, seed_curve.samples, out / "recovery.png"
        )
        print(f"report written to {out}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(
        prog="curvealign",
        description="Joint alignment (congealing) of 1-D curves.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def add_congeal_flags(p, default_transforms="warp,scale,offset"):
        p.add_argument(
            "--transforms",
            default=default_transforms,
            help=f"comma-separated transform families (default: {default_transforms})",
        )
        p.add_argument(
            "--objective",
            choices=sorted(_OBJECTIVE_BY_NAME),
            default="entropy",
            help="alignment objective (default: entropy)",
        )
        p.add_argument(
            "--max-iters", type=int, default=200, help="iteration cap (default: 200)"
        )

    align = sub.add_parser("align", help="jointly align a dataset")
    align.add_argument("--input", required=True, help="dataset file")
    align.add_argument("--format", choices=("ucr", "csv"), default="csv")
    add_congeal_flags(align)
    align.add_argument("--seed", type=int, default=0, help="rng seed (default: 0)")
    align.add_argument("--out", required=True, help="output directory")
    align.set_defaults(func=_cmd_align)

    synth = sub.add_parser("synth", help="generate a synthetic benchmark")
    synth.add_argument(
        "--family", choices=sorted(_FAMILY_BY_NAME), required=True,
        help="transform family to draw from",
    )
    synth.add_argument(
        "--difficulty", type=int, choices=range(1, 6), required=True,
        help="parameter range level, 1 (mild) to 5 (severe)",
    )
    synth.add_argument("--copies", type=int, default=50, help="default: 50")
    synth.add_argument("--seed", type=int, default=0, help="rng seed (default: 0)")
    synth.add_argument(
        "--seed-curve",
        default="builtin:bumps2",
        help="builtin:<name> or a dataset file holding one curve "
        f"(builtins: {', '.join(BUILTIN_SEED_NAMES)})",
    )
    synth.add_argument("--out", required=True, help="output directory")
    synth.set_defaults(func=_cmd_synth)

    classify = sub.add_parser("classify", help="alignment-based classification")
    classify.add_argument("--input", required=True, help="labeled dataset file")
    classify.add_argument("--format", choices=("ucr", "csv"), default="csv")
    classify.add_argument(
        "--mode", choices=[m.value for m in EvalMode], required=True,
    )
    classify.add_argument("--test", help="test split file (supervised or none mode)")
    classify.add_argument("--folds", type=int, default=10, help="default: 10")
    classify.add_argument("--k", type=int, default=10, help="neighbors (default: 10)")
    add_congeal_flags(classify, default_transforms="warp")
    classify.add_argument("--seed", type=int, default=0, help="rng seed (default: 0)")
    classify.add_argument("--out", required=True, help="output directory")
    classify.set_defaults(func=_cmd_classify)

    recover = sub.add_parser(
        "recover", help="re-align a synthetic dataset and score against its seed"
    )
    recover.add_argument(
        "--dataset", required=True, help="output directory of a synth run"
    )
    recover.add_argument(
        "--objective", choices=sorted(_OBJECTIVE_BY_NAME), default="variance",
        help="alignment objective (default: variance)",
    )
    recover.add_argument("--max-iters", type=int, default=200, help="default: 200")
    recover.add_argument("--seed", type=int, default=0, help="rng seed (default: 0)")
    recover.add_argument("--out", help="optional report directory")
    recover.set_defaults(func=_cmd_recover)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ParameterRangeError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
