"""Acceptance checks: one test per shipping criterion.

Each test prints a ``CRITERION n: PASS/FAIL`` line (visible with ``-s``,
or in the captured output of a failing test) and then asserts the stated
bar, so the ``-v`` listing reads as a per-criterion scoreboard.

Known honest failure: criterion 4's 5% bar for time-warp cells.  Joint
alignment can only pin curves to each other, not to the generating seed:
the aligned consensus converges to the seed composed with the mean of the
generator warps, a residual that the objective cannot see and that the
scoring function's shared affine refit cannot remove (it is a time
deformation, not an amplitude map).  With 50 copies that residual sits
around 1/sqrt(50) of the raw scatter, an order of magnitude above 5%.
The amplitude families carry no such gauge (the refit absorbs it), so
their ten cells pass both bars and the difficulty-5 clause still clears.
The test asserts the stated bar anyway and fails honestly rather than
bending it.
"""

import math
import shutil
import time

import numpy as np
import pytest

from curvealign import (
    BUILTIN_SEED_NAMES,
    CongealConfig,
    CurveSet,
    EvalConfig,
    EvalMode,
    ObjectiveKind,
    SynthSpec,
    Transform,
    TransformParams,
    apply_transform,
    builtin_seed,
    congeal,
    eval_unsupervised,
    generate,
    recovery_error,
    time_grid,
    vasicek_entropy,
    warp_function,
    write_dataset,
)
from curvealign.cli import EXIT_OK, main as cli_main
from curvealign.curves import Curve
from _oracles import oracle_warp

FAMILIES = (Transform.AMPLITUDE_SCALE, Transform.AMPLITUDE_OFFSET, Transform.TIME_WARP)
WARP_ONLY = frozenset({Transform.TIME_WARP})


def outcome(n: int, ok: bool, detail: str) -> bool:
    print(f"CRITERION {n}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


# --- criterion 1: warp validity at scale -----------------------------------


def test_criterion_1_warp_validity():
    rng = np.random.default_rng(0)
    start = time.perf_counter()
    worst_endpoint = 0.0
    monotone = True
    for _ in range(1000):
        w = rng.uniform(-5.0, 5.0, size=4)
        params = TransformParams(sin_weights=w[:2], cos_weights=w[2:])
        h = warp_function(params, 150).h_values
        worst_endpoint = max(worst_endpoint, abs(h[0]), abs(h[-1] - 1.0))
        monotone = monotone and bool(np.all(np.diff(h) > 0))
    identity_gap = float(
        np.max(np.abs(warp_function(TransformParams(), 150).h_values - time_grid(150)))
    )
    elapsed = time.perf_counter() - start

    ok = (
        worst_endpoint <= 1e-12
        and monotone
        and identity_gap <= 1e-12
        and elapsed < 5.0
    )
    outcome(
        1,
        ok,
        f"1000 warps: endpoint gap {worst_endpoint:.1e}, monotone {monotone}, "
        f"identity gap {identity_gap:.1e}, {elapsed:.2f}s",
    )
    assert worst_endpoint <= 1e-12
    assert monotone
    assert identity_gap <= 1e-12
    assert elapsed < 5.0


# --- criterion 2: quadrature order of the warp construction ----------------


def test_criterion_2_grid_refinement():
    rng = np.random.default_rng(42)
    ratios = []
    for _ in range(20):
        w = rng.uniform(-2.0, 2.0, size=4)
        params = TransformParams(sin_weights=w[:2].copy(), cos_weights=w[2:].copy())
        errors = {}
        for m in (101, 201):
            reference = oracle_warp(w[:2], w[2:], m)
            errors[m] = float(
                np.max(np.abs(warp_function(params, m).h_values - reference))
            )
        ratios.append(errors[101] / errors[201])
    mean_ratio = float(np.mean(ratios))

    ok = 3.5 <= mean_ratio <= 4.5
    outcome(2, ok, f"halving the step shrinks the error by {mean_ratio:.3f}x")
    assert 3.5 <= mean_ratio <= 4.5


# --- criterion 3: entropy estimator correctness -----------------------------


def test_criterion_3_entropy_estimator():
    hand = vasicek_entropy([1.0, 2.0, 3.0, 4.0], m=1)
    hand_gap = abs(hand - 1.5 * math.log(2.0))

    estimates = [
        vasicek_entropy(np.random.default_rng(seed).normal(size=1000))
        for seed in range(20)
    ]
    gaussian_gap = abs(float(np.mean(estimates)) - 1.41894)

    ok = hand_gap <= 1e-12 and gaussian_gap < 0.15
    outcome(
        3,
        ok,
        f"hand case off by {hand_gap:.1e}, Gaussian mean off by {gaussian_gap:.4f}",
    )
    assert hand_gap <= 1e-12
    assert gaussian_gap < 0.15


# --- criterion 4: synthetic recovery sweep ----------------------------------


@pytest.fixture(scope="module")
def recovery_sweep():
    """Post/pre recovery-error ratios for every (seed, family, difficulty).

    Fifty copies per cell, variance objective, congealing restricted to
    the generating family, 200 passes, all seeds fixed.
    """
    cells = {}
    traces = []
    start = time.perf_counter()
    for si, name in enumerate(BUILTIN_SEED_NAMES):
        seed_curve = builtin_seed(name)
        for fi, family in enumerate(FAMILIES):
            ratios = {}
            for difficulty in (1, 3, 5):
                dataset = generate(
                    SynthSpec(
                        seed_curve=seed_curve,
                        family=family,
                        difficulty=difficulty,
                        copies=50,
                        rng_seed=1000 * si + 100 * fi + difficulty,
                    )
                )
                pre = recovery_error(dataset.curves, seed_curve)
                report = congeal(
                    dataset.curves,
                    CongealConfig(
                        objective_kind=ObjectiveKind.VARIANCE_SUM,
                        enabled_transforms=frozenset({family}),
                        max_iterations=200,
                        rng_seed=0,
                    ),
                )
                post = recovery_error(report.final_set, seed_curve)
                ratios[difficulty] = post / pre
                traces.append(report.objective_trace)
            cells[(name, family.value)] = ratios
    elapsed = time.perf_counter() - start
    return cells, traces, elapsed


def print_sweep_table(cells):
    print(f"{'seed':12s} {'family':7s} {'d=1':>9s} {'d=3':>9s} {'d=5':>9s}")
    for (name, family), ratios in cells.items():
        print(
            f"{name:12s} {family:7s} "
            + " ".join(f"{ratios[d]:8.3%}" for d in (1, 3, 5))
        )


def test_criterion_4_low_difficulty_recovery(recovery_sweep):
    cells, _, elapsed = recovery_sweep
    print_sweep_table(cells)
    passing = sum(
        1
        for ratios in cells.values()
        if ratios[1] <= 0.05 and ratios[3] <= 0.05
    )
    ok = passing >= 13 and elapsed < 600.0
    outcome(
        4,
        ok,
        f"difficulty <= 3: {passing}/15 cells within 5% "
        f"(need 13); sweep took {elapsed:.0f}s",
    )
    assert elapsed < 600.0
    # Expected honest failure: the ten amplitude cells pass, the five
    # time-warp cells sit on the mean-warp gauge floor (see module
    # docstring).  The bar stays as stated.
    assert passing >= 13


def test_criterion_4_high_difficulty_recovery(recovery_sweep):
    cells, _, elapsed = recovery_sweep
    passing = sum(1 for ratios in cells.values() if ratios[5] <= 0.20)
    ok = passing >= 10 and elapsed < 600.0
    outcome(4, ok, f"difficulty 5: {passing}/15 cells within 20% (need 10)")
    assert passing >= 10
    assert elapsed < 600.0


# --- criterion 6: classification gain and failure mode ----------------------


def warp_benchmark(seed: int) -> CurveSet:
    """Two classes of 30 warped copies each, from mirrored two-bump seeds."""
    rows, labels = [], []
    for cls, name in enumerate(("bumps2", "bumps2r")):
        dataset = generate(
            SynthSpec(
                seed_curve=builtin_seed(name),
                family=Transform.TIME_WARP,
                difficulty=3,
                copies=30,
                rng_seed=seed + 5000 * cls,
            )
        )
        rows.append(dataset.curves.sample_matrix())
        labels += [cls] * 30
    return CurveSet.from_samples(np.vstack(rows), labels=labels)


def onset_benchmark() -> CurveSet:
    """Two classes that differ only by the onset time of a sigmoid.

    Within-class amplitude jitter keeps the classes from collapsing to a
    point while the class gap itself is pure time shift, the situation
    where label-blind congealing merges the classes and hurts.
    """
    t = time_grid(150)
    sigmoid = Curve(1.0 / (1.0 + np.exp(-(t - 0.5) / 0.05)))
    rows, labels = [], []
    for cls, phi in enumerate((0.4, -0.4)):
        for c in range(30):
            rng = np.random.default_rng(7777 + 100 * cls + c)
            jitter = rng.uniform(-0.05, 0.05, size=4)
            alpha = rng.uniform(0.95, 1.05)
            params = TransformParams(
                alpha=alpha,
                sin_weights=np.array([phi + jitter[0], jitter[1]]),
                cos_weights=jitter[2:].copy(),
            )
            rows.append(apply_transform(sigmoid, params).samples)
            labels.append(cls)
    return CurveSet.from_samples(np.vstack(rows), labels=labels)


def unsupervised_config(seed: int) -> EvalConfig:
    return EvalConfig(
        k_neighbors=10,
        folds=5,
        mode=EvalMode.UNSUPERVISED,
        congeal_config=CongealConfig(
            objective_kind=ObjectiveKind.VARIANCE_SUM,
            enabled_transforms=WARP_ONLY,
            max_iterations=100,
            rng_seed=seed,
        ),
        rng_seed=seed,
    )


@pytest.fixture(scope="module")
def classification_runs():
    gains = []
    for seed in range(5):
        curve_set = warp_benchmark(1000 * seed)
        paired = eval_unsupervised(curve_set, unsupervised_config(seed))
        gains.append((paired.aligned.accuracy, paired.baseline.accuracy))

    failure = eval_unsupervised(onset_benchmark(), unsupervised_config(0))
    return gains, failure


def test_criterion_6_unsupervised_gain(classification_runs):
    gains, _ = classification_runs
    for aligned, baseline in gains:
        print(f"  seed run: aligned={aligned:.3f} baseline={baseline:.3f}")
    never_worse = all(aligned >= baseline for aligned, baseline in gains)
    mean_gain = float(np.mean([a - b for a, b in gains]))
    ok = never_worse and mean_gain > 0.0
    outcome(
        6,
        ok,
        f"aligned >= baseline on 5/5 runs: {never_worse}, mean gain {mean_gain:+.3f}",
    )
    assert never_worse
    assert mean_gain > 0.0


def test_criterion_6_time_shift_failure_mode(classification_runs):
    _, failure = classification_runs
    aligned = failure.aligned.accuracy
    baseline = failure.baseline.accuracy
    ok = baseline >= 0.9 and aligned <= baseline - 0.05
    outcome(
        6,
        ok,
        f"failure mode reported: aligned {aligned:.3f} <= baseline {baseline:.3f}",
    )
    # Classes separated only by onset time: alignment must erase the
    # separating feature and measurably hurt accuracy.
    assert baseline >= 0.9
    assert aligned <= baseline - 0.05


# --- criterion 5: monotone objective traces ---------------------------------


def test_criterion_5_monotone_traces(recovery_sweep, classification_runs):
    # Every AlignmentReport asserts non-increase at construction, so any
    # violation anywhere in the suite would already have raised.  Verify
    # the recovery sweep's traces explicitly as the bulk sample.
    _, traces, _ = recovery_sweep
    violations = sum(int(np.any(np.diff(trace) > 0)) for trace in traces)
    ok = violations == 0 and len(traces) == 45
    outcome(
        5, ok, f"{len(traces)} traces checked, {violations} violations"
    )
    assert len(traces) == 45
    assert violations == 0


# --- criterion 7: byte-identical reruns --------------------------------------


def test_criterion_7_deterministic_cli(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rng = np.random.default_rng(1)
    base = builtin_seed("bumps3", length=60).samples
    write_dataset(
        CurveSet.from_samples(base + rng.uniform(-0.4, 0.4, size=(8, 1))),
        "data.csv",
        format="csv",
    )
    commands = {
        "align": [
            "align",
            "--input",
            "data.csv",
            "--objective",
            "entropy",
            "--max-iters",
            "25",
            "--seed",
            "3",
            "--out",
            "run",
        ],
        "synth": [
            "synth",
            "--family",
            "warp",
            "--difficulty",
            "2",
            "--copies",
            "10",
            "--seed",
            "9",
            "--out",
            "run",
        ],
    }
    identical = {}
    for name, flags in commands.items():
        assert cli_main(flags) == EXIT_OK
        first = {p.name: p.read_bytes() for p in (tmp_path / "run").iterdir()}
        shutil.rmtree(tmp_path / "run")
        assert cli_main(flags) == EXIT_OK
        second = {p.name: p.read_bytes() for p in (tmp_path / "run").iterdir()}
        identical[name] = first == second
        shutil.rmtree(tmp_path / "run")

    ok = all(identical.values())
    outcome(
        7,
        ok,
        "rerun outputs byte-identical: "
        + ", ".join(f"{k}={v}" for k, v in identical.items()),
    )
    assert identical["align"]
    assert identical["synth"]


# --- criterion 8: entropy invariances ----------------------------------------


def test_criterion_8_entropy_invariances():
    rng = np.random.default_rng(12)
    x = rng.normal(size=500)
    base = vasicek_entropy(x)

    shift_gap = max(
        abs(vasicek_entropy(x + shift) - base) for shift in (-3.0, 0.25, 7.5)
    )
    scale_gap = max(
        abs(vasicek_entropy(s * x) - (base + math.log(s))) for s in (0.5, 2.0, 10.0)
    )

    ok = shift_gap <= 1e-12 and scale_gap <= 1e-9
    outcome(
        8,
        ok,
        f"shift deviation {shift_gap:.1e}, scale-law deviation {scale_gap:.1e}",
    )
    assert shift_gap <= 1e-12
    assert scale_gap <= 1e-9
