"""Command-line surface.

Subcommands: table (asymptotic constants), pvalue (engine vs rank-based),
predict (CSV in, hedged predictions out), validate (exact audits or Monte
Carlo coverage), dominate (exhaustive dominance check).

Exit codes: 0 success, 1 audit or dominance failure, 2 usage/parse error.
Every command takes --json; JSON output is a single object with a
schema_version field, floats rendered at 12 significant digits, keys
sorted — identical invocations produce byte-identical output.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from dataclasses import dataclass
from functools import partial
from typing import Optional, Tuple

import click

from .core import Example, Interval, split_training
from .pipelines import (
    fit_classification_pipeline,
    fit_regression_pipeline,
    prediction_set,
)
from .pvalues import (
    asymptotic_constant,
    binary_irp_pvalue,
    binary_irp_pvariable,
    dominating_pvariable,
    icp_pvalue,
    icp_pvariable,
)
from .summaries import ClassifierSpec, RegressorSpec
from .validity import (
    EXACT_M_LIMIT,
    BoundedNoiseLinearGenerator,
    PipelineSpec,
    audit_pvariable,
    check_dominance,
    monte_carlo_coverage,
    reproduce_table_k,
)

SCHEMA_VERSION = "1"

__all__ = ["main", "read_csv_dataset", "CsvDataset"]


def _fmt(x: float) -> str:
    """Render a float at 12 significant digits (shared by text and JSON)."""
    return f"{x:.12g}"


def _round12(x: float) -> float:
    return float(_fmt(x))


def _jsonify(value):
    """Shape a payload for json.dumps: rounded floats, no non-finite values."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return None if not math.isfinite(value) else _round12(value)
    if isinstance(value, dict):
        return {key: _jsonify(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(item) for item in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _emit_json(payload: dict) -> None:
    click.echo(json.dumps(_jsonify(payload), sort_keys=True, indent=2))


def _interval_payload(interval: Interval) -> dict:
    return {
        "type": "interval",
        "lower": None if math.isinf(interval.lower) else interval.lower,
        "upper": None if math.isinf(interval.upper) else interval.upper,
    }


def _set_payload(s) -> dict:
    if isinstance(s, Interval):
        return _interval_payload(s)
    return {"type": "labels", "members": sorted(int(v) for v in s)}


def _set_text(s) -> str:
    if isinstance(s, Interval):
        return f"[{_fmt(s.lower)}, {_fmt(s.upper)}]"
    return "{" + ", ".join(f"{v:+d}" for v in sorted(s)) + "}"


@dataclass(frozen=True)
class CsvDataset:
    """Parsed CSV: named feature columns, one label column, examples."""

    feature_names: Tuple[str, ...]
    label_name: str
    examples: Tuple[Example, ...]


def read_csv_dataset(path: str, task: str = "regression") -> CsvDataset:
    """Read a rectangular CSV of finite decimals: d features then a label.

    Parse failures name the offending row and column.  Classification
    labels must be exactly -1 or 1.
    """
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file, expected a header row")
        if len(header) < 2:
            raise ValueError(
                f"{path}: header must name at least one feature column and a label column"
            )
        width = len(header)
        examples = []
        for row_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise ValueError(
                    f"{path}: row {row_number}: expected {width} fields, got {len(row)}"
                )
            values = []
            for column, cell in zip(header, row):
                try:
                    value = float(cell)
                except ValueError:
                    raise ValueError(
                        f"{path}: row {row_number}, column {column!r}: "
                        f"could not parse {cell.strip()!r} as a number"
                    ) from None
                if not math.isfinite(value):
                    raise ValueError(
                        f"{path}: row {row_number}, column {column!r}: "
                        f"value must be finite, got {cell.strip()!r}"
                    )
                values.append(value)
            label = values[-1]
            if task == "classification" and label not in (-1.0, 1.0):
                raise ValueError(
                    f"{path}: row {row_number}, column {header[-1]!r}: "
                    f"classification labels must be -1 or 1, got {row[-1].strip()!r}"
                )
            examples.append(Example(features=tuple(values[:-1]), label=label))
    if not examples:
        raise ValueError(f"{path}: no data rows after the header")
    return CsvDataset(
        feature_names=tuple(header[:-1]),
        label_name=header[-1],
        examples=tuple(examples),
    )


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="JSON file of per-command option defaults; explicit flags win.",
)
@click.pass_context
def main(ctx: click.Context, config: Optional[str]) -> None:
    """Randomness predictors over binary nonconformity summaries."""
    if config is not None:
        with open(config) as handle:
            try:
                defaults = json.load(handle)
            except json.JSONDecodeError as exc:
                raise click.UsageError(f"--config {config}: invalid JSON ({exc})")
        if not isinstance(defaults, dict):
            raise click.UsageError(f"--config {config}: expected a JSON object")
        ctx.default_map = defaults


@main.command()
@click.option("--k-max", type=click.IntRange(0, 64), default=7, show_default=True)
@click.option(
    "--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True
)
@click.option("--json", "as_json", is_flag=True, help="Shorthand for --format json.")
def table(k_max: int, fmt: str, as_json: bool) -> None:
    """Print the asymptotic incertitude-numerator table."""
    rows = reproduce_table_k(k_max)
    if as_json or fmt == "json":
        _emit_json(
            {
                "schema_version": SCHEMA_VERSION,
                "command": "table",
                "k_max": k_max,
                "rows": [
                    {
                        "k": row.k,
                        "a_k": row.a_k,
                        "a_k_rounded": row.a_k_rounded,
                        "icp_numerator": row.icp_numerator,
                        "ratio": row.ratio,
                        "ratio_rounded": row.ratio_rounded,
                    }
                    for row in rows
                ],
            }
        )
        return
    width = 8
    click.echo("k     " + "".join(f"{row.k:>{width}d}" for row in rows))
    click.echo("irp   " + "".join(f"{row.a_k_rounded:>{width}.3f}" for row in rows))
    click.echo("icp   " + "".join(f"{row.icp_numerator:>{width}d}" for row in rows))
    click.echo("ratio " + "".join(f"{row.ratio_rounded:>{width}.3f}" for row in rows))


@main.command()
@click.option("--m", type=click.IntRange(min=1), required=True)
@click.option("--k", type=click.IntRange(min=0), required=True)
@click.option(
    "--finite/--asymptotic",
    "finite",
    default=True,
    help="Exact finite-m p-value (default) or the a_k/m approximation.",
)
@click.option("--json", "as_json", is_flag=True)
def pvalue(m: int, k: int, finite: bool, as_json: bool) -> None:
    """Engine p-value at (m, k) next to the rank-based one."""
    if k > m:
        raise click.UsageError(f"--k must not exceed --m (got k={k}, m={m})")
    icp = icp_pvalue([1] * k + [0] * (m - k), 1)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "pvalue",
        "m": m,
        "k": k,
        "icp_pvalue": float(icp),
        "icp_exact": f"{icp.numerator}/{icp.denominator}",
    }
    if finite:
        engine = binary_irp_pvalue(m, k)
        payload.update(
            mode="finite",
            engine_pvalue=engine,
            ratio=engine / float(icp),
            degenerate=(k == m),
        )
    else:
        constant = asymptotic_constant(k)
        approx = constant.a_k / m
        payload.update(
            mode="asymptotic",
            a_k=constant.a_k,
            c_star=constant.c_star,
            engine_pvalue=approx,
            ratio=approx / float(icp),
            degenerate=False,
        )
    if as_json:
        _emit_json(payload)
        return
    tag = "finite" if finite else "asymptotic"
    click.echo(f"m = {m}  k = {k}  ({tag})")
    click.echo(f"engine p-value : {_fmt(payload['engine_pvalue'])}")
    click.echo(f"rank p-value   : {_fmt(float(icp))}  ({icp.numerator}/{icp.denominator})")
    click.echo(f"ratio          : {_fmt(payload['ratio'])}")
    if payload["degenerate"]:
        click.echo("degenerate: k = m, every configuration conforms")


@main.command()
@click.option("--train", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option(
    "--split-at",
    "split_at",
    type=click.IntRange(min=1),
    required=True,
    help="Leading rows forming the proper training sequence; the rest calibrate.",
)
@click.option("--test", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option(
    "--task",
    type=click.Choice(["regression", "classification"]),
    default="regression",
    show_default=True,
)
@click.option("--epsilon", type=float, default=0.05, show_default=True)
@click.option("--method", type=click.Choice(["irp", "icp"]), default="irp", show_default=True)
@click.option("--seed", type=int, default=None, help="Classifier initialization seed.")
@click.option("--json", "as_json", is_flag=True)
def predict(
    train: str,
    split_at: int,
    test: str,
    task: str,
    epsilon: float,
    method: str,
    seed: Optional[int],
    as_json: bool,
) -> None:
    """Hedged predictions for every test row.

    Both files share the header: feature columns then a label column.
    Test labels are parsed but not used for prediction.
    """
    if not 0.0 < epsilon < 1.0:
        raise click.UsageError(f"--epsilon must lie strictly between 0 and 1, got {epsilon}")
    try:
        train_ds = read_csv_dataset(train, task)
        test_ds = read_csv_dataset(test, "regression")
    except ValueError as exc:
        raise click.UsageError(str(exc))
    if test_ds.feature_names != train_ds.feature_names:
        raise click.UsageError(
            f"{test}: feature columns {list(test_ds.feature_names)} do not match "
            f"the training header {list(train_ds.feature_names)}"
        )
    try:
        split = split_training(train_ds.examples, split_at)
        if task == "regression":
            pipeline = fit_regression_pipeline(split, RegressorSpec())
        else:
            pipeline = fit_classification_pipeline(split, ClassifierSpec(seed=seed))
    except ValueError as exc:
        raise click.UsageError(str(exc))

    records = []
    for index, example in enumerate(test_ds.examples, start=1):
        prediction = pipeline.predict(example.features, method)
        gamma = prediction_set(prediction, epsilon)
        records.append((index, prediction, gamma))

    if as_json:
        _emit_json(
            {
                "schema_version": SCHEMA_VERSION,
                "command": "predict",
                "task": task,
                "method": method,
                "epsilon": epsilon,
                "m": pipeline.m,
                "k": pipeline.k,
                "fallback": pipeline.fallback_reason,
                "predictions": [
                    {
                        "row": index,
                        "prediction_set": _set_payload(prediction.prediction_set),
                        "incertitude": prediction.incertitude,
                        "degenerate": prediction.degenerate,
                        "vacuous": prediction.vacuous,
                        "set_at_epsilon": _set_payload(gamma),
                    }
                    for index, prediction, gamma in records
                ],
            }
        )
        return
    click.echo(f"task={task} method={method} m={pipeline.m} k={pipeline.k} epsilon={epsilon}")
    if pipeline.fallback_reason:
        click.echo(f"note: {pipeline.fallback_reason}")
    for index, prediction, gamma in records:
        flags = []
        if prediction.degenerate:
            flags.append("degenerate")
        if prediction.vacuous:
            flags.append("vacuous")
        suffix = f"  [{', '.join(flags)}]" if flags else ""
        click.echo(
            f"row {index}: set={_set_text(prediction.prediction_set)} "
            f"incertitude={_fmt(prediction.incertitude)} "
            f"level-{epsilon} set={_set_text(gamma)}{suffix}"
        )


@main.command()
@click.option(
    "--mode", type=click.Choice(["exact", "mc"]), default="exact", show_default=True
)
@click.option("--m", type=click.IntRange(min=1), default=None, help="Calibration size.")
@click.option("--trials", type=click.IntRange(min=1), default=10000, show_default=True)
@click.option("--epsilon", type=float, default=0.05, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def validate(
    mode: str, m: Optional[int], trials: int, epsilon: float, seed: int, as_json: bool
) -> None:
    """Audit the validity contract P(p-variable <= eps) <= eps."""
    if mode == "exact":
        m = 10 if m is None else m
        if m > EXACT_M_LIMIT:
            raise click.UsageError(f"--m is capped at {EXACT_M_LIMIT} in exact mode, got {m}")
        reports = {
            "binary-irp": audit_pvariable(binary_irp_pvariable, m),
            "icp": audit_pvariable(icp_pvariable, m),
            "dominating": audit_pvariable(dominating_pvariable, m),
        }
        all_passed = all(report.passed for report in reports.values())
        if as_json:
            _emit_json(
                {
                    "schema_version": SCHEMA_VERSION,
                    "command": "validate",
                    "mode": "exact",
                    "m": m,
                    "passed": all_passed,
                    "pvariables": [
                        {
                            "name": name,
                            "passed": report.passed,
                            "cells": [
                                {
                                    "epsilon": cell.epsilon,
                                    "probability": cell.probability,
                                    "passed": cell.passed,
                                    "detail": cell.detail,
                                }
                                for cell in report.cells
                            ],
                        }
                        for name, report in reports.items()
                    ],
                }
            )
        else:
            click.echo(f"mode=exact m={m}")
            for name, report in reports.items():
                for cell in report.cells:
                    verdict = "PASS" if cell.passed else "FAIL"
                    click.echo(
                        f"{name:11s} eps={_fmt(cell.epsilon):<15s} "
                        f"URP={_fmt(cell.probability):<15s} {verdict}"
                    )
            click.echo(f"overall: {'PASS' if all_passed else 'FAIL'}")
        if not all_passed:
            sys.exit(1)
        return

    if not 0.0 < epsilon < 1.0:
        raise click.UsageError(f"--epsilon must lie strictly between 0 and 1, got {epsilon}")
    generator = BoundedNoiseLinearGenerator(calibration_size=30 if m is None else m)
    report = monte_carlo_coverage(PipelineSpec(), generator, epsilon, trials, seed)
    if as_json:
        _emit_json(
            {
                "schema_version": SCHEMA_VERSION,
                "command": "validate",
                "mode": "mc",
                "m": report.m,
                "trials": report.trials,
                "seed": report.seed,
                "epsilon": epsilon,
                "passed": report.passed,
                "cells": [
                    {
                        "name": cell.name,
                        "epsilon": cell.epsilon,
                        "probability": cell.probability,
                        "standard_error": cell.standard_error,
                        "passed": cell.passed,
                        "detail": cell.detail,
                    }
                    for cell in report.cells
                ],
            }
        )
    else:
        click.echo(
            f"mode=mc m={report.m} trials={report.trials} seed={report.seed} epsilon={epsilon}"
        )
        for cell in report.cells:
            verdict = "PASS" if cell.passed else "FAIL"
            click.echo(
                f"{cell.name:18s} rate={_fmt(cell.probability):<15s} "
                f"se={_fmt(cell.standard_error):<15s} {verdict} ({cell.detail})"
            )
        click.echo(f"overall: {'PASS' if report.passed else 'FAIL'}")
    if not report.passed:
        sys.exit(1)


@main.command()
@click.option("--m", type=click.IntRange(min=1, max=EXACT_M_LIMIT), required=True)
@click.option("--threshold", type=float, default=0.5, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def dominate(m: int, threshold: float, as_json: bool) -> None:
    """Check that the threshold construction dominates the rank-based p-variable."""
    if not 0.0 < threshold < 1.0:
        raise click.UsageError(
            f"--threshold must lie strictly between 0 and 1 (the summary range), got {threshold}"
        )
    result = check_dominance(
        partial(dominating_pvariable, threshold_a=threshold), icp_pvariable, m
    )
    witness = result.witness
    if as_json:
        _emit_json(
            {
                "schema_version": SCHEMA_VERSION,
                "command": "dominate",
                "m": m,
                "threshold": threshold,
                "verdict": result.verdict,
                "witness": None
                if witness is None
                else {
                    "calibration_ones": witness.calibration_ones,
                    "test_summary": witness.test_summary,
                    "dominating_pvalue": witness.p1_value,
                    "icp_pvalue": witness.p2_value,
                },
            }
        )
    else:
        click.echo(f"m={m} threshold={_fmt(threshold)} verdict={result.verdict}")
        if witness is not None:
            click.echo(
                f"witness: calibration ones={witness.calibration_ones} "
                f"test summary={witness.test_summary}"
            )
            click.echo(f"  dominating p-value = {_fmt(witness.p1_value)}")
            click.echo(f"  rank-based p-value = {_fmt(witness.p2_value)}")
    if result.verdict != "strict":
        sys.exit(1)


if __name__ == "__main__":
    main()
