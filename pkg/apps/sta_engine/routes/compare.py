import sys

import click

from apps.sta_engine.services.harness.baseline import compare_with_baseline
from apps.sta_engine.services.physics.errors import EXIT_FAILURE
from apps.sta_engine.utils.envelope import emit, error, guarded, ok


@click.command("compare")
@click.option("--results", "results", required=True, type=click.Path(path_type=str), help="results.csv or its run directory.")
@click.option("--baseline", "baseline", required=True, type=click.Path(path_type=str), help="Baseline results.csv or directory.")
@click.option("--rtol", type=float, default=1e-6, show_default=True)
@click.option("--atol", type=float, default=1e-12, show_default=True)
@guarded
def compare(results, baseline, rtol, atol):
    """Check a results table against a stored baseline. Exit 1 on mismatch."""
    report = compare_with_baseline(results, baseline, rtol=rtol, atol=atol)
    if report.passed:
        emit(ok(report.to_dict()))
        return
    envelope = error(
        f"{len(report.mismatches)} mismatching values, {len(report.missing)} points missing from baseline",
        code="baseline_mismatch",
    )
    envelope["data"] = report.to_dict()
    emit(envelope)
    sys.exit(EXIT_FAILURE)
