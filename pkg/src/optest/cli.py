"""Command-line front end.

Subcommands: ``analyze`` (analytic error report for one procedure),
``simulate`` (Monte Carlo error report), ``compare`` (procedure table sorted
by power minus size), ``sweep`` (analytic errors along a sample-size grid),
``oracle`` (exhaustive-region optimality certification on small discrete
spaces), and ``repro-paper`` (the published worked example beside recomputed
values).  Output formats: a plain table at 5 significant digits, CSV with
full-precision floats, or JSON.

The default seed is 12345, overridable by the OPTEST_SEED environment
variable and by ``--seed``.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import os
from pathlib import Path

import click

from optest import error_eval, local, optimum, plugin
from optest.models import FAMILY_NAMES, SimpleTestProblem

_DEFAULT_SEED = 12345
_PROCEDURES = ("optimum", "local", "lou", "plugin", "fixed-alpha")
_REPORT_COLUMNS = ("alpha", "beta", "power", "power_minus_size", "method",
                   "se_alpha", "se_beta", "reps", "seed")


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("OPTEST_SEED")
    if env is None:
        return _DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise click.ClickException(
            f"OPTEST_SEED must be an integer, got {env!r}") from None


def _friendly_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except (ValueError, ArithmeticError) as exc:
            raise click.ClickException(str(exc)) from exc
    return wrapper


def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.5g}"
    return str(value)


def _render_table(rows: list[dict], columns: tuple[str, ...]) -> str:
    cells = [[_fmt_cell(row.get(col)) for col in columns] for row in rows]
    widths = [max(len(col), *(len(r[i]) for r in cells)) if cells else len(col)
              for i, col in enumerate(columns)]
    lines = ["  ".join(col.ljust(w) for col, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for r in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines)


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


def _render_csv(rows: list[dict], columns: tuple[str, ...]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(col)) for col in columns])
    return buf.getvalue()


def _emit(fmt: str, out: str | None, payload: dict, rows: list[dict],
          columns: tuple[str, ...], preamble: str = "") -> None:
    # Render fully before touching the filesystem: a failure never leaves a
    # partial output file behind.
    if fmt == "json":
        text = json.dumps(payload, indent=2)
    elif fmt == "csv":
        text = _render_csv(rows, columns)
    else:
        table = _render_table(rows, columns)
        text = f"{preamble}\n{table}" if preamble else table
    if out is None:
        click.echo(text)
    else:
        Path(out).write_text(text + "\n", encoding="utf-8")
        click.echo(f"wrote {out}")


def _problem_options(fn):
    decorators = [
        click.option("--family", type=click.Choice(FAMILY_NAMES),
                     default="normal-mean", show_default=True,
                     help="Model family (for normal-variance, theta0/theta1 "
                          "are the two variances)."),
        click.option("--theta0", type=float, required=True,
                     help="Null value of the tested parameter."),
        click.option("--theta1", type=float, required=True,
                     help="Alternative value of the tested parameter."),
        click.option("--n", type=int, required=True, help="Sample size."),
        click.option("--sigma", type=float, default=None,
                     help="Known standard deviation (normal-mean only)."),
        click.option("--theta", type=float, default=None,
                     help="Known mean (normal-variance only)."),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def _procedure_options(fn):
    decorators = [
        click.option("--procedure", type=click.Choice(_PROCEDURES),
                     default="optimum", show_default=True),
        click.option("--alpha", type=float, default=None,
                     help="Level for --procedure fixed-alpha."),
        click.option("--critical-z", type=float, default=None,
                     help="Override the fixed-alpha critical value "
                          "(e.g. the rounded 1.64)."),
        click.option("--side", type=click.Choice(local.SIDES),
                     default="greater", show_default=True,
                     help="Alternative side for --procedure local."),
        click.option("--variant", type=click.Choice(local.VARIANTS),
                     default="paper", show_default=True,
                     help="Less-side reading for --procedure local."),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def _output_options(fn):
    decorators = [
        click.option("--format", "fmt", type=click.Choice(("table", "csv", "json")),
                     default="table", show_default=True),
        click.option("--out", type=click.Path(dir_okay=False), default=None,
                     help="Write the rendered output to a file."),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def _build_problem(family, theta0, theta1, n, sigma, theta) -> SimpleTestProblem:
    return SimpleTestProblem(family=family, theta0=theta0, theta1=theta1,
                             n=n, sigma=sigma, theta=theta)


def _build_procedure(problem: SimpleTestProblem, procedure: str, alpha, critical_z,
                     side: str, variant: str):
    family = problem.family
    model0, _ = problem.model_pair()
    if procedure == "optimum":
        if family == "normal-mean":
            return optimum.normal_mean_test(problem.theta0, problem.theta1,
                                            problem.sigma)
        if family == "normal-variance":
            return optimum.normal_variance_test(problem.theta, problem.theta0,
                                                problem.theta1, problem.n)
        return optimum.expfam_test(model0, problem.theta0, problem.theta1,
                                   problem.n)
    if procedure == "local":
        if family == "normal-mean":
            return local.normal_mean_score_test(problem.theta0, problem.sigma,
                                                problem.n, side, variant)
        return local.locally_optimum_test(model0, problem.theta0, side, variant)
    if procedure == "lou":
        if family == "normal-mean":
            return local.normal_mean_lou_test(problem.theta0, problem.sigma,
                                              problem.n)
        return local.locally_optimum_unbiased_test(model0, problem.theta0)
    if procedure == "plugin":
        if family != "normal-mean":
            raise click.ClickException(
                "the plug-in procedure applies to the normal-mean family")
        return plugin.plugin_test(problem.theta0, problem.theta1)
    if procedure == "fixed-alpha":
        if family != "normal-mean":
            raise click.ClickException(
                "the fixed-alpha comparator applies to the normal-mean family")
        if alpha is None:
            raise click.ClickException("--alpha is required for fixed-alpha")
        return optimum.fixed_alpha_comparator(problem.theta0, problem.sigma,
                                              problem.n, alpha, critical_z)
    raise click.ClickException(f"unknown procedure {procedure!r}")


def _analytic_report(problem: SimpleTestProblem, procedure: str, alpha,
                     critical_z, side: str):
    """ErrorReport, or a {'alpha': value} dict when only the size has a
    closed form, or None when nothing does."""
    family = problem.family
    if procedure in ("optimum", "plugin"):
        if family == "normal-mean":
            return error_eval.analytic_errors_normal_mean(
                problem.theta0, problem.theta1, problem.sigma, problem.n)
        if family == "normal-variance":
            return error_eval.analytic_errors_normal_variance(
                problem.theta, problem.theta0, problem.theta1, problem.n)
        return None
    if procedure == "local":
        if (family == "normal-mean" and side == "greater"
                and problem.theta1 > problem.theta0):
            return error_eval.analytic_errors_locally_optimum(
                problem.theta0, problem.theta1, problem.sigma, problem.n)
        return None
    if procedure == "lou":
        if family == "normal-mean":
            return {"alpha": error_eval.analytic_alpha_lou(
                problem.theta0, problem.sigma, problem.n)}
        return None
    if procedure == "fixed-alpha":
        if family == "normal-mean" and alpha is not None:
            return error_eval.analytic_errors_fixed_alpha(
                problem.theta0, problem.theta1, problem.sigma, problem.n,
                alpha, critical_z)
        return None
    return None


def _report_row(report) -> dict:
    if report is None:
        return {col: None for col in _REPORT_COLUMNS}
    if isinstance(report, dict):  # size-only analytic report
        row = {col: None for col in _REPORT_COLUMNS}
        row["alpha"] = report["alpha"]
        row["method"] = "analytic"
        return row
    return report.to_dict()


def _problem_dict(problem: SimpleTestProblem) -> dict:
    return {
        "family": problem.family,
        "theta0": problem.theta0,
        "theta1": problem.theta1,
        "n": problem.n,
        "sigma": problem.sigma,
        "theta": problem.theta,
    }


@click.group()
def cli():
    """Optimum statistical test procedures: build them, evaluate their error
    probabilities analytically, and verify them by simulation."""


@cli.command()
@_problem_options
@_procedure_options
@_output_options
@_friendly_errors
def analyze(family, theta0, theta1, n, sigma, theta, procedure, alpha,
            critical_z, side, variant, fmt, out):
    """Analytic error report for one procedure."""
    problem = _build_problem(family, theta0, theta1, n, sigma, theta)
    test = _build_procedure(problem, procedure, alpha, critical_z, side, variant)
    report = _analytic_report(problem, procedure, alpha, critical_z, side)
    if report is None:
        raise click.ClickException(
            f"no analytic error formula for procedure {procedure!r} on family "
            f"{family!r}; run `optest simulate` instead")
    row = {"procedure": procedure, **_report_row(report)}
    payload = {
        "problem": _problem_dict(problem),
        "procedure": test.describe(),
        "report": _report_row(report),
    }
    descriptor = test.describe()
    preamble = (f"procedure: {procedure}  statistic: {descriptor['statistic_name']} "
                f"{'>=' if descriptor['direction'] == 'ge' else '<='} "
                f"{descriptor['threshold']:.6g}  rule: {descriptor['provenance']}")
    _emit(fmt, out, payload, [row], ("procedure",) + _REPORT_COLUMNS, preamble)


@cli.command()
@_problem_options
@_procedure_options
@click.option("--reps", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=None,
              help="Master seed (default: OPTEST_SEED or 12345).")
@_output_options
@_friendly_errors
def simulate(family, theta0, theta1, n, sigma, theta, procedure, alpha,
             critical_z, side, variant, reps, seed, fmt, out):
    """Monte Carlo error report for one procedure."""
    seed = _resolve_seed(seed)
    problem = _build_problem(family, theta0, theta1, n, sigma, theta)
    test = _build_procedure(problem, procedure, alpha, critical_z, side, variant)
    model0, model1 = problem.model_pair()
    report = error_eval.monte_carlo_errors(test, model0, model1, problem.n,
                                           reps, seed)
    row = {"procedure": procedure, **report.to_dict()}
    payload = {
        "problem": _problem_dict(problem),
        "procedure": test.describe(),
        "report": report.to_dict(),
    }
    _emit(fmt, out, payload, [row], ("procedure",) + _REPORT_COLUMNS)


_COMPARE_COLUMNS = ("procedure", "alpha", "power", "power_minus_size",
                    "mc_alpha", "mc_power", "mc_power_minus_size",
                    "mc_se_alpha", "mc_se_beta")


@cli.command()
@_problem_options
@click.option("--alpha", type=float, default=0.05, show_default=True,
              help="Level of the fixed-alpha comparator row.")
@click.option("--critical-z", type=float, default=None,
              help="Override the comparator's critical value.")
@click.option("--variant", type=click.Choice(local.VARIANTS), default="paper",
              show_default=True, help="Less-side reading when theta1 < theta0.")
@click.option("--reps", type=int, default=0, show_default=True,
              help="Monte Carlo replications; 0 for analytic columns only.")
@click.option("--seed", type=int, default=None,
              help="Master seed (default: OPTEST_SEED or 12345).")
@_output_options
@_friendly_errors
def compare(family, theta0, theta1, n, sigma, theta, alpha, critical_z,
            variant, reps, seed, fmt, out):
    """Compare optimum, local, lou, and fixed-alpha on one problem, sorted by
    power minus size."""
    if family != "normal-mean":
        raise click.ClickException(
            "compare is defined for the normal-mean family; use analyze or "
            "simulate for other families")
    seed = _resolve_seed(seed)
    problem = _build_problem(family, theta0, theta1, n, sigma, theta)
    model0, model1 = problem.model_pair()
    side = "greater" if theta1 > theta0 else "less"

    rows = []
    payload_rows = []
    for procedure in ("optimum", "local", "lou", "fixed-alpha"):
        test = _build_procedure(problem, procedure, alpha, critical_z,
                                side, variant)
        analytic = _analytic_report(problem, procedure, alpha, critical_z, side)
        analytic_row = _report_row(analytic)
        row = {
            "procedure": procedure,
            "alpha": analytic_row["alpha"],
            "power": analytic_row["power"],
            "power_minus_size": analytic_row["power_minus_size"],
        }
        mc_report = None
        if reps > 0:
            mc_report = error_eval.monte_carlo_errors(
                test, model0, model1, problem.n, reps, seed)
            row.update({
                "mc_alpha": mc_report.alpha,
                "mc_power": mc_report.power,
                "mc_power_minus_size": mc_report.power_minus_size,
                "mc_se_alpha": mc_report.se_alpha,
                "mc_se_beta": mc_report.se_beta,
            })
        rows.append(row)
        payload_rows.append({
            "procedure": procedure,
            "descriptor": test.describe(),
            "analytic": None if analytic is None
            else (analytic if isinstance(analytic, dict) else analytic.to_dict()),
            "monte_carlo": None if mc_report is None else mc_report.to_dict(),
        })

    def sort_key(row):
        for key in ("power_minus_size", "mc_power_minus_size"):
            if row.get(key) is not None:
                return row[key]
        return float("-inf")

    rows.sort(key=sort_key, reverse=True)
    order = {row["procedure"]: i for i, row in enumerate(rows)}
    payload_rows.sort(key=lambda r: order[r["procedure"]])
    payload = {"problem": _problem_dict(problem), "seed": seed, "reps": reps,
               "rows": payload_rows}
    _emit(fmt, out, payload, rows, _COMPARE_COLUMNS)


@cli.command()
@_problem_options
@click.option("--n-grid", required=True,
              help="Comma-separated increasing sample sizes, e.g. 4,16,64,256.")
@_output_options
@_friendly_errors
def sweep(family, theta0, theta1, n, sigma, theta, n_grid, fmt, out):
    """Analytic errors along a sample-size grid (alpha+beta must shrink)."""
    try:
        grid = [int(part) for part in n_grid.split(",") if part.strip()]
    except ValueError:
        raise click.ClickException(
            f"--n-grid must be comma-separated integers, got {n_grid!r}") from None
    problem = _build_problem(family, theta0, theta1, n, sigma, theta)
    result = error_eval.convergence_sweep(problem, grid)
    rows = result.to_rows()
    payload = {
        "problem": _problem_dict(problem),
        "alpha_beta_decreasing": result.alpha_beta_decreasing,
        "rows": rows,
    }
    preamble = ""
    if result.alpha_beta_decreasing is not None:
        trend = "yes" if result.alpha_beta_decreasing else "NO"
        preamble = f"alpha+beta strictly decreasing along the grid: {trend}"
    _emit(fmt, out, payload, rows, ("n",) + _REPORT_COLUMNS, preamble)


_ORACLE_COLUMNS = ("index", "point", "p0", "p1", "in_region")


@cli.command()
@click.option("--family", type=click.Choice(("bernoulli",)), default="bernoulli",
              show_default=True, help="Discrete family with finite support.")
@click.option("--theta0", type=float, required=True)
@click.option("--theta1", type=float, required=True)
@click.option("--n", type=int, required=True)
@_output_options
@_friendly_errors
def oracle(family, theta0, theta1, n, fmt, out):
    """Exhaustively certify the likelihood-ratio region's optimality on a
    small discrete product space."""
    problem = _build_problem(family, theta0, theta1, n, None, None)
    model0, model1 = problem.model_pair()
    space = error_eval.discrete_space_from_models(model0, model1, n)
    cert = error_eval.brute_force_certify(space)
    member = set(cert.region_indices)
    rows = [
        {
            "index": i,
            "point": " ".join(f"{x:g}" for x in point),
            "p0": float(space.p0[i]),
            "p1": float(space.p1[i]),
            "in_region": i in member,
        }
        for i, point in enumerate(space.points)
    ]
    payload = {
        "problem": _problem_dict(problem),
        "certification": cert.to_dict(),
        "points": [list(point) for point in space.points],
    }
    preamble = (
        f"certification: {'PASS' if cert.certified else 'FAIL'}\n"
        f"points: {cert.n_points}  regions enumerated: {cert.n_regions}\n"
        f"region power-size: {cert.region_value:.5g}  max over regions: "
        f"{cert.max_value:.5g}  co-optimal regions: {cert.n_cooptimal}\n"
        f"alpha: {cert.alpha:.5g}  beta: {cert.beta:.5g}")
    _emit(fmt, out, payload, rows, _ORACLE_COLUMNS, preamble)


_REPRO_COLUMNS = ("procedure", "alpha_printed", "alpha", "power_printed",
                  "power", "pms_printed", "pms", "note")


@cli.command("repro-paper")
@_output_options
@_friendly_errors
def repro_paper(fmt, out):
    """Reproduce the published worked example (theta0=10, theta1=11, sigma=2,
    n=16) beside full-precision recomputations, flagging rounding slips."""
    loc = error_eval.analytic_errors_locally_optimum(10.0, 11.0, 2.0, 16)
    rounded = error_eval.analytic_errors_fixed_alpha(10.0, 11.0, 2.0, 16,
                                                     alpha=0.05, critical_z=1.64)
    exact = error_eval.analytic_errors_fixed_alpha(10.0, 11.0, 2.0, 16, alpha=0.05)
    rows = [
        {
            "procedure": "locally optimum",
            "alpha_printed": 0.3085, "alpha": loc.alpha,
            "power_printed": 0.9337, "power": loc.power,
            "pms_printed": 0.6252, "pms": loc.power_minus_size,
            "note": "printed power and difference are rounding slips "
                    "(recomputed from 1 - Phi(-1.5))",
        },
        {
            "procedure": "fixed-alpha, z=1.64",
            "alpha_printed": 0.05, "alpha": rounded.alpha,
            "power_printed": 0.6406, "power": rounded.power,
            "pms_printed": 0.5906, "pms": rounded.power_minus_size,
            "note": "size recomputed from the rounded critical value",
        },
        {
            "procedure": "fixed-alpha, exact z=1.6449",
            "alpha_printed": None, "alpha": exact.alpha,
            "power_printed": None, "power": exact.power,
            "pms_printed": None, "pms": exact.power_minus_size,
            "note": "exact-quantile mode",
        },
    ]
    conclusion = (
        "locally optimum beats the fixed-alpha comparator on power minus size "
        f"in both modes: {loc.power_minus_size:.5g} > "
        f"{rounded.power_minus_size:.5g} and {loc.power_minus_size:.5g} > "
        f"{exact.power_minus_size:.5g}")
    payload = {"rows": rows, "conclusion": conclusion}
    _emit(fmt, out, payload, rows, _REPRO_COLUMNS, preamble=conclusion)


def main():
    cli()


if __name__ == "__main__":
    main()
