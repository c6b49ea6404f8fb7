"""Command-line front end: parse spec files, run operations, write reports.

Exit codes: 0 when the operation passes, 1 on a property violation
(a verdict of failure on well-formed input), 2 on an input error (bad files
or out-of-range flags).  Reports are JSON/CSV; figures are rendered next to
them unless --no-figures is given.  The report directory may be set with
--output or the PLEATBEND_REPORT_DIR environment variable.
"""

import functools
import math
import sys
from pathlib import Path

import click

from . import defaults
from . import experiments as exp
from . import figures
from . import fileio
from . import laminations as lam
from . import minkowski as mk
from . import rclasses as rq
from . import surfaces as surf
from . import traintracks as tt

INPUT_ERRORS = (
    fileio.FormatError,
    mk.GeometryError,
    lam.LaminationError,
    surf.PleatingError,
    rq.RQuotientError,
    tt.TrainTrackError,
    exp.ExperimentError,
)


class PropertyViolation(Exception):
    """Well-formed input on which the checked property fails."""


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            fn(*args, **kwargs)
        except PropertyViolation as exc:
            click.echo(f"violation: {exc}", err=True)
            sys.exit(1)
        except INPUT_ERRORS as exc:
            click.echo(f"input error [{type(exc).__name__}]: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _report_dir(output):
    path = Path(output) if output else Path(".")
    path.mkdir(parents=True, exist_ok=True)
    return path


_output_option = click.option(
    "--output",
    "-o",
    envvar="PLEATBEND_REPORT_DIR",
    default=None,
    help="report directory (default: current directory; env PLEATBEND_REPORT_DIR)",
)
_figures_option = click.option(
    "--no-figures", is_flag=True, help="skip rendering matplotlib figures"
)


@click.group()
@click.version_option(package_name="pleatbend")
def main():
    """Bend the hyperbolic plane along finite laminations and report on it."""


@main.command()
@click.argument("pleating_spec", type=click.Path(exists=True, dir_okay=False))
@click.argument("arcs_file", type=click.Path(exists=True, dir_okay=False))
@_output_option
@_guard
def bend(pleating_spec, arcs_file, output):
    """Bending measure of each arc in ARCS_FILE against PLEATING_SPEC."""
    data = fileio.parse_pleating_spec(
        fileio.load_json(pleating_spec), Path(pleating_spec).parent
    )
    arcs = [fileio.parse_arc(a) for a in fileio.load_json(arcs_file).get("arcs", [])]
    surface = surf.build_pleated(data)
    rows = []
    for i, arc in enumerate(arcs):
        crossed = lam.crossings(arc, surface.lamination)
        rows.append(
            {
                "arc": i,
                "measure": surf.bending_measure(surface, arc),
                "crossed_leaves": ",".join(leaf_id for leaf_id, _ in crossed),
                "arc_length": arc.length,
            }
        )
    out = _report_dir(output)
    fileio.write_json_report(out / "bend.json", {"arcs": rows})
    fileio.write_csv_report(
        out / "bend.csv", rows, fieldnames=["arc", "measure", "crossed_leaves", "arc_length"]
    )
    click.echo(f"bend: {len(rows)} arc(s) -> {out / 'bend.json'}")


@main.command()
@click.argument("pleating_spec", type=click.Path(exists=True, dir_okay=False))
@click.argument("request_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--delta", type=float, default=None, help="angle bound (overrides request)")
@click.option("--epsilon", type=float, default=None, help="spacing bound (overrides request)")
@_output_option
@_figures_option
@_guard
def approx(pleating_spec, request_file, delta, epsilon, output, no_figures):
    """Polygonal approximation for the arc in REQUEST_FILE."""
    data = fileio.parse_pleating_spec(
        fileio.load_json(pleating_spec), Path(pleating_spec).parent
    )
    request = fileio.load_json(request_file)
    arc = fileio.parse_arc(request.get("arc", request))
    d = delta if delta is not None else float(request.get("delta", defaults.DELTA))
    e = epsilon if epsilon is not None else float(request.get("epsilon", defaults.EPSILON))
    if not 0.0 < e < defaults.EPSILON_MAX:
        raise fileio.FormatError(
            f"epsilon = {e} rejected: epsilon must be < (log 3)/2 ~ "
            f"{defaults.EPSILON_MAX:.4f} (and positive)"
        )
    if not 0.0 < d < math.pi / 2.0:
        raise fileio.FormatError(f"delta = {d} rejected: delta must lie in (0, pi/2)")
    surface = surf.build_pleated(data)
    approximation = surf.polygonal_approximation(surface, arc, d, e)
    report = surf.approx_report(surface, arc, d, e)
    checks = surf.validate_approximation(surface, approximation)
    payload = {
        "report": report.as_dict(),
        "checks": checks,
        "entries": [
            {"t": entry.t, "point": entry.point, "plane": entry.plane}
            for entry in approximation.entries
        ],
    }
    out = _report_dir(output)
    fileio.write_json_report(out / "approx.json", payload)
    fileio.write_csv_report(out / "approx.csv", [report.as_dict()])
    if not no_figures:
        figures.approx_figure(out / "approx.png", approximation, report)
    verdicts = {k: v for k, v in checks.items() if isinstance(v, bool)}
    if not all(verdicts.values()):
        failed = sorted(k for k, v in verdicts.items() if not v)
        raise PropertyViolation(f"approximation invariants failed: {failed}")
    click.echo(
        f"approx: {len(approximation)} planes, angle sum {report.angle_sum:.6f}, "
        f"error {report.error:.3e} -> {out / 'approx.json'}"
    )


@main.command()
@click.argument("pleating_spec", type=click.Path(exists=True, dir_okay=False))
@click.option("--window", "-R", "radius", type=float, default=3.0, help="sampling radius")
@click.option("--per-component", type=int, default=60, help="samples per flat")
@_output_option
@_figures_option
@_guard
def fold(pleating_spec, radius, per_component, output, no_figures):
    """Sampled mesh of the bent surface as CSV of H^3 points."""
    data = fileio.parse_pleating_spec(
        fileio.load_json(pleating_spec), Path(pleating_spec).parent
    )
    surface = surf.build_pleated(data)
    out = _report_dir(output)
    mesh_path = fileio.write_surface_mesh(
        out / "fold.csv", surface, radius=radius, per_component=per_component
    )
    convex, _ = surface.is_convex()
    fileio.write_json_report(
        out / "fold.json",
        {
            "components": len(surface.component_maps),
            "leaves": len(surface.lamination),
            "convex": bool(convex),
            "even": bool(surface.is_even()),
            "mesh": mesh_path.name,
        },
    )
    if not no_figures:
        figures.surface_figure(out / "fold.png", fileio.read_surface_mesh(mesh_path))
    click.echo(f"fold: {len(surface.component_maps)} component(s) -> {mesh_path}")


@main.command()
@click.argument("family_spec", type=click.Path(exists=True, dir_okay=False))
@click.option("--tail", type=int, default=defaults.TAIL, help="tail window length")
@_output_option
@_figures_option
@_guard
def dichotomy(family_spec, tail, output, no_figures):
    """Classify the limit of a weight family as convex, even, or neither."""
    obj = fileio.load_json(family_spec)
    spec = fileio.parse_family_spec(obj)
    arcs = [fileio.parse_arc(a) for a in obj.get("arcs", [])]
    if not arcs:
        raise fileio.FormatError("family spec: needs at least one test arc")
    report = exp.run_dichotomy(spec, arcs, tail=tail)
    out = _report_dir(output)
    fileio.write_json_report(out / "dichotomy.json", report.as_dict())
    rows = [
        {
            "index": n,
            "convex": report.convexity[i],
            **{f"arc_{j}": trace[i] for j, trace in enumerate(report.arc_traces)},
        }
        for i, n in enumerate(spec.indices)
        if i < len(report.convexity)
    ]
    fileio.write_csv_report(out / "dichotomy.csv", rows)
    if not no_figures:
        figures.dichotomy_figure(out / "dichotomy.png", list(spec.indices), report)
    click.echo(f"dichotomy: classified {report.classification} -> {out / 'dichotomy.json'}")
    if report.classification == "non-convergent":
        raise PropertyViolation("family does not converge to a convex or even limit")


@main.command()
@click.argument("periodic_spec", type=click.Path(exists=True, dir_okay=False))
@_output_option
@_figures_option
@_guard
def quasigeo(periodic_spec, output, no_figures):
    """Length ratios of periodically bent axes across an epsilon ladder."""
    levels = fileio.parse_periodic_levels(fileio.load_json(periodic_spec))
    result = exp.quasigeodesic_experiment(levels)
    out = _report_dir(output)
    fileio.write_json_report(
        out / "quasigeo.json",
        {
            "max_ratio": result["max_ratio"],
            "excluded": result["excluded"],
            "reports": {
                str(eps): [r.as_dict() for r in rows]
                for eps, rows in result["reports"].items()
            },
        },
    )
    rows = [
        r.as_dict()
        for eps in sorted(result["reports"], reverse=True)
        for r in result["reports"][eps]
    ]
    fileio.write_csv_report(out / "quasigeo.csv", rows)
    if not no_figures:
        figures.quasigeodesic_figure(out / "quasigeo.png", result["reports"])
    click.echo(f"quasigeo: max ratios {result['max_ratio']} -> {out / 'quasigeo.json'}")


@main.command(name="rq-compare")
@click.argument("lam_a", type=click.Path(exists=True, dir_okay=False))
@click.argument("lam_b", type=click.Path(exists=True, dir_okay=False))
@click.option("--pool", type=click.Path(exists=True, dir_okay=False), default=None,
              help="test-arc pool for a separation witness")
@_output_option
@_guard
def rq_compare(lam_a, lam_b, pool, output):
    """Equivalence under pi-truncation, with a separating arc when distinct."""
    a = fileio.parse_abstract_lamination(fileio.load_json(lam_a))
    b = fileio.parse_abstract_lamination(fileio.load_json(lam_b))
    equivalent = rq.r_equivalent(a, b)
    payload = {"equivalent": equivalent}
    if not equivalent and pool is not None:
        arcs = fileio.parse_arc_pool(fileio.load_json(pool))
        try:
            witness = rq.separation_witness(a, b, arcs)
        except rq.CannotDecideError as exc:
            raise PropertyViolation(str(exc)) from exc
        payload["witness"] = {"crossings": list(witness.crossings)}
    out = _report_dir(output)
    fileio.write_json_report(out / "rq_compare.json", payload)
    click.echo(f"rq-compare: {'equivalent' if equivalent else 'distinct'}")


@main.command(name="rq-converge")
@click.argument("sequence_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--tol", type=float, default=defaults.TOL)
@click.option("--tail", type=int, default=defaults.TAIL)
@_output_option
@_figures_option
@_guard
def rq_converge(sequence_file, tol, tail, output, no_figures):
    """Quotient convergence of a lamination sequence against a candidate."""
    obj = fileio.load_json(sequence_file)
    sequence = [
        fileio.parse_abstract_lamination(rec)
        for rec in fileio._require(obj, "sequence", "convergence spec")
    ]
    candidate = fileio.parse_abstract_lamination(
        fileio._require(obj, "candidate", "convergence spec")
    )
    arcs = fileio.parse_arc_pool(
        {"arcs": fileio._require(obj, "arcs", "convergence spec")}
    )
    report = rq.quotient_convergence_check(sequence, candidate, arcs, tol=tol, tail=tail)
    out = _report_dir(output)
    fileio.write_json_report(out / "rq_converge.json", report)
    if not no_figures:
        figures.convergence_figure(out / "rq_converge.png", report)
    click.echo(f"rq-converge: {'pass' if report['passes'] else 'fail'}")
    if not report["passes"]:
        bad = [e["crossings"] for e in report["arcs"] if not e["ok"]]
        raise PropertyViolation(f"convergence fails on arcs {bad}")


@main.command(name="tt-check")
@click.argument("track_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--subtrack", default=None, help="comma-separated branch ids of a carried loop")
@click.option("--tol", type=float, default=1e-12, help="switch-balance tolerance for floats")
@_output_option
@_guard
def tt_check(track_file, subtrack, tol, output):
    """Validate branch measures; carried intersection against a subtrack."""
    track, measures = fileio.parse_train_track(fileio.load_json(track_file))
    rows = []
    sub = None if subtrack is None else [b.strip() for b in subtrack.split(",") if b.strip()]
    for i, measure in enumerate(measures):
        valid = tt.validate_measure(track, measure, tol=tol)
        row = {"measure": i, "valid": valid}
        if valid and sub:
            row["carried_intersection"] = tt.carried_intersection(track, sub, measure)
        rows.append(row)
    out = _report_dir(output)
    fileio.write_json_report(
        out / "tt_check.json",
        {"branches": list(track.branches), "subtrack": sub, "measures": rows},
    )
    fileio.write_csv_report(out / "tt_check.csv", rows)
    invalid = [r["measure"] for r in rows if not r["valid"]]
    click.echo(f"tt-check: {len(rows)} measure(s), {len(invalid)} invalid")
    if invalid:
        raise PropertyViolation(f"switch condition fails for measures {invalid}")


if __name__ == "__main__":
    main()
