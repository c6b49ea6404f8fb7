"""Matplotlib renderings written next to the delimited reports.

Every renderer takes already-computed data and a target path, draws with the
non-interactive Agg backend, and returns the path it wrote.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def surface_figure(path, mesh_rows):
    """Projected (x, y) scatter of the bent surface, colored per component,
    with the height z encoded as marker size."""
    fig, ax = plt.subplots(figsize=(6, 6))
    by_component = {}
    for component, point in mesh_rows:
        by_component.setdefault(component, []).append(point)
    for name in sorted(by_component):
        pts = by_component[name]
        xs = [p[1] for p in pts]
        ys = [p[2] for p in pts]
        sizes = [8 + 40 * abs(p[3]) for p in pts]
        ax.scatter(xs, ys, s=sizes, alpha=0.6, label=name)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("bent surface, (x, y) projection; marker size ~ |z|")
    if len(by_component) <= 12:
        ax.legend(fontsize=7)
    ax.set_aspect("equal")
    return _finish(fig, path)


def approx_figure(path, approx, report=None):
    """Angle profile of a polygonal approximation along the arc."""
    fig, ax = plt.subplots(figsize=(7, 4))
    ts = [e.t for e in approx.entries]
    mids = [(a + b) / 2 for a, b in zip(ts, ts[1:])]
    ax.plot(mids, approx.angles(), marker=".", lw=0.8)
    ax.axhline(approx.delta, color="red", ls="--", lw=0.8, label=f"delta = {approx.delta}")
    ax.set_xlabel("arc parameter")
    ax.set_ylabel("consecutive plane angle")
    title = f"angle profile ({len(approx)} planes, sum = {approx.angle_sum():.6f})"
    if report is not None:
        title += f"; error = {report.error:.2e}"
    ax.set_title(title)
    ax.legend(fontsize=8)
    return _finish(fig, path)


def dichotomy_figure(path, indices, report):
    """Arc traces and the coplanarity residual along a weight family."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for i, trace in enumerate(report.arc_traces):
        ax1.plot(indices[: len(trace)], trace, marker=".", label=f"arc {i}")
        ax1.axhline(report.arc_limits[i], ls="--", lw=0.6, color="gray")
    ax1.set_xlabel("index n")
    ax1.set_ylabel("arc bending measure")
    ax1.set_title(f"arc traces (classified {report.classification})")
    ax1.legend(fontsize=8)
    if report.residual_trace:
        ax2.semilogy(
            indices[: len(report.residual_trace)],
            [max(r, 1e-17) for r in report.residual_trace],
            marker=".",
        )
        ax2.set_title("coplanarity residual")
    else:
        ax2.set_title("no residual trace (not an even family)")
    ax2.set_xlabel("index n")
    return _finish(fig, path)


def quasigeodesic_figure(path, reports_by_level):
    """Length ratio l(c)/l(c*) against the bending bound epsilon."""
    fig, ax = plt.subplots(figsize=(6, 4))
    epsilons = sorted(reports_by_level, reverse=True)
    for eps in epsilons:
        ratios = [r.ratio for r in reports_by_level[eps]]
        ax.scatter([eps] * len(ratios), ratios, alpha=0.7)
    maxima = [max((r.ratio for r in reports_by_level[e]), default=1.0) for e in epsilons]
    ax.plot(epsilons, maxima, color="red", lw=1.0, label="max ratio")
    ax.axhline(1.0, color="gray", ls="--", lw=0.8)
    ax.set_xlabel("bending bound epsilon")
    ax.set_ylabel("l(c) / l(c*)")
    ax.set_title("quasi-geodesic length ratios")
    ax.legend(fontsize=8)
    return _finish(fig, path)


def convergence_figure(path, report):
    """Per-arc tail values from a quotient-convergence report."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for i, entry in enumerate(report["arcs"]):
        vals = entry["tail_values"]
        ax.plot(range(len(vals)), vals, marker=".", label=f"arc {i}")
        ax.axhline(entry["target"], ls="--", lw=0.6, color="gray")
    ax.set_xlabel("tail position")
    ax.set_ylabel("arc integral")
    ax.set_title(f"quotient convergence ({'pass' if report['passes'] else 'fail'})")
    ax.legend(fontsize=8)
    return _finish(fig, path)
