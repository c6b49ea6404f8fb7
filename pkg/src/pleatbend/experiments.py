"""Finite-scale convergence experiments on bent surfaces.

Three experiment families live here:

* parametric weight families probing the convex-or-folded-flat dichotomy of
  limits of convex bent surfaces;
* the folded-flat residual check (all weights pi force a planar image);
* periodic bending along an axis with a cyclic holonomy, measuring how the
  closed-curve length compares with the translation length of the bent
  holonomy (slightly bent curves stay quasi-geodesic).

Limits are operationalized as tail behavior of a monotone index family plus
extrapolation; no infinite limits are computed.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import defaults, minkowski as mk
from . import laminations as lam
from . import surfaces as surf


class ExperimentError(Exception):
    pass


class NonLoxodromicError(ExperimentError):
    pass


# -- weight paths -----------------------------------------------------------


@dataclass(frozen=True)
class WeightPath:
    """Named weight path n -> w(n) from a small catalogue."""

    kind: str  # constant | harmonic | geometric
    target: float
    start: float = None
    ratio: float = 0.5

    def __post_init__(self):
        if self.kind not in ("constant", "harmonic", "geometric"):
            raise ExperimentError(f"unknown weight path kind {self.kind!r}")
        if self.start is None:
            object.__setattr__(self, "start", self.target)

    def __call__(self, n):
        if self.kind == "constant":
            return self.target
        if self.kind == "harmonic":
            return self.target + (self.start - self.target) / n
        return self.target + (self.start - self.target) * self.ratio ** n

    @property
    def limit(self):
        return self.target


@dataclass(frozen=True)
class FamilySpec:
    """Fixed leaf geometry with per-leaf weight paths over an index range."""

    geometry: tuple  # (id, theta1, theta2) triples
    paths: dict  # id -> WeightPath
    indices: tuple
    side: int = 1

    def __post_init__(self):
        ids = [g[0] for g in self.geometry]
        if set(ids) != set(self.paths):
            raise ExperimentError("weight paths must cover exactly the leaf ids")
        for n in self.indices:
            for i in ids:
                w = self.paths[i](n)
                if not 0.0 < w <= math.pi + 1e-12:
                    raise ExperimentError(
                        f"path for {i} leaves (0, pi] at index {n}: w = {w}"
                    )

    def lamination_at(self, n):
        leaves = tuple(
            lam.Leaf(i, t1, t2, self.paths[i](n)) for i, t1, t2 in self.geometry
        )
        return lam.FiniteLamination(leaves)

    def surface_at(self, n):
        return surf.build_pleated(surf.BendingData(self.lamination_at(n), self.side))


@dataclass
class DichotomyReport:
    classification: str  # convex | even | non-convergent
    convexity: list  # per-index bool
    excluded: list  # indices dropped for failing convexity
    arc_traces: list  # per-arc list over indices
    arc_limits: list  # expected limit per arc
    dirac_pi_flags: dict  # leaf id -> bool
    residual_trace: list  # coplanarity residual per index (even families)
    extrapolated_residual: float
    witness: object

    def as_dict(self):
        return {
            "classification": self.classification,
            "convexity": self.convexity,
            "excluded": self.excluded,
            "arc_traces": self.arc_traces,
            "arc_limits": self.arc_limits,
            "dirac_pi_flags": self.dirac_pi_flags,
            "residual_trace": self.residual_trace,
            "extrapolated_residual": self.extrapolated_residual,
            "witness": None if self.witness is None else list(map(float, self.witness)),
        }


def run_dichotomy(spec, arcs, tail=defaults.TAIL, extrapolate_to=10_000):
    """Run a weight family and classify its limit.

    All-pi targets are expected to fold flat (every crossed leaf ends with a
    Dirac weight pi); any target below pi keeps an interior witness.  Weight
    paths without a finite limit classify as non-convergent.
    """
    targets = {i: spec.paths[i].limit for i in spec.paths}
    if any(not math.isfinite(t) or t <= 0 for t in targets.values()):
        return DichotomyReport(
            "non-convergent", [], [], [], [], {}, [], math.inf, None
        )

    convexity, excluded, residuals = [], [], []
    traces = [[] for _ in arcs]
    last_surface = None
    for n in spec.indices:
        surface = spec.surface_at(n)
        convex, cert = surface.is_convex()
        convexity.append(bool(convex))
        if not convex and not surface.is_even():
            excluded.append(n)
            continue
        last_surface = surface
        residuals.append(surface.flat_image_residual())
        for j, arc in enumerate(arcs):
            traces[j].append(surf.bending_measure(surface, arc))

    all_pi = all(abs(t - math.pi) <= 1e-9 for t in targets.values())
    arc_limits = []
    terminal_lam = spec.lamination_at(spec.indices[-1])
    for arc in arcs:
        crossed = [leaf_id for leaf_id, _ in lam.crossings(arc, terminal_lam)]
        arc_limits.append(sum(targets[i] for i in crossed))

    dirac = {i: abs(t - math.pi) <= 1e-9 for i, t in targets.items()}

    if all_pi:
        extrapolated = _extrapolate_residual(spec.indices, residuals, extrapolate_to)
        classification = "even"
        witness = None
    elif last_surface is None:
        # every index failed convexity: no limit surface to classify
        classification = "non-convergent"
        extrapolated = math.inf
        witness = None
    else:
        classification = "convex"
        extrapolated = math.inf
        convex, cert = last_surface.is_convex()
        if not convex:
            classification = "non-convergent"
            witness = None
        else:
            witness = cert["witness"]
    return DichotomyReport(
        classification,
        convexity,
        excluded,
        traces,
        arc_limits,
        dirac,
        residuals,
        extrapolated,
        witness,
    )


def _extrapolate_residual(indices, residuals, n_star):
    """Power-law fit residual ~ C * base^(-n) or C / n^q, extrapolated."""
    pairs = [(n, r) for n, r in zip(indices, residuals) if r > 1e-300]
    if len(pairs) < 2:
        return 0.0
    ns = np.array([n for n, _ in pairs], dtype=float)
    logs = np.log([r for _, r in pairs])
    # try geometric decay first: log r linear in n
    slope_geo, icpt_geo = np.polyfit(ns, logs, 1)
    resid_geo = np.abs(np.polyval([slope_geo, icpt_geo], ns) - logs).max()
    slope_pow, icpt_pow = np.polyfit(np.log(ns), logs, 1)
    resid_pow = np.abs(np.polyval([slope_pow, icpt_pow], np.log(ns)) - logs).max()
    if resid_geo <= resid_pow and slope_geo < 0:
        return float(np.exp(icpt_geo + slope_geo * n_star))
    if slope_pow < 0:
        return float(np.exp(icpt_pow + slope_pow * math.log(n_star)))
    return float(residuals[-1])


def flat_image_check(surface):
    """Residual of the folded-flat configuration (all weights pi required)."""
    if len(surface.lamination) == 0:
        raise ExperimentError("empty lamination: convex-degenerate, not folded flat")
    for leaf in surface.lamination.leaves:
        if abs(leaf.weight - math.pi) > 1e-12:
            raise ExperimentError(
                f"leaf {leaf.id} has weight {leaf.weight}, not pi"
            )
    return surface.flat_image_residual()


# -- periodic bending -------------------------------------------------------

AXIS = mk.geodesic_from_angles(0.0, math.pi)


@dataclass
class PeriodicPleating:
    """Seed bending data repeated by a translation along the x-axis."""

    period: float
    seed_leaves: tuple  # lam.Leaf values crossing the axis inside one period
    side: int = 1
    domains: int = 3  # how many fundamental domains to check / extend over
    _extended: lam.FiniteLamination = field(default=None, repr=False)

    def __post_init__(self):
        if self.period <= 0:
            raise ExperimentError("period must be positive")
        self.translation = mk.translation_along_geodesic(AXIS, self.period)
        self._extended_leaves()

    def _translate_leaf(self, leaf, k):
        G = np.linalg.matrix_power(self.translation, k) if k >= 0 else np.linalg.matrix_power(
            np.linalg.inv(self.translation), -k
        )
        e1 = G @ leaf.geodesic.e1
        e2 = G @ leaf.geodesic.e2
        t1 = math.atan2(e1[2] / e1[0], e1[1] / e1[0])
        t2 = math.atan2(e2[2] / e2[0], e2[1] / e2[0])
        return lam.Leaf(f"{leaf.id}@{k}", t1, t2, leaf.weight)

    def _extended_leaves(self):
        ks = range(-self.domains, self.domains + 1)
        leaves = tuple(
            self._translate_leaf(leaf, k) for k in ks for leaf in self.seed_leaves
        )
        try:
            self._extended = lam.FiniteLamination(leaves)
        except lam.LaminationError as exc:
            raise ExperimentError(f"seed leaves and translates collide: {exc}") from exc
        return self._extended

    def extended_surface(self):
        # two domains on each side cover evaluation of x and a.x for x within
        # one period of the basepoint; farther translates only add conditioning
        # loss to the fold isometries
        ks = range(-2, 3)
        leaves = tuple(
            self._translate_leaf(leaf, k) for k in ks for leaf in self.seed_leaves
        )
        return surf.build_pleated(surf.BendingData(lam.FiniteLamination(leaves), self.side))

    def axis_arc(self, periods=1.0):
        p1 = mk.exp_map(mk.BASEPOINT, AXIS.direction(0.0), -0.5 * self.period * periods)
        p2 = mk.exp_map(mk.BASEPOINT, AXIS.direction(0.0), 0.5 * self.period * periods)
        return lam.Arc(p1, p2)

    def intersection_with_curve(self):
        """i(c, lambda): seed weights crossed by one period of the axis."""
        arc = self.axis_arc(1.0)
        cr = lam.crossings(arc, self._extended)
        return sum(self._extended.leaf(i).weight for i, _ in cr)


def translation_length(G, tol=1e-9):
    """Axis displacement of a loxodromic isometry: log of the spectral radius.

    Raises NonLoxodromicError (naming the detected type) when the spectral
    radius is within tolerance of 1.
    """
    eig = np.linalg.eigvals(np.asarray(G, dtype=float))
    radius = float(np.abs(eig).max())
    if radius <= 1.0 + tol:
        drift = np.abs(np.asarray(G) - np.eye(4)).max()
        kind = "identity" if drift <= tol else "elliptic-or-parabolic"
        raise NonLoxodromicError(f"spectral radius {radius}: {kind} isometry")
    return math.log(radius)


def periodic_holonomy(pp, check_tol=1e-8, check_samples=12):
    """Holonomy of one period of the bent axis.

    Composes the fold rotations picked up along one period with the axis
    translation, and asserts equivariance of the extended map on sample
    points spanning two fundamental domains.
    """
    surface = pp.extended_surface()
    a = pp.translation
    image = mk.apply_point(a, surface.base_anchor)
    node = surface.tree.locate(image)
    hol = surface.component_maps[node] @ a

    rng = np.random.default_rng(7)
    checked = 0
    tries = 0
    while checked < check_samples and tries < 200:
        tries += 1
        s = rng.uniform(-pp.period, pp.period)
        off = rng.uniform(-0.4, 0.4)
        base = mk.exp_map(mk.BASEPOINT, AXIS.direction(0.0), s)
        x = mk.exp_map(base, mk.leaf_normal(AXIS), off)
        try:
            fx = surface.evaluate(x)
            fax = surface.evaluate(mk.apply_point(a, x))
        except lam.BoundaryError:
            continue
        other = mk.apply_point(hol, fx)
        # relative coordinate agreement: hyperbolic distance cannot resolve
        # gaps below ||coords|| * sqrt(eps) this far from the origin
        gap = np.abs(fax - other).max() / max(1.0, np.abs(fax).max())
        if gap > check_tol:
            raise ExperimentError(f"equivariance fails at sample: relative gap {gap}")
        checked += 1
    if checked == 0:
        raise ExperimentError("no usable equivariance samples")
    return hol


@dataclass
class QuasiGeodesicReport:
    epsilon: float
    intersection: float
    curve_length: float
    holonomy_length: float

    @property
    def ratio(self):
        return self.curve_length / self.holonomy_length

    def as_dict(self):
        return {
            "epsilon": self.epsilon,
            "intersection": self.intersection,
            "curve_length": self.curve_length,
            "holonomy_length": self.holonomy_length,
            "ratio": self.ratio,
        }


def quasigeodesic_experiment(levels, ratio_tol=1e-9):
    """Sweep bending levels and record length ratios.

    ``levels`` maps an epsilon bound to a list of PeriodicPleating
    instances; out-of-regime instances (intersection above the bound or at
    least pi/2) are excluded with diagnostics.  Returns per-level reports,
    the measured max ratio per level, and the excluded instances.
    """
    reports, measured, skipped = {}, {}, []
    for eps in sorted(levels, reverse=True):
        rows = []
        for pp in levels[eps]:
            inter = pp.intersection_with_curve()
            if inter > eps + 1e-12 or inter >= math.pi / 2.0:
                skipped.append({"epsilon": eps, "intersection": inter})
                continue
            hol = periodic_holonomy(pp)
            l_curve = pp.period
            l_hol = translation_length(hol)
            if l_curve < l_hol - 1e-9:
                raise ExperimentError(
                    f"bent holonomy longer than the curve: {l_hol} > {l_curve}"
                )
            row = QuasiGeodesicReport(eps, inter, l_curve, l_hol)
            if row.ratio < 1.0 - ratio_tol:
                raise ExperimentError(f"length ratio {row.ratio} below 1")
            rows.append(row)
        reports[eps] = rows
        if rows:
            measured[eps] = max(r.ratio for r in rows)
    return {"reports": reports, "max_ratio": measured, "excluded": skipped}
