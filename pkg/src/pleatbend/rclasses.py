"""The truncation relation on weighted laminations.

Two weight systems are identified when they agree after every closed-leaf
weight above pi is replaced by pi.  This module works on abstract leaf-id /
weight records; arc functionals are atomic sums over crossing records.  The
geometric bridge (supports realized as actual geodesics) goes through
``support_inclusion_check``.
"""

import math
from dataclasses import dataclass

from . import defaults
from . import laminations as lam

PI_COMPARE_TOL = 1e-12


class RQuotientError(Exception):
    pass


class CannotDecideError(RQuotientError):
    pass


@dataclass(frozen=True)
class AbstractLeaf:
    id: str
    weight: float
    closed: bool = True

    def __post_init__(self):
        if not self.weight > 0:
            raise RQuotientError(f"leaf {self.id}: weight must be positive")


@dataclass(frozen=True)
class AbstractLamination:
    leaves: tuple

    def __post_init__(self):
        leaves = tuple(self.leaves)
        ids = [lf.id for lf in leaves]
        if len(set(ids)) != len(ids):
            raise RQuotientError("duplicate leaf ids")
        object.__setattr__(self, "leaves", leaves)

    def weights(self):
        return {lf.id: lf.weight for lf in self.leaves}

    def leaf(self, leaf_id):
        for lf in self.leaves:
            if lf.id == leaf_id:
                return lf
        raise KeyError(leaf_id)


@dataclass(frozen=True)
class TestArc:
    """Crossing records (leaf id, multiplicity >= 1); ids absent from a
    lamination contribute nothing."""

    crossings: tuple

    def __post_init__(self):
        crossings = tuple((str(i), int(m)) for i, m in self.crossings)
        for i, m in crossings:
            if m < 1:
                raise RQuotientError(f"multiplicity {m} < 1 for leaf {i}")
        object.__setattr__(self, "crossings", crossings)


@dataclass(frozen=True)
class RClass:
    """Canonical representative: closed-leaf weights truncated at pi."""

    canonical: AbstractLamination

    def __post_init__(self):
        for lf in self.canonical.leaves:
            if lf.closed and lf.weight > math.pi + PI_COMPARE_TOL:
                raise RQuotientError(f"closed leaf {lf.id} above pi in a canonical form")


def truncate(lamination):
    """Replace closed-leaf weights above pi by pi; open leaves unchanged."""
    leaves = []
    for lf in lamination.leaves:
        w = min(lf.weight, math.pi) if lf.closed else lf.weight
        leaves.append(AbstractLeaf(lf.id, w, lf.closed))
    return RClass(AbstractLamination(tuple(leaves)))


def r_equivalent(lam_a, lam_b):
    """True iff the truncated representatives coincide exactly."""
    ta = truncate(lam_a).canonical
    tb = truncate(lam_b).canonical
    if {lf.id for lf in ta.leaves} != {lf.id for lf in tb.leaves}:
        return False
    wb = tb.weights()
    cb = {lf.id: lf.closed for lf in tb.leaves}
    return all(lf.weight == wb[lf.id] and lf.closed == cb[lf.id] for lf in ta.leaves)


def pi_part(lamination, mode="at-least"):
    """Ids of closed leaves at (or above) weight pi.

    ``mode`` is "at-least" or "strictly-greater"; comparisons against pi use
    a 1e-12 tolerance.
    """
    if mode not in ("at-least", "strictly-greater"):
        raise RQuotientError(f"unknown threshold mode {mode!r}")
    out = set()
    for lf in lamination.leaves:
        if not lf.closed:
            continue
        if mode == "at-least" and lf.weight >= math.pi - PI_COMPARE_TOL:
            out.add(lf.id)
        elif mode == "strictly-greater" and lf.weight > math.pi + PI_COMPARE_TOL:
            out.add(lf.id)
    return out


def arc_integral(arc, lamination):
    """Atomic arc functional: sum of multiplicity * weight over present ids."""
    w = lamination.weights()
    return sum(m * w[i] for i, m in arc.crossings if i in w)


def quotient_convergence_check(sequence, candidate, arcs, tol=defaults.TOL, tail=defaults.TAIL):
    """Tail checks for convergence in the quotient against a candidate.

    Arcs avoiding the weight-pi part must converge to the truncated
    integral; every arc must satisfy the tail-liminf lower bound.  Returns a
    verdict with per-arc diagnostics.
    """
    canonical = truncate(candidate).canonical
    pi_ids = pi_part(canonical, mode="at-least")
    window = sequence[-tail:] if len(sequence) > tail else list(sequence)
    per_arc = []
    ok = True
    for arc in arcs:
        target = arc_integral(arc, canonical)
        vals = [arc_integral(arc, l) for l in window]
        crosses_pi = any(i in pi_ids for i, _ in arc.crossings)
        entry = {
            "crossings": list(arc.crossings),
            "crosses_pi_part": crosses_pi,
            "target": target,
            "tail_values": vals,
        }
        liminf_ok = min(vals) >= target - tol
        entry["liminf_ok"] = liminf_ok
        if crosses_pi:
            entry["converges"] = None
            arc_ok = liminf_ok
        else:
            converges = all(abs(v - target) <= tol for v in vals)
            entry["converges"] = converges
            arc_ok = liminf_ok and converges
        entry["ok"] = arc_ok
        ok = ok and arc_ok
        per_arc.append(entry)
    return {"passes": ok, "arcs": per_arc, "tol": tol, "tail": len(window)}


def separation_witness(class_a, class_b, arc_pool):
    """Arc from the pool separating two truncated classes, or "equal".

    Prefers arcs that avoid both weight-pi parts.  Raises CannotDecideError
    when the classes differ but the pool has no separating arc.
    """
    ca = class_a.canonical if isinstance(class_a, RClass) else truncate(class_a).canonical
    cb = class_b.canonical if isinstance(class_b, RClass) else truncate(class_b).canonical
    wa, wb = ca.weights(), cb.weights()
    if wa == wb:
        return "equal"
    pi_ids = pi_part(ca, "at-least") | pi_part(cb, "at-least")

    def gap(arc):
        return abs(arc_integral(arc, ca) - arc_integral(arc, cb))

    diff_ids = {i for i in set(wa) | set(wb) if wa.get(i, 0.0) != wb.get(i, 0.0)}
    weight_gap = max(abs(wa.get(i, 0.0) - wb.get(i, 0.0)) for i in diff_ids)
    candidates = [a for a in arc_pool if gap(a) >= weight_gap - PI_COMPARE_TOL]
    if not candidates:
        raise CannotDecideError(
            "classes differ but no pool arc separates them; "
            f"differing ids: {sorted(diff_ids)}"
        )
    avoiding = [a for a in candidates if not any(i in pi_ids for i, _ in a.crossings)]
    return (avoiding or candidates)[0]


def support_inclusion_check(sequence, limit_class, radius=defaults.WINDOW_RADIUS,
                            tol=defaults.TOL, tail=defaults.TAIL):
    """Geometric support inclusion along a sequence.

    ``sequence`` holds FiniteLamination values and ``limit_class`` a
    FiniteLamination representing the support of the limit class.  Verifies
    the supports converge (windowed Hausdorff between consecutive terms) and
    that every sampled point of the limit support is swallowed by the tail.
    """
    if len(sequence) < 2:
        raise RQuotientError("need at least two terms")
    window = min(tail, len(sequence) - 1)
    consecutive = [
        lam.windowed_hausdorff(a, b, radius)
        for a, b in zip(sequence[-window - 1 :], sequence[-window:])
    ]
    if any(math.isinf(d) for d in consecutive) or consecutive[-1] > 10 * tol + consecutive[0]:
        return {"verdict": "inconclusive", "consecutive": consecutive}

    gaps = []
    for term in sequence:
        worst = 0.0
        witness = None
        for leaf in limit_class.leaves:
            for s in (-1.5, -0.5, 0.0, 0.5, 1.5):
                p = leaf.geodesic.point(s)
                d = lam.point_to_support_distance(p, term, radius)
                if d > worst:
                    worst, witness = d, (leaf.id, s)
        gaps.append((worst, witness))
    tail_gaps = [g for g, _ in gaps[-window:]]
    decreasing = all(b <= a + tol for a, b in zip(tail_gaps, tail_gaps[1:]))
    passed = tail_gaps[-1] <= 10 * tol and decreasing
    return {
        "verdict": "pass" if passed else "fail",
        "max_gap_trace": [g for g, _ in gaps],
        "witness": gaps[-1][1] if not passed else None,
        "consecutive": consecutive,
    }
