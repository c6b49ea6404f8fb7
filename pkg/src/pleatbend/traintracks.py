"""Combinatorial train tracks and switch-conditioned branch measures.

Tracks are purely combinatorial: a set of branches and a list of switches,
each switch holding two ordered lists of branch ends.  Every branch has
exactly two ends placed at switches.  A measure assigns a nonnegative
weight per branch, balanced at every switch; weights may be exact
(``fractions.Fraction`` or int) or floats checked to 1e-12.
"""

from dataclasses import dataclass
from fractions import Fraction


class TrainTrackError(Exception):
    pass


class UnknownBranchError(TrainTrackError):
    pass


class NotLoopCarrierError(TrainTrackError):
    pass


@dataclass(frozen=True)
class Switch:
    side_a: tuple
    side_b: tuple

    def ends(self):
        return tuple(self.side_a) + tuple(self.side_b)


class TrainTrack:
    def __init__(self, branches, switches):
        self.branches = tuple(branches)
        self.switches = tuple(
            Switch(tuple(s.side_a), tuple(s.side_b)) if isinstance(s, Switch) else Switch(tuple(s[0]), tuple(s[1]))
            for s in switches
        )
        counts = {b: 0 for b in self.branches}
        for sw in self.switches:
            if not sw.ends():
                raise TrainTrackError("isolated switch with no branch ends")
            for b in sw.ends():
                if b not in counts:
                    raise UnknownBranchError(f"unknown branch {b!r} at a switch")
                counts[b] += 1
        bad = {b: c for b, c in counts.items() if c != 2}
        if bad:
            raise TrainTrackError(f"branches without exactly two ends: {bad}")

    def switches_touching(self, branch_set):
        out = []
        for i, sw in enumerate(self.switches):
            if any(b in branch_set for b in sw.ends()):
                out.append(i)
        return out


def _is_exact(x):
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def validate_measure(track, weights, tol=1e-12):
    """True iff the weights are nonnegative and balanced at every switch."""
    for b in track.branches:
        if b not in weights:
            raise UnknownBranchError(f"measure missing branch {b!r}")
        if weights[b] < 0:
            return False
    for b in weights:
        if b not in track.branches:
            raise UnknownBranchError(f"measure names unknown branch {b!r}")
    exact = all(_is_exact(weights[b]) for b in track.branches)
    for sw in track.switches:
        lhs = sum(weights[b] for b in sw.side_a)
        rhs = sum(weights[b] for b in sw.side_b)
        if exact:
            if lhs != rhs:
                return False
        elif abs(lhs - rhs) > tol:
            return False
    return True


def tie_measure(track, weights, branch):
    """Mass crossing a tie of the branch: its weight."""
    if branch not in track.branches:
        raise UnknownBranchError(f"unknown branch {branch!r}")
    if branch not in weights:
        raise UnknownBranchError(f"measure missing branch {branch!r}")
    return weights[branch]


def subtrack_carries_loop(track, subtrack_branches):
    """A subtrack carries a simple closed curve when every touched switch
    keeps exactly one retained end per side."""
    sub = set(subtrack_branches)
    if not sub:
        return False
    touched = False
    for sw in track.switches:
        a = [b for b in sw.side_a if b in sub]
        b_ = [b for b in sw.side_b if b in sub]
        if a or b_:
            touched = True
            if len(a) != 1 or len(b_) != 1:
                return False
    return touched


def carried_intersection(track, subtrack_branches, weights):
    """Half the measure of the off-subtrack branches meeting the subtrack.

    The subtrack must carry a simple closed curve; each off-subtrack branch
    incident to a switch of the subtrack is counted once.
    """
    sub = set(subtrack_branches)
    unknown = sub - set(track.branches)
    if unknown:
        raise UnknownBranchError(f"unknown branches in subtrack: {sorted(unknown)}")
    if not subtrack_carries_loop(track, sub):
        raise NotLoopCarrierError("subtrack does not carry a simple closed curve")
    if not validate_measure(track, weights):
        raise TrainTrackError("measure violates a switch condition")
    sub_switches = set()
    for i, sw in enumerate(track.switches):
        if any(b in sub for b in sw.ends()):
            sub_switches.add(i)
    j_branches = set()
    for i in sub_switches:
        for b in track.switches[i].ends():
            if b not in sub:
                j_branches.add(b)
    total = sum(weights[b] for b in j_branches)
    if _is_exact(total):
        return Fraction(total, 2) if isinstance(total, int) else total / 2
    return total / 2.0


def branch_convergence_check(track, measures, limit, excluded=(), tol=1e-6, tail=10):
    """Per-branch tail convergence of a sequence of measures.

    Branches in ``excluded`` are ignored (they stand for the carriers of the
    weight-pi part, whose weights may oscillate without affecting the
    quotient limit).  Returns a report dict with per-branch verdicts.
    """
    excluded = set(excluded)
    for m in measures:
        if not validate_measure(track, m):
            raise TrainTrackError("sequence contains an unbalanced measure")
    if not validate_measure(track, limit):
        raise TrainTrackError("limit measure is unbalanced")
    window = measures[-tail:] if len(measures) > tail else measures
    branches = {}
    for b in track.branches:
        if b in excluded:
            branches[b] = {"checked": False}
            continue
        gaps = [abs(float(m[b]) - float(limit[b])) for m in window]
        branches[b] = {
            "checked": True,
            "converges": all(g <= tol for g in gaps),
            "max_tail_gap": max(gaps),
        }
    checked = [v for v in branches.values() if v["checked"]]
    return {
        "branches": branches,
        "converges": all(v["converges"] for v in checked),
        "tol": tol,
        "tail": len(window),
    }
