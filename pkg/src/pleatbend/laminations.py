"""Finite weighted geodesic laminations in the hyperbolic plane.

A lamination is a finite set of pairwise disjoint complete geodesics of the
z = 0 slice, each carrying a positive weight.  Transverse arcs pick up the
atomic measure: the mass of an arc is the sum of the weights it crosses.
Disjointness is decided combinatorially from the ideal endpoint angles
(two chords of the circle cross iff their endpoint pairs interleave).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import defaults, minkowski as mk

TWO_PI = 2.0 * math.pi


class LaminationError(Exception):
    pass


class TransversalityError(LaminationError):
    """Arc endpoint on a leaf, or a near-tangential crossing."""


class NotHomotopicError(LaminationError):
    pass


class BoundaryError(LaminationError):
    """Point lies on a leaf, so it belongs to no complement component."""


@dataclass(frozen=True)
class Leaf:
    id: str
    theta1: float
    theta2: float
    weight: float
    geodesic: mk.Geodesic = field(init=False, compare=False, repr=False)
    normal: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not self.weight > 0.0:
            raise LaminationError(f"leaf {self.id}: weight must be positive")
        g = mk.geodesic_from_angles(self.theta1, self.theta2)
        object.__setattr__(self, "geodesic", g)
        object.__setattr__(self, "normal", mk.leaf_normal(g))


def _angles_interleave(a, b):
    """True iff the chords with endpoint angle pairs a and b cross."""
    a1, a2 = sorted((a[0] % TWO_PI, a[1] % TWO_PI))
    inside = sum(1 for t in b if a1 < (t % TWO_PI) < a2)
    return inside == 1


def _angles_touch(a, b, tol=1e-9):
    for s in a:
        for t in b:
            d = abs((s - t) % TWO_PI)
            if min(d, TWO_PI - d) < tol:
                return True
    return False


@dataclass(frozen=True)
class FiniteLamination:
    leaves: tuple

    def __post_init__(self):
        leaves = tuple(self.leaves)
        ids = [lf.id for lf in leaves]
        if len(set(ids)) != len(ids):
            raise LaminationError("duplicate leaf ids")
        for i, a in enumerate(leaves):
            for b in leaves[i + 1 :]:
                pa = (a.theta1, a.theta2)
                pb = (b.theta1, b.theta2)
                if _angles_touch(pa, pb):
                    raise LaminationError(f"leaves {a.id} and {b.id} share an endpoint")
                if _angles_interleave(pa, pb):
                    raise LaminationError(f"leaves {a.id} and {b.id} cross")
        object.__setattr__(self, "leaves", leaves)

    def __len__(self):
        return len(self.leaves)

    def leaf(self, leaf_id):
        for lf in self.leaves:
            if lf.id == leaf_id:
                return lf
        raise KeyError(leaf_id)

    def weights(self):
        return {lf.id: lf.weight for lf in self.leaves}


@dataclass(frozen=True)
class Arc:
    """Geodesic segment between two points of the z = 0 slice."""

    p1: np.ndarray
    p2: np.ndarray

    def __post_init__(self):
        p1 = mk.make_point(self.p1)
        p2 = mk.make_point(self.p2)
        if abs(p1[3]) > 1e-9 or abs(p2[3]) > 1e-9:
            raise LaminationError("arc endpoints must lie in the z = 0 slice")
        # arccosh cannot resolve distances below ~sqrt(eps); 1e-7 is the
        # smallest reliably detectable separation
        if mk.hyp_dist(p1, p2) < 1e-7:
            raise LaminationError("arc endpoints coincide")
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)

    @property
    def length(self):
        return mk.hyp_dist(self.p1, self.p2)

    def point(self, t):
        return mk.segment_point(self.p1, self.p2, t)

    def direction(self, t):
        return mk.tangent_toward(self.point(t), self.p2)


def _crossing_parameter(arc, leaf):
    """Parameter in (0, 1) where the arc crosses the leaf, or None.

    Solves <gamma(t), u> = 0 in closed form for the segment parametrized by
    sinh-interpolation.
    """
    u = leaf.normal
    a = mk.mink_inner(arc.p1, u)
    b = mk.mink_inner(arc.p2, u)
    if abs(a) <= defaults.SIDE_TOL or abs(b) <= defaults.SIDE_TOL:
        raise TransversalityError(
            f"arc endpoint lies on leaf {leaf.id} (inner products {a}, {b})"
        )
    if (a > 0) == (b > 0):
        return None
    d = arc.length
    # a sinh((1-t) d) + b sinh(t d) = 0  =>  tanh(t d) = -a sinh d / (b - a cosh d)
    x = -a * math.sinh(d) / (b - a * math.cosh(d))
    t = math.atanh(x) / d
    return min(max(t, 0.0), 1.0)


def crossings(arc, lamination):
    """Ordered (leaf id, parameter) crossings of the arc with the lamination.

    Raises TransversalityError when an endpoint sits on a leaf or a crossing
    is closer than TRANSVERSALITY_TOL to tangential.
    """
    out = []
    for leaf in lamination.leaves:
        t = _crossing_parameter(arc, leaf)
        if t is None:
            continue
        tang = arc.direction(t)
        sin_angle = abs(mk.mink_inner(tang, leaf.normal))
        if sin_angle < defaults.TRANSVERSALITY_TOL:
            raise TransversalityError(
                f"near-tangential crossing with leaf {leaf.id} (sin = {sin_angle})"
            )
        out.append((leaf.id, t))
    out.sort(key=lambda pair: pair[1])
    return out


def arc_measure(arc, lamination):
    """Atomic transverse measure: sum of the weights of crossed leaves."""
    w = lamination.weights()
    return sum(w[leaf_id] for leaf_id, _ in crossings(arc, lamination))


def homotopic_measure_invariance_check(arc_a, arc_b, lamination):
    """Equal measures for arcs crossing the same leaves.

    Two arcs crossing exactly the same leaf-id set are the finite-scale
    stand-in for arcs related by a homotopy respecting the support; their
    measures then agree exactly (same atoms).
    """
    ids_a = {leaf_id for leaf_id, _ in crossings(arc_a, lamination)}
    ids_b = {leaf_id for leaf_id, _ in crossings(arc_b, lamination)}
    if ids_a != ids_b:
        raise NotHomotopicError(
            f"crossing sets differ: {sorted(ids_a)} vs {sorted(ids_b)}"
        )
    return arc_measure(arc_a, lamination) == arc_measure(arc_b, lamination)


@dataclass
class ComplementTree:
    """Components of the complement of a lamination, as a tree.

    Nodes are frozen sign vectors (one sign per leaf id); edges are leaves.
    Disjoint complete geodesics always separate, so there are exactly
    len(leaves) + 1 nodes.
    """

    lamination: FiniteLamination
    nodes: list
    edges: dict  # leaf id -> (node, node)
    _index: dict = field(default_factory=dict)

    def __post_init__(self):
        self._index = {sig: i for i, sig in enumerate(self.nodes)}

    def node_count(self):
        return len(self.nodes)

    def signature_of(self, point):
        sig = []
        for leaf in self.lamination.leaves:
            s = mk.side_of(point, leaf.normal)
            if s == 0:
                raise BoundaryError(f"point lies on leaf {leaf.id}")
            sig.append(s)
        return tuple(sig)

    def locate(self, point):
        """Index of the component containing the point."""
        sig = self.signature_of(point)
        try:
            return self._index[sig]
        except KeyError:
            raise LaminationError(f"unrealizable sign vector {sig}") from None

    def neighbors(self, node_index):
        out = []
        for leaf_id, (a, b) in self.edges.items():
            if a == node_index:
                out.append((leaf_id, b))
            elif b == node_index:
                out.append((leaf_id, a))
        return out


def complement_components(lamination):
    """Build the component tree of the complement of the lamination."""
    leaves = lamination.leaves
    samples = [mk.BASEPOINT]
    side_points = {}
    for leaf in leaves:
        base = leaf.geodesic.point(0.0)
        offset = 1e-3
        while True:
            plus = mk.exp_map(base, leaf.normal, offset)
            minus = mk.exp_map(base, leaf.normal, -offset)
            ok = True
            for other in leaves:
                if other.id == leaf.id:
                    continue
                if mk.side_of(plus, other.normal) != mk.side_of(minus, other.normal):
                    ok = False
                    break
            if ok and mk.side_of(plus, leaf.normal) == 1 and mk.side_of(minus, leaf.normal) == -1:
                break
            offset /= 4.0
            if offset < 1e-12:
                raise LaminationError(f"cannot separate sides of leaf {leaf.id}")
        side_points[leaf.id] = (plus, minus)
        samples.extend((plus, minus))

    def signature(point):
        sig = []
        for leaf in leaves:
            s = mk.side_of(point, leaf.normal)
            if s == 0:
                # the basepoint may sit on a leaf; nudge it off
                raise BoundaryError(f"sample point lies on leaf {leaf.id}")
            sig.append(s)
        return tuple(sig)

    nodes = []
    seen = set()
    for p in samples:
        try:
            sig = signature(p)
        except BoundaryError:
            continue
        if sig not in seen:
            seen.add(sig)
            nodes.append(sig)
    index = {sig: i for i, sig in enumerate(nodes)}

    edges = {}
    for leaf in leaves:
        plus, minus = side_points[leaf.id]
        edges[leaf.id] = (index[signature(plus)], index[signature(minus)])

    tree = ComplementTree(lamination, nodes, edges)
    if tree.node_count() != len(leaves) + 1:
        raise LaminationError(
            f"expected {len(leaves) + 1} components, found {tree.node_count()}"
        )
    return tree


def ideal_arcs(tree):
    """Ideal boundary of each complement component, as circle arcs.

    Returns a dict mapping node index to a list of (start, end) angle pairs
    with end > start (end may exceed 2*pi for arcs through angle zero).
    Every component is the hyperbolic convex hull of its arcs, so a linear
    functional attains its supremum over the component on them.
    """
    leaves = tree.lamination.leaves
    cuts = sorted({lf.theta1 for lf in leaves} | {lf.theta2 for lf in leaves})
    if not cuts:
        return {0: [(0.0, 2.0 * math.pi)]}
    out = {i: [] for i in range(tree.node_count())}
    for a, b in zip(cuts, cuts[1:] + [cuts[0] + 2.0 * math.pi]):
        mid = 0.5 * (a + b)
        point = np.array([1.0, math.cos(mid), math.sin(mid), 0.0])
        sig = tuple(
            1 if mk.mink_inner(point, lf.normal) > 0.0 else -1 for lf in leaves
        )
        out[tree._index[sig]].append((a, b))
    return out


def _leaf_window_samples(leaf, radius, spacing):
    """Points of the leaf inside the ball around the basepoint."""
    n = leaf.geodesic.span_normalizer
    reach = n * math.cosh(radius) / 2.0
    if reach < 1.0:
        return np.empty((0, 4))
    s_max = math.acosh(reach)
    count = max(2, int(math.ceil(2.0 * s_max / spacing)) + 1)
    ss = np.linspace(-s_max, s_max, count)
    pts = (np.exp(ss)[:, None] * leaf.geodesic.e1[None, :] + np.exp(-ss)[:, None] * leaf.geodesic.e2[None, :]) / n
    return pts


def _support_samples(lamination, radius, spacing):
    parts = [_leaf_window_samples(leaf, radius, spacing) for leaf in lamination.leaves]
    parts = [p for p in parts if len(p)]
    if not parts:
        return np.empty((0, 4))
    return np.vstack(parts)


def _directed_hausdorff(a, b):
    # cosh of pairwise distances via the Minkowski Gram matrix
    gram = -(a * mk.J_DIAG[None, :]) @ b.T
    np.clip(gram, 1.0, None, out=gram)
    nearest = np.arccosh(gram.min(axis=1))
    return float(nearest.max())


def windowed_hausdorff(lam_a, lam_b, radius=defaults.WINDOW_RADIUS):
    """Hausdorff distance between the supports inside B(basepoint, radius).

    Returns 0 when both windowed supports are empty and +inf when exactly
    one is.  Sampling-based: leaf spacing 1e-3 * radius.
    """
    if radius <= 0.0:
        raise LaminationError("window radius must be positive")
    spacing = 1e-3 * radius
    a = _support_samples(lam_a, radius, spacing)
    b = _support_samples(lam_b, radius, spacing)
    if len(a) == 0 and len(b) == 0:
        return 0.0
    if len(a) == 0 or len(b) == 0:
        return math.inf
    return max(_directed_hausdorff(a, b), _directed_hausdorff(b, a))


def point_to_support_distance(point, lamination, radius=defaults.WINDOW_RADIUS):
    """Distance from a point to the windowed support of a lamination."""
    samples = _support_samples(lamination, radius, 1e-3 * radius)
    if len(samples) == 0:
        return math.inf
    vals = -(samples * mk.J_DIAG[None, :]) @ np.asarray(point, float)
    return float(np.arccosh(max(1.0, vals.min())))
