"""Pleated surfaces: bending the hyperbolic plane along a finite lamination.

The construction is a folding cocycle over the complement tree: the base
component maps by the identity, and crossing a leaf composes with a rotation
about that leaf by the leaf's weight (signed by the crossing direction and
the chosen bending side).  Because the complement components of disjoint
complete geodesics form a tree, the assignment is well defined, and the two
components adjacent to a leaf agree on it pointwise.

Support planes, the convex / even predicates, the exact bending measure of
transverse arcs, and angle-sum approximations with controlled plane angles
and sample spacing all live here.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import defaults, minkowski as mk
from . import laminations as lam


class PleatingError(Exception):
    pass


class OutOfRegimeError(PleatingError):
    pass


@dataclass(frozen=True)
class BendingData:
    """A finite lamination with weights in (0, pi] and a bending side."""

    lamination: lam.FiniteLamination
    side: int = 1

    def __post_init__(self):
        if self.side not in (1, -1):
            raise PleatingError("side must be +1 or -1")
        for leaf in self.lamination.leaves:
            if not 0.0 < leaf.weight <= math.pi + 1e-12:
                raise PleatingError(
                    f"leaf {leaf.id}: weight {leaf.weight} outside (0, pi]"
                )


class PleatedSurface:
    """Bent image of the z = 0 plane, one isometry per complement component."""

    def __init__(self, data):
        self.data = data
        self.lamination = data.lamination
        self.side = data.side
        self.tree = lam.complement_components(self.lamination)
        base = mk.BASEPOINT
        for leaf in self.lamination.leaves:
            # the basepoint may sit on a leaf; anchor on its positive side
            if mk.side_of(base, leaf.normal) == 0:
                base = mk.exp_map(base, leaf.normal, 1e-4)
        self.base_anchor = base
        self.base_node = self.tree.locate(base)
        self.base_normal = self.side * mk.E_Z
        self.component_maps = self._fold()
        self._interior_cache = {}
        self._normal_matrix = (
            np.array([leaf.normal for leaf in self.lamination.leaves])
            if len(self.lamination)
            else np.zeros((0, 4))
        )

    def _fold(self):
        maps = {self.base_node: np.eye(4)}
        pending = [self.base_node]
        while pending:
            node = pending.pop()
            sig = self.tree.nodes[node]
            for leaf_id, other in self.tree.neighbors(node):
                if other in maps:
                    continue
                leaf = self.lamination.leaf(leaf_id)
                pos = [lf.id for lf in self.lamination.leaves].index(leaf_id)
                from_side = sig[pos]
                angle = self.side * from_side * leaf.weight
                maps[other] = maps[node] @ mk.rotation_about_geodesic(leaf.geodesic, angle)
                pending.append(other)
        return maps

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, point):
        """Image of a point of the z = 0 plane under the pleated map.

        Points on a leaf are evaluated through either adjacent component;
        the two images agree because the rotation fixes the leaf.
        """
        try:
            node = self.tree.locate(point)
        except lam.BoundaryError:
            node = self._node_near(point)
        return mk.apply_point(self.component_maps[node], point)

    def _node_near(self, point):
        # nudge a leaf point off the leaf; both sides give the same image
        for leaf in self.lamination.leaves:
            if mk.side_of(point, leaf.normal) == 0:
                q = mk.exp_map(point, leaf.normal, 1e-7)
                return self.tree.locate(q)
        raise lam.BoundaryError("point not on any leaf")

    def flat_plane(self, node):
        """Co-oriented support plane of one flat (component image)."""
        return mk.apply_plane(self.component_maps[node], self.base_normal)

    def _signature_rows(self, points):
        """Vectorized sign vectors; rows touching a leaf are marked invalid."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        inner = (P * mk.J_DIAG) @ self._normal_matrix.T
        signs = np.where(
            inner > defaults.SIDE_TOL, 1, np.where(inner < -defaults.SIDE_TOL, -1, 0)
        )
        valid = ~(signs == 0).any(axis=1)
        return signs, valid

    def interior_samples(self, node, count=20, radius=4.0):
        """Sample points of a component, found by bucketed disk sampling."""
        key = (node, count, radius)
        if key in self._interior_cache:
            return self._interior_cache[key]
        sig = np.array(self.tree.nodes[node], dtype=int)

        def matching(arr):
            if len(arr) == 0:
                return arr
            signs, valid = self._signature_rows(arr)
            return arr[valid & (signs == sig).all(axis=1)]

        out = []
        # seed with points adjacent to the component's boundary leaves
        seed_blocks = []
        ds = np.array([1e-3, 0.05, 0.3])
        for leaf_id, (a, b) in self.tree.edges.items():
            if node not in (a, b):
                continue
            leaf = self.lamination.leaf(leaf_id)
            pts = np.array([leaf.geodesic.point(s) for s in (-1.0, 0.0, 1.0)])
            signed = ds if a == node else -ds
            block = (
                np.cosh(signed)[:, None, None] * pts[None, :, :]
                + np.sinh(signed)[:, None, None] * leaf.normal[None, None, :]
            )
            seed_blocks.append(block.reshape(-1, 4))
        if seed_blocks:
            out.extend(matching(np.vstack(seed_blocks)))

        rng = np.random.default_rng(20240 + node)
        batch = max(4 * count, 64)
        tries = 0
        while len(out) < count and tries < 4000:
            tries += batch
            r = radius * np.sqrt(rng.uniform(size=batch))
            phi = rng.uniform(0.0, 2.0 * math.pi, size=batch)
            arr = np.stack(
                [np.cosh(r), np.sinh(r) * np.cos(phi), np.sinh(r) * np.sin(phi), np.zeros(batch)],
                axis=1,
            )
            out.extend(matching(arr))
        if not out:
            raise PleatingError(f"no interior samples found for component {node}")
        self._interior_cache[key] = list(out[:count]) if len(out) > count else list(out)
        return self._interior_cache[key]

    # -- support planes -----------------------------------------------------

    def support_planes_at(self, point, steps=None):
        """Support plane(s) at a point: one for interior points, a pencil
        over [0, w] at a point of a leaf of weight w.

        Returns a list of (parameter, plane) pairs; interior points give a
        single pair with parameter 0.
        """
        convex, cert = self.is_convex()
        if not convex:
            raise PleatingError(f"surface is not convex: {cert}")
        try:
            node = self.tree.locate(point)
            return [(0.0, self.flat_plane(node))]
        except lam.BoundaryError:
            pass
        for leaf in self.lamination.leaves:
            if mk.side_of(point, leaf.normal) == 0:
                return self.leaf_pencil(leaf, steps=steps)
        raise PleatingError("unreachable: boundary point not on any leaf")

    def leaf_pencil(self, leaf, steps=None, from_node=None):
        """Ordered support planes through the image of a leaf.

        Parameters run over [0, w]; the endpoints are the support planes of
        the two adjacent flats, starting at the plane of ``from_node`` (the
        node closer to the base when unspecified).
        """
        a, b = self.tree.edges[leaf.id]
        if from_node is None:
            from_node = a if self._depth(a) <= self._depth(b) else b
        elif from_node not in (a, b):
            raise PleatingError(f"component {from_node} is not adjacent to leaf {leaf.id}")
        sig = self.tree.nodes[from_node]
        pos = [lf.id for lf in self.lamination.leaves].index(leaf.id)
        from_side = sig[pos]
        g_from = self.component_maps[from_node]
        if steps is None:
            ts = np.linspace(0.0, leaf.weight, 5)
        else:
            ts = np.linspace(0.0, leaf.weight, max(2, steps))
        out = []
        for t in ts:
            rot = mk.rotation_about_geodesic(leaf.geodesic, self.side * from_side * float(t))
            out.append((float(t), mk.apply_plane(g_from @ rot, self.base_normal)))
        return out

    def _depth(self, node):
        if not hasattr(self, "_depths"):
            depths = {self.base_node: 0}
            pending = [self.base_node]
            while pending:
                cur = pending.pop()
                for _, other in self.tree.neighbors(cur):
                    if other not in depths:
                        depths[other] = depths[cur] + 1
                        pending.append(other)
            self._depths = depths
        return self._depths[node]

    # -- convexity ----------------------------------------------------------

    def is_convex(self, samples_per_flat=12, margin=1e-4):
        """One-sidedness of every flat plus a nonempty-interior witness.

        Returns (True, witness point) or (False, certificate), where the
        certificate names the violated pair of components or reports that no
        interior point was found.

        One-sidedness is decided exactly: each bent component is the convex
        hull of its ideal boundary arcs, and against a fixed plane the inner
        product along an arc is a sinusoid in the ideal angle, so its
        supremum over the component has a closed form.  ``samples_per_flat``
        is kept for call compatibility but no sampling is involved.
        """
        if getattr(self, "_convex_cache", None) is not None:
            return self._convex_cache
        nodes = list(self.component_maps)
        planes = {n: self.flat_plane(n) for n in nodes}
        arcs_by_node = lam.ideal_arcs(self.tree)
        plane_rows = (np.array([planes[m] for m in nodes]) * mk.J_DIAG)
        worst, worst_pair = -math.inf, None
        two_pi = 2.0 * math.pi
        for n in nodes:
            # row m encodes theta -> <M_n l(theta), u_m> = w0 + w1 cos + w2 sin
            W = plane_rows @ self.component_maps[n]
            w0, w1, w2 = W[:, 0], W[:, 1], W[:, 2]
            amp = np.hypot(w1, w2)
            phase = np.arctan2(w2, w1)
            tol = defaults.SUPPORT_TOL * (1.0 + np.abs(w0) + amp)
            for a, b in arcs_by_node[n]:
                shifted = phase + two_pi * np.floor((b - phase) / two_pi)
                in_arc = (a <= shifted) & (shifted <= b)
                ends = np.maximum(np.cos(a - phase), np.cos(b - phase))
                top = w0 + amp * np.where(in_arc, 1.0, ends)
                top[nodes.index(n)] = -np.inf
                over = top - tol
                m = int(np.argmax(over))
                if over[m] > 0.0 and top[m] > worst:
                    worst, worst_pair = float(top[m]), (nodes[m], n)
        if worst_pair is not None:
            self._convex_cache = (
                False,
                {"violated_pair": worst_pair, "excess": worst},
            )
            return self._convex_cache
        witness = self._interior_witness(planes, margin)
        if witness is None:
            self._convex_cache = (False, {"violated_pair": None, "empty_interior": True})
        else:
            self._convex_cache = (True, {"witness": witness})
        return self._convex_cache

    def _interior_witness(self, planes, margin):
        plane_rows = np.array(list(planes.values()))
        ds = np.linspace(0.0, 3.0, 61)

        def probe(x0, direction):
            # project onto the tangent space at x0 and walk the geodesic ray
            tang = direction + mk.mink_inner(x0, direction) * x0
            norm = mk.mink_inner(tang, tang)
            if norm < 1e-18:
                return None
            tang = tang / math.sqrt(norm)
            qs = np.cosh(ds)[:, None] * x0 + np.sinh(ds)[:, None] * tang
            inner = (qs * mk.J_DIAG) @ plane_rows.T
            hits = np.nonzero((inner <= -margin).all(axis=1))[0]
            return qs[hits[0]] if len(hits) else None

        # global ray: average inward normal from the base anchor
        found = probe(self.base_anchor, -plane_rows.mean(axis=0))
        if found is not None:
            return found
        # thin wedges: walk inward from each fold line along the bisector of
        # the two adjacent support planes
        for leaf_id, (a, b) in self.tree.edges.items():
            leaf = self.lamination.leaf(leaf_id)
            # image of a fold-line point (the adjacent maps agree on it)
            p = mk.normalize_point(self.component_maps[a] @ leaf.geodesic.point(0.0))
            bisector = -(planes[a] + planes[b])
            found = probe(p, bisector)
            if found is not None:
                return found
        return None

    def is_even(self, tol=defaults.SUPPORT_TOL):
        """Folded flat: one-sided with all flat images in the base plane.

        The empty lamination is classified convex-degenerate, not even.
        """
        if len(self.lamination) == 0:
            return False
        residual = self.flat_image_residual()
        if residual > tol:
            return False
        # one-sidedness still has to hold (it does for planar images, but a
        # certificate is cheap to confirm)
        nodes = list(self.component_maps)
        planes = {n: self.flat_plane(n) for n in nodes}
        for p_node in nodes:
            u = planes[p_node]
            for q_node in nodes:
                for pt in self.interior_samples(q_node, count=6):
                    img = mk.apply_point(self.component_maps[q_node], pt)
                    if mk.mink_inner(img, u) > defaults.SUPPORT_TOL:
                        return False
        return True

    def flat_image_residual(self, samples_per_flat=10):
        """Max distance of flat-image samples from the base plane."""
        worst = 0.0
        for node in self.component_maps:
            for p in self.interior_samples(node, count=samples_per_flat):
                img = mk.apply_point(self.component_maps[node], p)
                worst = max(worst, abs(mk.mink_inner(img, self.base_normal)))
        return worst


def build_pleated(data):
    """Construct the pleated surface for the given bending data."""
    return PleatedSurface(data)


# -- bending measure and approximations ------------------------------------


def bending_measure(surface, arc):
    """Exact bending measure of a transverse arc: the crossed-weight sum.

    For finite laminations the infimum over polygonal approximations is
    attained by the atomic value; angle-sum reports serve as an independent
    consistency check.
    """
    return lam.arc_measure(arc, surface.lamination)


@dataclass(frozen=True)
class ApproxEntry:
    t: float  # parameter along the arc
    point: np.ndarray  # point of the z = 0 plane
    plane: np.ndarray  # support plane at the image


@dataclass
class PolygonalApproximation:
    arc: lam.Arc
    entries: list
    delta: float
    epsilon: float

    def __len__(self):
        return len(self.entries)

    def angles(self):
        out = []
        for a, b in zip(self.entries, self.entries[1:]):
            out.append(mk.plane_angle(a.plane, b.plane))
        return out

    def angle_sum(self):
        return float(sum(self.angles()))

    def max_angle(self):
        angles = self.angles()
        return max(angles) if angles else 0.0

    def max_spacing(self, surface=None):
        worst = 0.0
        for a, b in zip(self.entries, self.entries[1:]):
            worst = max(worst, mk.hyp_dist(a.point, b.point))
        return worst

    def length_bound(self):
        l = self.arc.length
        return (4.0 / self.epsilon) * (math.pi / self.delta + 1.0) * l + 4.0 * (
            math.pi / self.delta + 1.0
        )


def _sample_parameters(arc, lamination, epsilon):
    """Sample parameters off the leaves with spacing < epsilon.

    Uses p = floor(l / eps) interior points, so p <= l / eps and the spacing
    l / (p + 1) stays strictly below epsilon.
    """
    l = arc.length
    p = int(math.floor(l / epsilon))
    ts = list(np.linspace(0.0, 1.0, p + 2))
    cross = lam.crossings(arc, lamination)
    cross_ts = [t for _, t in cross]
    gap = 1.0 / (p + 1)

    def off_leaves(t):
        if not all(abs(t - ct) * l > 1e-4 for ct in cross_ts):
            return False
        try:
            for leaf in lamination.leaves:
                if mk.side_of(arc.point(t), leaf.normal) == 0:
                    return False
        except lam.BoundaryError:
            return False
        return True

    out = []
    for t in ts:
        shift = 0.0
        while not off_leaves(t + shift) and shift < 0.4 * gap:
            shift += 2e-4 / max(l, 1e-6)
        out.append(min(max(t + shift, 0.0), 1.0))
    return out, cross


def polygonal_approximation(surface, arc, delta, epsilon):
    """Build an angle- and spacing-controlled family of support planes.

    Sample points with spacing < epsilon get their flat's support plane.
    A gap between consecutive samples whose two flat planes already make a
    valid pair with angle < delta (they intersect, and the fold sits over
    the subarc) is kept as is; otherwise every crossed leaf in the gap
    contributes its ordered pencil at the crossing point, subdivided into
    floor(w / delta) + 1 steps so each consecutive angle stays strictly
    below delta.  All five definitional constraints hold by construction
    and are re-checked by ``validate_approximation``.
    """
    if not 0.0 < epsilon < defaults.EPSILON_MAX:
        raise PleatingError(
            f"epsilon must lie in (0, log(3)/2 ~ {defaults.EPSILON_MAX:.4f}); got {epsilon}"
        )
    if delta <= 0.0:
        raise PleatingError("delta must be positive")
    ts, cross = _sample_parameters(arc, surface.lamination, epsilon)

    sample_nodes = [surface.tree.locate(arc.point(t)) for t in ts]
    entries = [ApproxEntry(ts[0], arc.point(ts[0]), surface.flat_plane(sample_nodes[0]))]
    for i in range(len(ts) - 1):
        t_lo, t_hi = ts[i], ts[i + 1]
        node_lo, node_hi = sample_nodes[i], sample_nodes[i + 1]
        gap_cross = [(leaf_id, t) for leaf_id, t in cross if t_lo < t < t_hi]
        plane_lo = surface.flat_plane(node_lo)
        plane_hi = surface.flat_plane(node_hi)
        direct_ok = False
        if gap_cross and mk.planes_intersect(plane_lo, plane_hi):
            theta = mk.plane_angle(plane_lo, plane_hi)
            direct_ok = theta < delta * (1.0 - 1e-12)
        if not gap_cross or direct_ok:
            entries.append(ApproxEntry(t_hi, arc.point(t_hi), plane_hi))
            continue
        current = node_lo
        for leaf_id, t in gap_cross:
            leaf = surface.lamination.leaf(leaf_id)
            nsteps = int(math.floor(leaf.weight / delta + 1e-9)) + 1
            pencil = surface.leaf_pencil(leaf, steps=nsteps + 1, from_node=current)
            point = arc.point(t)
            for _, plane in pencil:
                entries.append(ApproxEntry(t, point, plane))
            a, b = surface.tree.edges[leaf_id]
            current = b if current == a else a
        entries.append(ApproxEntry(t_hi, arc.point(t_hi), plane_hi))
    return PolygonalApproximation(arc, entries, delta, epsilon)


def validate_approximation(surface, approx, support_samples=20):
    """Check the five definitional constraints plus the angle/spacing/length
    bounds; returns a dict of verdicts.
    """
    entries = approx.entries
    ordered = all(a.t <= b.t + 1e-12 for a, b in zip(entries, entries[1:]))

    flats = []
    for node in surface.component_maps:
        pts = surface.interior_samples(node, count=support_samples)
        flats.extend(mk.apply_point(surface.component_maps[node], p) for p in pts)
    support_ok = True
    for e in entries:
        for img in flats:
            if mk.mink_inner(img, e.plane) > defaults.SUPPORT_TOL:
                support_ok = False
                break
        if not support_ok:
            break

    consecutive_intersect = all(
        mk.planes_intersect(a.plane, b.plane) for a, b in zip(entries, entries[1:])
    )

    # pencil ordering at repeated points: angles from the first plane of the
    # repeated block must be monotone
    pencil_ordered = True
    i = 0
    while i < len(entries):
        j = i
        while j + 1 < len(entries) and abs(entries[j + 1].t - entries[i].t) < 1e-12:
            j += 1
        if j > i + 1:
            base = entries[i].plane
            angles = [mk.plane_angle(base, entries[k].plane) for k in range(i, j + 1)]
            if any(b < a - 1e-9 for a, b in zip(angles, angles[1:])):
                pencil_ordered = False
        i = j + 1

    projection_ok = _projection_condition(surface, approx)

    angles = approx.angles()
    max_angle = max(angles) if angles else 0.0
    max_spacing = approx.max_spacing()
    return {
        "ordered": ordered,
        "support": support_ok,
        "consecutive_intersect": consecutive_intersect,
        "pencil_ordered": pencil_ordered,
        "projection": projection_ok,
        "max_angle_ok": max_angle < approx.delta,
        "max_spacing_ok": max_spacing < approx.epsilon,
        "length_ok": len(approx) <= approx.length_bound(),
        "max_angle": max_angle,
        "max_spacing": max_spacing,
        "length": len(approx),
        "length_bound": approx.length_bound(),
    }


def _projection_condition(surface, approx):
    """The fold between consecutive planes must sit over the subarc.

    For pairs of distinct planes, the crossed-leaf images between the two
    parameters must realize the turn: the crossing parameters of all leaves
    separating the two supporting components lie inside [t_i, t_{i+1}].
    Identical planes and same-point pencil pairs hold trivially.
    """
    entries = approx.entries
    cross = lam.crossings(approx.arc, surface.lamination)
    for a, b in zip(entries, entries[1:]):
        if np.linalg.norm(a.plane - b.plane) < 1e-9:
            continue
        if abs(a.t - b.t) < 1e-12:
            continue  # pencil at one point: the fold passes through it
        lo, hi = min(a.t, b.t), max(a.t, b.t)
        inside = [t for _, t in cross if lo - 1e-9 <= t <= hi + 1e-9]
        if not inside:
            return False
    return True


@dataclass
class ApproxReport:
    angle_sum: float
    exact_measure: float
    error: float
    length: int
    bound: float
    alpha: float
    spacing: float
    arc_length: float

    @property
    def error_ratio(self):
        """error / (alpha * l(k)), the measured analogue of the universal
        approximation constant."""
        return self.error / (self.alpha * self.arc_length)

    def as_dict(self):
        return {
            "angle_sum": self.angle_sum,
            "exact_measure": self.exact_measure,
            "error": self.error,
            "length": self.length,
            "bound": self.bound,
            "alpha": self.alpha,
            "spacing": self.spacing,
            "arc_length": self.arc_length,
            "error_ratio": self.error_ratio,
        }


def approx_report(surface, arc, alpha, spacing=defaults.S_DEFAULT):
    """Angle-sum report for an (alpha, s)-controlled approximation."""
    if not alpha < math.pi / 2.0:
        raise PleatingError(f"alpha must be < pi/2; got {alpha}")
    if not 0.0 < spacing < min(1.0, defaults.EPSILON_MAX):
        raise PleatingError(f"spacing must lie in (0, min(1, log(3)/2)); got {spacing}")
    approx = polygonal_approximation(surface, arc, alpha, spacing)
    angle_sum = approx.angle_sum()
    exact = bending_measure(surface, arc)
    return ApproxReport(
        angle_sum=angle_sum,
        exact_measure=exact,
        error=abs(angle_sum - exact),
        length=len(approx),
        bound=approx.length_bound(),
        alpha=alpha,
        spacing=spacing,
        arc_length=arc.length,
    )


def chord_comparison(surface, a, b):
    """Intrinsic vs chordal length of a bent segment, plus exterior angles.

    Requires a convex surface and bending measure below pi/2 along [a, b].
    """
    convex, cert = surface.is_convex()
    if not convex:
        raise PleatingError(f"surface is not convex: {cert}")
    arc = lam.Arc(a, b)
    total = bending_measure(surface, arc)
    if total >= math.pi / 2.0:
        raise OutOfRegimeError(
            f"bending measure {total} >= pi/2 along the segment"
        )
    cross = lam.crossings(arc, surface.lamination)
    params = [0.0] + [t for _, t in cross] + [1.0]
    verts = [surface.evaluate(arc.point(t)) for t in params]
    intrinsic = arc.length
    chord = mk.hyp_dist(verts[0], verts[-1])

    ext = 0.0
    for i in range(1, len(verts) - 1):
        t_in = mk.tangent_toward(verts[i], verts[i - 1])
        t_out = mk.tangent_toward(verts[i], verts[i + 1])
        # exterior angle between the continuation of the incoming piece and
        # the outgoing piece
        c = max(-1.0, min(1.0, -mk.mink_inner(t_in, t_out)))
        ext += math.acos(c)
    if len(verts) > 2:
        c0 = max(
            -1.0,
            min(1.0, mk.mink_inner(mk.tangent_toward(verts[0], verts[1]), mk.tangent_toward(verts[0], verts[-1]))),
        )
        c1 = max(
            -1.0,
            min(1.0, mk.mink_inner(mk.tangent_toward(verts[-1], verts[-2]), mk.tangent_toward(verts[-1], verts[0]))),
        )
        ext += math.acos(c0) + math.acos(c1)
    return intrinsic, chord, ext
