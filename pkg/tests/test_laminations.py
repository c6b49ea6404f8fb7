"""Finite laminations: leaves, crossings, measures, complement components."""

import math

import numpy as np
import pytest

from pleatbend import laminations as lam
from pleatbend import minkowski as mk

from conftest import random_arc, random_disjoint_lamination


def polar_point(r, phi):
    return np.array(
        [math.cosh(r), math.sinh(r) * math.cos(phi), math.sinh(r) * math.sin(phi), 0.0]
    )


# -- construction -----------------------------------------------------------


def test_leaf_requires_positive_weight():
    with pytest.raises(lam.LaminationError):
        lam.Leaf("a", 0.0, 1.0, 0.0)


def test_lamination_rejects_crossing_leaves():
    a = lam.Leaf("a", 0.0, math.pi, 1.0)
    b = lam.Leaf("b", math.pi / 2, 3 * math.pi / 2, 1.0)
    with pytest.raises(lam.LaminationError):
        lam.FiniteLamination((a, b))


def test_lamination_rejects_shared_endpoints():
    a = lam.Leaf("a", 0.0, 1.0, 1.0)
    b = lam.Leaf("b", 1.0, 2.0, 1.0)
    with pytest.raises(lam.LaminationError):
        lam.FiniteLamination((a, b))


def test_lamination_rejects_duplicate_ids():
    a = lam.Leaf("a", 0.0, 1.0, 1.0)
    b = lam.Leaf("a", 2.0, 3.0, 1.0)
    with pytest.raises(lam.LaminationError):
        lam.FiniteLamination((a, b))


def test_nested_leaves_allowed():
    outer = lam.Leaf("o", 0.1, 3.0, 1.0)
    inner = lam.Leaf("i", 0.5, 2.5, 1.0)
    assert len(lam.FiniteLamination((outer, inner))) == 2


def test_arc_endpoints_must_be_planar_and_distinct():
    off_plane = mk.exp_map(mk.BASEPOINT, mk.E_Z, 0.4)
    with pytest.raises(lam.LaminationError):
        lam.Arc(off_plane, polar_point(1.0, 0.0))
    with pytest.raises(lam.LaminationError):
        lam.Arc(polar_point(1.0, 0.0), polar_point(1.0, 0.0))


# -- crossings --------------------------------------------------------------


def scan_crossings(arc, lamination, steps=40000):
    """Sign-change scan oracle for the closed-form crossing parameters."""
    out = []
    ts = np.linspace(0.0, 1.0, steps + 1)
    points = np.array([arc.point(t) for t in ts])
    for leaf in lamination.leaves:
        vals = (points * mk.J_DIAG) @ leaf.normal
        flips = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
        for i in flips:
            # linear interpolation of the bracketed root
            t = ts[i] + (ts[i + 1] - ts[i]) * vals[i] / (vals[i] - vals[i + 1])
            out.append((leaf.id, t))
    return sorted(out, key=lambda x: x[1])


def test_crossings_match_sign_scan_oracle():
    rng = np.random.default_rng(101)
    for _ in range(15):
        lamination = random_disjoint_lamination(rng, max_leaves=8)
        arc = random_arc(rng, lamination)
        closed_form = sorted(lam.crossings(arc, lamination), key=lambda x: x[1])
        scanned = scan_crossings(arc, lamination)
        assert [i for i, _ in closed_form] == [i for i, _ in scanned]
        for (_, t1), (_, t2) in zip(closed_form, scanned):
            assert abs(t1 - t2) < 1e-6


def test_crossing_point_lies_on_leaf():
    lamination = lam.FiniteLamination((lam.Leaf("a", 0.5, math.pi + 0.5, 0.7),))
    arc = lam.Arc(polar_point(1.5, math.pi * 1.75), polar_point(1.5, math.pi * 0.75))
    ((leaf_id, t),) = lam.crossings(arc, lamination)
    assert leaf_id == "a"
    p = arc.point(t)
    assert abs(mk.mink_inner(p, lamination.leaf("a").normal)) < 1e-9


def test_transversality_error_on_grazing_arc():
    # arc running almost parallel to the leaf close to it
    lamination = lam.FiniteLamination((lam.Leaf("a", 0.0, math.pi, 1.0),))
    g = lamination.leaf("a").geodesic
    p1 = mk.exp_map(g.point(-1.0), mk.leaf_normal(g), 1e-9)
    p2 = mk.exp_map(g.point(1.0), mk.leaf_normal(g), -1e-9)
    with pytest.raises(lam.TransversalityError):
        lam.crossings(lam.Arc(p1, p2), lamination)


# -- measures ---------------------------------------------------------------


def test_arc_measure_is_crossed_weight_sum():
    lamination = lam.FiniteLamination(
        (lam.Leaf("a", 0.5, math.pi + 0.5, 0.7), lam.Leaf("b", 0.3, math.pi + 0.7, 1.1))
    )
    arc = lam.Arc(polar_point(1.5, math.pi * 1.75), polar_point(1.5, math.pi * 0.75))
    crossed = {i for i, _ in lam.crossings(arc, lamination)}
    assert lam.arc_measure(arc, lamination) == sum(
        lamination.leaf(i).weight for i in crossed
    )


def test_arc_measure_additive_under_splitting():
    rng = np.random.default_rng(7)
    for _ in range(10):
        lamination = random_disjoint_lamination(rng, max_leaves=6)
        arc = random_arc(rng, lamination)
        cross = sorted(t for _, t in lam.crossings(arc, lamination))
        # split at a parameter strictly between crossings
        candidates = [0.5] + [
            (a + b) / 2 for a, b in zip([0.0] + cross, cross + [1.0])
        ]
        t_split = next(t for t in candidates if all(abs(t - c) > 1e-3 for c in cross))
        mid = arc.point(t_split)
        try:
            left = lam.Arc(arc.p1, mid)
            right = lam.Arc(mid, arc.p2)
        except lam.LaminationError:
            continue
        total = lam.arc_measure(left, lamination) + lam.arc_measure(right, lamination)
        assert total == pytest.approx(lam.arc_measure(arc, lamination), abs=1e-12)


def test_homotopic_invariance_and_mismatch():
    lamination = lam.FiniteLamination((lam.Leaf("a", 0.5, math.pi + 0.5, 0.7),))
    arc1 = lam.Arc(polar_point(1.5, math.pi * 1.75), polar_point(1.5, math.pi * 0.75))
    arc2 = lam.Arc(polar_point(1.2, math.pi * 1.70), polar_point(1.7, math.pi * 0.80))
    assert lam.homotopic_measure_invariance_check(arc1, arc2, lamination)
    # an arc missing the leaf is not homotopic rel the lamination
    arc3 = lam.Arc(polar_point(0.5, math.pi * 1.60), polar_point(0.6, math.pi * 1.80))
    with pytest.raises(lam.NotHomotopicError):
        lam.homotopic_measure_invariance_check(arc1, arc3, lamination)


# -- complement components --------------------------------------------------


def test_complement_tree_node_count():
    rng = np.random.default_rng(23)
    for _ in range(10):
        lamination = random_disjoint_lamination(rng, max_leaves=10)
        tree = lam.complement_components(lamination)
        assert tree.node_count() == len(lamination) + 1


def test_complement_tree_locate_and_boundary():
    lamination = lam.FiniteLamination((lam.Leaf("a", 0.0, math.pi, 1.0),))
    tree = lam.complement_components(lamination)
    above = polar_point(0.5, math.pi / 2)
    below = polar_point(0.5, 3 * math.pi / 2)
    assert tree.locate(above) != tree.locate(below)
    with pytest.raises(lam.BoundaryError):
        tree.locate(lamination.leaf("a").geodesic.point(0.3))


def test_complement_tree_edges_form_tree():
    rng = np.random.default_rng(29)
    lamination = random_disjoint_lamination(rng, max_leaves=9)
    tree = lam.complement_components(lamination)
    # every leaf is an edge between two distinct components; a connected
    # graph with n nodes and n - 1 edges is a tree
    assert len(tree.edges) == tree.node_count() - 1
    seen = {0}
    frontier = [0]
    while frontier:
        n = frontier.pop()
        for _, other in tree.neighbors(n):
            if other not in seen:
                seen.add(other)
                frontier.append(other)
    assert seen == set(range(tree.node_count()))


# -- support distances ------------------------------------------------------


def test_windowed_hausdorff_identity_and_symmetry():
    rng = np.random.default_rng(31)
    a = random_disjoint_lamination(rng, max_leaves=5)
    # identity up to the arccosh resolution at the window boundary
    assert lam.windowed_hausdorff(a, a) < 1e-4
    b = random_disjoint_lamination(rng, max_leaves=5)
    d_ab = lam.windowed_hausdorff(a, b)
    d_ba = lam.windowed_hausdorff(b, a)
    if math.isinf(d_ab):
        assert math.isinf(d_ba)
    else:
        assert d_ab == pytest.approx(d_ba, abs=1e-4)


def test_windowed_hausdorff_small_perturbation():
    # rotating the ideal endpoints by eps moves window samples by at most
    # about eps * e^R; the distance must be positive but stay in that range
    a = lam.FiniteLamination((lam.Leaf("a", 0.0, math.pi, 1.0),))
    b = lam.FiniteLamination((lam.Leaf("a", 1e-4, math.pi + 1e-4, 1.0),))
    d = lam.windowed_hausdorff(a, b)
    assert 0.0 < d < 1e-4 * math.exp(5.0)


def test_point_to_support_distance_on_leaf_is_zero():
    lamination = lam.FiniteLamination((lam.Leaf("a", 0.0, math.pi, 1.0),))
    p = lamination.leaf("a").geodesic.point(0.4)
    assert lam.point_to_support_distance(p, lamination) < 1e-3
