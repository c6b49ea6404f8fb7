"""Shared corpus generators for the randomized test suites."""

import math

import numpy as np
import pytest

from pleatbend import laminations as lam
from pleatbend import surfaces as surf

TWO_PI = 2.0 * math.pi


def random_disjoint_lamination(
    rng, max_leaves=12, w_lo=0.05, w_hi=math.pi, min_gap=0.08, weight_cap=None
):
    """Random finite system of pairwise disjoint weighted chords.

    Endpoint angles keep a minimum circular gap; chords are paired by a
    random non-crossing matching.  ``weight_cap`` rescales the weights so
    their sum stays below the cap (keeping each above ``w_lo``), which keeps
    the bent surface embedded and convex.
    """
    k = int(rng.integers(1, max_leaves + 1))
    # build the circular gaps directly: min_gap plus a Dirichlet split of the
    # leftover circumference (rejection sampling is hopeless for 24 angles)
    floor = min_gap * 1.001
    gaps = floor + rng.dirichlet(np.ones(2 * k)) * (TWO_PI - 2 * k * floor)
    angles = (rng.uniform(0.0, TWO_PI) + np.cumsum(gaps)) % TWO_PI
    angles = np.sort(angles)
    pairs, stack = [], []
    opens = k
    for pos in range(2 * k):
        if (opens > 0 and not stack) or (opens > 0 and rng.random() < 0.5):
            stack.append(pos)
            opens -= 1
        else:
            pairs.append((stack.pop(), pos))
    weights = rng.uniform(w_lo + 1e-6, w_hi, size=k)
    if weight_cap is not None and weights.sum() > weight_cap:
        weights = np.maximum(weights * (weight_cap / weights.sum()), w_lo + 1e-6)
    leaves = tuple(
        lam.Leaf(f"l{i}", float(angles[a]), float(angles[b]), float(weights[i]))
        for i, (a, b) in enumerate(pairs)
    )
    return lam.FiniteLamination(leaves)


def random_arc(rng, lamination, r_range=(0.8, 2.2), tries=60):
    """Random transversal arc in the z = 0 slice; resamples near-tangencies."""
    for _ in range(tries):
        r1, r2 = rng.uniform(*r_range, size=2)
        p1, p2 = rng.uniform(0.0, TWO_PI, size=2)
        a = np.array(
            [math.cosh(r1), math.sinh(r1) * math.cos(p1), math.sinh(r1) * math.sin(p1), 0.0]
        )
        b = np.array(
            [math.cosh(r2), math.sinh(r2) * math.cos(p2), math.sinh(r2) * math.sin(p2), 0.0]
        )
        try:
            arc = lam.Arc(a, b)
            lam.crossings(arc, lamination)
            return arc
        except lam.LaminationError:
            continue
    raise RuntimeError("could not sample a transversal arc")


def random_convex_surface(rng, max_leaves=12, capped_fraction=0.7):
    """Random convex pleated surface: capped weights most of the time,
    full-range weights with convexity rejection otherwise."""
    while True:
        if rng.random() < capped_fraction:
            inst = random_disjoint_lamination(rng, max_leaves, weight_cap=0.98 * math.pi)
        else:
            inst = random_disjoint_lamination(rng, max_leaves)
        surface = surf.build_pleated(surf.BendingData(inst, 1))
        if surface.is_convex(samples_per_flat=8)[0]:
            return surface


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance-criteria verdict lines past output capture."""
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def convex_corpus():
    """Frozen 100-instance convex corpus with one transversal arc each."""
    rng = np.random.default_rng(20260823)
    out = []
    for _ in range(100):
        surface = random_convex_surface(rng)
        out.append((surface, random_arc(rng, surface.lamination)))
    return out
