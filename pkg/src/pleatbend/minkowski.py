"""Hyperboloid-model primitives for H^2 inside H^3.

Points live on the upper sheet of {<x,x> = -1} in Minkowski space with
signature (-,+,+,+).  The hyperbolic plane is the slice z = 0.  Totally
geodesic planes are encoded by a unit spacelike normal u, co-oriented so
that the preferred half-space is {x : <x,u> <= 0}.  Isometries are Lorentz
matrices acting linearly, which keeps angles and side predicates exact up
to inner products.
"""

from dataclasses import dataclass

import numpy as np

from . import defaults

J_DIAG = np.array([-1.0, 1.0, 1.0, 1.0])
J = np.diag(J_DIAG)

BASEPOINT = np.array([1.0, 0.0, 0.0, 0.0])
E_Z = np.array([0.0, 0.0, 0.0, 1.0])


class GeometryError(Exception):
    """Base class for geometric failures."""


class InvalidPointError(GeometryError):
    pass


class DegenerateGeodesicError(GeometryError):
    pass


class TangentPlanesError(GeometryError):
    """Planes that do not intersect in H^3 (disjoint or asymptotic)."""

    def __init__(self, inner):
        super().__init__(f"planes do not intersect in H^3: <u,v> = {inner}")
        self.inner = inner


def mink_inner(a, b):
    """Minkowski inner product -a_t b_t + a.b on the spatial part."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.dot(a * J_DIAG, b))


def make_point(coords):
    """Validate and return a point on the upper hyperboloid sheet."""
    p = np.asarray(coords, dtype=float)
    if p.shape != (4,):
        raise InvalidPointError(f"expected a 4-vector, got shape {p.shape}")
    q = mink_inner(p, p)
    if abs(q + 1.0) > defaults.CONSTRUCTION_TOL:
        raise InvalidPointError(f"<p,p> = {q}, not -1")
    if p[0] <= 0.0:
        raise InvalidPointError("point is on the lower sheet")
    return p


def normalize_point(v):
    """Project a timelike vector back onto the upper sheet."""
    v = np.asarray(v, dtype=float)
    q = mink_inner(v, v)
    if q >= 0.0:
        raise InvalidPointError("vector is not timelike")
    p = v / np.sqrt(-q)
    if p[0] < 0.0:
        p = -p
    return p


def make_plane(normal):
    """Validate a unit spacelike normal defining a co-oriented plane."""
    u = np.asarray(normal, dtype=float)
    q = mink_inner(u, u)
    if abs(q - 1.0) > defaults.CONSTRUCTION_TOL:
        raise GeometryError(f"<u,u> = {q}, not +1")
    return u


def normalize_plane(v):
    v = np.asarray(v, dtype=float)
    q = mink_inner(v, v)
    if q <= 0.0:
        raise GeometryError("vector is not spacelike")
    return v / np.sqrt(q)


def hyp_dist(p, q):
    """Hyperbolic distance arccosh(-<p,q>) between two sheet points."""
    c = -mink_inner(p, q)
    if c < 1.0 - 1e-6:
        raise InvalidPointError(f"-<p,q> = {c} < 1; not a pair of sheet points")
    if c < 1.0:
        return 0.0
    return float(np.arccosh(c))


def side_of(p, u):
    """Sign of <p,u> with a dead zone of SIDE_TOL around zero."""
    v = mink_inner(p, u)
    if abs(v) <= defaults.SIDE_TOL:
        return 0
    return 1 if v > 0.0 else -1


def plane_angle(u, v):
    """Angle in [0, pi) between two intersecting co-oriented planes.

    With normals transported by the bending isometries this is the exterior
    bending angle: two support planes of a surface bent by weight w meet at
    angle w.  Identical planes (same co-orientation) give 0.
    """
    if np.linalg.norm(np.asarray(u, float) - np.asarray(v, float)) < 1e-9:
        return 0.0
    c = mink_inner(u, v)
    if abs(c) >= 1.0 - 1e-12:
        raise TangentPlanesError(c)
    return float(np.arccos(c))


def planes_intersect(u, v):
    """True iff the two planes meet inside H^3 (or coincide)."""
    if np.linalg.norm(np.asarray(u, float) - np.asarray(v, float)) < 1e-9:
        return True
    return abs(mink_inner(u, v)) < 1.0 - 1e-12


@dataclass(frozen=True)
class Geodesic:
    """Complete geodesic given by two ideal endpoints (null 4-vectors).

    The endpoint order orients the geodesic; rotations about it use this
    orientation to fix their sense.
    """

    e1: np.ndarray
    e2: np.ndarray

    def __post_init__(self):
        e1 = np.asarray(self.e1, dtype=float)
        e2 = np.asarray(self.e2, dtype=float)
        for e in (e1, e2):
            if abs(mink_inner(e, e)) > 1e-8 * max(1.0, np.dot(e, e)):
                raise DegenerateGeodesicError("endpoint is not a null vector")
        if mink_inner(e1, e2) >= -1e-12:
            raise DegenerateGeodesicError("endpoints coincide or are degenerate")
        object.__setattr__(self, "e1", e1)
        object.__setattr__(self, "e2", e2)

    @property
    def span_normalizer(self):
        return np.sqrt(-2.0 * mink_inner(self.e1, self.e2))

    def point(self, s):
        """Arclength parametrization; s = 0 is the point nearest the span
        midpoint of the two (normalized) endpoints."""
        n = self.span_normalizer
        return (np.exp(s) * self.e1 + np.exp(-s) * self.e2) / n

    def direction(self, s):
        """Unit tangent at point(s), pointing toward e1."""
        n = self.span_normalizer
        return (np.exp(s) * self.e1 - np.exp(-s) * self.e2) / n


def geodesic_from_angles(theta1, theta2):
    """Geodesic of the z = 0 slice with ideal endpoints at the given angles."""
    e1 = np.array([1.0, np.cos(theta1), np.sin(theta1), 0.0])
    e2 = np.array([1.0, np.cos(theta2), np.sin(theta2), 0.0])
    return Geodesic(e1, e2)


def geodesic_basis(g):
    """Positively oriented Lorentz-orthonormal basis (v1, v2, w1, w2).

    v1 is unit timelike on g, v2 the unit tangent at v1; w1, w2 span the
    orthogonal spacelike 2-plane, ordered so det[v1 v2 w1 w2] > 0.
    """
    v1 = g.point(0.0)
    v2 = g.direction(0.0)
    # complete with Gram-Schmidt against the Minkowski form
    basis = [v1, v2]
    for cand in (np.eye(4)):
        w = np.asarray(cand, dtype=float)
        for b in basis:
            q = mink_inner(b, b)
            w = w - (mink_inner(w, b) / q) * b
        if mink_inner(w, w) > 1e-8:
            basis.append(w / np.sqrt(mink_inner(w, w)))
        if len(basis) == 4:
            break
    if len(basis) < 4:
        raise DegenerateGeodesicError("could not complete basis")
    B = np.column_stack(basis)
    if np.linalg.det(B) < 0.0:
        B[:, 3] = -B[:, 3]
    return B


def rotation_about_geodesic(g, theta):
    """Lorentz rotation by theta fixing the geodesic g pointwise.

    The rotation acts on the spacelike plane orthogonal to the span of g;
    its sense is tied to the orientation of g (swapping the endpoints of g
    inverts the rotation).
    """
    B = geodesic_basis(g)
    c, s = np.cos(theta), np.sin(theta)
    D = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, c, -s],
            [0.0, 0.0, s, c],
        ]
    )
    # B is Lorentz-orthonormal, so its inverse is J B^T J with a sign on the
    # timelike column; build it explicitly to avoid a linear solve
    signs = np.array([-1.0, 1.0, 1.0, 1.0])
    Binv = (signs[:, None] * B.T) * J_DIAG[None, :]
    return B @ D @ Binv


def translation_along_geodesic(g, d):
    """Hyperbolic translation by signed distance d along g (toward e1)."""
    B = geodesic_basis(g)
    ch, sh = np.cosh(d), np.sinh(d)
    D = np.array(
        [
            [ch, sh, 0.0, 0.0],
            [sh, ch, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    signs = np.array([-1.0, 1.0, 1.0, 1.0])
    Binv = (signs[:, None] * B.T) * J_DIAG[None, :]
    return B @ D @ Binv


def renormalize_lorentz(matrix):
    """Project a near-Lorentz matrix back onto the Lorentz group.

    Minkowski Gram-Schmidt on the columns (timelike first), keeping the
    upper sheet; used to control drift over long composition chains.
    """
    G = np.asarray(matrix, dtype=float)
    signs = (-1.0, 1.0, 1.0, 1.0)
    cols = []
    for j in range(4):
        w = G[:, j].copy()
        for b, sb in zip(cols, signs):
            w = w - (mink_inner(w, b) / sb) * b
        q = mink_inner(w, w)
        if q * signs[j] <= 0.0:
            raise GeometryError("matrix is too far from the Lorentz group")
        cols.append(w / np.sqrt(abs(q)))
    M = np.column_stack(cols)
    if M[0, 0] < 0.0:
        raise GeometryError("matrix swaps the hyperboloid sheets")
    return M


def make_lorentz(matrix):
    """Validate a Lorentz matrix preserving the upper sheet."""
    G = np.asarray(matrix, dtype=float)
    drift = G.T @ J @ G - J
    if np.abs(drift).max() > defaults.INVARIANT_TOL:
        raise GeometryError("matrix does not preserve the Minkowski form")
    if (G @ BASEPOINT)[0] <= 0.0:
        raise GeometryError("matrix swaps the hyperboloid sheets")
    return G


def apply_point(G, p):
    """Apply an isometry and renormalize onto the sheet (drift control)."""
    return normalize_point(G @ p)


def apply_plane(G, u):
    return normalize_plane(G @ u)


def leaf_normal(g):
    """Unit normal of an in-slice geodesic, tangent to the z = 0 slice.

    The sign is tied to the orientation of g: (point, tangent, normal, e_z)
    is a positively oriented frame.  Flipping the endpoint order of g flips
    the normal, so side bookkeeping and rotation sense flip together.
    """
    B = geodesic_basis(g)
    w1, w2 = B[:, 2], B[:, 3]
    # for an in-slice geodesic the orthogonal plane is span(in-slice normal, e_z)
    if abs(w2[3]) >= abs(w1[3]):
        u = w1 if abs(w1[3]) < 1e-9 else None
    else:
        u = w2 if abs(w2[3]) < 1e-9 else None
    if u is None:
        raise DegenerateGeodesicError("geodesic does not lie in the z = 0 slice")
    # fix the sign so that the frame (v1, v2, u, e_z) is positively oriented
    M = np.column_stack([B[:, 0], B[:, 1], u, E_Z])
    if np.linalg.det(M) < 0.0:
        u = -u
    return u


def segment_point(p, q, t):
    """Point at parameter t in [0, 1] on the geodesic segment [p, q]."""
    d = hyp_dist(p, q)
    if d < 1e-14:
        return np.array(p, dtype=float)
    s = np.sinh(d)
    return normalize_point((np.sinh((1.0 - t) * d) * p + np.sinh(t * d) * q) / s)


def tangent_toward(p, q):
    """Unit tangent vector at p pointing toward q."""
    w = np.asarray(q, float) + mink_inner(p, q) * np.asarray(p, float)
    n = mink_inner(w, w)
    if n <= 1e-20:
        raise DegenerateGeodesicError("coincident points have no direction")
    return w / np.sqrt(n)


def exp_map(p, v, d):
    """Geodesic flow from p along the unit tangent v for distance d."""
    return normalize_point(np.cosh(d) * np.asarray(p, float) + np.sinh(d) * np.asarray(v, float))


def geodesic_through(p, q):
    """Complete geodesic through two distinct sheet points."""
    d = hyp_dist(p, q)
    if d < 1e-12:
        raise DegenerateGeodesicError("points coincide")
    v = tangent_toward(p, q)
    return Geodesic(p + v, p - v)


def random_lorentz(rng, scale=1.0):
    """Random orientation-preserving isometry (for invariance tests)."""

    def axis():
        # keep the ideal endpoints separated so the basis stays conditioned
        while True:
            t1, t2 = rng.uniform(0, 2 * np.pi, 2)
            gap = abs(t1 - t2) % (2 * np.pi)
            if 0.5 < gap < 2 * np.pi - 0.5:
                return geodesic_from_angles(t1, t2)

    G = translation_along_geodesic(axis(), rng.uniform(-scale, scale))
    return G @ rotation_about_geodesic(axis(), rng.uniform(0, 2 * np.pi))
