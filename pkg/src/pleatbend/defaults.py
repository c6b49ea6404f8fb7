"""Central table of numeric defaults and tolerances.

Every user-facing default lives here so the CLI, the library and the tests
agree on one set of numbers.

===================  =========  =============================================
name                 value      used for
===================  =========  =============================================
DELTA                0.05       max consecutive support-plane angle
EPSILON              0.25       max sample spacing along an arc
WINDOW_RADIUS        5.0        radius for windowed Hausdorff comparisons
TOL                  1e-6       convergence / user-facing predicate tolerance
TAIL                 10         tail window for sequence convergence checks
CONSTRUCTION_TOL     1e-10      on-hyperboloid / unit-normal validation
INVARIANT_TOL        1e-9       Lorentz-matrix and fixed-point checks
SIDE_TOL             1e-9       dead zone of the side-of-plane sign
SUPPORT_TOL          1e-8       one-sidedness of support planes
EPSILON_MAX          log(3)/2   hard upper bound on the spacing parameter
===================  =========  =============================================
"""

import math

DELTA = 0.05
EPSILON = 0.25
WINDOW_RADIUS = 5.0
TOL = 1e-6
TAIL = 10

CONSTRUCTION_TOL = 1e-10
INVARIANT_TOL = 1e-9
SIDE_TOL = 1e-9
SUPPORT_TOL = 1e-8
TRANSVERSALITY_TOL = 1e-6

EPSILON_MAX = math.log(3.0) / 2.0

# default spacing parameter for angle-error reports; the theory only needs
# a value in (0, 1) strictly below EPSILON_MAX
S_DEFAULT = min(0.5, EPSILON_MAX - 1e-3)
