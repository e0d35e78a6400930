"""Published reference values, used for side-by-side reporting and tests.

Nothing on a verdict path reads these except the three frozen discriminant
anchors (which the table asset also carries) and the upper ends of the tower
windows.
"""

from __future__ import annotations

import math

PI2 = math.pi**2

VOLUME_CAP_PI2 = 108
GRC_VOLUME_CAP_PI2 = 84

# root-discriminant lower bounds quoted for three signatures
DISC_ANCHORS = {
    (20, 18, 1): 19.365,
    (38, 36, 1): 28.730,
    (40, 36, 2): 27.950,
}

# degree-20 exclusion chain
DEG20_GENERIC_UPPER = 31.646
DEG20_SIX_NORM2_LOWER = 33.387
DEG20_OMEGA2_CUT = 6
DEG20_OMEGA2_FINAL = 2
DEG20_OMEGA2_UPPER = 24.810
DEG20_FINAL_UPPER = 16.751
DEG20_M_CAP = 10

# root-discriminant upper bounds by degree, unconditional (degree 4 is a strict "<")
DISC_TABLE_UNCONDITIONAL = {4: 668, 6: 649, 8: 639, 10: 503, 12: 445, 14: 395, 16: 361, 18: 346}
DISC_TABLE_STRICT = {4}
# same, assuming the class group has 2-rank at most 12
DISC_TABLE_RANK12 = {4: 149, 6: 82, 8: 60, 10: 29, 12: 16}

MAX_DEGREE = 18
MAX_TOTALLY_REAL_DEGREE = 9
RANK12_MAX_DEGREE = 12

QUADRATIC_COUNT = 135_643
QUADRATIC_LIMIT = 668**2 - 1
CUBIC_COUNT = 17_449_721
CUBIC_LIMIT = 649**3

TOWER_UNCONDITIONAL = (60.8395, 22.3816)
TOWER_GRH = (215.3325, 44.7632)

# dimension bounds combined into the all-dimension bound
DIM2_TOTALLY_REAL_DEGREE = 11
TRANSITION_DIMENSION_BOUND = 25
