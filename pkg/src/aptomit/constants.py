"""Physical constants (SI)."""

import math

HBAR = 1.054571817e-34  # J s
C_LIGHT = 2.99792458e8  # m/s
TWO_PI = 2.0 * math.pi
