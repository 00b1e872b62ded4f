"""Constants for the certifier."""

from fractions import Fraction

# DP bracket crossing limit; corpus diagrams stay well under it
DEFAULT_CROSSING_LIMIT = 24

# Exhaustive 2^n state sum, tests only
DEFAULT_BRUTEFORCE_LIMIT = 16

# Truncation order of a parsed arc = largest exponent + slack
DEFAULT_ARC_SLACK = Fraction(1)

DEFAULT_GAUSS_TOLERANCE = 1e-3

# Log-log window used to estimate tangency numerically
SLOPE_WINDOW = (1e-4, 1e-2)

ARC_COORDINATES = ("x", "y", "z", "w")

# Method names as they appear in certificates
METHOD_SAMPAIO = "sampaio"
METHOD_BRIDGE_BREAK = "bridge_break"

DISTINGUISHED = "Distinguished"
INCONCLUSIVE = "Inconclusive"
