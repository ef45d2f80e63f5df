"""Kernel density estimation defaults."""

# Bandwidth policy identifiers
FIXED = "fixed"
SILVERMAN = "silverman"
LSCV = "lscv"

# Silverman's rule: 1.06 * min(sd, IQR / 1.34) * N^(-1/5)
SILVERMAN_FACTOR = 1.06
IQR_SCALE = 1.34
SILVERMAN_EXPONENT = -0.2

# Default LSCV candidates, as multipliers of the Silverman bandwidth
LSCV_FACTOR_RANGE = (0.05, 1.5)
LSCV_CANDIDATE_COUNT = 40

# Automatic grid: [min(y) - 5 h_max, max(y) + 5 h_max] with 1024 points
DEFAULT_GRID_POINTS = 1024
GRID_PADDING_BANDWIDTHS = 5.0
