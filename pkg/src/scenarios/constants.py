"""Defaults for the simulation scenarios and the consumption-curve features."""

# Concentric annuli
DEFAULT_INNER_RADIUS = 0.3
DEFAULT_ANNULUS_HALF_WIDTH = 0.15

# Laplace covariates
DEFAULT_LAPLACE_SCALE = 1.0
DEFAULT_LAPLACE_LOCATION = 1.0

# Consumption curves: 9 instants, disruption between the 4th and 6th
CURVE_LENGTH = 9
FEATURE_COUNT = 2
DERIVED_VARIABLE_COUNT = 6

# Reading of the relative variations around the disruption window
V54_LITERAL = "literal"
V54_FORWARD = "forward"
V54_CONVENTIONS = (V54_LITERAL, V54_FORWARD)

# Synthetic curve fixture: base level range, dip profile over instants 4..6, noise band
SYNTHETIC_BASE_RANGE = (0.5, 2.0)
SYNTHETIC_DIP_PROFILE = (0.8, 0.4, 0.8)
SYNTHETIC_NOISE_RANGE = (0.97, 1.03)
