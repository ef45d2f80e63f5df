"""Harness defaults, table grids and exit codes."""

# Process exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

# Monte Carlo defaults
DEFAULT_REPLICATIONS = 100
DEFAULT_SEED = 0
DEFAULT_SAMPLE_SIZE = 300
# experiments abort when more than this fraction of replications fail
MAX_FAILED_FRACTION = 0.1

# Component-estimate comparison against EM
TABLE1_SAMPLE_SIZE = 300
TABLE1_Y_SEPARATIONS = (0.1, 0.5, 1.0, 2.0)
TABLE1_UNIFORM_GAPS = (0.03, 0.05, 0.1)
TABLE1_LAPLACE_SHIFTS = (4.5, 5.5, 6.5)

# Clusterer comparison on two-dimensional covariates
TABLE2_OFFSETS = (3.0, 4.0, 5.0)
TABLE3_OUTER_RADII = (0.75, 0.80)
CLUSTERER_TABLE_SIZES = (250, 500)
CLUSTERER_TABLE_CLUSTERERS = ("radius_graph", "spectral:search", "kmeans")

# Interval clusterer on the toy uniform model
TOY_SAMPLE_SIZES = (100, 1000)
TOY_REPLICATIONS = 200
TOY_BOUND_CONSTANT = 10.0

TABLE_IDS = ("1", "2", "3", "toy")

# Config file keys, in echo order
CONFIG_KEYS = (
    "scenario", "n", "m", "y_model", "y_delta",
    "delta", "ell", "sigma_x", "mu1", "lam", "a", "r1", "r2", "eps",
    "clusterers", "bandwidth", "replications", "seed", "grid", "include_em",
    "output", "workers",
)
Y_MODEL_SEPARATED = "separated"
Y_MODEL_BALANCED = "balanced"
GRID_AUTO = "auto"
