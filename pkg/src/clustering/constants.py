"""Clustering defaults."""

# k-means
DEFAULT_KMEANS_RESTARTS = 10
KMEANS_MAX_ITER = 300

# Spectral clustering width modes
SIGMA_AUTO = "auto"
SIGMA_SEARCH = "search"
SIGMA_SEARCH_CANDIDATES = 16
# candidates whose degree spread d^(-1/2) exceeds this are skipped
SIGMA_SEARCH_MAX_DEGREE_SPREAD = 1e4
SPECTRAL_KMEANS_RESTARTS = 10

# EM on a univariate Gaussian mixture
EM_MAX_ITER = 500
EM_TOL = 1e-8
EM_VARIANCE_FLOOR = 1e-6
# fitted weights must sum to 1 within this
WEIGHT_SUM_TOLERANCE = 1e-12
