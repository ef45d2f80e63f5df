"""Constants shared by the domain types."""

# Label reserved for observations a clusterer declines to classify (cluster C_0)
UNASSIGNED_LABEL = 0

# Brute-force permutation search is limited to M! with M <= 8
MAX_PERMUTATION_ORDER = 8

# Clusterer identifiers carried on ClusterAssignment.method
RADIUS_GRAPH = "radius_graph"
KMEANS = "kmeans"
SPECTRAL = "spectral"
INTERVAL = "interval"
TRUTH = "truth"
