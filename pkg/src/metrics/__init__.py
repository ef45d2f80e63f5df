"""L1 distances, permutation-minimized clustering error and Monte Carlo ratio statistics."""
