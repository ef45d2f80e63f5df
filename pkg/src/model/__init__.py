"""Shared domain types: samples, cluster assignments, density grids and permutations."""
