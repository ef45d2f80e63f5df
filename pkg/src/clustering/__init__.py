"""Clusterers for the covariates: radius graph, interval rule, k-means, spectral, and 1-D EM."""
