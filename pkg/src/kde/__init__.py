"""Gaussian kernel density estimation: oracle and two-step component estimates."""
