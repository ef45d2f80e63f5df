"""Seeded simulation scenarios, true densities, level-set thresholds and ERDF features."""
