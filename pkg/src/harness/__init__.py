"""Experiment orchestration, table reproduction and file pipelines."""
