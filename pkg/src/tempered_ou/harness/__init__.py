"""Validation, benchmarking, export and the command-line interface."""
