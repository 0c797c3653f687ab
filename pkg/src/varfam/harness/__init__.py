"""Validation engine and command-line interface."""
