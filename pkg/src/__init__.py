"""Qubit functional-encryption simulator - Main package."""
