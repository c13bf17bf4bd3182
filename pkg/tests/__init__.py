"""Tests for the qubit functional-encryption simulator."""
