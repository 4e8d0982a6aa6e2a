"""Tests for hyperflux."""
