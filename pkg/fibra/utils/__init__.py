"""Helpers for the fibra CLI: permutations, caching, spec loading, reports and command runners."""
