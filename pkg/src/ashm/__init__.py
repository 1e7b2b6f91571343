"""Alternating sign matrices and hypermatrices."""
