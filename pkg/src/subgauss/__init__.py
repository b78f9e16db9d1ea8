"""Exact psi_2 norms and hereditary subgaussianity checks."""
