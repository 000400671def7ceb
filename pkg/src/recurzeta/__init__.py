"""Meromorphic continuation, poles, residues and special values of Dirichlet
series sum a_n^{-s} over integer linear recurrence sequences."""

__version__ = "0.1.0"
