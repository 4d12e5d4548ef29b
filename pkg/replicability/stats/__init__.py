"""Numerical kernels: truncated normal laws and exact binomial tails."""
