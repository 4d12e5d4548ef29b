"""Replicability analyses and their reporting."""
