"""Immutable value types shared across the analyses."""
