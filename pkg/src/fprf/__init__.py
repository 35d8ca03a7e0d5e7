"""Fractional Poisson random fields."""
