"""Sector portfolio optimization under second-order stochastic dominance."""
