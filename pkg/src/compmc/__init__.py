"""Composite Monte Carlo decision support: forecasting, stochastic cost simulation and fuzzy rules."""

__version__ = "0.1.0"
