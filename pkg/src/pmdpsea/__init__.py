"""Optimal simple schedulers of parametric MDPs over the whole parameter space."""

__version__ = "0.1.0"
