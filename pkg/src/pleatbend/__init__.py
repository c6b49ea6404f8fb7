"""Bending the hyperbolic plane along finite laminations: geometry kernel,
pleated surfaces, train tracks, the pi-truncation quotient, and convergence
experiments, with a report-writing CLI."""

__version__ = "0.1.0"
