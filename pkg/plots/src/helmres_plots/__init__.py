"""Rendering of helmres benchmark artifacts into static figures.

This package consumes only the documented file formats of the benchmark
CLI (summary/trace/HR/eigenvalue CSVs, bound JSON, resolvent grids) and
never modifies the numbers it plots; every renderer returns the exact
series it drew so tests can diff them against golden files.
"""

from helmres_plots.figures import FigureSpec, render

__version__ = "0.1.0"

__all__ = ["FigureSpec", "render", "__version__"]
