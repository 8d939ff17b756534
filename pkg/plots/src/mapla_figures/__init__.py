"""Offline figure rendering for mapla experiment CSVs."""

__version__ = "0.1.0"

from .render import FIGURE_KINDS, render_spec  # noqa: F401
