"""Static figures from beliefdyn run artifacts."""

__version__ = "0.1.0"

from .render import render_cobweb, render_polarization, render_trajectory
