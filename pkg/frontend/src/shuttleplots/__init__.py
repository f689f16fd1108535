"""Static figures from the condensate-transport simulation CSV outputs."""

from .render import FIGURE_KINDS, FigureSpec, RenderError, render

__version__ = "0.1.0"
