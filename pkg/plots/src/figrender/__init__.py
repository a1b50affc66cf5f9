"""Figure rendering for forkaudit sweep CSVs."""

from .render import (
    FigureSpec,
    RenderInputError,
    build_figure,
    figure_specs,
    render_all,
    render_figure,
)

__version__ = "0.1.0"
