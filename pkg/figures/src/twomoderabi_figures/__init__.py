"""Figure rendering for twomoderabi CSV tables (a pure view, no physics)."""

__version__ = "0.1.0"

from .render import (
    FigureSpec,
    HEADERS,
    HeaderContractError,
    PANELS,
    branch_style,
    read_table,
    render,
    shifted_sz,
)
