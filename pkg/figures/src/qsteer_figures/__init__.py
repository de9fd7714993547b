"""Figure rendering for qsteer experiment CSV outputs."""

from .render import KINDS, FigureSpec, read_csv, render

__all__ = ["KINDS", "FigureSpec", "read_csv", "render"]
