"""Figure rendering for twostagegt CSV outputs."""

from .panels import PANEL_KINDS, PanelSpec, build_panel, load_series, render_panel

__version__ = "0.1.0"
