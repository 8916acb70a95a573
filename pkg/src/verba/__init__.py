"""verba: a finite-group workbench for word widths, Holt groups,
subgroup censuses, and height-based order bounds."""

__version__ = "0.1.0"
