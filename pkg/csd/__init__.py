# csd/__init__.py
"""Single-cell D2D resource allocation: combined shared/dedicated reuse and the Max S/D baseline."""

__version__ = "1.0.0"
