"""Computational lab for the right-angled pentagon group and its quotients."""
__version__ = "0.1.0"
