"""Standalone plotting for pcrit CSV artifacts."""

__version__ = "0.1.0"
