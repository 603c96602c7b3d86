"""Hybrid GA + Newton solver for RSSI-based relative positioning of small rovers."""

__version__ = "0.1.0"
