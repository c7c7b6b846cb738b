"""Align chapter text with reference summaries and build extractive oracles."""

from __future__ import annotations

__version__ = "0.1.0"
