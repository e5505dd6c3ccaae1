"""Workbench: serialization, storage, CSV tables and the command runner."""

from .runner import Workbench

__all__ = ["Workbench"]
